//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Everything runs on exact rationals unless stated otherwise.

mod common;

use coevo::dynamics::{replicate, stability_probe, ProbeOptions, StepControl};
use coevo::env::{CostSchedule, Environment};
use coevo::game::{prisoners_dilemma, symmetrize, MixedStrategy, SymmetricGame};
use coevo::interdependent::{
    construct_hawkdove_esc, id_pure_esc_sufficient, id_pure_nsc_necessary, HawkDoveCase,
};
use coevo::population::{BehaviorPolicy, Configuration, TypeDistribution};
use coevo::prefs::{
    deception_equilibria, nash_equilibria, nash_violation, undominated_pure_actions,
    CognitiveType, UtilityFunction,
};
use coevo::scalar::Scalar;
use coevo::stability::{
    build_type_game, certify_pure_nsc, check_highest_type_conditions, check_efficiency_requirement,
    construct_rps_nsc, effective_cost, is_ess, is_nss, refute_nsc, StabilityOptions,
    StabilityStatus, Witness,
};

use common::{
    brute_force_pure_optimum, ess_sweep_oracle, grid_undominated, nss_sweep_oracle,
    random_game_corpus, stability_candidates, SweepVerdict,
};

fn s(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn r(n: i64, d: i64) -> Scalar {
    Scalar::ratio(n, d)
}

/// PD environment with effective cost `c` (k2 = c, q(2,1) = 1, steep tail).
fn pd_env(c: Scalar) -> Environment {
    Environment::builder(prisoners_dilemma())
        .costs(vec![Scalar::zero(), c])
        .tail_step(s(100))
        .build()
        .unwrap()
}

/// The all-cooperate convention-enforcer configuration.
fn all_cooperate_config(env: &Environment) -> Configuration {
    let enforcer = CognitiveType::simple(
        "enforcer",
        UtilityFunction::convention_enforcer(0, 1, 2),
        1,
    )
    .unwrap();
    let mut policy = BehaviorPolicy::new();
    policy.set_nash(0, 0, MixedStrategy::pure(0, 2));
    Configuration::new(env.clone(), TypeDistribution::singleton(enforcer), policy)
}

#[test]
fn criterion_01_pure_convention_cost_sweep() {
    // Sweep the effective cost across the critical value g(C) = 1: the
    // convention certifies exactly on the closed upper side, and the
    // indifferent-deceiver recipe fires exactly on the open lower side.
    for (c, should_certify) in [
        (r(1, 4), false),
        (r(1, 2), false),
        (s(1), true),
        (r(1001, 1000), true),
        (s(2), true),
        (s(10), true),
    ] {
        let env = pd_env(c.clone());
        assert_eq!(effective_cost(&env), c);
        let cert = certify_pure_nsc(&env, 0).unwrap();
        assert_eq!(
            cert.verdict.is_certified(),
            should_certify,
            "certify at c = {c}: {:?}",
            cert.verdict
        );

        let config = all_cooperate_config(&env);
        assert!(config.validate().unwrap().valid);
        let report = refute_nsc(&config, 4).unwrap();
        if should_certify {
            assert_eq!(
                report.verdict.status,
                StabilityStatus::Inconclusive,
                "refute at c = {c} must stay quiet"
            );
        } else {
            assert!(report.verdict.is_refuted(), "refute at c = {c}");
            let Some(Witness::Scenario(scenario)) = &report.verdict.witness else {
                panic!("expected a scenario witness at c = {c}");
            };
            assert!(
                scenario.label.starts_with("indifferent-deceiver"),
                "expected the indifferent-deceiver recipe, got {}",
                scenario.label
            );
            // First-order advantage q·g − k, exactly.
            assert_eq!(scenario.first_order_gain, Scalar::one() - c.clone());
        }
    }
    println!("criterion 01 (pure convention certified iff g <= c; deceiver fires iff c < g): PASS");
}

fn rps_env(explicit_tenths: &[i64], tail_tenths: i64) -> Environment {
    Environment::builder(SymmetricGame::rock_paper_scissors())
        .costs(explicit_tenths.iter().map(|&v| r(v, 10)).collect())
        .tail_step(r(tail_tenths, 10))
        .build()
        .unwrap()
}

#[test]
fn criterion_02_rps_ladder_construction() {
    // k(n) = 0.3 (n − 1): seven levels with frequencies (.1 .2 .1 .2 .1 .2 .1).
    let env = rps_env(&[0, 3, 6, 9, 12, 15, 18], 3);
    let config = construct_rps_nsc(&env, None).unwrap();
    assert_eq!(config.distribution().len(), 7);
    let expected: Vec<Scalar> = [1, 2, 1, 2, 1, 2, 1].iter().map(|&v| r(v, 10)).collect();
    assert_eq!(config.distribution().frequencies(), &expected[..]);
    assert!(config.validate().unwrap().valid);
    assert!(config.is_balanced(&Scalar::zero()).unwrap());
    assert!(check_highest_type_conditions(&config).unwrap().pass);
    // Independent linear-system oracle: consecutive shares sum to the cost
    // gap and everything sums to one.
    let mu = config.distribution().frequencies();
    assert_eq!(mu.iter().cloned().sum::<Scalar>(), Scalar::one());
    for n in 0..6 {
        assert_eq!(mu[n].clone() + mu[n + 1].clone(), r(3, 10));
    }
    for i in 0..7 {
        for j in 0..7 {
            if i == j {
                continue;
            }
            let (hi, lo) = if i > j { (i, j) } else { (j, i) };
            assert_eq!(
                config.policy().deception_play(hi, lo).unwrap().as_pure(),
                Some(1),
                "higher level plays Paper"
            );
            assert_eq!(
                config.policy().deception_play(lo, hi).unwrap().as_pure(),
                Some(0),
                "lower level is induced to Rock"
            );
        }
    }

    // Two-level variant: shares (ε, 1 − ε) all earn exactly ε − 1.
    let env = rps_env(&[0, 10], 90);
    for eps in [r(1, 10), r(1, 2), r(9, 10)] {
        let config = construct_rps_nsc(&env, Some(&eps)).unwrap();
        for i in 0..2 {
            assert_eq!(
                config.expected_fitness_by_index(i).unwrap(),
                eps.clone() - Scalar::one()
            );
        }
        assert!(config.is_balanced(&Scalar::zero()).unwrap());
    }
    println!("criterion 02 (rock-paper-scissors ladder; two-level fitness = share − 1): PASS");
}

/// Generic 3-action coordination-style game with a unique symmetric
/// efficient profile, plus a two-type configuration whose cross play is an
/// inefficient (b, c) equilibrium of their subjective games.
fn inefficient_cross_play() -> (Environment, Configuration) {
    let game = SymmetricGame::from_int_rows(
        &["a", "b", "c"],
        &[&[10, 0, 1], &[2, 7, 3], &[4, 5, 6]],
    )
    .unwrap();
    let env = Environment::builder(game).costs_int(&[0, 20]).build().unwrap();
    let u_j = UtilityFunction::new(
        coevo::linalg::Matrix::from_rows(vec![
            vec![s(1), s(1), s(0)],
            vec![s(0), s(0), s(1)],
            vec![s(0), s(0), s(0)],
        ])
        .unwrap(),
    )
    .unwrap();
    let u_k = UtilityFunction::new(
        coevo::linalg::Matrix::from_rows(vec![
            vec![s(1), s(0), s(1)],
            vec![s(0), s(0), s(0)],
            vec![s(0), s(1), s(0)],
        ])
        .unwrap(),
    )
    .unwrap();
    let tj = CognitiveType::simple("stubborn-b", u_j, 1).unwrap();
    let tk = CognitiveType::simple("stubborn-c", u_k, 1).unwrap();
    let dist = TypeDistribution::new(vec![tj, tk], vec![r(1, 2), r(1, 2)]).unwrap();
    let mut policy = BehaviorPolicy::new();
    policy.set_nash(0, 0, MixedStrategy::pure(0, 3));
    policy.set_nash(1, 1, MixedStrategy::pure(0, 3));
    policy.set_nash(0, 1, MixedStrategy::pure(1, 3)); // j plays b against k
    policy.set_nash(1, 0, MixedStrategy::pure(2, 3)); // k plays c against j
    (env.clone(), Configuration::new(env, dist, policy))
}

#[test]
fn criterion_03_inefficient_cross_play_instability() {
    let (_env, config) = inefficient_cross_play();
    assert!(config.validate().unwrap().valid);
    let report = check_efficiency_requirement(&config).unwrap();
    assert!(report.applicable);
    assert!(!report.pass);
    assert_eq!(report.witnesses.len(), 1);
    let w = &report.witnesses[0];
    assert_eq!(w.quadratic_form, s(12)); // 2·10 − (3 + 5)
    assert_eq!(w.independent_value, Some(s(12)));

    // The same direction escapes dynamically: perturb the mixed rest point
    // of the induced type game.
    let tg = build_type_game(&config).unwrap();
    let b = tg.payoff();
    assert_eq!(b.get(0, 0), &s(10));
    assert_eq!(b.get(0, 1), &s(3));
    assert_eq!(b.get(1, 0), &s(5));
    assert_eq!(b.get(1, 1), &s(10));
    // Rest point of [[10,3],[5,10]]: payoffs equalize at x = (7/12, 5/12).
    let x_star = [7.0 / 12.0, 5.0 / 12.0];
    let probe = stability_probe(
        b,
        &x_star,
        &[1e-3],
        200.0,
        &StepControl::default(),
        &ProbeOptions {
            seed: 11,
            ..ProbeOptions::default()
        },
    )
    .unwrap();
    assert!(probe.radii[0].escaped, "{:?}", probe.radii[0]);
    assert!(probe.radii[0].max_terminal_distance > 1e-2);
    println!("criterion 03 (inefficient cross play: quadratic-form witness + dynamic escape): PASS");
}

#[test]
fn criterion_04_asymmetric_efficiency_blocks_stability() {
    // Generic game whose unique efficient profile is asymmetric.
    let game = SymmetricGame::from_int_rows(
        &["a", "b", "c"],
        &[&[0, 9, 1], &[6, 2, 3], &[4, 5, 7]],
    )
    .unwrap();
    let genericity_tol = r(1, 1_000_000_000_000);
    assert!(game.is_generic(&genericity_tol));
    let eff = game.efficiency();
    assert!(eff.symmetric_efficient_actions.is_empty());
    assert_eq!(eff.efficient_payoff, r(15, 2));

    let env = Environment::builder(game.clone()).costs_int(&[0, 1]).build().unwrap();
    for a in 0..3 {
        let cert = certify_pure_nsc(&env, a).unwrap();
        assert!(cert.verdict.is_refuted(), "action {a} must refute");
        let efficiency_condition = &cert.verdict.conditions[0];
        assert_eq!(efficiency_condition.name, "symmetric-efficiency");
        assert!(!efficiency_condition.passed);
    }

    // The corollary is also visible at the configuration level.
    let report = check_efficiency_requirement(&all_cooperate_like(&env)).unwrap();
    assert!(report.no_stable_configuration_exists);

    // Role-symmetrizing the game restores a symmetric efficient profile.
    let row = game.payoff_matrix().clone();
    let embedded = symmetrize(&row, &row.transpose()).unwrap();
    assert!(!embedded.efficiency().symmetric_efficient_actions.is_empty());
    println!("criterion 04 (asymmetric-only efficiency refutes every pure candidate; embedding repairs it): PASS");
}

/// A minimal valid single-type configuration for an arbitrary environment.
fn all_cooperate_like(env: &Environment) -> Configuration {
    let m = env.game().num_actions();
    let t = CognitiveType::simple("anchor", UtilityFunction::dominant_action(0, m), 1).unwrap();
    let mut policy = BehaviorPolicy::new();
    policy.set_nash(0, 0, MixedStrategy::pure(0, m));
    Configuration::new(env.clone(), TypeDistribution::singleton(t), policy)
}

#[test]
fn criterion_05_stability_engine_vs_sweep_oracle() {
    let mut games = random_game_corpus(50, 20260810);
    games.push(SymmetricGame::rock_paper_scissors());
    games.push(prisoners_dilemma());

    let opts = StabilityOptions::default();
    let mut verdicts = 0usize;
    let mut inconclusive = 0usize;
    for (gi, game) in games.iter().enumerate() {
        for x in stability_candidates(game) {
            let payoff = game.payoff_matrix();
            for strict in [false, true] {
                let verdict = if strict {
                    is_ess(payoff, &x, &opts).unwrap()
                } else {
                    is_nss(payoff, &x, &opts).unwrap()
                };
                verdicts += 1;
                // The oracle additionally tests the engine's own witness
                // direction, realized as a nearby mutant on the simplex.
                let extra: Vec<Vec<Scalar>> = match &verdict.witness {
                    Some(Witness::Direction(z)) => {
                        witness_mutant(&x, z).into_iter().collect()
                    }
                    _ => Vec::new(),
                };
                let sweep = if strict {
                    ess_sweep_oracle(payoff, &x, &extra)
                } else {
                    nss_sweep_oracle(payoff, &x, &extra)
                };
                match verdict.status {
                    StabilityStatus::CertifiedStable => assert_eq!(
                        sweep,
                        SweepVerdict::Stable,
                        "game {gi}, candidate {:?}, strict={strict}: certified but the sweep invades",
                        x.weights()
                    ),
                    StabilityStatus::Refuted => assert_eq!(
                        sweep,
                        SweepVerdict::Unstable,
                        "game {gi}, candidate {:?}, strict={strict}: refuted but the sweep is quiet",
                        x.weights()
                    ),
                    StabilityStatus::Inconclusive => inconclusive += 1,
                }
            }
        }
    }
    let rate = inconclusive as f64 / verdicts as f64;
    assert!(
        rate <= 0.10,
        "inconclusive rate {rate:.3} exceeds 10% ({inconclusive}/{verdicts})"
    );
    println!(
        "criterion 05 (stability engine vs definitional sweep: 0 disagreements in {verdicts} verdicts, inconclusive rate {:.1}%): PASS",
        rate * 100.0
    );
}

/// Scales a witness direction into the simplex: `y = x + δz` with δ chosen
/// so all coordinates stay nonnegative.
fn witness_mutant(x: &MixedStrategy, z: &[Scalar]) -> Option<Vec<Scalar>> {
    let mut delta: Option<Scalar> = None;
    for (i, zi) in z.iter().enumerate() {
        if *zi < Scalar::zero() {
            let bound = -(x.weight(i) / zi);
            if delta.as_ref().is_none_or(|d| bound < *d) {
                delta = Some(bound);
            }
        }
    }
    let delta = delta.unwrap_or_else(Scalar::one).min(Scalar::one());
    if delta <= Scalar::zero() {
        return None;
    }
    let y: Vec<Scalar> = (0..z.len())
        .map(|i| x.weight(i).clone() + delta.clone() * z[i].clone())
        .collect();
    let total: Scalar = y.iter().cloned().sum();
    Some(y.into_iter().map(|w| w / total.clone()).collect())
}

#[test]
fn criterion_06_equilibrium_oracles() {
    let mut games = random_game_corpus(50, 20260810);
    games.push(SymmetricGame::rock_paper_scissors());
    games.push(prisoners_dilemma());

    for (gi, game) in games.iter().enumerate() {
        let mat = UtilityFunction::materialistic(game);
        // Undominated actions agree with the belief-grid brute force.
        let lp = undominated_pure_actions(&mat).unwrap();
        let grid = grid_undominated(&mat);
        assert_eq!(lp.actions, grid, "game {gi}: dominance LP vs grid oracle");

        // Every enumerated equilibrium passes independent best-reply
        // verification.
        let report = nash_equilibria(&mat, &mat).unwrap();
        assert!(!report.equilibria.is_empty());
        for (s1, s2) in &report.equilibria {
            let violation = nash_violation(&mat, &mat, s1, s2);
            assert!(
                violation <= Scalar::approx(1e-9),
                "game {gi}: equilibrium fails re-verification by {violation}"
            );
        }

        // Deception values match the brute-force optimum over feasible pure
        // profiles, for a spread of victim preferences.
        let env = Environment::builder(game.clone()).costs_int(&[0, 1]).build().unwrap();
        let deceiver = CognitiveType::materialistic("hi", game, 2);
        let m = game.num_actions();
        let victims = [
            UtilityFunction::materialistic(game),
            UtilityFunction::constant(m),
            UtilityFunction::dominant_action(0, m),
        ];
        for victim_u in victims {
            let victim = CognitiveType::simple("lo", victim_u, 1).unwrap();
            let de = deception_equilibria(&env, &deceiver, &victim, &[]).unwrap();
            let u = deceiver.utility_against(&victim.type_ref());
            let brute =
                brute_force_pure_optimum(|a, b| u.value(a, b).clone(), m, &de.feasible);
            assert_eq!(de.value, brute, "game {gi}: deception value vs brute force");
            for &(a, b) in &de.profiles {
                assert_eq!(u.value(a, b), &de.value);
            }
        }
    }
    println!("criterion 06 (dominance LP = grid oracle; equilibria re-verified; deception values = brute force): PASS");
}

#[test]
fn criterion_07_maxmin_lower_bound() {
    // A configuration whose average fitness sits below the pure maxmin:
    // a lone level-2 materialistic type paying k2 = 2 for nothing in
    // zero-sum self-play (fitness −2 < maxmin −1).
    let env = rps_env(&[0, 20], 100);
    let t = CognitiveType::materialistic("overpaying", env.game(), 2);
    let mut policy = BehaviorPolicy::new();
    policy.set_nash(0, 0, MixedStrategy::uniform(3));
    let config = Configuration::new(env.clone(), TypeDistribution::singleton(t), policy);
    assert!(config.validate().unwrap().valid);
    assert_eq!(config.average_fitness().unwrap(), s(-2));

    let report = refute_nsc(&config, 3).unwrap();
    assert!(report.verdict.is_refuted());
    let Some(Witness::Scenario(scenario)) = &report.verdict.witness else {
        panic!("expected a scenario witness");
    };
    assert_eq!(scenario.label, "maxmin-guarantee");
    assert_eq!(scenario.mutants.len(), 1);
    assert_eq!(scenario.mutants[0].level, 1);
    // The mutant insists on the lowest-index maxmin action (Rock).
    let maxmin_guard = UtilityFunction::dominant_action(0, 3);
    assert!(
        matches!(&scenario.mutants[0].prefs, coevo::prefs::Preferences::Simple(u) if u == &maxmin_guard)
    );

    // Certified configurations sit weakly above the maxmin value.
    let cert = certify_pure_nsc(&pd_env(s(2)), 0).unwrap();
    let config = cert.configuration.unwrap();
    let mm = config.env().game().maxmin_minmax();
    assert!(config.average_fitness().unwrap() >= mm.maxmin);

    let rps_config = construct_rps_nsc(&rps_env(&[0, 3, 6, 9, 12, 15, 18], 3), None).unwrap();
    let mm = rps_config.env().game().maxmin_minmax();
    assert!(rps_config.average_fitness().unwrap() >= mm.maxmin);
    println!("criterion 07 (maxmin guard fires below the bound; certified configurations respect it): PASS");
}

#[test]
fn criterion_08_hawk_dove_ladder() {
    let costs = CostSchedule::new(
        (0..4).map(|n| r(35 * n, 100)).collect(),
        r(35, 100),
    )
    .unwrap();
    // g = 0.5 > l = 0.4: three balanced levels with positive shares.
    let built = construct_hawkdove_esc(&r(1, 2), &r(2, 5), &costs, false).unwrap();
    assert_eq!(built.case, HawkDoveCase::EvolutionarilyStable);
    assert_eq!(
        built.frequencies,
        vec![r(11, 42), r(23, 42), r(4, 21)]
    );
    let config = built.configuration.unwrap();
    assert!(config.validate().unwrap().valid);
    assert!(config.is_balanced(&Scalar::zero()).unwrap());

    // Independent linear-solve oracle: the balance equations hold exactly.
    let mu = config.distribution().frequencies();
    let (g, l) = (r(1, 2), r(2, 5));
    for n in 0..2 {
        let lhs = g.clone() * mu[n].clone() + l.clone() * mu[n + 1].clone();
        assert_eq!(lhs, r(35, 100), "balance equation at level {}", n + 1);
    }

    let built = construct_hawkdove_esc(&r(2, 5), &r(2, 5), &costs, false).unwrap();
    assert_eq!(built.case, HawkDoveCase::NeutrallyStable);
    assert!(built.configuration.is_some());

    let built = construct_hawkdove_esc(&r(3, 10), &r(2, 5), &costs, false).unwrap();
    assert_eq!(built.case, HawkDoveCase::NoneInFamily);
    assert!(built.configuration.is_none());
    println!("criterion 08 (hawk-dove ladder: stable for g > l, neutral at g = l, none for g < l): PASS");
}

#[test]
fn criterion_09_discriminating_esc_certificate() {
    // c(1) = 2: cooperation certifies as evolutionarily stable via the
    // discriminating witness.
    let env = pd_env(s(2));
    let cert = id_pure_esc_sufficient(&env, 0, 1, None).unwrap();
    assert!(cert.verdict.is_certified());
    let config = cert.configuration.unwrap();
    assert!(config.validate().unwrap().valid);
    let necessity = id_pure_nsc_necessary(&config).unwrap();
    assert!(necessity.pass);

    // c(1) = 1/2 flips the verdict, and the effective-cost condition of the
    // necessity report fails by exactly 1/2.
    let env = pd_env(r(1, 2));
    let cert = id_pure_esc_sufficient(&env, 0, 1, None).unwrap();
    assert!(!cert.verdict.is_certified());
    let candidate = {
        let blueprint =
            coevo::interdependent::DiscriminatingType::new(0, 1, 1).unwrap();
        let incumbent = blueprint.build(env.game()).unwrap();
        let mut policy = BehaviorPolicy::new();
        policy.set_nash(0, 0, MixedStrategy::pure(0, 2));
        Configuration::new(env, TypeDistribution::singleton(incumbent), policy)
    };
    let necessity = id_pure_nsc_necessary(&candidate).unwrap();
    assert!(!necessity.pass);
    let cost_condition = &necessity.conditions[2];
    assert_eq!(cost_condition.name, "deviation-gain-within-effective-cost");
    assert!(!cost_condition.passed);
    assert_eq!(cost_condition.margin, Some(r(-1, 2)));
    println!("criterion 09 (discriminating certificate flips with the effective cost, margin 1/2): PASS");
}

#[test]
fn criterion_10_dynamics_invariants() {
    let control = StepControl::default();
    // Representative trajectories: the RPS ladder held at balance, the
    // coordination escape, and a padded state exercising face invariance.
    let rps_config = construct_rps_nsc(&rps_env(&[0, 3, 6, 9, 12, 15, 18], 3), None).unwrap();
    let tg = build_type_game(&rps_config).unwrap();
    let x0: Vec<f64> = rps_config
        .distribution()
        .frequencies()
        .iter()
        .map(Scalar::to_f64)
        .collect();
    let coordination = coevo::linalg::Matrix::from_rows(vec![
        vec![s(10), s(3), s(0)],
        vec![s(5), s(10), s(0)],
        vec![s(1), s(2), s(3)],
    ])
    .unwrap();

    let runs = [
        (tg.payoff().clone(), x0),
        (coordination.clone(), vec![0.58, 0.42, 0.0]),
        (coordination.clone(), vec![0.2, 0.5, 0.3]),
    ];
    for (payoff, start) in &runs {
        let record = replicate(payoff, start, 100.0, &control).unwrap();
        for state in &record.states {
            let total: f64 = state.iter().sum();
            assert!((total - 1.0).abs() <= 1e-9, "simplex drift {total}");
            for (i, &v) in state.iter().enumerate() {
                if start[i] == 0.0 {
                    assert_eq!(v, 0.0, "face invariance violated at type {i}");
                }
            }
        }
    }

    // Payoff-shift invariance: adding a constant to every entry leaves the
    // trajectory unchanged within 1e-6.
    let shifted = coordination.map(|v| v.clone() + s(7));
    let a = replicate(&coordination, &[0.2, 0.5, 0.3], 60.0, &control).unwrap();
    let b = replicate(&shifted, &[0.2, 0.5, 0.3], 60.0, &control).unwrap();
    for (x, y) in a.terminal().iter().zip(b.terminal()) {
        assert!((x - y).abs() < 1e-6);
    }
    println!("criterion 10 (simplex preservation, exact face invariance, payoff-shift invariance): PASS");
}
