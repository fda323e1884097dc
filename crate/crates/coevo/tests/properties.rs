//! Property tests for the structural invariants: positivity and Nash
//! equivalence of deviation gains, efficiency bounds, genericity behaviour,
//! affine invariance of the preference machinery, and the fitness
//! accounting identities.

mod common;

use coevo::env::Environment;
use coevo::game::{MixedStrategy, SymmetricGame};
use coevo::linalg::Matrix;
use coevo::population::{BehaviorPolicy, Configuration, TypeDistribution};
use coevo::prefs::{
    best_replies, deception_equilibria, nash_equilibria, undominated_pure_actions, CognitiveType,
    UtilityFunction,
};
use coevo::scalar::Scalar;
use proptest::prelude::*;

fn s(n: i64) -> Scalar {
    Scalar::from_int(n)
}

fn int_game(m: usize, entries: &[i64]) -> SymmetricGame {
    let actions: Vec<String> = (0..m).map(|i| format!("a{i}")).collect();
    let matrix = Matrix::from_fn(m, m, |i, j| s(entries[i * m + j]));
    SymmetricGame::new(actions, matrix).unwrap()
}

fn game_strategy(max_m: usize) -> impl Strategy<Value = SymmetricGame> {
    (2..=max_m).prop_flat_map(|m| {
        proptest::collection::vec(-6i64..=6, m * m)
            .prop_map(move |entries| int_game(m, &entries))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn deviation_gain_nonnegative_and_nash_equivalent(game in game_strategy(4)) {
        for a in 0..game.num_actions() {
            let g = game.deviation_gain(a).unwrap();
            prop_assert!(g >= Scalar::zero());
            let column_max = (0..game.num_actions())
                .map(|b| game.payoff_pure(b, a).clone())
                .max()
                .unwrap();
            prop_assert_eq!(g.is_zero(), &column_max == game.payoff_pure(a, a));
        }
    }

    #[test]
    fn efficiency_dominates_diagonal_and_maxmin(game in game_strategy(4)) {
        let eff = game.efficiency();
        let mm = game.maxmin_minmax();
        for a in 0..game.num_actions() {
            prop_assert!(eff.efficient_payoff >= *game.payoff_pure(a, a));
        }
        prop_assert!(eff.efficient_payoff >= mm.maxmin);
        prop_assert!(mm.maxmin <= mm.minmax);
    }

    #[test]
    fn punishment_actions_hold_opponents_below_efficiency(game in game_strategy(4)) {
        let eff = game.efficiency();
        for a in game.punishment_actions() {
            // The column maximum is the diagonal plus the deviation gain.
            let reachable = game.payoff_pure(a, a).clone() + game.deviation_gain(a).unwrap();
            prop_assert!(reachable < eff.efficient_payoff);
        }
    }

    #[test]
    fn genericity_is_monotone_in_tolerance(game in game_strategy(3)) {
        let loose = Scalar::ratio(1, 2);
        let tight = Scalar::ratio(1, 100);
        if game.is_generic(&loose) {
            prop_assert!(game.is_generic(&tight));
        }
    }

    #[test]
    fn affine_transformations_preserve_the_preference_machinery(
        game in game_strategy(3),
        alpha_num in 1i64..=5,
        beta in -3i64..=3,
    ) {
        let base = UtilityFunction::new(game.payoff_matrix().clone()).unwrap();
        let transformed = UtilityFunction::new(
            game.payoff_matrix()
                .map(|v| Scalar::ratio(alpha_num, 2) * v.clone() + s(beta)),
        )
        .unwrap();
        // Canonical normalization makes affine-equivalent utilities equal.
        prop_assert_eq!(&base, &transformed);

        let sigma = MixedStrategy::uniform(game.num_actions());
        prop_assert_eq!(
            best_replies(&base, &sigma, &Scalar::zero()),
            best_replies(&transformed, &sigma, &Scalar::zero())
        );
        prop_assert_eq!(
            undominated_pure_actions(&base).unwrap().actions,
            undominated_pure_actions(&transformed).unwrap().actions
        );
    }

    #[test]
    fn scalar_parse_render_round_trip(num in -1000i64..1000, den in 1i64..1000) {
        let v = Scalar::ratio(num, den);
        prop_assert_eq!(Scalar::parse_exact(&v.render()).unwrap(), v);
    }

    #[test]
    fn deception_value_dominates_equilibrium_value_for_materialistic_deceivers(
        game in game_strategy(3),
    ) {
        // Deception can only help: against a materialistic victim whose
        // equilibrium support is inducible, the deception value weakly
        // exceeds the deceiver's subjective payoff in any equilibrium.
        let env = Environment::builder(game.clone()).costs_int(&[0, 1]).build().unwrap();
        let mat = UtilityFunction::materialistic(&game);
        let deceiver = CognitiveType::materialistic("hi", &game, 2);
        let victim = CognitiveType::materialistic("lo", &game, 1);
        let de = deception_equilibria(&env, &deceiver, &victim, &[]).unwrap();
        let report = nash_equilibria(&mat, &mat).unwrap();
        for (sigma, sigma_prime) in &report.equilibria {
            let support_inducible = sigma_prime
                .support()
                .iter()
                .all(|a| de.feasible.contains(a));
            if support_inducible {
                prop_assert!(de.value >= mat.payoff(sigma, sigma_prime));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn symmetric_equilibria_of_zero_sum_symmetric_games_are_neutrally_stable(
        upper in proptest::collection::vec(-5i64..=5, 3),
    ) {
        // Antisymmetric payoff matrices (symmetric zero-sum games) have a
        // vanishing quadratic form, so every symmetric equilibrium is
        // neutrally stable.
        let b = Matrix::from_fn(3, 3, |i, j| {
            use std::cmp::Ordering;
            match i.cmp(&j) {
                Ordering::Less => s(upper[i + j - 1]),
                Ordering::Equal => s(0),
                Ordering::Greater => s(-upper[j + i - 1]),
            }
        });
        for x in coevo::prefs::symmetric_nash(&b) {
            let verdict = coevo::stability::is_nss(
                &b,
                &x,
                &coevo::stability::StabilityOptions::default(),
            )
            .unwrap();
            prop_assert!(verdict.is_certified(), "{verdict:?}");
        }
    }
}

#[test]
fn random_float_games_are_generic() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let tol = Scalar::approx(1e-12);
    let mut generic = 0;
    for _ in 0..1000 {
        let matrix = Matrix::from_fn(3, 3, |_, _| Scalar::approx(rng.gen::<f64>()));
        let game = SymmetricGame::new(
            vec!["a".into(), "b".into(), "c".into()],
            matrix,
        )
        .unwrap();
        if game.is_generic(&tol) {
            generic += 1;
        }
    }
    assert!(generic >= 999, "only {generic}/1000 random games were generic");
}

#[test]
fn average_fitness_identity_is_exact() {
    // Recompute the population average by hand on a heterogeneous
    // configuration and compare exactly.
    let rps = SymmetricGame::rock_paper_scissors();
    let env = Environment::builder(rps.clone())
        .costs((0..7).map(|n| Scalar::ratio(3 * n, 10)).collect())
        .tail_step(Scalar::ratio(3, 10))
        .build()
        .unwrap();
    let config = coevo::stability::construct_rps_nsc(&env, None).unwrap();
    let dist = config.distribution();
    let mut manual = Scalar::zero();
    for i in 0..dist.len() {
        manual = manual + dist.frequency(i).clone() * config.expected_fitness_by_index(i).unwrap();
    }
    assert_eq!(manual, config.average_fitness().unwrap());
}

#[test]
fn match_fitness_uses_the_higher_type_as_deceiver_in_both_directions() {
    // The deception term of a mixed-level match must read the same profile
    // from both sides: the higher type's deceiver play against the lower
    // type's induced play.
    let rps = SymmetricGame::rock_paper_scissors();
    let env = Environment::builder(rps.clone())
        .costs_int(&[0, 1])
        .tail_step(Scalar::from_int(9))
        .build()
        .unwrap();
    let t1 = CognitiveType::materialistic("l1", &rps, 1);
    let t2 = CognitiveType::materialistic("l2", &rps, 2);
    let dist = TypeDistribution::new(
        vec![t1.clone(), t2.clone()],
        vec![Scalar::ratio(1, 2), Scalar::ratio(1, 2)],
    )
    .unwrap();
    let mut policy = BehaviorPolicy::new();
    policy.set_nash(0, 0, MixedStrategy::uniform(3));
    policy.set_nash(1, 1, MixedStrategy::uniform(3));
    policy.set_deception(1, 0, MixedStrategy::pure(1, 3)); // deceiver: Paper
    policy.set_deception(0, 1, MixedStrategy::pure(0, 3)); // induced: Rock
    let config = Configuration::new(env, dist, policy);
    // π(P, R) = 1 from the deceiver's seat, π(R, P) = −1 from the victim's.
    assert_eq!(config.match_fitness(&t2, &t1).unwrap(), Scalar::one());
    assert_eq!(config.match_fitness(&t1, &t2).unwrap(), -Scalar::one());
}
