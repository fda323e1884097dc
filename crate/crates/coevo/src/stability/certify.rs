//! Certification of pure stable configurations and the necessary-condition
//! checks for heterogeneous ones.
//!
//! A pure convention `a*` in a game with a punishment action is stable
//! exactly when it is symmetric-efficient and its deviation gain does not
//! exceed the effective cost of deception. Certification emits the witness
//! incumbent: a level-1 type whose preferences make every action except the
//! convention and the punishment strictly dominated, the punishment weakly
//! dominant, and the convention a best reply to itself.

use serde::Serialize;

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::game::{ActionId, MixedStrategy};
use crate::population::{BehaviorPolicy, Configuration, MatchMode, TypeDistribution};
use crate::prefs::{fmde, CognitiveType, UtilityFunction};
use crate::scalar::{default_tol, Scalar};

use super::{
    effective_cost, refute_nsc, ConditionCheck, StabilityVerdict, Witness,
};

/// Result of certifying a pure convention: the verdict plus, on success, the
/// emitted witness configuration.
#[derive(Clone, Debug)]
pub struct PureCertification {
    pub action: ActionId,
    pub verdict: StabilityVerdict,
    pub configuration: Option<Configuration>,
}

/// Certifies or refutes the pure configuration outcome `a*`.
///
/// - certified: `π(a*, a*) = π̂` and `g(a*) ≤ c`, with a punishment action
///   available to discipline deviating mutants;
/// - refuted: either condition fails strictly (a constructive mutant
///   scenario is attached);
/// - inconclusive: both conditions hold but no punishment action exists, so
///   the certifying construction is unavailable.
pub fn certify_pure_nsc(env: &Environment, a_star: ActionId) -> Result<PureCertification> {
    let game = env.game();
    if a_star >= game.num_actions() {
        return Err(Error::Input(format!(
            "action index {a_star} out of range (m = {})",
            game.num_actions()
        )));
    }
    let tol = default_tol(game.is_exact());
    let eff = game.efficiency();
    let self_payoff = game.payoff_pure(a_star, a_star).clone();
    let efficiency_margin = self_payoff.clone() - eff.efficient_payoff.clone();
    let efficiency_ok = efficiency_margin.clone().abs() <= tol;

    let c = effective_cost(env);
    let gain = game.deviation_gain(a_star)?;
    let cost_margin = c.clone() - gain.clone();
    let cost_ok = cost_margin >= -tol.clone();

    let punishment = game.punishment_actions();
    let conditions = vec![
        ConditionCheck::new("symmetric-efficiency", efficiency_ok, Some(efficiency_margin)),
        ConditionCheck::new("deception-cost-bound", cost_ok, Some(cost_margin)),
        ConditionCheck::new(
            "punishment-action-exists",
            !punishment.is_empty(),
            None,
        ),
    ];

    // A symmetric-efficient convention is never itself a punishment action,
    // but refutation candidates may pass an inefficient one here.
    let punisher = punishment
        .iter()
        .copied()
        .find(|&p| p != a_star)
        .or(punishment.first().copied());

    if efficiency_ok && cost_ok {
        if punishment.is_empty() {
            return Ok(PureCertification {
                action: a_star,
                verdict: StabilityVerdict::inconclusive(
                    conditions,
                    vec![
                        "both stability conditions hold, but the game admits no punishment \
                         action to discipline deviating mutants; certification is limited to \
                         games with one"
                            .to_string(),
                    ],
                ),
                configuration: None,
            });
        }
        let punisher = punisher.expect("punishment set is nonempty here");
        let config = pure_witness_configuration(env, a_star, Some(punisher))?;
        let report = config.validate()?;
        debug_assert!(report.valid, "witness configuration must validate");
        return Ok(PureCertification {
            action: a_star,
            verdict: StabilityVerdict::certified(
                conditions,
                vec![format!(
                    "certified: convention `{}` enforced by a level-1 incumbent that weakly \
                     prefers punishing with `{}`",
                    game.action_label(a_star),
                    game.action_label(punisher)
                )],
            ),
            configuration: Some(config),
        });
    }

    // A strict failure of either condition refutes every candidate
    // distribution. Attach a constructive scenario found on the canonical
    // candidate configuration.
    let candidate = pure_witness_configuration(env, a_star, punisher)?;
    let budget = deception_budget(env);
    let refutation = refute_nsc(&candidate, budget)?;
    let witness = match refutation.verdict.witness {
        Some(w) => w,
        None => Witness::Note(
            "conditions fail strictly; the universal mutant families outperform any \
             incumbent distribution carrying this convention"
                .to_string(),
        ),
    };
    let mut notes = vec![];
    if !efficiency_ok {
        notes.push(format!(
            "`{}` is not symmetric-efficient: highest types must play an efficient profile \
             against themselves",
            game.action_label(a_star)
        ));
    }
    if !cost_ok {
        notes.push(format!(
            "deviation gain {gain} exceeds the effective cost of deception {c}"
        ));
    }
    Ok(PureCertification {
        action: a_star,
        verdict: StabilityVerdict::refuted(witness, conditions, notes),
        configuration: None,
    })
}

/// The canonical single-type candidate carrying a pure convention: the
/// convention enforcer when a punishment action exists, otherwise a type for
/// which the convention is dominant.
fn pure_witness_configuration(
    env: &Environment,
    a_star: ActionId,
    punishment: Option<ActionId>,
) -> Result<Configuration> {
    let m = env.game().num_actions();
    let utility = match punishment {
        Some(p) if p != a_star => UtilityFunction::convention_enforcer(a_star, p, m),
        _ => UtilityFunction::dominant_action(a_star, m),
    };
    let incumbent = CognitiveType::simple("convention-enforcer", utility, 1)?;
    let dist = TypeDistribution::singleton(incumbent);
    let mut policy = BehaviorPolicy::new();
    policy.set_nash(0, 0, MixedStrategy::pure(a_star, m));
    Ok(Configuration::new(env.clone(), dist, policy))
}

/// A level budget for refutation recipes: the minimiser of `k(n)/q(n, 1)`
/// is reached no later than the first level whose bare cost exceeds the
/// current best ratio, and never beyond the last explicit deception
/// override (past it the ratio increases strictly).
fn deception_budget(env: &Environment) -> u32 {
    let last_override = env
        .deception_table()
        .overrides()
        .iter()
        .map(|(deceiver, _, _)| *deceiver)
        .max()
        .unwrap_or(0);
    let mut best: Option<Scalar> = None;
    let mut best_level = 2;
    let mut n = 2;
    let mut evaluated_past_overrides = false;
    loop {
        let k = env.cost(n);
        if let Some(b) = &best {
            if k > *b {
                break;
            }
        }
        if evaluated_past_overrides {
            break;
        }
        let ratio = k / env.q(n, 1);
        if best.as_ref().is_none_or(|b| ratio < *b) {
            best = Some(ratio);
            best_level = n;
        }
        if n > last_override {
            evaluated_past_overrides = true;
        }
        n += 1;
    }
    best_level
}

/// Per-highest-type necessary conditions for stability of an arbitrary
/// configuration: efficient self-play, fitness-maximising deception against
/// every lower type, and no lower type extracting more than the efficient
/// payoff.
#[derive(Clone, Debug, Serialize)]
pub struct HighestTypeReport {
    pub highest_level: u32,
    pub per_type: Vec<HighestTypeConditions>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HighestTypeConditions {
    pub type_name: String,
    pub efficient_self_play: ConditionCheck,
    pub deception_fitness: Vec<(String, ConditionCheck)>,
    pub lower_type_bound: Vec<(String, ConditionCheck)>,
}

pub fn check_highest_type_conditions(config: &Configuration) -> Result<HighestTypeReport> {
    let tol = default_tol(config.is_exact());
    let game = config.env().game();
    let pi_hat = game.efficiency().efficient_payoff;
    let n = config.distribution().len();
    let highest = config.distribution().max_level();
    let mut per_type = Vec::new();
    let mut pass = true;

    for i in 0..n {
        let theta = config.distribution().type_at(i);
        if theta.level != highest {
            continue;
        }
        // (1) Efficient self-play.
        let self_play = config.policy().nash_play(i, i).ok_or_else(|| {
            Error::Input(format!("missing self-play entry for `{}`", theta.name))
        })?;
        let self_fitness = game.payoff(self_play, self_play)?;
        let margin = pi_hat.clone() - self_fitness;
        let ok = margin.clone().abs() <= tol;
        pass &= ok;
        let efficient_self_play =
            ConditionCheck::new("efficient-self-play", ok, Some(margin));

        // (2) Fitness-maximising deception and (3) the bound on lower types.
        let mut deception_fitness = Vec::new();
        let mut lower_type_bound = Vec::new();
        for j in 0..n {
            let other = config.distribution().type_at(j);
            if other.level >= highest {
                continue;
            }
            let f = fmde(config.env(), theta, other, config.universe())?;
            let (dhi, dlo) = (
                config.policy().deception_play(i, j).ok_or_else(|| {
                    Error::Input(format!(
                        "missing deception play of `{}` vs `{}`",
                        theta.name, other.name
                    ))
                })?,
                config.policy().deception_play(j, i).ok_or_else(|| {
                    Error::Input(format!(
                        "missing deception play of `{}` vs `{}`",
                        other.name, theta.name
                    ))
                })?,
            );
            let achieved = game.payoff(dhi, dlo)?;
            let gap = f.fitness.clone() - achieved;
            let ok = gap.clone() <= tol;
            pass &= ok;
            deception_fitness.push((
                other.name.clone(),
                ConditionCheck::new("fitness-maximising-deception", ok, Some(gap)),
            ));

            let lower_fitness = config.match_fitness_by_index(j, i)?;
            let excess = lower_fitness - pi_hat.clone();
            let ok = excess.clone() <= tol;
            pass &= ok;
            lower_type_bound.push((
                other.name.clone(),
                ConditionCheck::new("lower-type-payoff-bound", ok, Some(excess)),
            ));
        }
        per_type.push(HighestTypeConditions {
            type_name: theta.name.clone(),
            efficient_self_play,
            deception_fitness,
            lower_type_bound,
        });
    }
    Ok(HighestTypeReport {
        highest_level: highest,
        per_type,
        pass,
    })
}

/// A pair of types whose cross play makes the type-game quadratic form
/// positive along their difference direction, destabilising the population.
#[derive(Clone, Debug, Serialize)]
pub struct CrossPlayWitness {
    pub type_i: String,
    pub type_j: String,
    pub quadratic_form: Scalar,
    /// `2·π(ā,ā) − (π_i(j) + π_j(i))`: the same quantity computed from match
    /// fitness directly; equals the quadratic form when both self-plays are
    /// the efficient action.
    pub independent_value: Option<Scalar>,
}

/// Efficiency check for generic games with a unique symmetric efficient
/// profile: every match in a stable configuration must play that profile.
#[derive(Clone, Debug, Serialize)]
pub struct EfficiencyCheckReport {
    pub applicable: bool,
    pub reason: Option<String>,
    /// No symmetric profile attains the efficient payoff: no configuration
    /// of this game can be stable at all.
    pub no_stable_configuration_exists: bool,
    pub efficient_action: Option<ActionId>,
    pub pass: bool,
    pub deviations: Vec<(String, String, MatchMode)>,
    pub witnesses: Vec<CrossPlayWitness>,
}

pub fn check_efficiency_requirement(config: &Configuration) -> Result<EfficiencyCheckReport> {
    let game = config.env().game();
    let tol = default_tol(config.is_exact());
    let genericity_tol = if game.is_exact() {
        Scalar::ratio(1, 1_000_000_000_000)
    } else {
        Scalar::approx(1e-9)
    };
    let eff = game.efficiency();

    if eff.symmetric_efficient_actions.is_empty() {
        return Ok(EfficiencyCheckReport {
            applicable: true,
            reason: Some(
                "every efficient profile is asymmetric: highest types cannot play \
                 efficiently against themselves, so no stable configuration exists \
                 (role-symmetrizing the interaction restores a symmetric efficient profile)"
                    .to_string(),
            ),
            no_stable_configuration_exists: true,
            efficient_action: None,
            pass: false,
            deviations: Vec::new(),
            witnesses: Vec::new(),
        });
    }
    if !game.is_generic(&genericity_tol) {
        return Ok(EfficiencyCheckReport {
            applicable: false,
            reason: Some("game not generic".to_string()),
            no_stable_configuration_exists: false,
            efficient_action: None,
            pass: false,
            deviations: Vec::new(),
            witnesses: Vec::new(),
        });
    }
    if eff.symmetric_efficient_actions.len() != 1 || eff.efficient_profiles.len() != 1 {
        return Ok(EfficiencyCheckReport {
            applicable: false,
            reason: Some("efficient profile is not unique".to_string()),
            no_stable_configuration_exists: false,
            efficient_action: None,
            pass: false,
            deviations: Vec::new(),
            witnesses: Vec::new(),
        });
    }
    let a_bar = eff.symmetric_efficient_actions[0];
    let n = config.distribution().len();

    // Every entry of the policy must put all mass on the efficient action.
    let mut deviations = Vec::new();
    let is_pure_abar = |s: &MixedStrategy| s.as_pure() == Some(a_bar);
    for i in 0..n {
        for j in 0..n {
            let ti = config.distribution().type_at(i);
            let tj = config.distribution().type_at(j);
            if let Some(s) = config.policy().nash_play(i, j) {
                if !is_pure_abar(s) {
                    deviations.push((ti.name.clone(), tj.name.clone(), MatchMode::Nash));
                }
            }
            if let Some(s) = config.policy().deception_play(i, j) {
                if !is_pure_abar(s) {
                    deviations.push((ti.name.clone(), tj.name.clone(), MatchMode::Deception));
                }
            }
        }
    }

    // Case-B instability: the difference direction of any type pair with
    // inefficient cross play makes the quadratic form positive.
    let tg = super::build_type_game(config)?;
    let b = tg.payoff();
    let mut witnesses = Vec::new();
    let pi_bar = game.payoff_pure(a_bar, a_bar).clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let form = b.get(i, i).clone() - b.get(i, j).clone() - b.get(j, i).clone()
                + b.get(j, j).clone();
            if form > tol {
                let self_i = config.policy().nash_play(i, i).map(is_pure_abar);
                let self_j = config.policy().nash_play(j, j).map(is_pure_abar);
                let independent = if self_i == Some(true) && self_j == Some(true) {
                    let cross = config.match_fitness_by_index(i, j)?
                        + config.match_fitness_by_index(j, i)?;
                    Some(Scalar::from_int(2) * pi_bar.clone() - cross)
                } else {
                    None
                };
                witnesses.push(CrossPlayWitness {
                    type_i: config.distribution().type_at(i).name.clone(),
                    type_j: config.distribution().type_at(j).name.clone(),
                    quadratic_form: form,
                    independent_value: independent,
                });
            }
        }
    }

    Ok(EfficiencyCheckReport {
        applicable: true,
        reason: None,
        no_stable_configuration_exists: false,
        efficient_action: Some(a_bar),
        pass: deviations.is_empty() && witnesses.is_empty(),
        deviations,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::prisoners_dilemma;

    fn pd_env(k2: Scalar) -> Environment {
        Environment::builder(prisoners_dilemma())
            .costs(vec![Scalar::zero(), k2])
            .tail_step(Scalar::from_int(10))
            .build()
            .unwrap()
    }

    #[test]
    fn certifies_cooperation_when_deception_is_costly() {
        let env = pd_env(Scalar::from_int(2)); // c = 2 ≥ g(C) = 1
        let cert = certify_pure_nsc(&env, 0).unwrap();
        assert!(cert.verdict.is_certified(), "{:?}", cert.verdict);
        let config = cert.configuration.unwrap();
        assert!(config.validate().unwrap().valid);
        assert!(config.is_balanced(&Scalar::zero()).unwrap());
    }

    #[test]
    fn refutes_cooperation_when_deception_is_cheap() {
        let env = pd_env(Scalar::ratio(1, 2)); // c = 1/2 < 1
        let cert = certify_pure_nsc(&env, 0).unwrap();
        assert!(cert.verdict.is_refuted(), "{:?}", cert.verdict);
        // The failing condition is the cost bound, not efficiency.
        assert!(cert.verdict.conditions[0].passed);
        assert!(!cert.verdict.conditions[1].passed);
        assert!(matches!(
            cert.verdict.witness,
            Some(Witness::Scenario(_))
        ));
    }

    #[test]
    fn boundary_cost_certifies_exactly() {
        let env = pd_env(Scalar::one()); // c = 1 = g(C), weak inequality holds
        let cert = certify_pure_nsc(&env, 0).unwrap();
        assert!(cert.verdict.is_certified(), "{:?}", cert.verdict);
    }

    #[test]
    fn strict_nash_certifies_for_any_cost() {
        // Stag-hunt-like game: (S, S) is strict Nash and efficient; H punishes.
        let game = crate::game::SymmetricGame::from_int_rows(
            &["S", "H"],
            &[&[5, 0], &[4, 1]],
        )
        .unwrap();
        let env = Environment::builder(game)
            .costs(vec![Scalar::zero(), Scalar::ratio(1, 1000)])
            .tail_step(Scalar::one())
            .build()
            .unwrap();
        let cert = certify_pure_nsc(&env, 0).unwrap();
        assert!(cert.verdict.is_certified(), "{:?}", cert.verdict);
    }

    #[test]
    fn inefficient_convention_is_refuted() {
        let env = pd_env(Scalar::from_int(2));
        let cert = certify_pure_nsc(&env, 1).unwrap(); // defect: π(D,D) = 1 < 3
        assert!(cert.verdict.is_refuted());
        assert!(!cert.verdict.conditions[0].passed);
    }

    #[test]
    fn highest_type_conditions_accept_the_certified_configuration() {
        let env = pd_env(Scalar::from_int(2));
        let cert = certify_pure_nsc(&env, 0).unwrap();
        let config = cert.configuration.unwrap();
        let report = check_highest_type_conditions(&config).unwrap();
        assert!(report.pass);
        // The certified all-cooperate configuration also passes the
        // efficiency check of generic games.
        let eff = check_efficiency_requirement(&config).unwrap();
        assert!(eff.applicable);
        assert!(eff.pass);
    }

    #[test]
    fn highest_type_conditions_flag_inefficient_self_play() {
        // A materialistic population playing mutual defection: the
        // efficient-self-play condition fails by exactly π̂ − 1 = 2.
        let env = pd_env(Scalar::from_int(2));
        let mat = crate::prefs::CognitiveType::materialistic("mat", env.game(), 1);
        let mut policy = crate::population::BehaviorPolicy::new();
        policy.set_nash(0, 0, MixedStrategy::pure(1, 2));
        let config = Configuration::new(
            env,
            TypeDistribution::singleton(mat),
            policy,
        );
        assert!(config.validate().unwrap().valid);
        let report = check_highest_type_conditions(&config).unwrap();
        assert!(!report.pass);
        let check = &report.per_type[0].efficient_self_play;
        assert!(!check.passed);
        assert_eq!(check.margin, Some(Scalar::from_int(2)));
    }

    #[test]
    fn efficiency_check_is_inconclusive_on_non_generic_games() {
        let rps = crate::game::SymmetricGame::rock_paper_scissors();
        let env = Environment::builder(rps.clone()).costs_int(&[0, 1]).build().unwrap();
        let mat = crate::prefs::CognitiveType::materialistic("mat", &rps, 1);
        let mut policy = crate::population::BehaviorPolicy::new();
        policy.set_nash(0, 0, MixedStrategy::uniform(3));
        let config = Configuration::new(env, TypeDistribution::singleton(mat), policy);
        let report = check_efficiency_requirement(&config).unwrap();
        assert!(!report.applicable);
        assert_eq!(report.reason.as_deref(), Some("game not generic"));
    }
}
