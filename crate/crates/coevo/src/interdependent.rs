//! Type-interdependent preferences: utilities that react to the opponent's
//! identity, not just the action profile. Discriminating types prescribe one
//! action against their own kind and another against everyone else, which
//! unlocks evolutionarily stable configurations (strict outperformance of
//! every mutant) that plain preferences cannot support. The flagship
//! application is the Hawk-Dove ladder: in-group cooperation, out-group
//! exploitation, and coexisting cognitive levels whose extra winnings are
//! eaten exactly by their extra cognitive costs.

use serde::Serialize;

use crate::env::{CostSchedule, DeceptionTable, Environment};
use crate::error::{Error, Result};
use crate::game::{ActionId, MixedStrategy, SymmetricGame};
use crate::population::{BehaviorPolicy, Configuration, TypeDistribution};
use crate::prefs::{
    undominated_for_type, BranchUtility, CognitiveType, TypeRef, UndominatedSet, UtilityFunction,
};
use crate::scalar::{default_tol, Scalar};
use crate::stability::{
    effective_cost_at_level, ConditionCheck, StabilityVerdict,
};

/// Blueprint of discriminating preferences: play `own_action` against your
/// own kind at `target_level`, `other_action` against everyone else.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscriminatingType {
    pub own_action: ActionId,
    pub other_action: ActionId,
    pub target_level: u32,
}

impl DiscriminatingType {
    pub fn new(own_action: ActionId, other_action: ActionId, target_level: u32) -> Result<Self> {
        if target_level < 1 {
            return Err(Error::Input("target level must be >= 1".into()));
        }
        Ok(DiscriminatingType {
            own_action,
            other_action,
            target_level,
        })
    }

    /// The conventional label for this blueprint in a declared universe.
    pub fn label(&self, game: &SymmetricGame) -> String {
        format!(
            "discriminating-{}-{}-L{}",
            game.action_label(self.own_action),
            game.action_label(self.other_action),
            self.target_level
        )
    }

    /// Realizes the blueprint as a cognitive type carrying its own label.
    pub fn build(&self, game: &SymmetricGame) -> Result<CognitiveType> {
        let m = game.num_actions();
        if self.own_action >= m || self.other_action >= m {
            return Err(Error::Input("discriminating actions out of range".into()));
        }
        let label = self.label(game);
        let utility = BranchUtility {
            branches: vec![(
                TypeRef::new(label.clone(), self.target_level),
                UtilityFunction::dominant_action(self.own_action, m),
            )],
            otherwise: UtilityFunction::dominant_action(self.other_action, m),
        };
        CognitiveType::discriminating(label, utility, self.target_level)
    }
}

/// Undominated pure actions of an interdependent type: best replies to some
/// belief over both the opponent's strategy and identity.
pub fn id_undominated(t: &CognitiveType, universe: &[TypeRef]) -> Result<UndominatedSet> {
    undominated_for_type(t, universe)
}

/// Necessary conditions for a pure interdependent configuration to be
/// stable: a uniform cognitive level, a payoff surplus over the pure maxmin
/// that covers the cognitive cost, and a deviation gain below the effective
/// cost of deceiving that level.
#[derive(Clone, Debug, Serialize)]
pub struct NecessityReport {
    pub outcome_action: Option<ActionId>,
    pub level: u32,
    pub conditions: Vec<ConditionCheck>,
    pub pass: bool,
}

pub fn id_pure_nsc_necessary(config: &Configuration) -> Result<NecessityReport> {
    let game = config.env().game();
    let tol = default_tol(config.is_exact());
    let a_star = pure_outcome(config).ok_or_else(|| {
        Error::Precondition("the configuration is not pure (plays differ across matches)".into())
    })?;

    let levels: Vec<u32> = config
        .distribution()
        .types()
        .iter()
        .map(|t| t.level)
        .collect();
    let level = *levels.iter().max().expect("nonempty support");
    let uniform = levels.iter().all(|&l| l == level);
    let mut conditions = vec![ConditionCheck::new("uniform-cognitive-level", uniform, None)];

    let mm = game.maxmin_minmax();
    let surplus = game.payoff_pure(a_star, a_star).clone() - mm.maxmin
        - config.env().cost(level);
    conditions.push(ConditionCheck::new(
        "maxmin-surplus-covers-cost",
        surplus >= -tol.clone(),
        Some(surplus),
    ));

    let c_n = effective_cost_at_level(config.env(), level);
    let margin = c_n - game.deviation_gain(a_star)?;
    conditions.push(ConditionCheck::new(
        "deviation-gain-within-effective-cost",
        margin >= -tol.clone(),
        Some(margin),
    ));

    let pass = conditions.iter().all(|c| c.passed);
    Ok(NecessityReport {
        outcome_action: Some(a_star),
        level,
        conditions,
        pass,
    })
}

/// The single pure action played in every match, if any.
fn pure_outcome(config: &Configuration) -> Option<ActionId> {
    let n = config.distribution().len();
    let mut outcome = None;
    for i in 0..n {
        for j in 0..n {
            for play in [
                config.policy().nash_play(i, j),
                config.policy().deception_play(i, j),
            ]
            .into_iter()
            .flatten()
            {
                match (outcome, play.as_pure()) {
                    (_, None) => return None,
                    (None, Some(a)) => outcome = Some(a),
                    (Some(prev), Some(a)) if prev != a => return None,
                    _ => {}
                }
            }
        }
    }
    outcome
}

/// Sufficiency certificate for a pure evolutionarily stable configuration:
/// a monomorphic population of the discriminating type that plays `a*`
/// in-group and the pure minmax action against everyone else.
#[derive(Clone, Debug)]
pub struct EscCertification {
    pub verdict: StabilityVerdict,
    pub discriminating: Option<CognitiveType>,
    pub configuration: Option<Configuration>,
}

/// Certifies `(θ̂, a*)` as an evolutionarily stable configuration when
/// `π(a*, a*) − M̄ > k(n)` and `g(a*) < c(n)`, with
/// `θ̂ = (play a* in-group, play the minmax action out-group, level n)`.
///
/// `universe`: the declared label universe. `None` auto-declares the
/// discriminating label; an explicit universe that omits it yields a
/// "not representable" verdict rather than a silent extension.
pub fn id_pure_esc_sufficient(
    env: &Environment,
    a_star: ActionId,
    level: u32,
    universe: Option<&[TypeRef]>,
) -> Result<EscCertification> {
    let game = env.game();
    if a_star >= game.num_actions() {
        return Err(Error::Input(format!(
            "action index {a_star} out of range (m = {})",
            game.num_actions()
        )));
    }
    let mm = game.maxmin_minmax();
    let blueprint = DiscriminatingType::new(a_star, mm.minmax_action, level)?;
    let label = blueprint.label(game);
    if let Some(u) = universe {
        if !u.contains(&TypeRef::new(label.clone(), level)) {
            return Ok(EscCertification {
                verdict: StabilityVerdict::inconclusive(
                    vec![ConditionCheck::new("representable-in-universe", false, None)],
                    vec![format!(
                        "the declared label universe does not contain `{label}` at level {level}; \
                         the certifying type is not representable"
                    )],
                ),
                discriminating: None,
                configuration: None,
            });
        }
    }

    let tol = default_tol(game.is_exact());
    let surplus =
        game.payoff_pure(a_star, a_star).clone() - mm.minmax.clone() - env.cost(level);
    let surplus_ok = surplus > tol;
    let c_n = effective_cost_at_level(env, level);
    let gain_margin = c_n - game.deviation_gain(a_star)?;
    let gain_ok = gain_margin > tol;
    let conditions = vec![
        ConditionCheck::new("minmax-surplus-covers-cost", surplus_ok, Some(surplus)),
        ConditionCheck::new(
            "deviation-gain-below-effective-cost",
            gain_ok,
            Some(gain_margin),
        ),
    ];

    if !(surplus_ok && gain_ok) {
        return Ok(EscCertification {
            verdict: StabilityVerdict::inconclusive(
                conditions,
                vec![
                    "strict sufficiency conditions not met; consult the necessity report for \
                     an outright refutation"
                        .to_string(),
                ],
            ),
            discriminating: None,
            configuration: None,
        });
    }

    let incumbent = blueprint.build(game)?;
    let dist = TypeDistribution::singleton(incumbent.clone());
    let mut policy = BehaviorPolicy::new();
    policy.set_nash(0, 0, MixedStrategy::pure(a_star, game.num_actions()));
    let config = Configuration::new(env.clone(), dist, policy);
    let report = config.validate()?;
    debug_assert!(report.valid, "{:?}", report.violations);
    Ok(EscCertification {
        verdict: StabilityVerdict::certified(
            conditions,
            vec![format!(
                "certified as evolutionarily stable: non-deceived incumbents play `{}` \
                 against their own kind and `{}` against everyone else",
                game.action_label(a_star),
                game.action_label(mm.minmax_action)
            )],
        ),
        discriminating: Some(incumbent),
        configuration: Some(config),
    })
}

/// Verdict case for the Hawk-Dove ladder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HawkDoveCase {
    /// `g > l`: the ladder is an evolutionarily stable configuration.
    EvolutionarilyStable,
    /// `g = l`: the ladder is neutrally but not evolutionarily stable.
    NeutrallyStable,
    /// `g < l`: no ladder of in-group cooperators is stable.
    NoneInFamily,
}

#[derive(Clone, Debug)]
pub struct HawkDoveConstruction {
    pub case: HawkDoveCase,
    pub configuration: Option<Configuration>,
    pub frequencies: Vec<Scalar>,
    pub notes: Vec<String>,
}

const HAWK: usize = 0;
const DOVE: usize = 1;

/// Builds the Hawk-Dove in-group-cooperation ladder for gain `g` and loss
/// `l`: every type cooperates (plays Dove) against its own kind and plays
/// Hawk against everyone else; deception across levels is certain, so the
/// higher level Hawks an induced Dove.
///
/// Requires `g > 0` and `0 < l < 1`, a cost window `k(N) ≤ l+g < k(N+1)`,
/// and marginal costs below `g` inside the ladder. With
/// `mixed_within_level`, same-level matches play the mixed Hawk-Dove
/// equilibrium instead of mutual Dove (in-group preferences become
/// materialistic).
pub fn construct_hawkdove_esc(
    gain: &Scalar,
    loss: &Scalar,
    costs: &CostSchedule,
    mixed_within_level: bool,
) -> Result<HawkDoveConstruction> {
    if *gain <= Scalar::zero() {
        return Err(Error::Input("the hawk gain g must be positive".into()));
    }
    if *loss <= Scalar::zero() || *loss >= Scalar::one() {
        return Err(Error::Input("the dove loss l must lie in (0, 1)".into()));
    }
    let game = SymmetricGame::hawk_dove(gain, loss)?;
    let env = Environment::new(game.clone(), costs.clone(), DeceptionTable::certain());

    if gain < loss {
        return Ok(HawkDoveConstruction {
            case: HawkDoveCase::NoneInFamily,
            configuration: None,
            frequencies: Vec::new(),
            notes: vec![format!(
                "g = {gain} < l = {loss}: cross-level matches destroy more fitness than \
                 within-level cooperation creates, so no in-group-cooperation ladder is stable"
            )],
        });
    }
    let case = if gain > loss {
        HawkDoveCase::EvolutionarilyStable
    } else {
        HawkDoveCase::NeutrallyStable
    };

    // Ladder height: the last level whose cost stays within l + g.
    let window = loss + gain;
    let mut n_levels = 1u32;
    while env.cost(n_levels + 1) <= window {
        n_levels += 1;
    }
    for n in 1..n_levels {
        let gap = env.cost(n + 1) - env.cost(n);
        if gap >= *gain {
            return Err(Error::Precondition(format!(
                "marginal cost condition violated: k({}) - k({n}) = {gap} is not below g = {gain}",
                n + 1
            )));
        }
    }

    // Within-level play and its fitness value.
    let (within_play, within_value) = if mixed_within_level {
        // Indifference point of the Hawk-Dove game: p_H = g / (1 + g − l).
        let p = gain / &(Scalar::one() + gain.clone() - loss.clone());
        let sigma = MixedStrategy::new(vec![p.clone(), Scalar::one() - p])?;
        let value = game.payoff(&sigma, &sigma)?;
        (sigma, value)
    } else {
        (MixedStrategy::pure(DOVE, 2), Scalar::one())
    };

    let frequencies = solve_hawkdove_balance(&env, n_levels, gain, loss, &within_value)?;

    let types: Vec<CognitiveType> = (1..=n_levels)
        .map(|n| {
            let label = format!("ingroup-L{n}");
            let in_group = if mixed_within_level {
                UtilityFunction::materialistic(&game)
            } else {
                UtilityFunction::dominant_action(DOVE, 2)
            };
            let utility = BranchUtility {
                branches: vec![(TypeRef::new(label.clone(), n), in_group)],
                otherwise: UtilityFunction::dominant_action(HAWK, 2),
            };
            CognitiveType::discriminating(label, utility, n)
        })
        .collect::<Result<_>>()?;
    let dist = TypeDistribution::new(types, frequencies.clone())?;

    let mut policy = BehaviorPolicy::new();
    let count = n_levels as usize;
    for i in 0..count {
        policy.set_nash(i, i, within_play.clone());
        for j in 0..count {
            if i == j {
                continue;
            }
            if i > j {
                policy.set_deception(i, j, MixedStrategy::pure(HAWK, 2));
            } else {
                policy.set_deception(i, j, MixedStrategy::pure(DOVE, 2));
            }
        }
    }
    let config = Configuration::new(env, dist, policy);
    let report = config.validate()?;
    if !report.valid {
        return Err(Error::Infeasible(format!(
            "constructed ladder failed validation: {:?}",
            report.violations
        )));
    }
    let mut notes = vec![format!("{n_levels}-level ladder, within-level value {within_value}")];
    if case == HawkDoveCase::NeutrallyStable {
        notes.push(
            "g = l: the ladder is neutrally stable only; indifferent drift between levels \
             is not strictly punished"
                .to_string(),
        );
    }
    Ok(HawkDoveConstruction {
        case,
        configuration: Some(config),
        frequencies,
        notes,
    })
}

/// Balance system for the ladder: moving one level up swaps a `w`-valued
/// in-group share for a `(1+g)`-valued exploitation share and a `(1−l)`
/// exploited share for a `w` one, so
/// `(1 + g − w)·μ(n) + (w − 1 + l)·μ(n+1) = k(n+1) − k(n)`.
fn solve_hawkdove_balance(
    env: &Environment,
    n_levels: u32,
    gain: &Scalar,
    loss: &Scalar,
    within_value: &Scalar,
) -> Result<Vec<Scalar>> {
    let count = n_levels as usize;
    if count == 1 {
        return Ok(vec![Scalar::one()]);
    }
    let alpha = Scalar::one() + gain.clone() - within_value.clone();
    let beta = within_value.clone() - Scalar::one() + loss.clone();
    if alpha.is_zero() || beta.is_zero() {
        return Err(Error::Infeasible(
            "degenerate balance coefficients; the ladder cannot equalize fitness".into(),
        ));
    }
    // μ(n) = p(n) + s(n)·t with μ(1) = t.
    let mut particular = vec![Scalar::zero(); count];
    let mut slope = vec![Scalar::zero(); count];
    slope[0] = Scalar::one();
    for n in 0..count - 1 {
        let d = env.cost(n as u32 + 2) - env.cost(n as u32 + 1);
        particular[n + 1] = (d - alpha.clone() * particular[n].clone()) / beta.clone();
        slope[n + 1] = -(alpha.clone() * slope[n].clone()) / beta.clone();
    }
    let p_sum: Scalar = particular.iter().cloned().sum();
    let s_sum: Scalar = slope.iter().cloned().sum();
    if s_sum.is_zero() {
        return Err(Error::Infeasible(
            "the balance system is degenerate in the level-1 share".into(),
        ));
    }
    let t = (Scalar::one() - p_sum) / s_sum;
    let mut mu = Vec::with_capacity(count);
    for n in 0..count {
        let v = particular[n].clone() + slope[n].clone() * t.clone();
        if v <= Scalar::zero() {
            return Err(Error::Infeasible(format!(
                "frequency of level {} comes out nonpositive ({v})",
                n + 1
            )));
        }
        mu.push(v);
    }
    Ok(mu)
}
