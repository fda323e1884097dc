//! Constructive refutation of stability: each recipe builds a small group of
//! mutants, extends the configuration into a focal post-entry configuration
//! (incumbents keep their behaviour among themselves), validates it, and
//! evaluates the invasion in the vanishing-share limit.
//!
//! For a mutant distribution `y` entering a population `x`, the invasion
//! succeeds for every small ε iff `y` earns strictly more than the incumbent
//! average against `x`, or ties against `x` and earns strictly more against
//! itself than the incumbents earn against it. Recipes whose underlying
//! argument is purely first-order (the indifferent deceiver, the maxmin
//! guarantee) use only the first clause; the others may use the ε-order
//! tie-breaker.

use serde::Serialize;

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::game::{ActionId, MixedStrategy, SymmetricGame};
use crate::population::{BehaviorPolicy, Configuration, TypeDistribution};
use crate::prefs::{
    deception_equilibria, nash_equilibria, nash_violation, undominated_for_type, CognitiveType,
    Preferences, TypeRef, UtilityFunction,
};
use crate::scalar::{default_tol, Scalar};

use super::{
    build_type_game, ConditionCheck, StabilityVerdict, Witness,
};

/// A concrete invasion: mutants, their shares, a nominal entry fraction, the
/// focal post-entry configuration, and the two limit gains that decide it.
#[derive(Clone, Debug)]
pub struct InvasionScenario {
    pub label: String,
    pub mutants: Vec<CognitiveType>,
    pub shares: Vec<Scalar>,
    pub epsilon: Scalar,
    pub post_entry: Configuration,
    pub incumbent_count: usize,
    /// `y·B·x − x·B·x`: mutant-vs-incumbent advantage in the ε → 0 limit.
    pub first_order_gain: Scalar,
    /// `y·B·y − x·B·y`: the ε-order tie-breaker.
    pub tie_break_gain: Scalar,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioSummary {
    pub label: String,
    pub mutants: Vec<(String, u32)>,
    pub shares: Vec<Scalar>,
    pub epsilon: Scalar,
    pub first_order_gain: Scalar,
    pub tie_break_gain: Scalar,
}

impl InvasionScenario {
    pub fn summary(&self) -> ScenarioSummary {
        ScenarioSummary {
            label: self.label.clone(),
            mutants: self
                .mutants
                .iter()
                .map(|m| (m.name.clone(), m.level))
                .collect(),
            shares: self.shares.clone(),
            epsilon: self.epsilon.clone(),
            first_order_gain: self.first_order_gain.clone(),
            tie_break_gain: self.tie_break_gain.clone(),
        }
    }
}

/// What a single recipe reported.
#[derive(Clone, Debug)]
pub enum RecipeOutcome {
    Fired(Box<InvasionScenario>),
    Quiet(String),
    Inapplicable(String),
}

impl RecipeOutcome {
    fn describe(&self) -> String {
        match self {
            RecipeOutcome::Fired(s) => format!(
                "fired (first-order gain {}, tie-break {})",
                s.first_order_gain, s.tie_break_gain
            ),
            RecipeOutcome::Quiet(r) => format!("no advantage: {r}"),
            RecipeOutcome::Inapplicable(r) => format!("not applicable: {r}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RefuteReport {
    pub verdict: StabilityVerdict,
    pub outcomes: Vec<(String, String)>,
}

/// Replays the constructive mutant recipes against a configuration and
/// reports the first strict outperformance found. `budget` bounds the
/// cognitive level tried by the indifferent-deceiver recipe.
pub fn refute_nsc(config: &Configuration, budget: u32) -> Result<RefuteReport> {
    let tol = default_tol(config.is_exact());
    let mut outcomes = Vec::new();
    let mut conditions = Vec::new();

    // Internal stability: the incumbent distribution itself is a candidate
    // mutant distribution, so the pre-entry type game must already carry it
    // as a neutrally stable strategy.
    let own_game = build_type_game(config)?;
    let mu = MixedStrategy::new(config.distribution().frequencies().to_vec())?;
    let internal = super::is_nss(own_game.payoff(), &mu, &super::StabilityOptions::default())?;
    conditions.push(ConditionCheck::new(
        "internal-stability",
        !internal.is_refuted(),
        None,
    ));
    if internal.is_refuted() {
        outcomes.push((
            "internal".to_string(),
            "incumbent distribution is not neutrally stable in its own type game".to_string(),
        ));
        return Ok(RefuteReport {
            verdict: StabilityVerdict::refuted(
                internal.witness.expect("refuted verdicts carry witnesses"),
                conditions,
                vec!["refuted by internal instability (mutants need not differ from incumbents)"
                    .to_string()],
            ),
            outcomes,
        });
    }

    let facts = ConfigFacts::gather(config)?;
    let recipes: Vec<(&str, RecipeOutcome)> = vec![
        (
            "efficient-rotation",
            recipe_efficient_rotation(config, &facts, &tol)?,
        ),
        (
            "fitness-maximising-deception",
            recipe_fitness_maximising_deception(config, &facts, &tol)?,
        ),
        (
            "mimic-lower-type",
            recipe_mimic_lower_type(config, &facts, &tol)?,
        ),
        (
            "efficient-self-play",
            recipe_efficient_self_play(config, &facts, &tol)?,
        ),
        (
            "indifferent-deceiver",
            recipe_indifferent_deceiver(config, &facts, budget, &tol)?,
        ),
        (
            "maxmin-guarantee",
            recipe_maxmin_guarantee(config, &facts, &tol)?,
        ),
    ];

    let mut fired: Option<InvasionScenario> = None;
    for (name, outcome) in recipes {
        outcomes.push((name.to_string(), outcome.describe()));
        if fired.is_none() {
            if let RecipeOutcome::Fired(s) = outcome {
                fired = Some(*s);
            }
        }
    }

    let verdict = match fired {
        Some(scenario) => {
            let label = scenario.label.clone();
            StabilityVerdict::refuted(
                Witness::Scenario(Box::new(scenario)),
                conditions,
                vec![format!("refuted by recipe `{label}`")],
            )
        }
        None => StabilityVerdict::inconclusive(
            conditions,
            vec![
                "no constructive mutant recipe produced a strict advantage; \
                 stability over all mutant distributions remains undecided"
                    .to_string(),
            ],
        ),
    };
    Ok(RefuteReport { verdict, outcomes })
}

/// Facts shared across recipes.
struct ConfigFacts {
    pi_hat: Scalar,
    efficient_profile: (ActionId, ActionId),
    sym_efficient: Vec<ActionId>,
    highest_level: u32,
    average_fitness: Scalar,
    maxmin: Scalar,
    maxmin_action: ActionId,
}

impl ConfigFacts {
    fn gather(config: &Configuration) -> Result<Self> {
        let eff = config.env().game().efficiency();
        let mm = config.env().game().maxmin_minmax();
        Ok(ConfigFacts {
            pi_hat: eff.efficient_payoff.clone(),
            efficient_profile: eff.efficient_profiles[0],
            sym_efficient: eff.symmetric_efficient_actions.clone(),
            highest_level: config.distribution().max_level(),
            average_fitness: config.average_fitness()?,
            maxmin: mm.maxmin,
            maxmin_action: mm.maxmin_action,
        })
    }
}

/// Play selections added on top of the incumbent policy, indexed in the
/// enlarged support (incumbents first, mutants appended).
#[derive(Default)]
struct PolicyExtension {
    nash: Vec<(usize, usize, MixedStrategy)>,
    deception: Vec<(usize, usize, MixedStrategy)>,
}

const NOMINAL_EPSILON: (i64, i64) = (1, 1000);

/// Assembles the post-entry configuration, validates it, and evaluates the
/// invasion gains. Returns `Err(reason)` inside `Ok` when the construction
/// is structurally impossible (name collisions, invalid policy).
fn assemble(
    config: &Configuration,
    label: &str,
    mutants: Vec<CognitiveType>,
    shares: Vec<Scalar>,
    extension: PolicyExtension,
) -> Result<std::result::Result<InvasionScenario, String>> {
    let n = config.distribution().len();
    for m in &mutants {
        if config.distribution().types().iter().any(|t| t.same_type(m)) {
            return Ok(Err(format!("mutant `{}` collides with an incumbent", m.name)));
        }
    }
    let epsilon = Scalar::ratio(NOMINAL_EPSILON.0, NOMINAL_EPSILON.1);
    let mut support = config.distribution().types().to_vec();
    support.extend(mutants.iter().cloned());
    let residual = Scalar::one() - epsilon.clone();
    let mut freqs: Vec<Scalar> = config
        .distribution()
        .frequencies()
        .iter()
        .map(|f| f * &residual)
        .collect();
    for s in &shares {
        freqs.push(epsilon.clone() * s.clone());
    }
    let distribution = TypeDistribution::new(support, freqs)?;

    let mut policy = BehaviorPolicy::new();
    for i in 0..n {
        for j in 0..n {
            if let Some(p) = config.policy().nash_play(i, j) {
                policy.set_nash(i, j, p.clone());
            }
            if let Some(p) = config.policy().deception_play(i, j) {
                policy.set_deception(i, j, p.clone());
            }
        }
    }
    for (i, j, p) in extension.nash {
        policy.set_nash(i, j, p);
    }
    for (i, j, p) in extension.deception {
        policy.set_deception(i, j, p);
    }

    let mutant_refs: Vec<TypeRef> = mutants.iter().map(|m| m.type_ref()).collect();
    let post_entry = Configuration::new(config.env().clone(), distribution, policy)
        .with_universe(config.universe().to_vec())
        .with_universe(mutant_refs);

    let report = post_entry.validate()?;
    if !report.valid {
        let detail = report
            .violations
            .first()
            .map(|v| format!("{} ({} vs {})", v.condition, v.of, v.vs))
            .unwrap_or_default();
        return Ok(Err(format!("post-entry configuration invalid: {detail}")));
    }

    // Limit evaluation: x carries the incumbents, y the mutant shares.
    let tg = build_type_game(&post_entry)?;
    let total = tg.len();
    let mut x = vec![Scalar::zero(); total];
    x[..n].clone_from_slice(config.distribution().frequencies());
    let mut y = vec![Scalar::zero(); total];
    for (k, s) in shares.iter().enumerate() {
        y[n + k] = s.clone();
    }
    let b = tg.payoff();
    let first_order_gain = b.bilinear(&y, &x) - b.bilinear(&x, &x);
    let tie_break_gain = b.bilinear(&y, &y) - b.bilinear(&x, &y);

    Ok(Ok(InvasionScenario {
        label: label.to_string(),
        mutants,
        shares,
        epsilon,
        post_entry,
        incumbent_count: n,
        first_order_gain,
        tie_break_gain,
    }))
}

fn fired_if(
    scenario: InvasionScenario,
    tol: &Scalar,
    allow_tie_break: bool,
) -> RecipeOutcome {
    let g1 = &scenario.first_order_gain;
    let g2 = &scenario.tie_break_gain;
    let strict_first = g1.clone() > tol.clone();
    let tie = allow_tie_break
        && g1.clone() >= -tol.clone()
        && g2.clone() > tol.clone();
    if strict_first || tie {
        RecipeOutcome::Fired(Box::new(scenario))
    } else {
        RecipeOutcome::Quiet(format!(
            "validated scenario gains were not strict (first-order {g1}, tie-break {g2})"
        ))
    }
}

/// Indifferent utilities (rows all equal) that are not already incumbent at
/// `level`, preferring the pro-generous family so deceivers keep a
/// fitness-maximising deception equilibrium available.
fn fresh_indifferent_utilities(
    game: &SymmetricGame,
    level: u32,
    incumbents: &[CognitiveType],
    count: usize,
) -> Option<Vec<UtilityFunction>> {
    let mut candidates: Vec<UtilityFunction> = Vec::new();
    let mut betas = vec![(0i64, 1i64), (1, 1), (1, 2), (1, 3), (2, 3), (1, 4), (3, 4)];
    for q in 5..40i64 {
        for p in 1..q {
            betas.push((p, q));
        }
    }
    for (p, q) in betas {
        if let Ok(u) = UtilityFunction::pro_generous(game, &Scalar::one(), &Scalar::ratio(p, q)) {
            if !candidates.contains(&u) {
                candidates.push(u);
            }
        }
    }
    let constant = UtilityFunction::constant(game.num_actions());
    if !candidates.contains(&constant) {
        candidates.push(constant);
    }
    // Last resort for two-action games: indifferent utilities keyed to each
    // single opponent column.
    for col in 0..game.num_actions() {
        let m = game.num_actions();
        let u = UtilityFunction::new(crate::linalg::Matrix::from_fn(m, m, |_, j| {
            if j == col {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        }))
        .expect("square table");
        if !candidates.contains(&u) {
            candidates.push(u);
        }
    }
    let mut out = Vec::new();
    for u in candidates {
        let taken = incumbents.iter().any(|t| {
            t.level == level
                && matches!(&t.prefs, Preferences::Simple(ui) if ui == &u)
        });
        if !taken {
            out.push(u);
            if out.len() == count {
                return Some(out);
            }
        }
    }
    None
}

/// The deception profile (deceiver action, victim action) with the best
/// deceiver fitness among the deceiver's subjectively optimal profiles.
fn best_fitness_deception(
    env: &Environment,
    deceiver: &CognitiveType,
    victim: &CognitiveType,
    universe: &[TypeRef],
) -> Result<(ActionId, ActionId)> {
    let de = deception_equilibria(env, deceiver, victim, universe)?;
    let game = env.game();
    de.profiles
        .iter()
        .copied()
        .max_by(|&(a1, b1), &(a2, b2)| {
            game.payoff_pure(a1, b1)
                .cmp(game.payoff_pure(a2, b2))
                .then(a2.cmp(&a1))
                .then(b2.cmp(&b1))
        })
        .ok_or_else(|| Error::Lp("deception equilibrium set is empty".into()))
}

/// The deception profile kindest to the victim among the deceiver's optima.
fn victim_friendly_deception(
    env: &Environment,
    deceiver: &CognitiveType,
    victim: &CognitiveType,
    universe: &[TypeRef],
) -> Result<(ActionId, ActionId)> {
    let de = deception_equilibria(env, deceiver, victim, universe)?;
    let game = env.game();
    de.profiles
        .iter()
        .copied()
        .max_by(|&(a1, b1), &(a2, b2)| {
            game.payoff_pure(b1, a1)
                .cmp(game.payoff_pure(b2, a2))
                .then(a2.cmp(&a1))
                .then(b2.cmp(&b1))
        })
        .ok_or_else(|| Error::Lp("deception equilibrium set is empty".into()))
}

/// The subjective-game equilibrium between `mutant` and `incumbent` that
/// pays the mutant the most fitness. Stability quantifies over all focal
/// post-entry configurations, so the refuter may pick the selection.
fn best_nash_pair(
    game: &SymmetricGame,
    mutant: &CognitiveType,
    incumbent: &CognitiveType,
) -> Result<(MixedStrategy, MixedStrategy)> {
    let u_m = mutant.utility_against(&incumbent.type_ref());
    let u_i = incumbent.utility_against(&mutant.type_ref());
    let report = nash_equilibria(u_m, u_i)?;
    let mut best: Option<(Scalar, (MixedStrategy, MixedStrategy))> = None;
    for (sm, si) in report.equilibria {
        let fitness = game.payoff(&sm, &si)?;
        if best.as_ref().is_none_or(|(f, _)| fitness > *f) {
            best = Some((fitness, (sm, si)));
        }
    }
    Ok(best.expect("enumeration returns at least one equilibrium").1)
}

/// A symmetric self-play strategy for a mutant: the fitness-best pure action
/// that is a subjective best reply to itself, falling back to a symmetric
/// equilibrium of the subjective game.
fn best_self_play(game: &SymmetricGame, mutant: &CognitiveType) -> MixedStrategy {
    let u = mutant.utility_against(&mutant.type_ref());
    let m = game.num_actions();
    let mut best: Option<(Scalar, ActionId)> = None;
    for s in 0..m {
        let reply = crate::prefs::best_replies(u, &MixedStrategy::pure(s, m), &Scalar::zero());
        if reply.contains(&s) {
            let f = game.payoff_pure(s, s).clone();
            if best.as_ref().is_none_or(|(bf, _)| f > *bf) {
                best = Some((f, s));
            }
        }
    }
    match best {
        Some((_, s)) => MixedStrategy::pure(s, m),
        None => crate::prefs::symmetric_nash(u.matrix())
            .into_iter()
            .next()
            .unwrap_or_else(|| MixedStrategy::uniform(m)),
    }
}

/// Fills the extension for one mutant (enlarged index `mi`) against every
/// incumbent: deception plays where levels differ, mimicry of `mimic_of`'s
/// equilibrium play where the reference has the same level, and best-reply
/// equilibria otherwise.
fn extend_against_incumbents(
    config: &Configuration,
    mutant: &CognitiveType,
    mi: usize,
    mimic_of: Option<usize>,
    ext: &mut PolicyExtension,
    universe: &[TypeRef],
) -> Result<()> {
    let env = config.env();
    let m = env.game().num_actions();
    let n = config.distribution().len();
    for j in 0..n {
        let incumbent = config.distribution().type_at(j);
        let mass = env.deception_mass(mutant.level, incumbent.level);
        if mutant.level > incumbent.level {
            let (a, a_prime) = best_fitness_deception(env, mutant, incumbent, universe)?;
            ext.deception.push((mi, j, MixedStrategy::pure(a, m)));
            ext.deception.push((j, mi, MixedStrategy::pure(a_prime, m)));
        } else if mutant.level < incumbent.level {
            let (a, a_prime) = victim_friendly_deception(env, incumbent, mutant, universe)?;
            ext.deception.push((j, mi, MixedStrategy::pure(a, m)));
            ext.deception.push((mi, j, MixedStrategy::pure(a_prime, m)));
        }
        if mass < Scalar::one() {
            // Mimic the reference type's equilibrium play when that pair is
            // still an equilibrium against the mutant (it always is against
            // simple incumbents, who cannot tell the mutant apart; a
            // discriminating incumbent may react to the new identity, in
            // which case the play is recomputed).
            let mimicked = mimic_of
                .and_then(|r| {
                    let reference = config.distribution().type_at(r);
                    if reference.level != mutant.level {
                        return None;
                    }
                    let own = config.policy().nash_play(r, j)?.clone();
                    let theirs = config.policy().nash_play(j, r)?.clone();
                    Some((own, theirs))
                })
                .filter(|(own, theirs)| {
                    let u_m = mutant.utility_against(&incumbent.type_ref());
                    let u_i = incumbent.utility_against(&mutant.type_ref());
                    nash_violation(u_m, u_i, own, theirs) <= Scalar::zero()
                });
            let (own, theirs) = match mimicked {
                Some(pair) => pair,
                None => best_nash_pair(env.game(), mutant, incumbent)?,
            };
            ext.nash.push((mi, j, own));
            ext.nash.push((j, mi, theirs));
        }
    }
    Ok(())
}

/// Rotation of three indifferent mutants playing an efficient profile among
/// themselves. Targets configurations whose highest types play
/// inefficiently against their own type.
fn recipe_efficient_rotation(
    config: &Configuration,
    facts: &ConfigFacts,
    tol: &Scalar,
) -> Result<RecipeOutcome> {
    let env = config.env();
    let game = env.game();
    let n = config.distribution().len();
    let half = Scalar::ratio(1, 2);

    // A highest type playing inefficiently against itself.
    let target = (0..n).find(|&i| {
        let t = config.distribution().type_at(i);
        if t.level != facts.highest_level {
            return false;
        }
        match config.policy().nash_play(i, i) {
            Some(s) => {
                let self_fitness = game.payoff(s, s).expect("dimensions match");
                facts.pi_hat.clone() - self_fitness > *tol
            }
            None => false,
        }
    });
    let Some(target) = target else {
        return Ok(RecipeOutcome::Quiet(
            "every highest type already plays efficiently against itself".into(),
        ));
    };
    let _ = half;

    let Some(utilities) = fresh_indifferent_utilities(
        game,
        facts.highest_level,
        config.distribution().types(),
        3,
    ) else {
        return Ok(RecipeOutcome::Inapplicable(
            "could not find three distinct indifferent utilities outside the incumbents".into(),
        ));
    };
    let mutants: Vec<CognitiveType> = utilities
        .into_iter()
        .enumerate()
        .map(|(k, u)| {
            CognitiveType::simple(format!("rotation-mutant-{k}"), u, facts.highest_level)
                .expect("level >= 1")
        })
        .collect();
    let universe: Vec<TypeRef> = config
        .universe()
        .iter()
        .cloned()
        .chain(mutants.iter().map(|t| t.type_ref()))
        .collect();

    let m = game.num_actions();
    let (a1, a2) = facts.efficient_profile;
    let mut ext = PolicyExtension::default();
    for (k, mutant) in mutants.iter().enumerate() {
        let mi = n + k;
        extend_against_incumbents(config, mutant, mi, Some(target), &mut ext, &universe)?;
    }
    // Mutants of different kinds rotate the efficient profile; mutants of
    // the same kind copy the target's self-play.
    let self_play = config
        .policy()
        .nash_play(target, target)
        .expect("target self-play exists")
        .clone();
    for k in 0..3 {
        let mi = n + k;
        let next = n + (k + 1) % 3;
        let prev = n + (k + 2) % 3;
        ext.nash.push((mi, next, MixedStrategy::pure(a1, m)));
        ext.nash.push((mi, prev, MixedStrategy::pure(a2, m)));
        ext.nash.push((mi, mi, self_play.clone()));
    }

    let shares = vec![Scalar::ratio(1, 3); 3];
    match assemble(config, "efficient-rotation", mutants, shares, ext)? {
        Ok(scenario) => Ok(fired_if(scenario, tol, true)),
        Err(reason) => Ok(RecipeOutcome::Inapplicable(reason)),
    }
}

/// A single indifferent mutant that mimics a highest type but extracts full
/// fitness from every deception match.
fn recipe_fitness_maximising_deception(
    config: &Configuration,
    facts: &ConfigFacts,
    tol: &Scalar,
) -> Result<RecipeOutcome> {
    let n = config.distribution().len();
    let has_lower = (0..n).any(|i| {
        config.distribution().type_at(i).level < facts.highest_level
    });
    if !has_lower {
        return Ok(RecipeOutcome::Quiet(
            "no lower cognitive level present, nothing to deceive".into(),
        ));
    }
    let Some(utilities) = fresh_indifferent_utilities(
        config.env().game(),
        facts.highest_level,
        config.distribution().types(),
        1,
    ) else {
        return Ok(RecipeOutcome::Inapplicable(
            "no fresh indifferent utility available".into(),
        ));
    };
    let mutant = CognitiveType::simple(
        "deception-maximiser",
        utilities.into_iter().next().expect("one requested"),
        facts.highest_level,
    )
    .expect("level >= 1");
    let universe: Vec<TypeRef> = config
        .universe()
        .iter()
        .cloned()
        .chain([mutant.type_ref()])
        .collect();

    let mut best_outcome: Option<RecipeOutcome> = None;
    for target in (0..n).filter(|&i| config.distribution().type_at(i).level == facts.highest_level)
    {
        let mi = n;
        let mut ext = PolicyExtension::default();
        extend_against_incumbents(config, &mutant, mi, Some(target), &mut ext, &universe)?;
        if let Some(self_play) = config.policy().nash_play(target, target) {
            ext.nash.push((mi, mi, self_play.clone()));
        }
        match assemble(
            config,
            "fitness-maximising-deception",
            vec![mutant.clone()],
            vec![Scalar::one()],
            ext,
        )? {
            Ok(scenario) => {
                let outcome = fired_if(scenario, tol, false);
                if matches!(outcome, RecipeOutcome::Fired(_)) {
                    return Ok(outcome);
                }
                best_outcome = Some(outcome);
            }
            Err(reason) => best_outcome = Some(RecipeOutcome::Inapplicable(reason)),
        }
    }
    Ok(best_outcome.unwrap_or_else(|| {
        RecipeOutcome::Quiet("no highest type available as mimicry target".into())
    }))
}

/// A mutant that mimics a lower type's profitable play against the highest
/// type. Targets configurations where some lower type earns more than the
/// efficient payoff against a highest type.
fn recipe_mimic_lower_type(
    config: &Configuration,
    facts: &ConfigFacts,
    tol: &Scalar,
) -> Result<RecipeOutcome> {
    let env = config.env();
    let game = env.game();
    let n = config.distribution().len();
    let m = game.num_actions();
    let Some(utilities) = fresh_indifferent_utilities(
        game,
        facts.highest_level,
        config.distribution().types(),
        1,
    ) else {
        return Ok(RecipeOutcome::Inapplicable(
            "no fresh indifferent utility available".into(),
        ));
    };
    let mutant = CognitiveType::simple(
        "lower-type-mimic",
        utilities.into_iter().next().expect("one requested"),
        facts.highest_level,
    )
    .expect("level >= 1");
    let universe: Vec<TypeRef> = config
        .universe()
        .iter()
        .cloned()
        .chain([mutant.type_ref()])
        .collect();

    let mut any_target = false;
    for hi in (0..n).filter(|&i| config.distribution().type_at(i).level == facts.highest_level) {
        for lo in 0..n {
            let tlo = config.distribution().type_at(lo);
            let thi = config.distribution().type_at(hi);
            if tlo.level >= thi.level {
                continue;
            }
            if config.match_fitness_by_index(lo, hi)? <= facts.pi_hat.clone() + tol.clone() {
                continue;
            }
            any_target = true;
            // Two mimicry cases: paste the lower type's Nash profile or its
            // deception profile into the mutant's equilibrium slot.
            let mut candidates: Vec<(MixedStrategy, MixedStrategy)> = Vec::new();
            if let (Some(own), Some(theirs)) = (
                config.policy().nash_play(lo, hi),
                config.policy().nash_play(hi, lo),
            ) {
                if game.payoff(own, theirs)? > facts.pi_hat {
                    candidates.push((own.clone(), theirs.clone()));
                }
            }
            if let (Some(own), Some(theirs)) = (
                config.policy().deception_play(lo, hi),
                config.policy().deception_play(hi, lo),
            ) {
                if game.payoff(own, theirs)? > facts.pi_hat {
                    candidates.push((own.clone(), theirs.clone()));
                }
            }
            for (own, theirs) in candidates {
                let mi = n;
                let mut ext = PolicyExtension::default();
                extend_against_incumbents(config, &mutant, mi, Some(hi), &mut ext, &universe)?;
                // Override the slot against the highest type with the
                // mimicked profitable profile.
                ext.nash.retain(|(a, b, _)| !(*a == mi && *b == hi) && !(*a == hi && *b == mi));
                ext.nash.push((mi, hi, own.clone()));
                ext.nash.push((hi, mi, theirs.clone()));
                if let Some(self_play) = config.policy().nash_play(hi, hi) {
                    ext.nash.push((mi, mi, self_play.clone()));
                } else {
                    ext.nash.push((mi, mi, MixedStrategy::pure(0, m)));
                }
                match assemble(
                    config,
                    "mimic-lower-type",
                    vec![mutant.clone()],
                    vec![Scalar::one()],
                    ext,
                )? {
                    Ok(scenario) => {
                        let outcome = fired_if(scenario, tol, true);
                        if matches!(outcome, RecipeOutcome::Fired(_)) {
                            return Ok(outcome);
                        }
                    }
                    Err(_) => continue, // try the other mimicry case
                }
            }
        }
    }
    if any_target {
        Ok(RecipeOutcome::Quiet(
            "profitable lower-type play found, but no validated scenario gained strictly".into(),
        ))
    } else {
        Ok(RecipeOutcome::Quiet(
            "no lower type earns more than the efficient payoff against a highest type".into(),
        ))
    }
}

/// A mutant copying an inefficient type but playing the symmetric efficient
/// action against itself.
fn recipe_efficient_self_play(
    config: &Configuration,
    facts: &ConfigFacts,
    tol: &Scalar,
) -> Result<RecipeOutcome> {
    let env = config.env();
    let game = env.game();
    let n = config.distribution().len();
    let m = game.num_actions();
    if facts.sym_efficient.len() != 1 {
        return Ok(RecipeOutcome::Inapplicable(
            "needs a unique symmetric efficient action".into(),
        ));
    }
    let a_bar = facts.sym_efficient[0];

    // Highest-level offender first, mirroring the case analysis order.
    let mut offenders: Vec<usize> = (0..n)
        .filter(|&i| {
            config.policy().nash_play(i, i).is_some_and(|s| {
                let f = game.payoff(s, s).expect("dimensions match");
                facts.pi_hat.clone() - f > *tol
            })
        })
        .collect();
    offenders.sort_by_key(|&i| std::cmp::Reverse(config.distribution().type_at(i).level));
    if offenders.is_empty() {
        return Ok(RecipeOutcome::Quiet(
            "every type plays efficiently against itself".into(),
        ));
    }

    for &target in &offenders {
        let theta = config.distribution().type_at(target);
        let mutant_utility = match efficient_self_play_utility(config, theta, a_bar)? {
            Some(u) => u,
            None => continue,
        };
        let mutant = CognitiveType::simple("efficient-self-player", mutant_utility, theta.level)
            .expect("level >= 1");
        if config
            .distribution()
            .types()
            .iter()
            .any(|t| t.same_type(&mutant))
        {
            continue;
        }
        let universe: Vec<TypeRef> = config
            .universe()
            .iter()
            .cloned()
            .chain([mutant.type_ref()])
            .collect();
        let mi = n;
        let mut ext = PolicyExtension::default();
        extend_against_incumbents(config, &mutant, mi, Some(target), &mut ext, &universe)?;
        ext.nash
            .retain(|(a, b, _)| !(*a == mi && *b == mi));
        ext.nash.push((mi, mi, MixedStrategy::pure(a_bar, m)));
        match assemble(
            config,
            "efficient-self-play",
            vec![mutant],
            vec![Scalar::one()],
            ext,
        )? {
            Ok(scenario) => {
                let outcome = fired_if(scenario, tol, true);
                if matches!(outcome, RecipeOutcome::Fired(_)) {
                    return Ok(outcome);
                }
            }
            Err(_) => continue,
        }
    }
    Ok(RecipeOutcome::Quiet(
        "no validated efficient-self-play mutant gained strictly".into(),
    ))
}

/// The mutant utility for the efficient-self-play recipe: indifferent
/// pro-generous preferences when everything is undominated for the target,
/// otherwise the target's utility with the efficient diagonal raised to a
/// best reply and a dominated action lowered to keep the table fresh.
fn efficient_self_play_utility(
    config: &Configuration,
    theta: &CognitiveType,
    a_bar: ActionId,
) -> Result<Option<UtilityFunction>> {
    let game = config.env().game();
    let m = game.num_actions();
    let undominated = undominated_for_type(theta, config.universe())?;
    if undominated.actions.len() == m {
        return Ok(fresh_indifferent_utilities(
            game,
            theta.level,
            config.distribution().types(),
            1,
        )
        .map(|mut v| v.pop().expect("one requested")));
    }
    let Preferences::Simple(u) = &theta.prefs else {
        // A discriminating offender has no single table to modify.
        return Ok(None);
    };
    let dominated = (0..m)
        .find(|a| !undominated.actions.contains(a))
        .expect("some action is dominated");
    let best_vs_abar = (0..m)
        .map(|a| u.value(a, a_bar).clone())
        .max()
        .expect("nonempty");
    for beta_num in 0..16i64 {
        let beta = Scalar::ratio(beta_num, 7);
        let table = crate::linalg::Matrix::from_fn(m, m, |a, a_prime| {
            if a == a_bar && a_prime == a_bar {
                best_vs_abar.clone()
            } else if a == dominated && a_prime != a_bar {
                u.value(a, a_prime).clone() - beta.clone()
            } else {
                u.value(a, a_prime).clone()
            }
        });
        let candidate = UtilityFunction::new(table)?;
        let taken = config.distribution().types().iter().any(|t| {
            t.level == theta.level
                && matches!(&t.prefs, Preferences::Simple(ui) if ui == &candidate)
        });
        if !taken {
            return Ok(Some(candidate));
        }
    }
    Ok(None)
}

/// A completely indifferent deceiver at each level up to `budget`: gains the
/// deviation payoff in every deception match and pays the cognitive cost.
/// Purely first-order: no tie-break is consulted, so a cost that exactly
/// offsets the deception gain does not refute.
fn recipe_indifferent_deceiver(
    config: &Configuration,
    _facts: &ConfigFacts,
    budget: u32,
    tol: &Scalar,
) -> Result<RecipeOutcome> {
    let n = config.distribution().len();
    let mut last_reason = "budget below level 2".to_string();
    for level in 2..=budget.max(1) {
        let Some(utilities) = fresh_indifferent_utilities(
            config.env().game(),
            level,
            config.distribution().types(),
            1,
        ) else {
            last_reason = "no fresh indifferent utility".into();
            continue;
        };
        let mutant = CognitiveType::simple(
            format!("indifferent-deceiver-L{level}"),
            utilities.into_iter().next().expect("one requested"),
            level,
        )
        .expect("level >= 1");
        let universe: Vec<TypeRef> = config
            .universe()
            .iter()
            .cloned()
            .chain([mutant.type_ref()])
            .collect();
        let mi = n;
        let mut ext = PolicyExtension::default();
        extend_against_incumbents(config, &mutant, mi, None, &mut ext, &universe)?;
        ext.nash.push((
            mi,
            mi,
            best_self_play(config.env().game(), &mutant),
        ));
        match assemble(
            config,
            &format!("indifferent-deceiver(level {level})"),
            vec![mutant],
            vec![Scalar::one()],
            ext,
        )? {
            Ok(scenario) => {
                let outcome = fired_if(scenario, tol, false);
                if matches!(outcome, RecipeOutcome::Fired(_)) {
                    return Ok(outcome);
                }
                if let RecipeOutcome::Quiet(r) = outcome {
                    last_reason = r;
                }
            }
            Err(reason) => last_reason = reason,
        }
    }
    Ok(RecipeOutcome::Quiet(last_reason))
}

/// A level-1 mutant that insists on the pure maxmin action: its fitness is
/// bounded below by the maxmin value in every match, so any configuration
/// averaging below that value is invadable.
fn recipe_maxmin_guarantee(
    config: &Configuration,
    facts: &ConfigFacts,
    tol: &Scalar,
) -> Result<RecipeOutcome> {
    if facts.average_fitness.clone() >= facts.maxmin.clone() - tol.clone() {
        return Ok(RecipeOutcome::Quiet(format!(
            "average fitness {} is not below the pure maxmin value {}",
            facts.average_fitness, facts.maxmin
        )));
    }
    let game = config.env().game();
    let m = game.num_actions();
    let mutant = CognitiveType::simple(
        "maxmin-guard",
        UtilityFunction::dominant_action(facts.maxmin_action, m),
        1,
    )
    .expect("level >= 1");
    if config
        .distribution()
        .types()
        .iter()
        .any(|t| t.same_type(&mutant))
    {
        return Ok(RecipeOutcome::Inapplicable(
            "the maxmin-dominant type is already incumbent".into(),
        ));
    }
    let universe: Vec<TypeRef> = config
        .universe()
        .iter()
        .cloned()
        .chain([mutant.type_ref()])
        .collect();
    let n = config.distribution().len();
    let mi = n;
    let mut ext = PolicyExtension::default();
    extend_against_incumbents(config, &mutant, mi, None, &mut ext, &universe)?;
    ext.nash
        .push((mi, mi, MixedStrategy::pure(facts.maxmin_action, m)));
    match assemble(
        config,
        "maxmin-guarantee",
        vec![mutant],
        vec![Scalar::one()],
        ext,
    )? {
        Ok(scenario) => Ok(fired_if(scenario, tol, false)),
        Err(reason) => Ok(RecipeOutcome::Inapplicable(reason)),
    }
}
