//! Configurations: a finite-support type distribution paired with a
//! behaviour policy. Non-deceived pairs must play Nash equilibria of their
//! subjective game; pairs with unequal levels must resolve their deception
//! branch to a deception equilibrium. On top of that sit the fitness
//! accounts: match fitness, expected fitness net of cognitive cost, average
//! population fitness, and the balance test.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::game::MixedStrategy;
use crate::prefs::{
    de_membership, deception_equilibria, nash_between, nash_violation, CognitiveType,
    DeMembership, TypeRef,
};
use crate::scalar::{default_tol, Scalar};

/// A finite-support type distribution: strictly positive frequencies summing
/// to one over pairwise distinct types.
#[derive(Clone, Debug)]
pub struct TypeDistribution {
    support: Vec<CognitiveType>,
    frequency: Vec<Scalar>,
}

impl TypeDistribution {
    pub fn new(support: Vec<CognitiveType>, frequency: Vec<Scalar>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::Input("empty type distribution".into()));
        }
        if support.len() != frequency.len() {
            return Err(Error::Dimension {
                expected: support.len(),
                got: frequency.len(),
            });
        }
        for f in &frequency {
            if *f <= Scalar::zero() {
                return Err(Error::Input(
                    "type frequencies must be strictly positive".into(),
                ));
            }
        }
        let total: Scalar = frequency.iter().cloned().sum();
        let exact = frequency.iter().all(Scalar::is_exact);
        let slack = if exact {
            Scalar::zero()
        } else {
            Scalar::approx(1e-12)
        };
        if (total - Scalar::one()).abs() > slack {
            return Err(Error::Input("type frequencies must sum to one".into()));
        }
        for i in 0..support.len() {
            for j in (i + 1)..support.len() {
                if support[i].same_type(&support[j]) {
                    return Err(Error::Input(format!(
                        "support entries `{}` and `{}` are the same type",
                        support[i].name, support[j].name
                    )));
                }
            }
        }
        Ok(TypeDistribution { support, frequency })
    }

    pub fn singleton(t: CognitiveType) -> Self {
        TypeDistribution {
            support: vec![t],
            frequency: vec![Scalar::one()],
        }
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn types(&self) -> &[CognitiveType] {
        &self.support
    }

    pub fn type_at(&self, i: usize) -> &CognitiveType {
        &self.support[i]
    }

    pub fn frequency(&self, i: usize) -> &Scalar {
        &self.frequency[i]
    }

    pub fn frequencies(&self) -> &[Scalar] {
        &self.frequency
    }

    pub fn index_of(&self, t: &CognitiveType) -> Option<usize> {
        self.support.iter().position(|s| s.same_type(t))
    }

    pub fn max_level(&self) -> u32 {
        self.support.iter().map(|t| t.level).max().expect("nonempty")
    }
}

/// Identifies one side of one match mode: the strategy `of` uses against
/// `vs` when deception does (`Deception`) or does not (`Nash`) occur.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum MatchMode {
    Nash,
    Deception,
}

/// The behaviour policy: strategies for every ordered pair of incumbent
/// types, split by match mode. Entries are indexed into the distribution's
/// support. Auto-completed entries are tracked so reports can flag them.
#[derive(Clone, Debug, Default)]
pub struct BehaviorPolicy {
    nash: BTreeMap<(usize, usize), MixedStrategy>,
    deception: BTreeMap<(usize, usize), MixedStrategy>,
    auto_entries: Vec<(MatchMode, usize, usize)>,
}

impl BehaviorPolicy {
    pub fn new() -> Self {
        BehaviorPolicy::default()
    }

    pub fn set_nash(&mut self, of: usize, vs: usize, play: MixedStrategy) {
        self.nash.insert((of, vs), play);
    }

    pub fn set_deception(&mut self, of: usize, vs: usize, play: MixedStrategy) {
        self.deception.insert((of, vs), play);
    }

    pub fn nash_play(&self, of: usize, vs: usize) -> Option<&MixedStrategy> {
        self.nash.get(&(of, vs))
    }

    pub fn deception_play(&self, of: usize, vs: usize) -> Option<&MixedStrategy> {
        self.deception.get(&(of, vs))
    }

    pub fn auto_entries(&self) -> &[(MatchMode, usize, usize)] {
        &self.auto_entries
    }

    pub fn nash_entries(&self) -> impl Iterator<Item = (&(usize, usize), &MixedStrategy)> {
        self.nash.iter()
    }

    pub fn deception_entries(&self) -> impl Iterator<Item = (&(usize, usize), &MixedStrategy)> {
        self.deception.iter()
    }

    fn mark_auto(&mut self, mode: MatchMode, of: usize, vs: usize) {
        self.auto_entries.push((mode, of, vs));
    }
}

/// A population state: environment, type distribution, behaviour policy, and
/// the declared label universe for discriminating preferences (defaults to
/// the identities present in the support).
#[derive(Clone, Debug)]
pub struct Configuration {
    env: Environment,
    distribution: TypeDistribution,
    policy: BehaviorPolicy,
    universe: Vec<TypeRef>,
}

impl Configuration {
    pub fn new(
        env: Environment,
        distribution: TypeDistribution,
        policy: BehaviorPolicy,
    ) -> Self {
        let universe = distribution.types().iter().map(|t| t.type_ref()).collect();
        Configuration {
            env,
            distribution,
            policy,
            universe,
        }
    }

    pub fn with_universe(mut self, extra: Vec<TypeRef>) -> Self {
        for r in extra {
            if !self.universe.contains(&r) {
                self.universe.push(r);
            }
        }
        self
    }

    /// Completes a partial policy: every missing Nash entry gets the first
    /// enumerated equilibrium (smallest supports first), every missing
    /// deception entry the lexicographically first deception equilibrium.
    /// Auto-completed entries are flagged in the policy.
    pub fn with_auto_policy(
        env: Environment,
        distribution: TypeDistribution,
        mut policy: BehaviorPolicy,
    ) -> Result<Self> {
        let universe: Vec<TypeRef> =
            distribution.types().iter().map(|t| t.type_ref()).collect();
        let n = distribution.len();
        let m = env.game().num_actions();
        for i in 0..n {
            for j in 0..n {
                let ti = distribution.type_at(i);
                let tj = distribution.type_at(j);
                let mass = env.deception_mass(ti.level, tj.level);
                if mass < Scalar::one()
                    && (policy.nash_play(i, j).is_none() || policy.nash_play(j, i).is_none())
                {
                    let report = nash_between(ti, tj)?;
                    let (si, sj) = report.equilibria[0].clone();
                    if policy.nash_play(i, j).is_none() {
                        policy.set_nash(i, j, si);
                        policy.mark_auto(MatchMode::Nash, i, j);
                    }
                    if policy.nash_play(j, i).is_none() {
                        policy.set_nash(j, i, sj);
                        policy.mark_auto(MatchMode::Nash, j, i);
                    }
                }
                if ti.level > tj.level
                    && (policy.deception_play(i, j).is_none()
                        || policy.deception_play(j, i).is_none())
                {
                    let de = deception_equilibria(&env, ti, tj, &universe)?;
                    let &(a, a_prime) = de
                        .profiles
                        .first()
                        .ok_or_else(|| Error::Lp("empty deception equilibrium set".into()))?;
                    if policy.deception_play(i, j).is_none() {
                        policy.set_deception(i, j, MixedStrategy::pure(a, m));
                        policy.mark_auto(MatchMode::Deception, i, j);
                    }
                    if policy.deception_play(j, i).is_none() {
                        policy.set_deception(j, i, MixedStrategy::pure(a_prime, m));
                        policy.mark_auto(MatchMode::Deception, j, i);
                    }
                }
            }
        }
        Ok(Configuration::new(env, distribution, policy))
    }

    pub fn env(&self) -> &Environment {
        &self.env
    }

    pub fn distribution(&self) -> &TypeDistribution {
        &self.distribution
    }

    pub fn policy(&self) -> &BehaviorPolicy {
        &self.policy
    }

    pub fn universe(&self) -> &[TypeRef] {
        &self.universe
    }

    pub fn is_exact(&self) -> bool {
        self.env.game().is_exact()
            && self.distribution.frequencies().iter().all(Scalar::is_exact)
    }

    /// Expected fitness of type `i` conditional on being matched with `j`:
    /// the deception-mass-weighted mix of the deception and Nash profiles.
    pub fn match_fitness_by_index(&self, i: usize, j: usize) -> Result<Scalar> {
        let ti = self.distribution.type_at(i);
        let tj = self.distribution.type_at(j);
        let mass = self.env.deception_mass(ti.level, tj.level);
        let game = self.env.game();
        let mut total = Scalar::zero();
        if !mass.is_zero() {
            let own = self.policy.deception_play(i, j).ok_or_else(|| {
                Error::Input(format!(
                    "missing deception play of `{}` vs `{}`",
                    ti.name, tj.name
                ))
            })?;
            let other = self.policy.deception_play(j, i).ok_or_else(|| {
                Error::Input(format!(
                    "missing deception play of `{}` vs `{}`",
                    tj.name, ti.name
                ))
            })?;
            total = total + mass.clone() * game.payoff(own, other)?;
        }
        let residual = Scalar::one() - mass;
        if !residual.is_zero() {
            let own = self.policy.nash_play(i, j).ok_or_else(|| {
                Error::Input(format!(
                    "missing equilibrium play of `{}` vs `{}`",
                    ti.name, tj.name
                ))
            })?;
            let other = self.policy.nash_play(j, i).ok_or_else(|| {
                Error::Input(format!(
                    "missing equilibrium play of `{}` vs `{}`",
                    tj.name, ti.name
                ))
            })?;
            total = total + residual * game.payoff(own, other)?;
        }
        Ok(total)
    }

    pub fn match_fitness(
        &self,
        theta: &CognitiveType,
        theta_prime: &CognitiveType,
    ) -> Result<Scalar> {
        let i = self
            .distribution
            .index_of(theta)
            .ok_or_else(|| Error::NotInSupport(theta.name.clone()))?;
        let j = self
            .distribution
            .index_of(theta_prime)
            .ok_or_else(|| Error::NotInSupport(theta_prime.name.clone()))?;
        self.match_fitness_by_index(i, j)
    }

    /// Expected fitness of type `i`: match fitness against the population,
    /// minus the cognitive cost of the type's level.
    pub fn expected_fitness_by_index(&self, i: usize) -> Result<Scalar> {
        let mut acc = Scalar::zero();
        for j in 0..self.distribution.len() {
            acc = acc
                + self.distribution.frequency(j).clone() * self.match_fitness_by_index(i, j)?;
        }
        Ok(acc - self.env.cost(self.distribution.type_at(i).level))
    }

    pub fn expected_fitness(&self, theta: &CognitiveType) -> Result<Scalar> {
        let i = self
            .distribution
            .index_of(theta)
            .ok_or_else(|| Error::NotInSupport(theta.name.clone()))?;
        self.expected_fitness_by_index(i)
    }

    pub fn average_fitness(&self) -> Result<Scalar> {
        let mut acc = Scalar::zero();
        for i in 0..self.distribution.len() {
            acc = acc
                + self.distribution.frequency(i).clone() * self.expected_fitness_by_index(i)?;
        }
        Ok(acc)
    }

    /// All incumbent types earn the population-average fitness, within `tol`.
    pub fn is_balanced(&self, tol: &Scalar) -> Result<bool> {
        let avg = self.average_fitness()?;
        for i in 0..self.distribution.len() {
            if (self.expected_fitness_by_index(i)? - avg.clone()).abs() > *tol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The same configuration with every scalar degraded to a float
    /// approximation; comparisons downstream then use float tolerances.
    pub fn degraded_to_float(&self) -> Result<Configuration> {
        let env = self.env.degraded_to_float()?;
        let types = self
            .distribution
            .types()
            .iter()
            .map(|t| t.degraded_to_float())
            .collect::<Result<Vec<_>>>()?;
        let freqs = self
            .distribution
            .frequencies()
            .iter()
            .map(Scalar::degraded)
            .collect();
        let distribution = TypeDistribution::new(types, freqs)?;
        let mut policy = BehaviorPolicy::new();
        for (&(i, j), play) in self.policy.nash_entries() {
            policy.set_nash(i, j, degrade_play(play)?);
        }
        for (&(i, j), play) in self.policy.deception_entries() {
            policy.set_deception(i, j, degrade_play(play)?);
        }
        Ok(Configuration::new(env, distribution, policy)
            .with_universe(self.universe.clone()))
    }

    /// Checks every behaviour-policy invariant and reports violations with
    /// their magnitudes. Violations are report content, not errors.
    pub fn validate(&self) -> Result<ValidationReport> {
        let tol = default_tol(self.is_exact());
        let mut violations = Vec::new();
        let n = self.distribution.len();
        for i in 0..n {
            for j in i..n {
                let ti = self.distribution.type_at(i);
                let tj = self.distribution.type_at(j);
                let mass = self.env.deception_mass(ti.level, tj.level);
                if mass < Scalar::one() {
                    match (self.policy.nash_play(i, j), self.policy.nash_play(j, i)) {
                        (Some(si), Some(sj)) => {
                            let ui = ti.utility_against(&tj.type_ref());
                            let uj = tj.utility_against(&ti.type_ref());
                            let violation = nash_violation(ui, uj, si, sj);
                            if violation > tol {
                                violations.push(Violation {
                                    mode: MatchMode::Nash,
                                    of: ti.name.clone(),
                                    vs: tj.name.clone(),
                                    condition: "mutual best reply".into(),
                                    magnitude: Some(violation),
                                });
                            }
                        }
                        _ => violations.push(Violation {
                            mode: MatchMode::Nash,
                            of: ti.name.clone(),
                            vs: tj.name.clone(),
                            condition: "missing equilibrium play".into(),
                            magnitude: None,
                        }),
                    }
                }
                let (hi, lo) = if ti.level > tj.level {
                    (i, j)
                } else if tj.level > ti.level {
                    (j, i)
                } else {
                    continue;
                };
                let thi = self.distribution.type_at(hi);
                let tlo = self.distribution.type_at(lo);
                match (
                    self.policy.deception_play(hi, lo),
                    self.policy.deception_play(lo, hi),
                ) {
                    (Some(sh), Some(sl)) => {
                        match de_membership(&self.env, thi, tlo, sh, sl, &self.universe)? {
                            DeMembership::NotInducible => violations.push(Violation {
                                mode: MatchMode::Deception,
                                of: tlo.name.clone(),
                                vs: thi.name.clone(),
                                condition: "deceived play not inducible by any belief".into(),
                                magnitude: None,
                            }),
                            DeMembership::ValueGap(gap) => {
                                if gap > tol {
                                    violations.push(Violation {
                                        mode: MatchMode::Deception,
                                        of: thi.name.clone(),
                                        vs: tlo.name.clone(),
                                        condition: "profile not subjectively optimal for deceiver"
                                            .into(),
                                        magnitude: Some(gap),
                                    });
                                }
                            }
                        }
                    }
                    _ => violations.push(Violation {
                        mode: MatchMode::Deception,
                        of: thi.name.clone(),
                        vs: tlo.name.clone(),
                        condition: "missing deception play".into(),
                        magnitude: None,
                    }),
                }
            }
        }
        let auto = self
            .policy
            .auto_entries()
            .iter()
            .map(|(mode, i, j)| {
                (
                    *mode,
                    self.distribution.type_at(*i).name.clone(),
                    self.distribution.type_at(*j).name.clone(),
                )
            })
            .collect();
        Ok(ValidationReport {
            valid: violations.is_empty(),
            violations,
            auto_completed: auto,
        })
    }
}

fn degrade_play(play: &MixedStrategy) -> Result<MixedStrategy> {
    MixedStrategy::new(play.weights().iter().map(Scalar::degraded).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub mode: MatchMode,
    pub of: String,
    pub vs: String,
    pub condition: String,
    pub magnitude: Option<Scalar>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
    pub auto_completed: Vec<(MatchMode, String, String)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{prisoners_dilemma, SymmetricGame};
    use crate::prefs::UtilityFunction;

    fn rps_two_level_config(eps: Scalar) -> Configuration {
        let rps = SymmetricGame::rock_paper_scissors();
        let env = Environment::builder(rps.clone())
            .costs_int(&[0, 1])
            .tail_step(Scalar::from_int(5))
            .build()
            .unwrap();
        let t1 = CognitiveType::materialistic("level1", &rps, 1);
        let t2 = CognitiveType::materialistic("level2", &rps, 2);
        let dist = TypeDistribution::new(
            vec![t1, t2],
            vec![eps.clone(), Scalar::one() - eps],
        )
        .unwrap();
        let mut policy = BehaviorPolicy::new();
        let uniform = MixedStrategy::uniform(3);
        policy.set_nash(0, 0, uniform.clone());
        policy.set_nash(1, 1, uniform.clone());
        // Levels differ and q = 1, so no Nash entry is needed across levels.
        policy.set_deception(1, 0, MixedStrategy::pure(1, 3)); // higher plays P
        policy.set_deception(0, 1, MixedStrategy::pure(0, 3)); // lower induced to R
        Configuration::new(env, dist, policy)
    }

    #[test]
    fn two_level_rps_fitness_accounting() {
        let eps = Scalar::ratio(1, 10);
        let config = rps_two_level_config(eps.clone());
        let t1 = config.distribution().type_at(0).clone();
        let t2 = config.distribution().type_at(1).clone();
        // Level 2 vs level 1: wins 1; reversed: loses 1; same level: 0.
        assert_eq!(config.match_fitness(&t2, &t1).unwrap(), Scalar::one());
        assert_eq!(config.match_fitness(&t1, &t2).unwrap(), -Scalar::one());
        assert_eq!(config.match_fitness(&t1, &t1).unwrap(), Scalar::zero());
        // Both types earn ε − 1.
        let expected = eps - Scalar::one();
        assert_eq!(config.expected_fitness(&t1).unwrap(), expected);
        assert_eq!(config.expected_fitness(&t2).unwrap(), expected);
        assert!(config.is_balanced(&Scalar::zero()).unwrap());
        // Average fitness identity.
        assert_eq!(config.average_fitness().unwrap(), expected);
    }

    #[test]
    fn validation_accepts_the_rps_configuration() {
        let config = rps_two_level_config(Scalar::ratio(1, 2));
        let report = config.validate().unwrap();
        assert!(report.valid, "violations: {:?}", report.violations);
    }

    #[test]
    fn validation_rejects_bad_deception_play() {
        let mut config = rps_two_level_config(Scalar::ratio(1, 2));
        // (R, R) gives the deceiver subjective value 0 < 1.
        config.policy.set_deception(1, 0, MixedStrategy::pure(0, 3));
        let report = config.validate().unwrap();
        assert!(!report.valid);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].mode, MatchMode::Deception);
        // Canonical utilities rescale RPS payoffs {−1, 0, 1} to {0, 1/2, 1},
        // so the value gap of playing (R, R) instead of (P, R) is 1/2.
        assert_eq!(report.violations[0].magnitude, Some(Scalar::ratio(1, 2)));
    }

    #[test]
    fn single_type_nash_config_is_valid() {
        let pd = prisoners_dilemma();
        let env = Environment::builder(pd.clone()).costs_int(&[0, 1]).build().unwrap();
        let t = CognitiveType::materialistic("mat", &pd, 1);
        let dist = TypeDistribution::singleton(t);
        let mut policy = BehaviorPolicy::new();
        policy.set_nash(0, 0, MixedStrategy::pure(1, 2)); // defect on itself
        let config = Configuration::new(env, dist, policy);
        let report = config.validate().unwrap();
        assert!(report.valid);
        assert!(config.is_balanced(&Scalar::zero()).unwrap());
    }

    #[test]
    fn auto_completion_fills_and_flags() {
        let pd = prisoners_dilemma();
        let env = Environment::builder(pd.clone()).costs_int(&[0, 1]).build().unwrap();
        let t1 = CognitiveType::materialistic("mat1", &pd, 1);
        let t2 = CognitiveType::simple("odd", UtilityFunction::dominant_action(0, 2), 2).unwrap();
        let dist = TypeDistribution::new(
            vec![t1, t2],
            vec![Scalar::ratio(1, 2), Scalar::ratio(1, 2)],
        )
        .unwrap();
        let config =
            Configuration::with_auto_policy(env, dist, BehaviorPolicy::new()).unwrap();
        let report = config.validate().unwrap();
        assert!(report.valid, "violations: {:?}", report.violations);
        assert!(!report.auto_completed.is_empty());
        // All fitness accounts are computable.
        config.average_fitness().unwrap();
    }

    #[test]
    fn distribution_invariants() {
        let pd = prisoners_dilemma();
        let t = CognitiveType::materialistic("a", &pd, 1);
        let t_dup = CognitiveType::materialistic("b", &pd, 1);
        assert!(TypeDistribution::new(
            vec![t.clone(), t_dup],
            vec![Scalar::ratio(1, 2), Scalar::ratio(1, 2)]
        )
        .is_err());
        assert!(TypeDistribution::new(vec![t.clone()], vec![Scalar::ratio(1, 2)]).is_err());
        assert!(TypeDistribution::new(vec![t], vec![Scalar::zero()]).is_err());
    }
}
