//! Stability analysis: type games, neutral/evolutionary stability of mixed
//! strategies, certification of pure stable configurations, necessary-
//! condition checks for heterogeneous ones, constructive mutant refutations,
//! and the closed-form Rock-Paper-Scissors ladder.
//!
//! Stability of a configuration quantifies over *all* mutant distributions
//! and *all* focal post-entry behaviour policies, which no finite procedure
//! can decide in general. Verdicts are therefore three-valued: certification
//! is limited to the characterised classes (pure configurations in games
//! with a punishment action, and the explicit heterogeneous constructions),
//! refutation replays the constructive mutant recipes, and everything else
//! is reported as inconclusive rather than guessed.

mod certify;
mod nss;
mod recipes;
mod rps;

pub use certify::{
    certify_pure_nsc, check_highest_type_conditions, check_efficiency_requirement, CrossPlayWitness,
    EfficiencyCheckReport, HighestTypeReport, PureCertification,
};
pub use nss::{is_ess, is_nss, StabilityOptions};
pub use recipes::{refute_nsc, InvasionScenario, RecipeOutcome, RefuteReport};
pub use rps::construct_rps_nsc;

use serde::Serialize;

use crate::env::Environment;
use crate::error::Result;
use crate::linalg::Matrix;
use crate::population::Configuration;
use crate::prefs::CognitiveType;
use crate::scalar::Scalar;

/// The symmetric game over incumbent types induced by a configuration:
/// entry `(i, j)` is type i's match fitness against type j minus type i's
/// cognitive cost.
#[derive(Clone, Debug)]
pub struct TypeGame {
    types: Vec<CognitiveType>,
    payoff: Matrix,
}

impl TypeGame {
    pub fn types(&self) -> &[CognitiveType] {
        &self.types
    }

    pub fn payoff(&self) -> &Matrix {
        &self.payoff
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn type_names(&self) -> Vec<String> {
        self.types.iter().map(|t| t.name.clone()).collect()
    }
}

/// Builds the type game of a configuration.
pub fn build_type_game(config: &Configuration) -> Result<TypeGame> {
    let n = config.distribution().len();
    let mut payoff = Matrix::zeros(n, n);
    for i in 0..n {
        let cost = config.env().cost(config.distribution().type_at(i).level);
        for j in 0..n {
            payoff.set(
                i,
                j,
                config.match_fitness_by_index(i, j)? - cost.clone(),
            );
        }
    }
    Ok(TypeGame {
        types: config.distribution().types().to_vec(),
        payoff,
    })
}

/// Effective cost of deception against cognitive level one:
/// `c = min_{n ≥ 2} k(n) / q(n, 1)`.
///
/// The search stops as soon as the cost gap alone exceeds the best ratio
/// found: `q ≤ 1` makes every later ratio at least that large, and the
/// schedule is unbounded, so termination is guaranteed.
pub fn effective_cost(env: &Environment) -> Scalar {
    effective_cost_at_level(env, 1)
}

/// Effective cost of deceiving cognitive level `n`:
/// `c(n) = min_{m > n} (k(m) − k(n)) / q(m, n)`; `c(1)` is the plain
/// effective cost.
///
/// Beyond the last explicit deception override the probability is a
/// constant default while the cost gap keeps growing, so the ratio is
/// strictly increasing there and the search is exact once it has passed
/// that level. The cost-gap bound can stop it even earlier.
pub fn effective_cost_at_level(env: &Environment, n: u32) -> Scalar {
    assert!(n >= 1);
    let base = env.cost(n);
    let last_override = env
        .deception_table()
        .overrides()
        .iter()
        .map(|(deceiver, _, _)| *deceiver)
        .max()
        .unwrap_or(0);
    let mut best: Option<Scalar> = None;
    let mut m = n + 1;
    let mut evaluated_past_overrides = false;
    loop {
        let gap = env.cost(m) - base.clone();
        if let Some(b) = &best {
            if gap > *b {
                break;
            }
        }
        if evaluated_past_overrides {
            break;
        }
        let ratio = gap / env.q(m, n);
        if best.as_ref().is_none_or(|b| ratio < *b) {
            best = Some(ratio);
        }
        if m > last_override {
            evaluated_past_overrides = true;
        }
        m += 1;
    }
    best.expect("cost schedule is unbounded, loop ran at least once")
}

/// Outcome status of a stability check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StabilityStatus {
    CertifiedStable,
    Refuted,
    Inconclusive,
}

/// One named condition with its verdict and margin (positive = satisfied
/// with room, negative = violated by that amount).
#[derive(Clone, Debug, Serialize)]
pub struct ConditionCheck {
    pub name: String,
    pub passed: bool,
    pub margin: Option<Scalar>,
}

impl ConditionCheck {
    pub fn new(name: impl Into<String>, passed: bool, margin: Option<Scalar>) -> Self {
        ConditionCheck {
            name: name.into(),
            passed,
            margin,
        }
    }
}

/// Evidence attached to a refutation: either a direction in the type-game
/// simplex along which the quadratic form grows, or a full mutant invasion
/// scenario, or a textual note for verdicts whose witness is an argument
/// rather than an object.
#[derive(Clone, Debug)]
pub enum Witness {
    Direction(Vec<Scalar>),
    Scenario(Box<InvasionScenario>),
    Note(String),
}

impl Serialize for Witness {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(1))?;
        match self {
            Witness::Direction(d) => map.serialize_entry("direction", d)?,
            Witness::Scenario(s) => map.serialize_entry("scenario", &s.summary())?,
            Witness::Note(n) => map.serialize_entry("note", n)?,
        }
        map.end()
    }
}

/// Three-valued stability verdict with per-condition margins.
#[derive(Clone, Debug, Serialize)]
pub struct StabilityVerdict {
    pub status: StabilityStatus,
    pub witness: Option<Witness>,
    pub conditions: Vec<ConditionCheck>,
    pub notes: Vec<String>,
}

impl StabilityVerdict {
    pub fn certified(conditions: Vec<ConditionCheck>, notes: Vec<String>) -> Self {
        StabilityVerdict {
            status: StabilityStatus::CertifiedStable,
            witness: None,
            conditions,
            notes,
        }
    }

    /// Refutations always carry a witness.
    pub fn refuted(witness: Witness, conditions: Vec<ConditionCheck>, notes: Vec<String>) -> Self {
        StabilityVerdict {
            status: StabilityStatus::Refuted,
            witness: Some(witness),
            conditions,
            notes,
        }
    }

    pub fn inconclusive(conditions: Vec<ConditionCheck>, notes: Vec<String>) -> Self {
        StabilityVerdict {
            status: StabilityStatus::Inconclusive,
            witness: None,
            conditions,
            notes,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.status == StabilityStatus::CertifiedStable
    }

    pub fn is_refuted(&self) -> bool {
        self.status == StabilityStatus::Refuted
    }
}
