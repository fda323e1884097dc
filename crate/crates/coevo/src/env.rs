//! The evolutionary environment: a fitness game, a strictly increasing and
//! unbounded cognitive cost schedule with `k(1) = 0`, and the deception
//! probability table `q(n, n')` (zero exactly when the first level does not
//! exceed the second, strictly positive otherwise).

use crate::error::{Error, Result};
use crate::game::SymmetricGame;
use crate::scalar::Scalar;

/// Cognitive costs: explicit values for the first levels, then a linear tail
/// with a strictly positive step, which keeps the schedule strictly
/// increasing and unbounded.
#[derive(Clone, Debug)]
pub struct CostSchedule {
    explicit: Vec<Scalar>, // explicit[i] = k(i+1); explicit[0] must be 0
    tail_step: Scalar,
}

impl CostSchedule {
    pub fn new(explicit: Vec<Scalar>, tail_step: Scalar) -> Result<Self> {
        if explicit.is_empty() {
            return Err(Error::Input("cost schedule needs at least k(1)".into()));
        }
        if !explicit[0].is_zero() {
            return Err(Error::Input("k(1) must be zero".into()));
        }
        for w in explicit.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Input(
                    "cost schedule must be strictly increasing".into(),
                ));
            }
        }
        if tail_step <= Scalar::zero() {
            return Err(Error::Input(
                "cost tail step must be strictly positive".into(),
            ));
        }
        Ok(CostSchedule { explicit, tail_step })
    }

    pub fn cost(&self, level: u32) -> Scalar {
        assert!(level >= 1, "cognitive levels start at 1");
        let idx = (level - 1) as usize;
        if idx < self.explicit.len() {
            self.explicit[idx].clone()
        } else {
            let beyond = (idx - self.explicit.len() + 1) as i64;
            self.explicit.last().expect("nonempty").clone()
                + self.tail_step.clone() * Scalar::from_int(beyond)
        }
    }

    pub fn explicit(&self) -> &[Scalar] {
        &self.explicit
    }

    pub fn tail_step(&self) -> &Scalar {
        &self.tail_step
    }
}

/// Deception probabilities. `q(n, n') = 0` whenever `n ≤ n'`; for `n > n'`
/// an explicit override applies if present, otherwise the default value.
#[derive(Clone, Debug)]
pub struct DeceptionTable {
    default_q: Scalar,
    overrides: Vec<(u32, u32, Scalar)>,
}

impl DeceptionTable {
    pub fn certain() -> Self {
        DeceptionTable {
            default_q: Scalar::one(),
            overrides: Vec::new(),
        }
    }

    pub fn with_default(default_q: Scalar) -> Result<Self> {
        if default_q <= Scalar::zero() || default_q > Scalar::one() {
            return Err(Error::Input(
                "default deception probability must lie in (0, 1]".into(),
            ));
        }
        Ok(DeceptionTable {
            default_q,
            overrides: Vec::new(),
        })
    }

    pub fn set(&mut self, deceiver: u32, deceived: u32, q: Scalar) -> Result<()> {
        if deceiver <= deceived {
            return Err(Error::Input(format!(
                "q({deceiver}, {deceived}) is fixed at zero for non-superior levels"
            )));
        }
        if q <= Scalar::zero() || q > Scalar::one() {
            return Err(Error::Input(
                "deception probabilities for superior levels must lie in (0, 1]".into(),
            ));
        }
        self.overrides.retain(|(a, b, _)| !(*a == deceiver && *b == deceived));
        self.overrides.push((deceiver, deceived, q));
        Ok(())
    }

    pub fn q(&self, deceiver: u32, deceived: u32) -> Scalar {
        if deceiver <= deceived {
            return Scalar::zero();
        }
        self.overrides
            .iter()
            .find(|(a, b, _)| *a == deceiver && *b == deceived)
            .map(|(_, _, q)| q.clone())
            .unwrap_or_else(|| self.default_q.clone())
    }

    pub fn overrides(&self) -> &[(u32, u32, Scalar)] {
        &self.overrides
    }

    pub fn default_q(&self) -> &Scalar {
        &self.default_q
    }
}

#[derive(Clone, Debug)]
pub struct Environment {
    game: SymmetricGame,
    cost: CostSchedule,
    deception: DeceptionTable,
}

impl Environment {
    pub fn new(game: SymmetricGame, cost: CostSchedule, deception: DeceptionTable) -> Self {
        Environment {
            game,
            cost,
            deception,
        }
    }

    pub fn builder(game: SymmetricGame) -> EnvironmentBuilder {
        EnvironmentBuilder {
            game,
            explicit: Vec::new(),
            tail_step: None,
            deception: DeceptionTable::certain(),
        }
    }

    pub fn game(&self) -> &SymmetricGame {
        &self.game
    }

    pub fn cost(&self, level: u32) -> Scalar {
        self.cost.cost(level)
    }

    pub fn cost_schedule(&self) -> &CostSchedule {
        &self.cost
    }

    pub fn q(&self, deceiver: u32, deceived: u32) -> Scalar {
        self.deception.q(deceiver, deceived)
    }

    pub fn deception_table(&self) -> &DeceptionTable {
        &self.deception
    }

    /// Total probability that a match between these two levels resolves by
    /// deception (at most one direction can be positive).
    pub fn deception_mass(&self, a: u32, b: u32) -> Scalar {
        self.q(a, b) + self.q(b, a)
    }

    /// The same environment with every scalar degraded to a float.
    pub fn degraded_to_float(&self) -> crate::error::Result<Environment> {
        let game = SymmetricGame::new(
            self.game.actions().to_vec(),
            self.game.payoff_matrix().map(Scalar::degraded),
        )?;
        let cost = CostSchedule::new(
            self.cost.explicit().iter().map(Scalar::degraded).collect(),
            self.cost.tail_step().degraded(),
        )?;
        let mut deception = DeceptionTable::with_default(self.deception.default_q().degraded())?;
        for (a, b, q) in self.deception.overrides() {
            deception.set(*a, *b, q.degraded())?;
        }
        Ok(Environment::new(game, cost, deception))
    }
}

pub struct EnvironmentBuilder {
    game: SymmetricGame,
    explicit: Vec<Scalar>,
    tail_step: Option<Scalar>,
    deception: DeceptionTable,
}

impl EnvironmentBuilder {
    pub fn costs(mut self, explicit: Vec<Scalar>) -> Self {
        self.explicit = explicit;
        self
    }

    pub fn costs_int(mut self, explicit: &[i64]) -> Self {
        self.explicit = explicit.iter().map(|&v| Scalar::from_int(v)).collect();
        self
    }

    pub fn tail_step(mut self, step: Scalar) -> Self {
        self.tail_step = Some(step);
        self
    }

    pub fn deception(mut self, table: DeceptionTable) -> Self {
        self.deception = table;
        self
    }

    pub fn build(self) -> Result<Environment> {
        let explicit = if self.explicit.is_empty() {
            vec![Scalar::zero()]
        } else {
            self.explicit
        };
        let tail_step = self.tail_step.unwrap_or_else(|| {
            // Default tail: repeat the last explicit gap, or grow by 1.
            if explicit.len() >= 2 {
                let n = explicit.len();
                explicit[n - 1].clone() - explicit[n - 2].clone()
            } else {
                Scalar::one()
            }
        });
        Ok(Environment::new(
            self.game,
            CostSchedule::new(explicit, tail_step)?,
            self.deception,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::prisoners_dilemma;

    #[test]
    fn schedule_validation() {
        assert!(CostSchedule::new(vec![Scalar::one()], Scalar::one()).is_err()); // k1 != 0
        assert!(CostSchedule::new(
            vec![Scalar::zero(), Scalar::zero()],
            Scalar::one()
        )
        .is_err()); // not increasing
        assert!(CostSchedule::new(vec![Scalar::zero()], Scalar::zero()).is_err()); // flat tail
    }

    #[test]
    fn schedule_extrapolates_linearly() {
        let k = CostSchedule::new(
            vec![Scalar::zero(), Scalar::one(), Scalar::from_int(3)],
            Scalar::from_int(2),
        )
        .unwrap();
        assert_eq!(k.cost(1), Scalar::zero());
        assert_eq!(k.cost(3), Scalar::from_int(3));
        assert_eq!(k.cost(4), Scalar::from_int(5));
        assert_eq!(k.cost(6), Scalar::from_int(9));
    }

    #[test]
    fn deception_table_rules() {
        let mut q = DeceptionTable::certain();
        assert_eq!(q.q(2, 1), Scalar::one());
        assert_eq!(q.q(1, 2), Scalar::zero());
        assert_eq!(q.q(3, 3), Scalar::zero());
        q.set(3, 1, Scalar::ratio(1, 2)).unwrap();
        assert_eq!(q.q(3, 1), Scalar::ratio(1, 2));
        assert!(q.set(1, 2, Scalar::ratio(1, 2)).is_err());
        assert!(q.set(2, 1, Scalar::from_int(2)).is_err());
    }

    #[test]
    fn builder_defaults() {
        let env = Environment::builder(prisoners_dilemma())
            .costs_int(&[0, 1, 3])
            .build()
            .unwrap();
        assert_eq!(env.cost(4), Scalar::from_int(5)); // last gap = 2 repeats
        assert_eq!(env.deception_mass(2, 1), Scalar::one());
    }
}
