//! The heterogeneous Rock-Paper-Scissors construction: a ladder of
//! materialistic types whose cognitive levels coexist because each extra
//! win from deceiving the levels below is exactly offset by the extra
//! cognitive cost. Against an equal level everyone mixes uniformly; across
//! levels the deceiver plays Paper against an induced Rock.

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::game::MixedStrategy;
use crate::population::{BehaviorPolicy, Configuration, TypeDistribution};
use crate::prefs::CognitiveType;
use crate::scalar::Scalar;

const ROCK: usize = 0;
const PAPER: usize = 1;

/// Builds the ladder configuration for a Rock-Paper-Scissors environment.
///
/// Preconditions, all validated: the fitness game is exactly win-1 /
/// lose-1 / tie-0 Rock-Paper-Scissors; deception across unequal levels is
/// certain (`q ≡ 1`); the cost schedule puts `k(N) ≤ 2 < k(N+1)` for some
/// `N` and climbs by at most 1 between consecutive ladder levels.
///
/// The frequencies solve the balance system
/// `μ(n) + μ(n+1) = k(n+1) − k(n)`, `Σ μ = 1`, `μ > 0`. For an even number
/// of levels the system has one degree of freedom; `level1_share` selects a
/// point (default: the midpoint of the feasible interval). For an odd
/// number the solution is pinned and `level1_share` must agree if given.
pub fn construct_rps_nsc(
    env: &Environment,
    level1_share: Option<&Scalar>,
) -> Result<Configuration> {
    let game = env.game();
    let expected = crate::game::SymmetricGame::rock_paper_scissors();
    if game.num_actions() != 3 || game.payoff_matrix() != expected.payoff_matrix() {
        return Err(Error::Precondition(
            "the fitness game must be Rock-Paper-Scissors with payoffs 1 / 0 / -1".into(),
        ));
    }

    // Number of ladder levels: the last level whose cost stays within the
    // maximal payoff swing of 2.
    let two = Scalar::from_int(2);
    let mut n_levels = 1u32;
    while env.cost(n_levels + 1) <= two {
        n_levels += 1;
    }

    for lo in 1..=n_levels {
        for hi in (lo + 1)..=n_levels {
            if env.q(hi, lo) != Scalar::one() {
                return Err(Error::Precondition(format!(
                    "deception must be certain across unequal levels; q({hi}, {lo}) != 1"
                )));
            }
        }
    }
    for n in 1..n_levels {
        let gap = env.cost(n + 1) - env.cost(n);
        if gap > Scalar::one() {
            return Err(Error::Precondition(format!(
                "marginal cost condition violated: k({}) - k({n}) = {gap} exceeds 1",
                n + 1
            )));
        }
    }

    let frequencies = solve_balance(env, n_levels, level1_share)?;

    let types: Vec<CognitiveType> = (1..=n_levels)
        .map(|n| CognitiveType::materialistic(format!("materialistic-L{n}"), game, n))
        .collect();
    let dist = TypeDistribution::new(types, frequencies)?;

    let mut policy = BehaviorPolicy::new();
    let uniform = MixedStrategy::uniform(3);
    let count = n_levels as usize;
    for i in 0..count {
        policy.set_nash(i, i, uniform.clone());
        for j in 0..count {
            if i == j {
                continue;
            }
            // Higher level deceives: plays Paper against an induced Rock.
            if i > j {
                policy.set_deception(i, j, MixedStrategy::pure(PAPER, 3));
            } else {
                policy.set_deception(i, j, MixedStrategy::pure(ROCK, 3));
            }
        }
    }
    Ok(Configuration::new(env.clone(), dist, policy))
}

/// Solves `μ(n) + μ(n+1) = k(n+1) − k(n)` with `Σ μ = 1`, `μ > 0`, writing
/// `μ(n) = p(n) + s(n)·t` with alternating signs `s`.
fn solve_balance(
    env: &Environment,
    n_levels: u32,
    level1_share: Option<&Scalar>,
) -> Result<Vec<Scalar>> {
    let count = n_levels as usize;
    if count == 1 {
        if let Some(s) = level1_share {
            if *s != Scalar::one() {
                return Err(Error::Input(
                    "a single-level ladder forces the level-1 share to 1".into(),
                ));
            }
        }
        return Ok(vec![Scalar::one()]);
    }
    let mut particular = vec![Scalar::zero(); count];
    let mut sign = vec![1i64; count];
    for n in 0..count - 1 {
        let d = env.cost(n as u32 + 2) - env.cost(n as u32 + 1);
        particular[n + 1] = d - particular[n].clone();
        sign[n + 1] = -sign[n];
    }
    let sign_sum: i64 = sign.iter().sum();
    let p_sum: Scalar = particular.iter().cloned().sum();

    let t = if sign_sum != 0 {
        // Odd ladder: the normalization pins t.
        let t = (Scalar::one() - p_sum) / Scalar::from_int(sign_sum);
        if let Some(s) = level1_share {
            if *s != t {
                return Err(Error::Input(format!(
                    "the balance system pins the level-1 share to {t}; got {s}"
                )));
            }
        }
        t
    } else {
        // Even ladder: the normalization is either inconsistent or leaves
        // one degree of freedom.
        if p_sum != Scalar::one() {
            return Err(Error::Infeasible(format!(
                "balance equations force total mass {p_sum}, not 1"
            )));
        }
        let mut lower: Option<Scalar> = None; // t > lower
        let mut upper: Option<Scalar> = None; // t < upper
        for n in 0..count {
            if sign[n] > 0 {
                let bound = -particular[n].clone();
                if lower.as_ref().is_none_or(|b| bound > *b) {
                    lower = Some(bound);
                }
            } else {
                let bound = particular[n].clone();
                if upper.as_ref().is_none_or(|b| bound < *b) {
                    upper = Some(bound);
                }
            }
        }
        let (lo, hi) = (lower.expect("both signs occur"), upper.expect("both signs occur"));
        if lo >= hi {
            return Err(Error::Infeasible(format!(
                "no strictly positive frequencies: the free share is squeezed into ({lo}, {hi})"
            )));
        }
        match level1_share {
            Some(s) => {
                if *s <= lo || *s >= hi {
                    return Err(Error::Input(format!(
                        "level-1 share {s} outside the feasible interval ({lo}, {hi})"
                    )));
                }
                s.clone()
            }
            None => (lo + hi) / Scalar::from_int(2),
        }
    };

    let mut mu = Vec::with_capacity(count);
    for n in 0..count {
        let v = particular[n].clone() + Scalar::from_int(sign[n]) * t.clone();
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
