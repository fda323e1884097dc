//! Test-side oracles, independent of the implementation paths they check.
//!
//! - the ε-sweep oracle evaluates the *definition* of neutral/evolutionary
//!   stability at entry shares {1e-1, 1e-2, 1e-3}, exactly, in rationals;
//! - the belief-grid oracle decides undominatedness by brute force over a
//!   0.02-step grid of opponent beliefs;
//! - the deception brute force enumerates all feasible pure profiles.

#![allow(dead_code)]

use coevo::game::{MixedStrategy, SymmetricGame};
use coevo::linalg::Matrix;
use coevo::prefs::UtilityFunction;
use coevo::scalar::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Verdict of the definitional sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepVerdict {
    /// No candidate mutant gains at the trailing entry shares.
    Stable,
    /// Some mutant gains (weakly, for the strict notion) at every trailing
    /// entry share.
    Unstable,
}

const SWEEP: [(i64, i64); 3] = [(1, 10), (1, 100), (1, 1000)];

/// Violation of the stability inequality for mutant `y` against incumbent
/// `x` at entry share ε: `π(y, x_ε) − π(x, x_ε)` with
/// `x_ε = (1−ε)x + εy`, expanded to `(1−ε)(yBx − xBx) + ε(yBy − xBy)`.
fn sweep_violations(payoff: &Matrix, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
    let g1 = payoff.bilinear(y, x) - payoff.bilinear(x, x);
    let g2 = payoff.bilinear(y, y) - payoff.bilinear(x, y);
    SWEEP
        .iter()
        .map(|&(n, d)| {
            let eps = Scalar::ratio(n, d);
            (Scalar::one() - eps.clone()) * g1.clone() + eps * g2.clone()
        })
        .collect()
}

/// The definitional neutral-stability sweep: `x` fails iff some mutant
/// earns strictly more at both trailing entry shares (1e-2 and 1e-3; the
/// 1e-1 value is large-share noise and recorded only). Mutants are all pure
/// strategies plus any extra candidates supplied by the caller.
pub fn nss_sweep_oracle(payoff: &Matrix, x: &MixedStrategy, extra: &[Vec<Scalar>]) -> SweepVerdict {
    let n = payoff.rows();
    let mut mutants: Vec<Vec<Scalar>> = (0..n)
        .map(|a| MixedStrategy::pure(a, n).weights().to_vec())
        .collect();
    mutants.extend(extra.iter().cloned());
    for y in &mutants {
        let v = sweep_violations(payoff, x.weights(), y);
        if v[1] > Scalar::zero() && v[2] > Scalar::zero() {
            return SweepVerdict::Unstable;
        }
    }
    SweepVerdict::Stable
}

/// The evolutionary-stability sweep: strict outperformance is required of
/// the incumbent, so a mutant that merely *ties* at the trailing shares
/// already defeats it.
pub fn ess_sweep_oracle(payoff: &Matrix, x: &MixedStrategy, extra: &[Vec<Scalar>]) -> SweepVerdict {
    let n = payoff.rows();
    let mut mutants: Vec<Vec<Scalar>> = (0..n)
        .map(|a| MixedStrategy::pure(a, n).weights().to_vec())
        .collect();
    mutants.extend(extra.iter().cloned());
    for y in &mutants {
        if y == x.weights() {
            continue;
        }
        let v = sweep_violations(payoff, x.weights(), y);
        if v[1] >= Scalar::zero() && v[2] >= Scalar::zero() {
            return SweepVerdict::Unstable;
        }
    }
    SweepVerdict::Stable
}

/// Brute-force undominatedness over a belief grid with step 1/50: action
/// `a` qualifies iff it is a best reply (within 1e-9) to some grid belief.
/// Exact enough for the corpus: normalized utilities of small integer games
/// keep best-reply gaps far above the float noise floor.
pub fn grid_undominated(u: &UtilityFunction) -> Vec<usize> {
    const STEP_DEN: usize = 50;
    let m = u.num_actions();
    let table: Vec<Vec<f64>> = (0..m)
        .map(|a| (0..m).map(|b| u.value(a, b).to_f64()).collect())
        .collect();
    let mut qualified = vec![false; m];
    let mut belief = vec![0usize; m];
    enumerate_compositions(STEP_DEN, m, &mut belief, 0, &mut |belief| {
        let mut values = vec![0.0; m];
        for (a, v) in values.iter_mut().enumerate() {
            for b in 0..m {
                *v += table[a][b] * belief[b] as f64;
            }
        }
        let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for a in 0..m {
            if values[a] >= best - 1e-9 {
                qualified[a] = true;
            }
        }
    });
    (0..m).filter(|&a| qualified[a]).collect()
}

fn enumerate_compositions(
    total: usize,
    parts: usize,
    scratch: &mut Vec<usize>,
    idx: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if idx == parts - 1 {
        scratch[idx] = total - scratch[..idx].iter().sum::<usize>();
        f(scratch);
        return;
    }
    let used: usize = scratch[..idx].iter().sum();
    for v in 0..=(total - used) {
        scratch[idx] = v;
        enumerate_compositions(total, parts, scratch, idx + 1, f);
    }
}

/// Brute-force optimum of a bilinear objective over pure profiles with the
/// second coordinate restricted to `feasible`.
pub fn brute_force_pure_optimum(
    objective: impl Fn(usize, usize) -> Scalar,
    m: usize,
    feasible: &[usize],
) -> Scalar {
    let mut best: Option<Scalar> = None;
    for a in 0..m {
        for &b in feasible {
            let v = objective(a, b);
            if best.as_ref().is_none_or(|w| v > *w) {
                best = Some(v);
            }
        }
    }
    best.expect("nonempty feasible set")
}

/// A deterministic corpus of random symmetric games with small integer
/// payoffs (the acceptance suite demands exact agreement with the sweep
/// oracle, and small integers keep every margin far from the sweep's
/// resolution).
///
/// Games with an action sitting exactly on the weak-domination boundary
/// (dominance slack exactly zero) are redrawn: such an action is a best
/// reply only on a measure-zero set of beliefs, which no finite belief grid
/// can witness, so grid-oracle agreement is only meaningful away from that
/// boundary.
pub fn random_game_corpus(count: usize, seed: u64) -> Vec<SymmetricGame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut games = Vec::with_capacity(count);
    let mut attempts = 0;
    while games.len() < count {
        attempts += 1;
        assert!(attempts < count * 20, "corpus generation is stuck");
        let m = 2 + games.len() % 3; // cycle 2, 3, 4 actions
        let actions: Vec<String> = (0..m).map(|i| format!("a{i}")).collect();
        let matrix = Matrix::from_fn(m, m, |_, _| Scalar::from_int(rng.gen_range(-4..=4)));
        let game = SymmetricGame::new(actions, matrix).expect("valid corpus game");
        let mat = UtilityFunction::materialistic(&game);
        let boundary = (0..m).any(|a| {
            coevo::prefs::domination_slack(&mat, a)
                .expect("dominance LP solves")
                .is_zero()
        });
        if !boundary {
            games.push(game);
        }
    }
    games
}

/// Stability candidates for one game: its symmetric equilibria, the uniform
/// mix, and every vertex.
pub fn stability_candidates(game: &SymmetricGame) -> Vec<MixedStrategy> {
    let m = game.num_actions();
    let mut candidates = coevo::prefs::symmetric_nash(game.payoff_matrix());
    for refp in [MixedStrategy::uniform(m)]
        .into_iter()
        .chain((0..m).map(|a| MixedStrategy::pure(a, m)))
    {
        if !candidates.contains(&refp) {
            candidates.push(refp);
        }
    }
    candidates
}
