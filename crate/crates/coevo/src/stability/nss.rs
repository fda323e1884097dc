//! Neutral and evolutionary stability of a mixed strategy in a symmetric
//! matrix game, decided through the finite best-reply-face characterization:
//!
//! `x` is neutrally stable iff it is a symmetric Nash equilibrium and the
//! quadratic form `z ↦ zᵀBz` is nonpositive for every direction `z = y − x`
//! into the face of best replies to `x`; evolutionary stability demands
//! strict negativity for `z ≠ 0`. When `x` has full support inside its
//! best-reply face the form can be tested exactly on the whole tangent
//! space, so the verdict is decisive; when `x` sits on the boundary of that
//! face only the inward cone matters, and the test falls back to the face
//! vertices plus seeded random sampling, reporting `inconclusive` when
//! neither certifies nor refutes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::MixedStrategy;
use crate::linalg::{is_positive_definite, is_positive_semidefinite, Matrix};
use crate::scalar::Scalar;

use super::{ConditionCheck, StabilityVerdict, Witness};

/// Knobs for the stability tests. The defaults match the documented
/// contract: 10,000 sampled face directions, tolerance 1e-9 for float data
/// (exact comparisons for rational data), fixed seed.
#[derive(Clone, Debug)]
pub struct StabilityOptions {
    pub samples: usize,
    pub tol: Option<Scalar>,
    pub seed: u64,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        StabilityOptions {
            samples: 10_000,
            tol: None,
            seed: 7,
        }
    }
}

impl StabilityOptions {
    fn resolve_tol(&self, exact: bool) -> Scalar {
        self.tol
            .clone()
            .unwrap_or_else(|| if exact { Scalar::zero() } else { Scalar::approx(1e-9) })
    }
}

/// Is `x` a neutrally stable strategy of the symmetric game with payoff
/// matrix `payoff`?
pub fn is_nss(payoff: &Matrix, x: &MixedStrategy, opts: &StabilityOptions) -> Result<StabilityVerdict> {
    stability_check(payoff, x, opts, false)
}

/// Is `x` an evolutionarily stable strategy?
pub fn is_ess(payoff: &Matrix, x: &MixedStrategy, opts: &StabilityOptions) -> Result<StabilityVerdict> {
    stability_check(payoff, x, opts, true)
}

fn stability_check(
    payoff: &Matrix,
    x: &MixedStrategy,
    opts: &StabilityOptions,
    strict: bool,
) -> Result<StabilityVerdict> {
    let n = payoff.rows();
    if payoff.cols() != n {
        return Err(Error::Dimension {
            expected: n,
            got: payoff.cols(),
        });
    }
    if x.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: x.len(),
        });
    }
    let exact = payoff.is_exact() && x.is_exact();
    let tol = opts.resolve_tol(exact);
    let mut conditions = Vec::new();
    let mut notes = Vec::new();

    // Stage 1: symmetric Nash (no pure deviation improves on x against x).
    let against = payoff.mul_vec(x.weights());
    let value = x
        .weights()
        .iter()
        .zip(&against)
        .map(|(w, p)| w.clone() * p.clone())
        .sum::<Scalar>();
    let mut worst_gain = -Scalar::one();
    let mut worst_action = 0;
    for (a, p) in against.iter().enumerate() {
        let gain = p.clone() - value.clone();
        if gain > worst_gain {
            worst_gain = gain;
            worst_action = a;
        }
    }
    let nash_ok = worst_gain <= tol;
    conditions.push(ConditionCheck::new(
        "symmetric-equilibrium",
        nash_ok,
        Some(worst_gain.clone()),
    ));
    if !nash_ok {
        let z = vertex_direction(worst_action, x);
        return Ok(StabilityVerdict::refuted(
            Witness::Direction(z),
            conditions,
            vec![format!(
                "pure strategy {worst_action} earns more than x against x"
            )],
        ));
    }

    // Best-reply face: pure actions attaining the equilibrium value.
    let face: Vec<usize> = (0..n)
        .filter(|&a| (value.clone() - against[a].clone()) <= tol)
        .collect();
    let interior = x.support().len() == face.len();
    if face.len() == 1 {
        // Strict symmetric Nash equilibrium: no alternative best replies at
        // all, which certifies both neutral and evolutionary stability.
        conditions.push(ConditionCheck::new("strict-equilibrium", true, None));
        return Ok(StabilityVerdict::certified(conditions, notes));
    }

    // Quadratic form of the symmetric part on the face tangent space, in the
    // basis w_a = e_a − e_{a0}.
    let sym = payoff.symmetric_part();
    let a0 = face[0];
    let basis: Vec<usize> = face[1..].to_vec();
    let d = basis.len();
    let form = Matrix::from_fn(d, d, |r, c| {
        let (ar, ac) = (basis[r], basis[c]);
        sym.get(ar, ac).clone() - sym.get(ar, a0).clone() - sym.get(a0, ac).clone()
            + sym.get(a0, a0).clone()
    });

    let definite_ok = if strict {
        is_positive_definite(&form.map(|v| -v), &tol)
    } else {
        is_positive_semidefinite(&form.map(|v| -v), &tol)
    };
    conditions.push(ConditionCheck::new(
        if strict {
            "face-form-negative-definite"
        } else {
            "face-form-negative-semidefinite"
        },
        definite_ok,
        None,
    ));
    if definite_ok {
        return Ok(StabilityVerdict::certified(conditions, notes));
    }

    // Face vertex directions refute cheaply.
    for &a in &face {
        let z = vertex_direction(a, x);
        if z.iter().all(Scalar::is_zero) {
            continue;
        }
        let q = quadratic(&sym, &z);
        let violated = if strict { q >= -tol.clone() } else { q > tol };
        if violated {
            notes.push(format!("face vertex {a} violates the quadratic form"));
            return Ok(StabilityVerdict::refuted(
                Witness::Direction(z),
                conditions,
                notes,
            ));
        }
    }

    // Interior case: the face directions span the whole tangent space, so a
    // failed definiteness test is itself a refutation; recover an explicit
    // direction by power iteration on the reduced form.
    if interior {
        if let Some(z) = dominant_face_direction(&form, &basis, a0, n) {
            let q = quadratic(&sym, &z);
            let genuine = if strict { q >= -tol.clone() } else { q > tol };
            if genuine {
                notes.push("interior equilibrium: tangent-space form is not negative".into());
                return Ok(StabilityVerdict::refuted(
                    Witness::Direction(z),
                    conditions,
                    notes,
                ));
            }
        }
        if strict {
            // For interior x, failing negative definiteness already denies
            // evolutionary stability; any tangent basis vector with a
            // nonnegative form value is a witness.
            for &a in basis.iter() {
                let z = basis_direction(a, a0, n);
                let q = quadratic(&sym, &z);
                if q >= -tol.clone() {
                    notes.push("interior equilibrium admits a non-shrinking direction".into());
                    return Ok(StabilityVerdict::refuted(
                        Witness::Direction(z),
                        conditions,
                        notes,
                    ));
                }
            }
        }
    }

    // Boundary case (or numerically stubborn interior): sample directions
    // into the face.
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.samples {
        let y = sample_face_point(&mut rng, &face, n);
        let z: Vec<Scalar> = (0..n)
            .map(|i| y[i].clone() - x.weight(i).clone())
            .collect();
        if z.iter().all(Scalar::is_zero) {
            continue;
        }
        let q = quadratic(&sym, &z);
        let violated = if strict { q >= -tol.clone() } else { q > tol };
        if violated {
            notes.push("sampled face direction violates the quadratic form".into());
            return Ok(StabilityVerdict::refuted(
                Witness::Direction(z),
                conditions,
                notes,
            ));
        }
    }

    notes.push(format!(
        "no violating direction among face vertices and {} samples; \
         the boundary cone may still hide one",
        opts.samples
    ));
    Ok(StabilityVerdict::inconclusive(conditions, notes))
}

fn vertex_direction(a: usize, x: &MixedStrategy) -> Vec<Scalar> {
    (0..x.len())
        .map(|i| {
            let e = if i == a { Scalar::one() } else { Scalar::zero() };
            e - x.weight(i).clone()
        })
        .collect()
}

fn basis_direction(a: usize, a0: usize, n: usize) -> Vec<Scalar> {
    (0..n)
        .map(|i| {
            if i == a {
                Scalar::one()
            } else if i == a0 {
                -Scalar::one()
            } else {
                Scalar::zero()
            }
        })
        .collect()
}

fn quadratic(sym: &Matrix, z: &[Scalar]) -> Scalar {
    sym.bilinear(z, z)
}

/// Power iteration (in floats) for the most-positive eigendirection of the
/// reduced form; mapped back to the full simplex tangent space and verified
/// exactly by the caller.
fn dominant_face_direction(
    form: &Matrix,
    basis: &[usize],
    a0: usize,
    n: usize,
) -> Option<Vec<Scalar>> {
    let d = form.rows();
    if d == 0 {
        return None;
    }
    let f: Vec<Vec<f64>> = (0..d)
        .map(|r| (0..d).map(|c| form.get(r, c).to_f64()).collect())
        .collect();
    // Shift so the target eigenvalue is dominant in magnitude.
    let shift: f64 = f
        .iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    let mut v: Vec<f64> = (0..d).map(|i| 1.0 + (i as f64) * 0.01).collect(); // asymmetric seed
    for _ in 0..200 {
        let mut w = vec![0.0; d];
        for r in 0..d {
            let mut acc = shift * v[r];
            for c in 0..d {
                acc += f[r][c] * v[c];
            }
            w[r] = acc;
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return None;
        }
        for x in &mut w {
            *x /= norm;
        }
        v = w;
    }
    // Convert the coefficients into an exact tangent direction.
    let mut z = vec![Scalar::zero(); n];
    for (r, &a) in basis.iter().enumerate() {
        let coeff = Scalar::Exact(num::BigRational::from_float(v[r])?);
        z[a] = z[a].clone() + coeff.clone();
        z[a0] = z[a0].clone() - coeff;
    }
    Some(z)
}

fn sample_face_point<R: Rng>(rng: &mut R, face: &[usize], n: usize) -> Vec<Scalar> {
    // Uniform on the face simplex via normalized exponentials, converted to
    // exact rationals so violations found by sampling are exact statements.
    let raws: Vec<f64> = face
        .iter()
        .map(|_| -(rng.gen::<f64>().max(1e-12)).ln())
        .collect();
    let total: f64 = raws.iter().sum();
    let mut y = vec![Scalar::zero(); n];
    for (k, &a) in face.iter().enumerate() {
        let w = num::BigRational::from_float(raws[k] / total)
            .unwrap_or_else(|| num::BigRational::from_integer(0.into()));
        y[a] = Scalar::Exact(w);
    }
    // Renormalize exactly.
    let total: Scalar = y.iter().cloned().sum();
    if total.is_zero() {
        y[face[0]] = Scalar::one();
        return y;
    }
    y.into_iter().map(|w| w / total.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::SymmetricGame;

    fn s(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    fn opts() -> StabilityOptions {
        StabilityOptions::default()
    }

    #[test]
    fn rps_uniform_is_nss_not_ess() {
        let rps = SymmetricGame::rock_paper_scissors();
        let x = MixedStrategy::uniform(3);
        let nss = is_nss(rps.payoff_matrix(), &x, &opts()).unwrap();
        assert!(nss.is_certified(), "{nss:?}");
        let ess = is_ess(rps.payoff_matrix(), &x, &opts()).unwrap();
        assert!(ess.is_refuted(), "{ess:?}");
    }

    #[test]
    fn strict_nash_is_ess() {
        let pd = crate::game::prisoners_dilemma();
        let x = MixedStrategy::pure(1, 2);
        assert!(is_ess(pd.payoff_matrix(), &x, &opts()).unwrap().is_certified());
        assert!(is_nss(pd.payoff_matrix(), &x, &opts()).unwrap().is_certified());
    }

    #[test]
    fn non_nash_is_refuted_at_stage_one() {
        let pd = crate::game::prisoners_dilemma();
        let x = MixedStrategy::pure(0, 2); // cooperation is not an equilibrium
        let v = is_nss(pd.payoff_matrix(), &x, &opts()).unwrap();
        assert!(v.is_refuted());
        assert!(!v.conditions[0].passed);
        let v = is_ess(pd.payoff_matrix(), &x, &opts()).unwrap();
        assert!(v.is_refuted());
    }

    #[test]
    fn coordination_mixed_point_is_refuted() {
        // diag(1, 1): the mixed equilibrium (1/2, 1/2) has zᵀBz = 1/2 > 0
        // along z = e1 − x.
        let b = Matrix::from_rows(vec![vec![s(1), s(0)], vec![s(0), s(1)]]).unwrap();
        let x = MixedStrategy::uniform(2);
        let v = is_nss(&b, &x, &opts()).unwrap();
        assert!(v.is_refuted());
        let Some(Witness::Direction(z)) = &v.witness else {
            panic!("expected a direction witness");
        };
        let q = b.symmetric_part().bilinear(z, z);
        assert!(q > Scalar::zero());
    }

    #[test]
    fn constant_column_game_every_point_is_nss() {
        // B = [[0, −1], [0, −1]]: identical rows make every x an equilibrium
        // with a vanishing form.
        let b = Matrix::from_rows(vec![vec![s(0), s(-1)], vec![s(0), s(-1)]]).unwrap();
        for x in [
            MixedStrategy::pure(0, 2),
            MixedStrategy::pure(1, 2),
            MixedStrategy::uniform(2),
        ] {
            let v = is_nss(&b, &x, &opts()).unwrap();
            assert!(v.is_certified(), "{v:?}");
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let b = Matrix::zeros(2, 2);
        let x = MixedStrategy::uniform(3);
        assert!(is_nss(&b, &x, &opts()).is_err());
    }
}
