//! Replicator dynamics on type games: `ẋ_i = x_i ((Bx)_i − xᵀBx)`, the
//! share-weighted growth of above-average types. Integrated with an
//! embedded Runge-Kutta-Fehlberg 4(5) scheme with adaptive steps, a simplex
//! renormalization bounded by 1e-9 per step, and hard face invariance:
//! types that start at zero never receive mass.
//!
//! The probes here are empirical complements to the static verdicts:
//! neutrally stable states should hold perturbed trajectories nearby, and a
//! positive quadratic-form direction should show up as an escape.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// A recorded trajectory on the type simplex.
#[derive(Clone, Debug, Serialize)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Per-type expected payoff `(Bx)_i` along the trajectory.
    pub fitness_series: Vec<Vec<f64>>,
}

impl TrajectoryRecord {
    pub fn terminal(&self) -> &[f64] {
        self.states.last().expect("trajectories are nonempty")
    }

    /// Writes the trajectory as CSV: time, one share column per type, one
    /// fitness column per type.
    pub fn to_csv(&self, type_names: &[String]) -> String {
        let mut out = String::from("time");
        for n in type_names {
            out.push_str(&format!(",share_{n}"));
        }
        for n in type_names {
            out.push_str(&format!(",fitness_{n}"));
        }
        out.push('\n');
        for k in 0..self.times.len() {
            out.push_str(&format!("{}", self.times[k]));
            for v in &self.states[k] {
                out.push_str(&format!(",{v}"));
            }
            for v in &self.fitness_series[k] {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Integration controls.
#[derive(Clone, Debug)]
pub struct StepControl {
    pub tolerance: f64,
    pub max_step: f64,
    pub record_every: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            tolerance: 1e-9,
            max_step: 0.5,
            record_every: 0.1,
        }
    }
}

fn payoff_as_f64(payoff: &Matrix) -> Vec<Vec<f64>> {
    (0..payoff.rows())
        .map(|i| (0..payoff.cols()).map(|j| payoff.get(i, j).to_f64()).collect())
        .collect()
}

fn replicator_field(b: &[Vec<f64>], x: &[f64], active: &[bool]) -> Vec<f64> {
    let n = x.len();
    let mut bx = vec![0.0; n];
    for i in 0..n {
        if !active[i] {
            continue;
        }
        let mut acc = 0.0;
        for j in 0..n {
            if active[j] {
                acc += b[i][j] * x[j];
            }
        }
        bx[i] = acc;
    }
    let avg: f64 = (0..n).filter(|&i| active[i]).map(|i| x[i] * bx[i]).sum();
    (0..n)
        .map(|i| if active[i] { x[i] * (bx[i] - avg) } else { 0.0 })
        .collect()
}

/// Integrates the replicator dynamic from `x0` up to `horizon`.
///
/// Faces are invariant by construction: coordinates that start at exactly
/// zero are masked out of the field and never touched. After every accepted
/// step the state is clipped at zero and renormalized; the renormalization
/// drift is bounded by the step tolerance (≤ 1e-9 by default).
pub fn replicate(
    payoff: &Matrix,
    x0: &[f64],
    horizon: f64,
    control: &StepControl,
) -> Result<TrajectoryRecord> {
    let n = payoff.rows();
    if payoff.cols() != n {
        return Err(Error::Dimension {
            expected: n,
            got: payoff.cols(),
        });
    }
    if x0.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: x0.len(),
        });
    }
    let total: f64 = x0.iter().sum();
    if x0.iter().any(|&v| v < 0.0) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::Input(
            "the initial state must lie on the simplex".into(),
        ));
    }
    if horizon < 0.0 {
        return Err(Error::Input("horizon must be nonnegative".into()));
    }
    let b = payoff_as_f64(payoff);
    let active: Vec<bool> = x0.iter().map(|&v| v > 0.0).collect();

    let mut x: Vec<f64> = x0.to_vec();
    let mut t = 0.0;
    let mut h = control.max_step.min(horizon.max(1e-6) / 10.0).max(1e-8);
    let mut record = TrajectoryRecord {
        times: vec![0.0],
        states: vec![x.clone()],
        fitness_series: vec![fitness_of(&b, &x, &active)],
    };
    let mut next_record = control.record_every;

    while t < horizon {
        h = h.min(horizon - t);
        let (x_new, err) = rkf45_step(&b, &x, h, &active);
        let scale = control.tolerance;
        if err <= scale || h <= 1e-12 {
            t += h;
            x = renormalize(x_new, &active);
            if t >= next_record - 1e-12 || t >= horizon {
                record.times.push(t);
                record.states.push(x.clone());
                record.fitness_series.push(fitness_of(&b, &x, &active));
                next_record += control.record_every;
            }
            // Grow the step when the error leaves room.
            let ratio = if err > 0.0 { (scale / err).powf(0.2) } else { 2.0 };
            h = (h * ratio.clamp(0.2, 2.0)).min(control.max_step);
        } else {
            h = (h * (scale / err).powf(0.25).clamp(0.1, 0.5)).max(1e-12);
        }
    }
    Ok(record)
}

fn fitness_of(b: &[Vec<f64>], x: &[f64], active: &[bool]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            if !active[i] {
                return 0.0;
            }
            (0..n).filter(|&j| active[j]).map(|j| b[i][j] * x[j]).sum()
        })
        .collect()
}

/// One embedded RKF45 step; returns the 5th-order state and an error
/// estimate.
fn rkf45_step(b: &[Vec<f64>], x: &[f64], h: f64, active: &[bool]) -> (Vec<f64>, f64) {
    let f = |y: &[f64]| replicator_field(b, y, active);
    let n = x.len();
    let add = |y: &[f64], terms: &[(f64, &Vec<f64>)]| -> Vec<f64> {
        let mut out = y.to_vec();
        for (c, k) in terms {
            for i in 0..n {
                out[i] += h * c * k[i];
            }
        }
        out
    };
    let k1 = f(x);
    let k2 = f(&add(x, &[(0.25, &k1)]));
    let k3 = f(&add(x, &[(3.0 / 32.0, &k1), (9.0 / 32.0, &k2)]));
    let k4 = f(&add(
        x,
        &[
            (1932.0 / 2197.0, &k1),
            (-7200.0 / 2197.0, &k2),
            (7296.0 / 2197.0, &k3),
        ],
    ));
    let k5 = f(&add(
        x,
        &[
            (439.0 / 216.0, &k1),
            (-8.0, &k2),
            (3680.0 / 513.0, &k3),
            (-845.0 / 4104.0, &k4),
        ],
    ));
    let k6 = f(&add(
        x,
        &[
            (-8.0 / 27.0, &k1),
            (2.0, &k2),
            (-3544.0 / 2565.0, &k3),
            (1859.0 / 4104.0, &k4),
            (-11.0 / 40.0, &k5),
        ],
    ));
    let order5 = add(
        x,
        &[
            (16.0 / 135.0, &k1),
            (6656.0 / 12825.0, &k3),
            (28561.0 / 56430.0, &k4),
            (-9.0 / 50.0, &k5),
            (2.0 / 55.0, &k6),
        ],
    );
    let order4 = add(
        x,
        &[
            (25.0 / 216.0, &k1),
            (1408.0 / 2565.0, &k3),
            (2197.0 / 4104.0, &k4),
            (-0.2, &k5),
        ],
    );
    let err = order5
        .iter()
        .zip(&order4)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    (order5, err)
}

fn renormalize(mut x: Vec<f64>, active: &[bool]) -> Vec<f64> {
    for (i, v) in x.iter_mut().enumerate() {
        if !active[i] || *v < 0.0 {
            *v = 0.0;
        }
    }
    let total: f64 = x.iter().sum();
    debug_assert!((total - 1.0).abs() <= 1e-6, "drift too large: {total}");
    if total > 0.0 {
        for v in &mut x {
            *v /= total;
        }
    }
    x
}

/// Result of probing one rest point at several perturbation radii.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub rest_point: Vec<f64>,
    pub payoff_spread: f64,
    pub radii: Vec<RadiusProbe>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RadiusProbe {
    pub radius: f64,
    pub samples: usize,
    pub max_excursion: f64,
    pub max_terminal_distance: f64,
    pub escaped: bool,
    pub escape_direction: Option<Vec<f64>>,
}

/// Perturbation-sampling knobs for [`stability_probe`].
#[derive(Clone, Debug)]
pub struct ProbeOptions {
    pub samples_per_radius: usize,
    /// Terminal distance beyond this multiple of the radius is an escape.
    pub escape_factor: f64,
    pub seed: u64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            samples_per_radius: 8,
            escape_factor: 10.0,
            seed: 7,
        }
    }
}

/// Integrates perturbed copies of `x_star` and classifies each radius as
/// held ("no escape within the horizon") or escaped (some terminal state
/// ends up more than `escape_factor` radii away).
///
/// `x_star` must be a rest point: the per-type payoffs on its support must
/// agree (their spread is reported, and a spread above 1e-6 is an error).
pub fn stability_probe(
    payoff: &Matrix,
    x_star: &[f64],
    radii: &[f64],
    horizon: f64,
    control: &StepControl,
    opts: &ProbeOptions,
) -> Result<ProbeReport> {
    let n = payoff.rows();
    if x_star.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: x_star.len(),
        });
    }
    let b = payoff_as_f64(payoff);
    let active: Vec<bool> = x_star.iter().map(|&v| v > 0.0).collect();
    let bx = fitness_of(&b, x_star, &active);
    let support: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
    let spread = support
        .iter()
        .map(|&i| bx[i])
        .fold(f64::NEG_INFINITY, f64::max)
        - support
            .iter()
            .map(|&i| bx[i])
            .fold(f64::INFINITY, f64::min);
    if spread.abs() > 1e-6 {
        return Err(Error::Precondition(format!(
            "not a rest point: payoffs on the support spread by {spread}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut radius_reports = Vec::new();
    for &r in radii {
        let mut max_excursion: f64 = 0.0;
        let mut max_terminal: f64 = 0.0;
        let mut escaped = false;
        let mut escape_direction = None;
        for _ in 0..opts.samples_per_radius {
            let x0 = perturb_on_simplex(&mut rng, x_star, r);
            let record = replicate(payoff, &x0, horizon, control)?;
            let mut worst: f64 = 0.0;
            for state in &record.states {
                worst = worst.max(distance(state, x_star));
            }
            let terminal = distance(record.terminal(), x_star);
            max_excursion = max_excursion.max(worst);
            max_terminal = max_terminal.max(terminal);
            if terminal > opts.escape_factor * r && !escaped {
                escaped = true;
                escape_direction = Some(
                    record
                        .terminal()
                        .iter()
                        .zip(x_star)
                        .map(|(a, b)| a - b)
                        .collect(),
                );
            }
        }
        radius_reports.push(RadiusProbe {
            radius: r,
            samples: opts.samples_per_radius,
            max_excursion,
            max_terminal_distance: max_terminal,
            escaped,
            escape_direction,
        });
    }
    Ok(ProbeReport {
        rest_point: x_star.to_vec(),
        payoff_spread: spread,
        radii: radius_reports,
    })
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// A random point on the simplex at L2 distance `r` from `x`, staying on
/// the faces `x` already occupies.
fn perturb_on_simplex<R: Rng>(rng: &mut R, x: &[f64], r: f64) -> Vec<f64> {
    let support: Vec<usize> = (0..x.len()).filter(|&i| x[i] > 0.0).collect();
    if support.len() < 2 {
        return x.to_vec();
    }
    for _ in 0..1000 {
        // Random zero-sum direction on the support.
        let mut d = vec![0.0; x.len()];
        let mut mean = 0.0;
        for &i in &support {
            let v: f64 = rng.gen::<f64>() - 0.5;
            d[i] = v;
            mean += v;
        }
        mean /= support.len() as f64;
        let mut norm = 0.0;
        for &i in &support {
            d[i] -= mean;
            norm += d[i] * d[i];
        }
        let norm = norm.sqrt();
        if norm < 1e-12 {
            continue;
        }
        let candidate: Vec<f64> = (0..x.len()).map(|i| x[i] + d[i] * r / norm).collect();
        if candidate.iter().all(|&v| v >= 0.0) {
            let total: f64 = candidate.iter().sum();
            return candidate.into_iter().map(|v| v / total).collect();
        }
    }
    x.to_vec()
}
