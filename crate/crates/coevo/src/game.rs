//! Symmetric normal-form games with fitness payoffs, plus the scalar
//! diagnostics the stability analysis is built on: efficiency, deviation
//! gains, punishment actions, genericity, and pure maxmin/minmax values.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{eq_tol, Scalar};

/// Index of a pure action in a game's action list.
pub type ActionId = usize;

/// A symmetric two-player game: a finite action set and an `m×m` fitness
/// matrix whose `(i, j)` entry is the row player's payoff for playing action
/// `i` against action `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricGame {
    actions: Vec<String>,
    payoff: Matrix,
}

impl SymmetricGame {
    pub fn new(actions: Vec<String>, payoff: Matrix) -> Result<Self> {
        if actions.len() < 2 {
            return Err(Error::Input("a game needs at least two actions".into()));
        }
        if payoff.rows() != actions.len() || payoff.cols() != actions.len() {
            return Err(Error::Dimension {
                expected: actions.len(),
                got: payoff.rows().max(payoff.cols()),
            });
        }
        if payoff.entries().any(|v| !v.to_f64().is_finite()) {
            return Err(Error::Input("payoff entries must be finite".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for a in &actions {
            if !seen.insert(a.as_str()) {
                return Err(Error::Input(format!("duplicate action label `{a}`")));
            }
        }
        Ok(SymmetricGame { actions, payoff })
    }

    /// Convenience constructor from integer payoff rows.
    pub fn from_int_rows(actions: &[&str], rows: &[&[i64]]) -> Result<Self> {
        let matrix = Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Scalar::from_int(v)).collect())
                .collect(),
        )?;
        SymmetricGame::new(actions.iter().map(|s| s.to_string()).collect(), matrix)
    }

    /// The Rock-Paper-Scissors game used throughout the heterogeneous
    /// constructions: win 1, lose -1, tie 0.
    pub fn rock_paper_scissors() -> Self {
        SymmetricGame::from_int_rows(
            &["R", "P", "S"],
            &[&[0, -1, 1], &[1, 0, -1], &[-1, 1, 0]],
        )
        .expect("static game")
    }

    /// The Hawk-Dove family: mutual dove pays 1, mutual hawk 0, a hawk
    /// against a dove gains `1+g` while the dove keeps `1-l`.
    pub fn hawk_dove(gain: &Scalar, loss: &Scalar) -> Result<Self> {
        let one = Scalar::one();
        let payoff = Matrix::from_rows(vec![
            vec![Scalar::zero(), &one + gain],
            vec![&one - loss, one.clone()],
        ])?;
        SymmetricGame::new(vec!["H".into(), "D".into()], payoff)
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn action_label(&self, a: ActionId) -> &str {
        &self.actions[a]
    }

    pub fn action_by_label(&self, label: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a == label)
    }

    pub fn payoff_matrix(&self) -> &Matrix {
        &self.payoff
    }

    pub fn payoff_pure(&self, a: ActionId, against: ActionId) -> &Scalar {
        self.payoff.get(a, against)
    }

    pub fn is_exact(&self) -> bool {
        self.payoff.is_exact()
    }

    /// Bilinear extension `σ^T π σ'` of the payoff to mixed strategies.
    pub fn payoff(&self, sigma: &MixedStrategy, sigma_prime: &MixedStrategy) -> Result<Scalar> {
        if sigma.len() != self.num_actions() || sigma_prime.len() != self.num_actions() {
            return Err(Error::Dimension {
                expected: self.num_actions(),
                got: sigma.len().max(sigma_prime.len()),
            });
        }
        Ok(self
            .payoff
            .bilinear(sigma.weights(), sigma_prime.weights()))
    }

    /// Maximal gain from a unilateral deviation against a population playing
    /// `a`: `max_{a'} π(a', a) − π(a, a)`. Zero exactly when `(a, a)` is a
    /// Nash equilibrium of the fitness game.
    pub fn deviation_gain(&self, a: ActionId) -> Result<Scalar> {
        self.check_action(a)?;
        let best = (0..self.num_actions())
            .map(|b| self.payoff.get(b, a))
            .max()
            .expect("nonempty actions");
        Ok(best - self.payoff.get(a, a))
    }

    fn check_action(&self, a: ActionId) -> Result<()> {
        if a >= self.num_actions() {
            return Err(Error::Input(format!(
                "action index {a} out of range (m = {})",
                self.num_actions()
            )));
        }
        Ok(())
    }

    /// The efficient payoff and the pure profiles attaining it.
    ///
    /// Efficiency is searched over pure pairs only: the payoff sum is
    /// bilinear in the two mixed strategies, so its maximum over the product
    /// of simplices is attained at a pure vertex pair. Mixed profiles can tie
    /// but never beat the pure optimum, so pure witnesses are exhaustive up
    /// to ties.
    pub fn efficiency(&self) -> EfficiencyReport {
        let m = self.num_actions();
        let half = Scalar::ratio(1, 2);
        let mut best: Option<Scalar> = None;
        for a in 0..m {
            for b in 0..m {
                let avg = (self.payoff.get(a, b) + self.payoff.get(b, a)) * half.clone();
                if best.as_ref().is_none_or(|v| avg > *v) {
                    best = Some(avg);
                }
            }
        }
        let efficient_payoff = best.expect("nonempty game");
        let mut efficient_profiles = Vec::new();
        let mut symmetric_efficient_actions = Vec::new();
        for a in 0..m {
            for b in 0..m {
                let avg = (self.payoff.get(a, b) + self.payoff.get(b, a)) * half.clone();
                if avg == efficient_payoff {
                    efficient_profiles.push((a, b));
                    if a == b {
                        symmetric_efficient_actions.push(a);
                    }
                }
            }
        }
        EfficiencyReport {
            efficient_payoff,
            efficient_profiles,
            symmetric_efficient_actions,
        }
    }

    /// Actions that hold the opponent strictly below the efficient payoff no
    /// matter how the opponent replies: `max_{a'} π(a', a) < π̂`.
    pub fn punishment_actions(&self) -> Vec<ActionId> {
        let pi_hat = self.efficiency().efficient_payoff;
        (0..self.num_actions())
            .filter(|&a| {
                let col_max = (0..self.num_actions())
                    .map(|b| self.payoff.get(b, a))
                    .max()
                    .expect("nonempty");
                *col_max < pi_hat
            })
            .collect()
    }

    /// Genericity: across distinct unordered action pairs, individual payoffs
    /// differ and payoff sums differ (both by more than `tol`).
    pub fn is_generic(&self, tol: &Scalar) -> bool {
        let m = self.num_actions();
        let profiles: Vec<(usize, usize)> =
            (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).collect();
        for &(a, b) in &profiles {
            for &(c, d) in &profiles {
                let same_unordered = (a == c && b == d) || (a == d && b == c);
                if same_unordered {
                    continue;
                }
                if eq_tol(self.payoff.get(a, b), self.payoff.get(c, d), tol) {
                    return false;
                }
                let sum_ab = self.payoff.get(a, b) + self.payoff.get(b, a);
                let sum_cd = self.payoff.get(c, d) + self.payoff.get(d, c);
                if eq_tol(&sum_ab, &sum_cd, tol) {
                    return false;
                }
            }
        }
        true
    }

    /// Pure maxmin (the guarantee of moving first) and pure minmax (the
    /// guarantee of best-replying to a pure action), with witnesses. Ties are
    /// broken toward the lowest action index.
    pub fn maxmin_minmax(&self) -> MaxminReport {
        let m = self.num_actions();
        let row_min = |a: usize| {
            (0..m)
                .map(|b| self.payoff.get(a, b).clone())
                .min()
                .expect("nonempty")
        };
        let col_max = |b: usize| {
            (0..m)
                .map(|a| self.payoff.get(a, b).clone())
                .max()
                .expect("nonempty")
        };
        let mut maxmin = row_min(0);
        let mut maxmin_action = 0;
        for a in 1..m {
            let v = row_min(a);
            if v > maxmin {
                maxmin = v;
                maxmin_action = a;
            }
        }
        let mut minmax = col_max(0);
        let mut minmax_action = 0;
        for b in 1..m {
            let v = col_max(b);
            if v < minmax {
                minmax = v;
                minmax_action = b;
            }
        }
        MaxminReport {
            maxmin,
            maxmin_action,
            minmax,
            minmax_action,
        }
    }

    /// Full per-game diagnostics bundle.
    pub fn diagnostics(&self, genericity_tol: &Scalar) -> GameDiagnostics {
        let eff = self.efficiency();
        let mm = self.maxmin_minmax();
        GameDiagnostics {
            deviation_gains: (0..self.num_actions())
                .map(|a| self.deviation_gain(a).expect("valid index"))
                .collect(),
            punishment_actions: self.punishment_actions(),
            generic: self.is_generic(genericity_tol),
            efficiency: eff,
            maxmin: mm,
        }
    }
}

/// Role-symmetrizes a (possibly asymmetric) two-player interaction.
///
/// `row_payoff[i][j]` / `col_payoff[i][j]` are the two players' payoffs when
/// the row player uses `i` and the column player uses `j`. Each action of the
/// embedded game is a contingency pair (what to play as row, what to play as
/// column) and roles are assigned by a fair coin, so the embedded payoff is
/// the average over the two assignments. The embedded game always admits a
/// symmetric efficient profile.
pub fn symmetrize(row_payoff: &Matrix, col_payoff: &Matrix) -> Result<SymmetricGame> {
    if row_payoff.rows() != col_payoff.rows() || row_payoff.cols() != col_payoff.cols() {
        return Err(Error::Dimension {
            expected: row_payoff.rows() * row_payoff.cols(),
            got: col_payoff.rows() * col_payoff.cols(),
        });
    }
    let m1 = row_payoff.rows();
    let m2 = row_payoff.cols();
    let half = Scalar::ratio(1, 2);
    let actions: Vec<String> = (0..m1)
        .flat_map(|r| (0..m2).map(move |c| format!("r{r}c{c}")))
        .collect();
    let payoff = Matrix::from_fn(m1 * m2, m1 * m2, |own, other| {
        let (r, c) = (own / m2, own % m2);
        let (r2, c2) = (other / m2, other % m2);
        (row_payoff.get(r, c2) + col_payoff.get(r2, c)) * half.clone()
    });
    SymmetricGame::new(actions, payoff)
}

/// A point on the action simplex: nonnegative weights summing to one.
/// Stored normalized; exact inputs stay exact.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixedStrategy(Vec<Scalar>);

impl MixedStrategy {
    pub fn new(weights: Vec<Scalar>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Input("empty strategy".into()));
        }
        if weights.iter().any(|w| *w < Scalar::zero()) {
            return Err(Error::Input("negative strategy weight".into()));
        }
        let total: Scalar = weights.iter().cloned().sum();
        if total.is_zero() || (total.clone() - Scalar::one()).abs() > Scalar::approx(1e-6) {
            // Anything within rounding of a distribution is renormalized;
            // wildly off-simplex input is an error.
            if total.is_zero() {
                return Err(Error::Input("strategy weights sum to zero".into()));
            }
        }
        let normalized = weights.into_iter().map(|w| w / total.clone()).collect();
        Ok(MixedStrategy(normalized))
    }

    pub fn pure(action: ActionId, m: usize) -> Self {
        let mut w = vec![Scalar::zero(); m];
        w[action] = Scalar::one();
        MixedStrategy(w)
    }

    pub fn uniform(m: usize) -> Self {
        MixedStrategy(vec![Scalar::ratio(1, m as i64); m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weights(&self) -> &[Scalar] {
        &self.0
    }

    pub fn weight(&self, a: ActionId) -> &Scalar {
        &self.0[a]
    }

    pub fn support(&self) -> Vec<ActionId> {
        (0..self.len()).filter(|&a| !self.0[a].is_zero()).collect()
    }

    /// The pure action carried by a degenerate strategy, if any.
    pub fn as_pure(&self) -> Option<ActionId> {
        let sup = self.support();
        (sup.len() == 1).then(|| sup[0])
    }

    pub fn is_exact(&self) -> bool {
        self.0.iter().all(Scalar::is_exact)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EfficiencyReport {
    pub efficient_payoff: Scalar,
    pub efficient_profiles: Vec<(ActionId, ActionId)>,
    pub symmetric_efficient_actions: Vec<ActionId>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxminReport {
    pub maxmin: Scalar,
    pub maxmin_action: ActionId,
    pub minmax: Scalar,
    pub minmax_action: ActionId,
}

#[derive(Clone, Debug, Serialize)]
pub struct GameDiagnostics {
    pub efficiency: EfficiencyReport,
    pub deviation_gains: Vec<Scalar>,
    pub punishment_actions: Vec<ActionId>,
    pub generic: bool,
    pub maxmin: MaxminReport,
}

/// Is `(a, a)` a strict Nash equilibrium of the fitness game?
pub fn is_strict_symmetric_nash(game: &SymmetricGame, a: ActionId) -> bool {
    let own = game.payoff_pure(a, a);
    (0..game.num_actions()).all(|b| b == a || game.payoff_pure(b, a) < own)
}

/// The standard prisoner's dilemma instance used in tests and examples:
/// cooperate/defect with payoffs (3, 0, 4, 1).
pub fn prisoners_dilemma() -> SymmetricGame {
    SymmetricGame::from_int_rows(&["C", "D"], &[&[3, 0], &[4, 1]]).expect("static game")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn payoff_bilinear_form() {
        let rps = SymmetricGame::rock_paper_scissors();
        let p = MixedStrategy::pure(1, 3);
        let r = MixedStrategy::pure(0, 3);
        assert_eq!(rps.payoff(&p, &r).unwrap(), s(1));

        // Uniform against uniform in RPS: mean of the matrix entries = 0.
        let u = MixedStrategy::uniform(3);
        assert_eq!(rps.payoff(&u, &u).unwrap(), s(0));

        let pd = prisoners_dilemma();
        let half = MixedStrategy::new(vec![Scalar::ratio(1, 2), Scalar::ratio(1, 2)]).unwrap();
        let c = MixedStrategy::pure(0, 2);
        assert_eq!(pd.payoff(&half, &c).unwrap(), Scalar::ratio(7, 2));

        let wrong = MixedStrategy::pure(0, 2);
        assert!(rps.payoff(&wrong, &r).is_err());
    }

    #[test]
    fn deviation_gains() {
        let pd = prisoners_dilemma();
        assert_eq!(pd.deviation_gain(1).unwrap(), s(0)); // (D,D) is Nash
        assert_eq!(pd.deviation_gain(0).unwrap(), s(1)); // 4 - 3
        let rps = SymmetricGame::rock_paper_scissors();
        assert_eq!(rps.deviation_gain(0).unwrap(), s(1));
    }

    #[test]
    fn efficiency_reports() {
        let rps = SymmetricGame::rock_paper_scissors();
        let eff = rps.efficiency();
        assert_eq!(eff.efficient_payoff, s(0));
        assert_eq!(eff.efficient_profiles.len(), 9); // zero-sum: every profile

        let pd = prisoners_dilemma();
        let eff = pd.efficiency();
        assert_eq!(eff.efficient_payoff, s(3));
        assert_eq!(eff.efficient_profiles, vec![(0, 0)]);
        assert_eq!(eff.symmetric_efficient_actions, vec![0]);

        let hd = SymmetricGame::hawk_dove(&Scalar::ratio(1, 5), &Scalar::ratio(1, 2)).unwrap();
        let eff = hd.efficiency();
        assert_eq!(eff.efficient_payoff, s(1));
        assert_eq!(eff.symmetric_efficient_actions, vec![1]); // (D, D)
    }

    #[test]
    fn punishment_action_sets() {
        let pd = prisoners_dilemma();
        assert_eq!(pd.punishment_actions(), vec![1]); // defect: column max 1 < 3

        let rps = SymmetricGame::rock_paper_scissors();
        assert!(rps.punishment_actions().is_empty()); // column maxima 1 > 0

        // Common-interest game with a Pareto-dominant profile: the dominant
        // action punishes because no reply against it reaches the optimum.
        let ci = SymmetricGame::from_int_rows(&["a", "b"], &[&[5, 0], &[1, 2]]).unwrap();
        assert_eq!(ci.punishment_actions(), vec![1]);
    }

    #[test]
    fn genericity() {
        let tol = Scalar::zero();
        assert!(!SymmetricGame::rock_paper_scissors().is_generic(&tol));
        assert!(prisoners_dilemma().is_generic(&tol));
        // Two equal diagonal entries break the first clause.
        let tied = SymmetricGame::from_int_rows(&["a", "b"], &[&[1, 2], &[3, 1]]).unwrap();
        assert!(!tied.is_generic(&tol));
        // Monotone in tol: generic at a larger tol implies generic at smaller.
        let pd = prisoners_dilemma();
        assert!(pd.is_generic(&Scalar::ratio(1, 2)));
        assert!(pd.is_generic(&Scalar::ratio(1, 10)));
    }

    #[test]
    fn maxmin_minmax_values() {
        let rps = SymmetricGame::rock_paper_scissors();
        let mm = rps.maxmin_minmax();
        assert_eq!(mm.maxmin, s(-1));
        assert_eq!(mm.minmax, s(1));
        assert_eq!(mm.maxmin_action, 0); // lowest index among ties

        let pd = prisoners_dilemma();
        let mm = pd.maxmin_minmax();
        assert_eq!(mm.maxmin, s(1));
        assert_eq!(mm.maxmin_action, 1);
        assert_eq!(mm.minmax, s(1));
        assert_eq!(mm.minmax_action, 1);

        let flat = SymmetricGame::from_int_rows(&["a", "b"], &[&[2, 2], &[2, 2]]).unwrap();
        let mm = flat.maxmin_minmax();
        assert_eq!(mm.maxmin, s(2));
        assert_eq!(mm.minmax, s(2));
    }

    #[test]
    fn symmetrization() {
        // Symmetric input embedded both ways: diagonal payoff of the pair
        // action (a, a') equals the average of the two original payoffs.
        let pd = prisoners_dilemma();
        let row = pd.payoff_matrix().clone();
        let col = row.transpose();
        let embedded = symmetrize(&row, &col).unwrap();
        // action "r0c1" = play C as row, D as column; its self-play payoff
        // should be (π(C,D)+π(D,C))/2 = 2.
        let idx = embedded.action_by_label("r0c1").unwrap();
        assert_eq!(embedded.payoff_pure(idx, idx), &s(2));

        // Battle-of-the-sexes style asymmetric game: the embedding admits a
        // symmetric efficient profile even though the original does not.
        let a = Matrix::from_rows(vec![vec![s(3), s(0)], vec![s(0), s(2)]]).unwrap();
        let b = Matrix::from_rows(vec![vec![s(2), s(0)], vec![s(0), s(3)]]).unwrap();
        let emb = symmetrize(&a, &b).unwrap();
        assert!(!emb.efficiency().symmetric_efficient_actions.is_empty());
    }

    #[test]
    fn strategy_validation() {
        assert!(MixedStrategy::new(vec![s(-1), s(2)]).is_err());
        assert!(MixedStrategy::new(vec![]).is_err());
        let half = MixedStrategy::new(vec![s(1), s(1)]).unwrap();
        assert_eq!(half.weight(0), &Scalar::ratio(1, 2));
        assert_eq!(MixedStrategy::pure(1, 3).as_pure(), Some(1));
        assert_eq!(MixedStrategy::uniform(2).as_pure(), None);
    }

    #[test]
    fn strict_nash_detection() {
        let pd = prisoners_dilemma();
        assert!(is_strict_symmetric_nash(&pd, 1));
        assert!(!is_strict_symmetric_nash(&pd, 0));
    }
}
