//! Subjective preferences and the equilibrium machinery built on them.
//!
//! A type couples a utility function with a cognitive level. Utilities come
//! in two flavours: *simple* utilities over action profiles, and
//! *discriminating* (type-interdependent) utilities that resolve to a
//! different payoff table depending on the opponent's identity. Simple
//! utilities embed into the discriminating world as the tables that ignore
//! the opponent's identity, so one code path serves both.
//!
//! The central sets:
//!
//! - `BR_u(σ')`: pure best replies to an opponent strategy;
//! - `Σ(u)`: undominated strategies — everything that is a best reply to at
//!   least *some* belief. A pure action fails this exactly when a mixture of
//!   the other actions strictly dominates it (the classic never-best-reply /
//!   strict-dominance equivalence for two-player games), which is what the
//!   dominance LP decides;
//! - `NE(u, u')`: mixed equilibria of the induced subjective game, found by
//!   support enumeration (exhaustive at desk scale, m ≤ 6);
//! - `DE(θ, θ')` and `FMDE(θ, θ')`: deception equilibria — the deceiver's
//!   favourite profiles subject to the victim playing something undominated —
//!   and the subset that also maximises the deceiver's *fitness*. Both are
//!   bilinear optimisations over a union of faces, so pure optimisers exist
//!   and enumeration over pure undominated actions is exhaustive.

use serde::Serialize;

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::game::{ActionId, MixedStrategy, SymmetricGame};
use crate::linalg::{solve_linear, Matrix};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::scalar::Scalar;

/// A subjective utility over action profiles, stored in a canonical affine
/// normalization: non-constant tables are rescaled to have minimum 0 and
/// maximum 1, constant tables collapse to all-zeros. Preferences are only
/// meaningful modulo positive affine maps, and the canonical form makes
/// equality of preferences decidable.
#[derive(Clone, Debug, PartialEq)]
pub struct UtilityFunction {
    matrix: Matrix,
}

impl UtilityFunction {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::Dimension {
                expected: matrix.rows(),
                got: matrix.cols(),
            });
        }
        if matrix.entries().any(|v| !v.to_f64().is_finite()) {
            return Err(Error::Input("utility entries must be finite".into()));
        }
        Ok(UtilityFunction {
            matrix: normalize(&matrix),
        })
    }

    /// Materialistic preferences: the utility *is* the fitness payoff.
    pub fn materialistic(game: &SymmetricGame) -> Self {
        UtilityFunction {
            matrix: normalize(game.payoff_matrix()),
        }
    }

    /// Complete indifference over all profiles.
    pub fn constant(m: usize) -> Self {
        UtilityFunction {
            matrix: Matrix::zeros(m, m),
        }
    }

    /// Preferences that make one action strictly dominant: payoff 1 for
    /// playing `a`, 0 otherwise, regardless of the opponent.
    pub fn dominant_action(a: ActionId, m: usize) -> Self {
        UtilityFunction {
            matrix: Matrix::from_fn(m, m, |i, _| {
                if i == a {
                    Scalar::one()
                } else {
                    Scalar::zero()
                }
            }),
        }
    }

    /// Pro-generous indifferent preferences: the player is indifferent among
    /// her own actions and cares only that the opponent play the generous
    /// action (worth `alpha`) or the second-best generous action (worth
    /// `beta`, with `alpha ≥ beta ≥ 0`). Deceivers with such preferences
    /// always admit a fitness-maximising deception equilibrium, which is why
    /// they serve as the universal mutant family in the refutation recipes.
    pub fn pro_generous(game: &SymmetricGame, alpha: &Scalar, beta: &Scalar) -> Result<Self> {
        if alpha < beta || *beta < Scalar::zero() {
            return Err(Error::Input(
                "pro-generous weights need alpha >= beta >= 0".into(),
            ));
        }
        let (a_g, a_g2) = generous_actions(game);
        let m = game.num_actions();
        let matrix = Matrix::from_fn(m, m, |_, j| {
            if j == a_g {
                alpha.clone()
            } else if j == a_g2 {
                beta.clone()
            } else {
                Scalar::zero()
            }
        });
        UtilityFunction::new(matrix)
    }

    /// The pure-convention enforcer used to certify pure stable
    /// configurations: every action except the convention `a_star` and the
    /// punishment action is strictly dominated, the punishment action weakly
    /// dominates the convention, and the convention is a best reply to
    /// itself (payoff pattern 1 / 0 / −1 before normalization).
    pub fn convention_enforcer(a_star: ActionId, punishment: ActionId, m: usize) -> Self {
        let table = Matrix::from_fn(m, m, |a, a_prime| {
            if a == punishment && a_prime != a_star {
                Scalar::one()
            } else if a == a_star || (a == punishment && a_prime == a_star) {
                Scalar::zero()
            } else {
                -Scalar::one()
            }
        });
        UtilityFunction {
            matrix: normalize(&table),
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn num_actions(&self) -> usize {
        self.matrix.rows()
    }

    pub fn value(&self, a: ActionId, against: ActionId) -> &Scalar {
        self.matrix.get(a, against)
    }

    /// Expected utility of pure action `a` against a mixed opponent.
    pub fn expected(&self, a: ActionId, sigma_prime: &MixedStrategy) -> Scalar {
        let mut acc = Scalar::zero();
        for (j, w) in sigma_prime.weights().iter().enumerate() {
            if !w.is_zero() {
                acc = acc + self.matrix.get(a, j) * w;
            }
        }
        acc
    }

    /// Bilinear subjective payoff `u(σ, σ')`.
    pub fn payoff(&self, sigma: &MixedStrategy, sigma_prime: &MixedStrategy) -> Scalar {
        self.matrix.bilinear(sigma.weights(), sigma_prime.weights())
    }

    pub fn is_constant(&self) -> bool {
        self.matrix.entries().all(Scalar::is_zero)
    }
}

fn normalize(matrix: &Matrix) -> Matrix {
    let min = matrix.min_entry().clone();
    let max = matrix.max_entry().clone();
    if min == max {
        return Matrix::zeros(matrix.rows(), matrix.cols());
    }
    let range = max - min.clone();
    matrix.map(|v| (v - &min) / range.clone())
}

/// A generous action is a column of the payoff matrix containing the global
/// maximum: if the opponent plays it, some reply reaches the best payoff in
/// the game. The second-best generous action plays the same role once the
/// generous column is excluded. Ties break toward the lowest index.
pub fn generous_actions(game: &SymmetricGame) -> (ActionId, ActionId) {
    let m = game.num_actions();
    let pay = game.payoff_matrix();
    let col_max = |j: usize| {
        (0..m)
            .map(|i| pay.get(i, j).clone())
            .max()
            .expect("nonempty")
    };
    let mut a_g = 0;
    let mut best = col_max(0);
    for j in 1..m {
        let v = col_max(j);
        if v > best {
            best = v;
            a_g = j;
        }
    }
    let mut a_g2 = usize::MAX;
    let mut best2: Option<Scalar> = None;
    for j in (0..m).filter(|&j| j != a_g) {
        let v = col_max(j);
        if best2.as_ref().is_none_or(|b| v > *b) {
            best2 = Some(v);
            a_g2 = j;
        }
    }
    (a_g, a_g2)
}

/// Identity of a type inside a declared label universe: a label plus a
/// cognitive level. Discriminating preferences reference these, never the
/// utility contents, which sidesteps the circularity of self-referential
/// preference spaces.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TypeRef {
    pub label: String,
    pub level: u32,
}

impl TypeRef {
    pub fn new(label: impl Into<String>, level: u32) -> Self {
        TypeRef {
            label: label.into(),
            level,
        }
    }
}

/// A type-interdependent utility: a finite decision table keyed by the
/// opponent's identity, with a mandatory fallback branch, so every
/// `(action, action, label)` triple resolves to exactly one value.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchUtility {
    pub branches: Vec<(TypeRef, UtilityFunction)>,
    pub otherwise: UtilityFunction,
}

impl BranchUtility {
    pub fn resolve(&self, opponent: &TypeRef) -> &UtilityFunction {
        self.branches
            .iter()
            .find(|(r, _)| r == opponent)
            .map(|(_, u)| u)
            .unwrap_or(&self.otherwise)
    }

    pub fn num_actions(&self) -> usize {
        self.otherwise.num_actions()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Preferences {
    Simple(UtilityFunction),
    Discriminating(BranchUtility),
}

/// A cognitive type: preferences plus a costly cognitive level (≥ 1).
///
/// The `name` doubles as the type's label in the declared universe. Two
/// simple types are the same type when their canonical utilities and levels
/// agree; discriminating types are identified by label and level.
#[derive(Clone, Debug)]
pub struct CognitiveType {
    pub name: String,
    pub level: u32,
    pub prefs: Preferences,
}

impl CognitiveType {
    pub fn simple(name: impl Into<String>, utility: UtilityFunction, level: u32) -> Result<Self> {
        if level < 1 {
            return Err(Error::Input("cognitive level must be >= 1".into()));
        }
        Ok(CognitiveType {
            name: name.into(),
            level,
            prefs: Preferences::Simple(utility),
        })
    }

    pub fn discriminating(
        name: impl Into<String>,
        utility: BranchUtility,
        level: u32,
    ) -> Result<Self> {
        if level < 1 {
            return Err(Error::Input("cognitive level must be >= 1".into()));
        }
        Ok(CognitiveType {
            name: name.into(),
            level,
            prefs: Preferences::Discriminating(utility),
        })
    }

    pub fn materialistic(name: impl Into<String>, game: &SymmetricGame, level: u32) -> Self {
        CognitiveType::simple(name, UtilityFunction::materialistic(game), level)
            .expect("level >= 1 checked by caller")
    }

    pub fn type_ref(&self) -> TypeRef {
        TypeRef::new(self.name.clone(), self.level)
    }

    pub fn num_actions(&self) -> usize {
        match &self.prefs {
            Preferences::Simple(u) => u.num_actions(),
            Preferences::Discriminating(b) => b.num_actions(),
        }
    }

    /// The utility table in force against a given opponent identity.
    pub fn utility_against(&self, opponent: &TypeRef) -> &UtilityFunction {
        match &self.prefs {
            Preferences::Simple(u) => u,
            Preferences::Discriminating(b) => b.resolve(opponent),
        }
    }

    /// The same type with every utility entry degraded to a float.
    pub fn degraded_to_float(&self) -> Result<CognitiveType> {
        let degrade = |u: &UtilityFunction| UtilityFunction::new(u.matrix().map(Scalar::degraded));
        let prefs = match &self.prefs {
            Preferences::Simple(u) => Preferences::Simple(degrade(u)?),
            Preferences::Discriminating(b) => Preferences::Discriminating(BranchUtility {
                branches: b
                    .branches
                    .iter()
                    .map(|(r, u)| Ok((r.clone(), degrade(u)?)))
                    .collect::<Result<Vec<_>>>()?,
                otherwise: degrade(&b.otherwise)?,
            }),
        };
        Ok(CognitiveType {
            name: self.name.clone(),
            level: self.level,
            prefs,
        })
    }

    /// Same type in the model's sense (identical preferences and level).
    pub fn same_type(&self, other: &CognitiveType) -> bool {
        if self.level != other.level {
            return false;
        }
        match (&self.prefs, &other.prefs) {
            (Preferences::Simple(a), Preferences::Simple(b)) => a == b,
            (Preferences::Discriminating(_), Preferences::Discriminating(_)) => {
                self.name == other.name
            }
            _ => false,
        }
    }
}

/// Pure best replies to `σ'` under utility `u`. The full best-reply set is
/// the simplex face spanned by these; only the pure generators are returned.
pub fn best_replies(u: &UtilityFunction, sigma_prime: &MixedStrategy, tol: &Scalar) -> Vec<ActionId> {
    let m = u.num_actions();
    assert_eq!(sigma_prime.len(), m, "strategy dimension mismatch");
    let values: Vec<Scalar> = (0..m).map(|a| u.expected(a, sigma_prime)).collect();
    let best = values.iter().max().expect("nonempty").clone();
    (0..m)
        .filter(|&a| (best.clone() - values[a].clone()) <= *tol)
        .collect()
}

/// Result of the dominance test: the pure generators of `Σ(u)` plus, in
/// float mode, the actions whose verdict sat within tolerance of the
/// boundary.
#[derive(Clone, Debug, Serialize)]
pub struct UndominatedSet {
    pub actions: Vec<ActionId>,
    pub boundary: Vec<ActionId>,
}

impl UndominatedSet {
    pub fn contains(&self, a: ActionId) -> bool {
        self.actions.contains(&a)
    }

    fn union(mut sets: Vec<UndominatedSet>) -> UndominatedSet {
        let mut actions: Vec<ActionId> = Vec::new();
        let mut boundary: Vec<ActionId> = Vec::new();
        for s in sets.drain(..) {
            for a in s.actions {
                if !actions.contains(&a) {
                    actions.push(a);
                }
            }
            for a in s.boundary {
                if !boundary.contains(&a) {
                    boundary.push(a);
                }
            }
        }
        actions.sort_unstable();
        boundary.sort_unstable();
        UndominatedSet { actions, boundary }
    }
}

/// Pure actions that are best replies to at least one belief.
///
/// Action `a` is *never* a best reply exactly when some mixture of the other
/// actions strictly dominates it; the LP below maximises the worst-case
/// domination slack `ε`, and `a` survives iff the optimum is ≤ 0. In exact
/// mode the boundary `ε = 0` (weak domination) is decided exactly and the
/// action survives.
pub fn undominated_pure_actions(u: &UtilityFunction) -> Result<UndominatedSet> {
    let m = u.num_actions();
    let exact = u.matrix().is_exact();
    let tol = if exact {
        Scalar::zero()
    } else {
        Scalar::approx(1e-9)
    };
    let mut actions = Vec::new();
    let mut boundary = Vec::new();
    for a in 0..m {
        if m == 1 {
            actions.push(a);
            continue;
        }
        let eps = domination_slack(u, a)?;
        if !exact && eps.abs() <= tol {
            boundary.push(a);
        }
        if eps <= tol {
            actions.push(a);
        }
    }
    Ok(UndominatedSet { actions, boundary })
}

/// Optimal value of: maximize ε subject to `y` a mixture over the actions
/// other than `a`, with `u(y, a'') ≥ u(a, a'') + ε` for every column `a''`.
///
/// Positive slack means `a` is strictly dominated by a mixture; negative
/// slack means `a` is a best reply on a region of beliefs with positive
/// measure; exactly zero is the weak-domination boundary, where `a` is a
/// best reply only on a lower-dimensional set of beliefs.
pub fn domination_slack(u: &UtilityFunction, a: ActionId) -> Result<Scalar> {
    let m = u.num_actions();
    let others: Vec<ActionId> = (0..m).filter(|&b| b != a).collect();
    // Variables: y_b for b in others, then ε⁺, ε⁻ (ε free).
    let n = others.len() + 2;
    let mut objective = vec![Scalar::zero(); n];
    objective[others.len()] = Scalar::one();
    objective[others.len() + 1] = -Scalar::one();
    let mut lp = LinearProgram::new(objective);
    for col in 0..m {
        let mut coeffs = vec![Scalar::zero(); n];
        for (k, &b) in others.iter().enumerate() {
            coeffs[k] = u.value(b, col).clone();
        }
        coeffs[others.len()] = -Scalar::one();
        coeffs[others.len() + 1] = Scalar::one();
        lp.constrain(coeffs, Relation::Ge, u.value(a, col).clone());
    }
    let mut simplex_row = vec![Scalar::zero(); n];
    simplex_row[..others.len()].fill(Scalar::one());
    lp.constrain(simplex_row, Relation::Eq, Scalar::one());
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => Ok(value),
        other => Err(Error::Lp(format!(
            "dominance test for action {a} did not reach an optimum: {other:?}"
        ))),
    }
}

/// Undominated pure actions of a type, as a union over the opponent
/// identities that the declared universe makes conceivable.
pub fn undominated_for_type(t: &CognitiveType, universe: &[TypeRef]) -> Result<UndominatedSet> {
    match &t.prefs {
        Preferences::Simple(u) => undominated_pure_actions(u),
        Preferences::Discriminating(b) => {
            let mut sets = Vec::new();
            for table in reachable_tables(b, universe) {
                sets.push(undominated_pure_actions(table)?);
            }
            Ok(UndominatedSet::union(sets))
        }
    }
}

/// All mixed equilibria of the bimatrix game induced by the two utilities,
/// found by support enumeration ordered by support size then lexicographic
/// masks. In degenerate games the equilibria form components; the returned
/// list then holds representatives and `component` is set.
#[derive(Clone, Debug)]
pub struct NashReport {
    pub equilibria: Vec<(MixedStrategy, MixedStrategy)>,
    pub component: bool,
}

pub fn nash_equilibria(u1: &UtilityFunction, u2: &UtilityFunction) -> Result<NashReport> {
    let m = u1.num_actions();
    if u2.num_actions() != m {
        return Err(Error::Dimension {
            expected: m,
            got: u2.num_actions(),
        });
    }
    let mut equilibria: Vec<(MixedStrategy, MixedStrategy)> = Vec::new();
    let mut component = false;
    let masks = support_masks(m);
    for s1 in &masks {
        for s2 in &masks {
            let Some(sigma2) = opponent_strategy_supporting(u1.matrix(), s1, s2) else {
                continue;
            };
            let Some(sigma1) = opponent_strategy_supporting(u2.matrix(), s2, s1) else {
                continue;
            };
            let pair = (
                MixedStrategy::new(sigma1)?,
                MixedStrategy::new(sigma2)?,
            );
            if !equilibria.contains(&pair) {
                component |= underdetermined_support(u1.matrix(), s1, s2)
                    || underdetermined_support(u2.matrix(), s2, s1);
                equilibria.push(pair);
            }
        }
    }
    if equilibria.is_empty() {
        return Err(Error::Lp(
            "support enumeration found no equilibrium; existence is guaranteed, \
             so this indicates numerical failure on float input"
                .into(),
        ));
    }
    Ok(NashReport {
        equilibria,
        component,
    })
}

/// Equilibria of the subjective game between two types, resolving
/// discriminating preferences against each other's identities.
pub fn nash_between(a: &CognitiveType, b: &CognitiveType) -> Result<NashReport> {
    nash_equilibria(a.utility_against(&b.type_ref()), b.utility_against(&a.type_ref()))
}

/// Support masks ordered by popcount then value: the canonical "first
/// equilibrium" for auto-completion is the one with the smallest supports.
fn support_masks(m: usize) -> Vec<Vec<usize>> {
    let mut masks: Vec<u32> = (1..(1u32 << m)).collect();
    masks.sort_by_key(|&mask| (mask.count_ones(), mask));
    masks
        .into_iter()
        .map(|mask| (0..m).filter(|&i| mask & (1 << i) != 0).collect())
        .collect()
}

/// Searches for an opponent strategy `y` supported exactly on `opp_support`
/// that makes every action in `own_support` a best reply (and optimal). The
/// inner LP maximises the minimum support weight, so a strategy is returned
/// only when one exists with the full declared support.
fn opponent_strategy_supporting(
    own_payoff: &Matrix,
    own_support: &[usize],
    opp_support: &[usize],
) -> Option<Vec<Scalar>> {
    let m = own_payoff.rows();
    let k = opp_support.len();
    // Variables: y_0..y_{k-1}, v⁺, v⁻, t.
    let n = k + 3;
    let mut objective = vec![Scalar::zero(); n];
    objective[k + 2] = Scalar::one();
    let mut lp = LinearProgram::new(objective);
    for i in 0..m {
        let mut coeffs = vec![Scalar::zero(); n];
        for (idx, &j) in opp_support.iter().enumerate() {
            coeffs[idx] = own_payoff.get(i, j).clone();
        }
        coeffs[k] = -Scalar::one();
        coeffs[k + 1] = Scalar::one();
        let relation = if own_support.contains(&i) {
            Relation::Eq
        } else {
            Relation::Le
        };
        lp.constrain(coeffs, relation, Scalar::zero());
    }
    let mut total = vec![Scalar::zero(); n];
    total[..k].fill(Scalar::one());
    lp.constrain(total, Relation::Eq, Scalar::one());
    for idx in 0..k {
        let mut coeffs = vec![Scalar::zero(); n];
        coeffs[idx] = Scalar::one();
        coeffs[k + 2] = -Scalar::one();
        lp.constrain(coeffs, Relation::Ge, Scalar::zero());
    }
    match lp.solve() {
        LpOutcome::Optimal { x, value } => {
            if value <= Scalar::zero() {
                return None; // only boundary solutions: support is actually smaller
            }
            let mut y = vec![Scalar::zero(); m];
            for (idx, &j) in opp_support.iter().enumerate() {
                y[j] = x[idx].clone();
            }
            Some(y)
        }
        _ => None,
    }
}

/// Is the indifference system for this support pair rank-deficient? A yes
/// means the equilibrium sits inside a positive-dimensional component.
fn underdetermined_support(own_payoff: &Matrix, own_support: &[usize], opp_support: &[usize]) -> bool {
    let k = opp_support.len();
    let rows = own_support.len().saturating_sub(1) + 1;
    let mut a = Matrix::zeros(rows, k);
    let mut b = vec![Scalar::zero(); rows];
    let first = own_support[0];
    for (r, &i) in own_support.iter().skip(1).enumerate() {
        for (c, &j) in opp_support.iter().enumerate() {
            a.set(r, c, own_payoff.get(i, j) - own_payoff.get(first, j));
        }
    }
    for c in 0..k {
        a.set(rows - 1, c, Scalar::one());
    }
    b[rows - 1] = Scalar::one();
    match solve_linear(&a, &b) {
        Some((_, free)) => free > 0,
        None => false,
    }
}

/// Verifies mutual best replies within `tol`; returns the largest violation.
pub fn nash_violation(
    u1: &UtilityFunction,
    u2: &UtilityFunction,
    sigma1: &MixedStrategy,
    sigma2: &MixedStrategy,
) -> Scalar {
    let dev1 = best_deviation_gain(u1, sigma1, sigma2);
    let dev2 = best_deviation_gain(u2, sigma2, sigma1);
    dev1.max(dev2)
}

fn best_deviation_gain(
    u: &UtilityFunction,
    own: &MixedStrategy,
    opp: &MixedStrategy,
) -> Scalar {
    let current = u.payoff(own, opp);
    let best = (0..u.num_actions())
        .map(|a| u.expected(a, opp))
        .max()
        .expect("nonempty");
    best - current
}

/// Can `σ'` be induced by some belief? True iff all support actions are
/// simultaneously best replies to a common belief about the opponent.
pub fn in_undominated_set(u: &UtilityFunction, sigma_prime: &MixedStrategy) -> Result<bool> {
    let m = u.num_actions();
    let support = sigma_prime.support();
    if support.is_empty() {
        return Ok(false);
    }
    // Feasibility LP over beliefs y: for each a in support and each b,
    // u(a, y) ≥ u(b, y).
    let mut lp = LinearProgram::new(vec![Scalar::zero(); m]);
    for &a in &support {
        for b in 0..m {
            if b == a {
                continue;
            }
            let coeffs: Vec<Scalar> = (0..m)
                .map(|k| u.value(a, k) - u.value(b, k))
                .collect();
            lp.constrain(coeffs, Relation::Ge, Scalar::zero());
        }
    }
    lp.constrain(vec![Scalar::one(); m], Relation::Eq, Scalar::one());
    Ok(matches!(lp.solve(), LpOutcome::Optimal { .. }))
}

/// The deception equilibria of a higher type against a lower one: all pure
/// profiles maximising the deceiver's subjective utility over own actions ×
/// the victim's undominated pure actions, together with the optimal value
/// and the feasible action set used.
#[derive(Clone, Debug)]
pub struct DeceptionOutcome {
    pub profiles: Vec<(ActionId, ActionId)>,
    pub value: Scalar,
    pub feasible: Vec<ActionId>,
}

pub fn deception_equilibria(
    env: &Environment,
    deceiver: &CognitiveType,
    deceived: &CognitiveType,
    universe: &[TypeRef],
) -> Result<DeceptionOutcome> {
    if deceiver.level <= deceived.level {
        return Err(Error::Precondition(format!(
            "deceiver level {} must exceed deceived level {}",
            deceiver.level, deceived.level
        )));
    }
    let m = env.game().num_actions();
    if deceiver.num_actions() != m || deceived.num_actions() != m {
        return Err(Error::Dimension {
            expected: m,
            got: deceiver.num_actions().max(deceived.num_actions()),
        });
    }
    let feasible = undominated_for_type(deceived, universe)?.actions;
    let u = deceiver.utility_against(&deceived.type_ref());
    let mut value: Option<Scalar> = None;
    for &a_prime in &feasible {
        for a in 0..m {
            let v = u.value(a, a_prime);
            if value.as_ref().is_none_or(|best| v > best) {
                value = Some(v.clone());
            }
        }
    }
    let value = value.ok_or_else(|| Error::Lp("empty undominated set".into()))?;
    let mut profiles = Vec::new();
    for a in 0..m {
        for &a_prime in &feasible {
            if *u.value(a, a_prime) == value {
                profiles.push((a, a_prime));
            }
        }
    }
    Ok(DeceptionOutcome {
        profiles,
        value,
        feasible,
    })
}

/// Fitness-maximising deception equilibria: the profiles that maximise the
/// deceiver's *fitness* over the same feasible set and are also deception
/// equilibria. May be empty when no fitness maximiser is subjectively
/// optimal.
#[derive(Clone, Debug)]
pub struct FmdeOutcome {
    pub profiles: Vec<(ActionId, ActionId)>,
    pub fitness: Scalar,
    pub de_value: Scalar,
}

pub fn fmde(
    env: &Environment,
    deceiver: &CognitiveType,
    deceived: &CognitiveType,
    universe: &[TypeRef],
) -> Result<FmdeOutcome> {
    let de = deception_equilibria(env, deceiver, deceived, universe)?;
    let game = env.game();
    let m = game.num_actions();
    let u = deceiver.utility_against(&deceived.type_ref());
    let mut fitness: Option<Scalar> = None;
    for &a_prime in &de.feasible {
        for a in 0..m {
            let v = game.payoff_pure(a, a_prime);
            if fitness.as_ref().is_none_or(|best| v > best) {
                fitness = Some(v.clone());
            }
        }
    }
    let fitness = fitness.expect("nonempty feasible set");
    let profiles = de
        .feasible
        .iter()
        .flat_map(|&a_prime| (0..m).map(move |a| (a, a_prime)))
        .filter(|&(a, a_prime)| {
            *game.payoff_pure(a, a_prime) == fitness && *u.value(a, a_prime) == de.value
        })
        .collect();
    Ok(FmdeOutcome {
        profiles,
        fitness,
        de_value: de.value,
    })
}

/// Verdict of a deception-equilibrium membership test.
#[derive(Clone, Debug)]
pub enum DeMembership {
    /// The victim's strategy cannot be induced by any belief.
    NotInducible,
    /// Gap between the deception value and the profile's subjective payoff
    /// for the deceiver (≤ tol means the profile is a deception equilibrium).
    ValueGap(Scalar),
}

/// Membership check for a (possibly mixed) profile in `DE(θ, θ')`: the
/// victim's strategy must be inducible by some belief, and the deceiver's
/// subjective payoff must attain the deception value.
pub fn de_membership(
    env: &Environment,
    deceiver: &CognitiveType,
    deceived: &CognitiveType,
    deceiver_play: &MixedStrategy,
    deceived_play: &MixedStrategy,
    universe: &[TypeRef],
) -> Result<DeMembership> {
    let de = deception_equilibria(env, deceiver, deceived, universe)?;
    let inducible = match &deceived.prefs {
        Preferences::Simple(uv) => in_undominated_set(uv, deceived_play)?,
        Preferences::Discriminating(b) => {
            // A discriminating victim may be deceived about the opponent's
            // identity too, so any conceivable branch can license the play.
            let mut ok = false;
            for table in reachable_tables(b, universe) {
                if in_undominated_set(table, deceived_play)? {
                    ok = true;
                    break;
                }
            }
            ok
        }
    };
    if !inducible {
        return Ok(DeMembership::NotInducible);
    }
    let u = deceiver.utility_against(&deceived.type_ref());
    Ok(DeMembership::ValueGap(
        de.value.clone() - u.payoff(deceiver_play, deceived_play),
    ))
}

/// The branch tables an opponent drawn from `universe` can activate.
fn reachable_tables<'a>(b: &'a BranchUtility, universe: &[TypeRef]) -> Vec<&'a UtilityFunction> {
    let mut tables = Vec::new();
    let mut any = false;
    for (r, u) in &b.branches {
        if universe.contains(r) {
            any = true;
            tables.push(u);
        }
    }
    let otherwise_reachable = universe
        .iter()
        .any(|r| !b.branches.iter().any(|(br, _)| br == r));
    if otherwise_reachable || !any {
        tables.push(&b.otherwise);
    }
    tables
}

/// Symmetric Nash equilibria (σ, σ) of a symmetric payoff matrix, by single
/// support enumeration. Used for stability candidates.
pub fn symmetric_nash(payoff: &Matrix) -> Vec<MixedStrategy> {
    let m = payoff.rows();
    let mut found = Vec::new();
    for support in support_masks(m) {
        if let Some(x) = opponent_strategy_supporting(payoff, &support, &support) {
            let sigma = MixedStrategy::new(x).expect("LP output is a distribution");
            if !found.contains(&sigma) {
                found.push(sigma);
            }
        }
    }
    found
}
