//! A small dense two-phase simplex over [`Scalar`].
//!
//! Used for the never-best-reply / strict-dominance test and for the support
//! feasibility subproblems of Nash enumeration. Problems here have at most a
//! few dozen variables, so a plain tableau with Bland's rule is the right
//! tool: with exact rational data it terminates and decides boundary cases
//! (optimal value exactly zero) without any epsilon fudging.

#![allow(clippy::needless_range_loop)] // indexed math over parallel arrays

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Scalar>,
    pub relation: Relation,
    pub rhs: Scalar,
}

/// Maximize `objective · x` subject to the constraints, `x ≥ 0`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: Vec<Scalar>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal { x: Vec<Scalar>, value: Scalar },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(objective: Vec<Scalar>) -> Self {
        LinearProgram {
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn constrain(&mut self, coeffs: Vec<Scalar>, relation: Relation, rhs: Scalar) {
        debug_assert_eq!(coeffs.len(), self.objective.len());
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).solve()
    }
}

struct Tableau {
    n_struct: usize,
    n_total: usize,
    rows: Vec<Vec<Scalar>>, // each row has n_total coefficient entries + rhs
    basis: Vec<usize>,
    artificial_start: usize,
    objective: Vec<Scalar>,
    tol: Scalar,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let n_struct = lp.objective.len();
        let m = lp.constraints.len();
        let exact = lp.objective.iter().all(Scalar::is_exact)
            && lp
                .constraints
                .iter()
                .all(|c| c.rhs.is_exact() && c.coeffs.iter().all(Scalar::is_exact));
        let tol = if exact {
            Scalar::zero()
        } else {
            Scalar::approx(1e-9)
        };

        // Count extra columns: one slack/surplus per inequality, one
        // artificial per Ge/Eq (after sign normalization).
        let mut relations = Vec::with_capacity(m);
        let mut coeff_rows = Vec::with_capacity(m);
        let mut rhss = Vec::with_capacity(m);
        for c in &lp.constraints {
            let (coeffs, rel, rhs) = if c.rhs < Scalar::zero() {
                let flipped = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (
                    c.coeffs.iter().map(|v| -v).collect::<Vec<_>>(),
                    flipped,
                    -c.rhs.clone(),
                )
            } else {
                (c.coeffs.clone(), c.relation, c.rhs.clone())
            };
            relations.push(rel);
            coeff_rows.push(coeffs);
            rhss.push(rhs);
        }
        let n_slack = relations
            .iter()
            .filter(|r| matches!(r, Relation::Le | Relation::Ge))
            .count();
        let n_art = relations
            .iter()
            .filter(|r| matches!(r, Relation::Ge | Relation::Eq))
            .count();
        let artificial_start = n_struct + n_slack;
        let n_total = artificial_start + n_art;

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut slack_idx = n_struct;
        let mut art_idx = artificial_start;
        for i in 0..m {
            let mut row = vec![Scalar::zero(); n_total + 1];
            row[..n_struct].clone_from_slice(&coeff_rows[i]);
            row[n_total] = rhss[i].clone();
            match relations[i] {
                Relation::Le => {
                    row[slack_idx] = Scalar::one();
                    basis.push(slack_idx);
                    slack_idx += 1;
                }
                Relation::Ge => {
                    row[slack_idx] = -Scalar::one();
                    slack_idx += 1;
                    row[art_idx] = Scalar::one();
                    basis.push(art_idx);
                    art_idx += 1;
                }
                Relation::Eq => {
                    row[art_idx] = Scalar::one();
                    basis.push(art_idx);
                    art_idx += 1;
                }
            }
            rows.push(row);
        }

        Tableau {
            n_struct,
            n_total,
            rows,
            basis,
            artificial_start,
            objective: lp.objective.clone(),
            tol,
        }
    }

    fn solve(mut self) -> LpOutcome {
        let m = self.rows.len();
        if self.artificial_start < self.n_total {
            // Phase 1: maximize minus the sum of artificials.
            let mut phase1 = vec![Scalar::zero(); self.n_total];
            for j in self.artificial_start..self.n_total {
                phase1[j] = -Scalar::one();
            }
            match self.optimize(&phase1, self.n_total) {
                PivotResult::Optimal(value) => {
                    if value < -self.tol.clone() {
                        return LpOutcome::Infeasible;
                    }
                }
                PivotResult::Unbounded => unreachable!("phase 1 objective is bounded"),
            }
            // Pivot lingering artificials out of the basis where possible.
            for i in 0..m {
                if self.basis[i] >= self.artificial_start {
                    if let Some(j) = (0..self.artificial_start)
                        .find(|&j| self.rows[i][j].abs() > self.tol)
                    {
                        self.pivot(i, j);
                    }
                }
            }
        }
        // Phase 2 on the structural objective; artificials are barred.
        let mut full = vec![Scalar::zero(); self.n_total];
        full[..self.n_struct].clone_from_slice(&self.objective);
        match self.optimize(&full, self.artificial_start) {
            PivotResult::Optimal(value) => {
                let mut x = vec![Scalar::zero(); self.n_struct];
                for i in 0..m {
                    if self.basis[i] < self.n_struct {
                        x[self.basis[i]] = self.rows[i][self.n_total].clone();
                    }
                }
                LpOutcome::Optimal { x, value }
            }
            PivotResult::Unbounded => LpOutcome::Unbounded,
        }
    }

    /// Runs simplex iterations for the given cost vector, allowing entering
    /// columns only below `col_limit`. Returns the optimal objective value.
    fn optimize(&mut self, cost: &[Scalar], col_limit: usize) -> PivotResult {
        loop {
            let reduced = self.reduced_costs(cost);
            // Bland's rule: smallest-index improving column.
            let entering = (0..col_limit).find(|&j| reduced[j] > self.tol);
            let Some(j) = entering else {
                let value = self.objective_value(cost);
                return PivotResult::Optimal(value);
            };
            // Ratio test, ties broken by smallest basis variable index.
            let mut best: Option<(usize, Scalar)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][j];
                if *a > self.tol {
                    let ratio = &self.rows[i][self.n_total] / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br
                                || (ratio == br && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((i, _)) = best else {
                return PivotResult::Unbounded;
            };
            self.pivot(i, j);
        }
    }

    /// Reduced cost of column j: `c_j − c_B · B⁻¹ A_j` (positive = improving).
    fn reduced_costs(&self, cost: &[Scalar]) -> Vec<Scalar> {
        let mut reduced = cost.to_vec();
        for i in 0..self.rows.len() {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..self.n_total {
                if !self.rows[i][j].is_zero() {
                    reduced[j] = reduced[j].clone() - cb * &self.rows[i][j];
                }
            }
        }
        reduced
    }

    fn objective_value(&self, cost: &[Scalar]) -> Scalar {
        let mut v = Scalar::zero();
        for i in 0..self.rows.len() {
            let cb = &cost[self.basis[i]];
            if !cb.is_zero() {
                v = v + cb * &self.rows[i][self.n_total];
            }
        }
        v
    }

    fn pivot(&mut self, pivot_row: usize, pivot_col: usize) {
        let inv = self.rows[pivot_row][pivot_col].recip();
        for j in 0..=self.n_total {
            let v = &self.rows[pivot_row][j] * &inv;
            self.rows[pivot_row][j] = v;
        }
        for i in 0..self.rows.len() {
            if i == pivot_row || self.rows[i][pivot_col].is_zero() {
                continue;
            }
            let factor = self.rows[i][pivot_col].clone();
            for j in 0..=self.n_total {
                let v = &self.rows[i][j] - &(factor.clone() * self.rows[pivot_row][j].clone());
                self.rows[i][j] = v;
            }
        }
        self.basis[pivot_row] = pivot_col;
    }
}

enum PivotResult {
    Optimal(Scalar),
    Unbounded,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn maximizes_simple_polytope() {
        // max x + y s.t. x + 2y <= 4, 3x + y <= 6
        let mut lp = LinearProgram::new(vec![s(1), s(1)]);
        lp.constrain(vec![s(1), s(2)], Relation::Le, s(4));
        lp.constrain(vec![s(3), s(1)], Relation::Le, s(6));
        match lp.solve() {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, Scalar::ratio(14, 5));
                assert_eq!(x, vec![Scalar::ratio(8, 5), Scalar::ratio(6, 5)]);
            }
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn handles_equalities_and_ge() {
        // max x s.t. x + y = 1, x >= 1/2  ->  x = 1
        let mut lp = LinearProgram::new(vec![s(1), s(0)]);
        lp.constrain(vec![s(1), s(1)], Relation::Eq, s(1));
        lp.constrain(vec![s(1), s(0)], Relation::Ge, Scalar::ratio(1, 2));
        match lp.solve() {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, s(1));
                assert_eq!(x[0], s(1));
            }
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn detects_infeasible() {
        let mut lp = LinearProgram::new(vec![s(0)]);
        lp.constrain(vec![s(1)], Relation::Ge, s(2));
        lp.constrain(vec![s(1)], Relation::Le, s(1));
        assert!(matches!(lp.solve(), LpOutcome::Infeasible));
    }

    #[test]
    fn detects_unbounded() {
        let mut lp = LinearProgram::new(vec![s(1)]);
        lp.constrain(vec![s(-1)], Relation::Le, s(1));
        assert!(matches!(lp.solve(), LpOutcome::Unbounded));
    }

    #[test]
    fn exact_boundary_optimum() {
        // max e s.t. e <= 0 stays exactly 0 (the dominance test boundary).
        let mut lp = LinearProgram::new(vec![s(1)]);
        lp.constrain(vec![s(1)], Relation::Le, s(0));
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert!(value.is_zero()),
            other => panic!("expected optimum, got {other:?}"),
        }
    }
}
