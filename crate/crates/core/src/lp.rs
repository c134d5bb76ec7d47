//! Exact linear programming over rationals.
//!
//! [`maximize`] is a dense two-phase tableau simplex using Bland's rule
//! (lowest-index entering variable, lowest-index leaving variable among
//! ratio ties), which cannot cycle. Problem sizes here are a handful of
//! columns, so the dense tableau is fine.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::rational::Rational;

/// Which opponent's deviation a constraint row guards against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RowLabel {
    /// Full-game player index (`1..=n`).
    pub opponent: usize,
    /// The alternative action `y'_j`.
    pub deviation: usize,
}

/// `maximize objective·q` subject to `rows·q <= 0`, `Σq = 1`, `q >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub rows: Vec<Vec<Rational>>,
    pub labels: Vec<RowLabel>,
}

impl LinearProgram {
    pub fn columns(&self) -> usize {
        self.objective.len()
    }

    pub fn value(&self, q: &[Rational]) -> Rational {
        dot(&self.objective, q)
    }

    /// `rows·q`, one entry per row.
    pub fn row_values(&self, q: &[Rational]) -> Vec<Rational> {
        self.rows.iter().map(|r| dot(r, q)).collect()
    }

    /// Exact feasibility of `q` (simplex membership and every row `<= 0`).
    pub fn is_feasible(&self, q: &[Rational]) -> bool {
        q.len() == self.columns()
            && q.iter().all(|x| !x.is_negative())
            && q.iter().sum::<Rational>().is_one()
            && self.row_values(q).iter().all(|v| !v.is_positive())
    }

    /// Column `k` of the constraint matrix.
    pub fn column(&self, k: usize) -> Vec<Rational> {
        self.rows.iter().map(|r| r[k].clone()).collect()
    }

    /// Same program with extra equality/inequality data, as a general problem.
    pub(crate) fn to_problem(&self) -> Problem {
        Problem {
            objective: self.objective.clone(),
            a_ub: self.rows.clone(),
            b_ub: vec![Rational::zero(); self.rows.len()],
            a_eq: vec![vec![Rational::one(); self.columns()]],
            b_eq: vec![Rational::one()],
        }
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `maximize objective·x` s.t. `a_ub·x <= b_ub`, `a_eq·x = b_eq`, `x >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub objective: Vec<Rational>,
    pub a_ub: Vec<Vec<Rational>>,
    pub b_ub: Vec<Rational>,
    pub a_eq: Vec<Vec<Rational>>,
    pub b_eq: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

struct Tableau {
    // rows x (vars + 1); the last column is the right-hand side
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    vars: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.t[i][self.vars]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col].clone();
        for v in self.t[row].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let f = r[col].clone();
            for (v, pv) in r.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Reduced costs `c_j - c_B·B⁻¹A_j` for the current basis.
    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        (0..self.vars)
            .map(|j| {
                let mut r = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.t[i][j].is_zero() {
                        r -= &cost[b] * &self.t[i][j];
                    }
                }
                r
            })
            .collect()
    }

    /// Primal simplex with Bland's rule over the columns allowed by `allowed`.
    /// Returns `false` if the objective is unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: &dyn Fn(usize) -> bool) -> bool {
        loop {
            let rc = self.reduced_costs(cost);
            let Some(enter) = (0..self.vars).find(|&j| allowed(j) && rc[j].is_positive()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, enter),
                None => return false,
            }
        }
    }

    fn solution(&self, n: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.rhs(i).clone();
            }
        }
        x
    }
}

/// Solves `problem` exactly.
pub fn maximize(problem: &Problem) -> Outcome {
    let n = problem.objective.len();
    let m_ub = problem.a_ub.len();
    let m_eq = problem.a_eq.len();
    let m = m_ub + m_eq;

    // Columns: originals, one slack per inequality, then artificials.
    let needs_art: Vec<bool> = (0..m)
        .map(|i| if i < m_ub { problem.b_ub[i].is_negative() } else { true })
        .collect();
    let n_art = needs_art.iter().filter(|&&b| b).count();
    let vars = n + m_ub + n_art;
    let first_art = n + m_ub;

    let mut t = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_art = first_art;
    for i in 0..m {
        let mut row = vec![Rational::zero(); vars + 1];
        let (coeffs, b) = if i < m_ub {
            (&problem.a_ub[i], &problem.b_ub[i])
        } else {
            (&problem.a_eq[i - m_ub], &problem.b_eq[i - m_ub])
        };
        row[..n].clone_from_slice(coeffs);
        if i < m_ub {
            row[n + i] = Rational::one();
        }
        row[vars] = b.clone();
        if b.is_negative() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
        }
        if needs_art[i] {
            row[next_art] = Rational::one();
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(n + i);
        }
        t.push(row);
    }
    let mut tab = Tableau { t, basis, vars };

    if n_art > 0 {
        let mut phase1 = vec![Rational::zero(); vars];
        for c in phase1.iter_mut().skip(first_art) {
            *c = -Rational::one();
        }
        tab.optimize(&phase1, &|_| true);
        let infeasibility: Rational = tab
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b >= first_art)
            .map(|(i, _)| tab.rhs(i).clone())
            .sum();
        if infeasibility.is_positive() {
            return Outcome::Infeasible;
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.t.len() {
            if tab.basis[i] >= first_art {
                match (0..first_art).find(|&j| !tab.t[i][j].is_zero()) {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.t.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut cost = vec![Rational::zero(); vars];
    cost[..n].clone_from_slice(&problem.objective);
    if !tab.optimize(&cost, &|j| j < first_art) {
        return Outcome::Unbounded;
    }
    let x = tab.solution(n);
    let value = dot(&problem.objective, &x);
    Outcome::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let p = Problem {
            objective: ints(&[3, 5]),
            a_ub: vec![ints(&[1, 0]), ints(&[0, 2]), ints(&[3, 2])],
            b_ub: ints(&[4, 12, 18]),
            a_eq: vec![],
            b_eq: vec![],
        };
        assert_eq!(maximize(&p), Outcome::Optimal { x: ints(&[2, 6]), value: int(36) });
    }

    #[test]
    fn needs_phase_one() {
        // max -x - y, x + y >= 2 (as -x - y <= -2), x - y = 1 -> (3/2, 1/2)
        let p = Problem {
            objective: ints(&[-1, -1]),
            a_ub: vec![ints(&[-1, -1])],
            b_ub: ints(&[-2]),
            a_eq: vec![ints(&[1, -1])],
            b_eq: ints(&[1]),
        };
        assert_eq!(
            maximize(&p),
            Outcome::Optimal { x: vec![frac(3, 2), frac(1, 2)], value: int(-2) }
        );
    }

    #[test]
    fn infeasible_and_unbounded() {
        let infeasible = Problem {
            objective: ints(&[1]),
            a_ub: vec![ints(&[1])],
            b_ub: ints(&[1]),
            a_eq: vec![ints(&[1])],
            b_eq: ints(&[2]),
        };
        assert_eq!(maximize(&infeasible), Outcome::Infeasible);
        let unbounded = Problem {
            objective: ints(&[1, 0]),
            a_ub: vec![ints(&[-1, 1])],
            b_ub: ints(&[0]),
            a_eq: vec![],
            b_eq: vec![],
        };
        assert_eq!(maximize(&unbounded), Outcome::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let p = Problem {
            objective: ints(&[1, 2]),
            a_ub: vec![],
            b_ub: vec![],
            a_eq: vec![ints(&[1, 1]), ints(&[2, 2])],
            b_eq: ints(&[1, 2]),
        };
        assert_eq!(maximize(&p), Outcome::Optimal { x: ints(&[0, 1]), value: int(2) });
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example, which cycles under the largest-coefficient rule.
        let p = Problem {
            objective: vec![frac(3, 4), int(-20), frac(1, 2), int(-6)],
            a_ub: vec![
                vec![frac(1, 4), int(-8), int(-1), int(9)],
                vec![frac(1, 2), int(-12), frac(-1, 2), int(3)],
                ints(&[0, 0, 1, 0]),
            ],
            b_ub: ints(&[0, 0, 1]),
            a_eq: vec![],
            b_eq: vec![],
        };
        match maximize(&p) {
            Outcome::Optimal { value, .. } => assert_eq!(value, frac(5, 4)),
            other => panic!("{other:?}"),
        }
    }
}
