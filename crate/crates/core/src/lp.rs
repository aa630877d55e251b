//! Exact rational linear programming.
//!
//! Dense two-phase simplex with Bland's rule. Problems are given as
//! `minimize cᵀx  s.t.  Ax ≤ b, x ≥ 0`. Arithmetic is carried out on
//! arbitrary-precision rationals and the answer converted back.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    pub objective: Vec<Rational>,
    pub rows: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<Rational>,
    pub objective: Rational,
}

impl LpProblem {
    pub fn new(num_vars: usize) -> Self {
        LpProblem {
            objective: vec![Rational::from_integer(0); num_vars],
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Adds `row · x ≤ rhs`.
    pub fn add_le(&mut self, row: Vec<Rational>, rhs: Rational) {
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    /// Adds `row · x ≥ rhs`.
    pub fn add_ge(&mut self, row: Vec<Rational>, rhs: Rational) {
        self.rows.push(row.into_iter().map(|v| -v).collect());
        self.rhs.push(-rhs);
    }

    /// Checks `x` against every constraint exactly.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && x.iter().all(|v| !v.is_negative())
            && self
                .rows
                .iter()
                .zip(&self.rhs)
                .all(|(row, b)| row.iter().zip(x).map(|(a, v)| a * v).sum::<Rational>() <= *b)
    }
}

fn big(r: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn small(r: &BigRational) -> Result<Rational> {
    match (r.numer().to_i128(), r.denom().to_i128()) {
        (Some(n), Some(d)) => Ok(Rational::new(n, d)),
        _ => Err(Error::Limit("LP solution does not fit 128-bit rationals".into())),
    }
}

struct Tableau {
    /// `m` constraint rows followed by the objective row; last column is the rhs.
    t: Vec<Vec<BigRational>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn m(&self) -> usize {
        self.basis.len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        for v in self.t[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs Bland's rule on the columns `allowed`. Returns false if unbounded.
    fn optimize(&mut self, allowed: &[bool]) -> bool {
        let m = self.m();
        let rhs = self.t[0].len() - 1;
        loop {
            let Some(c) = (0..rhs).find(|&j| allowed[j] && self.t[m][j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, BigRational)> = None;
            for i in 0..m {
                if !self.t[i][c].is_positive() {
                    continue;
                }
                let ratio = &self.t[i][rhs] / &self.t[i][c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

pub fn solve_lp(p: &LpProblem) -> Result<LpSolution> {
    let n = p.num_vars();
    let m = p.rows.len();
    if p.rhs.len() != m || p.rows.iter().any(|r| r.len() != n) {
        return Err(Error::Contract("LP dimensions do not match".into()));
    }
    let zero = BigRational::zero();
    let neg: Vec<usize> = (0..m).filter(|&i| p.rhs[i].is_negative()).collect();
    let k = neg.len();
    let cols = n + m + k;
    let mut t = vec![vec![zero.clone(); cols + 1]; m + 1];
    let mut basis = vec![0; m];
    let mut art = 0;
    for i in 0..m {
        let sign = if p.rhs[i].is_negative() { -BigRational::one() } else { BigRational::one() };
        for j in 0..n {
            t[i][j] = big(&p.rows[i][j]) * &sign;
        }
        t[i][n + i] = sign.clone();
        t[i][cols] = big(&p.rhs[i]) * &sign;
        if p.rhs[i].is_negative() {
            t[i][n + m + art] = BigRational::one();
            basis[i] = n + m + art;
            art += 1;
        } else {
            basis[i] = n + i;
        }
    }
    let mut tab = Tableau { t, basis };

    if k > 0 {
        // phase 1: minimise the sum of artificials
        for &i in &neg {
            for j in 0..=cols {
                let v = tab.t[i][j].clone();
                tab.t[m][j] -= v;
            }
        }
        for j in n + m..cols {
            tab.t[m][j] = zero.clone();
        }
        let all = vec![true; cols];
        tab.optimize(&all);
        if tab.t[m][cols].is_negative() {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: Vec::new(),
                objective: Rational::from_integer(0),
            });
        }
        // drive artificials out of the basis
        let mut i = 0;
        while i < tab.m() {
            if tab.basis[i] >= n + m {
                match (0..n + m).find(|&j| !tab.t[i][j].is_zero()) {
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

    // phase 2
    let m2 = tab.m();
    for v in tab.t[m2].iter_mut() {
        *v = zero.clone();
    }
    for j in 0..n {
        tab.t[m2][j] = big(&p.objective[j]);
    }
    for i in 0..m2 {
        let b = tab.basis[i];
        if !tab.t[m2][b].is_zero() {
            let f = tab.t[m2][b].clone();
            for j in 0..=cols {
                let v = &f * &tab.t[i][j];
                tab.t[m2][j] -= v;
            }
        }
    }
    let allowed: Vec<bool> = (0..cols).map(|j| j < n + m).collect();
    if !tab.optimize(&allowed) {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: Vec::new(),
            objective: Rational::from_integer(0),
        });
    }
    let mut x = vec![Rational::from_integer(0); n];
    for i in 0..m2 {
        if tab.basis[i] < n {
            x[tab.basis[i]] = small(&tab.t[i][cols])?;
        }
    }
    let objective = x.iter().zip(&p.objective).map(|(a, b)| a * b).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn r(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn lower_bound_only() {
        let mut p = LpProblem::new(1);
        p.objective = r(&[1]);
        p.add_le(r(&[-1]), int(-3));
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.x, r(&[3]));
    }

    #[test]
    fn infeasible() {
        let mut p = LpProblem::new(1);
        p.add_le(r(&[1]), int(-1));
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn two_vars() {
        let mut p = LpProblem::new(2);
        p.objective = r(&[-1, -1]);
        p.add_le(r(&[1, 1]), int(4));
        p.add_le(r(&[1, 0]), int(3));
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.objective, int(-4));
        assert!(p.is_feasible(&s.x));
    }

    #[test]
    fn unbounded() {
        let mut p = LpProblem::new(2);
        p.objective = r(&[-1, 0]);
        p.add_le(r(&[0, 1]), int(1));
        assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn fractional_vertex() {
        // max x + y s.t. 2x + y ≤ 3, x + 3y ≤ 4  =>  (1, 1)
        let mut p = LpProblem::new(2);
        p.objective = r(&[-1, -1]);
        p.add_le(r(&[2, 1]), int(3));
        p.add_le(r(&[1, 3]), int(4));
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.x, r(&[1, 1]));
        // max x s.t. 3x ≤ 1
        let mut p = LpProblem::new(1);
        p.objective = r(&[-1]);
        p.add_le(r(&[3]), int(1));
        assert_eq!(solve_lp(&p).unwrap().x, vec![Rational::new(1, 3)]);
    }

    #[test]
    fn equality_via_two_rows() {
        let mut p = LpProblem::new(2);
        p.objective = r(&[1, 2]);
        p.add_le(r(&[1, 1]), int(5));
        p.add_ge(r(&[1, 1]), int(5));
        p.add_le(r(&[1, 0]), int(2));
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.x, r(&[2, 3]));
        assert_eq!(s.objective, int(8));
    }

    #[test]
    fn degenerate_does_not_cycle() {
        // classic Beale example
        let mut p = LpProblem::new(4);
        p.objective = vec![Rational::new(-3, 4), int(150), Rational::new(-1, 50), int(6)];
        p.add_le(vec![Rational::new(1, 4), int(-60), Rational::new(-1, 25), int(9)], int(0));
        p.add_le(vec![Rational::new(1, 2), int(-90), Rational::new(-1, 50), int(3)], int(0));
        p.add_le(r(&[0, 0, 1, 0]), int(1));
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, Rational::new(-1, 20));
    }

    #[test]
    fn dimension_mismatch() {
        let mut p = LpProblem::new(2);
        p.add_le(r(&[1]), int(1));
        assert!(matches!(solve_lp(&p), Err(Error::Contract(_))));
    }
}
