//! Exact rational LP feasibility with Farkas certificates.
//!
//! Only feasibility is needed. Every system is brought into the standard
//! form `Ax = b, x >= 0` and handed to a phase-one simplex with Bland's
//! rule, which terminates without cycling.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::rational::RatVector;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    /// `lambda >= 0`, `row . lambda >= 0` for every row and
    /// `strict_row . lambda = 1`.
    Feasible(RatVector),
    /// `v >= 0` with `sum_r v_r * row_r <= -strict_row` componentwise.
    FarkasRay(RatVector),
}

/// Decides `{lambda : row . lambda >= 0 for all rows, lambda >= 0,
/// strict_row . lambda > 0}`.
///
/// The strict inequality is homogenized to `strict_row . lambda = 1`. When
/// that system is empty the Farkas alternative
/// `{v >= 0 : R^T v <= -strict_row}` is solved instead and its solution is
/// returned as the certificate. Both answers are lexicographically
/// smallest, so they do not depend on pivoting details.
pub fn rational_lp_feasibility(rows: &[RatVector], strict_row: &RatVector) -> Result<LpOutcome> {
    let n = strict_row.len();
    for row in rows {
        Error::check_len(n, row.len())?;
    }
    let r = rows.len();

    // [ R  -I ] [lambda]   [0]
    // [ c   0 ] [  s   ] = [1]
    let mut a = Vec::with_capacity(r + 1);
    for (i, row) in rows.iter().enumerate() {
        let mut line: Vec<BigRational> = row.entries().to_vec();
        line.extend((0..r).map(|k| {
            if k == i {
                -BigRational::one()
            } else {
                BigRational::zero()
            }
        }));
        a.push(line);
    }
    let mut last: Vec<BigRational> = strict_row.entries().to_vec();
    last.extend((0..r).map(|_| BigRational::zero()));
    a.push(last);
    let mut b = vec![BigRational::zero(); r];
    b.push(BigRational::one());

    if let Some(x) = lexicographic_minimum(a, b, n) {
        return Ok(LpOutcome::Feasible(x.into_iter().take(n).collect()));
    }

    // [ R^T  I ] [v]   [-c]
    //            [t] =
    let mut a = Vec::with_capacity(n);
    for j in 0..n {
        let mut line: Vec<BigRational> = rows.iter().map(|row| row[j].clone()).collect();
        line.extend((0..n).map(|k| {
            if k == j {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        }));
        a.push(line);
    }
    let b = strict_row.iter().map(|c| -c).collect();
    let v = lexicographic_minimum(a, b, r)
        .expect("Farkas alternative is feasible whenever the primal system is not");
    Ok(LpOutcome::FarkasRay(v.into_iter().take(r).collect()))
}

/// Substitutes a feasible point back into the system.
pub fn verify_feasible_point(
    rows: &[RatVector],
    strict_row: &RatVector,
    lambda: &RatVector,
) -> bool {
    lambda.len() == strict_row.len()
        && lambda.is_nonnegative()
        && rows
            .iter()
            .all(|row| row.dot(lambda).is_ok_and(|v| !v.is_negative()))
        && strict_row.dot(lambda).is_ok_and(|v| v.is_positive())
}

/// Checks `v >= 0` and `sum_r v_r row_r + strict_row <= 0` componentwise.
pub fn verify_farkas_ray(rows: &[RatVector], strict_row: &RatVector, v: &RatVector) -> bool {
    if v.len() != rows.len()
        || !v.is_nonnegative()
        || rows.iter().any(|row| row.len() != strict_row.len())
    {
        return false;
    }
    (0..strict_row.len()).all(|j| {
        let combo: BigRational = rows.iter().zip(v.iter()).map(|(row, w)| w * &row[j]).sum();
        !(combo + &strict_row[j]).is_positive()
    })
}

/// Phase-one simplex: some `x >= 0` with `Ax = b`, or `None`.
///
/// Dense tableau, one artificial per row, Bland's rule for both the
/// entering and leaving choice.
pub fn nonnegative_solution(
    a: Vec<Vec<BigRational>>,
    b: Vec<BigRational>,
) -> Option<Vec<BigRational>> {
    let n = a.first().map_or(0, Vec::len);
    let tableau = Tableau::phase_one(a, b)?;
    Some(tableau.point(n))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpMinimum {
    Infeasible,
    Unbounded,
    Optimal(Vec<BigRational>),
}

/// `min cost . x` over `Ax = b, x >= 0`: phase one, then phase two with
/// Bland's rule.
pub fn minimize_nonnegative(
    a: Vec<Vec<BigRational>>,
    b: Vec<BigRational>,
    cost: &[BigRational],
) -> LpMinimum {
    let n = cost.len();
    let Some(mut tableau) = Tableau::phase_one(a, b) else {
        return LpMinimum::Infeasible;
    };
    if tableau.phase_two(cost) {
        LpMinimum::Optimal(tableau.point(n))
    } else {
        LpMinimum::Unbounded
    }
}

/// A solution of `Ax = b, x >= 0` whose first `leading` coordinates are
/// lexicographically smallest, or `None` when infeasible.
pub fn lexicographic_minimum(
    mut a: Vec<Vec<BigRational>>,
    mut b: Vec<BigRational>,
    leading: usize,
) -> Option<Vec<BigRational>> {
    let n = a.first().map_or(0, Vec::len);
    let mut x = nonnegative_solution(a.clone(), b.clone())?;
    for j in 0..leading.min(n) {
        let mut cost = vec![BigRational::zero(); n];
        cost[j] = BigRational::one();
        match minimize_nonnegative(a.clone(), b.clone(), &cost) {
            LpMinimum::Optimal(opt) => {
                let mut row = vec![BigRational::zero(); n];
                row[j] = BigRational::one();
                a.push(row);
                b.push(opt[j].clone());
                x = opt;
            }
            _ => return None,
        }
    }
    Some(x)
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    basis: Vec<usize>,
    /// number of original columns; artificials follow, then the rhs
    cols: usize,
}

impl Tableau {
    fn phase_one(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Tableau> {
        let m = a.len();
        let n = a.first().map_or(0, Vec::len);
        for i in 0..m {
            if b[i].is_negative() {
                for e in a[i].iter_mut() {
                    *e = -&*e;
                }
                b[i] = -&b[i];
            }
        }

        // columns: 0..n original, n..n+m artificial, then rhs
        let width = n + m + 1;
        let rows: Vec<Vec<BigRational>> = a
            .into_iter()
            .zip(b)
            .enumerate()
            .map(|(i, (mut row, rhs))| {
                row.extend((0..m).map(|k| {
                    if k == i {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                }));
                row.push(rhs);
                row
            })
            .collect();
        let mut t = Tableau {
            rows,
            basis: (n..n + m).collect(),
            cols: n,
        };

        // reduced costs of min sum(artificials): c_j - c_B B^-1 A_j
        let mut cost = vec![BigRational::zero(); width];
        for row in &t.rows {
            for j in 0..width {
                if j < n || j == width - 1 {
                    cost[j] -= &row[j];
                }
            }
        }
        let bounded = t.optimize(&mut cost, n + m);
        debug_assert!(bounded, "phase-one objective is bounded below by zero");
        if !cost[width - 1].is_zero() {
            // objective row holds -(sum of artificials)
            return None;
        }
        t.drive_out_artificials();
        Some(t)
    }

    fn width(&self) -> usize {
        self.cols + self.rows.len() + 1
    }

    /// Pivots basic artificials (all at level zero) out wherever the row
    /// has a nonzero original entry; other rows are redundant.
    fn drive_out_artificials(&mut self) {
        for i in 0..self.rows.len() {
            if self.basis[i] < self.cols {
                continue;
            }
            if let Some(e) = (0..self.cols).find(|&j| !self.rows[i][j].is_zero()) {
                let mut dummy = vec![BigRational::zero(); self.width()];
                pivot(&mut self.rows, &mut dummy, i, e);
                self.basis[i] = e;
            }
        }
    }

    /// Minimizes `cost . x` over the original columns; `false` when
    /// unbounded.
    #[allow(clippy::needless_range_loop)]
    fn phase_two(&mut self, cost: &[BigRational]) -> bool {
        let width = self.width();
        let mut reduced = vec![BigRational::zero(); width];
        reduced[..self.cols].clone_from_slice(cost);
        for (i, &var) in self.basis.iter().enumerate() {
            if var < self.cols && !cost[var].is_zero() {
                let f = cost[var].clone();
                for j in 0..width {
                    if !self.rows[i][j].is_zero() {
                        reduced[j] -= &f * &self.rows[i][j];
                    }
                }
            }
        }
        self.optimize(&mut reduced, self.cols)
    }

    /// Bland-rule pivoting on columns `0..allowed`; `false` when a column
    /// with negative reduced cost has no positive entry.
    fn optimize(&mut self, cost: &mut [BigRational], allowed: usize) -> bool {
        let last = self.width() - 1;
        loop {
            let Some(e) = (0..allowed).find(|&j| cost[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, BigRational)> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][e].is_positive() {
                    continue;
                }
                let ratio = &self.rows[i][last] / &self.rows[i][e];
                let better = match &leave {
                    None => true,
                    Some((li, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((p, _)) = leave else {
                return false;
            };
            pivot(&mut self.rows, cost, p, e);
            self.basis[p] = e;
        }
    }

    fn point(&self, n: usize) -> Vec<BigRational> {
        let last = self.width() - 1;
        let mut x = vec![BigRational::zero(); n];
        for (i, &var) in self.basis.iter().enumerate() {
            if var < n {
                x[var] = self.rows[i][last].clone();
            }
        }
        x
    }
}

fn pivot(tab: &mut [Vec<BigRational>], cost: &mut [BigRational], p: usize, e: usize) {
    let width = cost.len();
    let inv = BigRational::one() / &tab[p][e];
    for v in tab[p].iter_mut() {
        *v *= &inv;
    }
    let pivot_row = tab[p].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == p || row[e].is_zero() {
            continue;
        }
        let f = row[e].clone();
        for j in 0..width {
            if !pivot_row[j].is_zero() {
                row[j] -= &f * &pivot_row[j];
            }
        }
    }
    if !cost[e].is_zero() {
        let f = cost[e].clone();
        for j in 0..width {
            if !pivot_row[j].is_zero() {
                cost[j] -= &f * &pivot_row[j];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::int;

    #[test]
    fn single_row_feasible() {
        let rows = [RatVector::from_i64s(&[3, -1])];
        let strict = RatVector::from_i64s(&[1, 1]);
        match rational_lp_feasibility(&rows, &strict).unwrap() {
            LpOutcome::Feasible(l) => assert!(verify_feasible_point(&rows, &strict, &l)),
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn single_row_infeasible() {
        let rows = [RatVector::from_i64s(&[-1, -1])];
        let strict = RatVector::from_i64s(&[1, 1]);
        match rational_lp_feasibility(&rows, &strict).unwrap() {
            LpOutcome::FarkasRay(v) => {
                assert_eq!(v, RatVector::from_i64s(&[1]));
                assert!(verify_farkas_ray(&rows, &strict, &v));
            }
            other => panic!("expected ray, got {other:?}"),
        }
    }

    #[test]
    fn feasible_answer_is_lexicographically_smallest() {
        let rows = [RatVector::from_i64s(&[-3, 1])];
        let strict = RatVector::from_i64s(&[1, 1]);
        assert_eq!(
            rational_lp_feasibility(&rows, &strict).unwrap(),
            LpOutcome::Feasible(RatVector::from_i64s(&[0, 1]))
        );
    }

    #[test]
    fn phase_two_minimum() {
        // x + y + s = 4, x - y = 1: minimize -x
        let a = vec![vec![int(1), int(1), int(1)], vec![int(1), int(-1), int(0)]];
        let b = vec![int(4), int(1)];
        let out = minimize_nonnegative(a.clone(), b.clone(), &[int(-1), int(0), int(0)]);
        assert_eq!(
            out,
            LpMinimum::Optimal(vec![
                crate::exactmath::rational::ratio(5, 2),
                crate::exactmath::rational::ratio(3, 2),
                int(0)
            ])
        );
        assert_eq!(
            minimize_nonnegative(a, b, &[int(1), int(0), int(0)]),
            LpMinimum::Optimal(vec![int(1), int(0), int(3)])
        );
    }

    #[test]
    fn phase_two_detects_unboundedness() {
        // x - y = 0: minimize -x
        let a = vec![vec![int(1), int(-1)]];
        assert_eq!(
            minimize_nonnegative(a, vec![int(0)], &[int(-1), int(0)]),
            LpMinimum::Unbounded
        );
        let a = vec![vec![int(1)]];
        assert_eq!(
            minimize_nonnegative(a, vec![int(-1)], &[int(1)]),
            LpMinimum::Infeasible
        );
    }

    #[test]
    fn redundant_rows_survive_phase_two() {
        let a = vec![vec![int(1), int(1)], vec![int(2), int(2)]];
        let b = vec![int(1), int(2)];
        assert_eq!(lexicographic_minimum(a, b, 2), Some(vec![int(0), int(1)]));
    }

    #[test]
    fn no_rows() {
        let strict = RatVector::from_i64s(&[1, 0]);
        assert_eq!(
            rational_lp_feasibility(&[], &strict).unwrap(),
            LpOutcome::Feasible(RatVector::from_i64s(&[1, 0]))
        );
    }

    #[test]
    fn dimension_mismatch() {
        let rows = [RatVector::from_i64s(&[1])];
        assert!(rational_lp_feasibility(&rows, &RatVector::from_i64s(&[1, 1])).is_err());
    }

    #[test]
    fn phase_one_detects_infeasibility() {
        // x1 + x2 = -1 with x >= 0
        let a = vec![vec![int(1), int(1)]];
        assert!(nonnegative_solution(a, vec![int(-1)]).is_none());
        let a = vec![vec![int(1), int(-1)], vec![int(1), int(1)]];
        let x = nonnegative_solution(a, vec![int(0), int(4)]).unwrap();
        assert_eq!(x, vec![int(2), int(2)]);
    }
}
