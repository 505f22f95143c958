//! Integer kernels and integer solutions of `Dx = d` via unimodular column
//! reduction to a lower echelon form, and row Hermite normal form for
//! canonical lattice bases.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::int::{IntMatrix, IntVector};
use crate::error::{Error, Result};

/// `D * U = H` with `U` unimodular and `H` in lower column-echelon form:
/// row `i` of `H` is zero past column `rank_before(i)` except possibly a
/// pivot.
#[derive(Clone, Debug)]
pub struct ColumnEchelon {
    pub h: IntMatrix,
    pub u: IntMatrix,
    /// For each row, the column holding its pivot (if the row gained one).
    pub pivots: Vec<Option<usize>>,
    pub rank: usize,
}

fn swap_columns(m: &mut IntMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for r in 0..m.rows() {
        let x = m.get(r, a).clone();
        let y = m.get(r, b).clone();
        m.set(r, a, y);
        m.set(r, b, x);
    }
}

/// column `dst` -= q * column `src`
fn column_axpy(m: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    for r in 0..m.rows() {
        let v = m.get(r, dst) - q * m.get(r, src);
        m.set(r, dst, v);
    }
}

pub fn column_echelon(d: &IntMatrix) -> ColumnEchelon {
    let n = d.cols();
    let mut h = d.clone();
    let mut u = IntMatrix::identity(n);
    let mut pivots = Vec::with_capacity(d.rows());
    let mut k = 0;
    for i in 0..d.rows() {
        if k == n {
            pivots.push(None);
            continue;
        }
        loop {
            // smallest nonzero magnitude in row i among columns k..n
            let best = (k..n)
                .filter(|&j| !h.get(i, j).is_zero())
                .min_by(|&a, &b| h.get(i, a).abs().cmp(&h.get(i, b).abs()));
            let Some(best) = best else { break };
            swap_columns(&mut h, k, best);
            swap_columns(&mut u, k, best);
            let mut done = true;
            for j in k + 1..n {
                if h.get(i, j).is_zero() {
                    continue;
                }
                let q = h.get(i, j).div_floor(h.get(i, k));
                column_axpy(&mut h, j, k, &q);
                column_axpy(&mut u, j, k, &q);
                if !h.get(i, j).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(i, k).is_zero() {
            pivots.push(None);
        } else {
            pivots.push(Some(k));
            k += 1;
        }
    }
    ColumnEchelon {
        h,
        u,
        pivots,
        rank: k,
    }
}

/// Row Hermite normal form of the lattice spanned by `rows` (all of length
/// `n`): nonzero rows only, positive pivots, entries above each pivot
/// reduced into `[0, pivot)`.
#[allow(clippy::needless_range_loop)]
pub fn row_hermite_normal_form(rows: &[IntVector], n: usize) -> Vec<IntVector> {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.entries().to_vec()).collect();
    let mut p = 0;
    for c in 0..n {
        if p == m.len() {
            break;
        }
        loop {
            let best = (p..m.len())
                .filter(|&r| !m[r][c].is_zero())
                .min_by(|&a, &b| m[a][c].abs().cmp(&m[b][c].abs()));
            let Some(best) = best else { break };
            m.swap(p, best);
            let mut done = true;
            for r in p + 1..m.len() {
                if m[r][c].is_zero() {
                    continue;
                }
                let q = m[r][c].div_floor(&m[p][c]);
                for j in 0..n {
                    let v = &m[r][j] - &q * &m[p][j];
                    m[r][j] = v;
                }
                if !m[r][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if p < m.len() && !m[p][c].is_zero() {
            if m[p][c].is_negative() {
                for e in m[p].iter_mut() {
                    *e = -&*e;
                }
            }
            for r in 0..p {
                let q = m[r][c].div_floor(&m[p][c]);
                if q.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = &m[r][j] - &q * &m[p][j];
                    m[r][j] = v;
                }
            }
            p += 1;
        }
    }
    m.truncate(p);
    m.into_iter().map(IntVector::new).collect()
}

/// A lattice basis of `{x in Z^n : Dx = 0}` in row Hermite normal form.
pub fn kernel_lattice_basis(d: &IntMatrix) -> Vec<IntVector> {
    let ech = column_echelon(d);
    let n = d.cols();
    let raw: Vec<IntVector> = (ech.rank..n).map(|c| ech.u.column(c)).collect();
    row_hermite_normal_form(&raw, n)
}

/// Some integer solution of `Dx = d`, or `None` when none exists.
pub fn solve_integer(d_mat: &IntMatrix, rhs: &IntVector) -> Result<Option<IntVector>> {
    Error::check_len(d_mat.rows(), rhs.len())?;
    let ech = column_echelon(d_mat);
    let mut w = vec![BigInt::zero(); d_mat.cols()];
    for (i, pivot) in ech.pivots.iter().enumerate() {
        let row = ech.h.row(i);
        let limit = pivot.unwrap_or(ech.rank);
        let partial: BigInt = (0..limit).map(|c| &row[c] * &w[c]).sum();
        let residual = &rhs[i] - partial;
        match pivot {
            Some(c) => {
                let (q, r) = residual.div_rem(&row[*c]);
                if !r.is_zero() {
                    return Ok(None);
                }
                w[*c] = q;
            }
            None => {
                // rows without a pivot are zero beyond the current rank
                if !residual.is_zero() {
                    return Ok(None);
                }
            }
        }
    }
    let x = ech.u.mul_vec(&IntVector::new(w))?;
    Ok(Some(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kb(rows: &[&[i64]]) -> Vec<IntVector> {
        kernel_lattice_basis(&IntMatrix::from_i64_rows(rows))
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kb(&[&[1, 1]]), vec![IntVector::from_i64s(&[1, -1])]);
        assert_eq!(kb(&[&[2, 3]]), vec![IntVector::from_i64s(&[3, -2])]);
        assert!(kb(&[&[1, 0], &[0, 1]]).is_empty());
    }

    #[test]
    fn kernel_of_zero_matrix_is_everything() {
        let basis = kernel_lattice_basis(&IntMatrix::zeros(1, 3));
        assert_eq!(basis.len(), 3);
        assert_eq!(basis[0], IntVector::from_i64s(&[1, 0, 0]));
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let d = IntMatrix::from_i64_rows(&[&[2, -1, 0, 3], &[1, 1, -2, 0]]);
        let basis = kernel_lattice_basis(&d);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!(d.mul_vec(v).unwrap().is_zero());
        }
    }

    #[test]
    fn integer_solutions() {
        let d = IntMatrix::from_i64_rows(&[&[2, 4]]);
        assert!(solve_integer(&d, &IntVector::from_i64s(&[3]))
            .unwrap()
            .is_none());
        let x = solve_integer(&d, &IntVector::from_i64s(&[6]))
            .unwrap()
            .unwrap();
        assert_eq!(d.mul_vec(&x).unwrap(), IntVector::from_i64s(&[6]));

        let d = IntMatrix::from_i64_rows(&[&[1, 1], &[1, 1]]);
        assert!(solve_integer(&d, &IntVector::from_i64s(&[1, 2]))
            .unwrap()
            .is_none());
        assert!(solve_integer(&d, &IntVector::from_i64s(&[2, 2]))
            .unwrap()
            .is_some());
    }

    #[test]
    fn hnf_is_canonical_for_equivalent_bases() {
        let a = vec![
            IntVector::from_i64s(&[1, 2, 3]),
            IntVector::from_i64s(&[0, 1, 1]),
        ];
        let b = vec![
            IntVector::from_i64s(&[1, 3, 4]),
            IntVector::from_i64s(&[2, 5, 7]),
        ];
        assert_eq!(
            row_hermite_normal_form(&a, 3),
            row_hermite_normal_form(&b, 3)
        );
    }
}
