//! Exact integer and rational linear algebra.
//!
//! No floating point is used anywhere below this module.

pub mod int;
pub mod kernel;
pub mod lp;
pub mod rational;

use num_traits::{Signed, Zero};

pub use int::{canonical_cmp, sort_canonical, IntMatrix, IntVector};
pub use kernel::{kernel_lattice_basis, solve_integer};
pub use lp::{rational_lp_feasibility, LpOutcome};
pub use rational::{format_rational, parse_rational, RatVector};

use crate::error::{Error, Result};

/// `u_j * v_j >= 0` for every coordinate.
pub fn sign_compatible(u: &IntVector, v: &IntVector) -> Result<bool> {
    Error::check_len(u.len(), v.len())?;
    Ok(u.iter()
        .zip(v.iter())
        .all(|(a, b)| !(a.is_positive() && b.is_negative() || a.is_negative() && b.is_positive())))
}

/// The conformal order: `u ⊑ v` iff `u` and `v` are sign-compatible and
/// `|u_j| <= |v_j|` for every coordinate.
pub fn conformal_leq(u: &IntVector, v: &IntVector) -> Result<bool> {
    Error::check_len(u.len(), v.len())?;
    Ok(conformal_leq_unchecked(u, v))
}

pub(crate) fn conformal_leq_unchecked(u: &IntVector, v: &IntVector) -> bool {
    u.iter().zip(v.iter()).all(|(a, b)| {
        if a.is_zero() {
            true
        } else if a.is_positive() {
            b >= a
        } else {
            b <= a
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(e: &[i64]) -> IntVector {
        IntVector::from_i64s(e)
    }

    #[test]
    fn sign_compatibility_examples() {
        assert!(sign_compatible(&v(&[1, 0, -2]), &v(&[3, 0, -1])).unwrap());
        assert!(!sign_compatible(&v(&[1, -1]), &v(&[1, 1])).unwrap());
        assert!(sign_compatible(&v(&[0, 0]), &v(&[5, -7])).unwrap());
        assert!(sign_compatible(&v(&[0]), &v(&[5, -7])).is_err());
    }

    #[test]
    fn conformal_examples() {
        assert!(conformal_leq(&v(&[1, -1]), &v(&[2, -3])).unwrap());
        assert!(!conformal_leq(&v(&[1, -1]), &v(&[1, 1])).unwrap());
        assert!(conformal_leq(&v(&[0, 0]), &v(&[-4, 9])).unwrap());
        assert!(!conformal_leq(&v(&[2, 0]), &v(&[1, 0])).unwrap());
        assert!(conformal_leq(&v(&[1]), &v(&[1, 2])).is_err());
    }

    fn small_vec(n: usize) -> impl Strategy<Value = IntVector> {
        proptest::collection::vec(-3i64..=3, n).prop_map(|e| IntVector::from_i64s(&e))
    }

    proptest! {
        #[test]
        fn conformal_order_is_a_partial_order(
            a in small_vec(4), b in small_vec(4), c in small_vec(4)
        ) {
            prop_assert!(conformal_leq(&a, &a).unwrap());
            if conformal_leq(&a, &b).unwrap() && conformal_leq(&b, &a).unwrap() {
                prop_assert_eq!(&a, &b);
            }
            if conformal_leq(&a, &b).unwrap() && conformal_leq(&b, &c).unwrap() {
                prop_assert!(conformal_leq(&a, &c).unwrap());
            }
        }

        #[test]
        fn conformal_implies_sign_compatible(a in small_vec(3), b in small_vec(3)) {
            if conformal_leq(&a, &b).unwrap() {
                prop_assert!(sign_compatible(&a, &b).unwrap());
            }
        }
    }
}
