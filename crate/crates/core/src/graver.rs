//! Graver bases by completion.
//!
//! Start from a lattice basis of `ker(D)` and its negation, form sums of
//! pairs, reduce each sum conformally against the current set, keep every
//! nonzero remainder, and repeat until no pair produces anything new. The
//! fixpoint contains the Graver basis; a final pass keeps only the
//! conformally minimal elements.
//!
//! The completion runs on checked `i64` arithmetic first and reruns on
//! big integers if any intermediate value overflows, so results are exact
//! either way.

use std::collections::{HashSet, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::exactmath::{
    conformal_leq_unchecked, kernel_lattice_basis, sort_canonical, IntMatrix, IntVector,
};

pub const DEFAULT_GRAVER_CAP: usize = 100_000;

/// The Graver basis of `matrix`, elements in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraverBasis {
    matrix: IntMatrix,
    elements: Vec<IntVector>,
}

impl GraverBasis {
    /// Wraps precomputed elements after checking length and kernel
    /// membership; the elements are sorted canonically.
    pub fn from_parts(matrix: IntMatrix, mut elements: Vec<IntVector>) -> Result<Self> {
        for g in &elements {
            Error::check_len(matrix.cols(), g.len())?;
            if g.is_zero() || !matrix.mul_vec(g)?.is_zero() {
                return Err(Error::InvalidInput(format!(
                    "{g} is not a nonzero kernel element"
                )));
            }
        }
        sort_canonical(&mut elements);
        elements.dedup();
        Ok(GraverBasis { matrix, elements })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn elements(&self) -> &[IntVector] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: &IntVector) -> bool {
        self.elements
            .binary_search_by(|probe| crate::exactmath::canonical_cmp(probe, g))
            .is_ok()
    }

    /// Largest absolute entry over all elements (zero for an empty basis).
    pub fn max_norm(&self) -> BigInt {
        self.elements
            .iter()
            .map(IntVector::max_norm)
            .max()
            .unwrap_or_default()
    }

    /// Checks the structural invariants that do not need enumeration:
    /// nonzero kernel elements, closure under negation, and no element
    /// conformally below another.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for g in &self.elements {
            if g.is_zero() {
                return Err("zero element".into());
            }
            match self.matrix.mul_vec(g) {
                Ok(r) if r.is_zero() => {}
                _ => return Err(format!("{g} is not in the kernel")),
            }
            if !self.contains(&-g) {
                return Err(format!("negation of {g} missing"));
            }
        }
        for g in &self.elements {
            for h in &self.elements {
                if g != h && conformal_leq_unchecked(h, g) {
                    return Err(format!("{h} is conformally below {g}"));
                }
            }
        }
        Ok(())
    }
}

pub fn graver_basis(d: &IntMatrix) -> Result<GraverBasis> {
    graver_basis_with_cap(d, DEFAULT_GRAVER_CAP)
}

/// Computes the Graver basis, failing with `Error::ResourceCap` once the
/// working set exceeds `cap` elements.
pub fn graver_basis_with_cap(d: &IntMatrix, cap: usize) -> Result<GraverBasis> {
    let n = d.cols();
    let seeds = kernel_lattice_basis(d);
    let elements = match seeds
        .iter()
        .map(IntVector::to_i64s)
        .collect::<Option<Vec<_>>>()
    {
        Some(small) => match complete::<i64>(n, small, cap) {
            Ok(out) => out.into_iter().map(|v| IntVector::from_i64s(&v)).collect(),
            Err(Halt::Cap) => return Err(cap_error(cap)),
            Err(Halt::Overflow) => complete_big(n, &seeds, cap)?,
        },
        None => complete_big(n, &seeds, cap)?,
    };
    let mut elements = elements;
    sort_canonical(&mut elements);
    Ok(GraverBasis {
        matrix: d.clone(),
        elements,
    })
}

fn complete_big(n: usize, seeds: &[IntVector], cap: usize) -> Result<Vec<IntVector>> {
    let big = seeds.iter().map(|s| s.entries().to_vec()).collect();
    match complete::<BigInt>(n, big, cap) {
        Ok(out) => Ok(out.into_iter().map(IntVector::new).collect()),
        Err(Halt::Cap) => Err(cap_error(cap)),
        Err(Halt::Overflow) => unreachable!("big integers do not overflow"),
    }
}

fn cap_error(cap: usize) -> Error {
    Error::ResourceCap {
        what: "graver basis elements",
        cap: cap as u64,
    }
}

/// Repeatedly subtracts the first element `g` of `basis` with `g ⊑ z`
/// until none applies. Each subtraction strictly lowers the 1-norm.
pub fn conformal_reduce(z: &IntVector, basis: &[IntVector]) -> IntVector {
    let mut z = z.clone();
    'outer: loop {
        if z.is_zero() {
            return z;
        }
        for g in basis {
            if g.len() == z.len() && !g.is_zero() && conformal_leq_unchecked(g, &z) {
                while conformal_leq_unchecked(g, &z) && !z.is_zero() {
                    z = z.checked_sub(g).expect("equal lengths");
                }
                continue 'outer;
            }
        }
        return z;
    }
}

/// Compares `G` with the brute-force Graver elements of max-norm at most
/// `bound`. Intended for tests.
pub fn verify_graver_basis(g: &GraverBasis, bound: u32) -> Result<bool> {
    let oracle = crate::oracle::brute_graver(g.matrix(), bound)?;
    let limit = BigInt::from(bound);
    let restricted: Vec<&IntVector> = g
        .elements()
        .iter()
        .filter(|e| e.max_norm() <= limit)
        .collect();
    Ok(restricted.len() == oracle.len()
        && restricted
            .iter()
            .zip(oracle.elements())
            .all(|(a, b)| *a == b))
}

// --- completion engine -----------------------------------------------------

enum Halt {
    Overflow,
    Cap,
}

trait Coeff: Clone + Ord + Eq + Hash + Debug {
    fn is_positive(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn checked_add(&self, other: &Self) -> Option<Self>;
    fn checked_sub(&self, other: &Self) -> Option<Self>;
    fn checked_neg(&self) -> Option<Self>;
    fn abs_u64(&self) -> Option<u64>;
}

impl Coeff for i64 {
    fn is_positive(&self) -> bool {
        *self > 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn checked_add(&self, other: &Self) -> Option<Self> {
        i64::checked_add(*self, *other)
    }
    fn checked_sub(&self, other: &Self) -> Option<Self> {
        i64::checked_sub(*self, *other)
    }
    fn checked_neg(&self) -> Option<Self> {
        i64::checked_neg(*self)
    }
    fn abs_u64(&self) -> Option<u64> {
        Some(self.unsigned_abs())
    }
}

impl Coeff for BigInt {
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn checked_add(&self, other: &Self) -> Option<Self> {
        Some(self + other)
    }
    fn checked_sub(&self, other: &Self) -> Option<Self> {
        Some(self - other)
    }
    fn checked_neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn abs_u64(&self) -> Option<u64> {
        self.abs().to_u64()
    }
}

/// A working element with its sign supports packed into bit words so that
/// most conformal tests fail on a couple of word operations.
#[derive(Clone, Debug)]
struct Elem<T> {
    v: Vec<T>,
    pos: Vec<u64>,
    neg: Vec<u64>,
}

impl<T: Coeff> Elem<T> {
    fn new(v: Vec<T>) -> Self {
        let words = v.len().div_ceil(64).max(1);
        let mut pos = vec![0u64; words];
        let mut neg = vec![0u64; words];
        for (j, e) in v.iter().enumerate() {
            if e.is_positive() {
                pos[j / 64] |= 1 << (j % 64);
            } else if e.is_negative() {
                neg[j / 64] |= 1 << (j % 64);
            }
        }
        Elem { v, pos, neg }
    }

    fn is_zero(&self) -> bool {
        self.pos.iter().all(|w| *w == 0) && self.neg.iter().all(|w| *w == 0)
    }

    /// `self ⊑ other`
    fn below(&self, other: &Elem<T>) -> bool {
        for k in 0..self.pos.len() {
            if self.pos[k] & !other.pos[k] != 0 || self.neg[k] & !other.neg[k] != 0 {
                return false;
            }
        }
        self.v.iter().zip(&other.v).all(|(a, b)| {
            if a.is_positive() {
                b >= a
            } else if a.is_negative() {
                b <= a
            } else {
                true
            }
        })
    }

    fn sign_compatible(&self, other: &Elem<T>) -> bool {
        (0..self.pos.len())
            .all(|k| self.pos[k] & other.neg[k] == 0 && self.neg[k] & other.pos[k] == 0)
    }

    fn norm1(&self) -> Option<u64> {
        self.v
            .iter()
            .try_fold(0u64, |acc, e| acc.checked_add(e.abs_u64()?))
    }
}

fn add<T: Coeff>(a: &[T], b: &[T]) -> Result<Vec<T>, Halt> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_add(y).ok_or(Halt::Overflow))
        .collect()
}

fn sub<T: Coeff>(a: &[T], b: &[T]) -> Result<Vec<T>, Halt> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_sub(y).ok_or(Halt::Overflow))
        .collect()
}

fn normal_form<T: Coeff>(mut z: Elem<T>, set: &[Elem<T>]) -> Result<Elem<T>, Halt> {
    'outer: loop {
        if z.is_zero() {
            return Ok(z);
        }
        for g in set {
            if g.below(&z) {
                let mut v = sub(&z.v, &g.v)?;
                let mut next = Elem::new(std::mem::take(&mut v));
                while !next.is_zero() && g.below(&next) {
                    next = Elem::new(sub(&next.v, &g.v)?);
                }
                z = next;
                continue 'outer;
            }
        }
        return Ok(z);
    }
}

fn complete<T: Coeff>(n: usize, seeds: Vec<Vec<T>>, cap: usize) -> Result<Vec<Vec<T>>, Halt> {
    let mut set: Vec<Elem<T>> = Vec::new();
    let mut seen: HashSet<Vec<T>> = HashSet::new();
    for s in seeds {
        let neg = s
            .iter()
            .map(|e| e.checked_neg().ok_or(Halt::Overflow))
            .collect::<Result<Vec<T>, Halt>>()?;
        for v in [s, neg] {
            if v.len() == n && seen.insert(v.clone()) {
                set.push(Elem::new(v));
            }
        }
    }
    if set.len() > cap {
        return Err(Halt::Cap);
    }

    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    for j in 0..set.len() {
        for i in 0..j {
            queue.push_back((i, j));
        }
    }
    while let Some((i, j)) = queue.pop_front() {
        // a sign-compatible pair already decomposes conformally
        if set[i].sign_compatible(&set[j]) {
            continue;
        }
        let sum = Elem::new(add(&set[i].v, &set[j].v)?);
        if sum.is_zero() {
            continue;
        }
        let rem = normal_form(sum, &set)?;
        if rem.is_zero() || !seen.insert(rem.v.clone()) {
            continue;
        }
        set.push(rem);
        if set.len() > cap {
            return Err(Halt::Cap);
        }
        let k = set.len() - 1;
        for i in 0..k {
            queue.push_back((i, k));
        }
    }

    minimal_elements(set)
}

/// Keeps the conformally minimal elements. Visiting by increasing 1-norm
/// means every element strictly below a candidate has already been kept
/// or discarded.
fn minimal_elements<T: Coeff>(set: Vec<Elem<T>>) -> Result<Vec<Vec<T>>, Halt> {
    let mut keyed = set
        .into_iter()
        .map(|e| e.norm1().map(|k| (k, e)).ok_or(Halt::Overflow))
        .collect::<Result<Vec<_>, _>>()?;
    keyed.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.v.cmp(&b.1.v)));
    let mut kept: Vec<Elem<T>> = Vec::new();
    for (_, e) in keyed {
        if !kept.iter().any(|h| h.below(&e)) {
            kept.push(e);
        }
    }
    Ok(kept.into_iter().map(|e| e.v).collect())
}
