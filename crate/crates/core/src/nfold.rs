//! Block matrices of N-fold type.
//!
//! Column layout of the equilibrium matrix (and of the multi-type variant):
//! `x^1 .. x^N` (n columns each), then `y` (n), then the coupling slack `s`
//! (m). Row layout: aggregation `sum x^i - y = 0` (n rows), coupling
//! `sum B x^i + s = b^0` (m rows), then each player's `A x^i = b^i`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{IntMatrix, IntVector};
use crate::graver::{graver_basis_with_cap, DEFAULT_GRAVER_CAP};

/// One brick type repeated `bricks` times: `a` is `d x n`, `b` is `m x n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "NfoldSpecJson", into = "NfoldSpecJson")]
pub struct NfoldSpec {
    a: IntMatrix,
    b: IntMatrix,
    bricks: usize,
}

impl NfoldSpec {
    pub fn new(a: IntMatrix, b: IntMatrix, bricks: usize) -> Result<Self> {
        let n = a.cols().max(b.cols());
        let a = a.with_width(n)?;
        let b = b.with_width(n)?;
        if bricks == 0 {
            return Err(Error::InvalidInput("N must be positive".into()));
        }
        Ok(NfoldSpec { a, b, bricks })
    }

    pub fn a(&self) -> &IntMatrix {
        &self.a
    }

    pub fn b(&self) -> &IntMatrix {
        &self.b
    }

    pub fn bricks(&self) -> usize {
        self.bricks
    }

    /// Column count of a single brick.
    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn d(&self) -> usize {
        self.a.rows()
    }

    pub fn m(&self) -> usize {
        self.b.rows()
    }

    pub fn with_bricks(&self, bricks: usize) -> Result<Self> {
        NfoldSpec::new(self.a.clone(), self.b.clone(), bricks)
    }
}

#[derive(Serialize, Deserialize)]
struct NfoldSpecJson {
    #[serde(rename = "A")]
    a: IntMatrix,
    #[serde(rename = "B")]
    b: IntMatrix,
    #[serde(rename = "N")]
    bricks: usize,
}

impl TryFrom<NfoldSpecJson> for NfoldSpec {
    type Error = Error;

    fn try_from(j: NfoldSpecJson) -> Result<Self> {
        NfoldSpec::new(j.a, j.b, j.bricks)
    }
}

impl From<NfoldSpec> for NfoldSpecJson {
    fn from(s: NfoldSpec) -> Self {
        NfoldSpecJson {
            a: s.a,
            b: s.b,
            bricks: s.bricks,
        }
    }
}

/// Player types `(A_l, B_l)` and the type index of each player.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TypeCatalogJson", into = "TypeCatalogJson")]
pub struct TypeCatalog {
    types: Vec<(IntMatrix, IntMatrix)>,
    assignment: Vec<usize>,
}

impl TypeCatalog {
    pub fn new(types: Vec<(IntMatrix, IntMatrix)>, assignment: Vec<usize>) -> Result<Self> {
        if types.is_empty() {
            return Err(Error::InvalidInput(
                "a catalog needs at least one type".into(),
            ));
        }
        if assignment.is_empty() {
            return Err(Error::InvalidInput(
                "a catalog needs at least one player".into(),
            ));
        }
        let n = types
            .iter()
            .map(|(a, b)| a.cols().max(b.cols()))
            .max()
            .unwrap_or(0);
        let m = types.iter().map(|(_, b)| b.rows()).max().unwrap_or(0);
        let mut fixed = Vec::with_capacity(types.len());
        for (a, b) in types {
            let a = a.with_width(n)?;
            let b = if b.rows() == 0 && m > 0 {
                IntMatrix::zeros(m, n)
            } else {
                b.with_width(n)?
            };
            if b.rows() != m {
                return Err(Error::DimensionMismatch(format!(
                    "coupling blocks must share {m} rows, found {}",
                    b.rows()
                )));
            }
            fixed.push((a, b));
        }
        for &t in &assignment {
            if t >= fixed.len() {
                return Err(Error::IndexOutOfRange {
                    index: t,
                    len: fixed.len(),
                });
            }
        }
        Ok(TypeCatalog {
            types: fixed,
            assignment,
        })
    }

    pub fn types(&self) -> &[(IntMatrix, IntMatrix)] {
        &self.types
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn n(&self) -> usize {
        self.types[0].0.cols()
    }

    pub fn m(&self) -> usize {
        self.types[0].1.rows()
    }

    pub fn players(&self) -> usize {
        self.assignment.len()
    }
}

#[derive(Serialize, Deserialize)]
struct TypeJson {
    #[serde(rename = "A")]
    a: IntMatrix,
    #[serde(rename = "B")]
    b: IntMatrix,
}

#[derive(Serialize, Deserialize)]
struct TypeCatalogJson {
    types: Vec<TypeJson>,
    assignment: Vec<usize>,
}

impl TryFrom<TypeCatalogJson> for TypeCatalog {
    type Error = Error;

    fn try_from(j: TypeCatalogJson) -> Result<Self> {
        TypeCatalog::new(
            j.types.into_iter().map(|t| (t.a, t.b)).collect(),
            j.assignment,
        )
    }
}

impl From<TypeCatalog> for TypeCatalogJson {
    fn from(c: TypeCatalog) -> Self {
        TypeCatalogJson {
            types: c
                .types
                .into_iter()
                .map(|(a, b)| TypeJson { a, b })
                .collect(),
            assignment: c.assignment,
        }
    }
}

/// `[A,B]^(N)`: `B` repeated across the top, `A` along the diagonal.
pub fn build_nfold(spec: &NfoldSpec) -> IntMatrix {
    nfold_from_blocks(&spec.a, &spec.b, spec.bricks)
}

fn nfold_from_blocks(a: &IntMatrix, b: &IntMatrix, bricks: usize) -> IntMatrix {
    let (d, m, n) = (a.rows(), b.rows(), a.cols());
    let mut out = IntMatrix::zeros(m + bricks * d, bricks * n);
    for i in 0..bricks {
        out.place(0, i * n, b);
        out.place(m + i * d, i * n, a);
    }
    out
}

/// Attaches the aggregation rows and the coupling slack to a matrix whose
/// rows are `[coupling (m); per-player blocks]` over `players * n` columns.
fn attach_aggregation_and_slack(core: &IntMatrix, players: usize, n: usize, m: usize) -> IntMatrix {
    let rows = n + core.rows();
    let cols = players * n + n + m;
    let mut out = IntMatrix::zeros(rows, cols);
    let id = IntMatrix::identity(n);
    for i in 0..players {
        out.place(0, i * n, &id);
    }
    out.place(0, players * n, &id.scaled(-1));
    out.place(n, 0, core);
    out.place(n, players * n + n, &IntMatrix::identity(m));
    out
}

/// The constraint matrix of the equilibrium problem for identical players.
pub fn build_nash_matrix(spec: &NfoldSpec) -> IntMatrix {
    attach_aggregation_and_slack(&build_nfold(spec), spec.bricks, spec.n(), spec.m())
}

/// The padding brick matrix: per brick the variables are `(x^i, w^i, s^i)`,
/// the coupling rows are `[(I_n, -I_n, 0); (B, 0, I_m)]` and the diagonal
/// block is `(A, 0, 0)`.
pub fn build_c_matrix(spec: &NfoldSpec) -> IntMatrix {
    let (n, m, d) = (spec.n(), spec.m(), spec.d());
    let width = 2 * n + m;
    let mut top = IntMatrix::zeros(n + m, width);
    let id = IntMatrix::identity(n);
    top.place(0, 0, &id);
    top.place(0, n, &id.scaled(-1));
    top.place(n, 0, &spec.b);
    top.place(n, 2 * n, &IntMatrix::identity(m));
    let mut diag = IntMatrix::zeros(d, width);
    diag.place(0, 0, &spec.a);
    nfold_from_blocks(&diag, &top, spec.bricks)
}

/// Column of `build_c_matrix` that holds each column of
/// `build_nash_matrix`.
pub fn c_embedding(spec: &NfoldSpec) -> Vec<usize> {
    let (n, m, big_n) = (spec.n(), spec.m(), spec.bricks);
    let width = 2 * n + m;
    let mut cols = Vec::with_capacity(big_n * n + n + m);
    for i in 0..big_n {
        cols.extend((0..n).map(|j| i * width + j));
    }
    cols.extend((0..n).map(|j| n + j));
    cols.extend((0..m).map(|k| 2 * n + k));
    cols
}

/// Places a vector over the equilibrium-matrix columns into the padding
/// matrix's columns, zeros elsewhere.
pub fn pad_to_c(g: &IntVector, spec: &NfoldSpec) -> Result<IntVector> {
    let (n, m) = (spec.n(), spec.m());
    Error::check_len(spec.bricks * n + n + m, g.len())?;
    let mut out = IntVector::zeros(spec.bricks * (2 * n + m));
    for (src, dst) in c_embedding(spec).into_iter().enumerate() {
        out.entries_mut()[dst] = g[src].clone();
    }
    Ok(out)
}

/// The N-fold matrix over the super-brick `(diag(A_1..A_t), (B_1 .. B_t))`
/// before any deletion.
pub fn build_multitype_nfold(catalog: &TypeCatalog) -> IntMatrix {
    let n = catalog.n();
    let t = catalog.types.len();
    let d_total: usize = catalog.types.iter().map(|(a, _)| a.rows()).sum();
    let mut diag = IntMatrix::zeros(d_total, t * n);
    let mut top = IntMatrix::zeros(catalog.m(), t * n);
    let mut r = 0;
    for (l, (a, b)) in catalog.types.iter().enumerate() {
        diag.place(r, l * n, a);
        top.place(0, l * n, b);
        r += a.rows();
    }
    nfold_from_blocks(&diag, &top, catalog.players())
}

/// Columns and rows of [`build_multitype_nfold`] that survive when each
/// player keeps only its assigned type slot, in left-to-right and
/// top-to-bottom order.
pub fn multitype_kept(catalog: &TypeCatalog) -> (Vec<usize>, Vec<usize>) {
    let n = catalog.n();
    let m = catalog.m();
    let t = catalog.types.len();
    let d_total: usize = catalog.types.iter().map(|(a, _)| a.rows()).sum();
    let row_offsets: Vec<usize> = catalog
        .types
        .iter()
        .scan(0, |acc, (a, _)| {
            let o = *acc;
            *acc += a.rows();
            Some(o)
        })
        .collect();
    let mut cols = Vec::new();
    let mut rows: Vec<usize> = (0..m).collect();
    for (i, &ty) in catalog.assignment.iter().enumerate() {
        cols.extend((0..n).map(|j| i * t * n + ty * n + j));
        let base = m + i * d_total + row_offsets[ty];
        rows.extend((0..catalog.types[ty].0.rows()).map(|k| base + k));
    }
    (cols, rows)
}

/// The equilibrium matrix for players of mixed types: the super-brick
/// N-fold matrix with the unused type slots' columns and the rows they
/// leave empty deleted, then aggregation and slack attached exactly as in
/// [`build_nash_matrix`].
pub fn build_multitype_matrix(catalog: &TypeCatalog) -> IntMatrix {
    let full = build_multitype_nfold(catalog);
    let (cols, rows) = multitype_kept(catalog);
    let core = full.select_columns(&cols).select_rows(&rows);
    attach_aggregation_and_slack(&core, catalog.players(), catalog.n(), catalog.m())
}

/// Componentwise bound `b^0 - min sum_i B^i x^i` over the boxes
/// `0 <= x^i <= u^i`, clamped at zero; an upper bound on the coupling
/// slack of any feasible point.
pub fn coupling_slack_bound(
    b0: &IntVector,
    couplings: &[&IntMatrix],
    uppers: &[&IntVector],
) -> IntVector {
    let mut bound: Vec<BigInt> = b0.entries().to_vec();
    for (b, u) in couplings.iter().zip(uppers) {
        for (k, slot) in bound.iter_mut().enumerate() {
            for j in 0..b.cols() {
                let coef = b.get(k, j);
                if coef.is_negative() {
                    // min of coef * x_j is coef * u_j
                    *slot -= coef * &u[j];
                }
            }
        }
    }
    bound
        .into_iter()
        .map(|v| if v.is_negative() { BigInt::zero() } else { v })
        .collect()
}

/// Graver basis sizes of the equilibrium matrix for `N = 1..=max_bricks`.
pub fn graver_growth(
    spec: &NfoldSpec,
    max_bricks: usize,
    cap: Option<usize>,
) -> Result<Vec<(usize, usize)>> {
    let cap = cap.unwrap_or(DEFAULT_GRAVER_CAP);
    (1..=max_bricks)
        .map(|bricks| {
            let s = spec.with_bricks(bricks)?;
            let g = graver_basis_with_cap(&build_nash_matrix(&s), cap)?;
            Ok((bricks, g.len()))
        })
        .collect()
}
