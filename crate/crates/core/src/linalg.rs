//! Exact linear algebra over the rationals.
//!
//! Everything here works on dense [`RationalMatrix`] values with
//! arbitrary-precision entries. Elimination always picks the first nonzero
//! entry of a column as pivot, so bases returned by [`reduce`] and
//! [`cohomology_at`] are a deterministic function of the input.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational scalar.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("composite differential is nonzero ({rows}x{cols} block has a nonzero entry)")]
    CompositionNonzero { rows: usize, cols: usize },
    #[error("vector is not a cycle of the outgoing differential")]
    NotACycle,
    #[error("vector does not lie in the span of the given basis")]
    NotInSpan,
    #[error("matrix is singular")]
    Singular,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    /// Builds a matrix from row vectors. All rows must share a length; an
    /// empty row list gives a `0 x cols` matrix.
    pub fn from_rows(rows: Vec<Vec<Q>>, cols: usize) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::ShapeMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(RationalMatrix {
            rows: nrows,
            cols,
            data,
        })
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must equal rows x cols");
        RationalMatrix {
            rows,
            cols,
            data: entries.iter().map(|&x| q(x)).collect(),
        }
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(columns: &[Vec<Q>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (r, x) in col.iter().enumerate() {
                m.set(r, c, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Q {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Q) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[Q] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Q> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let idx = r * out.cols + c;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Q]) -> Result<Vec<Q>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::ShapeMismatch(format!(
                "cannot apply {}x{} to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Q::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn add_assign(&mut self, other: &RationalMatrix) -> Result<(), LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::ShapeMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            if !b.is_zero() {
                *a += b;
            }
        }
        Ok(())
    }

    pub fn scaled(&self, s: &Q) -> Self {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn negated(&self) -> Self {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (k, &c) in cols.iter().enumerate() {
                out.set(i, k, self.get(r, c).clone());
            }
        }
        out
    }

    /// Writes `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn place(&mut self, r0: usize, c0: usize, block: &RationalMatrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self.set(r0 + r, c0 + c, block.get(r, c).clone());
            }
        }
    }

    /// Kronecker product; column `x * other.cols + y` pairs column `x` of
    /// `self` with column `y` of `other`.
    pub fn kron(&self, other: &RationalMatrix) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                let a = self.get(r1, c1);
                if a.is_zero() {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        let b = other.get(r2, c2);
                        if !b.is_zero() {
                            out.set(r1 * other.rows + r2, c1 * other.cols + c2, a * b);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Reduced row echelon form with first-nonzero pivoting.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m.get(row, col).recip();
            for c in col..m.cols {
                let v = m.get(row, c) * &inv;
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for c in col..m.cols {
                    let sub = m.get(row, c) * &factor;
                    if !sub.is_zero() {
                        let idx = r * m.cols + c;
                        m.data[idx] -= sub;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref { matrix: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn inverse(&self) -> Result<Self, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::ShapeMismatch(format!(
                "cannot invert {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        aug.place(0, 0, self);
        aug.place(0, n, &Self::identity(n));
        let rref = aug.rref();
        if rref.pivots.iter().filter(|&&c| c < n).count() < n {
            return Err(LinalgError::Singular);
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        let rows: Vec<usize> = (0..n).collect();
        Ok(rref.matrix.select(&rows, &cols))
    }
}

pub struct Rref {
    pub matrix: RationalMatrix,
    pub pivots: Vec<usize>,
}

/// Rank, kernel and image of a matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub rank: usize,
    pub kernel_basis: Vec<Vec<Q>>,
    /// Pivot columns of the input; they span the column space.
    pub image_basis: Vec<Vec<Q>>,
}

pub fn reduce(m: &RationalMatrix) -> Reduction {
    let rref = m.rref();
    let rank = rref.pivots.len();
    let free: Vec<usize> = (0..m.cols()).filter(|c| !rref.pivots.contains(c)).collect();
    let kernel_basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); m.cols()];
            v[f] = Q::one();
            for (r, &pc) in rref.pivots.iter().enumerate() {
                v[pc] = -rref.matrix.get(r, f).clone();
            }
            v
        })
        .collect();
    let image_basis = rref.pivots.iter().map(|&c| m.column(c)).collect();
    Reduction {
        rank,
        kernel_basis,
        image_basis,
    }
}

/// Coordinates against a linearly independent family of vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanSolver {
    basis: RationalMatrix,
    pivot_rows: Vec<usize>,
    inverse: RationalMatrix,
}

impl SpanSolver {
    /// `vectors` must be linearly independent, all of length `ambient`.
    pub fn new(vectors: &[Vec<Q>], ambient: usize) -> Result<Self, LinalgError> {
        let basis = RationalMatrix::from_columns(vectors, ambient);
        // independent rows of the basis matrix form an invertible square block
        let rref = basis.transpose().rref();
        if rref.pivots.len() != vectors.len() {
            return Err(LinalgError::Singular);
        }
        let pivot_rows = rref.pivots;
        let cols: Vec<usize> = (0..vectors.len()).collect();
        let inverse = basis.select(&pivot_rows, &cols).inverse()?;
        Ok(SpanSolver {
            basis,
            pivot_rows,
            inverse,
        })
    }

    pub fn coordinates(&self, v: &[Q]) -> Result<Vec<Q>, LinalgError> {
        if v.len() != self.basis.rows() {
            return Err(LinalgError::ShapeMismatch(format!(
                "vector of length {} in ambient space of dimension {}",
                v.len(),
                self.basis.rows()
            )));
        }
        let sub: Vec<Q> = self.pivot_rows.iter().map(|&r| v[r].clone()).collect();
        let coords = self.inverse.mul_vec(&sub)?;
        if self.basis.mul_vec(&coords)? != v {
            return Err(LinalgError::NotInSpan);
        }
        Ok(coords)
    }
}

/// Cohomology of `V_{m-1} --d_in--> V_m --d_out--> V_{m+1}` at `V_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cohomology {
    pub dim: usize,
    /// Cocycles completing a basis of `im(d_in)` to a basis of `ker(d_out)`.
    pub representatives: Vec<Vec<Q>>,
    pub boundaries: Vec<Vec<Q>>,
    d_out: RationalMatrix,
    solver: SpanSolver,
}

impl Cohomology {
    pub fn ambient_dim(&self) -> usize {
        self.d_out.cols()
    }

    /// Coordinates of the class of a cocycle against `representatives`.
    pub fn coordinates(&self, cocycle: &[Q]) -> Result<Vec<Q>, LinalgError> {
        if !self.d_out.mul_vec(cocycle)?.iter().all(Zero::is_zero) {
            return Err(LinalgError::NotACycle);
        }
        let mut coords = self.solver.coordinates(cocycle)?;
        coords.truncate(self.dim);
        Ok(coords)
    }
}

/// `d_in` is `dim V_m x dim V_{m-1}`, `d_out` is `dim V_{m+1} x dim V_m`.
pub fn cohomology_at(
    d_in: &RationalMatrix,
    d_out: &RationalMatrix,
) -> Result<Cohomology, LinalgError> {
    if d_out.cols() != d_in.rows() {
        return Err(LinalgError::ShapeMismatch(format!(
            "d_out has {} columns but d_in has {} rows",
            d_out.cols(),
            d_in.rows()
        )));
    }
    let composite = d_out.mul(d_in)?;
    if !composite.is_zero() {
        return Err(LinalgError::CompositionNonzero {
            rows: composite.rows(),
            cols: composite.cols(),
        });
    }
    let ambient = d_in.rows();
    let boundaries = reduce(d_in).image_basis;
    let kernel = reduce(d_out).kernel_basis;

    let mut spanning = boundaries.clone();
    let mut representatives = Vec::new();
    let mut current_rank = boundaries.len();
    for v in kernel {
        spanning.push(v.clone());
        let rank = RationalMatrix::from_columns(&spanning, ambient).rank();
        if rank > current_rank {
            current_rank = rank;
            representatives.push(v);
        } else {
            spanning.pop();
        }
    }
    let mut ordered = representatives.clone();
    ordered.extend(boundaries.iter().cloned());
    let solver = SpanSolver::new(&ordered, ambient)?;
    Ok(Cohomology {
        dim: representatives.len(),
        representatives,
        boundaries,
        d_out: d_out.clone(),
        solver,
    })
}

/// A bilinear pairing matrix is perfect when it is square and invertible.
pub fn pairing_perfect(p: &RationalMatrix) -> bool {
    p.rows() == p.cols() && p.rank() == p.rows()
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Q::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

pub fn sign(negative: bool) -> Q {
    if negative {
        -Q::one()
    } else {
        Q::one()
    }
}

pub fn abs_is_one(x: &Q) -> bool {
    x.abs().is_one()
}
