use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::AtlasError;
use crate::linalg::{RationalMatrix, Q};

/// Hodge type `(a, b)` of a basis vector; the weight is `a + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HodgeType(pub i32, pub i32);

impl HodgeType {
    pub fn weight(self) -> i32 {
        self.0 + self.1
    }

    pub fn shifted(self, by: HodgeType) -> HodgeType {
        HodgeType(self.0 + by.0, self.1 + by.1)
    }

    pub fn twist(k: usize) -> HodgeType {
        HodgeType(k as i32, k as i32)
    }
}

impl fmt::Display for HodgeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

/// Cohomology ring of a smooth complete stratum of dimension `d`.
///
/// `H^j` has a distinguished basis obtained by concatenating the blocks
/// listed in `pieces[j]`, one block per Hodge type. The product
/// `H^{j1} ⊗ H^{j2} -> H^{j1+j2}` is a matrix with `dim H^{j1+j2}` rows whose
/// column `x * dim H^{j2} + y` holds the product of basis vectors `x` and `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureHodgeRing {
    dimension: usize,
    pieces: Vec<Vec<(HodgeType, usize)>>,
    mult: BTreeMap<(usize, usize), RationalMatrix>,
    unit: Vec<Q>,
    fundamental: Vec<Q>,
}

impl PureHodgeRing {
    pub fn new(
        dimension: usize,
        pieces: Vec<Vec<(HodgeType, usize)>>,
        mult: BTreeMap<(usize, usize), RationalMatrix>,
        unit: Vec<Q>,
        fundamental: Vec<Q>,
    ) -> Result<Self, AtlasError> {
        if pieces.len() != 2 * dimension + 1 {
            return Err(AtlasError::DimensionMismatch(format!(
                "ring of dimension {dimension} needs {} graded pieces, got {}",
                2 * dimension + 1,
                pieces.len()
            )));
        }
        for (j, piece) in pieces.iter().enumerate() {
            if let Some((t, _)) = piece.iter().find(|(t, _)| t.weight() != j as i32 || t.0 < 0 || t.1 < 0) {
                return Err(AtlasError::Bidegree(format!("type {t} cannot occur in H^{j}")));
            }
        }
        let ring = PureHodgeRing {
            dimension,
            pieces,
            mult,
            unit,
            fundamental,
        };
        if ring.unit.len() != ring.dim(0) {
            return Err(AtlasError::DimensionMismatch(format!(
                "unit has {} coordinates, H^0 has dimension {}",
                ring.unit.len(),
                ring.dim(0)
            )));
        }
        if ring.fundamental.len() != ring.dim(2 * dimension) {
            return Err(AtlasError::DimensionMismatch(format!(
                "fundamental class has {} coordinates, H^{} has dimension {}",
                ring.fundamental.len(),
                2 * dimension,
                ring.dim(2 * dimension)
            )));
        }
        for (&(j1, j2), m) in &ring.mult {
            if j1 + j2 > 2 * dimension {
                if !m.is_zero() || m.rows() != 0 {
                    return Err(AtlasError::DimensionMismatch(format!(
                        "product H^{j1} x H^{j2} lands above the top degree"
                    )));
                }
                continue;
            }
            let (rows, cols) = (ring.dim(j1 + j2), ring.dim(j1) * ring.dim(j2));
            if m.rows() != rows || m.cols() != cols {
                return Err(AtlasError::DimensionMismatch(format!(
                    "product H^{j1} x H^{j2}: expected {rows}x{cols}, got {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
            let (ta, tb, tc) = (ring.types(j1), ring.types(j2), ring.types(j1 + j2));
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    let expected = ta[c / ring.dim(j2)].shifted(tb[c % ring.dim(j2)]);
                    if !m.get(r, c).is_zero() && tc[r] != expected {
                        return Err(AtlasError::Bidegree(format!(
                            "product H^{j1} x H^{j2}: entry ({r},{c}) does not add Hodge types"
                        )));
                    }
                }
            }
        }
        Ok(ring)
    }

    /// `H^*(P^d)`: one class `h^i` of type `(i,i)` in each even degree.
    pub fn projective(d: usize) -> Self {
        let pieces = (0..=2 * d)
            .map(|j| {
                if j % 2 == 0 {
                    vec![(HodgeType::twist(j / 2), 1)]
                } else {
                    Vec::new()
                }
            })
            .collect();
        let mut mult = BTreeMap::new();
        for a in 0..=d {
            for b in 0..=d - a {
                mult.insert((2 * a, 2 * b), RationalMatrix::identity(1));
            }
        }
        PureHodgeRing {
            dimension: d,
            pieces,
            mult,
            unit: vec![Q::one()],
            fundamental: vec![Q::one()],
        }
    }

    pub fn point() -> Self {
        Self::projective(0)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn top_degree(&self) -> usize {
        2 * self.dimension
    }

    pub fn dim(&self, j: usize) -> usize {
        self.pieces.get(j).map_or(0, |p| p.iter().map(|(_, n)| n).sum())
    }

    pub fn pieces(&self, j: usize) -> &[(HodgeType, usize)] {
        self.pieces.get(j).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Hodge type of each basis vector of `H^j`.
    pub fn types(&self, j: usize) -> Vec<HodgeType> {
        self.pieces(j)
            .iter()
            .flat_map(|&(t, n)| std::iter::repeat_n(t, n))
            .collect()
    }

    pub fn unit(&self) -> &[Q] {
        &self.unit
    }

    pub fn fundamental_class(&self) -> &[Q] {
        &self.fundamental
    }

    pub(crate) fn mult_tables(&self) -> &BTreeMap<(usize, usize), RationalMatrix> {
        &self.mult
    }

    /// The product table `H^{j1} ⊗ H^{j2} -> H^{j1+j2}`, zero if undeclared.
    pub fn product_table(&self, j1: usize, j2: usize) -> RationalMatrix {
        self.mult.get(&(j1, j2)).cloned().unwrap_or_else(|| {
            RationalMatrix::zeros(self.dim(j1 + j2), self.dim(j1) * self.dim(j2))
        })
    }

    pub fn multiply(&self, j1: usize, x: &[Q], j2: usize, y: &[Q]) -> Vec<Q> {
        let table = self.product_table(j1, j2);
        let mut pair = Vec::with_capacity(x.len() * y.len());
        for a in x {
            for b in y {
                pair.push(a * b);
            }
        }
        table.mul_vec(&pair).expect("product table shape matches operands")
    }

    /// Left multiplication by `x ∈ H^{jx}` as a map `H^j -> H^{jx+j}`.
    pub fn left_multiplication(&self, jx: usize, x: &[Q], j: usize) -> RationalMatrix {
        let n = self.dim(j);
        let mut m = RationalMatrix::zeros(self.dim(jx + j), n);
        for c in 0..n {
            let mut e = vec![Q::zero(); n];
            e[c] = Q::one();
            for (r, v) in self.multiply(jx, x, j, &e).into_iter().enumerate() {
                m.set(r, c, v);
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    #[test]
    fn projective_plane_ring() {
        let r = PureHodgeRing::projective(2);
        assert_eq!((0..=4).map(|j| r.dim(j)).collect::<Vec<_>>(), vec![1, 0, 1, 0, 1]);
        assert_eq!(r.types(4), vec![HodgeType(2, 2)]);
        assert_eq!(r.multiply(2, &[q(1)], 2, &[q(3)]), vec![q(3)]);
        assert!(r.product_table(2, 4).rows() == 0);
    }

    #[test]
    fn rejects_type_mismatch_in_products() {
        // H^1 of a curve with types (1,0),(0,1); product (1,0)x(1,0) cannot be nonzero
        let pieces = vec![
            vec![(HodgeType(0, 0), 1)],
            vec![(HodgeType(1, 0), 1), (HodgeType(0, 1), 1)],
            vec![(HodgeType(1, 1), 1)],
        ];
        let mut mult = BTreeMap::new();
        mult.insert((1, 1), RationalMatrix::from_i64(1, 4, &[1, 0, 0, 0]));
        let err = PureHodgeRing::new(1, pieces, mult, vec![q(1)], vec![q(1)]).unwrap_err();
        assert!(matches!(err, AtlasError::Bidegree(_)));
    }
}
