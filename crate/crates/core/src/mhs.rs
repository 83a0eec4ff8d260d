//! Mixed Hodge numbers of a row family, with representative classes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::atlas::HodgeType;
use crate::complexes::{assemble, Blocks, RowFamily};
use crate::linalg::{cohomology_at, Cohomology, LinalgError, RationalMatrix, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MhsError {
    #[error("{family}, weight {weight}, degree {degree}: {source}")]
    Linalg {
        family: String,
        weight: i32,
        degree: i32,
        source: LinalgError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableEntry {
    pub weight: i32,
    #[serde(rename = "type")]
    pub hodge: HodgeType,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeTable {
    pub degree: i32,
    pub betti: usize,
    pub entries: Vec<TableEntry>,
}

/// Cohomology classes of one `(degree, weight, type)` block.
#[derive(Debug, Clone)]
pub struct ClassBlock {
    /// Positions of this type inside the weight row's degree space.
    pub coords: Vec<usize>,
    /// Dimension of the weight row's degree space.
    pub ambient: usize,
    /// Representatives as vectors of the full degree space.
    pub representatives: Vec<Vec<Q>>,
    cohomology: Cohomology,
}

impl ClassBlock {
    /// Coordinates of the class of a cocycle of this type.
    pub fn coordinates(&self, v: &[Q]) -> Result<Vec<Q>, LinalgError> {
        if v.len() != self.ambient {
            return Err(LinalgError::ShapeMismatch(format!(
                "vector of length {} in a space of dimension {}",
                v.len(),
                self.ambient
            )));
        }
        let inside: Vec<bool> = (0..v.len()).map(|i| self.coords.binary_search(&i).is_ok()).collect();
        if v.iter().zip(&inside).any(|(x, &ok)| !ok && *x != Q::zero()) {
            return Err(LinalgError::NotInSpan);
        }
        let sub: Vec<Q> = self.coords.iter().map(|&i| v[i].clone()).collect();
        self.cohomology.coordinates(&sub)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MixedHodgeTable {
    pub complex: String,
    pub degrees: Vec<DegreeTable>,
    #[serde(skip)]
    classes: BTreeMap<(i32, i32, HodgeType), ClassBlock>,
}

impl PartialEq for MixedHodgeTable {
    fn eq(&self, other: &Self) -> bool {
        self.degrees == other.degrees
    }
}

impl MixedHodgeTable {
    pub fn betti(&self, degree: i32) -> usize {
        self.degree(degree).map_or(0, |d| d.betti)
    }

    pub fn degree(&self, degree: i32) -> Option<&DegreeTable> {
        self.degrees.iter().find(|d| d.degree == degree)
    }

    pub fn dim(&self, degree: i32, weight: i32, hodge: HodgeType) -> usize {
        self.degree(degree)
            .and_then(|d| d.entries.iter().find(|e| e.weight == weight && e.hodge == hodge))
            .map_or(0, |e| e.dim)
    }

    /// `dim Gr^W_weight H^degree`.
    pub fn weight_dim(&self, degree: i32, weight: i32) -> usize {
        self.degree(degree)
            .map_or(0, |d| d.entries.iter().filter(|e| e.weight == weight).map(|e| e.dim).sum())
    }

    /// Nonzero `(weight, type, dim)` entries of a degree.
    pub fn entries(&self, degree: i32) -> &[TableEntry] {
        self.degree(degree).map_or(&[], |d| &d.entries)
    }

    pub fn classes(&self, degree: i32, weight: i32, hodge: HodgeType) -> Option<&ClassBlock> {
        self.classes.get(&(degree, weight, hodge))
    }

    /// All class blocks of a degree, ordered by weight and type.
    pub fn class_blocks(&self, degree: i32) -> impl Iterator<Item = (i32, HodgeType, &ClassBlock)> {
        self.classes
            .range((degree, i32::MIN, HodgeType(i32::MIN, i32::MIN))..=(degree, i32::MAX, HodgeType(i32::MAX, i32::MAX)))
            .map(|(&(_, w, h), b)| (w, h, b))
    }

    /// Only the given degree.
    pub fn restricted_to(&self, degree: i32) -> MixedHodgeTable {
        MixedHodgeTable {
            complex: self.complex.clone(),
            degrees: self.degrees.iter().filter(|d| d.degree == degree).cloned().collect(),
            classes: self
                .classes
                .iter()
                .filter(|(k, _)| k.0 == degree)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    /// Relabels `H^m` as `H^{m + by}`; representatives are kept.
    pub fn shifted(&self, by: i32) -> MixedHodgeTable {
        MixedHodgeTable {
            complex: self.complex.clone(),
            degrees: self
                .degrees
                .iter()
                .map(|d| DegreeTable {
                    degree: d.degree + by,
                    ..d.clone()
                })
                .collect(),
            classes: self.classes.iter().map(|(k, v)| ((k.0 + by, k.1, k.2), v.clone())).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tables serialize")
    }

    /// One aligned line per `(degree, weight, type)` entry.
    pub fn to_text(&self) -> String {
        let mut out = format!("complex {}\n", self.complex);
        let _ = writeln!(out, "{:>6} {:>6} {:>8} {:>5}", "degree", "weight", "type", "dim");
        for d in &self.degrees {
            for e in &d.entries {
                let _ = writeln!(out, "{:>6} {:>6} {:>8} {:>5}", d.degree, e.weight, e.hodge.to_string(), e.dim);
            }
        }
        let betti: Vec<String> = self.degrees.iter().map(|d| format!("b{}={}", d.degree, d.betti)).collect();
        let _ = writeln!(out, "betti {}", betti.join(" "));
        out
    }
}

/// Cohomology of every `(weight, degree, type)` block of a row family.
pub fn compute_table(rows: &RowFamily) -> Result<MixedHodgeTable, MhsError> {
    let mut per_degree: BTreeMap<i32, Vec<TableEntry>> = BTreeMap::new();
    for d in rows.degrees() {
        per_degree.insert(d, Vec::new());
    }
    let mut classes = BTreeMap::new();
    for (&w, row) in rows.rows() {
        for &m in row.degrees.keys() {
            let types = |deg: i32| rows.space_types(rows.terms_at(w, deg));
            let (t_in, t_here, t_out) = (types(m - 1), types(m), types(m + 1));
            let (d_in, d_out) = (rows.differential(w, m - 1), rows.differential(w, m));
            let mut present = t_here.clone();
            present.sort();
            present.dedup();
            for ty in present {
                let sel = |ts: &[HodgeType]| -> Vec<usize> { (0..ts.len()).filter(|&i| ts[i] == ty).collect() };
                let (s_in, s_here, s_out) = (sel(&t_in), sel(&t_here), sel(&t_out));
                let h = cohomology_at(&d_in.select(&s_here, &s_in), &d_out.select(&s_out, &s_here)).map_err(|e| {
                    MhsError::Linalg {
                        family: rows.name().to_string(),
                        weight: w,
                        degree: m,
                        source: e,
                    }
                })?;
                if h.dim == 0 {
                    continue;
                }
                let representatives = h
                    .representatives
                    .iter()
                    .map(|r| {
                        let mut full = vec![Q::zero(); t_here.len()];
                        for (x, &i) in r.iter().zip(&s_here) {
                            full[i] = x.clone();
                        }
                        full
                    })
                    .collect();
                per_degree.entry(m).or_default().push(TableEntry {
                    weight: w,
                    hodge: ty,
                    dim: h.dim,
                });
                classes.insert(
                    (m, w, ty),
                    ClassBlock {
                        coords: s_here,
                        ambient: t_here.len(),
                        representatives,
                        cohomology: h,
                    },
                );
            }
        }
    }
    let degrees = per_degree
        .into_iter()
        .map(|(degree, mut entries)| {
            entries.sort_by_key(|e| (e.weight, e.hodge));
            DegreeTable {
                degree,
                betti: entries.iter().map(|e| e.dim).sum(),
                entries,
            }
        })
        .collect();
    Ok(MixedHodgeTable {
        complex: rows.name().to_string(),
        degrees,
        classes,
    })
}

/// Map on cohomology induced by `f` from `H^{src_degree}` of `src` to
/// `H^{tgt_degree}` of `tgt`, one matrix per `(weight, type)` block present
/// on either side. Blocks are `target dim x source dim`.
pub fn induced_map(
    f: &Blocks,
    src: &RowFamily,
    src_table: &MixedHodgeTable,
    src_degree: i32,
    tgt: &RowFamily,
    tgt_table: &MixedHodgeTable,
    tgt_degree: i32,
) -> Result<BTreeMap<(i32, HodgeType), RationalMatrix>, LinalgError> {
    let mut out = BTreeMap::new();
    for (w, h, block) in src_table.class_blocks(src_degree) {
        let m = assemble(f, src.terms_at(w, src_degree), &src.dims(), tgt.terms_at(w, tgt_degree), &tgt.dims());
        let target = tgt_table.classes(tgt_degree, w, h);
        let rows = target.map_or(0, |t| t.representatives.len());
        let mut columns = Vec::new();
        for r in &block.representatives {
            let image = m.mul_vec(r)?;
            columns.push(match target {
                Some(t) => t.coordinates(&image)?,
                None => Vec::new(),
            });
        }
        out.insert((w, h), RationalMatrix::from_columns(&columns, rows));
    }
    for (w, h, block) in tgt_table.class_blocks(tgt_degree) {
        out.entry((w, h))
            .or_insert_with(|| RationalMatrix::zeros(block.representatives.len(), 0));
    }
    Ok(out)
}

/// Alternating sums per weight agree on the terms and on the table.
pub fn euler_check(table: &MixedHodgeTable, rows: &RowFamily) -> bool {
    let mut chi: BTreeMap<i32, i64> = BTreeMap::new();
    for t in rows.terms() {
        *chi.entry(t.weight()).or_default() += alternating(t.degree(), t.dim());
    }
    for d in &table.degrees {
        for e in &d.entries {
            *chi.entry(e.weight).or_default() -= alternating(d.degree, e.dim);
        }
    }
    chi.values().all(|&v| v == 0)
}

fn alternating(degree: i32, dim: usize) -> i64 {
    if degree.rem_euclid(2) == 0 {
        dim as i64
    } else {
        -(dim as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableDifference {
    pub degree: i32,
    pub weight: i32,
    #[serde(rename = "type")]
    pub hodge: HodgeType,
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableComparison {
    pub equal: bool,
    pub first_difference: Option<TableDifference>,
}

/// Compares dimension data, reporting the first `(degree, weight, type)`
/// where the tables disagree.
pub fn compare_tables(t1: &MixedHodgeTable, t2: &MixedHodgeTable) -> TableComparison {
    let mut keys = Vec::new();
    for t in [t1, t2] {
        for d in &t.degrees {
            for e in &d.entries {
                keys.push((d.degree, e.weight, e.hodge));
            }
        }
    }
    keys.sort();
    keys.dedup();
    let first_difference = keys.into_iter().find_map(|(m, w, h)| {
        let (left, right) = (t1.dim(m, w, h), t2.dim(m, w, h));
        (left != right).then_some(TableDifference {
            degree: m,
            weight: w,
            hodge: h,
            left,
            right,
        })
    });
    TableComparison {
        equal: first_difference.is_none(),
        first_difference,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use crate::atlas::{generic_arrangement, load_atlas};
    use crate::complexes::{build, cone_rows, rows_constant, ComplexSelector, FamilyMorphism};

    #[test]
    fn projective_plane() {
        let t = compute_table(&rows_constant(&generic_arrangement(2, 0).unwrap()).unwrap()).unwrap();
        assert_eq!(t.entries(0), &[TableEntry { weight: 0, hodge: HodgeType(0, 0), dim: 1 }]);
        assert_eq!(t.entries(2), &[TableEntry { weight: 2, hodge: HodgeType(1, 1), dim: 1 }]);
        assert_eq!(t.entries(4), &[TableEntry { weight: 4, hodge: HodgeType(2, 2), dim: 1 }]);
    }

    #[test]
    fn complement_of_three_lines() {
        let atlas = generic_arrangement(2, 3).unwrap();
        let t = compute_table(&build(&atlas, &ComplexSelector::Log).unwrap()).unwrap();
        assert_eq!(t.dim(0, 0, HodgeType(0, 0)), 1);
        assert_eq!(t.dim(1, 2, HodgeType(1, 1)), 2);
        assert_eq!(t.dim(2, 4, HodgeType(2, 2)), 1);
        assert_eq!((t.betti(0), t.betti(1), t.betti(2)), (1, 2, 1));
    }

    #[test]
    fn top_degree_of_the_pair() {
        let atlas = generic_arrangement(1, 2).unwrap();
        let t = compute_table(&build(&atlas, &ComplexSelector::XD).unwrap()).unwrap();
        assert_eq!(t.entries(2), &[TableEntry { weight: 2, hodge: HodgeType(1, 1), dim: 1 }]);
        assert_eq!(t.entries(1), &[TableEntry { weight: 0, hodge: HodgeType(0, 0), dim: 1 }]);
    }

    #[test]
    fn elliptic_curve_types() {
        let atlas = load_atlas(include_str!("../fixtures/elliptic_1pt.json")).unwrap();
        let t = compute_table(&build(&atlas, &ComplexSelector::X).unwrap()).unwrap();
        assert_eq!(t.dim(1, 1, HodgeType(1, 0)), 1);
        assert_eq!(t.dim(1, 1, HodgeType(0, 1)), 1);
    }

    #[test]
    fn euler_detects_a_bumped_dimension() {
        let atlas = generic_arrangement(2, 3).unwrap();
        let rows = build(&atlas, &ComplexSelector::XDTilde).unwrap();
        let mut t = compute_table(&rows).unwrap();
        assert!(euler_check(&t, &rows));
        t.degrees[0].entries.push(TableEntry { weight: 0, hodge: HodgeType(0, 0), dim: 1 });
        assert!(!euler_check(&t, &rows));
    }

    #[test]
    fn comparison_reports_first_difference() {
        let atlas = generic_arrangement(1, 2).unwrap();
        let xd = compute_table(&build(&atlas, &ComplexSelector::XD).unwrap()).unwrap();
        let x = compute_table(&build(&atlas, &ComplexSelector::X).unwrap()).unwrap();
        let c = compare_tables(&xd, &x);
        assert!(!c.equal);
        let diff = c.first_difference.unwrap();
        assert_eq!((diff.degree, diff.weight, diff.left, diff.right), (0, 0, 0, 1));
        assert!(compare_tables(&xd, &xd).equal);
    }

    #[test]
    fn zero_cone_is_a_direct_sum() {
        let atlas = generic_arrangement(2, 3).unwrap();
        let a = build(&atlas, &ComplexSelector::Log).unwrap();
        let b = build(&atlas, &ComplexSelector::D).unwrap();
        let zero = FamilyMorphism {
            name: "0".into(),
            blocks: Default::default(),
        };
        let sum = compute_table(&cone_rows("sum", &a, &b, &zero, true).unwrap()).unwrap();
        let (ta, tb) = (compute_table(&a).unwrap(), compute_table(&b).unwrap().shifted(1));
        for m in -1..6 {
            for w in 0..=4 {
                for x in 0..=w {
                    let h = HodgeType(x, w - x);
                    assert_eq!(sum.dim(m, w, h), ta.dim(m, w, h) + tb.dim(m, w, h));
                }
            }
        }
    }

    #[test]
    fn class_coordinates_of_representatives() {
        let atlas = generic_arrangement(2, 3).unwrap();
        let t = compute_table(&build(&atlas, &ComplexSelector::Log).unwrap()).unwrap();
        let block = t.classes(1, 2, HodgeType(1, 1)).unwrap();
        for (i, r) in block.representatives.iter().enumerate() {
            let c = block.coordinates(r).unwrap();
            assert!(c.iter().enumerate().all(|(k, x)| (*x == Q::one()) == (k == i)));
        }
    }

    #[test]
    fn text_table_is_aligned() {
        let atlas = generic_arrangement(1, 2).unwrap();
        let t = compute_table(&build(&atlas, &ComplexSelector::Log).unwrap()).unwrap();
        let text = t.to_text();
        assert!(text.contains("     1      2    (1,1)     1"), "{text}");
    }
}
