//! Weight rows of the complexes computing the mixed Hodge structures of
//! `X`, `D`, `U = X \ D`, `(X, D)`, the local cohomology `H_D(X)` and the
//! deleted neighbourhoods of strata.
//!
//! Every complex is stored as a list of pure terms `H^j(T)(-k)` placed in a
//! total degree, together with differential blocks between terms. All blocks
//! are morphisms of pure Hodge structures, so the complex splits into one row
//! per intrinsic weight `q = j + 2k`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::One;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::atlas::{check_block_types, AtlasError, HodgeType, StrataAtlas, StratumId};
use crate::linalg::{sign, RationalMatrix, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("the divisor is empty")]
    EmptyDivisor,
    #[error("unknown stratum `{0}`")]
    UnknownStratum(String),
    #[error("unknown complex selector `{0}`")]
    UnknownSelector(String),
    #[error("{family}: d∘d ≠ 0 in weight {weight}, degree {degree}")]
    NotAComplex { family: String, weight: i32, degree: i32 },
    #[error("{family}: block {from} -> {to} {reason}")]
    InvalidBlock {
        family: String,
        from: String,
        to: String,
        reason: String,
    },
    #[error("morphism {name} does not commute with the differentials in weight {weight}, degree {degree}")]
    NotChainMap { name: String, weight: i32, degree: i32 },
    #[error(transparent)]
    Atlas(#[from] AtlasError),
}

/// Which side of a mapping cone a term comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Part {
    Base,
    Source,
    Target,
}

/// `H^j(stratum)(-twist)` with residue symbols `residue`, sitting in the
/// local system of `center` at simplicial level `simplicial`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PureTerm {
    pub stratum: StratumId,
    pub center: StratumId,
    pub residue: Vec<usize>,
    pub j: usize,
    pub twist: usize,
    pub simplicial: usize,
    pub part: Part,
    /// Extra degree shift picked up inside mapping cones.
    pub shift: i32,
    pub types: Vec<HodgeType>,
}

impl PureTerm {
    pub fn degree(&self) -> i32 {
        (self.j + self.twist + self.simplicial) as i32 + self.shift
    }

    pub fn weight(&self) -> i32 {
        (self.j + 2 * self.twist) as i32
    }

    pub fn dim(&self) -> usize {
        self.types.len()
    }

    fn key(&self) -> TermKey {
        (self.part, self.center, self.stratum, self.residue.clone(), self.j)
    }

    pub fn describe(&self, atlas: &StrataAtlas) -> String {
        let mut s = format!("H^{}({})", self.j, atlas.label(self.stratum));
        if self.twist > 0 {
            s.push_str(&format!("(-{})", self.twist));
        }
        if !self.residue.is_empty() {
            let r: Vec<String> = self.residue.iter().map(|a| atlas.components()[*a].clone()).collect();
            s.push_str(&format!(" res[{}]", r.join(",")));
        }
        if self.center != atlas.ambient() || self.simplicial > 0 {
            s.push_str(&format!(" @{}", atlas.label(self.center)));
        }
        match self.part {
            Part::Base => {}
            Part::Source => s.push_str(" [src]"),
            Part::Target => s.push_str(" [tgt]"),
        }
        s
    }
}

impl fmt::Display for PureTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "H^{}({})(-{}) p={} res={:?} deg={}",
            self.j, self.stratum, self.twist, self.simplicial, self.residue, self.degree()
        )
    }
}

type TermKey = (Part, StratumId, StratumId, Vec<usize>, usize);

/// Block matrices between terms, keyed by `(source term, target term)`.
pub type Blocks = BTreeMap<(usize, usize), RationalMatrix>;

/// The complex of weight `q`: terms per degree and the assembled
/// differentials `degree m -> m + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightRow {
    pub weight: i32,
    pub degrees: BTreeMap<i32, Vec<usize>>,
}

impl WeightRow {
    pub fn terms_at(&self, degree: i32) -> &[usize] {
        self.degrees.get(&degree).map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Debug, Clone)]
pub struct RowFamily {
    name: String,
    terms: Vec<PureTerm>,
    blocks: Blocks,
    rows: BTreeMap<i32, WeightRow>,
    index: HashMap<TermKey, usize>,
}

impl RowFamily {
    /// Checks every block (degree +1, weight and Hodge type preserved) and
    /// `d∘d = 0` on every weight row.
    pub fn new(name: impl Into<String>, terms: Vec<PureTerm>, blocks: Blocks) -> Result<Self, ComplexError> {
        let name = name.into();
        for (&(s, t), m) in &blocks {
            let (src, tgt) = (&terms[s], &terms[t]);
            let invalid = |reason: &str| ComplexError::InvalidBlock {
                family: name.clone(),
                from: src.to_string(),
                to: tgt.to_string(),
                reason: reason.to_string(),
            };
            if m.rows() != tgt.dim() || m.cols() != src.dim() {
                return Err(invalid("has the wrong shape"));
            }
            if tgt.degree() != src.degree() + 1 {
                return Err(invalid("does not raise the degree by one"));
            }
            if tgt.weight() != src.weight() {
                return Err(invalid("changes the weight"));
            }
            if check_block_types(m, &src.types, &tgt.types, HodgeType(0, 0)).is_err() {
                return Err(invalid("mixes Hodge types"));
            }
        }
        let mut rows: BTreeMap<i32, WeightRow> = BTreeMap::new();
        let mut index = HashMap::new();
        for (i, t) in terms.iter().enumerate() {
            index.insert(t.key(), i);
            rows.entry(t.weight())
                .or_insert_with(|| WeightRow {
                    weight: t.weight(),
                    degrees: BTreeMap::new(),
                })
                .degrees
                .entry(t.degree())
                .or_default()
                .push(i);
        }
        let family = RowFamily {
            name,
            terms,
            blocks,
            rows,
            index,
        };
        for row in family.rows.values() {
            for &m in row.degrees.keys() {
                let dd = family.differential(row.weight, m + 1).mul(&family.differential(row.weight, m));
                if !dd.expect("assembled shapes agree").is_zero() {
                    return Err(ComplexError::NotAComplex {
                        family: family.name.clone(),
                        weight: row.weight,
                        degree: m,
                    });
                }
            }
        }
        Ok(family)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn terms(&self) -> &[PureTerm] {
        &self.terms
    }

    pub fn blocks(&self) -> &Blocks {
        &self.blocks
    }

    pub fn rows(&self) -> &BTreeMap<i32, WeightRow> {
        &self.rows
    }

    pub fn weights(&self) -> Vec<i32> {
        self.rows.keys().copied().collect()
    }

    /// All degrees carrying a term, sorted.
    pub fn degrees(&self) -> Vec<i32> {
        let mut d: Vec<i32> = self.terms.iter().map(PureTerm::degree).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn terms_at(&self, weight: i32, degree: i32) -> &[usize] {
        self.rows.get(&weight).map_or(&[], |r| r.terms_at(degree))
    }

    /// All terms of a degree, ordered by weight then insertion.
    pub fn terms_in_degree(&self, degree: i32) -> Vec<usize> {
        self.rows.values().flat_map(|r| r.terms_at(degree).iter().copied()).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.terms.iter().map(PureTerm::dim).collect()
    }

    pub fn space_dim(&self, terms: &[usize]) -> usize {
        terms.iter().map(|&t| self.terms[t].dim()).sum()
    }

    /// Hodge type of every coordinate of the space spanned by `terms`.
    pub fn space_types(&self, terms: &[usize]) -> Vec<HodgeType> {
        terms.iter().flat_map(|&t| self.terms[t].types.iter().copied()).collect()
    }

    /// Differential of the weight row `weight` from degree `degree`.
    pub fn differential(&self, weight: i32, degree: i32) -> RationalMatrix {
        let dims = self.dims();
        assemble(
            &self.blocks,
            self.terms_at(weight, degree),
            &dims,
            self.terms_at(weight, degree + 1),
            &dims,
        )
    }

    /// Differential on the whole degree, all weights together.
    pub fn total_differential(&self, degree: i32) -> RationalMatrix {
        let dims = self.dims();
        assemble(
            &self.blocks,
            &self.terms_in_degree(degree),
            &dims,
            &self.terms_in_degree(degree + 1),
            &dims,
        )
    }

    pub fn find(&self, part: Part, center: StratumId, stratum: StratumId, residue: &[usize], j: usize) -> Option<usize> {
        self.index.get(&(part, center, stratum, residue.to_vec(), j)).copied()
    }

    /// Term inventory and differential blocks, for debugging.
    pub fn to_json(&self, atlas: &StrataAtlas) -> serde_json::Value {
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|t| {
                json!({
                    "term": t.describe(atlas),
                    "degree": t.degree(),
                    "weight": t.weight(),
                    "dim": t.dim(),
                    "types": t.types.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
                })
            })
            .collect();
        let blocks: Vec<_> = self
            .blocks
            .iter()
            .map(|(&(s, t), m)| {
                let rows: Vec<Vec<String>> =
                    m.to_rows().into_iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
                json!({"from": s, "to": t, "matrix": rows})
            })
            .collect();
        json!({"name": self.name, "terms": terms, "blocks": blocks})
    }
}

/// Places the blocks between the listed terms into one matrix.
pub fn assemble(
    blocks: &Blocks,
    src_terms: &[usize],
    src_dims: &[usize],
    tgt_terms: &[usize],
    tgt_dims: &[usize],
) -> RationalMatrix {
    let offsets = |terms: &[usize], dims: &[usize]| {
        let mut map = HashMap::new();
        let mut off = 0;
        for &t in terms {
            map.insert(t, off);
            off += dims[t];
        }
        (map, off)
    };
    let (src_off, cols) = offsets(src_terms, src_dims);
    let (tgt_off, rows) = offsets(tgt_terms, tgt_dims);
    let mut m = RationalMatrix::zeros(rows, cols);
    for (&(s, t), block) in blocks {
        if let (Some(&c), Some(&r)) = (src_off.get(&s), tgt_off.get(&t)) {
            m.place(r, c, block);
        }
    }
    m
}

fn add_block(blocks: &mut Blocks, key: (usize, usize), m: RationalMatrix) {
    match blocks.get_mut(&key) {
        Some(existing) => existing.add_assign(&m).expect("blocks between the same terms agree in shape"),
        None => {
            blocks.insert(key, m);
        }
    }
}

/// A degree- and weight-preserving map between two row families.
#[derive(Debug, Clone)]
pub struct FamilyMorphism {
    pub name: String,
    pub blocks: Blocks,
}

impl FamilyMorphism {
    pub fn matrix(&self, source: &RowFamily, target: &RowFamily, weight: i32, degree: i32) -> RationalMatrix {
        assemble(
            &self.blocks,
            source.terms_at(weight, degree),
            &source.dims(),
            target.terms_at(weight, degree),
            &target.dims(),
        )
    }

    /// Weight, degree and type compatibility of every block plus
    /// `f ∘ d = d ∘ f` on every weight row.
    pub fn check(&self, source: &RowFamily, target: &RowFamily) -> Result<(), ComplexError> {
        for (&(s, t), m) in &self.blocks {
            let (src, tgt) = (&source.terms[s], &target.terms[t]);
            let ok = m.rows() == tgt.dim()
                && m.cols() == src.dim()
                && src.weight() == tgt.weight()
                && src.degree() == tgt.degree()
                && check_block_types(m, &src.types, &tgt.types, HodgeType(0, 0)).is_ok();
            if !ok {
                return Err(ComplexError::InvalidBlock {
                    family: self.name.clone(),
                    from: src.to_string(),
                    to: tgt.to_string(),
                    reason: "is not a morphism of pure Hodge structures of the same degree".into(),
                });
            }
        }
        for &w in source.rows.keys() {
            let mut degrees = source.degrees();
            degrees.extend(target.degrees());
            degrees.sort_unstable();
            degrees.dedup();
            for m in degrees {
                let lhs = target.differential(w, m).mul(&self.matrix(source, target, w, m));
                let rhs = self.matrix(source, target, w, m + 1).mul(&source.differential(w, m));
                if lhs.expect("shapes") != rhs.expect("shapes") {
                    return Err(ComplexError::NotChainMap {
                        name: self.name.clone(),
                        weight: w,
                        degree: m,
                    });
                }
            }
        }
        Ok(())
    }

    /// Injective on every (weight, degree, Hodge type) block.
    pub fn is_blockwise_injective(&self, source: &RowFamily, target: &RowFamily) -> bool {
        for (&w, row) in &source.rows {
            for &m in row.degrees.keys() {
                let f = self.matrix(source, target, w, m);
                let src_types = source.space_types(source.terms_at(w, m));
                let tgt_types = target.space_types(target.terms_at(w, m));
                let mut types = src_types.clone();
                types.sort();
                types.dedup();
                for ty in types {
                    let cols: Vec<usize> = (0..src_types.len()).filter(|&i| src_types[i] == ty).collect();
                    let rows: Vec<usize> = (0..tgt_types.len()).filter(|&i| tgt_types[i] == ty).collect();
                    if f.select(&rows, &cols).rank() != cols.len() {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Mapping cone of `f: source -> target`. With `shift` the result is
/// `Cone(f)[-1]`: degree `m` holds `source^m ⊕ target^{m-1}` and
/// `d(a, b) = (d a, f a - d b)`. Without it, degree `m` holds
/// `source^{m+1} ⊕ target^m` and `d(a, b) = (-d a, f a + d b)`.
pub fn cone_rows(
    name: &str,
    source: &RowFamily,
    target: &RowFamily,
    f: &FamilyMorphism,
    shift: bool,
) -> Result<RowFamily, ComplexError> {
    f.check(source, target)?;
    let n = source.terms.len();
    let mut terms = Vec::with_capacity(n + target.terms.len());
    for t in &source.terms {
        terms.push(PureTerm {
            part: Part::Source,
            shift: t.shift - i32::from(!shift),
            ..t.clone()
        });
    }
    for t in &target.terms {
        terms.push(PureTerm {
            part: Part::Target,
            shift: t.shift + i32::from(shift),
            ..t.clone()
        });
    }
    let mut blocks = Blocks::new();
    let (a_sign, b_sign) = if shift { (Q::one(), -Q::one()) } else { (-Q::one(), Q::one()) };
    for (&(s, t), m) in &source.blocks {
        blocks.insert((s, t), m.scaled(&a_sign));
    }
    for (&(s, t), m) in &target.blocks {
        blocks.insert((n + s, n + t), m.scaled(&b_sign));
    }
    for (&(s, t), m) in &f.blocks {
        add_block(&mut blocks, (s, n + t), m.clone());
    }
    RowFamily::new(name, terms, blocks)
}

/// Projection of a cone built by [`cone_rows`] onto its source terms.
pub fn cone_projection(source: &RowFamily) -> Blocks {
    (0..source.terms.len())
        .map(|i| ((i, i), RationalMatrix::identity(source.terms[i].dim())))
        .collect()
}

/// Inclusion of the target terms into a cone built by [`cone_rows`]; it
/// raises the degree by one when the cone is shifted.
pub fn cone_inclusion(source: &RowFamily, target: &RowFamily) -> Blocks {
    let n = source.terms.len();
    (0..target.terms.len())
        .map(|k| ((k, n + k), RationalMatrix::identity(target.terms[k].dim())))
        .collect()
}

/// Keeps only the terms selected by `keep` and the blocks between them.
/// This is a quotient complex when the dropped terms form a subcomplex.
pub fn restrict_terms(name: &str, family: &RowFamily, keep: impl Fn(&PureTerm) -> bool) -> Result<RowFamily, ComplexError> {
    let mut new_index = HashMap::new();
    let mut terms = Vec::new();
    for (i, t) in family.terms.iter().enumerate() {
        if keep(t) {
            new_index.insert(i, terms.len());
            terms.push(t.clone());
        }
    }
    let blocks = family
        .blocks
        .iter()
        .filter_map(|(&(s, t), m)| Some(((*new_index.get(&s)?, *new_index.get(&t)?), m.clone())))
        .collect();
    RowFamily::new(name, terms, blocks)
}

/// The local systems shared by all the logarithmic and simplicial complexes.
///
/// At a center `C` the twisted system has a term `H^j(T)(-|I|)` for every
/// stratum `T ⊆ C` and residue set `I` with `I ∪ I_C = I_T`; the untwisted
/// system only has `H^j(C)`. Removing `a` from `I` is the Gysin map to the
/// parent of `T` along `a`, or multiplication by `c(a, T)` when `a ∈ I_C`.
/// Centers one level apart are glued by restriction (Čech direction).
struct LogSystem<'a> {
    atlas: &'a StrataAtlas,
    twisted: bool,
    simplicial: bool,
    centers: Vec<StratumId>,
}

impl<'a> LogSystem<'a> {
    fn level(&self, c: StratumId) -> usize {
        if self.simplicial {
            self.atlas.indices(c).len() - 1
        } else {
            0
        }
    }

    fn local_terms(&self, c: StratumId) -> Vec<PureTerm> {
        let atlas = self.atlas;
        let ic = atlas.indices(c);
        let mut out = Vec::new();
        let strata: Vec<StratumId> = if self.twisted {
            atlas.stratum_ids().filter(|&t| atlas.contains(c, t)).collect()
        } else {
            vec![c]
        };
        for t in strata {
            let outside: Vec<usize> = atlas.indices(t).iter().copied().filter(|a| !ic.contains(a)).collect();
            let subsets: Vec<Vec<usize>> = if self.twisted {
                (0u32..1 << ic.len())
                    .map(|mask| (0..ic.len()).filter(|i| mask & (1 << i) != 0).map(|i| ic[i]).collect())
                    .collect()
            } else {
                vec![Vec::new()]
            };
            for k in subsets {
                let mut residue: Vec<usize> = outside.iter().chain(&k).copied().collect();
                residue.sort_unstable();
                let ring = atlas.ring(t);
                for j in 0..=ring.top_degree() {
                    if ring.dim(j) == 0 {
                        continue;
                    }
                    let twist = HodgeType::twist(residue.len());
                    out.push(PureTerm {
                        stratum: t,
                        center: c,
                        residue: residue.clone(),
                        j,
                        twist: residue.len(),
                        simplicial: self.level(c),
                        part: Part::Base,
                        shift: 0,
                        types: ring.types(j).into_iter().map(|h| h.shifted(twist)).collect(),
                    });
                }
            }
        }
        out
    }

    fn build(&self, name: &str) -> Result<RowFamily, ComplexError> {
        let mut terms = Vec::new();
        for &c in &self.centers {
            terms.extend(self.local_terms(c));
        }
        let lookup: HashMap<TermKey, usize> = terms.iter().enumerate().map(|(i, t)| (t.key(), i)).collect();
        let mut blocks = Blocks::new();
        for (i, t) in terms.iter().enumerate() {
            for (target, m) in self.residue_images(t) {
                if let Some(&k) = lookup.get(&target) {
                    add_block(&mut blocks, (i, k), m);
                }
            }
            for &c2 in &self.centers {
                for (target, m) in cech_images(self.atlas, t, c2) {
                    if let Some(&k) = lookup.get(&target) {
                        add_block(&mut blocks, (i, k), m);
                    }
                }
            }
        }
        RowFamily::new(name, terms, blocks)
    }

    fn residue_images(&self, t: &PureTerm) -> Vec<(TermKey, RationalMatrix)> {
        let atlas = self.atlas;
        let ic = atlas.indices(t.center);
        let mut out = Vec::new();
        for (r, &a) in t.residue.iter().enumerate() {
            let s = sign((r + t.simplicial) % 2 == 1);
            let rest: Vec<usize> = t.residue.iter().copied().filter(|&b| b != a).collect();
            let (stratum, m) = if ic.contains(&a) {
                (t.stratum, atlas.chern_multiplication(a, t.stratum, t.j))
            } else {
                let p = atlas.parent(t.stratum, a).expect("residue indices lie in I_T");
                (p, atlas.gysin(t.stratum, p, t.j))
            };
            out.push(((t.part, t.center, stratum, rest, t.j + 2), m.scaled(&s)));
        }
        out
    }
}

/// Restriction from the local system at `t.center` to the one at `c2`, when
/// `c2` is a child of the center along one more component. The sign is
/// `(-1)^r` where `r` is the position of the new component in `I_{c2}`.
fn cech_images(atlas: &StrataAtlas, t: &PureTerm, c2: StratumId) -> Vec<(TermKey, RationalMatrix)> {
    let (i1, i2) = (atlas.indices(t.center), atlas.indices(c2));
    if i2.len() != i1.len() + 1 {
        return Vec::new();
    }
    let Some(b) = i2.iter().copied().find(|a| !i1.contains(a)) else {
        return Vec::new();
    };
    if atlas.parent(c2, b) != Some(t.center) {
        return Vec::new();
    }
    let pos = i2.iter().position(|&a| a == b).unwrap();
    let s = sign(pos % 2 == 1);
    let mut out = Vec::new();
    if atlas.indices(t.stratum).contains(&b) {
        if atlas.contains(c2, t.stratum) {
            let m = RationalMatrix::identity(t.dim()).scaled(&s);
            out.push(((t.part, c2, t.stratum, t.residue.clone(), t.j), m));
        }
    } else {
        for &t2 in atlas.children(t.stratum, b) {
            if atlas.contains(c2, t2) {
                let m = atlas.covering_restriction(t.stratum, t2, t.j).scaled(&s);
                out.push(((t.part, c2, t2, t.residue.clone(), t.j), m));
            }
        }
    }
    out
}

fn divisor_centers(atlas: &StrataAtlas) -> Vec<StratumId> {
    atlas.stratum_ids().filter(|&s| !atlas.indices(s).is_empty()).collect()
}

/// `H^q(X)` in degree `q`, zero differential.
pub fn rows_constant(atlas: &StrataAtlas) -> Result<RowFamily, ComplexError> {
    LogSystem {
        atlas,
        twisted: false,
        simplicial: false,
        centers: vec![atlas.ambient()],
    }
    .build("X")
}

/// Residue/Gysin complex of `U = X \ D`.
pub fn rows_log(atlas: &StrataAtlas) -> Result<RowFamily, ComplexError> {
    LogSystem {
        atlas,
        twisted: true,
        simplicial: false,
        centers: vec![atlas.ambient()],
    }
    .build("log")
}

pub(crate) fn sum_strata(atlas: &StrataAtlas) -> Result<RowFamily, ComplexError> {
    LogSystem {
        atlas,
        twisted: false,
        simplicial: true,
        centers: divisor_centers(atlas),
    }
    .build("D")
}

/// Čech complex of the strata computing `H(D)`.
pub fn rows_sum_strata(atlas: &StrataAtlas) -> Result<RowFamily, ComplexError> {
    if !atlas.has_divisor() {
        return Err(ComplexError::EmptyDivisor);
    }
    sum_strata(atlas)
}

/// Deleted neighbourhood of the stratum `c`.
pub fn rows_stratum_log(atlas: &StrataAtlas, c: StratumId) -> Result<RowFamily, ComplexError> {
    LogSystem {
        atlas,
        twisted: true,
        simplicial: false,
        centers: vec![c],
    }
    .build(format!("nbhd:{}", atlas.label(c)).as_str())
}

fn semisimplicial_log(atlas: &StrataAtlas) -> Result<RowFamily, ComplexError> {
    LogSystem {
        atlas,
        twisted: true,
        simplicial: true,
        centers: divisor_centers(atlas),
    }
    .build("DlogD")
}

/// Total complex of the deleted neighbourhoods of all strata of `D`, glued
/// along the Čech direction. Computes the cohomology of the deleted
/// neighbourhood of `D`.
pub fn rows_semisimplicial_log(atlas: &StrataAtlas) -> Result<RowFamily, ComplexError> {
    if !atlas.has_divisor() {
        return Err(ComplexError::EmptyDivisor);
    }
    semisimplicial_log(atlas)
}

/// Restriction from the ambient local system to the first simplicial level
/// (`i^*: K(X) -> K(D)` and its logarithmic version).
pub fn restriction_morphism(atlas: &StrataAtlas, source: &RowFamily, target: &RowFamily) -> FamilyMorphism {
    let mut blocks = Blocks::new();
    for (i, t) in source.terms.iter().enumerate() {
        for c in atlas.strata_of_size(1) {
            for (key, m) in cech_images(atlas, t, c) {
                let key = (Part::Base, key.1, key.2, key.3, key.4);
                if let Some(&k) = target.index.get(&key) {
                    add_block(&mut blocks, (i, k), m);
                }
            }
        }
    }
    FamilyMorphism {
        name: format!("{} -> {}", source.name, target.name),
        blocks,
    }
}

/// Inclusion of the untwisted terms (`u: K(X) -> K(X log D)` and
/// `v: K(D) -> K(D log D)`).
pub fn inclusion_morphism(source: &RowFamily, target: &RowFamily) -> FamilyMorphism {
    let mut blocks = Blocks::new();
    for (i, t) in source.terms.iter().enumerate() {
        if let Some(&k) = target.index.get(&t.key()) {
            blocks.insert((i, k), RationalMatrix::identity(t.dim()));
        }
    }
    FamilyMorphism {
        name: format!("{} -> {}", source.name, target.name),
        blocks,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ComplexSelector {
    X,
    D,
    Log,
    XD,
    XDTilde,
    LocD,
    LocDTilde,
    DlogD,
    Nbhd(String),
}

impl ComplexSelector {
    pub fn parse(s: &str) -> Result<Self, ComplexError> {
        if let Some(label) = s.strip_prefix("nbhd:") {
            return Ok(ComplexSelector::Nbhd(label.to_string()));
        }
        Ok(match s.to_ascii_lowercase().as_str() {
            "x" => ComplexSelector::X,
            "d" => ComplexSelector::D,
            "log" => ComplexSelector::Log,
            "xd" => ComplexSelector::XD,
            "xd-tilde" => ComplexSelector::XDTilde,
            "locd" => ComplexSelector::LocD,
            "locd-tilde" => ComplexSelector::LocDTilde,
            "dlogd" => ComplexSelector::DlogD,
            _ => return Err(ComplexError::UnknownSelector(s.to_string())),
        })
    }

    /// The complexes every consistency suite runs over.
    pub fn standard() -> Vec<ComplexSelector> {
        use ComplexSelector::*;
        vec![X, D, Log, XD, XDTilde, LocD, LocDTilde, DlogD]
    }
}

impl fmt::Display for ComplexSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ComplexSelector::X => "x",
            ComplexSelector::D => "d",
            ComplexSelector::Log => "log",
            ComplexSelector::XD => "xd",
            ComplexSelector::XDTilde => "xd-tilde",
            ComplexSelector::LocD => "locd",
            ComplexSelector::LocDTilde => "locd-tilde",
            ComplexSelector::DlogD => "dlogd",
            ComplexSelector::Nbhd(l) => return write!(f, "nbhd:{l}"),
        };
        f.write_str(s)
    }
}

/// Builds the row family of a selected complex. The pair and local
/// complexes are shifted cones, so `H^m` of the result sits in degree `m`:
///
/// * `xd` = `Cone(K(X) -> K(D))[-1]`, `xd-tilde` = `Cone(K(X log D) -> K(D log D))[-1]`
/// * `locd` = `Cone(K(X) -> K(X log D))[-1]`, `locd-tilde` = `Cone(K(D) -> K(D log D))[-1]`
///
/// With an empty divisor `D` and `dlogd` have no terms.
pub fn build(atlas: &StrataAtlas, which: &ComplexSelector) -> Result<RowFamily, ComplexError> {
    let name = which.to_string();
    match which {
        ComplexSelector::X => rows_constant(atlas),
        ComplexSelector::D => sum_strata(atlas),
        ComplexSelector::Log => rows_log(atlas),
        ComplexSelector::DlogD => semisimplicial_log(atlas),
        ComplexSelector::Nbhd(label) => {
            let c = atlas.find(label).ok_or_else(|| ComplexError::UnknownStratum(label.clone()))?;
            rows_stratum_log(atlas, c)
        }
        ComplexSelector::XD => {
            let (x, d) = (rows_constant(atlas)?, sum_strata(atlas)?);
            cone_rows(&name, &x, &d, &restriction_morphism(atlas, &x, &d), true)
        }
        ComplexSelector::XDTilde => {
            let (l, dl) = (rows_log(atlas)?, semisimplicial_log(atlas)?);
            cone_rows(&name, &l, &dl, &restriction_morphism(atlas, &l, &dl), true)
        }
        ComplexSelector::LocD => {
            let (x, l) = (rows_constant(atlas)?, rows_log(atlas)?);
            cone_rows(&name, &x, &l, &inclusion_morphism(&x, &l), true)
        }
        ComplexSelector::LocDTilde => {
            let (d, dl) = (sum_strata(atlas)?, semisimplicial_log(atlas)?);
            cone_rows(&name, &d, &dl, &inclusion_morphism(&d, &dl), true)
        }
    }
}

/// `coker(u)`: the terms of `K(X log D)` carrying at least one residue.
pub fn coker_u(atlas: &StrataAtlas) -> Result<RowFamily, ComplexError> {
    restrict_terms("coker-u", &rows_log(atlas)?, |t| t.twist > 0)
}

/// `coker(v)`: the terms of `K(D log D)` carrying at least one residue.
pub fn coker_v(atlas: &StrataAtlas) -> Result<RowFamily, ComplexError> {
    restrict_terms("coker-v", &semisimplicial_log(atlas)?, |t| t.twist > 0)
}
