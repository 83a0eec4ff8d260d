//! Cup products on weight rows, the pairings they induce on cohomology and
//! the duality checks built on them.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::atlas::{HodgeType, StrataAtlas, StratumId};
use crate::complexes::{
    build, coker_u, coker_v, cone_inclusion, cone_projection, inclusion_morphism, restriction_morphism,
    rows_constant, rows_log, sum_strata, ComplexError, ComplexSelector, Part, PureTerm, RowFamily,
};
use crate::linalg::{pairing_perfect, sign, LinalgError, RationalMatrix, Q};
use crate::mhs::{compute_table, induced_map, MhsError, MixedHodgeTable};
use crate::report::Report;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PairingError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Mhs(#[from] MhsError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("the divisor is empty")]
    EmptyDivisor,
    #[error("degree {0} is outside the range of the {1} family")]
    DegreeOutOfRange(i32, &'static str),
    #[error("product block {0} is not weight- and type-additive")]
    NotAdditive(String),
}

/// Product blocks `left ⊗ right -> target`. A block for terms
/// `(t1, t2, t3)` is a `dim t3 x (dim t1 · dim t2)` matrix acting on
/// `x ⊗ y` at column `x · dim t2 + y`.
#[derive(Debug, Clone)]
pub struct GradedPairing {
    pub name: String,
    pub left: RowFamily,
    pub right: RowFamily,
    pub target: RowFamily,
    pub blocks: BTreeMap<(usize, usize, usize), RationalMatrix>,
}

impl GradedPairing {
    fn new(
        name: &str,
        left: RowFamily,
        right: RowFamily,
        target: RowFamily,
        blocks: BTreeMap<(usize, usize, usize), RationalMatrix>,
    ) -> Result<Self, PairingError> {
        let p = GradedPairing {
            name: name.to_string(),
            left,
            right,
            target,
            blocks,
        };
        if let Some(bad) = p.first_non_additive_block() {
            return Err(PairingError::NotAdditive(bad));
        }
        Ok(p)
    }

    /// Weight, degree and type additivity of every nonzero entry.
    pub fn first_non_additive_block(&self) -> Option<String> {
        for (&(a, b, c), m) in &self.blocks {
            let (t1, t2, t3) = (&self.left.terms()[a], &self.right.terms()[b], &self.target.terms()[c]);
            let shape = m.rows() == t3.dim() && m.cols() == t1.dim() * t2.dim();
            let graded = t3.weight() == t1.weight() + t2.weight() && t3.degree() == t1.degree() + t2.degree();
            let mut typed = true;
            if shape {
                for r in 0..m.rows() {
                    for col in 0..m.cols() {
                        let ty = t1.types[col / t2.dim()].shifted(t2.types[col % t2.dim()]);
                        if !m.get(r, col).is_zero() && t3.types[r] != ty {
                            typed = false;
                        }
                    }
                }
            }
            if !(shape && graded && typed) {
                return Some(format!("{t1} x {t2} -> {t3}"));
            }
        }
        None
    }

    /// The product on whole weight-row degree spaces:
    /// `L(w1, m1) ⊗ R(w2, m2) -> T(w1 + w2, m1 + m2)`.
    pub fn product_matrix(&self, w1: i32, m1: i32, w2: i32, m2: i32) -> RationalMatrix {
        let lt = self.left.terms_at(w1, m1);
        let rt = self.right.terms_at(w2, m2);
        let tt = self.target.terms_at(w1 + w2, m1 + m2);
        let offsets = |terms: &[usize], family: &RowFamily| {
            let mut map = BTreeMap::new();
            let mut off = 0;
            for &t in terms {
                map.insert(t, off);
                off += family.terms()[t].dim();
            }
            (map, off)
        };
        let (lo, ld) = offsets(lt, &self.left);
        let (ro, rd) = offsets(rt, &self.right);
        let (to, td) = offsets(tt, &self.target);
        let mut m = RationalMatrix::zeros(td, ld * rd);
        for (&(a, b, c), block) in &self.blocks {
            let (Some(&la), Some(&rb), Some(&tc)) = (lo.get(&a), ro.get(&b), to.get(&c)) else {
                continue;
            };
            let d2 = self.right.terms()[b].dim();
            for r in 0..block.rows() {
                for col in 0..block.cols() {
                    let v = block.get(r, col);
                    if !v.is_zero() {
                        let (x, y) = (col / d2, col % d2);
                        m.set(tc + r, (la + x) * rd + rb + y, v.clone());
                    }
                }
            }
        }
        m
    }

    /// First `(w1, m1, w2, m2)` where `d μ = μ (d ⊗ 1) + (-1)^{m1} μ (1 ⊗ d)`
    /// fails.
    pub fn leibniz_failure(&self) -> Option<(i32, i32, i32, i32)> {
        for (&w1, row1) in self.left.rows() {
            for (&w2, row2) in self.right.rows() {
                for &m1 in row1.degrees.keys() {
                    for &m2 in row2.degrees.keys() {
                        if !self.leibniz_holds(w1, m1, w2, m2) {
                            return Some((w1, m1, w2, m2));
                        }
                    }
                }
            }
        }
        None
    }

    fn leibniz_holds(&self, w1: i32, m1: i32, w2: i32, m2: i32) -> bool {
        let w = w1 + w2;
        let mu = self.product_matrix(w1, m1, w2, m2);
        let lhs = self.target.differential(w, m1 + m2).mul(&mu).expect("shapes");
        let (dl, dr) = (self.left.differential(w1, m1), self.right.differential(w2, m2));
        let id_l = RationalMatrix::identity(dl.cols());
        let id_r = RationalMatrix::identity(dr.cols());
        let mut rhs = self
            .product_matrix(w1, m1 + 1, w2, m2)
            .mul(&dl.kron(&id_r))
            .expect("shapes");
        let second = self
            .product_matrix(w1, m1, w2, m2 + 1)
            .mul(&id_l.kron(&dr))
            .expect("shapes")
            .scaled(&sign(m1.rem_euclid(2) == 1));
        rhs.add_assign(&second).expect("shapes");
        lhs == rhs
    }
}

/// `true` iff the product satisfies the Leibniz rule on every block.
pub fn chain_map_check(pairing: &GradedPairing) -> bool {
    pairing.leibniz_failure().is_none()
}

/// Sign of the shuffle merging the ordered sets `a` and `b`.
fn shuffle_sign(a: &[usize], b: &[usize]) -> Q {
    let inversions: usize = a.iter().map(|x| b.iter().filter(|y| *y < x).count()).sum();
    sign(inversions % 2 == 1)
}

/// Products of `ξ_I x` and `ξ_J y` in the local system of `center`:
/// `(-1)^{j1 |J|} ε(I, J) ξ_{I ∪ J} (x|_T · y|_T)` for every stratum `T` in
/// both factors and in `center` with index set `I ∪ J ∪ I_center`.
fn symbol_products(atlas: &StrataAtlas, t1: &PureTerm, t2: &PureTerm, center: StratumId) -> Vec<(StratumId, Vec<usize>, RationalMatrix)> {
    let (i, j) = (&t1.residue, &t2.residue);
    if i.iter().any(|a| j.contains(a)) {
        return Vec::new();
    }
    let mut merged: Vec<usize> = i.iter().chain(j).copied().collect();
    merged.sort_unstable();
    let mut support: Vec<usize> = merged.iter().chain(atlas.indices(center)).copied().collect();
    support.sort_unstable();
    support.dedup();
    let s = shuffle_sign(i, j) * sign((t1.j * j.len()) % 2 == 1);
    atlas
        .strata_in(&support, &[t1.stratum, t2.stratum, center])
        .into_iter()
        .map(|t3| {
            let restricted = atlas
                .restriction(t1.stratum, t3, t1.j)
                .kron(&atlas.restriction(t2.stratum, t3, t2.j));
            let m = atlas.ring(t3).product_table(t1.j, t2.j).mul(&restricted).expect("shapes");
            (t3, merged.clone(), m.scaled(&s))
        })
        .collect()
}

fn add(blocks: &mut BTreeMap<(usize, usize, usize), RationalMatrix>, key: (usize, usize, usize), m: RationalMatrix) {
    if m.is_zero() {
        return;
    }
    match blocks.get_mut(&key) {
        Some(b) => b.add_assign(&m).expect("shapes"),
        None => {
            blocks.insert(key, m);
        }
    }
}

/// `H(U) ⊗ H(X, D) -> H(X, D)` on the logarithmic model of the pair.
/// A class of `U` acts on the semisimplicial part at level `p` with the sign
/// `(-1)^{deg · (p + 1)}`: Koszul for the Čech degree and the cone rule.
pub fn cup_log_xd(atlas: &StrataAtlas) -> Result<GradedPairing, PairingError> {
    let left = rows_log(atlas)?;
    let right = build(atlas, &ComplexSelector::XDTilde)?;
    let target = right.clone();
    let mut blocks = BTreeMap::new();
    for (a, t1) in left.terms().iter().enumerate() {
        for (b, t2) in right.terms().iter().enumerate() {
            let koszul = match t2.part {
                Part::Target => sign((t1.degree() as usize * (t2.simplicial + 1)) % 2 == 1),
                _ => Q::one(),
            };
            for (t3, residue, m) in symbol_products(atlas, t1, t2, t2.center) {
                if let Some(c) = target.find(t2.part, t2.center, t3, &residue, t1.j + t2.j) {
                    add(&mut blocks, (a, b, c), m.scaled(&koszul));
                }
            }
        }
    }
    GradedPairing::new("cup U x (X,D)", left, right, target, blocks)
}

/// `coker(u) ⊗ K(D) -> coker(v)`, inducing `H^i_D(X) ⊗ H^j(D) -> H^{i+j}_D(X)`
/// with `H^i_D(X)` in degree `i - 1` of `coker(u)`.
pub fn cup_extraordinary(atlas: &StrataAtlas) -> Result<GradedPairing, PairingError> {
    if !atlas.has_divisor() {
        return Err(PairingError::EmptyDivisor);
    }
    let left = coker_u(atlas)?;
    let right = sum_strata(atlas)?;
    let target = coker_v(atlas)?;
    let mut blocks = BTreeMap::new();
    for (a, t1) in left.terms().iter().enumerate() {
        for (b, t2) in right.terms().iter().enumerate() {
            let koszul = sign((t1.degree() as usize * t2.simplicial) % 2 == 1);
            for (t3, residue, m) in symbol_products(atlas, t1, t2, t2.center) {
                if let Some(c) = target.find(Part::Base, t2.center, t3, &residue, t1.j + t2.j) {
                    add(&mut blocks, (a, b, c), m.scaled(&koszul));
                }
            }
        }
    }
    GradedPairing::new("extraordinary cup", left, right, target, blocks)
}

/// Matrix of an induced product on chosen cohomology bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedPairing {
    /// `(weight, type, dim)` of the left, right and target class blocks, in
    /// basis order.
    pub left_blocks: Vec<(i32, HodgeType, usize)>,
    pub right_blocks: Vec<(i32, HodgeType, usize)>,
    pub target_blocks: Vec<(i32, HodgeType, usize)>,
    /// One `left dim x right dim` matrix per target basis class.
    pub slices: Vec<RationalMatrix>,
}

impl InducedPairing {
    pub fn left_dim(&self) -> usize {
        self.left_blocks.iter().map(|b| b.2).sum()
    }

    pub fn right_dim(&self) -> usize {
        self.right_blocks.iter().map(|b| b.2).sum()
    }

    /// The bilinear map as `target dim x (left dim · right dim)`.
    pub fn matrix(&self) -> RationalMatrix {
        let (l, r) = (self.left_dim(), self.right_dim());
        let mut m = RationalMatrix::zeros(self.slices.len(), l * r);
        for (k, s) in self.slices.iter().enumerate() {
            for x in 0..l {
                for y in 0..r {
                    m.set(k, x * r + y, s.get(x, y).clone());
                }
            }
        }
        m
    }

    fn range(blocks: &[(i32, HodgeType, usize)], key: (i32, HodgeType)) -> Option<std::ops::Range<usize>> {
        let mut off = 0;
        for &(w, h, d) in blocks {
            if (w, h) == key {
                return Some(off..off + d);
            }
            off += d;
        }
        None
    }

    /// Restriction of slice `k` to one left and one right block.
    pub fn block(&self, k: usize, left: (i32, HodgeType), right: (i32, HodgeType)) -> Option<RationalMatrix> {
        self.select(&self.slices[k], left, right)
    }

    /// Restriction of a `left dim x right dim` matrix to one pair of blocks.
    pub fn select(&self, m: &RationalMatrix, left: (i32, HodgeType), right: (i32, HodgeType)) -> Option<RationalMatrix> {
        let rows: Vec<usize> = Self::range(&self.left_blocks, left)?.collect();
        let cols: Vec<usize> = Self::range(&self.right_blocks, right)?.collect();
        Some(m.select(&rows, &cols))
    }
}

fn degree_span(f: &RowFamily) -> Option<(i32, i32)> {
    let d = f.degrees();
    Some((*d.first()?, *d.last()?))
}

/// Evaluates the product on representatives of `H^i(left) ⊗ H^j(right)` and
/// expresses the results in the classes of `H^{i+j}(target)`.
pub fn induced_pairing(
    pairing: &GradedPairing,
    left_table: &MixedHodgeTable,
    right_table: &MixedHodgeTable,
    target_table: &MixedHodgeTable,
    i: i32,
    j: i32,
) -> Result<InducedPairing, PairingError> {
    for (deg, fam, what) in [(i, &pairing.left, "left"), (j, &pairing.right, "right")] {
        match degree_span(fam) {
            Some((lo, hi)) if deg >= lo && deg <= hi => {}
            _ => return Err(PairingError::DegreeOutOfRange(deg, what)),
        }
    }
    let left: Vec<_> = left_table.class_blocks(i).collect();
    let right: Vec<_> = right_table.class_blocks(j).collect();
    let target: Vec<_> = target_table.class_blocks(i + j).collect();
    let target_offsets: BTreeMap<(i32, HodgeType), usize> = {
        let mut off = 0;
        target
            .iter()
            .map(|(w, h, b)| {
                let o = off;
                off += b.representatives.len();
                ((*w, *h), o)
            })
            .collect()
    };
    let target_dim: usize = target.iter().map(|t| t.2.representatives.len()).sum();
    let ldim: usize = left.iter().map(|t| t.2.representatives.len()).sum();
    let rdim: usize = right.iter().map(|t| t.2.representatives.len()).sum();
    let mut slices = vec![RationalMatrix::zeros(ldim, rdim); target_dim];
    let mut lo = 0;
    for (w1, h1, lb) in &left {
        let mut ro = 0;
        for (w2, h2, rb) in &right {
            let mu = pairing.product_matrix(*w1, i, *w2, j);
            let key = (w1 + w2, h1.shifted(*h2));
            let tb = target_table.classes(i + j, key.0, key.1);
            for (x, a) in lb.representatives.iter().enumerate() {
                for (y, b) in rb.representatives.iter().enumerate() {
                    let pair: Vec<Q> = a.iter().flat_map(|u| b.iter().map(move |v| u * v)).collect();
                    let image = mu.mul_vec(&pair)?;
                    let Some(tb) = tb else { continue };
                    let coords = tb.coordinates(&image)?;
                    let base = target_offsets[&key];
                    for (k, c) in coords.into_iter().enumerate() {
                        slices[base + k].set(lo + x, ro + y, c);
                    }
                }
            }
            ro += rb.representatives.len();
        }
        lo += lb.representatives.len();
    }
    let summary = |v: &[(i32, HodgeType, &crate::mhs::ClassBlock)]| {
        v.iter().map(|(w, h, b)| (*w, *h, b.representatives.len())).collect()
    };
    Ok(InducedPairing {
        left_blocks: summary(&left),
        right_blocks: summary(&right),
        target_blocks: summary(&target),
        slices,
    })
}

fn dual_type(n: i32, h: HodgeType) -> HodgeType {
    HodgeType(n - h.0, n - h.1)
}

/// Linear form on the top weight row of `coker(v)` in degree `2n - 1`
/// sending each local class `ξ_{I_C} [C]` to `(-1)^{k(k-1)/2}`, `k = |I_C|`.
/// It is the trace `H^{2n}_D(X) -> H^{2n}(X) = Q(-n)`.
fn local_trace(atlas: &StrataAtlas, family: &RowFamily, n: i32) -> Vec<Q> {
    let terms = family.terms_at(2 * n, 2 * n - 1);
    let mut out = Vec::new();
    for &t in terms {
        let term = &family.terms()[t];
        let ring = atlas.ring(term.stratum);
        let k = term.residue.len();
        let is_fundamental = term.stratum == term.center
            && term.residue == atlas.indices(term.center)
            && term.j == ring.top_degree();
        for x in 0..term.dim() {
            out.push(if is_fundamental {
                sign((k * (k.saturating_sub(1)) / 2) % 2 == 1) / ring.fundamental_class()[x].clone()
            } else {
                Q::zero()
            });
        }
    }
    out
}

struct Duality<'a> {
    what: &'a str,
    pairing: &'a GradedPairing,
    left: &'a MixedHodgeTable,
    right: &'a MixedHodgeTable,
    target: &'a MixedHodgeTable,
    /// `H^i` of the left factor sits in degree `i + left_shift`.
    left_shift: i32,
    /// Value of the trace on each target class in degree `top`.
    trace: Vec<Q>,
}

/// Dimension pattern and blockwise perfectness of one duality.
fn duality_checks(report: &mut Report, n: i32, d: &Duality) -> Result<(), PairingError> {
    let what = d.what;
    for i in 0..=2 * n {
        let (li, rj) = (i + d.left_shift, 2 * n - i);
        let loc = format!("H^{i} x H^{rj}");
        let mut expected = Vec::new();
        let mut actual = Vec::new();
        for e in d.left.entries(li) {
            expected.push(format!("{}{}:{}", e.weight, e.hodge, e.dim));
            let dim = d.right.dim(rj, 2 * n - e.weight, dual_type(n, e.hodge));
            actual.push(format!("{}{}:{}", e.weight, e.hodge, dim));
        }
        for e in d.right.entries(rj) {
            let dim = d.left.dim(li, 2 * n - e.weight, dual_type(n, e.hodge));
            expected.push(format!("dual {}{}:{}", e.weight, e.hodge, e.dim));
            actual.push(format!("dual {}{}:{}", e.weight, e.hodge, dim));
        }
        report.push(format!("{what}: dual dimensions"), loc.clone(), expected.join(" "), actual.join(" "));

        if d.left.betti(li) == 0 || d.right.betti(rj) == 0 {
            continue;
        }
        let ip = induced_pairing(d.pairing, d.left, d.right, d.target, li, rj)?;
        let mut total = RationalMatrix::zeros(ip.left_dim(), ip.right_dim());
        for (slice, t) in ip.slices.iter().zip(&d.trace) {
            total.add_assign(&slice.scaled(t)).expect("shapes");
        }
        for &(w, h, _) in &ip.left_blocks {
            let dual = (2 * n - w, dual_type(n, h));
            let perfect = ip.select(&total, (w, h), dual).is_some_and(|b| pairing_perfect(&b));
            report.assert(format!("{what}: perfect block"), format!("{loc} weight {w} type {h}"), perfect);
        }
        report.assert(format!("{what}: perfect pairing"), loc, pairing_perfect(&total));
    }
    Ok(())
}

fn top_entries(t: &MixedHodgeTable, degree: i32) -> String {
    let e: Vec<String> = t.entries(degree).iter().map(|e| format!("{}{}:{}", e.weight, e.hodge, e.dim)).collect();
    e.join(" ")
}

/// Both dualities `H^i(U) x H^{2n-i}(X, D) -> Q(-n)` and
/// `H^i_D(X) x H^{2n-i}(D) -> Q(-n)`, blockwise.
///
/// `H^{2n}(X, D)` is `Q(-n)` for connected `X`. `H^{2n}_D(X)` is one copy of
/// `Q(-n)` per connected component of `D`; the local pairing is composed
/// with the trace to `H^{2n}(X)`.
pub fn fujiki_duality_report(atlas: &StrataAtlas) -> Result<Report, PairingError> {
    let n = atlas.ambient_dimension() as i32;
    let top_type = HodgeType(n, n);
    let mut report = Report::new("fujiki");
    let mu = cup_log_xd(atlas)?;
    report.assert("U x (X,D): Leibniz rule", "all blocks", chain_map_check(&mu));
    let left = compute_table(&mu.left)?;
    let right = compute_table(&mu.right)?;
    report.push(
        "U x (X,D): H^2n(X,D) is Q(-n)",
        format!("degree {}", 2 * n),
        format!("{}{top_type}:1", 2 * n),
        top_entries(&right, 2 * n),
    );
    let duality = Duality {
        what: "U x (X,D)",
        pairing: &mu,
        left: &left,
        right: &right,
        target: &right,
        left_shift: 0,
        trace: vec![Q::one()],
    };
    duality_checks(&mut report, n, &duality)?;

    if atlas.has_divisor() {
        let ex = cup_extraordinary(atlas)?;
        report.assert("local x D: Leibniz rule", "all blocks", chain_map_check(&ex));
        let left = compute_table(&ex.left)?;
        let right = compute_table(&ex.right)?;
        let target = compute_table(&ex.target)?;
        let top = 2 * n - 1;
        let components = right.dim(0, 0, HodgeType(0, 0));
        report.push(
            "local x D: H^2n_D(X) is Q(-n) per component of D",
            format!("degree {}", 2 * n),
            format!("{}{top_type}:{components}", 2 * n),
            top_entries(&target, top),
        );
        let tau = local_trace(atlas, &ex.target, n);
        let boundaries = ex.target.differential(2 * n, top - 1);
        let row = RationalMatrix::from_rows(vec![tau.clone()], tau.len()).expect("one row");
        report.assert(
            "local x D: trace vanishes on coboundaries",
            format!("degree {}", 2 * n),
            row.mul(&boundaries).expect("shapes").is_zero(),
        );
        let trace: Vec<Q> = target
            .class_blocks(top)
            .flat_map(|(w, _, b)| {
                b.representatives
                    .iter()
                    .map(|r| {
                        if w == 2 * n {
                            r.iter().zip(&tau).map(|(x, y)| x * y).sum()
                        } else {
                            Q::zero()
                        }
                    })
                    .collect::<Vec<Q>>()
            })
            .collect();
        report.assert("local x D: trace is nonzero", format!("degree {}", 2 * n), trace.iter().any(|t| !t.is_zero()));
        let duality = Duality {
            what: "local x D",
            pairing: &ex,
            left: &left,
            right: &right,
            target: &target,
            left_shift: -1,
            trace,
        };
        duality_checks(&mut report, n, &duality)?;
    }
    Ok(report)
}

/// One node of a long exact sequence: the group and the maps out of it.
struct Node {
    name: String,
    table: MixedHodgeTable,
    degree: i32,
}

fn block_keys(maps: &[&BTreeMap<(i32, HodgeType), RationalMatrix>]) -> Vec<(i32, HodgeType)> {
    let mut keys: Vec<_> = maps.iter().flat_map(|m| m.keys().copied()).collect();
    keys.sort();
    keys.dedup();
    keys
}

fn rank_of(map: &BTreeMap<(i32, HodgeType), RationalMatrix>, key: (i32, HodgeType)) -> usize {
    map.get(&key).map_or(0, RationalMatrix::rank)
}

type BlockMap = BTreeMap<(i32, HodgeType), RationalMatrix>;

/// Checks exactness at every node of `... -> A^i -> B^i -> C^i -> A^{i+1} -> ...`
/// block by block, and returns ranks of the three maps per degree.
#[allow(clippy::type_complexity)]
fn exact_sequence(
    report: &mut Report,
    what: &str,
    nodes: &[Node],
    maps: &[BlockMap],
) -> Result<(), PairingError> {
    let len = nodes.len();
    for k in 0..len {
        let node = &nodes[k];
        let incoming = if k == 0 { None } else { Some(&maps[k - 1]) };
        let outgoing = maps.get(k);
        for (w, h) in block_keys(&[&incoming.cloned().unwrap_or_default(), &outgoing.cloned().unwrap_or_default()]) {
            let dim = node.table.dim(node.degree, w, h);
            let r_in = incoming.map_or(0, |m| rank_of(m, (w, h)));
            let r_out = outgoing.map_or(0, |m| rank_of(m, (w, h)));
            if let (Some(fin), Some(fout)) = (incoming, outgoing) {
                if let (Some(a), Some(b)) = (fin.get(&(w, h)), fout.get(&(w, h))) {
                    if a.cols() > 0 && b.rows() > 0 {
                        report.assert(
                            format!("{what}: consecutive maps compose to zero"),
                            format!("at {} weight {w} type {h}", node.name),
                            b.mul(a).map(|c| c.is_zero()).unwrap_or(false),
                        );
                    }
                }
            }
            report.push(
                format!("{what}: exactness"),
                format!("at {} weight {w} type {h}", node.name),
                dim,
                r_in + r_out,
            );
        }
    }
    Ok(())
}

/// Builds the long exact sequences of the pair `(X, D)` and of local
/// cohomology, checks exactness blockwise and compares the dimension and
/// rank patterns under `i <-> 2n - i`.
pub fn les_check(atlas: &StrataAtlas) -> Result<Report, PairingError> {
    let n = atlas.ambient_dimension() as i32;
    let mut report = Report::new("les");

    let x = rows_constant(atlas)?;
    let d = sum_strata(atlas)?;
    let l = rows_log(atlas)?;
    let xd = build(atlas, &ComplexSelector::XD)?;
    let locd = build(atlas, &ComplexSelector::LocD)?;
    let (tx, td, tl) = (compute_table(&x)?, compute_table(&d)?, compute_table(&l)?);
    let (txd, tlocd) = (compute_table(&xd)?, compute_table(&locd)?);

    let istar = restriction_morphism(atlas, &x, &d).blocks;
    let u = inclusion_morphism(&x, &l).blocks;
    let (pi_xd, inc_xd) = (cone_projection(&x), cone_inclusion(&x, &d));
    let (pi_loc, inc_loc) = (cone_projection(&x), cone_inclusion(&x, &l));

    // pair: H^i(X,D) -> H^i(X) -> H^i(D) -> H^{i+1}(X,D)
    let mut pair_nodes = Vec::new();
    let mut pair_maps = Vec::new();
    let mut local_nodes = Vec::new();
    let mut local_maps = Vec::new();
    let mut pair_ranks = BTreeMap::new();
    let mut local_ranks = BTreeMap::new();
    for i in 0..=2 * n {
        let node = |name: String, _family: &RowFamily, table: &MixedHodgeTable, degree| Node {
            name,
            table: table.clone(),
            degree,
        };
        pair_nodes.push(node(format!("H^{i}(X,D)"), &xd, &txd, i));
        pair_nodes.push(node(format!("H^{i}(X)"), &x, &tx, i));
        pair_nodes.push(node(format!("H^{i}(D)"), &d, &td, i));
        let a = induced_map(&pi_xd, &xd, &txd, i, &x, &tx, i)?;
        let b = induced_map(&istar, &x, &tx, i, &d, &td, i)?;
        let c = induced_map(&inc_xd, &d, &td, i, &xd, &txd, i + 1)?;
        pair_ranks.insert(i, [a.clone(), b.clone(), c.clone()]);
        pair_maps.extend([a, b, c]);

        local_nodes.push(node(format!("H^{i}_D(X)"), &locd, &tlocd, i));
        local_nodes.push(node(format!("H^{i}(X)"), &x, &tx, i));
        local_nodes.push(node(format!("H^{i}(U)"), &l, &tl, i));
        let a = induced_map(&pi_loc, &locd, &tlocd, i, &x, &tx, i)?;
        let b = induced_map(&u, &x, &tx, i, &l, &tl, i)?;
        let c = induced_map(&inc_loc, &l, &tl, i, &locd, &tlocd, i + 1)?;
        local_ranks.insert(i, [a.clone(), b.clone(), c.clone()]);
        local_maps.extend([a, b, c]);
    }
    pair_maps.pop();
    local_maps.pop();
    exact_sequence(&mut report, "pair sequence", &pair_nodes, &pair_maps)?;
    exact_sequence(&mut report, "local sequence", &local_nodes, &local_maps)?;

    // dimension pattern: H^i(X,D) ~ H^{2n-i}(U), H^i(X) ~ H^{2n-i}(X), H^i(D) ~ H^{2n-i}_D(X)
    let pattern = |t: &MixedHodgeTable, i: i32| -> Vec<String> {
        t.entries(i).iter().map(|e| format!("{}{}:{}", e.weight, e.hodge, e.dim)).collect()
    };
    let dualized = |t: &MixedHodgeTable, i: i32| -> Vec<String> {
        let mut v: Vec<_> = t
            .entries(i)
            .iter()
            .map(|e| (2 * n - e.weight, dual_type(n, e.hodge), e.dim))
            .collect();
        v.sort();
        v.into_iter().map(|(w, h, d)| format!("{w}{h}:{d}")).collect()
    };
    for i in 0..=2 * n {
        for (name, a, b) in [("H(X,D) vs H(U)", &txd, &tl), ("H(X) vs H(X)", &tx, &tx), ("H(D) vs H_D(X)", &td, &tlocd)] {
            report.push(
                format!("dual pattern {name}"),
                format!("degree {i} vs {}", 2 * n - i),
                pattern(a, i).join(" "),
                dualized(b, 2 * n - i).join(" "),
            );
        }
    }
    // rank pattern: each map is dual to the corresponding map of the other sequence
    let ranks = |m: &BlockMap| -> Vec<String> {
        m.iter().filter(|(_, v)| v.rank() > 0).map(|((w, h), v)| format!("{w}{h}:{}", v.rank())).collect()
    };
    let dual_ranks = |m: &BlockMap| -> Vec<String> {
        let mut v: Vec<_> = m
            .iter()
            .filter(|(_, v)| v.rank() > 0)
            .map(|((w, h), v)| (2 * n - w, dual_type(n, *h), v.rank()))
            .collect();
        v.sort();
        v.into_iter().map(|(w, h, r)| format!("{w}{h}:{r}")).collect()
    };
    for i in 0..=2 * n {
        let [pa, pb, pc] = &pair_ranks[&i];
        let j = 2 * n - i;
        let [la, lb, _] = &local_ranks[&j];
        report.push("dual ranks H^i(X,D)->H^i(X) vs H^j(X)->H^j(U)", format!("i={i}"), ranks(pa).join(" "), dual_ranks(lb).join(" "));
        report.push("dual ranks H^i(X)->H^i(D) vs H^j_D(X)->H^j(X)", format!("i={i}"), ranks(pb).join(" "), dual_ranks(la).join(" "));
        if j >= 1 {
            let [_, _, lc] = &local_ranks[&(j - 1)];
            report.push(
                "dual ranks H^i(D)->H^{i+1}(X,D) vs H^{j-1}(U)->H^j_D(X)",
                format!("i={i}"),
                ranks(pc).join(" "),
                dual_ranks(lc).join(" "),
            );
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{generic_arrangement, load_atlas};

    fn unit_rank(p: &InducedPairing) -> usize {
        p.slices.iter().map(RationalMatrix::rank).sum()
    }

    #[test]
    fn log_product_satisfies_leibniz() {
        for (n, m) in [(1, 2), (2, 3), (1, 1), (2, 2)] {
            let atlas = generic_arrangement(n, m).unwrap();
            let mu = cup_log_xd(&atlas).unwrap();
            assert_eq!(mu.leibniz_failure(), None, "n={n} m={m}");
        }
    }

    #[test]
    fn extraordinary_product_satisfies_leibniz() {
        for (n, m) in [(1, 2), (2, 3), (1, 1), (2, 2)] {
            let atlas = generic_arrangement(n, m).unwrap();
            let ex = cup_extraordinary(&atlas).unwrap();
            assert_eq!(ex.leibniz_failure(), None, "n={n} m={m}");
        }
    }

    #[test]
    fn flipped_sign_breaks_leibniz() {
        let atlas = generic_arrangement(2, 3).unwrap();
        let mut mu = cup_log_xd(&atlas).unwrap();
        let key = *mu
            .blocks
            .keys()
            .find(|(a, b, _)| mu.left.terms()[*a].twist == 1 && mu.right.terms()[*b].part == Part::Target)
            .unwrap();
        let flipped = mu.blocks[&key].negated();
        mu.blocks.insert(key, flipped);
        assert!(!chain_map_check(&mu));
    }

    #[test]
    fn two_points_pairing() {
        let atlas = generic_arrangement(1, 2).unwrap();
        let mu = cup_log_xd(&atlas).unwrap();
        let (l, r) = (compute_table(&mu.left).unwrap(), compute_table(&mu.right).unwrap());
        let p = induced_pairing(&mu, &l, &r, &r, 1, 1).unwrap();
        assert_eq!((p.left_dim(), p.right_dim(), p.slices.len()), (1, 1, 1));
        assert!(!p.slices[0].get(0, 0).is_zero());
        let units = induced_pairing(&mu, &l, &r, &r, 0, 1).unwrap();
        assert_eq!(units.slices.len(), 1);
        assert_eq!(units.slices[0], RationalMatrix::identity(1));
        let high = induced_pairing(&mu, &l, &r, &r, 1, 2).unwrap();
        assert!(high.slices.is_empty());
        assert!(matches!(
            induced_pairing(&mu, &l, &r, &r, -1, 1),
            Err(PairingError::DegreeOutOfRange(-1, "left"))
        ));
    }

    #[test]
    fn unit_of_d_acts_trivially_on_local_cohomology() {
        let atlas = load_atlas(include_str!("../fixtures/p1_1pt.json")).unwrap();
        let ex = cup_extraordinary(&atlas).unwrap();
        let (l, r, t) = (
            compute_table(&ex.left).unwrap(),
            compute_table(&ex.right).unwrap(),
            compute_table(&ex.target).unwrap(),
        );
        let p = induced_pairing(&ex, &l, &r, &t, 1, 0).unwrap();
        assert_eq!(p.slices, vec![RationalMatrix::identity(1)]);
    }

    #[test]
    fn triangle_extraordinary_products() {
        let atlas = generic_arrangement(2, 3).unwrap();
        let ex = cup_extraordinary(&atlas).unwrap();
        let (l, r, t) = (
            compute_table(&ex.left).unwrap(),
            compute_table(&ex.right).unwrap(),
            compute_table(&ex.target).unwrap(),
        );
        // H^2_D (weight 2) x H^1(D) (weight 0) lands in weight 2, where H^3_D vanishes
        let p = induced_pairing(&ex, &l, &r, &t, 1, 1).unwrap();
        assert_eq!(unit_rank(&p), 0);
        // H^3_D x H^1(D) -> H^4_D is the duality pairing
        let p = induced_pairing(&ex, &l, &r, &t, 2, 1).unwrap();
        assert_eq!(p.matrix().rank(), 1);
    }

    #[test]
    fn fujiki_on_fixtures() {
        for atlas in [generic_arrangement(1, 2).unwrap(), generic_arrangement(2, 3).unwrap()] {
            let r = fujiki_duality_report(&atlas).unwrap();
            assert!(r.passed(), "{}", r.to_text());
        }
    }

    #[test]
    fn les_on_fixtures() {
        for atlas in [
            generic_arrangement(1, 2).unwrap(),
            generic_arrangement(2, 3).unwrap(),
            generic_arrangement(2, 0).unwrap(),
        ] {
            let r = les_check(&atlas).unwrap();
            assert!(r.passed(), "{}", r.to_text());
        }
    }

    #[test]
    fn shuffle_signs() {
        assert_eq!(shuffle_sign(&[0], &[1]), Q::one());
        assert_eq!(shuffle_sign(&[1], &[0]), -Q::one());
        assert_eq!(shuffle_sign(&[1, 2], &[0]), Q::one());
        assert_eq!(shuffle_sign(&[2], &[0, 1]), Q::one());
        assert_eq!(shuffle_sign(&[1], &[0, 2]), -Q::one());
    }
}
