//! Combinatorial and Hodge-theoretic description of a normal crossing
//! configuration `(X, D)`.
//!
//! The atlas stores, for every stratum `D_I` (and for `X = D_∅`), its
//! cohomology ring together with restriction maps, Gysin maps along
//! codimension-one inclusions and the restricted divisor classes. A
//! disconnected intersection `D_I` is recorded as several strata sharing the
//! index set `I` and carrying distinct labels. Labels are unique across the
//! whole atlas and double as stratum keys in documents and selectors.

mod generic;
mod ring;
mod schema;
mod validate;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::linalg::{RationalMatrix, Q};

pub use generic::generic_arrangement;
pub use ring::{HodgeType, PureHodgeRing};
pub use schema::{load_atlas, ATLAS_FORMAT};
pub use validate::{validate_atlas, ValidationReport, Violation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AtlasError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("lattice error: {0}")]
    Lattice(String),
    #[error("bidegree error: {0}")]
    Bidegree(String),
    #[error("unknown stratum `{0}`")]
    UnknownStratum(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StratumId(pub usize);

impl fmt::Display for StratumId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum {
    /// Sorted component indices `I`.
    pub indices: Vec<usize>,
    pub label: String,
    pub ring: PureHodgeRing,
}

impl Stratum {
    pub fn dimension(&self) -> usize {
        self.ring.dimension()
    }
}

/// Blocks of a map between graded rings, keyed by source degree. Missing
/// blocks are zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GradedMap {
    pub blocks: BTreeMap<usize, RationalMatrix>,
}

impl GradedMap {
    pub fn new(blocks: BTreeMap<usize, RationalMatrix>) -> Self {
        GradedMap { blocks }
    }
}

/// A map declared between two strata, referenced by label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapSpec {
    pub from: String,
    pub to: String,
    pub map: GradedMap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSpec {
    pub component: String,
    pub stratum: String,
    pub class: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrataAtlas {
    ambient_dimension: usize,
    components: Vec<String>,
    strata: Vec<Stratum>,
    /// `(S, T)` for a covering relation `T ⊂ S`.
    restrictions: BTreeMap<(StratumId, StratumId), GradedMap>,
    /// `(T, S)` for a covering relation `T ⊂ S`.
    gysin: BTreeMap<(StratumId, StratumId), GradedMap>,
    classes: BTreeMap<(usize, StratumId), Vec<Q>>,
    parents: BTreeMap<(StratumId, usize), StratumId>,
    children: BTreeMap<(StratumId, usize), Vec<StratumId>>,
    by_label: HashMap<String, StratumId>,
    ambient: StratumId,
}

impl StrataAtlas {
    /// Assembles an atlas and checks its structure: shapes, bidegrees and
    /// the covering lattice. Algebraic identities between the maps are
    /// checked separately by [`validate_atlas`].
    pub fn new(
        ambient_dimension: usize,
        components: Vec<String>,
        strata: Vec<Stratum>,
        restrictions: Vec<MapSpec>,
        gysin: Vec<MapSpec>,
        classes: Vec<ClassSpec>,
    ) -> Result<Self, AtlasError> {
        let mut seen = std::collections::HashSet::new();
        for c in &components {
            if !seen.insert(c.as_str()) {
                return Err(AtlasError::Schema(format!("duplicate component `{c}`")));
            }
        }

        let mut by_label = HashMap::new();
        let mut ambient = None;
        for (i, s) in strata.iter().enumerate() {
            if by_label.insert(s.label.clone(), StratumId(i)).is_some() {
                return Err(AtlasError::Schema(format!("duplicate stratum label `{}`", s.label)));
            }
            if s.indices.windows(2).any(|w| w[0] >= w[1]) {
                return Err(AtlasError::Schema(format!(
                    "indices of `{}` must be strictly increasing",
                    s.label
                )));
            }
            if let Some(&bad) = s.indices.iter().find(|&&a| a >= components.len()) {
                return Err(AtlasError::Schema(format!(
                    "stratum `{}` refers to component {bad}, but only {} exist",
                    s.label,
                    components.len()
                )));
            }
            if s.indices.len() > ambient_dimension
                || s.dimension() != ambient_dimension - s.indices.len()
            {
                return Err(AtlasError::DimensionMismatch(format!(
                    "stratum `{}` has dimension {} but codimension {} in an ambient space of dimension {}",
                    s.label,
                    s.dimension(),
                    s.indices.len(),
                    ambient_dimension
                )));
            }
            if s.indices.is_empty() {
                if ambient.is_some() {
                    return Err(AtlasError::Lattice("more than one stratum with empty index set".into()));
                }
                ambient = Some(StratumId(i));
            }
        }
        let ambient =
            ambient.ok_or_else(|| AtlasError::Lattice("no ambient stratum (empty index set)".into()))?;

        let lookup = |label: &str| {
            by_label
                .get(label)
                .copied()
                .ok_or_else(|| AtlasError::UnknownStratum(label.to_string()))
        };

        let mut restriction_map = BTreeMap::new();
        let mut parents = BTreeMap::new();
        let mut children: BTreeMap<(StratumId, usize), Vec<StratumId>> = BTreeMap::new();
        for spec in restrictions {
            let s = lookup(&spec.from)?;
            let t = lookup(&spec.to)?;
            let a = covering_index(&strata[s.0], &strata[t.0])?;
            for (&j, block) in &spec.map.blocks {
                let (src, tgt) = (&strata[s.0].ring, &strata[t.0].ring);
                expect_shape(block, tgt.dim(j), src.dim(j), || {
                    format!("restriction {} -> {} in degree {j}", spec.from, spec.to)
                })?;
                check_block_types(block, &src.types(j), &tgt.types(j), HodgeType(0, 0)).map_err(
                    |(r, c)| {
                        AtlasError::Bidegree(format!(
                            "restriction {} -> {} degree {j}: entry ({r},{c}) mixes Hodge types",
                            spec.from, spec.to
                        ))
                    },
                )?;
            }
            if parents.insert((t, a), s).is_some() {
                return Err(AtlasError::Lattice(format!(
                    "stratum `{}` has two restrictions along component {a}",
                    spec.to
                )));
            }
            children.entry((s, a)).or_default().push(t);
            restriction_map.insert((s, t), spec.map);
        }
        for list in children.values_mut() {
            list.sort();
        }

        for (i, s) in strata.iter().enumerate() {
            for &a in &s.indices {
                if !parents.contains_key(&(StratumId(i), a)) {
                    return Err(AtlasError::Lattice(format!(
                        "stratum `{}` has no restriction from a stratum along component {a}",
                        s.label
                    )));
                }
            }
        }
        for (i, s) in strata.iter().enumerate() {
            let t = StratumId(i);
            for (x, &a) in s.indices.iter().enumerate() {
                for &b in &s.indices[x + 1..] {
                    let via_a = parents[&(parents[&(t, a)], b)];
                    let via_b = parents[&(parents[&(t, b)], a)];
                    if via_a != via_b {
                        return Err(AtlasError::Lattice(format!(
                            "stratum `{}` lies in two different strata with index set I \\ {{{a},{b}}}",
                            s.label
                        )));
                    }
                }
            }
        }

        let mut gysin_map = BTreeMap::new();
        for spec in gysin {
            let t = lookup(&spec.from)?;
            let s = lookup(&spec.to)?;
            let a = covering_index(&strata[s.0], &strata[t.0])?;
            if parents.get(&(t, a)) != Some(&s) {
                return Err(AtlasError::Lattice(format!(
                    "Gysin map {} -> {} does not follow a declared restriction",
                    spec.from, spec.to
                )));
            }
            for (&j, block) in &spec.map.blocks {
                let (src, tgt) = (&strata[t.0].ring, &strata[s.0].ring);
                expect_shape(block, tgt.dim(j + 2), src.dim(j), || {
                    format!("Gysin map {} -> {} from degree {j}", spec.from, spec.to)
                })?;
                check_block_types(block, &src.types(j), &tgt.types(j + 2), HodgeType(1, 1)).map_err(
                    |(r, c)| {
                        AtlasError::Bidegree(format!(
                            "Gysin map {} -> {} degree {j}: entry ({r},{c}) is not of type (1,1) shift",
                            spec.from, spec.to
                        ))
                    },
                )?;
            }
            gysin_map.insert((t, s), spec.map);
        }

        let mut class_map = BTreeMap::new();
        for spec in classes {
            let a = components
                .iter()
                .position(|c| *c == spec.component)
                .ok_or_else(|| AtlasError::Schema(format!("unknown component `{}`", spec.component)))?;
            let s = lookup(&spec.stratum)?;
            let ring = &strata[s.0].ring;
            if spec.class.len() != ring.dim(2) {
                return Err(AtlasError::DimensionMismatch(format!(
                    "class of `{}` on `{}` has {} coordinates, H^2 has dimension {}",
                    spec.component,
                    spec.stratum,
                    spec.class.len(),
                    ring.dim(2)
                )));
            }
            let types = ring.types(2);
            if let Some(i) = (0..spec.class.len())
                .find(|&i| !spec.class[i].is_zero() && types[i] != HodgeType(1, 1))
            {
                return Err(AtlasError::Bidegree(format!(
                    "class of `{}` on `{}` has a component of type {}",
                    spec.component, spec.stratum, types[i]
                )));
            }
            class_map.insert((a, s), spec.class);
        }

        Ok(StrataAtlas {
            ambient_dimension,
            components,
            strata,
            restrictions: restriction_map,
            gysin: gysin_map,
            classes: class_map,
            parents,
            children,
            by_label,
            ambient,
        })
    }

    pub fn ambient_dimension(&self) -> usize {
        self.ambient_dimension
    }

    pub fn components(&self) -> &[String] {
        &self.components
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn stratum_ids(&self) -> impl Iterator<Item = StratumId> + '_ {
        (0..self.strata.len()).map(StratumId)
    }

    pub fn stratum(&self, id: StratumId) -> &Stratum {
        &self.strata[id.0]
    }

    pub fn indices(&self, id: StratumId) -> &[usize] {
        &self.strata[id.0].indices
    }

    pub fn ring(&self, id: StratumId) -> &PureHodgeRing {
        &self.strata[id.0].ring
    }

    pub fn label(&self, id: StratumId) -> &str {
        &self.strata[id.0].label
    }

    pub fn find(&self, label: &str) -> Option<StratumId> {
        self.by_label.get(label).copied()
    }

    /// The stratum `X` itself.
    pub fn ambient(&self) -> StratumId {
        self.ambient
    }

    pub fn has_divisor(&self) -> bool {
        !self.components.is_empty()
    }

    /// Strata whose index set has exactly `size` elements, in storage order.
    pub fn strata_of_size(&self, size: usize) -> Vec<StratumId> {
        self.stratum_ids().filter(|&s| self.indices(s).len() == size).collect()
    }

    pub(crate) fn restriction_pairs(&self) -> impl Iterator<Item = (StratumId, StratumId)> + '_ {
        self.restrictions.keys().copied()
    }

    pub(crate) fn declared_restriction(&self, s: StratumId, t: StratumId) -> Option<&GradedMap> {
        self.restrictions.get(&(s, t))
    }

    pub(crate) fn declared_gysin(&self, t: StratumId, s: StratumId) -> Option<&GradedMap> {
        self.gysin.get(&(t, s))
    }

    pub(crate) fn declared_classes(&self) -> &BTreeMap<(usize, StratumId), Vec<Q>> {
        &self.classes
    }

    /// The stratum containing `t` with index set `I_t \ {a}`.
    pub fn parent(&self, t: StratumId, a: usize) -> Option<StratumId> {
        self.parents.get(&(t, a)).copied()
    }

    /// Strata `T` with `parent(T, a) == s`, i.e. the components of `s ∩ D_a`.
    pub fn children(&self, s: StratumId, a: usize) -> &[StratumId] {
        self.children.get(&(s, a)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The stratum with index set `subset` that contains `t`.
    pub fn ancestor(&self, t: StratumId, subset: &[usize]) -> Option<StratumId> {
        let own = self.indices(t);
        if !subset.iter().all(|a| own.contains(a)) {
            return None;
        }
        let mut current = t;
        for &a in own.iter().filter(|a| !subset.contains(a)) {
            current = self.parent(current, a)?;
        }
        Some(current)
    }

    /// Whether `t ⊆ c` as strata.
    pub fn contains(&self, c: StratumId, t: StratumId) -> bool {
        self.ancestor(t, self.indices(c)) == Some(c)
    }

    /// Strata with index set exactly `indices` contained in every stratum of
    /// `within`.
    pub fn strata_in(&self, indices: &[usize], within: &[StratumId]) -> Vec<StratumId> {
        self.stratum_ids()
            .filter(|&t| self.indices(t) == indices)
            .filter(|&t| within.iter().all(|&c| self.contains(c, t)))
            .collect()
    }

    /// Restriction `H^j(s) -> H^j(t)` for `t ⊆ s`, composed along covering
    /// relations. Panics if `t` is not contained in `s`.
    pub fn restriction(&self, s: StratumId, t: StratumId, j: usize) -> RationalMatrix {
        assert!(self.contains(s, t), "{} is not contained in {}", self.label(t), self.label(s));
        let mut chain = vec![t];
        let mut current = t;
        let extra: Vec<usize> =
            self.indices(t).iter().copied().filter(|a| !self.indices(s).contains(a)).collect();
        for a in extra {
            current = self.parent(current, a).expect("checked by contains");
            chain.push(current);
        }
        // chain runs t, ..., s; compose restrictions from s downwards
        let mut m = RationalMatrix::identity(self.ring(s).dim(j));
        for w in chain.windows(2).rev() {
            let (child, parent) = (w[0], w[1]);
            let step = self.covering_restriction(parent, child, j);
            m = step.mul(&m).expect("restriction shapes are checked on construction");
        }
        m
    }

    /// Restriction along a single covering relation `t ⊂ s`.
    pub fn covering_restriction(&self, s: StratumId, t: StratumId, j: usize) -> RationalMatrix {
        let zero = || RationalMatrix::zeros(self.ring(t).dim(j), self.ring(s).dim(j));
        self.restrictions
            .get(&(s, t))
            .and_then(|m| m.blocks.get(&j).cloned())
            .unwrap_or_else(zero)
    }

    /// Gysin map `H^j(t) -> H^{j+2}(s)` along a covering relation `t ⊂ s`.
    pub fn gysin(&self, t: StratumId, s: StratumId, j: usize) -> RationalMatrix {
        let zero = || RationalMatrix::zeros(self.ring(s).dim(j + 2), self.ring(t).dim(j));
        self.gysin
            .get(&(t, s))
            .and_then(|m| m.blocks.get(&j).cloned())
            .unwrap_or_else(zero)
    }

    /// The class `c(a, s) ∈ H^2(s)`; zero when undeclared.
    pub fn divisor_class(&self, a: usize, s: StratumId) -> Vec<Q> {
        self.classes
            .get(&(a, s))
            .cloned()
            .unwrap_or_else(|| vec![Q::zero(); self.ring(s).dim(2)])
    }

    /// Multiplication by `c(a, s)` as a map `H^j(s) -> H^{j+2}(s)`.
    pub fn chern_multiplication(&self, a: usize, s: StratumId, j: usize) -> RationalMatrix {
        self.ring(s).left_multiplication(2, &self.divisor_class(a, s), j)
    }
}

/// The single index that `child` has in addition to `parent`.
fn covering_index(parent: &Stratum, child: &Stratum) -> Result<usize, AtlasError> {
    let extra: Vec<usize> =
        child.indices.iter().copied().filter(|a| !parent.indices.contains(a)).collect();
    let contained = parent.indices.iter().all(|a| child.indices.contains(a));
    if !contained || extra.len() != 1 {
        return Err(AtlasError::Lattice(format!(
            "`{}` -> `{}` is not a codimension-one inclusion of strata",
            parent.label, child.label
        )));
    }
    Ok(extra[0])
}

fn expect_shape(
    m: &RationalMatrix,
    rows: usize,
    cols: usize,
    what: impl Fn() -> String,
) -> Result<(), AtlasError> {
    if m.rows() != rows || m.cols() != cols {
        return Err(AtlasError::DimensionMismatch(format!(
            "{}: expected {rows}x{cols}, got {}x{}",
            what(),
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Every nonzero entry must send a source type `t` to the target type
/// `t + shift`. Returns the offending entry otherwise.
pub(crate) fn check_block_types(
    m: &RationalMatrix,
    source: &[HodgeType],
    target: &[HodgeType],
    shift: HodgeType,
) -> Result<(), (usize, usize)> {
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if !m.get(r, c).is_zero() && target[r] != source[c].shifted(shift) {
                return Err((r, c));
            }
        }
    }
    Ok(())
}
