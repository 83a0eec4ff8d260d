//! JSON documents describing an atlas (`"format": "nc-hodge/1"`).
//!
//! Matrices are row-major arrays of rational strings such as `"-3/2"`;
//! plain integers are accepted on input.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    AtlasError, ClassSpec, GradedMap, HodgeType, MapSpec, PureHodgeRing, StrataAtlas, Stratum,
};
use crate::linalg::{parse_rational, RationalMatrix, Q};

pub const ATLAS_FORMAT: &str = "nc-hodge/1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Rat(pub Q);

impl Serialize for Rat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Str(String),
            Int(i64),
        }
        match Raw::deserialize(d)? {
            Raw::Str(s) => parse_rational(&s)
                .map(Rat)
                .ok_or_else(|| serde::de::Error::custom(format!("not a rational number: `{s}`"))),
            Raw::Int(i) => Ok(Rat(crate::linalg::q(i))),
        }
    }
}

type RawMatrix = Vec<Vec<Rat>>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtlasDocument {
    format: String,
    ambient_dimension: usize,
    components: Vec<String>,
    strata: Vec<StratumDocument>,
    #[serde(default)]
    restrictions: Vec<MapDocument>,
    #[serde(default)]
    gysin: Vec<MapDocument>,
    #[serde(default)]
    divisor_classes: Vec<ClassDocument>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StratumDocument {
    indices: Vec<usize>,
    label: String,
    dimension: usize,
    /// Degree `j` -> list of `[a, b, dim]`.
    hodge: BTreeMap<String, Vec<[i64; 3]>>,
    /// `"j1,j2"` -> product table.
    #[serde(default)]
    mult: BTreeMap<String, RawMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    unit: Option<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fundamental: Option<Vec<Rat>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapDocument {
    from: String,
    to: String,
    /// Source degree -> block.
    blocks: BTreeMap<String, RawMatrix>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassDocument {
    component: String,
    stratum: String,
    class: Vec<Rat>,
}

fn parse_degree(key: &str) -> Result<usize, AtlasError> {
    key.trim()
        .parse()
        .map_err(|_| AtlasError::Schema(format!("`{key}` is not a degree")))
}

fn to_matrix(raw: RawMatrix, expected_cols: usize, what: &str) -> Result<RationalMatrix, AtlasError> {
    let cols = raw.first().map_or(expected_cols, Vec::len);
    let rows = raw.into_iter().map(|r| r.into_iter().map(|x| x.0).collect()).collect();
    RationalMatrix::from_rows(rows, cols)
        .map_err(|e| AtlasError::DimensionMismatch(format!("{what}: {e}")))
}

fn from_matrix(m: &RationalMatrix) -> RawMatrix {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(Rat).collect())
        .collect()
}

fn vector(v: Option<Vec<Rat>>, dim: usize, what: &str) -> Result<Vec<Q>, AtlasError> {
    match v {
        Some(v) => Ok(v.into_iter().map(|x| x.0).collect()),
        None if dim == 1 => Ok(vec![crate::linalg::q(1)]),
        None => Err(AtlasError::Schema(format!(
            "{what} must be given explicitly when the space has dimension {dim}"
        ))),
    }
}

fn stratum_from_document(doc: StratumDocument) -> Result<Stratum, AtlasError> {
    let d = doc.dimension;
    let mut pieces = vec![Vec::new(); 2 * d + 1];
    for (key, list) in doc.hodge {
        let j = parse_degree(&key)?;
        if j > 2 * d {
            return Err(AtlasError::DimensionMismatch(format!(
                "stratum `{}` declares H^{j} above its top degree {}",
                doc.label,
                2 * d
            )));
        }
        for [a, b, n] in list {
            if n < 0 {
                return Err(AtlasError::Schema(format!("negative dimension in `{}`", doc.label)));
            }
            pieces[j].push((HodgeType(a as i32, b as i32), n as usize));
        }
    }
    let dim = |j: usize| pieces.get(j).map_or(0, |p: &Vec<(HodgeType, usize)>| p.iter().map(|x| x.1).sum());
    let mut mult = BTreeMap::new();
    for (key, raw) in doc.mult {
        let (a, b) = key
            .split_once(',')
            .ok_or_else(|| AtlasError::Schema(format!("product key `{key}` must be `j1,j2`")))?;
        let (j1, j2) = (parse_degree(a)?, parse_degree(b)?);
        let what = format!("product {key} of `{}`", doc.label);
        mult.insert((j1, j2), to_matrix(raw, dim(j1) * dim(j2), &what)?);
    }
    let unit = vector(doc.unit, dim(0), "unit")?;
    let fundamental = vector(doc.fundamental, dim(2 * d), "fundamental class")?;
    let ring = PureHodgeRing::new(d, pieces, mult, unit, fundamental).map_err(|e| match e {
        AtlasError::DimensionMismatch(m) => {
            AtlasError::DimensionMismatch(format!("stratum `{}`: {m}", doc.label))
        }
        AtlasError::Bidegree(m) => AtlasError::Bidegree(format!("stratum `{}`: {m}", doc.label)),
        other => other,
    })?;
    Ok(Stratum {
        indices: doc.indices,
        label: doc.label,
        ring,
    })
}

fn map_from_document(
    doc: MapDocument,
    source_dims: &BTreeMap<String, PureHodgeRing>,
    kind: &str,
) -> Result<MapSpec, AtlasError> {
    let source = source_dims
        .get(&doc.from)
        .ok_or_else(|| AtlasError::UnknownStratum(doc.from.clone()))?;
    let mut blocks = BTreeMap::new();
    for (key, raw) in doc.blocks {
        let j = parse_degree(&key)?;
        let what = format!("{kind} {} -> {} degree {j}", doc.from, doc.to);
        blocks.insert(j, to_matrix(raw, source.dim(j), &what)?);
    }
    Ok(MapSpec {
        from: doc.from,
        to: doc.to,
        map: GradedMap::new(blocks),
    })
}

/// Parses and structurally checks an atlas document.
pub fn load_atlas(document: &str) -> Result<StrataAtlas, AtlasError> {
    let doc: AtlasDocument =
        serde_json::from_str(document).map_err(|e| AtlasError::Schema(e.to_string()))?;
    if doc.format != ATLAS_FORMAT {
        return Err(AtlasError::Schema(format!(
            "unsupported format `{}`, expected `{ATLAS_FORMAT}`",
            doc.format
        )));
    }
    let strata = doc
        .strata
        .into_iter()
        .map(stratum_from_document)
        .collect::<Result<Vec<_>, _>>()?;
    let rings: BTreeMap<String, PureHodgeRing> =
        strata.iter().map(|s| (s.label.clone(), s.ring.clone())).collect();
    let restrictions = doc
        .restrictions
        .into_iter()
        .map(|m| map_from_document(m, &rings, "restriction"))
        .collect::<Result<Vec<_>, _>>()?;
    let gysin = doc
        .gysin
        .into_iter()
        .map(|m| map_from_document(m, &rings, "Gysin map"))
        .collect::<Result<Vec<_>, _>>()?;
    let classes = doc
        .divisor_classes
        .into_iter()
        .map(|c| ClassSpec {
            component: c.component,
            stratum: c.stratum,
            class: c.class.into_iter().map(|x| x.0).collect(),
        })
        .collect();
    StrataAtlas::new(doc.ambient_dimension, doc.components, strata, restrictions, gysin, classes)
}

impl StrataAtlas {
    pub fn to_json(&self) -> String {
        let strata = self
            .strata()
            .iter()
            .map(|s| {
                let ring = &s.ring;
                let hodge = (0..=ring.top_degree())
                    .map(|j| {
                        let list = ring
                            .pieces(j)
                            .iter()
                            .map(|&(t, n)| [t.0 as i64, t.1 as i64, n as i64])
                            .collect();
                        (j.to_string(), list)
                    })
                    .collect();
                let mult = ring
                    .mult_tables()
                    .iter()
                    .map(|(&(a, b), m)| (format!("{a},{b}"), from_matrix(m)))
                    .collect();
                StratumDocument {
                    indices: s.indices.clone(),
                    label: s.label.clone(),
                    dimension: ring.dimension(),
                    hodge,
                    mult,
                    unit: Some(ring.unit().iter().cloned().map(Rat).collect()),
                    fundamental: Some(ring.fundamental_class().iter().cloned().map(Rat).collect()),
                }
            })
            .collect();
        let map_doc = |from: &str, to: &str, map: &GradedMap| MapDocument {
            from: from.to_string(),
            to: to.to_string(),
            blocks: map.blocks.iter().map(|(j, m)| (j.to_string(), from_matrix(m))).collect(),
        };
        let restrictions = self
            .restriction_pairs()
            .map(|(s, t)| map_doc(self.label(s), self.label(t), self.declared_restriction(s, t).unwrap()))
            .collect();
        let mut gysin = Vec::new();
        for (s, t) in self.restriction_pairs() {
            if let Some(m) = self.declared_gysin(t, s) {
                gysin.push(map_doc(self.label(t), self.label(s), m));
            }
        }
        let divisor_classes = self
            .declared_classes()
            .iter()
            .map(|(&(a, s), class)| ClassDocument {
                component: self.components()[a].clone(),
                stratum: self.label(s).to_string(),
                class: class.iter().cloned().map(Rat).collect(),
            })
            .collect();
        let doc = AtlasDocument {
            format: ATLAS_FORMAT.to_string(),
            ambient_dimension: self.ambient_dimension(),
            components: self.components().to_vec(),
            strata,
            restrictions,
            gysin,
            divisor_classes,
        };
        serde_json::to_string_pretty(&doc).expect("atlas documents always serialize")
    }
}
