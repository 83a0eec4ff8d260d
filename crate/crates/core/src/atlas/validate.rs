use serde::Serialize;

use num_traits::{One, Zero};

use super::{HodgeType, StrataAtlas, StratumId};
use crate::linalg::{RationalMatrix, Q};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub check: String,
    pub location: String,
    pub witness: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, check: &str, location: String, witness: String) {
        self.violations.push(Violation {
            check: check.to_string(),
            location,
            witness,
        });
    }
}

fn basis(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v
}

/// First column where two equally shaped matrices differ.
fn first_difference(a: &RationalMatrix, b: &RationalMatrix) -> Option<usize> {
    (0..a.cols()).find(|&c| a.column(c) != b.column(c))
}

/// Checks every algebraic identity the complexes rely on and reports each
/// failure with a witness class. An empty report means the atlas is valid.
pub fn validate_atlas(atlas: &StrataAtlas) -> ValidationReport {
    let mut report = ValidationReport::default();
    for s in atlas.stratum_ids() {
        check_ring(atlas, s, &mut report);
    }
    for s in atlas.stratum_ids() {
        for (a, _) in atlas.components().iter().enumerate() {
            for &t in atlas.children(s, a) {
                check_covering(atlas, s, t, a, &mut report);
            }
            if !atlas.indices(s).contains(&a) {
                check_excess(atlas, s, a, &mut report);
            }
        }
        check_squares(atlas, s, &mut report);
    }
    report
}

fn check_ring(atlas: &StrataAtlas, s: StratumId, report: &mut ValidationReport) {
    let ring = atlas.ring(s);
    let label = atlas.label(s);
    let top = ring.top_degree();
    let d = ring.dimension() as i32;
    if ring.types(top) != vec![HodgeType(d, d)] {
        report.push(
            "top degree is Q(-d)",
            label.to_string(),
            format!("H^{top} has types {:?}", ring.types(top)),
        );
    }
    if ring.fundamental_class().iter().all(Zero::is_zero) {
        report.push("fundamental class", label.to_string(), "fundamental class is zero".into());
    }
    for j in 0..=top {
        let unit = ring.left_multiplication(0, ring.unit(), j);
        if let Some(c) = first_difference(&unit, &RationalMatrix::identity(ring.dim(j))) {
            report.push("unit", label.to_string(), format!("1 * e{c} != e{c} in H^{j}"));
        }
    }
    for j1 in 0..=top {
        for j2 in 0..=top - j1 {
            let sign = if (j1 * j2) % 2 == 1 { -Q::one() } else { Q::one() };
            for x in 0..ring.dim(j1) {
                for y in 0..ring.dim(j2) {
                    let (ex, ey) = (basis(ring.dim(j1), x), basis(ring.dim(j2), y));
                    let xy = ring.multiply(j1, &ex, j2, &ey);
                    let yx: Vec<Q> = ring.multiply(j2, &ey, j1, &ex).iter().map(|v| v * &sign).collect();
                    if xy != yx {
                        report.push(
                            "graded commutativity",
                            label.to_string(),
                            format!("e{x} in H^{j1}, e{y} in H^{j2}"),
                        );
                    }
                }
            }
            for j3 in 0..=top - j1 - j2 {
                for x in 0..ring.dim(j1) {
                    let ex = basis(ring.dim(j1), x);
                    let left = ring.left_multiplication(j1, &ex, j2 + j3);
                    for y in 0..ring.dim(j2) {
                        let ey = basis(ring.dim(j2), y);
                        let xy = ring.multiply(j1, &ex, j2, &ey);
                        let lhs = ring.left_multiplication(j1 + j2, &xy, j3);
                        let rhs = left
                            .mul(&ring.left_multiplication(j2, &ey, j3))
                            .expect("shapes agree");
                        if lhs != rhs {
                            report.push(
                                "associativity",
                                label.to_string(),
                                format!("e{x} in H^{j1}, e{y} in H^{j2}, H^{j3}"),
                            );
                        }
                    }
                }
            }
        }
    }
}

fn check_covering(atlas: &StrataAtlas, s: StratumId, t: StratumId, a: usize, report: &mut ValidationReport) {
    let (rs, rt) = (atlas.ring(s), atlas.ring(t));
    let loc = format!("{} -> {}", atlas.label(s), atlas.label(t));

    let unit = atlas.restriction(s, t, 0).mul_vec(rs.unit()).expect("shape");
    if unit != rt.unit() {
        report.push("restriction is a ring map", loc.clone(), "unit is not preserved".into());
    }
    for j1 in 0..=rs.top_degree() {
        for j2 in 0..=rs.top_degree() - j1 {
            for x in 0..rs.dim(j1) {
                for y in 0..rs.dim(j2) {
                    let (ex, ey) = (basis(rs.dim(j1), x), basis(rs.dim(j2), y));
                    let lhs = atlas
                        .restriction(s, t, j1 + j2)
                        .mul_vec(&rs.multiply(j1, &ex, j2, &ey))
                        .expect("shape");
                    let rx = atlas.restriction(s, t, j1).mul_vec(&ex).expect("shape");
                    let ry = atlas.restriction(s, t, j2).mul_vec(&ey).expect("shape");
                    if lhs != rt.multiply(j1, &rx, j2, &ry) {
                        report.push(
                            "restriction is a ring map",
                            loc.clone(),
                            format!("e{x} in H^{j1}, e{y} in H^{j2} of {}", atlas.label(s)),
                        );
                    }
                }
            }
        }
    }

    // projection formula: gamma(x * rho(y)) = gamma(x) * y
    for jx in 0..=rt.top_degree() {
        for jy in 0..=rs.top_degree() {
            if jx + jy > rt.top_degree() {
                continue;
            }
            for x in 0..rt.dim(jx) {
                for y in 0..rs.dim(jy) {
                    let (ex, ey) = (basis(rt.dim(jx), x), basis(rs.dim(jy), y));
                    let ry = atlas.restriction(s, t, jy).mul_vec(&ey).expect("shape");
                    let lhs = atlas
                        .gysin(t, s, jx + jy)
                        .mul_vec(&rt.multiply(jx, &ex, jy, &ry))
                        .expect("shape");
                    let gx = atlas.gysin(t, s, jx).mul_vec(&ex).expect("shape");
                    if lhs != rs.multiply(jx + 2, &gx, jy, &ey) {
                        report.push(
                            "projection formula",
                            format!("{} -> {}", atlas.label(t), atlas.label(s)),
                            format!("e{x} in H^{jx}({}), e{y} in H^{jy}({})", atlas.label(t), atlas.label(s)),
                        );
                    }
                }
            }
        }
    }

    // self-intersection: rho(S -> T2) gamma(T -> S) = [T2 == T] c(a, T)
    for &t2 in atlas.children(s, a) {
        for j in 0..=rt.top_degree() {
            let lhs = atlas.restriction(s, t2, j + 2).mul(&atlas.gysin(t, s, j)).expect("shape");
            let rhs = if t2 == t {
                atlas.chern_multiplication(a, t, j)
            } else {
                RationalMatrix::zeros(lhs.rows(), lhs.cols())
            };
            if let Some(c) = first_difference(&lhs, &rhs) {
                report.push(
                    "self-intersection formula",
                    format!("{} -> {} -> {}", atlas.label(t), atlas.label(s), atlas.label(t2)),
                    format!("e{c} in H^{j}({})", atlas.label(t)),
                );
            }
        }
    }

    for b in 0..atlas.components().len() {
        let cs = atlas.divisor_class(b, s);
        let restricted = atlas.restriction(s, t, 2).mul_vec(&cs).expect("shape");
        if restricted != atlas.divisor_class(b, t) {
            report.push(
                "divisor classes restrict",
                loc.clone(),
                format!("c({}, {}) restricts to the wrong class", atlas.components()[b], atlas.label(s)),
            );
        }
    }

    // base change along every further component b
    for b in 0..atlas.components().len() {
        if b == a || atlas.indices(s).contains(&b) {
            continue;
        }
        for &sb in atlas.children(s, b) {
            for j in 0..=rt.top_degree() {
                let lhs = atlas.restriction(s, sb, j + 2).mul(&atlas.gysin(t, s, j)).expect("shape");
                let mut rhs = RationalMatrix::zeros(lhs.rows(), lhs.cols());
                for &tb in atlas.children(t, b) {
                    if atlas.parent(tb, a) == Some(sb) {
                        let term = atlas.gysin(tb, sb, j).mul(&atlas.restriction(t, tb, j)).expect("shape");
                        rhs.add_assign(&term).expect("shape");
                    }
                }
                if let Some(c) = first_difference(&lhs, &rhs) {
                    report.push(
                        "base change",
                        format!("{} -> {} restricted to {}", atlas.label(t), atlas.label(s), atlas.label(sb)),
                        format!("e{c} in H^{j}({})", atlas.label(t)),
                    );
                }
            }
        }
    }
}

/// `sum over components T of S ∩ D_a of gamma(T -> S) rho(S -> T) = c(a, S)`.
fn check_excess(atlas: &StrataAtlas, s: StratumId, a: usize, report: &mut ValidationReport) {
    let rs = atlas.ring(s);
    for j in 0..=rs.top_degree() {
        let mut lhs = RationalMatrix::zeros(rs.dim(j + 2), rs.dim(j));
        for &t in atlas.children(s, a) {
            let term = atlas.gysin(t, s, j).mul(&atlas.restriction(s, t, j)).expect("shape");
            lhs.add_assign(&term).expect("shape");
        }
        let rhs = atlas.chern_multiplication(a, s, j);
        if let Some(c) = first_difference(&lhs, &rhs) {
            report.push(
                "gysin after restriction is multiplication by the divisor class",
                format!("{} along {}", atlas.label(s), atlas.components()[a]),
                format!("e{c} in H^{j}({})", atlas.label(s)),
            );
        }
    }
}

/// Both ways around each square of covering relations below `t` agree.
fn check_squares(atlas: &StrataAtlas, t: StratumId, report: &mut ValidationReport) {
    let idx = atlas.indices(t).to_vec();
    for (x, &a) in idx.iter().enumerate() {
        for &b in &idx[x + 1..] {
            let (pa, pb) = (atlas.parent(t, a).unwrap(), atlas.parent(t, b).unwrap());
            let top = atlas.parent(pa, b).unwrap();
            for j in 0..=atlas.ring(top).top_degree() {
                let via_a = atlas
                    .covering_restriction(pa, t, j)
                    .mul(&atlas.covering_restriction(top, pa, j))
                    .expect("shape");
                let via_b = atlas
                    .covering_restriction(pb, t, j)
                    .mul(&atlas.covering_restriction(top, pb, j))
                    .expect("shape");
                if let Some(c) = first_difference(&via_a, &via_b) {
                    report.push(
                        "restriction is functorial",
                        format!("{} -> {}", atlas.label(top), atlas.label(t)),
                        format!("e{c} in H^{j}({})", atlas.label(top)),
                    );
                }
            }
            for j in 0..=atlas.ring(t).top_degree() {
                let via_a = atlas.gysin(pa, top, j + 2).mul(&atlas.gysin(t, pa, j)).expect("shape");
                let via_b = atlas.gysin(pb, top, j + 2).mul(&atlas.gysin(t, pb, j)).expect("shape");
                if let Some(c) = first_difference(&via_a, &via_b) {
                    report.push(
                        "gysin is functorial",
                        format!("{} -> {}", atlas.label(t), atlas.label(top)),
                        format!("e{c} in H^{j}({})", atlas.label(t)),
                    );
                }
            }
        }
    }
}
