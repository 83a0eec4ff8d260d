//! Independent oracles shared by the integration tests. They work from the
//! atlas data directly and never go through the weight-row families.

#![allow(dead_code)]

use std::collections::BTreeMap;

use nc_hodge_core::atlas::{load_atlas, StrataAtlas, StratumId};
use nc_hodge_core::cli::builtin_fixture;
use nc_hodge_core::linalg::RationalMatrix;

pub fn fixture(name: &str) -> StrataAtlas {
    load_atlas(builtin_fixture(name).expect("builtin fixture")).expect("fixture loads")
}

pub fn all_fixtures() -> Vec<(&'static str, StrataAtlas)> {
    ["p1_2pts", "triangle", "p1_1pt", "elliptic_1pt"]
        .into_iter()
        .map(|n| (n, fixture(n)))
        .collect()
}

fn stack_rows(blocks: &[RationalMatrix], cols: usize) -> RationalMatrix {
    let rows: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut m = RationalMatrix::zeros(rows, cols);
    let mut r0 = 0;
    for b in blocks {
        m.place(r0, 0, b);
        r0 += b.rows();
    }
    m
}

/// `dim H^k(D)` per weight `q`, from the Mayer–Vietoris double complex
/// `⊕_{|I| = p+1} H^q(D_I)` with the alternating restriction differential.
pub fn cech_divisor(atlas: &StrataAtlas) -> BTreeMap<(usize, usize), usize> {
    let n = atlas.ambient_dimension();
    let mut out = BTreeMap::new();
    for qd in 0..=2 * n {
        let level = |p: usize| atlas.strata_of_size(p + 1);
        let dims = |p: usize| level(p).iter().map(|&s| atlas.ring(s).dim(qd)).sum::<usize>();
        let delta = |p: usize| -> RationalMatrix {
            let (src, tgt) = (level(p), level(p + 1));
            let mut m = RationalMatrix::zeros(dims(p + 1), dims(p));
            let mut r0 = 0;
            for &t in &tgt {
                let mut c0 = 0;
                for &s in &src {
                    let it = atlas.indices(t);
                    let is = atlas.indices(s);
                    if atlas.contains(s, t) {
                        let r = it.iter().position(|a| !is.contains(a)).expect("one extra index");
                        let block = atlas.restriction(s, t, qd);
                        m.place(r0, c0, &if r % 2 == 0 { block } else { block.negated() });
                    }
                    c0 += atlas.ring(s).dim(qd);
                }
                r0 += atlas.ring(t).dim(qd);
            }
            m
        };
        for p in 0..n {
            let into = if p == 0 { 0 } else { delta(p - 1).rank() };
            let h = dims(p) - delta(p).rank() - into;
            if h > 0 {
                out.insert((p + qd, qd), h);
            }
        }
    }
    out
}

/// Rank of `H^k(X) -> ⊕_a H^k(D_a)`.
pub fn restriction_rank(atlas: &StrataAtlas, k: usize) -> usize {
    let x = atlas.ambient();
    let blocks: Vec<RationalMatrix> = atlas
        .strata_of_size(1)
        .into_iter()
        .map(|s| atlas.restriction(x, s, k))
        .collect();
    stack_rows(&blocks, atlas.ring(x).dim(k)).rank()
}

/// `dim H^m(X, D)` per weight from the long exact sequence of the pair,
/// using the Čech oracle for `D` and purity of `H^k(X)`.
pub fn pair_oracle(atlas: &StrataAtlas) -> BTreeMap<(usize, usize), usize> {
    let n = atlas.ambient_dimension();
    let hd = cech_divisor(atlas);
    let x = atlas.ambient();
    let mut out = BTreeMap::new();
    let mut add = |m: usize, w: usize, d: usize| {
        if d > 0 {
            *out.entry((m, w)).or_insert(0) += d;
        }
    };
    for m in 0..=2 * n {
        add(m, m, atlas.ring(x).dim(m) - restriction_rank(atlas, m));
        if m >= 1 {
            for (&(k, w), &d) in &hd {
                if k != m - 1 {
                    continue;
                }
                let d = if w == m - 1 { d - restriction_rank(atlas, m - 1) } else { d };
                add(m, w, d);
            }
        }
    }
    out
}

/// Betti numbers of the complement of `m` generic hyperplanes in `P^n`
/// (Orlik–Solomon: the affine complement of `m - 1` generic hyperplanes).
pub fn orlik_solomon(n: usize, m: usize) -> Vec<usize> {
    (0..=n).map(|k| if m == 0 { usize::from(k == 0) } else { binomial(m - 1, k) }).collect()
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Deleted neighbourhood of a smooth divisor `D` with normal class
/// `c(a, D)`: the circle-bundle Gysin sequence gives, per `(degree, weight)`,
/// `coker(c: H^{k-2} -> H^k)` in weight `k` and `ker(c: H^{k-1} -> H^{k+1})`
/// in weight `k + 1`.
pub fn circle_bundle_oracle(atlas: &StrataAtlas, a: usize, d: StratumId) -> BTreeMap<(usize, usize), usize> {
    let ring = atlas.ring(d);
    let top = ring.top_degree();
    let mut out = BTreeMap::new();
    for k in 0..=top + 1 {
        let h = |j: usize| if j <= top { ring.dim(j) } else { 0 };
        let c_rank = |j: usize| if j + 2 <= top { atlas.chern_multiplication(a, d, j).rank() } else { 0 };
        let coker = h(k) - if k >= 2 { c_rank(k - 2) } else { 0 };
        let ker = if k >= 1 { h(k - 1) - c_rank(k - 1) } else { 0 };
        if coker > 0 {
            out.insert((k, k), coker);
        }
        if ker > 0 {
            out.insert((k, k + 1), ker);
        }
    }
    out
}

pub fn table_dims(t: &nc_hodge_core::mhs::MixedHodgeTable) -> BTreeMap<(usize, usize), usize> {
    let mut out = BTreeMap::new();
    for d in &t.degrees {
        for e in &d.entries {
            if e.dim > 0 {
                *out.entry((d.degree as usize, e.weight as usize)).or_insert(0) += e.dim;
            }
        }
    }
    out
}

pub fn betti(t: &nc_hodge_core::mhs::MixedHodgeTable, upto: i32) -> Vec<usize> {
    (0..=upto).map(|m| t.betti(m)).collect()
}
