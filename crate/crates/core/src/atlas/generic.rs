use std::collections::BTreeMap;

use super::{AtlasError, ClassSpec, GradedMap, MapSpec, PureHodgeRing, StrataAtlas, Stratum};
use crate::linalg::{q, RationalMatrix};

fn subsets_up_to(m: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (0u32..1 << m)
        .map(|mask| (0..m).filter(|i| mask & (1 << i) != 0).collect::<Vec<_>>())
        .filter(|s| s.len() <= max)
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

pub(crate) fn stratum_label(indices: &[usize]) -> String {
    if indices.is_empty() {
        "X".to_string()
    } else {
        let parts: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
        format!("D{}", parts.join("_"))
    }
}

/// `m` hyperplanes in general position in `P^n`.
///
/// Every nonempty intersection `D_I` (`|I| <= n`) is a linear subspace
/// `P^{n-|I|}` whose ring is truncated polynomial in the hyperplane class `h`.
/// Restrictions send `h` to `h`, Gysin maps send `h^i` to `h^{i+1}` and every
/// divisor class is `h`.
pub fn generic_arrangement(n: usize, m: usize) -> Result<StrataAtlas, AtlasError> {
    if n == 0 {
        return Err(AtlasError::BadParams("ambient dimension must be at least 1".into()));
    }
    if m > 16 {
        return Err(AtlasError::BadParams(format!("{m} hyperplanes is beyond desk scale")));
    }
    let components: Vec<String> = (0..m).map(|i| format!("H{i}")).collect();
    let index_sets = subsets_up_to(m, n);
    let strata: Vec<Stratum> = index_sets
        .iter()
        .map(|i| Stratum {
            indices: i.clone(),
            label: stratum_label(i),
            ring: PureHodgeRing::projective(n - i.len()),
        })
        .collect();

    let mut restrictions = Vec::new();
    let mut gysin = Vec::new();
    for t in index_sets.iter().filter(|i| !i.is_empty()) {
        let dim_t = n - t.len();
        for &a in t {
            let s: Vec<usize> = t.iter().copied().filter(|&x| x != a).collect();
            let one = || RationalMatrix::identity(1);
            let restriction = (0..=dim_t).map(|i| (2 * i, one())).collect::<BTreeMap<_, _>>();
            let pushforward = (0..=dim_t).map(|i| (2 * i, one())).collect::<BTreeMap<_, _>>();
            restrictions.push(MapSpec {
                from: stratum_label(&s),
                to: stratum_label(t),
                map: GradedMap::new(restriction),
            });
            gysin.push(MapSpec {
                from: stratum_label(t),
                to: stratum_label(&s),
                map: GradedMap::new(pushforward),
            });
        }
    }

    let mut classes = Vec::new();
    for s in index_sets.iter().filter(|i| i.len() < n) {
        for c in &components {
            classes.push(ClassSpec {
                component: c.clone(),
                stratum: stratum_label(s),
                class: vec![q(1)],
            });
        }
    }

    StrataAtlas::new(n, components, strata, restrictions, gysin, classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn projective_line_with_two_points() {
        let atlas = generic_arrangement(1, 2).unwrap();
        assert_eq!(atlas.strata().len(), 3);
        for s in atlas.strata_of_size(1) {
            assert_eq!(atlas.ring(s).dim(0), 1);
            assert_eq!(atlas.ring(s).dimension(), 0);
        }
    }

    #[test]
    fn three_lines_in_the_plane() {
        let atlas = generic_arrangement(2, 3).unwrap();
        assert_eq!(atlas.strata_of_size(0).len(), 1);
        assert_eq!(atlas.strata_of_size(1).len(), 3);
        assert_eq!(atlas.strata_of_size(2).len(), 3);
        assert!(atlas.strata_of_size(3).is_empty());
    }

    #[test]
    fn empty_divisor() {
        let atlas = generic_arrangement(2, 0).unwrap();
        assert_eq!(atlas.strata().len(), 1);
        assert!(!atlas.has_divisor());
    }

    #[test]
    fn stratum_counts_are_binomial() {
        for n in 1..=3 {
            for m in 0..=5 {
                let atlas = generic_arrangement(n, m).unwrap();
                for k in 0..=n {
                    assert_eq!(atlas.strata_of_size(k).len(), binomial(m, k), "n={n} m={m} k={k}");
                }
            }
        }
    }

    #[test]
    fn zero_dimension_is_rejected() {
        assert!(matches!(generic_arrangement(0, 2), Err(AtlasError::BadParams(_))));
    }
}
