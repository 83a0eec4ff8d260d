mod common;

use common::{betti, cech_divisor, orlik_solomon, pair_oracle, table_dims};
use nc_hodge_core::atlas::{generic_arrangement, HodgeType};
use nc_hodge_core::complexes::{build, ComplexSelector};
use nc_hodge_core::linalg::{q, reduce, RationalMatrix};
use nc_hodge_core::logforms::{enumerate_charts, random_form, random_ideal_form, LogChart, LogPolyForm, Poly};
use nc_hodge_core::mhs::compute_table;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_matrix() -> impl Strategy<Value = RationalMatrix> {
    (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
        prop::collection::vec(-3i64..=3, r * c).prop_map(move |v| RationalMatrix::from_i64(r, c, &v))
    })
}

fn chart_and_rng() -> impl Strategy<Value = (LogChart, u64)> {
    let charts = enumerate_charts(4);
    (0..charts.len(), any::<u64>()).prop_map(move |(i, s)| (charts[i].clone(), s))
}

/// `z^e ξ_B ∈ W_k` by searching the squarefree generators `z_E` of
/// `J(B, k)`: `E ⊆ B ∩ {1..l}` with `|E| >= |B ∩ {1..l}| - k`.
fn in_jbk(b: &[usize], e: &[u32], l: usize, k: usize) -> bool {
    let logs: Vec<usize> = b.iter().copied().filter(|&i| i <= l).collect();
    let need = logs.len().saturating_sub(k);
    (0u32..(1 << logs.len())).any(|pick| {
        pick.count_ones() as usize >= need
            && logs.iter().enumerate().all(|(t, &i)| pick & (1 << t) == 0 || e[i - 1] > 0)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_nullity_and_kernel(m in small_matrix()) {
        let red = reduce(&m);
        prop_assert_eq!(red.rank + red.kernel_basis.len(), m.cols());
        prop_assert_eq!(red.rank, m.transpose().rank());
        for v in &red.kernel_basis {
            prop_assert!(m.mul_vec(v).unwrap().iter().all(|x| *x == q(0)));
        }
    }

    #[test]
    fn exterior_derivative_squares_to_zero((chart, seed) in chart_and_rng()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = (seed as usize) % (chart.n + 1);
        let a = random_form(chart.n, chart.l, p, &mut rng);
        prop_assert!(a.exterior_d().exterior_d().is_zero(), "{}", a);
    }

    #[test]
    fn ideal_forms_form_a_subcomplex((chart, seed) in chart_and_rng()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = (seed as usize) % (chart.n + 1);
        let a = random_ideal_form(&chart, p, &mut rng);
        prop_assert!(a.in_ideal_subcomplex(&chart));
        prop_assert!(a.exterior_d().in_ideal_subcomplex(&chart), "{}", a);
    }

    #[test]
    fn wedge_is_graded_commutative_and_leibniz((chart, seed) in chart_and_rng()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p1, p2) = ((seed as usize) % (chart.n + 1), ((seed >> 8) as usize) % (chart.n + 1));
        let a = random_form(chart.n, chart.l, p1, &mut rng);
        let b = random_form(chart.n, chart.l, p2, &mut rng);
        let ab = a.wedge(&b).unwrap();
        let s = if (p1 * p2) % 2 == 0 { q(1) } else { q(-1) };
        prop_assert_eq!(&ab, &b.wedge(&a).unwrap().scale(&s));
        let sign = if p1 % 2 == 0 { q(1) } else { q(-1) };
        let rhs = a.exterior_d().wedge(&b).unwrap().add(&a.wedge(&b.exterior_d()).unwrap().scale(&sign)).unwrap();
        prop_assert_eq!(ab.exterior_d(), rhs);
    }

    #[test]
    fn weight_and_form_degree_are_multiplicative((chart, seed) in chart_and_rng()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p1, p2) = ((seed as usize) % (chart.n + 1), ((seed >> 8) as usize) % (chart.n + 1));
        let a = random_form(chart.n, chart.l, p1, &mut rng);
        let b = random_form(chart.n, chart.l, p2, &mut rng);
        let ab = a.wedge(&b).unwrap();
        if !ab.is_zero() {
            prop_assert_eq!(ab.form_degree().unwrap(), Some(p1 + p2));
            prop_assert!(ab.weight_level().unwrap() <= a.weight_level().unwrap() + b.weight_level().unwrap());
        }
    }

    #[test]
    fn residue_kills_repeated_log_factors((chart, seed) in chart_and_rng()) {
        prop_assume!(chart.l >= 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = 1 + (seed as usize) % chart.l;
        let xi = LogPolyForm::xi(chart.n, chart.l, &[i]).unwrap();
        let a = xi.wedge(&random_form(chart.n, chart.l, 0, &mut rng)).unwrap();
        let b = xi.wedge(&random_form(chart.n, chart.l, 1.min(chart.n - 1), &mut rng)).unwrap();
        let ab = a.wedge(&b).unwrap();
        prop_assert!(ab.is_zero());
        prop_assert!(ab.residue(&[i]).unwrap().is_zero());
    }

    #[test]
    fn weight_filtration_is_monomial(
        (chart, seed) in chart_and_rng(),
        exps in prop::collection::vec(0u32..3, 4),
    ) {
        let n = chart.n;
        let b: Vec<usize> = (1..=n).filter(|i| (seed >> i) & 1 == 1).collect();
        let e: Vec<u32> = exps[..n].to_vec();
        let form = LogPolyForm::term(n, chart.l, &b, Poly::monomial(n, e.clone(), q(1))).unwrap();
        let level = form.weight_level().unwrap();
        for k in 0..=n {
            prop_assert_eq!(level <= k, in_jbk(&b, &e, chart.l, k));
            let in_ic = chart.j.iter().any(|&j| e[j - 1] > 0);
            prop_assert_eq!(
                form.in_ideal_subcomplex(&chart) && level <= k,
                in_ic && in_jbk(&b, &e, chart.l, k)
            );
        }
    }
}

#[test]
fn complements_of_generic_arrangements_match_orlik_solomon() {
    for n in 1..=3 {
        for m in 1..=5 {
            let a = generic_arrangement(n, m).unwrap();
            let t = compute_table(&build(&a, &ComplexSelector::Log).unwrap()).unwrap();
            let os = orlik_solomon(n, m);
            assert_eq!(betti(&t, n as i32), os, "P^{n} minus {m} hyperplanes");
            for (k, &b) in os.iter().enumerate() {
                let k = k as i32;
                assert_eq!(t.dim(k, 2 * k, HodgeType(k, k)), b, "H^{k} is pure Tate");
            }
            for k in n as i32 + 1..=2 * n as i32 {
                assert_eq!(t.betti(k), 0);
            }
        }
    }
}

#[test]
fn pair_and_divisor_tables_match_oracles() {
    for n in 1..=3 {
        for m in 1..=4 {
            let a = generic_arrangement(n, m).unwrap();
            let xd = compute_table(&build(&a, &ComplexSelector::XD).unwrap()).unwrap();
            assert_eq!(table_dims(&xd), pair_oracle(&a), "H(X,D) of P^{n} with {m} hyperplanes");
            let d = compute_table(&build(&a, &ComplexSelector::D).unwrap()).unwrap();
            assert_eq!(table_dims(&d), cech_divisor(&a), "H(D) of P^{n} with {m} hyperplanes");
        }
    }
}

#[test]
fn pair_cohomology_of_the_triangle() {
    let a = common::fixture("triangle");
    let xd = compute_table(&build(&a, &ComplexSelector::XD).unwrap()).unwrap();
    assert_eq!(betti(&xd, 4), vec![0, 0, 1, 2, 1]);
    assert_eq!(table_dims(&xd), pair_oracle(&a));
}

#[test]
fn fujiki_dimensions_on_generic_arrangements() {
    for n in 1..=3 {
        for m in 1..=4 {
            let a = generic_arrangement(n, m).unwrap();
            let u = compute_table(&build(&a, &ComplexSelector::Log).unwrap()).unwrap();
            let xd = compute_table(&build(&a, &ComplexSelector::XD).unwrap()).unwrap();
            let loc = compute_table(&build(&a, &ComplexSelector::LocD).unwrap()).unwrap();
            let d = compute_table(&build(&a, &ComplexSelector::D).unwrap()).unwrap();
            let top = 2 * n as i32;
            for i in 0..=top {
                assert_eq!(u.betti(i), xd.betti(top - i), "P^{n}, {m} hyperplanes, degree {i}");
                assert_eq!(loc.betti(i), d.betti(top - i), "P^{n}, {m} hyperplanes, degree {i}");
            }
        }
    }
}
