mod props;

use num_traits::Zero;
use proptest::prelude::*;

use splitlab::bounds::{
    expected_codim_rank2, p2_relcanonical_bound, tangentgaps_bound, zeta_prime,
};
use splitlab::panel::{sup_distance, SlopePanel};
use splitlab::poly::hom_gcd_all;
use splitlab::sheaf::{chern, direct_sum, is_stable_rank2, kernel_of_forms, SheafPresentation};
use splitlab::{hom_gcd, Field, FiniteField, HomForm, Matrix, Rational, F101, F7};

fn check(name: &str, outcome: props::Outcome) {
    if let Err(e) = outcome {
        panic!("{name}: {e}");
    }
}

#[test]
fn hn_majorization() {
    check("majorization", props::hn_majorizes_subsum_filtrations(props::CASES));
}

#[test]
fn mediant() {
    check("mediant", props::mediant_inequality(props::CASES));
}

#[test]
fn blowup_feasible() {
    check("blowup", props::blowup_models(props::CASES));
}

#[test]
fn twist_equivariance() {
    check("twist", props::twist_equivariance(props::CASES));
}

#[test]
fn coordinate_invariance() {
    check("coordinates", props::coordinate_invariance(props::CASES));
}

#[test]
fn h0_window() {
    check("h0 window", props::h0_window(props::CASES));
}

#[test]
fn adjugate() {
    check("adjugate", props::adjugate_certificates(props::CASES));
}

#[test]
fn laplace() {
    check("laplace", props::laplace_containment(props::CASES));
}

type K = F101;

fn elem() -> impl Strategy<Value = K> {
    (0u64..101).prop_map(K::from_u64)
}

fn form(nvars: usize, deg: u32) -> impl Strategy<Value = HomForm<K>> {
    let n = splitlab::poly::basis_len(nvars, deg);
    prop::collection::vec(elem(), n).prop_map(move |c| HomForm::from_coeffs(nvars, deg, c).unwrap())
}

fn panel() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-20i64..=20, 1i64..=4), 3).prop_map(|v| v.into_iter().map(|(n, d)| Rational::new(n, d)).collect())
}

/// Rank by fraction-free elimination over the integers, reduced mod p only
/// at the pivot test.
fn bareiss_rank(rows: &[Vec<i64>], p: i64) -> usize {
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x.rem_euclid(p) as i128).collect()).collect();
    let (m, n) = (a.len(), a.first().map_or(0, Vec::len));
    let p = p as i128;
    let mut rank = 0;
    for c in 0..n {
        let Some(piv) = (rank..m).find(|&i| a[i][c] % p != 0) else { continue };
        a.swap(rank, piv);
        let pivot = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            let (f, g) = (row[c], pivot[c]);
            for (x, &y) in row.iter_mut().zip(&pivot) {
                *x = (*x * g - y * f).rem_euclid(p);
            }
        }
        rank += 1;
    }
    rank
}

/// Resultant of two binary forms via the Sylvester matrix.
fn resultant(f: &HomForm<K>, g: &HomForm<K>) -> K {
    let (m, n) = (f.degree() as usize, g.degree() as usize);
    let coeffs = |h: &HomForm<K>| -> Vec<K> {
        let d = h.degree();
        (0..=d).map(|i| h.coefficient(&[d - i, i])).collect()
    };
    let (cf, cg) = (coeffs(f), coeffs(g));
    let size = m + n;
    let s = Matrix::from_fn(size, size, |i, j| {
        if i < n {
            j.checked_sub(i).and_then(|k| cf.get(k)).copied().unwrap_or(K::from_u64(0))
        } else {
            j.checked_sub(i - n).and_then(|k| cg.get(k)).copied().unwrap_or(K::from_u64(0))
        }
    });
    s.det()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rank_matches_fraction_free(rows in prop::collection::vec(prop::collection::vec(-50i64..50, 5), 1..6)) {
        let m = Matrix::from_fn(rows.len(), 5, |i, j| F7::from_i64(rows[i][j]));
        prop_assert_eq!(m.rank(), bareiss_rank(&rows, 7));
        prop_assert_eq!(m.rank() + m.kernel_basis().cols(), 5);
    }

    #[test]
    fn gcd_is_trivial_iff_resultant_nonzero(f in form(2, 3), g in form(2, 2)) {
        prop_assume!(!f.is_zero() && !g.is_zero());
        let h = hom_gcd(&f, &g).unwrap();
        prop_assert!(f.div_exact(&h).is_some() && g.div_exact(&h).is_some());
        prop_assert_eq!(h.degree() == 0, resultant(&f, &g) != K::from_u64(0));
    }

    #[test]
    fn gcd_of_common_factor(a in form(2, 1), f in form(2, 2), g in form(2, 2)) {
        prop_assume!(!a.is_zero() && !f.is_zero() && !g.is_zero());
        let h = hom_gcd_all([&(&a * &f), &(&a * &g)]).unwrap();
        prop_assert!(h.div_exact(&a).is_some());
    }

    #[test]
    fn substitution_is_a_ring_map(f in form(3, 2), g in form(3, 2), s in prop::collection::vec(form(2, 2), 3), pt in prop::collection::vec(elem(), 2)) {
        let sum = (&f + &g).substitute(&s).unwrap();
        prop_assert_eq!(&sum, &(&f.substitute(&s).unwrap() + &g.substitute(&s).unwrap()));
        let prod = (&f * &g).substitute(&s).unwrap();
        prop_assert_eq!(&prod, &(&f.substitute(&s).unwrap() * &g.substitute(&s).unwrap()));
        let image: Vec<K> = s.iter().map(|h| h.evaluate(&pt)).collect();
        prop_assert_eq!(f.substitute(&s).unwrap().evaluate(&pt), f.evaluate(&image));
    }

    #[test]
    fn sup_distance_is_a_metric(a in panel(), b in panel(), c in panel()) {
        let (p, q, r) = (SlopePanel::new(a), SlopePanel::new(b), SlopePanel::new(c));
        let d = |x: &SlopePanel, y: &SlopePanel| sup_distance(x, y).unwrap();
        prop_assert!(d(&p, &p).is_zero());
        prop_assert_eq!(d(&p, &q), d(&q, &p));
        prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r));
    }

    #[test]
    fn kernel_sections_are_monotone(f in form(3, 1), g in form(3, 2), m in -3i64..6) {
        prop_assume!(!f.is_zero() && !g.is_zero());
        let Ok(e) = kernel_of_forms(vec![f, g], vec![-1, -2], 0) else { return Ok(()) };
        let h = |k| splitlab::sheaf::h0_twist(&e, k);
        prop_assert!(h(m) <= h(m + 1));
    }

    #[test]
    fn stability_is_twist_invariant(a in -4i64..=4, b in -4i64..=4, k in -3i64..=3) {
        let e: SheafPresentation<K> = direct_sum(&[a, b]);
        prop_assert_eq!(is_stable_rank2(&e).unwrap(), is_stable_rank2(&e.twist(k)).unwrap());
        prop_assert!(!is_stable_rank2(&e).unwrap());
        let (c, cd) = (chern(&e).unwrap(), chern(&e.dual()).unwrap());
        prop_assert_eq!(cd.c1, -c.c1);
        prop_assert_eq!(cd.c2, c.c2);
    }

    #[test]
    fn expected_codim_shape(n in 0i64..200, step in 1i64..50) {
        let (mu, nu) = (Rational::new(n, 20), Rational::new(n + step, 20));
        let (c, cn) = (expected_codim_rank2(mu).unwrap(), expected_codim_rank2(nu).unwrap());
        prop_assert!(c <= cn);
        if mu >= Rational::new(1, 2) {
            prop_assert_eq!(cn - c, (nu - mu) * 2);
        } else {
            prop_assert!(c.is_zero());
        }
    }

    #[test]
    fn tangentgaps_strong_dominates(n in 0i64..400, rank in 2i64..6, g in 0i64..4, dim_x in 1i64..5) {
        let t = tangentgaps_bound(Rational::new(n, 4), rank, g, dim_x).unwrap();
        prop_assert!(t.strong >= t.weak);
    }

    #[test]
    fn relcanonical_bound_properties(e in -20i64..20, extra in 0i64..40, steps in 1i64..10) {
        let f = (e * e).div_euclid(4) + 1 + extra;
        let start = e.div_euclid(2) + 1;
        let zeta = zeta_prime(e, f).unwrap();
        let mut prev = p2_relcanonical_bound(start, e, f).unwrap();
        prop_assert_eq!(prev.bound.radicand, zeta.radicand);
        for dq in start + 1..=start + steps {
            let cur = p2_relcanonical_bound(dq, e, f).unwrap();
            prop_assert!(cur.bound.radicand > prev.bound.radicand);
            prop_assert!(zeta.radicand <= cur.bound.radicand);
            prop_assert!((cur.first_form - cur.bound.value.approx).abs() < 1e-12);
            prev = cur;
        }
    }
}
