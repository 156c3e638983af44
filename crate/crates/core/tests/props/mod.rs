//! Randomized suites shared by the property tests and the acceptance run.
//! Each suite returns `Err` with the failing case instead of panicking.

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use splitlab::bounds::{blowup_model_check, BlowupModel};
use splitlab::fitting::{adjugate_kernel, fit_divisor_degree, fitting_generators, laplace_witnesses};
use splitlab::formmat::FormMatrix;
use splitlab::panel::{majorizes, mediant_check};
use splitlab::restrict::{pullback, splitting_type, RationalCurveMap, SplittingType};
use splitlab::sheaf::{conic_example_bundle, euler_tangent, kernel_of_forms, schwarzenberger, SheafPresentation};
use splitlab::{Error, FiniteField, HomForm, Matrix, Rational, F101};

pub const CASES: u32 = 10_000;

pub type Outcome = Result<(), String>;
pub type Suite = fn(u32) -> Outcome;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn finish<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Outcome {
    r.map_err(|e| e.to_string())
}

/// All ordered set partitions of `0..n`.
fn ordered_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(remaining: Vec<usize>, acc: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if remaining.is_empty() {
            out.push(acc.clone());
            return;
        }
        let k = remaining.len();
        for mask in 1u32..(1 << k) {
            let block: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| remaining[i]).collect();
            let rest: Vec<usize> = (0..k).filter(|i| mask & (1 << i) == 0).map(|i| remaining[i]).collect();
            acc.push(block);
            rec(rest, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec((0..n).collect(), &mut Vec::new(), &mut out);
    out
}

/// The sorted splitting of a split bundle on P1 dominates the panel of every
/// filtration by coordinate sub-sums, taken in filtration order.
pub fn hn_majorizes_subsum_filtrations(cases: u32) -> Outcome {
    let tables: Vec<Vec<Vec<Vec<usize>>>> = (0..=5).map(ordered_partitions).collect();
    finish(runner(cases).run(&prop::collection::vec(-6i64..=6, 1..=5), |parts| {
        let hn = SplittingType::new(parts.clone()).panel();
        for blocks in &tables[parts.len()] {
            let mut filtration = Vec::with_capacity(parts.len());
            for b in blocks {
                let deg: i64 = b.iter().map(|&i| parts[i]).sum();
                let slope = Rational::new(deg, b.len() as i64);
                filtration.extend(std::iter::repeat_n(slope, b.len()));
            }
            prop_assert!(
                majorizes(hn.entries(), &filtration).unwrap(),
                "{parts:?} with blocks {blocks:?}"
            );
        }
        Ok(())
    }))
}

pub fn mediant_inequality(cases: u32) -> Outcome {
    let triple = (-100i64..=100, -100i64..=100, 1i64..=30);
    finish(runner(cases).run(&prop::collection::vec(triple, 1..=8), |pairs| {
        prop_assert!(mediant_check(&pairs).unwrap());
        Ok(())
    }))
}

/// Feasible models: pick `b`, then `dQ, e` with `0 < 2dQ - e <= 2√Σb²` so the
/// discriminant is non-negative, then lift `a` until `Σab >= dQ - e/2`.
fn feasible_model() -> impl Strategy<Value = BlowupModel> {
    (prop::collection::vec(0i64..=5, 0..=4), 1i64..=5, -6i64..=6)
        .prop_flat_map(|(mut b, first, dq)| {
            b.insert(0, first);
            let norm: i64 = b.iter().map(|x| x * x).sum();
            let max_gap = (4 * norm).isqrt();
            let len = b.len();
            (
                Just(b),
                Just(dq),
                1..=max_gap,
                prop::collection::vec((0i64..=12, 1i64..=6), len),
            )
        })
        .prop_map(|(b, dq, gap, raw_a)| {
            let e = 2 * dq - gap;
            let norm: i64 = b.iter().map(|x| x * x).sum();
            let f = norm - dq * dq + dq * e;
            let mut a: Vec<Rational> = raw_a.iter().map(|&(n, d)| Rational::new(n, d)).collect();
            let pairing: Rational = a.iter().zip(&b).map(|(x, &y)| x * y).sum();
            let need = Rational::new(gap, 2);
            if pairing < need {
                let j = (0..b.len()).max_by_key(|&i| b[i]).expect("non-empty");
                a[j] += (need - pairing) / b[j];
            }
            BlowupModel { a, b, dq, e, f }
        })
}

pub fn blowup_models(cases: u32) -> Outcome {
    finish(runner(cases).run(&feasible_model(), |m| {
        prop_assert_eq!(blowup_model_check(&m), Ok(true), "{:?}", m);
        Ok(())
    }))
}

type K = F101;

fn bundles() -> Vec<SheafPresentation<K>> {
    let v = |i: usize| HomForm::<K>::var(3, i);
    vec![
        euler_tangent(),
        schwarzenberger(4, 0).unwrap(),
        schwarzenberger(5, 1).unwrap(),
        conic_example_bundle(1).unwrap(),
        conic_example_bundle(2).unwrap(),
        kernel_of_forms(vec![v(0), v(1), v(2).pow(2)], vec![-1, -1, -2], 0).unwrap(),
        euler_tangent::<K>().direct_sum(&euler_tangent()).unwrap(),
    ]
}

fn field_elems(n: usize) -> impl Strategy<Value = Vec<K>> {
    prop::collection::vec(0u64..101, n).prop_map(|v| v.into_iter().map(K::from_u64).collect())
}

fn curve(d: u32, coeffs: &[K]) -> Option<RationalCurveMap<K>> {
    let n = d as usize + 1;
    let forms = [0, 1, 2].map(|i| HomForm::from_coeffs(2, d, coeffs[i * n..(i + 1) * n].to_vec()).unwrap());
    RationalCurveMap::new(forms).ok()
}

fn curve_case() -> impl Strategy<Value = (usize, u32, Vec<K>)> {
    (0..bundles().len(), 1u32..=3).prop_flat_map(|(b, d)| (Just(b), Just(d), field_elems(3 * (d as usize + 1))))
}

fn split_or_skip(pres: &SheafPresentation<K>, s: &RationalCurveMap<K>) -> Result<Option<SplittingType>, String> {
    match splitting_type(&pullback(pres, s).map_err(|e| e.to_string())?) {
        Ok(t) => Ok(Some(t)),
        Err(Error::NotCertified) => Ok(None),
        Err(e) => Err(e.to_string()),
    }
}

pub fn twist_equivariance(cases: u32) -> Outcome {
    let all = bundles();
    finish(runner(cases).run(&(curve_case(), -3i64..=3), |((b, d, c), k)| {
        let Some(s) = curve(d, &c) else { return Ok(()) };
        let base = split_or_skip(&all[b], &s).map_err(TestCaseError::fail)?;
        let twisted = split_or_skip(&all[b].twist(k), &s).map_err(TestCaseError::fail)?;
        prop_assert_eq!(twisted, base.map(|t| t.shifted(k * d as i64)));
        Ok(())
    }))
}

fn invert(m: &Matrix<K>) -> Option<Matrix<K>> {
    let n = m.rows();
    let mut aug = Matrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            m[(i, j)]
        } else if j - n == i {
            K::from_u64(1)
        } else {
            K::from_u64(0)
        }
    });
    let pivots = aug.rref_in_place();
    (pivots == (0..n).collect::<Vec<_>>()).then(|| Matrix::from_fn(n, n, |i, j| aug[(i, j + n)]))
}

/// Changing coordinates on P2 by `g` and moving the curve by `g⁻¹`, or
/// reparametrizing P1, leaves the splitting unchanged.
pub fn coordinate_invariance(cases: u32) -> Outcome {
    let all = bundles();
    finish(runner(cases).run(&(curve_case(), field_elems(9), field_elems(4)), |((b, d, c), g, h)| {
        let Some(s) = curve(d, &c) else { return Ok(()) };
        let base = split_or_skip(&all[b], &s).map_err(TestCaseError::fail)?;
        let gm = Matrix::from_fn(3, 3, |i, j| g[3 * i + j]);
        if let Some(ginv) = invert(&gm) {
            let lin: [HomForm<K>; 3] = std::array::from_fn(|i| HomForm::from_coeffs(3, 1, gm.row(i).to_vec()).unwrap());
            let moved = all[b].change_coordinates(&lin).unwrap();
            let s2 = s.transform(&ginv).unwrap();
            prop_assert_eq!(&split_or_skip(&moved, &s2).map_err(TestCaseError::fail)?, &base);
        }
        let det = h[0] * h[3] - h[1] * h[2];
        if det != K::from_u64(0) {
            let s3 = s.reparametrize([h[0], h[1], h[2], h[3]]).unwrap();
            prop_assert_eq!(&split_or_skip(&all[b], &s3).map_err(TestCaseError::fail)?, &base);
        }
        Ok(())
    }))
}

/// `Σ max(eᵢ + m + 1, 0)` equals the directly computed `h⁰` across and
/// beyond the scan window.
pub fn h0_window(cases: u32) -> Outcome {
    let all = bundles();
    finish(runner(cases).run(&curve_case(), |(b, d, c)| {
        let Some(s) = curve(d, &c) else { return Ok(()) };
        let p1 = pullback(&all[b], &s).unwrap();
        let Some(e) = split_or_skip(&all[b], &s).map_err(TestCaseError::fail)? else { return Ok(()) };
        let (hi, lo) = (e.parts()[0], *e.parts().last().unwrap());
        for m in (-hi - 2)..=(-lo + 1) {
            prop_assert_eq!(p1.h0(m), e.h0(m), "m = {}", m);
        }
        Ok(())
    }))
}

fn linear_matrix(rows: usize, cols: usize, coeffs: &[K]) -> FormMatrix<K> {
    let entries = (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| HomForm::from_coeffs(3, 1, coeffs[3 * (i * cols + j)..3 * (i * cols + j) + 3].to_vec()).unwrap())
                .collect()
        })
        .collect();
    FormMatrix::from_rows(3, entries).unwrap()
}

/// Adjugate syzygies: `N·v = 0`, `det A` is an `r`-minor of `N`, entries have
/// degree `r·δ`, and the divisor degree matches `(d - r)·deg det A`.
pub fn adjugate_certificates(cases: u32) -> Outcome {
    let shape = (1usize..=3, 0usize..=3).prop_flat_map(|(r, extra)| {
        let d = r + extra;
        (Just(r), Just(d), field_elems(3 * r * d))
    });
    finish(runner(cases).run(&shape, |(r, d, c)| {
        let n = linear_matrix(r, d, &c);
        let rows: Vec<usize> = (0..r).collect();
        let cert = match adjugate_kernel(&n, r, &rows) {
            Ok(c) => c,
            Err(Error::SingularSelection) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(cert.verify(&n));
        prop_assert_eq!(cert.kernel_vectors.len(), d - r);
        let fit = fitting_generators(&n, r, 0).unwrap();
        prop_assert!(fit.contains_up_to_scalar(&cert.det_a));
        let delta = 1u32;
        for v in &cert.kernel_vectors {
            for e in v {
                prop_assert!(e.is_zero() || e.degree() == r as u32 * delta);
            }
        }
        if d > r {
            let l = 0;
            let c1q = delta as i64 + r as i64 * l;
            let expected = fit_divisor_degree(d as i64, r as i64, c1q, l).unwrap();
            prop_assert_eq!(expected, cert.det_a.degree() as i64 * (d - r) as i64);
            let b = cert.kernel_matrix(d);
            for m in b.minors(d - r) {
                prop_assert!(m.det.is_zero() || m.det.degree() as i64 == expected);
            }
        }
        Ok(())
    }))
}

pub fn laplace_containment(cases: u32) -> Outcome {
    let shape = (2usize..=3, 2usize..=4).prop_flat_map(|(r, c)| (Just(r), Just(c), field_elems(3 * r * c)));
    finish(runner(cases).run(&shape, |(r, c, coeffs)| {
        let m = linear_matrix(r, c, &coeffs);
        for k in 1..r.min(c) {
            for w in laplace_witnesses(&m, k).unwrap() {
                prop_assert!(w.verify(&m));
            }
        }
        Ok(())
    }))
}

/// `(name, suite)` for every suite above.
#[allow(dead_code)]
pub fn all_suites() -> Vec<(&'static str, Suite)> {
    vec![
        ("HN panel majorizes sub-sum filtrations", hn_majorizes_subsum_filtrations),
        ("mediant inequality", mediant_inequality),
        ("feasible blowup models", blowup_models),
        ("splitting twist equivariance", twist_equivariance),
        ("splitting coordinate invariance", coordinate_invariance),
        ("h0 window self-consistency", h0_window),
        ("adjugate certificates", adjugate_certificates),
        ("Laplace containment witnesses", laplace_containment),
    ]
}
