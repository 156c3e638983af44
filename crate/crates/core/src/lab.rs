//! Experiments over finite fields: random curves, all lines, and the conic
//! example, with codimension estimates from hit frequencies.

use std::collections::BTreeMap;
use std::path::Path;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::error::Error;
use crate::field::{is_prime, FiniteField};
use crate::matrix::Matrix;
use crate::poly::{hom_gcd, HomForm};
use crate::restrict::{JumpContext, RationalCurveMap, SplittingType};
use crate::sheaf::{conic_example_bundle, direct_sum, euler_tangent, line_bundle, schwarzenberger, SheafPresentation};
use crate::Rational;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("degenerate setup: {uncertified} of {total} curves failed certification")]
    Degenerate { uncertified: u64, total: u64 },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::InvalidConfig(_) => 2,
            LabError::Degenerate { .. } => 3,
            LabError::Invariant(_) => 4,
        }
    }
}

impl From<Error> for LabError {
    fn from(e: Error) -> Self {
        LabError::InvalidConfig(e.to_string())
    }
}

pub type LabResult<T> = std::result::Result<T, LabError>;

/// Field orders accepted at run time; each one is a separate `Fp<P>`.
pub const SUPPORTED_PRIMES: &[u32] = &[
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 251, 1009, 10007, 32003,
];

/// Run `$body` with `$F` bound to the prime field of order `$q`.
#[macro_export]
macro_rules! with_prime_field {
    ($q:expr, $F:ident => $body:expr) => {
        $crate::with_prime_field!(@arms $q, $F, $body;
            3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83,
            89, 97, 101, 103, 107, 109, 113, 127, 251, 1009, 10007, 32003)
    };
    (@arms $q:expr, $F:ident, $body:expr; $($p:literal),*) => {
        match $q {
            $($p => {
                type $F = $crate::Fp<$p>;
                Ok($body)
            })*
            other => Err($crate::lab::unsupported_field(other)),
        }
    };
}

pub fn unsupported_field(q: u32) -> LabError {
    if q > 2 && is_prime(q as u64) {
        LabError::InvalidConfig(format!(
            "field order {q} is prime but not compiled in; use one of {SUPPORTED_PRIMES:?}"
        ))
    } else {
        LabError::InvalidConfig(format!("field order {q} is not an odd prime"))
    }
}

/// Names accepted by [`load_bundle`]: `tangent`, `trivial`, `conic:D`,
/// `schwarzenberger:P,Q`, `sum:A,B,...`, `line:K`; anything else is read
/// as a presentation file.
pub fn load_bundle<F: FiniteField>(spec: &str) -> LabResult<SheafPresentation<F>> {
    let ints = |s: &str| -> LabResult<Vec<i64>> {
        s.split(',')
            .map(|w| {
                w.trim()
                    .parse()
                    .map_err(|_| LabError::InvalidConfig(format!("bad integer `{w}` in `{spec}`")))
            })
            .collect()
    };
    let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
    let pres = match name {
        "tangent" => euler_tangent(),
        "trivial" => direct_sum(&[0, 0]),
        "conic" => {
            let d = ints(args)?;
            conic_example_bundle(*d.first().unwrap_or(&0) as u32)?
        }
        "schwarzenberger" => match ints(args)?[..] {
            [p, q] => schwarzenberger(p, q)?,
            _ => return Err(LabError::InvalidConfig("schwarzenberger:P,Q".into())),
        },
        "sum" => direct_sum(&ints(args)?),
        "line" => match ints(args)?[..] {
            [k] => line_bundle(k),
            _ => return Err(LabError::InvalidConfig("line:K".into())),
        },
        _ => {
            let path = Path::new(spec);
            let text = std::fs::read_to_string(path)
                .map_err(|e| LabError::InvalidConfig(format!("cannot read bundle `{spec}`: {e}")))?;
            SheafPresentation::from_text(&text)?
        }
    };
    pres.check_generic_rank()?;
    Ok(pres)
}

/// The field must be large compared with the degrees in the presentation.
pub fn check_field_size<F: FiniteField>(pres: &SheafPresentation<F>) -> LabResult<()> {
    let deg = pres.max_entry_degree();
    if (F::ORDER as u64) <= 2 * deg as u64 {
        return Err(LabError::InvalidConfig(format!(
            "field order {} must exceed twice the largest entry degree {deg}",
            F::ORDER
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub bundle: String,
    pub curve_degree: u32,
    pub field_order: u32,
    pub trials: u64,
    pub seed: u64,
    #[serde(serialize_with = "serialize_rationals")]
    pub thresholds: Vec<Rational>,
}

fn serialize_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    v.iter().map(Rational::to_string).collect::<Vec<_>>().serialize(s)
}

impl ExperimentConfig {
    pub fn validate(&self) -> LabResult<()> {
        if self.field_order <= 2 || !is_prime(self.field_order as u64) {
            return Err(LabError::InvalidConfig(format!(
                "field order {} is not an odd prime",
                self.field_order
            )));
        }
        if self.trials == 0 {
            return Err(LabError::InvalidConfig("need at least one trial".into()));
        }
        if self.curve_degree == 0 {
            return Err(LabError::InvalidConfig("curve degree must be positive".into()));
        }
        Ok(())
    }
}

/// Trial `i` draws from stream `i` of the seeded generator, so results do
/// not depend on scheduling.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Worker pool honouring `LAB_THREADS`; the sampling functions run on
/// whichever pool they are called from.
pub fn thread_pool() -> LabResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("LAB_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| LabError::InvalidConfig(format!("LAB_THREADS=`{v}` is not a count")))?;
        b = b.num_threads(n);
    }
    b.build()
        .map_err(|e| LabError::InvalidConfig(format!("thread pool: {e}")))
}

#[derive(Clone, Debug, PartialEq)]
enum Outcome {
    BasePointed,
    Uncertified,
    Measured { mu: Option<Rational>, split: SplittingType },
}

fn run_trial<F: FiniteField>(ctx: &JumpContext<F>, d: u32, seed: u64, i: u64) -> LabResult<Outcome> {
    let mut rng = trial_rng(seed, i);
    let s = match RationalCurveMap::<F>::random(d, &mut rng) {
        Ok(s) => s,
        Err(Error::BasePointed | Error::Degenerate(_)) => return Ok(Outcome::BasePointed),
        Err(e) => return Err(LabError::Invariant(e.to_string())),
    };
    let report = match ctx.report(&s) {
        Ok(r) => r,
        Err(Error::NotCertified) => return Ok(Outcome::Uncertified),
        Err(e) => return Err(LabError::Invariant(format!("trial {i}: {e}"))),
    };
    if !report.sum_rule {
        return Err(LabError::Invariant(format!(
            "trial {i}: splitting {} violates the sum rule",
            report.splitting
        )));
    }
    if report.majorizes_expected == Some(false) {
        return Err(LabError::Invariant(format!(
            "trial {i}: splitting {} does not majorize the expected panel",
            report.splitting
        )));
    }
    Ok(Outcome::Measured {
        mu: report.mu,
        split: report.splitting,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuCount {
    #[serde(serialize_with = "crate::serde_util::opt_rational")]
    pub mu: Option<Rational>,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitCount {
    pub parts: SplittingType,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub threshold: Rational,
    pub hits: u64,
    pub freq: f64,
    /// `-ln(freq) / ln(q)`; absent when nothing was hit.
    pub chat: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JumpHistogram {
    pub histogram: Vec<MuCount>,
    pub splittings: Vec<SplitCount>,
    pub certified: u64,
    pub rejected: u64,
    pub base_pointed: u64,
    pub uncertified: u64,
    pub estimates: Vec<Estimate>,
}

impl JumpHistogram {
    pub fn total(&self) -> u64 {
        self.certified + self.rejected
    }

    pub fn count_of(&self, parts: &[i64]) -> u64 {
        self.splittings
            .iter()
            .find(|s| s.parts.parts() == parts)
            .map_or(0, |s| s.count)
    }
}

const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95%.
pub fn wilson_interval(hits: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = hits as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if hits == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if hits as f64 == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

fn codim(p: f64, q: u32) -> Option<f64> {
    (p > 0.0).then(|| -p.ln() / (q as f64).ln())
}

pub fn estimate(threshold: Rational, hits: u64, n: u64, q: u32) -> Estimate {
    let freq = if n == 0 { 0.0 } else { hits as f64 / n as f64 };
    let (lo, hi) = wilson_interval(hits, n);
    Estimate {
        threshold,
        hits,
        freq,
        chat: codim(freq, q),
        // a larger frequency means a smaller codimension
        ci_lo: codim(hi, q),
        ci_hi: codim(lo, q),
    }
}

fn histogram_from(outcomes: &[Outcome], thresholds: &[Rational], q: u32) -> JumpHistogram {
    let mut mus: BTreeMap<Option<Rational>, u64> = BTreeMap::new();
    let mut splits: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
    let (mut base_pointed, mut uncertified, mut certified) = (0, 0, 0);
    for o in outcomes {
        match o {
            Outcome::BasePointed => base_pointed += 1,
            Outcome::Uncertified => uncertified += 1,
            Outcome::Measured { mu, split } => {
                certified += 1;
                *mus.entry(*mu).or_default() += 1;
                *splits.entry(split.parts().to_vec()).or_default() += 1;
            }
        }
    }
    let estimates = thresholds
        .iter()
        .map(|&t| {
            let hits = mus
                .iter()
                .filter(|(mu, _)| mu.is_some_and(|m| m >= t))
                .map(|(_, c)| c)
                .sum();
            estimate(t, hits, certified, q)
        })
        .collect();
    JumpHistogram {
        histogram: mus.into_iter().map(|(mu, count)| MuCount { mu, count }).collect(),
        // most frequent first, ties by splitting
        splittings: {
            let mut v: Vec<SplitCount> = splits
                .into_iter()
                .map(|(p, count)| SplitCount {
                    parts: SplittingType::new(p),
                    count,
                })
                .collect();
            v.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.parts.parts().cmp(b.parts.parts())));
            v
        },
        certified,
        rejected: base_pointed + uncertified,
        base_pointed,
        uncertified,
        estimates,
    }
}

/// Draw `trials` coefficient-uniform curves of degree `d` and tabulate the
/// defect of the restricted bundle.
pub fn sample_jump_distribution<F: FiniteField>(
    pres: &SheafPresentation<F>,
    cfg: &ExperimentConfig,
) -> LabResult<JumpHistogram> {
    cfg.validate()?;
    if cfg.field_order != F::ORDER {
        return Err(LabError::InvalidConfig(format!(
            "config asks for F_{} but the field is F_{}",
            cfg.field_order,
            F::ORDER
        )));
    }
    check_field_size(pres)?;
    let ctx = JumpContext::new(pres)?;
    let outcomes: Vec<Outcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(&ctx, cfg.curve_degree, cfg.seed, i))
        .collect::<LabResult<Vec<_>>>()?;
    let h = histogram_from(&outcomes, &cfg.thresholds, F::ORDER);
    if h.total() != cfg.trials {
        return Err(LabError::Invariant("histogram does not account for every trial".into()));
    }
    if 2 * h.uncertified > cfg.trials {
        return Err(LabError::Degenerate {
            uncertified: h.uncertified,
            total: cfg.trials,
        });
    }
    Ok(h)
}

/// All points of P2(F_q), normalized so the last nonzero coordinate is 1.
pub fn projective_points<F: FiniteField>() -> Vec<[F; 3]> {
    let mut out = Vec::new();
    for a in F::elements() {
        for b in F::elements() {
            out.push([a, b, F::one()]);
        }
    }
    for a in F::elements() {
        out.push([a, F::one(), F::zero()]);
    }
    out.push([F::one(), F::zero(), F::zero()]);
    out
}

/// The line `a x + b y + c z = 0`, parametrized by a basis of its points.
pub fn line_from_dual<F: FiniteField>(abc: &[F; 3]) -> LabResult<RationalCurveMap<F>> {
    let k = Matrix::from_rows(vec![abc.to_vec()]).kernel_basis();
    if k.cols() != 2 {
        return Err(LabError::InvalidConfig("zero vector is not a line".into()));
    }
    let p = [k[(0, 0)], k[(1, 0)], k[(2, 0)]];
    let q = [k[(0, 1)], k[(1, 1)], k[(2, 1)]];
    Ok(RationalCurveMap::line_through(&p, &q)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineRow {
    /// Coefficients `[a, b, c]` of the line `a x + b y + c z = 0`.
    pub line: [u32; 3],
    pub splitting: Option<SplittingType>,
    #[serde(serialize_with = "crate::serde_util::opt_rational")]
    pub mu: Option<Rational>,
    pub certified: bool,
    pub jumping: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConicCheck {
    /// Conic in the dual plane through the jumping lines.
    pub dual_conic: String,
    /// The conic those lines are tangent to.
    pub conic: String,
    pub smooth: bool,
    /// Every jumping line meets the conic in a double point.
    pub all_tangent: bool,
    /// Number of `F_q`-lines tangent to the conic.
    pub tangent_lines: usize,
    /// The tangent lines are exactly the jumping lines.
    pub matches_jumping: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinesReport {
    pub field_order: u32,
    pub lines: Vec<LineRow>,
    #[serde(serialize_with = "crate::serde_util::opt_rational")]
    pub generic_mu: Option<Rational>,
    pub jumping: usize,
    pub uncertified: usize,
    pub conic: Option<ConicCheck>,
}

impl LinesReport {
    pub fn jumping_lines(&self) -> impl Iterator<Item = &LineRow> {
        self.lines.iter().filter(|r| r.jumping)
    }
}

/// Splitting on every `F_q`-line. Lines whose μ exceeds the smallest
/// observed value are jumping lines; when there are at least five, the
/// check that they are the tangents of one smooth conic is attached.
pub fn enumerate_lines<F: FiniteField>(pres: &SheafPresentation<F>) -> LabResult<LinesReport> {
    check_field_size(pres)?;
    let ctx = JumpContext::new(pres)?;
    let duals = projective_points::<F>();
    let mut rows = Vec::with_capacity(duals.len());
    for abc in &duals {
        let s = line_from_dual(abc)?;
        let line = [abc[0].to_u32(), abc[1].to_u32(), abc[2].to_u32()];
        match ctx.report(&s) {
            Ok(r) => rows.push(LineRow {
                line,
                splitting: Some(r.splitting),
                mu: r.mu,
                certified: true,
                jumping: false,
            }),
            Err(Error::NotCertified) => rows.push(LineRow {
                line,
                splitting: None,
                mu: None,
                certified: false,
                jumping: false,
            }),
            Err(e) => return Err(LabError::Invariant(e.to_string())),
        }
    }
    let generic_mu = rows.iter().filter_map(|r| r.mu).min();
    let generic_split = {
        let mut counts: BTreeMap<&SplittingType, usize> = BTreeMap::new();
        for r in &rows {
            if let Some(s) = &r.splitting {
                *counts.entry(s).or_default() += 1;
            }
        }
        counts.into_iter().max_by_key(|(_, c)| *c).map(|(s, _)| s.clone())
    };
    for r in rows.iter_mut() {
        r.jumping = match (r.mu, generic_mu) {
            (Some(m), Some(g)) => m > g,
            // without an expected panel, compare with the commonest splitting
            _ => r.splitting.is_some() && r.splitting != generic_split,
        };
    }
    let jumping: Vec<[F; 3]> = rows
        .iter()
        .zip(&duals)
        .filter(|(r, _)| r.jumping)
        .map(|(_, d)| *d)
        .collect();
    let conic = if jumping.len() >= 5 {
        Some(conic_check(&jumping, &duals))
    } else {
        None
    };
    Ok(LinesReport {
        field_order: F::ORDER,
        jumping: jumping.len(),
        uncertified: rows.iter().filter(|r| !r.certified).count(),
        lines: rows,
        generic_mu,
        conic,
    })
}

/// The symmetric matrix of a ternary quadratic form.
pub fn conic_matrix<F: FiniteField>(c: &HomForm<F>) -> Matrix<F> {
    let half = F::from_i64(2).inv().expect("odd characteristic");
    let sq = |i: usize| {
        let mut e = [0u32; 3];
        e[i] = 2;
        c.coefficient(&e)
    };
    let mixed = |i: usize, j: usize| {
        let mut e = [0u32; 3];
        e[i] = 1;
        e[j] = 1;
        c.coefficient(&e) * half
    };
    Matrix::from_fn(3, 3, |i, j| if i == j { sq(i) } else { mixed(i, j) })
}

fn conic_from_matrix<F: FiniteField>(m: &Matrix<F>) -> HomForm<F> {
    let mut terms = Vec::new();
    for i in 0..3 {
        for j in i..3 {
            let mut e = vec![0u32; 3];
            e[i] += 1;
            e[j] += 1;
            let c = if i == j { m[(i, i)] } else { m[(i, j)] + m[(j, i)] };
            terms.push((c, e));
        }
    }
    HomForm::from_terms(3, 2, &terms).expect("quadratic terms")
}

/// The conic through `points` when it is unique.
pub fn fit_conic<F: FiniteField>(points: &[[F; 3]]) -> Option<HomForm<F>> {
    let basis = crate::poly::hom_basis(3, 2);
    let m = Matrix::from_fn(points.len(), basis.len(), |i, j| {
        HomForm::monomial(&basis[j], F::one()).evaluate(&points[i])
    });
    let k = m.kernel_basis();
    (k.cols() == 1).then(|| HomForm::from_coeffs(3, 2, k.column(0)).expect("six coefficients"))
}

/// `b² - 4ac` of the conic restricted to the line.
pub fn restricted_discriminant<F: FiniteField>(conic: &HomForm<F>, line: &RationalCurveMap<F>) -> F {
    let r = conic.substitute(line.forms()).expect("binary linear forms");
    let c = r.coefficient_vector();
    c[1] * c[1] - F::from_i64(4) * c[0] * c[2]
}

fn conic_check<F: FiniteField>(jumping: &[[F; 3]], all_lines: &[[F; 3]]) -> ConicCheck {
    let Some(dual) = fit_conic(jumping) else {
        return ConicCheck {
            dual_conic: "none".into(),
            conic: "none".into(),
            smooth: false,
            all_tangent: false,
            tangent_lines: 0,
            matches_jumping: false,
        };
    };
    let on_dual = jumping.iter().all(|p| dual.evaluate(p).is_zero());
    let dm = conic_matrix(&dual);
    let smooth = !dm.det().is_zero();
    // the dual of a smooth conic with matrix A has matrix A⁻¹ ~ adj(A)
    let inv = if smooth { invert3(&dm) } else { dm.clone() };
    let conic = conic_from_matrix(&inv);
    let tangent_to = |abc: &[F; 3]| -> bool {
        line_from_dual(abc)
            .map(|l| restricted_discriminant(&conic, &l).is_zero())
            .unwrap_or(false)
    };
    let all_tangent = smooth && on_dual && jumping.iter().all(tangent_to);
    let tangents: Vec<&[F; 3]> = all_lines.iter().filter(|abc| tangent_to(abc)).collect();
    let matches_jumping =
        smooth && tangents.len() == jumping.len() && tangents.iter().all(|t| jumping.contains(t));
    ConicCheck {
        dual_conic: dual.to_string(),
        conic: conic.to_string(),
        smooth,
        all_tangent,
        tangent_lines: tangents.len(),
        matches_jumping,
    }
}

fn invert3<F: FiniteField>(m: &Matrix<F>) -> Matrix<F> {
    let mut aug = Matrix::from_fn(3, 6, |i, j| {
        if j < 3 {
            m[(i, j)]
        } else if j - 3 == i {
            F::one()
        } else {
            F::zero()
        }
    });
    aug.rref_in_place();
    Matrix::from_fn(3, 3, |i, j| aug[(i, j + 3)])
}

/// A random parametrized smooth conic; with `through_origin` it passes
/// through `[0:0:1]`, otherwise it avoids that point.
pub fn random_smooth_conic<F: FiniteField, R: Rng + ?Sized>(
    through_origin: bool,
    rng: &mut R,
) -> RationalCurveMap<F> {
    let rand_form = |deg: u32, rng: &mut R| {
        HomForm::from_coeffs(2, deg, (0..=deg).map(|_| F::random(rng)).collect()).expect("coefficients")
    };
    loop {
        let (f0, f1) = if through_origin {
            let l = rand_form(1, rng);
            (&l * &rand_form(1, rng), &l * &rand_form(1, rng))
        } else {
            (rand_form(2, rng), rand_form(2, rng))
        };
        let f2 = rand_form(2, rng);
        let coeffs = Matrix::from_rows(vec![
            f0.coefficient_vector().to_vec(),
            f1.coefficient_vector().to_vec(),
            f2.coefficient_vector().to_vec(),
        ]);
        if coeffs.rank() < 3 {
            continue;
        }
        let meets = hom_gcd(&f0, &f1).map(|g| g.degree() > 0).unwrap_or(true);
        if meets != through_origin {
            continue;
        }
        if let Ok(c) = RationalCurveMap::new([f0, f1, f2]) {
            return c;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConicSide {
    pub trials: u64,
    pub mean_mu: f64,
    pub splittings: Vec<SplitCount>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConicExampleReport {
    pub d: u32,
    pub field_order: u32,
    pub general: ConicSide,
    pub through_point: ConicSide,
    /// Mean μ through the point minus mean μ on general conics.
    pub gap: f64,
}

fn conic_side<F: FiniteField>(
    ctx: &JumpContext<F>,
    through: bool,
    trials: u64,
    seed: u64,
) -> LabResult<ConicSide> {
    let stream_base = if through { 1u64 << 40 } else { 0 };
    let results: Vec<(Rational, SplittingType)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, stream_base + i);
            let s = random_smooth_conic::<F, _>(through, &mut rng);
            let r = ctx
                .report(&s)
                .map_err(|e| LabError::Invariant(format!("conic trial {i}: {e}")))?;
            let mu = r
                .mu
                .ok_or_else(|| LabError::Invariant("no expected panel".into()))?;
            Ok((mu, r.splitting))
        })
        .collect::<LabResult<Vec<_>>>()?;
    let sum: Rational = results.iter().map(|(m, _)| *m).sum();
    let mut splits: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
    for (_, s) in &results {
        *splits.entry(s.parts().to_vec()).or_default() += 1;
    }
    Ok(ConicSide {
        trials,
        mean_mu: crate::bounds::to_f64(sum) / trials.max(1) as f64,
        splittings: splits
            .into_iter()
            .map(|(p, count)| SplitCount {
                parts: SplittingType::new(p),
                count,
            })
            .collect(),
    })
}

/// Restrict the kernel of `(x^d, y^d, z^{2d-1})` to random smooth conics
/// with and without the point `[0:0:1]`.
pub fn verify_conic_example<F: FiniteField>(d: u32, trials: u64, seed: u64) -> LabResult<ConicExampleReport> {
    if trials == 0 {
        return Err(LabError::InvalidConfig("need at least one trial".into()));
    }
    let pres = conic_example_bundle::<F>(d)?;
    check_field_size(&pres)?;
    let ctx = JumpContext::new(&pres)?;
    let general = conic_side(&ctx, false, trials, seed ^ d as u64)?;
    let through_point = conic_side(&ctx, true, trials, seed ^ d as u64)?;
    Ok(ConicExampleReport {
        d,
        field_order: F::ORDER,
        gap: through_point.mean_mu - general.mean_mu,
        general,
        through_point,
    })
}

/// Fraction of certified samples with the most balanced splitting.
pub fn balanced_fraction(h: &JumpHistogram, rank: usize, degree: i64) -> f64 {
    let b = SplittingType::balanced(rank, degree);
    if h.certified == 0 {
        return 0.0;
    }
    h.count_of(b.parts()) as f64 / h.certified as f64
}

/// `true` when every listed μ is zero.
pub fn all_mu_zero(h: &JumpHistogram) -> bool {
    h.histogram.iter().all(|c| c.mu.is_some_and(|m| m.is_zero()))
}

/// Flat CSV of a histogram: one row per μ value, then one per estimate.
pub fn histogram_csv(h: &JumpHistogram) -> String {
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
    let mut out = String::from("section,mu,count,threshold,hits,freq,chat,ci_lo,ci_hi\n");
    for c in &h.histogram {
        let mu = c.mu.map_or(String::new(), |m| m.to_string());
        out.push_str(&format!("histogram,{mu},{},,,,,,\n", c.count));
    }
    out.push_str(&format!("rejected,,{},,,,,,\n", h.rejected));
    for e in &h.estimates {
        out.push_str(&format!(
            "estimate,,,{},{},{},{},{},{}\n",
            e.threshold,
            e.hits,
            e.freq,
            opt(e.chat),
            opt(e.ci_lo),
            opt(e.ci_hi)
        ));
    }
    out
}
