//! Closed-form codimension and relative-canonical bounds for curve families
//! on P2, plus an exact checker for the blowup arithmetic behind them.

use num_integer::Roots;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::Rational;

/// A real number that is exact when it happens to be rational.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Real {
    #[serde(serialize_with = "crate::serde_util::opt_rational")]
    pub exact: Option<Rational>,
    pub approx: f64,
}

impl Real {
    pub fn rational(r: Rational) -> Self {
        Real {
            exact: Some(r),
            approx: to_f64(r),
        }
    }

    fn scale(self, c: Rational) -> Self {
        Real {
            exact: self.exact.map(|x| x * c),
            approx: self.approx * to_f64(c),
        }
    }

    fn offset(self, c: Rational) -> Self {
        Real {
            exact: self.exact.map(|x| x + c),
            approx: self.approx + to_f64(c),
        }
    }

    fn min(self, other: Self) -> Self {
        match (self.exact, other.exact) {
            (Some(a), Some(b)) => Real::rational(a.min(b)),
            _ if self.approx <= other.approx => self,
            _ => other,
        }
    }
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `√radicand` with the radicand kept exact.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SqrtValue {
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub radicand: Rational,
    #[serde(flatten)]
    pub value: Real,
}

impl SqrtValue {
    fn new(radicand: Rational) -> Self {
        let exact = exact_sqrt(radicand);
        SqrtValue {
            radicand,
            value: Real {
                exact,
                approx: exact.map_or_else(|| to_f64(radicand).sqrt(), to_f64),
            },
        }
    }
}

/// Square root of a non-negative rational when it is rational.
pub fn exact_sqrt(r: Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let (n, d) = (*r.numer(), *r.denom());
    let (sn, sd) = (n.sqrt(), d.sqrt());
    (sn * sn == n && sd * sd == d).then(|| Rational::new(sn, sd))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RelCanonicalBound {
    #[serde(flatten)]
    pub bound: SqrtValue,
    /// `√(1 - Δ / (4(dQ - e/2)² + Δ))` evaluated in floating point.
    pub first_form: f64,
}

fn narrow(v: i128) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::InvalidInput("inputs too large".into()))
}

fn check_chern(e: i64, f: i64) -> Result<i128> {
    let delta = 4 * f as i128 - (e as i128) * (e as i128);
    if delta < 0 {
        return Err(Error::InvalidInput(format!(
            "discriminant 4f - e² = {delta} is negative"
        )));
    }
    Ok(delta)
}

/// Lower bound `(dQ - e/2) / √(dQ² - dQ·e + f)` for the relative canonical
/// degree, where `dQ` is the degree of a destabilizing quotient.
pub fn p2_relcanonical_bound(dq: i64, e: i64, f: i64) -> Result<RelCanonicalBound> {
    let delta = check_chern(e, f)?;
    let (dq, e, f) = (dq as i128, e as i128, f as i128);
    let gap = 2 * dq - e;
    if gap <= 0 {
        return Err(Error::InvalidInput(format!(
            "dQ = {dq} does not exceed e/2 = {e}/2"
        )));
    }
    let den = 4 * (dq * dq - dq * e + f);
    let radicand = Rational::new(narrow(gap * gap)?, narrow(den)?);
    let g = gap as f64;
    let first_form = (1.0 - delta as f64 / (g * g + delta as f64)).sqrt();
    Ok(RelCanonicalBound {
        bound: SqrtValue::new(radicand),
        first_form,
    })
}

/// Infimum of [`p2_relcanonical_bound`] over integers `dQ > e/2`, attained at
/// the smallest one.
pub fn zeta_prime(e: i64, f: i64) -> Result<SqrtValue> {
    check_chern(e, f)?;
    Ok(p2_relcanonical_bound(e.div_euclid(2) + 1, e, f)?.bound)
}

fn check_mu(mu: Rational) -> Result<()> {
    if mu.is_negative() {
        return Err(Error::InvalidInput("μ must be non-negative".into()));
    }
    Ok(())
}

/// `max(2μ - 1, 0)`.
pub fn expected_codim_rank2(mu: Rational) -> Result<Rational> {
    check_mu(mu)?;
    Ok((mu * 2 - 1).max(Rational::zero()))
}

/// `2(k - 1)μ / ((rank - 1)k) - 1`.
pub fn gm_codim_bound(mu: Rational, rank: i64, k: i64) -> Result<Rational> {
    if k < 2 {
        return Err(Error::InvalidInput("k must be at least 2".into()));
    }
    if rank < 2 {
        return Err(Error::InvalidInput("rank must be at least 2".into()));
    }
    Ok(mu * Rational::new(2 * (k - 1), (rank - 1) * k) - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TangentGaps {
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub weak: Rational,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub strong: Rational,
}

pub fn tangentgaps_bound(mu: Rational, rank: i64, g: i64, dim_x: i64) -> Result<TangentGaps> {
    check_mu(mu)?;
    if rank < 2 {
        return Err(Error::InvalidInput("rank must be at least 2".into()));
    }
    if g < 0 || dim_x < 1 {
        return Err(Error::InvalidInput("need g >= 0 and dim X >= 1".into()));
    }
    let gamma = g * (dim_x - 1) + 1;
    let r1 = rank - 1;
    let weak = mu / Rational::from_integer((gamma + 1) * r1) - gamma;
    let strong = mu * Rational::new(2, (2 * gamma + 1) * r1)
        - Rational::new(2 * gamma * gamma + gamma - 1, 2 * gamma + 1);
    Ok(TangentGaps { weak, strong })
}

/// `(K + (dim X - 3)(1 - g), K + dim X + 2g - 3)` with `K = -K_X · C`.
pub fn moduli_dim_bounds(kdeg: i64, g: i64, dim_x: i64) -> (i64, i64) {
    (kdeg + (dim_x - 3) * (1 - g), kdeg + dim_x + 2 * g - 3)
}

#[derive(Clone, Debug, PartialEq)]
pub enum GoodBoundsCase {
    /// Family of `k`-free curves with defect `μ`.
    Free { k: i64, mu: Rational },
    /// Destabilized on a blowup; uses the Chern-only constant.
    Blowup { e: i64, f: i64, d: i64 },
    /// Factoring through a generically finite map.
    Finite { d: i64, g: i64 },
}

pub fn goodbounds_verdict(case: &GoodBoundsCase) -> Result<Real> {
    match *case {
        GoodBoundsCase::Free { k, mu } => {
            if k < 2 {
                return Err(Error::InvalidInput("k must be at least 2".into()));
            }
            Ok(Real::rational(mu * Rational::new(2 * (k - 1), k) - 1))
        }
        GoodBoundsCase::Blowup { e, f, d } => {
            Ok(zeta_prime(e, f)?.value.scale(Rational::from_integer(d)))
        }
        GoodBoundsCase::Finite { d, g } => Ok(Real::rational(Rational::from_integer(d - g))),
    }
}

/// `min(2μ/(2g + 3) - (g + 1), dζ - g)`.
pub fn remark78_bound(mu: Rational, g: i64, d: i64, zeta: Real) -> Result<Real> {
    if g < 0 {
        return Err(Error::InvalidInput("g must be non-negative".into()));
    }
    let first = Real::rational(mu * Rational::new(2, 2 * g + 3) - (g + 1));
    let second = zeta
        .scale(Rational::from_integer(d))
        .offset(Rational::from_integer(-g));
    Ok(first.min(second))
}

/// `a · dim M + max(g - 1, 0)`.
pub fn disconnected_dim_bound(a_value: Rational, dim_m: i64, g: i64) -> Result<Rational> {
    if g < 0 {
        return Err(Error::InvalidInput("g must be non-negative".into()));
    }
    Ok(a_value * dim_m + (g - 1).max(0))
}

/// `(2/3) dim M + g`.
pub fn genfinite_dim_bound(dim_m: i64, g: i64) -> Result<Rational> {
    if g < 0 {
        return Err(Error::InvalidInput("g must be non-negative".into()));
    }
    Ok(Rational::new(2 * dim_m, 3) + g)
}

/// Blowup data `α' = φ*H - Σ aᵢEᵢ` and `c1(Q') = φ*c1(Q) - Σ bᵢEᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlowupModel {
    pub a: Vec<Rational>,
    pub b: Vec<i64>,
    pub dq: i64,
    pub e: i64,
    pub f: i64,
}

impl BlowupModel {
    pub fn validate(&self) -> Result<()> {
        if self.a.len() != self.b.len() {
            return Err(Error::LengthMismatch(self.a.len(), self.b.len()));
        }
        if self.a.iter().any(Signed::is_negative) || self.b.iter().any(|&b| b < 0) {
            return Err(Error::InvalidInput("multiplicities must be non-negative".into()));
        }
        check_chern(self.e, self.f)?;
        if 2 * self.dq <= self.e {
            return Err(Error::InvalidInput("quotient does not destabilize".into()));
        }
        let sq: i64 = self.b.iter().map(|b| b * b).sum();
        if sq != self.c2_quotient() {
            return Err(Error::InvalidInput(format!(
                "Σb² = {sq} but dQ² - dQ·e + f = {}",
                self.c2_quotient()
            )));
        }
        if self.pairing() < self.slope_gap() {
            return Err(Error::InvalidInput("Σaᵢbᵢ is below dQ - e/2".into()));
        }
        Ok(())
    }

    fn c2_quotient(&self) -> i64 {
        self.dq * self.dq - self.dq * self.e + self.f
    }

    fn slope_gap(&self) -> Rational {
        Rational::from_integer(self.dq) - Rational::new(self.e, 2)
    }

    fn pairing(&self) -> Rational {
        self.a.iter().zip(&self.b).map(|(a, &b)| a * b).sum()
    }
}

/// Exact check of `Σaᵢ >= (dQ - e/2) / √(dQ² - dQ·e + f)`, done by squaring.
pub fn blowup_model_check(model: &BlowupModel) -> Result<bool> {
    model.validate()?;
    let sum: Rational = model.a.iter().copied().sum();
    let gap = model.slope_gap();
    Ok(sum * sum * model.c2_quotient() >= gap * gap)
}

/// Optional inputs for [`all_bounds`]; each calculator runs when its fields
/// are present.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BoundInputs {
    pub dq: Option<i64>,
    pub e: Option<i64>,
    pub f: Option<i64>,
    #[serde(serialize_with = "crate::serde_util::opt_rational")]
    pub mu: Option<Rational>,
    pub g: Option<i64>,
    pub k: Option<i64>,
    pub rank: Option<i64>,
    pub dim_x: Option<i64>,
    pub d: Option<i64>,
    #[serde(serialize_with = "crate::serde_util::opt_rational")]
    pub a_value: Option<Rational>,
    pub dim_m: Option<i64>,
    pub kdeg: Option<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundError {
    pub bound: &'static str,
    pub message: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct BoundsReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p2_relcanonical: Option<RelCanonicalBound>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta_prime: Option<SqrtValue>,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "crate::serde_util::opt_rational"
    )]
    pub expected_codim_rank2: Option<Rational>,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "crate::serde_util::opt_rational"
    )]
    pub gm_codim: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tangentgaps: Option<TangentGaps>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moduli_dim: Option<(i64, i64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub goodbounds_free: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub goodbounds_blowup: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub goodbounds_finite: Option<Real>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub remark78: Option<Real>,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "crate::serde_util::opt_rational"
    )]
    pub disconnected_dim: Option<Rational>,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "crate::serde_util::opt_rational"
    )]
    pub genfinite_dim: Option<Rational>,
    pub errors: Vec<BoundError>,
}

fn record<T>(errors: &mut Vec<BoundError>, bound: &'static str, r: Result<T>) -> Option<T> {
    r.map_err(|e| {
        errors.push(BoundError {
            bound,
            message: e.to_string(),
        })
    })
    .ok()
}

/// Every bound whose inputs are available. `kdeg` defaults to `3d`, the
/// anticanonical degree of a degree `d` curve in P2.
pub fn all_bounds(inp: &BoundInputs) -> BoundsReport {
    let mut r = BoundsReport::default();
    let errs = &mut r.errors;
    if let (Some(dq), Some(e), Some(f)) = (inp.dq, inp.e, inp.f) {
        r.p2_relcanonical = record(errs, "p2_relcanonical", p2_relcanonical_bound(dq, e, f));
    }
    if let (Some(e), Some(f)) = (inp.e, inp.f) {
        r.zeta_prime = record(errs, "zeta_prime", zeta_prime(e, f));
    }
    if let Some(mu) = inp.mu {
        r.expected_codim_rank2 = record(errs, "expected_codim_rank2", expected_codim_rank2(mu));
        if let (Some(rank), Some(k)) = (inp.rank, inp.k) {
            r.gm_codim = record(errs, "gm_codim", gm_codim_bound(mu, rank, k));
        }
        if let (Some(rank), Some(g), Some(dim_x)) = (inp.rank, inp.g, inp.dim_x) {
            r.tangentgaps = record(errs, "tangentgaps", tangentgaps_bound(mu, rank, g, dim_x));
        }
        if let Some(k) = inp.k {
            r.goodbounds_free = record(
                errs,
                "goodbounds_free",
                goodbounds_verdict(&GoodBoundsCase::Free { k, mu }),
            );
        }
    }
    let kdeg = inp.kdeg.or(inp.d.map(|d| 3 * d));
    if let (Some(kdeg), Some(g), Some(dim_x)) = (kdeg, inp.g, inp.dim_x) {
        r.moduli_dim = Some(moduli_dim_bounds(kdeg, g, dim_x));
    }
    if let (Some(e), Some(f), Some(d)) = (inp.e, inp.f, inp.d) {
        r.goodbounds_blowup = record(
            errs,
            "goodbounds_blowup",
            goodbounds_verdict(&GoodBoundsCase::Blowup { e, f, d }),
        );
    }
    if let (Some(d), Some(g)) = (inp.d, inp.g) {
        r.goodbounds_finite = record(
            errs,
            "goodbounds_finite",
            goodbounds_verdict(&GoodBoundsCase::Finite { d, g }),
        );
    }
    if let (Some(mu), Some(g), Some(d), Some(z)) = (inp.mu, inp.g, inp.d, r.zeta_prime) {
        r.remark78 = record(errs, "remark78", remark78_bound(mu, g, d, z.value));
    }
    if let (Some(a), Some(dim_m), Some(g)) = (inp.a_value, inp.dim_m, inp.g) {
        r.disconnected_dim = record(errs, "disconnected_dim", disconnected_dim_bound(a, dim_m, g));
    }
    if let (Some(dim_m), Some(g)) = (inp.dim_m, inp.g) {
        r.genfinite_dim = record(errs, "genfinite_dim", genfinite_dim_bound(dim_m, g));
    }
    r
}
