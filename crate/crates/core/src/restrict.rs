//! Pullback of presentations along rational curves `P1 -> P2` and the
//! splitting type of the restricted bundle.

use std::fmt::{self, Write as _};

use rand::Rng;
use serde::Serialize;

use crate::bounds::{expected_codim_rank2, tangentgaps_bound, TangentGaps};
use crate::error::{parse_err, Error, Result};
use crate::field::{FiniteField, Field};
use crate::matrix::Matrix;
use crate::panel::{expected_panel, majorizes, panel_from_filtration, sup_distance, FiltrationData, SlopePanel};
use crate::poly::{hom_gcd_all, HomForm};
use crate::presentation::{Kind, Presentation};
use crate::sheaf::{chern, global_hn, SheafPresentation};
use crate::Rational;

/// A morphism `P1 -> P2`, `[s : t] ↦ [f0 : f1 : f2]`, with the `fᵢ` binary
/// forms of a common degree and no common zero.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalCurveMap<F: Field> {
    forms: [HomForm<F>; 3],
}

impl<F: Field> RationalCurveMap<F> {
    pub fn new(forms: [HomForm<F>; 3]) -> Result<Self> {
        let d = forms[0].degree();
        if d == 0 {
            return Err(Error::InvalidInput("curve degree must be positive".into()));
        }
        if forms.iter().any(|f| f.nvars() != 2 || f.degree() != d) {
            return Err(Error::DegreeMismatch(
                "a curve needs three binary forms of one degree".into(),
            ));
        }
        if forms.iter().all(HomForm::is_zero) {
            return Err(Error::BasePointed);
        }
        if hom_gcd_all(forms.iter())?.degree() > 0 {
            return Err(Error::BasePointed);
        }
        let coeffs = Matrix::from_rows(forms.iter().map(|f| f.coefficient_vector().to_vec()).collect());
        if coeffs.rank() < 2 {
            return Err(Error::Degenerate("the map is constant".into()));
        }
        Ok(RationalCurveMap { forms })
    }

    pub fn degree(&self) -> u32 {
        self.forms[0].degree()
    }

    pub fn forms(&self) -> &[HomForm<F>; 3] {
        &self.forms
    }

    /// The line through two distinct points, `[s : t] ↦ s·p + t·q`.
    pub fn line_through(p: &[F; 3], q: &[F; 3]) -> Result<Self> {
        let forms = std::array::from_fn(|i| {
            HomForm::from_coeffs(2, 1, vec![p[i].clone(), q[i].clone()]).expect("two coefficients")
        });
        Self::new(forms)
    }

    /// Precompose with the linear substitution `s ↦ a s + b t`, `t ↦ c s + d t`.
    pub fn reparametrize(&self, abcd: [F; 4]) -> Result<Self> {
        let [a, b, c, d] = abcd;
        let s = HomForm::from_coeffs(2, 1, vec![a, b])?;
        let t = HomForm::from_coeffs(2, 1, vec![c, d])?;
        let subs = [s, t];
        let forms = self
            .forms
            .iter()
            .map(|f| f.substitute(&subs))
            .collect::<Result<Vec<_>>>()?;
        Self::new(forms.try_into().expect("three forms"))
    }

    /// Postcompose with the linear map `P2 -> P2` given by the rows of `m`.
    pub fn transform(&self, m: &Matrix<F>) -> Result<Self> {
        if m.rows() != 3 || m.cols() != 3 {
            return Err(Error::InvalidInput("need a 3x3 matrix".into()));
        }
        let d = self.degree();
        let forms = std::array::from_fn(|i| {
            (0..3).fold(HomForm::zero(2, d), |acc, j| &acc + &self.forms[j].scale(&m[(i, j)]))
        });
        Self::new(forms)
    }

    pub fn evaluate(&self, s: &F, t: &F) -> [F; 3] {
        let pt = [s.clone(), t.clone()];
        std::array::from_fn(|i| self.forms[i].evaluate(&pt))
    }

    /// ```text
    /// curve
    /// degree 2
    /// x 1 0 0
    /// y 0 1 0
    /// z 0 0 1
    /// end
    /// ```
    /// Coefficients follow the basis `s^d, s^{d-1}t, …, t^d`.
    pub fn to_text(&self) -> String {
        let mut out = format!("curve\ndegree {}\n", self.degree());
        for (name, f) in ["x", "y", "z"].iter().zip(&self.forms) {
            let _ = write!(out, "{name}");
            for c in f.coefficient_vector() {
                let _ = write!(out, " {c}");
            }
            out.push('\n');
        }
        out.push_str("end\n");
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut degree: Option<u32> = None;
        let mut coeffs: [Option<Vec<F>>; 3] = [None, None, None];
        let mut started = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut words = line.split_whitespace();
            let head = words.next().expect("non-empty");
            match head {
                "curve" => started = true,
                _ if !started => return Err(parse_err(line_no, "missing `curve` header")),
                "degree" => {
                    degree = Some(
                        words
                            .next()
                            .and_then(|w| w.parse().ok())
                            .ok_or_else(|| parse_err(line_no, "bad degree"))?,
                    )
                }
                "x" | "y" | "z" => {
                    let slot = match head {
                        "x" => 0,
                        "y" => 1,
                        _ => 2,
                    };
                    let v = words
                        .map(|w| w.parse::<F>().map_err(|_| parse_err(line_no, format!("bad coefficient `{w}`"))))
                        .collect::<Result<Vec<_>>>()?;
                    coeffs[slot] = Some(v);
                }
                "end" => break,
                other => return Err(parse_err(line_no, format!("unknown keyword `{other}`"))),
            }
        }
        let d = degree.ok_or_else(|| parse_err(0, "missing degree"))?;
        let mut forms = Vec::with_capacity(3);
        for c in coeffs {
            let c = c.ok_or_else(|| parse_err(0, "missing coordinate line"))?;
            forms.push(HomForm::from_coeffs(2, d, c).map_err(|e| parse_err(0, e.to_string()))?);
        }
        Self::new(forms.try_into().expect("three forms"))
    }
}

impl<F: FiniteField> RationalCurveMap<F> {
    /// Coefficient-uniform sample; `Err` when the draw is base-pointed or
    /// constant.
    pub fn random<R: Rng + ?Sized>(d: u32, rng: &mut R) -> Result<Self> {
        let forms = std::array::from_fn(|_| {
            let c = (0..=d).map(|_| F::random(rng)).collect();
            HomForm::from_coeffs(2, d, c).expect("d + 1 coefficients")
        });
        Self::new(forms)
    }
}

impl<F: Field> fmt::Display for RationalCurveMap<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} : {} : {}]", self.forms[0], self.forms[1], self.forms[2])
    }
}

/// A presentation on P1 in the variables `s, t`.
#[derive(Clone, Debug, PartialEq)]
pub struct P1Presentation<F: Field>(Presentation<F>);

impl<F: Field> P1Presentation<F> {
    pub fn from_presentation(p: Presentation<F>) -> Result<Self> {
        if p.nvars() != 2 {
            return Err(Error::MalformedPresentation(
                "presentations on P1 use forms in s, t".into(),
            ));
        }
        Ok(P1Presentation(p))
    }

    pub fn inner(&self) -> &Presentation<F> {
        &self.0
    }

    pub fn rank(&self) -> i64 {
        self.0.rank()
    }

    pub fn twist(&self, k: i64) -> Self {
        P1Presentation(self.0.twist(k))
    }

    pub fn dual(&self) -> Self {
        P1Presentation(self.0.dual())
    }

    /// `h⁰(E(m))`, exact for both kinds. For a cokernel `A -> B -> E` the
    /// connecting part `ker(H¹A -> H¹B)` is the cokernel of the dual map on
    /// sections of `B*(-m-2) -> A*(-m-2)` by Serre duality.
    pub fn h0(&self, m: i64) -> usize {
        match self.0.kind() {
            Kind::Kernel => self.0.kernel_sections(m),
            Kind::Cokernel => {
                self.0.cokernel_sections(m) + self.0.dual().cokernel_sections(-m - 2)
            }
        }
    }

    pub fn to_text(&self) -> String {
        self.0.to_text()
    }
}

pub fn pullback<F: Field>(
    pres: &SheafPresentation<F>,
    s: &RationalCurveMap<F>,
) -> Result<P1Presentation<F>> {
    let d = s.degree() as i64;
    let m = pres.matrix().map_entries(2, |e| e.substitute(s.forms()))?;
    let p = Presentation::new(
        pres.kind(),
        pres.source().scaled(d),
        pres.target().scaled(d),
        m,
    )?;
    P1Presentation::from_presentation(p)
}

/// The matrix has full rank at every point of P1: the gcd of its maximal
/// minors is a nonzero constant. Empty matrices are vacuously fine; a
/// kernel with more target than source summands never is.
pub fn certify_bundle<F: Field>(p1: &P1Presentation<F>) -> bool {
    let m = p1.0.matrix();
    let (rows, cols) = (m.rows(), m.cols());
    if rows == 0 || cols == 0 {
        return true;
    }
    let size = match p1.0.kind() {
        Kind::Kernel if rows <= cols => rows,
        Kind::Cokernel if cols <= rows => cols,
        _ => return false,
    };
    let minors = m.minors(size);
    match hom_gcd_all(minors.iter().map(|mi| &mi.det)) {
        Ok(g) => g.degree() == 0,
        Err(_) => false,
    }
}

/// Splitting type `(e₁ ≥ … ≥ e_r)` of a bundle on P1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SplittingType(Vec<i64>);

impl SplittingType {
    pub fn new(mut parts: Vec<i64>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        SplittingType(parts)
    }

    pub fn parts(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn shifted(&self, k: i64) -> Self {
        SplittingType(self.0.iter().map(|e| e + k).collect())
    }

    pub fn panel(&self) -> SlopePanel {
        SlopePanel::from_integers(&self.0)
    }

    /// `h⁰(⊕O(eᵢ + m))`.
    pub fn h0(&self, m: i64) -> usize {
        self.0.iter().map(|e| (e + m + 1).max(0) as usize).sum()
    }

    /// Generic (most balanced) splitting of rank `r` and degree `deg`.
    pub fn balanced(r: usize, deg: i64) -> Self {
        let r64 = r as i64;
        let lo = deg.div_euclid(r64);
        let extra = deg.rem_euclid(r64) as usize;
        SplittingType::new((0..r).map(|i| lo + (i < extra) as i64).collect())
    }
}

impl fmt::Display for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

pub fn splitting_type<F: Field>(p1: &P1Presentation<F>) -> Result<SplittingType> {
    if !certify_bundle(p1) {
        return Err(Error::NotCertified);
    }
    match p1.0.kind() {
        Kind::Kernel => scan_kernel(&p1.0),
        Kind::Cokernel => {
            let dual = scan_kernel(&p1.0.dual())?;
            Ok(SplittingType::new(dual.0.iter().map(|e| -e).collect()))
        }
    }
}

/// Recover `e` from `h(m) - h(m-1) = #{i : eᵢ >= -m}`, starting just below
/// the largest source twist where no section can exist.
fn scan_kernel<F: Field>(p: &Presentation<F>) -> Result<SplittingType> {
    let r = p.rank();
    if r < 0 {
        return Err(Error::WindowInconsistent(format!("negative rank {r}")));
    }
    let r = r as usize;
    let total: i64 = p.source().twists().iter().sum::<i64>() - p.target().twists().iter().sum::<i64>();
    if r == 0 {
        return if total == 0 {
            Ok(SplittingType(Vec::new()))
        } else {
            Err(Error::WindowInconsistent("rank zero with nonzero degree".into()))
        };
    }
    let top = *p.source().twists().iter().max().expect("positive rank");
    let start = -top - 1;
    // e_r >= total - (r - 1) * top
    let stop = -(total - (r as i64 - 1) * top);
    let mut prev = p.kernel_sections(start);
    if prev != 0 {
        return Err(Error::WindowInconsistent(format!(
            "sections below the largest source twist at m = {start}"
        )));
    }
    let mut parts = Vec::with_capacity(r);
    let mut count = 0usize;
    let mut m = start;
    while parts.len() < r {
        m += 1;
        if m > stop {
            return Err(Error::WindowInconsistent(format!(
                "only {} of {r} parts found by m = {stop}",
                parts.len()
            )));
        }
        let h = p.kernel_sections(m);
        let jumps = h.checked_sub(prev).ok_or_else(|| {
            Error::WindowInconsistent(format!("h⁰ decreased at m = {m}"))
        })?;
        if jumps < count {
            return Err(Error::WindowInconsistent(format!(
                "section growth slowed at m = {m}"
            )));
        }
        for _ in count..jumps {
            parts.push(-m);
        }
        count = jumps;
        prev = h;
    }
    if parts.len() != r {
        return Err(Error::WindowInconsistent(format!(
            "found {} parts for rank {r}",
            parts.len()
        )));
    }
    let found: i64 = parts.iter().sum();
    if found != total {
        return Err(Error::WindowInconsistent(format!(
            "parts sum to {found}, expected {total}"
        )));
    }
    Ok(SplittingType::new(parts))
}

/// Data of a bundle on P2 that every restriction report needs.
#[derive(Clone, Debug)]
pub struct JumpContext<F: Field> {
    pres: SheafPresentation<F>,
    rank: i64,
    c1: i64,
    hn: Option<FiltrationData>,
}

impl<F: Field> JumpContext<F> {
    pub fn new(pres: &SheafPresentation<F>) -> Result<Self> {
        let c = chern(pres)?;
        Ok(JumpContext {
            pres: pres.clone(),
            rank: c.rank,
            c1: c.c1,
            hn: global_hn(pres)?,
        })
    }

    pub fn presentation(&self) -> &SheafPresentation<F> {
        &self.pres
    }

    pub fn hn(&self) -> Option<&FiltrationData> {
        self.hn.as_ref()
    }

    pub fn report(&self, s: &RationalCurveMap<F>) -> Result<JumpReport> {
        let p1 = pullback(&self.pres, s)?;
        let split = splitting_type(&p1)?;
        self.report_for(split, s.degree())
    }

    /// Assemble a report from an already computed splitting.
    pub fn report_for(&self, split: SplittingType, d: u32) -> Result<JumpReport> {
        let actual = split.panel();
        let sum_rule = split.degree() == self.c1 * d as i64;
        let (expected, mu, majorizes_expected) = match &self.hn {
            Some(hn) => {
                let exp = expected_panel(hn, d)?;
                let ordered = panel_from_filtration(hn)?
                    .ordered
                    .into_iter()
                    .map(|x| x * d as i64)
                    .collect::<Vec<_>>();
                let mu = sup_distance(&actual, &exp)?;
                let maj = majorizes(actual.entries(), &ordered)?;
                (Some(exp), Some(mu), Some(maj))
            }
            None => (None, None, None),
        };
        let (expected_codim, tangentgaps) = match (mu, self.rank) {
            (Some(mu), 2) => (
                Some(expected_codim_rank2(mu)?),
                Some(tangentgaps_bound(mu, 2, 0, 2)?),
            ),
            (Some(mu), r) if r >= 2 => (None, Some(tangentgaps_bound(mu, r, 0, 2)?)),
            _ => (None, None),
        };
        Ok(JumpReport {
            degree: d,
            splitting: split,
            actual,
            expected,
            mu,
            expected_codim,
            majorizes_expected,
            sum_rule,
            tangentgaps,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JumpReport {
    pub degree: u32,
    pub splitting: SplittingType,
    pub actual: SlopePanel,
    pub expected: Option<SlopePanel>,
    #[serde(serialize_with = "crate::serde_util::opt_rational")]
    pub mu: Option<Rational>,
    #[serde(serialize_with = "crate::serde_util::opt_rational")]
    pub expected_codim: Option<Rational>,
    pub majorizes_expected: Option<bool>,
    pub sum_rule: bool,
    /// Genus zero curves on a surface.
    pub tangentgaps: Option<TangentGaps>,
}

pub fn jump_report<F: Field>(
    pres: &SheafPresentation<F>,
    s: &RationalCurveMap<F>,
) -> Result<JumpReport> {
    JumpContext::new(pres)?.report(s)
}
