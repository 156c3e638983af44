//! Coherent sheaves on P2 presented as kernels or cokernels of maps between
//! sums of line bundles.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::formmat::FormMatrix;
use crate::panel::FiltrationData;
use crate::poly::HomForm;
use crate::presentation::{Kind, LineBundleSum, Presentation};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChernData {
    pub rank: i64,
    pub c1: i64,
    pub c2: i64,
    #[serde(serialize_with = "crate::serde_util::rational")]
    pub slope: Rational,
    /// `4 c2 - c1²`, rank two only.
    pub discriminant: Option<i64>,
}

/// A sheaf on P2 given by a two-term presentation in `x, y, z`.
#[derive(Clone, Debug, PartialEq)]
pub struct SheafPresentation<F: Field>(Presentation<F>);

impl<F: Field> SheafPresentation<F> {
    pub fn new(
        kind: Kind,
        source: LineBundleSum,
        target: LineBundleSum,
        matrix: FormMatrix<F>,
    ) -> Result<Self> {
        if matrix.nvars() != 3 {
            return Err(Error::MalformedPresentation(
                "presentations on P2 use forms in x, y, z".into(),
            ));
        }
        Presentation::new(kind, source, target, matrix).map(SheafPresentation)
    }

    pub fn from_presentation(p: Presentation<F>) -> Result<Self> {
        if p.nvars() != 3 {
            return Err(Error::MalformedPresentation(
                "presentations on P2 use forms in x, y, z".into(),
            ));
        }
        Ok(SheafPresentation(p))
    }

    pub fn inner(&self) -> &Presentation<F> {
        &self.0
    }

    pub fn kind(&self) -> Kind {
        self.0.kind
    }

    pub fn source(&self) -> &LineBundleSum {
        &self.0.source
    }

    pub fn target(&self) -> &LineBundleSum {
        &self.0.target
    }

    pub fn matrix(&self) -> &FormMatrix<F> {
        &self.0.matrix
    }

    pub fn rank(&self) -> i64 {
        self.0.rank()
    }

    /// Largest degree of a matrix entry.
    pub fn max_entry_degree(&self) -> u32 {
        let m = &self.0.matrix;
        (0..m.rows())
            .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j))
            .filter(|f| !f.is_zero())
            .map(HomForm::degree)
            .max()
            .unwrap_or(0)
    }

    /// True when the presented sheaf is the plain direct sum of its free
    /// module (kernel of a map to nothing, or cokernel of a map from nothing).
    pub fn is_split(&self) -> bool {
        match self.kind() {
            Kind::Kernel => self.target().is_empty(),
            Kind::Cokernel => self.source().is_empty(),
        }
    }

    /// Summands of a split presentation.
    pub fn split_twists(&self) -> Option<&[i64]> {
        self.is_split().then(|| match self.kind() {
            Kind::Kernel => self.source().twists(),
            Kind::Cokernel => self.target().twists(),
        })
    }

    pub fn twist(&self, k: i64) -> Self {
        SheafPresentation(self.0.twist(k))
    }

    pub fn dual(&self) -> Self {
        SheafPresentation(self.0.dual())
    }

    /// Block-diagonal sum of two presentations of the same kind.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.kind() != other.kind() {
            return Err(Error::InvalidInput(
                "direct sum needs presentations of the same kind".into(),
            ));
        }
        let (a, b) = (self.matrix(), other.matrix());
        let mut m = FormMatrix::zeros(3, a.rows() + b.rows(), a.cols() + b.cols());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                m.set(i, j, a.get(i, j).clone());
            }
        }
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                m.set(a.rows() + i, a.cols() + j, b.get(i, j).clone());
            }
        }
        let cat = |x: &LineBundleSum, y: &LineBundleSum| {
            LineBundleSum(x.0.iter().chain(&y.0).copied().collect())
        };
        Self::new(
            self.kind(),
            cat(self.source(), other.source()),
            cat(self.target(), other.target()),
            m,
        )
    }

    /// Substitute linear forms for `x, y, z`: the pullback along a linear
    /// automorphism of P2 when `forms` are independent.
    pub fn change_coordinates(&self, forms: &[HomForm<F>; 3]) -> Result<Self> {
        if forms.iter().any(|f| f.nvars() != 3 || f.degree() != 1) {
            return Err(Error::DegreeMismatch(
                "coordinate change needs three linear forms".into(),
            ));
        }
        let m = self.matrix().map_entries(3, |e| {
            if e.is_zero() {
                Ok(e.clone())
            } else {
                e.substitute(forms)
            }
        })?;
        Self::new(self.kind(), self.source().clone(), self.target().clone(), m)
    }

    pub fn to_text(&self) -> String {
        self.0.to_text()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_presentation(Presentation::from_text(text)?)
    }

    /// Checks that the matrix has the expected rank at some point of P2
    /// (surjective for kernels, injective for cokernels), trying a
    /// deterministic list of points.
    pub fn check_generic_rank(&self) -> Result<()> {
        let m = self.matrix();
        let need = match self.kind() {
            Kind::Kernel => m.rows(),
            Kind::Cokernel => m.cols(),
        };
        if need == 0 {
            return Ok(());
        }
        for k in 0..256i64 {
            let pt = [
                F::one(),
                F::from_i64(k % 16 + 1),
                F::from_i64(k / 16 * 3 + 2),
            ];
            if m.evaluate(&pt).rank() == need {
                return Ok(());
            }
        }
        Err(Error::MalformedPresentation(match self.kind() {
            Kind::Kernel => "matrix is not generically surjective".into(),
            Kind::Cokernel => "matrix is not generically injective".into(),
        }))
    }
}

impl<F: Field> fmt::Display for SheafPresentation<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verb = match self.kind() {
            Kind::Kernel => "ker",
            Kind::Cokernel => "coker",
        };
        write!(
            f,
            "{verb}({:?} -> {:?})",
            self.source().twists(),
            self.target().twists()
        )
    }
}

/// Rank and Chern classes from the total Chern class of the presentation,
/// truncated in degree two.
pub fn chern<F: Field>(pres: &SheafPresentation<F>) -> Result<ChernData> {
    let rank = pres.rank();
    if rank <= 0 {
        return Err(Error::MalformedPresentation(format!(
            "presented sheaf has rank {rank}"
        )));
    }
    let (s1, s2) = pres.source().chern();
    let (t1, t2) = pres.target().chern();
    // c(E) = c(A) / c(B) with (A, B) = (source, target) for kernels
    let quotient = |a1: i64, a2: i64, b1: i64, b2: i64| (a1 - b1, a2 - a1 * b1 + b1 * b1 - b2);
    let (c1, c2) = match pres.kind() {
        Kind::Kernel => quotient(s1, s2, t1, t2),
        Kind::Cokernel => quotient(t1, t2, s1, s2),
    };
    Ok(ChernData {
        rank,
        c1,
        c2,
        slope: Rational::new(c1, rank),
        discriminant: (rank == 2).then_some(4 * c2 - c1 * c1),
    })
}

/// `h⁰(F(m))`. For kernels this is the kernel of the induced map on global
/// sections. For cokernels it is the cokernel of that map, which is exact on
/// P2 because every line bundle there has vanishing H¹.
pub fn h0_twist<F: Field>(pres: &SheafPresentation<F>, m: i64) -> usize {
    match pres.kind() {
        Kind::Kernel => pres.0.kernel_sections(m),
        Kind::Cokernel => pres.0.cokernel_sections(m),
    }
}

/// Hoppe's criterion: a rank two bundle is stable iff its normalized twist
/// (`c1 ∈ {0, -1}`) has no sections.
pub fn is_stable_rank2<F: Field>(pres: &SheafPresentation<F>) -> Result<bool> {
    let c = chern(pres)?;
    if c.rank != 2 {
        return Err(Error::NotRankTwo(c.rank));
    }
    Ok(h0_twist(pres, normalizing_twist(c.c1)) == 0)
}

/// The `k` with `c1 + 2k ∈ {0, -1}`.
pub fn normalizing_twist(c1: i64) -> i64 {
    (-c1).div_euclid(2)
}

/// Harder–Narasimhan data with respect to the line class, where it can be
/// computed exactly: split sums, rank one, and rank two (via the largest
/// `k` with `O(k) -> E`). `None` for non-split sheaves of rank ≥ 3.
pub fn global_hn<F: Field>(pres: &SheafPresentation<F>) -> Result<Option<FiltrationData>> {
    let c = chern(pres)?;
    if let Some(twists) = pres.split_twists() {
        let mut t = twists.to_vec();
        t.sort_unstable_by(|a, b| b.cmp(a));
        let mut pieces: Vec<(u32, Rational)> = Vec::new();
        for x in t {
            match pieces.last_mut() {
                Some((r, mu)) if *mu == Rational::from_integer(x) => *r += 1,
                _ => pieces.push((1, Rational::from_integer(x))),
            }
        }
        return Ok(Some(FiltrationData(pieces)));
    }
    match c.rank {
        1 => Ok(Some(FiltrationData::single(1, Rational::from_integer(c.c1)))),
        2 => {
            if is_stable_rank2(pres)? {
                return Ok(Some(FiltrationData::single(2, c.slope)));
            }
            // O(k) -> E forces k <= max source twist (kernels) or max target
            // twist (cokernels, since sections lift from the target)
            let upper = match pres.kind() {
                Kind::Kernel => pres.source().twists().iter().copied().max(),
                Kind::Cokernel => pres.target().twists().iter().copied().max(),
            }
            .unwrap_or(0);
            let lower = -normalizing_twist(c.c1);
            let k_max = (lower..=upper)
                .rev()
                .find(|&k| h0_twist(pres, -k) > 0)
                .ok_or_else(|| {
                    Error::MalformedPresentation("non-stable sheaf without a destabilizing line".into())
                })?;
            if 2 * k_max > c.c1 {
                Ok(Some(FiltrationData(vec![
                    (1, Rational::from_integer(k_max)),
                    (1, Rational::from_integer(c.c1 - k_max)),
                ])))
            } else {
                Ok(Some(FiltrationData::single(2, c.slope)))
            }
        }
        _ => Ok(None),
    }
}

fn mono<F: Field>(exps: [u32; 3]) -> HomForm<F> {
    HomForm::monomial(&exps, F::one())
}

/// `T_P2` as the cokernel of `(x, y, z)ᵀ: O -> O(1)³`.
pub fn euler_tangent<F: Field>() -> SheafPresentation<F> {
    let col = vec![
        vec![mono([1, 0, 0])],
        vec![mono([0, 1, 0])],
        vec![mono([0, 0, 1])],
    ];
    SheafPresentation::new(
        Kind::Cokernel,
        LineBundleSum(vec![0]),
        LineBundleSum(vec![1, 1, 1]),
        FormMatrix::from_rows(3, col).expect("well-formed"),
    )
    .expect("Euler sequence is degree compatible")
}

/// Kernel of `(x^d, y^d, z^{2d-1}): O(-d)² ⊕ O(-2d+1) -> O`.
pub fn conic_example_bundle<F: Field>(d: u32) -> Result<SheafPresentation<F>> {
    if d == 0 {
        return Err(Error::InvalidInput("d must be positive".into()));
    }
    let d64 = d as i64;
    let row = vec![vec![
        mono([d, 0, 0]),
        mono([0, d, 0]),
        mono([0, 0, 2 * d - 1]),
    ]];
    SheafPresentation::new(
        Kind::Kernel,
        LineBundleSum(vec![-d64, -d64, -2 * d64 + 1]),
        LineBundleSum(vec![0]),
        FormMatrix::from_rows(3, row)?,
    )
}

/// Cokernel of the band matrix `O(q-1)^{p-q-1} -> O(q)^{p-q+1}` with
/// `M[i][i] = x`, `M[i+1][i] = y`, `M[i+2][i] = z`.
pub fn schwarzenberger<F: Field>(p: i64, q: i64) -> Result<SheafPresentation<F>> {
    if p < q + 2 {
        return Err(Error::InvalidInput(format!("need p >= q + 2, got p = {p}, q = {q}")));
    }
    let cols = (p - q - 1) as usize;
    let rows = (p - q + 1) as usize;
    let mut m = FormMatrix::zeros(3, rows, cols);
    for i in 0..cols {
        m.set(i, i, mono([1, 0, 0]));
        m.set(i + 1, i, mono([0, 1, 0]));
        m.set(i + 2, i, mono([0, 0, 1]));
    }
    SheafPresentation::new(
        Kind::Cokernel,
        LineBundleSum(vec![q - 1; cols]),
        LineBundleSum(vec![q; rows]),
        m,
    )
}

/// Kernel of the row of `forms`: `⊕O(source_twists) -> O(target_twist)`.
pub fn kernel_of_forms<F: Field>(
    forms: Vec<HomForm<F>>,
    source_twists: Vec<i64>,
    target_twist: i64,
) -> Result<SheafPresentation<F>> {
    if forms.len() != source_twists.len() {
        return Err(Error::LengthMismatch(forms.len(), source_twists.len()));
    }
    SheafPresentation::new(
        Kind::Kernel,
        LineBundleSum(source_twists),
        LineBundleSum(vec![target_twist]),
        FormMatrix::from_rows(3, vec![forms])?,
    )
}

/// `O(a_1) ⊕ … ⊕ O(a_k)` as the kernel of the zero map to nothing.
pub fn direct_sum<F: Field>(twists: &[i64]) -> SheafPresentation<F> {
    SheafPresentation::new(
        Kind::Kernel,
        LineBundleSum(twists.to_vec()),
        LineBundleSum(Vec::new()),
        FormMatrix::zeros(3, 0, twists.len()),
    )
    .expect("empty matrix is always compatible")
}

pub fn line_bundle<F: Field>(k: i64) -> SheafPresentation<F> {
    direct_sum(&[k])
}
