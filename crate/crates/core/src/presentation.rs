//! Two-term presentations `⊕O(s_j) -> ⊕O(t_i)` shared by P1 and P2, and
//! their plain-text serialization.
//!
//! ```text
//! presentation
//! vars 3
//! kind cokernel
//! source 0
//! target 1 1 1
//! entry 0 0 1:1,0,0
//! entry 1 0 1:0,1,0
//! entry 2 0 1:0,0,1
//! end
//! ```
//!
//! Each `entry i j` line lists the nonzero terms of matrix entry `(i, j)` as
//! `coefficient:exponents` in monomial order. Zero entries are omitted.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{parse_err, Error, Result};
use crate::field::Field;
use crate::formmat::FormMatrix;
use crate::matrix::Matrix;
use crate::poly::{basis_len, hom_basis, monomial_index, HomForm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Kernel,
    Cokernel,
}

impl Kind {
    pub fn flip(self) -> Self {
        match self {
            Kind::Kernel => Kind::Cokernel,
            Kind::Cokernel => Kind::Kernel,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Kind::Kernel => "kernel",
            Kind::Cokernel => "cokernel",
        }
    }
}

/// `O(t_1) ⊕ … ⊕ O(t_k)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize)]
pub struct LineBundleSum(pub Vec<i64>);

impl LineBundleSum {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn twists(&self) -> &[i64] {
        &self.0
    }

    pub fn shifted(&self, k: i64) -> Self {
        LineBundleSum(self.0.iter().map(|t| t + k).collect())
    }

    pub fn scaled(&self, d: i64) -> Self {
        LineBundleSum(self.0.iter().map(|t| t * d).collect())
    }

    pub fn negated(&self) -> Self {
        LineBundleSum(self.0.iter().map(|t| -t).collect())
    }

    /// `(c1, c2)` of the sum.
    pub fn chern(&self) -> (i64, i64) {
        let c1: i64 = self.0.iter().sum();
        let sq: i64 = self.0.iter().map(|t| t * t).sum();
        (c1, (c1 * c1 - sq) / 2)
    }
}

/// Matrix `M` with `M[i][j]` of degree `target[i] - source[j]`, presenting
/// either its kernel or its cokernel.
#[derive(Clone, Debug, PartialEq)]
pub struct Presentation<F: Field> {
    pub(crate) kind: Kind,
    pub(crate) source: LineBundleSum,
    pub(crate) target: LineBundleSum,
    pub(crate) matrix: FormMatrix<F>,
}

impl<F: Field> Presentation<F> {
    pub fn new(
        kind: Kind,
        source: LineBundleSum,
        target: LineBundleSum,
        matrix: FormMatrix<F>,
    ) -> Result<Self> {
        if matrix.rows() != target.len() || matrix.cols() != source.len() {
            return Err(Error::MalformedPresentation(format!(
                "matrix is {}x{} but target has {} and source {} summands",
                matrix.rows(),
                matrix.cols(),
                target.len(),
                source.len()
            )));
        }
        for (i, t) in target.0.iter().enumerate() {
            for (j, s) in source.0.iter().enumerate() {
                let e = matrix.get(i, j);
                if e.is_zero() {
                    continue;
                }
                if t - s < 0 || e.degree() as i64 != t - s {
                    return Err(Error::MalformedPresentation(format!(
                        "entry ({i}, {j}) has degree {} but the twists require {}",
                        e.degree(),
                        t - s
                    )));
                }
            }
        }
        Ok(Presentation {
            kind,
            source,
            target,
            matrix,
        })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn source(&self) -> &LineBundleSum {
        &self.source
    }

    pub fn target(&self) -> &LineBundleSum {
        &self.target
    }

    pub fn matrix(&self) -> &FormMatrix<F> {
        &self.matrix
    }

    pub fn nvars(&self) -> usize {
        self.matrix.nvars()
    }

    pub fn rank(&self) -> i64 {
        let (s, t) = (self.source.len() as i64, self.target.len() as i64);
        match self.kind {
            Kind::Kernel => s - t,
            Kind::Cokernel => t - s,
        }
    }

    pub fn twist(&self, k: i64) -> Self {
        Presentation {
            kind: self.kind,
            source: self.source.shifted(k),
            target: self.target.shifted(k),
            matrix: self.matrix.clone(),
        }
    }

    /// Transpose the matrix, negate every twist and swap kernel/cokernel.
    pub fn dual(&self) -> Self {
        Presentation {
            kind: self.kind.flip(),
            source: self.target.negated(),
            target: self.source.negated(),
            matrix: self.matrix.transpose(),
        }
    }

    /// The linear map `⊕H⁰(O(s_j + m)) -> ⊕H⁰(O(t_i + m))` induced by the
    /// matrix, in monomial bases.
    pub fn sections_map(&self, m: i64) -> Matrix<F> {
        let n = self.nvars();
        let dims = |twists: &[i64]| -> Vec<usize> {
            twists
                .iter()
                .map(|t| if t + m < 0 { 0 } else { basis_len(n, (t + m) as u32) })
                .collect()
        };
        let src_dims = dims(&self.source.0);
        let tgt_dims = dims(&self.target.0);
        let tgt_offsets: Vec<usize> = prefix_offsets(&tgt_dims);
        let ncols: usize = src_dims.iter().sum();
        let nrows: usize = tgt_dims.iter().sum();
        let mut out: Matrix<F> = Matrix::zeros(nrows, ncols);
        let mut col = 0;
        for (j, &s) in self.source.0.iter().enumerate() {
            if src_dims[j] == 0 {
                continue;
            }
            let monos = hom_basis(n, (s + m) as u32);
            let entries: Vec<Vec<(F, Vec<u32>)>> = (0..self.target.len())
                .map(|i| self.matrix.get(i, j).terms())
                .collect();
            for mono in &monos {
                for (i, terms) in entries.iter().enumerate() {
                    if tgt_dims[i] == 0 {
                        continue;
                    }
                    for (c, e) in terms {
                        let prod: Vec<u32> = e.iter().zip(mono).map(|(a, b)| a + b).collect();
                        let r = tgt_offsets[i] + monomial_index(&prod);
                        out[(r, col)] = out[(r, col)].clone() + c.clone();
                    }
                }
                col += 1;
            }
        }
        out
    }

    pub fn kernel_sections(&self, m: i64) -> usize {
        let map = self.sections_map(m);
        map.cols() - map.rank()
    }

    pub fn cokernel_sections(&self, m: i64) -> usize {
        let map = self.sections_map(m);
        map.rows() - map.rank()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("presentation\n");
        let _ = writeln!(out, "vars {}", self.nvars());
        let _ = writeln!(out, "kind {}", self.kind.as_str());
        let _ = writeln!(out, "source{}", join_twists(&self.source.0));
        let _ = writeln!(out, "target{}", join_twists(&self.target.0));
        write_entries(&mut out, &self.matrix);
        out.push_str("end\n");
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut nvars = None;
        let mut kind = None;
        let mut source = None;
        let mut target = None;
        let mut raw_entries = Vec::new();
        let mut started = false;
        for (no, line) in text.lines().enumerate() {
            let line_no = no + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut words = line.split_whitespace();
            let head = words.next().expect("non-empty line");
            match head {
                "presentation" => started = true,
                _ if !started => return Err(parse_err(line_no, "missing `presentation` header")),
                "vars" => {
                    let v: usize = parse_word(words.next(), line_no)?;
                    if v != 2 && v != 3 {
                        return Err(parse_err(line_no, "vars must be 2 or 3"));
                    }
                    nvars = Some(v);
                }
                "kind" => {
                    kind = Some(match words.next() {
                        Some("kernel") => Kind::Kernel,
                        Some("cokernel") => Kind::Cokernel,
                        _ => return Err(parse_err(line_no, "kind must be kernel or cokernel")),
                    })
                }
                "source" | "target" => {
                    let twists = words
                        .map(|w| parse_word::<i64>(Some(w), line_no))
                        .collect::<Result<Vec<_>>>()?;
                    if head == "source" {
                        source = Some(LineBundleSum(twists));
                    } else {
                        target = Some(LineBundleSum(twists));
                    }
                }
                "entry" => {
                    let i: usize = parse_word(words.next(), line_no)?;
                    let j: usize = parse_word(words.next(), line_no)?;
                    raw_entries.push((line_no, i, j, words.map(str::to_string).collect::<Vec<_>>()));
                }
                "end" => break,
                other => return Err(parse_err(line_no, format!("unknown keyword `{other}`"))),
            }
        }
        let nvars = nvars.unwrap_or(3);
        let kind = kind.ok_or_else(|| parse_err(0, "missing kind"))?;
        let source = source.ok_or_else(|| parse_err(0, "missing source"))?;
        let target = target.ok_or_else(|| parse_err(0, "missing target"))?;
        let mut matrix = FormMatrix::zeros(nvars, target.len(), source.len());
        for (i, t) in target.0.iter().enumerate() {
            for (j, s) in source.0.iter().enumerate() {
                matrix.set(i, j, HomForm::zero(nvars, (t - s).max(0) as u32));
            }
        }
        for (line_no, i, j, terms) in raw_entries {
            if i >= target.len() || j >= source.len() {
                return Err(parse_err(line_no, format!("entry ({i}, {j}) out of range")));
            }
            let degree = target.0[i] - source.0[j];
            let form = parse_terms::<F>(&terms, nvars, degree, line_no)?;
            matrix.set(i, j, form);
        }
        Presentation::new(kind, source, target, matrix)
    }
}

fn prefix_offsets(dims: &[usize]) -> Vec<usize> {
    let mut acc = 0;
    dims.iter()
        .map(|d| {
            let o = acc;
            acc += d;
            o
        })
        .collect()
}

fn join_twists(t: &[i64]) -> String {
    t.iter().map(|x| format!(" {x}")).collect()
}

fn parse_word<T: std::str::FromStr>(w: Option<&str>, line: usize) -> Result<T> {
    let w = w.ok_or_else(|| parse_err(line, "missing value"))?;
    w.parse()
        .map_err(|_| parse_err(line, format!("cannot parse `{w}`")))
}

/// Render the nonzero terms of a form as `c:e1,e2[,e3]` words.
pub(crate) fn form_terms_text<F: Field>(f: &HomForm<F>) -> String {
    f.terms()
        .iter()
        .map(|(c, e)| {
            let exps: Vec<String> = e.iter().map(u32::to_string).collect();
            format!(" {}:{}", c, exps.join(","))
        })
        .collect()
}

pub(crate) fn write_entries<F: Field>(out: &mut String, m: &FormMatrix<F>) {
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let e = m.get(i, j);
            if !e.is_zero() {
                let _ = writeln!(out, "entry {i} {j}{}", form_terms_text(e));
            }
        }
    }
}

pub(crate) fn parse_terms<F: Field>(
    words: &[String],
    nvars: usize,
    degree: i64,
    line: usize,
) -> Result<HomForm<F>> {
    let mut terms = Vec::with_capacity(words.len());
    for w in words {
        let (c, e) = w
            .split_once(':')
            .ok_or_else(|| parse_err(line, format!("term `{w}` is not coef:exponents")))?;
        let c: F = c
            .parse()
            .map_err(|_| parse_err(line, format!("bad coefficient `{c}`")))?;
        let e = e
            .split(',')
            .map(|x| x.parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| parse_err(line, format!("bad exponents in `{w}`")))?;
        terms.push((c, e));
    }
    if degree < 0 {
        if terms.iter().all(|(c, _)| c.is_zero()) {
            return Ok(HomForm::zero(nvars, 0));
        }
        return Err(parse_err(line, "nonzero entry where the twists force zero"));
    }
    HomForm::from_terms(nvars, degree as u32, &terms).map_err(|e| parse_err(line, e.to_string()))
}
