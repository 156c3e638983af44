//! Fitting ideals of presentation matrices, explicit syzygies from
//! adjugates, and the degree and log canonical threshold bookkeeping that
//! goes with them.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::formmat::{subsets, FormMatrix, Minor};
use crate::poly::HomForm;
use crate::presentation::{form_terms_text, write_entries};
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub enum FittingIdeal<F: Field> {
    /// Minor size `<= 0`.
    Unit,
    /// Minor size larger than the matrix.
    Zero,
    Minors(Vec<Minor<F>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FittingGenerators<F: Field> {
    pub j: usize,
    pub minor_size: i64,
    pub ideal: FittingIdeal<F>,
}

impl<F: Field> FittingGenerators<F> {
    /// The generating forms; empty for the unit and zero ideals.
    pub fn forms(&self) -> Vec<&HomForm<F>> {
        match &self.ideal {
            FittingIdeal::Minors(m) => m.iter().map(|m| &m.det).collect(),
            _ => Vec::new(),
        }
    }

    /// Membership of `f` among the generators up to a nonzero scalar.
    pub fn contains_up_to_scalar(&self, f: &HomForm<F>) -> bool {
        match &self.ideal {
            FittingIdeal::Unit => true,
            FittingIdeal::Zero => f.is_zero(),
            FittingIdeal::Minors(m) => m.iter().any(|g| g.det.monic() == f.monic()),
        }
    }
}

/// `Fit_j` of the module presented by `m` with `n` generators (its rows):
/// the ideal of `(n - j)`-minors, nonzero and without repeats.
pub fn fitting_generators<F: Field>(m: &FormMatrix<F>, n: usize, j: usize) -> Result<FittingGenerators<F>> {
    if n != m.rows() {
        return Err(Error::MalformedPresentation(format!(
            "{n} generators but the matrix has {} rows",
            m.rows()
        )));
    }
    if j > n {
        return Err(Error::InvalidInput(format!("j = {j} exceeds n = {n}")));
    }
    let size = n as i64 - j as i64;
    let ideal = if size <= 0 {
        FittingIdeal::Unit
    } else if size as usize > m.rows().min(m.cols()) {
        FittingIdeal::Zero
    } else {
        let mut kept: Vec<Minor<F>> = Vec::new();
        for minor in m.minors(size as usize) {
            if minor.det.is_zero() || kept.iter().any(|k| k.det == minor.det) {
                continue;
            }
            kept.push(minor);
        }
        if kept.is_empty() {
            FittingIdeal::Zero
        } else {
            FittingIdeal::Minors(kept)
        }
    };
    Ok(FittingGenerators {
        j,
        minor_size: size,
        ideal,
    })
}

/// Syzygies of `N` built from the adjugate of a nonsingular `r × r` block.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjugateCertificate<F: Field> {
    pub selected_rows: Vec<usize>,
    pub selected_cols: Vec<usize>,
    pub det_a: HomForm<F>,
    pub kernel_vectors: Vec<Vec<HomForm<F>>>,
}

impl<F: Field> AdjugateCertificate<F> {
    /// Recheck `N · v = 0` for every vector.
    pub fn verify(&self, n: &FormMatrix<F>) -> bool {
        self.kernel_vectors
            .iter()
            .all(|v| v.len() == n.cols() && n.mul_vec(v).iter().all(HomForm::is_zero))
    }

    /// The kernel vectors as the columns of a `d × (d - r)` matrix.
    pub fn kernel_matrix(&self, d: usize) -> FormMatrix<F> {
        let nvars = self.det_a.nvars();
        let mut b = FormMatrix::zeros(nvars, d, self.kernel_vectors.len());
        for (c, v) in self.kernel_vectors.iter().enumerate() {
            for (r, e) in v.iter().enumerate() {
                b.set(r, c, e.clone());
            }
        }
        b
    }

    /// Audit text: selection, `det A`, then the kernel vectors as a
    /// presentation block `O(-rδ)^{d-r} -> O^d`.
    pub fn to_text(&self, d: usize) -> String {
        let join = |v: &[usize]| v.iter().map(|i| format!(" {i}")).collect::<String>();
        let mut out = String::from("certificate\n");
        let _ = writeln!(out, "rows{}", join(&self.selected_rows));
        let _ = writeln!(out, "cols{}", join(&self.selected_cols));
        let _ = writeln!(out, "deta {}{}", self.det_a.degree(), form_terms_text(&self.det_a));
        out.push_str("presentation\n");
        let _ = writeln!(out, "vars {}", self.det_a.nvars());
        out.push_str("kind cokernel\n");
        let deg = self.det_a.degree() as i64;
        let _ = writeln!(
            out,
            "source{}",
            (0..self.kernel_vectors.len()).map(|_| format!(" {}", -deg)).collect::<String>()
        );
        let _ = writeln!(out, "target{}", (0..d).map(|_| " 0").collect::<String>());
        write_entries(&mut out, &self.kernel_matrix(d));
        out.push_str("end\n");
        out
    }
}

fn uniform_degree<F: Field>(n: &FormMatrix<F>) -> Result<Option<u32>> {
    let mut deg = None;
    for i in 0..n.rows() {
        for j in 0..n.cols() {
            let e = n.get(i, j);
            if e.is_zero() {
                continue;
            }
            match deg {
                None => deg = Some(e.degree()),
                Some(d) if d != e.degree() => {
                    return Err(Error::DegreeMismatch(
                        "entries of N must share one degree".into(),
                    ))
                }
                _ => {}
            }
        }
    }
    Ok(deg)
}

/// For each column `c` outside the chosen block `A = N[rows, cols]`, the
/// vector with `det A` in slot `c` and `-adj(A) · N[rows, c]` on `cols`.
/// Column blocks are tried in lexicographic order.
pub fn adjugate_kernel<F: Field>(n: &FormMatrix<F>, r: usize, rows: &[usize]) -> Result<AdjugateCertificate<F>> {
    uniform_degree(n)?;
    let d = n.cols();
    if rows.len() != r || r == 0 || rows.iter().any(|&i| i >= n.rows()) {
        return Err(Error::InvalidInput(format!(
            "need {r} distinct row indices below {}",
            n.rows()
        )));
    }
    let mut sorted = rows.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != r {
        return Err(Error::InvalidInput("repeated row index".into()));
    }
    if d < r {
        return Err(Error::InvalidInput(format!("{d} columns for rank {r}")));
    }
    for cols in subsets(d, r) {
        let a = n.submatrix(rows, &cols);
        let det_a = a.det();
        if det_a.is_zero() {
            continue;
        }
        let adj = a.adjugate();
        let mut kernel_vectors = Vec::with_capacity(d - r);
        for c in (0..d).filter(|c| !cols.contains(c)) {
            let g: Vec<HomForm<F>> = rows.iter().map(|&i| n.get(i, c).clone()).collect();
            let w = adj.mul_vec(&g);
            let mut v = vec![HomForm::zero(n.nvars(), det_a.degree()); d];
            for (k, &col) in cols.iter().enumerate() {
                v[col] = -&w[k];
            }
            v[c] = det_a.clone();
            kernel_vectors.push(v);
        }
        return Ok(AdjugateCertificate {
            selected_rows: rows.to_vec(),
            selected_cols: cols,
            det_a,
            kernel_vectors,
        });
    }
    Err(Error::SingularSelection)
}

/// `(d - r) · r · (c1(Q) - r·L)`.
pub fn fit_divisor_degree(d: i64, r: i64, c1q: i64, l: i64) -> Result<i64> {
    if r < 1 || d <= r {
        return Err(Error::InvalidInput(format!("need d > r >= 1, got d = {d}, r = {r}")));
    }
    Ok((d - r) * r * (c1q - r * l))
}

/// `1 / (υ (d - r) r ((c1 - rL) · β))`.
pub fn lct_lower_bound(upsilon: Rational, d: i64, r: i64, deg_beta: i64) -> Result<Rational> {
    if upsilon <= Rational::from_integer(0) || r < 1 || d <= r || deg_beta <= 0 {
        return Err(Error::InvalidInput(
            "need υ > 0, d > r >= 1 and a positive degree".into(),
        ));
    }
    Ok((upsilon * ((d - r) * r * deg_beta)).recip())
}

/// `det M[rows, cols] = Σ_k coefficient_k · det M[rest, cols \ cols_k]`,
/// the Laplace expansion along the first selected row.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplaceWitness<F: Field> {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub det: HomForm<F>,
    pub terms: Vec<LaplaceTerm<F>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaplaceTerm<F: Field> {
    pub coefficient: HomForm<F>,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

pub fn laplace_witness<F: Field>(m: &FormMatrix<F>, rows: &[usize], cols: &[usize]) -> Result<LaplaceWitness<F>> {
    if rows.len() != cols.len() || rows.len() < 2 {
        return Err(Error::InvalidInput("need a square selection of size >= 2".into()));
    }
    let rest: Vec<usize> = rows[1..].to_vec();
    let terms = cols
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let e = m.get(rows[0], c);
            LaplaceTerm {
                coefficient: if k % 2 == 0 { e.clone() } else { -e },
                rows: rest.clone(),
                cols: cols.iter().copied().filter(|&x| x != c).collect(),
            }
        })
        .collect();
    Ok(LaplaceWitness {
        rows: rows.to_vec(),
        cols: cols.to_vec(),
        det: m.submatrix(rows, cols).det(),
        terms,
    })
}

/// Witnesses that every `(k+1)`-minor lies in the ideal of `k`-minors.
pub fn laplace_witnesses<F: Field>(m: &FormMatrix<F>, k: usize) -> Result<Vec<LaplaceWitness<F>>> {
    let mut out = Vec::new();
    for rows in subsets(m.rows(), k + 1) {
        for cols in subsets(m.cols(), k + 1) {
            out.push(laplace_witness(m, &rows, &cols)?);
        }
    }
    Ok(out)
}

impl<F: Field> LaplaceWitness<F> {
    /// Recompute each smaller minor independently and check the identity.
    pub fn verify(&self, m: &FormMatrix<F>) -> bool {
        let k = self.rows.len() - 1;
        let sum = self.terms.iter().fold(HomForm::zero(m.nvars(), 0), |acc, t| {
            if t.rows.len() != k || t.cols.len() != k {
                return acc;
            }
            let minor = m.submatrix(&t.rows, &t.cols).det();
            &acc + &(&t.coefficient * &minor)
        });
        self.terms.len() == k + 1 && sum == self.det && m.submatrix(&self.rows, &self.cols).det() == self.det
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FittingSummary {
    pub j: usize,
    pub minor_size: i64,
    pub ideal: &'static str,
    pub generators: Vec<String>,
}

impl<F: Field> From<&FittingGenerators<F>> for FittingSummary {
    fn from(g: &FittingGenerators<F>) -> Self {
        FittingSummary {
            j: g.j,
            minor_size: g.minor_size,
            ideal: match g.ideal {
                FittingIdeal::Unit => "unit",
                FittingIdeal::Zero => "zero",
                FittingIdeal::Minors(_) => "minors",
            },
            generators: g.forms().iter().map(|f| f.to_string()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;

    type F = Fp<101>;

    fn v(i: usize) -> HomForm<F> {
        HomForm::var(3, i)
    }

    fn z() -> HomForm<F> {
        HomForm::zero(3, 1)
    }

    #[test]
    fn fitting_of_symmetric_two_by_two() {
        let m = FormMatrix::from_rows(3, vec![vec![v(0), v(1)], vec![v(1), v(2)]]).unwrap();
        let fit0 = fitting_generators(&m, 2, 0).unwrap();
        let forms = fit0.forms();
        assert_eq!(forms.len(), 1);
        assert_eq!(*forms[0], &(&v(0) * &v(2)) - &(&v(1) * &v(1)));
        let fit1 = fitting_generators(&m, 2, 1).unwrap();
        assert_eq!(fit1.forms().len(), 3);
        for x in [v(0), v(1), v(2)] {
            assert!(fit1.contains_up_to_scalar(&x));
        }
        assert_eq!(fitting_generators(&m, 2, 2).unwrap().ideal, FittingIdeal::Unit);
        let tall = FormMatrix::from_rows(3, vec![vec![v(0)], vec![v(1)], vec![v(2)]]).unwrap();
        assert_eq!(fitting_generators(&tall, 3, 0).unwrap().ideal, FittingIdeal::Zero);
        assert!(fitting_generators(&m, 3, 0).is_err());
    }

    #[test]
    fn adjugate_worked_example() {
        let n = FormMatrix::from_rows(3, vec![vec![v(0), v(1), z()], vec![z(), v(0), v(1)]]).unwrap();
        let cert = adjugate_kernel(&n, 2, &[0, 1]).unwrap();
        assert_eq!(cert.selected_cols, vec![0, 1]);
        assert_eq!(cert.det_a, &v(0) * &v(0));
        assert_eq!(cert.kernel_vectors.len(), 1);
        let k = &cert.kernel_vectors[0];
        assert_eq!(k[0], &v(1) * &v(1));
        assert_eq!(k[1], -&(&v(0) * &v(1)));
        assert_eq!(k[2], &v(0) * &v(0));
        assert!(cert.verify(&n));
        assert!(cert.to_text(3).contains("deta 2 1:2,0,0"));
    }

    #[test]
    fn adjugate_square_and_singular() {
        let sq = FormMatrix::from_rows(3, vec![vec![v(0), v(1)], vec![v(1), v(2)]]).unwrap();
        let cert = adjugate_kernel(&sq, 2, &[0, 1]).unwrap();
        assert!(cert.kernel_vectors.is_empty());
        let sing = FormMatrix::from_rows(3, vec![vec![v(0), v(1)], vec![v(0), v(1)]]).unwrap();
        assert_eq!(adjugate_kernel(&sing, 2, &[0, 1]).unwrap_err(), Error::SingularSelection);
    }

    #[test]
    fn divisor_and_lct_formulas() {
        assert_eq!(fit_divisor_degree(3, 2, 2, 0).unwrap(), 4);
        assert_eq!(fit_divisor_degree(5, 1, 3, 0).unwrap(), 12);
        assert_eq!(fit_divisor_degree(4, 2, 6, 3).unwrap(), 0);
        assert!(fit_divisor_degree(2, 2, 1, 0).is_err());
        assert_eq!(lct_lower_bound(Rational::from_integer(1), 3, 2, 2).unwrap(), Rational::new(1, 4));
        assert_eq!(lct_lower_bound(Rational::from_integer(2), 5, 1, 3).unwrap(), Rational::new(1, 24));
        assert_eq!(
            lct_lower_bound(Rational::from_integer(6), 5, 1, 3).unwrap(),
            lct_lower_bound(Rational::from_integer(2), 5, 1, 3).unwrap() / 3
        );
        assert!(lct_lower_bound(Rational::from_integer(0), 3, 2, 2).is_err());
    }

    #[test]
    fn laplace_on_the_worked_example() {
        let n = FormMatrix::from_rows(3, vec![vec![v(0), v(1), z()], vec![z(), v(0), v(1)]]).unwrap();
        let ws = laplace_witnesses(&n, 1).unwrap();
        assert_eq!(ws.len(), 3);
        assert!(ws.iter().all(|w| w.verify(&n)));
    }
}
