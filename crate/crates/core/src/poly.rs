//! Homogeneous forms in two (`s`, `t`) or three (`x`, `y`, `z`) variables.
//!
//! Coefficients are stored densely in graded lexicographic order with
//! `x > y > z` and `s > t`. For degree `n` in three variables the monomial
//! `x^a y^b z^c` sits at index `(b + c)(b + c + 1)/2 + c`; in two variables
//! `s^a t^b` sits at index `b`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::Field;

const NAMES_2: [&str; 2] = ["s", "t"];
const NAMES_3: [&str; 3] = ["x", "y", "z"];

pub fn basis_len(nvars: usize, degree: u32) -> usize {
    let n = degree as usize;
    match nvars {
        2 => n + 1,
        3 => (n + 1) * (n + 2) / 2,
        _ => panic!("only binary and ternary forms are supported"),
    }
}

/// Exponent vectors of all monomials of `degree`, in basis order.
pub fn hom_basis(nvars: usize, degree: u32) -> Vec<Vec<u32>> {
    match nvars {
        2 => (0..=degree).map(|b| vec![degree - b, b]).collect(),
        3 => {
            let mut out = Vec::with_capacity(basis_len(3, degree));
            for a in (0..=degree).rev() {
                for b in (0..=degree - a).rev() {
                    out.push(vec![a, b, degree - a - b]);
                }
            }
            out
        }
        _ => panic!("only binary and ternary forms are supported"),
    }
}

pub fn monomial_index(exps: &[u32]) -> usize {
    match exps.len() {
        2 => exps[1] as usize,
        3 => {
            let bc = (exps[1] + exps[2]) as usize;
            bc * (bc + 1) / 2 + exps[2] as usize
        }
        _ => panic!("only binary and ternary forms are supported"),
    }
}

#[derive(Clone)]
pub struct HomForm<F> {
    nvars: usize,
    degree: u32,
    coeffs: Vec<F>,
}

impl<F: Field> HomForm<F> {
    pub fn zero(nvars: usize, degree: u32) -> Self {
        HomForm {
            nvars,
            degree,
            coeffs: vec![F::zero(); basis_len(nvars, degree)],
        }
    }

    pub fn constant(nvars: usize, c: F) -> Self {
        HomForm {
            nvars,
            degree: 0,
            coeffs: vec![c],
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, F::one())
    }

    /// The coordinate function `i` (0 = x or s).
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(&e, F::one())
    }

    pub fn monomial(exps: &[u32], c: F) -> Self {
        let degree = exps.iter().sum();
        let mut f = Self::zero(exps.len(), degree);
        f.coeffs[monomial_index(exps)] = c;
        f
    }

    pub fn from_coeffs(nvars: usize, degree: u32, coeffs: Vec<F>) -> Result<Self> {
        if nvars != 2 && nvars != 3 {
            return Err(Error::InvalidInput(format!("{nvars} variables")));
        }
        if coeffs.len() != basis_len(nvars, degree) {
            return Err(Error::DegreeMismatch(format!(
                "{} coefficients for a degree {degree} form in {nvars} variables",
                coeffs.len()
            )));
        }
        Ok(HomForm {
            nvars,
            degree,
            coeffs,
        })
    }

    /// Build from `(coefficient, exponents)` terms; repeated monomials add.
    pub fn from_terms(nvars: usize, degree: u32, terms: &[(F, Vec<u32>)]) -> Result<Self> {
        let mut f = Self::zero(nvars, degree);
        for (c, e) in terms {
            if e.len() != nvars || e.iter().sum::<u32>() != degree {
                return Err(Error::DegreeMismatch(format!(
                    "monomial {e:?} in a degree {degree} form in {nvars} variables"
                )));
            }
            let i = monomial_index(e);
            f.coeffs[i] = f.coeffs[i].clone() + c.clone();
        }
        Ok(f)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coefficient_vector(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coefficient(&self, exps: &[u32]) -> F {
        self.coeffs[monomial_index(exps)].clone()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(F::is_zero)
    }

    /// Nonzero terms in basis order.
    pub fn terms(&self) -> Vec<(F, Vec<u32>)> {
        hom_basis(self.nvars, self.degree)
            .into_iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (c.clone(), e))
            .collect()
    }

    pub fn scale(&self, c: &F) -> Self {
        HomForm {
            nvars: self.nvars,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    /// Leading coefficient in the monomial order (first nonzero in basis order).
    pub fn leading_coefficient(&self) -> Option<F> {
        self.coeffs.iter().find(|c| !c.is_zero()).cloned()
    }

    pub fn monic(&self) -> Self {
        match self.leading_coefficient() {
            Some(lc) => self.scale(&lc.inv().expect("nonzero")),
            None => self.clone(),
        }
    }

    pub fn evaluate(&self, point: &[F]) -> F {
        assert_eq!(point.len(), self.nvars, "point dimension");
        // powers table per variable
        let powers: Vec<Vec<F>> = point
            .iter()
            .map(|p| {
                let mut v = Vec::with_capacity(self.degree as usize + 1);
                let mut acc = F::one();
                for _ in 0..=self.degree {
                    v.push(acc.clone());
                    acc = acc * p.clone();
                }
                v
            })
            .collect();
        let mut sum = F::zero();
        for (e, c) in hom_basis(self.nvars, self.degree).iter().zip(&self.coeffs) {
            if c.is_zero() {
                continue;
            }
            let mut term = c.clone();
            for (k, &ek) in e.iter().enumerate() {
                term = term * powers[k][ek as usize].clone();
            }
            sum = sum + term;
        }
        sum
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Replace each variable by the corresponding form. All substituted
    /// forms must share the same number of variables and the same degree;
    /// the result has degree `deg(sub) * deg(self)`. Substituting three
    /// binary forms realizes the pullback along a map P1 -> P2.
    pub fn substitute(&self, forms: &[HomForm<F>]) -> Result<Self> {
        if forms.len() != self.nvars {
            return Err(Error::DegreeMismatch(format!(
                "{} substitutions for {} variables",
                forms.len(),
                self.nvars
            )));
        }
        let target_vars = forms[0].nvars;
        let d = forms[0].degree;
        if forms.iter().any(|g| g.nvars != target_vars || g.degree != d) {
            return Err(Error::DegreeMismatch(
                "substituted forms must have equal degree".into(),
            ));
        }
        let n = self.degree;
        let powers: Vec<Vec<HomForm<F>>> = forms
            .iter()
            .map(|g| {
                let mut v = Vec::with_capacity(n as usize + 1);
                v.push(Self::one(target_vars));
                for k in 1..=n as usize {
                    let next = &v[k - 1] * g;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = Self::zero(target_vars, d * n);
        for (c, e) in self.terms() {
            let mut term = powers[0][e[0] as usize].scale(&c);
            for (k, &ek) in e.iter().enumerate().skip(1) {
                term = &term * &powers[k][ek as usize];
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Coefficients viewed as a polynomial in `t` (the `s = 1` chart),
    /// trailing zeros trimmed.
    fn t_chart(&self) -> Vec<F> {
        assert_eq!(self.nvars, 2);
        let mut v = self.coeffs.clone();
        while v.last().is_some_and(F::is_zero) {
            v.pop();
        }
        v
    }

    /// Exact quotient of binary forms, `None` when `other` does not divide.
    pub fn div_exact(&self, other: &HomForm<F>) -> Option<Self> {
        assert!(self.nvars == 2 && other.nvars == 2, "binary forms only");
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return (self.degree >= other.degree)
                .then(|| Self::zero(2, self.degree - other.degree));
        }
        if other.degree > self.degree {
            return None;
        }
        let (q, r) = uni_divrem(&self.t_chart(), &other.t_chart());
        if !r.is_empty() {
            return None;
        }
        let qdeg = self.degree - other.degree;
        if q.len() > qdeg as usize + 1 {
            // divisible in the t-chart only; the s-multiplicity is too small
            return None;
        }
        let mut coeffs = q;
        coeffs.resize(qdeg as usize + 1, F::zero());
        Some(HomForm {
            nvars: 2,
            degree: qdeg,
            coeffs,
        })
    }
}

/// Monic greatest common divisor of two binary forms.
///
/// The `s = 1` chart handles every factor except powers of `s`, whose
/// multiplicity is read off the `t = 1` chart as the drop in degree.
pub fn hom_gcd<F: Field>(f: &HomForm<F>, g: &HomForm<F>) -> Result<HomForm<F>> {
    if f.nvars != 2 || g.nvars != 2 {
        return Err(Error::InvalidInput("hom_gcd needs binary forms".into()));
    }
    match (f.is_zero(), g.is_zero()) {
        (true, true) => return Err(Error::Degenerate("gcd of two zero forms".into())),
        (true, false) => return Ok(g.monic()),
        (false, true) => return Ok(f.monic()),
        _ => {}
    }
    let pf = f.t_chart();
    let pg = g.t_chart();
    let s_mult_f = f.degree as usize + 1 - pf.len();
    let s_mult_g = g.degree as usize + 1 - pg.len();
    let s_mult = s_mult_f.min(s_mult_g);
    let common = uni_gcd(pf, pg);
    let degree = (common.len() - 1 + s_mult) as u32;
    let mut coeffs = common;
    coeffs.resize(degree as usize + 1, F::zero());
    Ok(HomForm {
        nvars: 2,
        degree,
        coeffs,
    }
    .monic())
}

/// gcd of an arbitrary list of binary forms (zero forms are skipped).
pub fn hom_gcd_all<'a, F: Field>(
    forms: impl IntoIterator<Item = &'a HomForm<F>>,
) -> Result<HomForm<F>> {
    let mut acc: Option<HomForm<F>> = None;
    for f in forms {
        if f.is_zero() {
            continue;
        }
        acc = Some(match acc {
            None => f.monic(),
            Some(a) => {
                let g = hom_gcd(&a, f)?;
                if g.degree == 0 {
                    return Ok(g);
                }
                g
            }
        });
    }
    acc.ok_or_else(|| Error::Degenerate("gcd of zero forms".into()))
}

fn uni_trim<F: Field>(v: &mut Vec<F>) {
    while v.last().is_some_and(F::is_zero) {
        v.pop();
    }
}

fn uni_divrem<F: Field>(a: &[F], b: &[F]) -> (Vec<F>, Vec<F>) {
    let mut r = a.to_vec();
    uni_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = b[db].inv().expect("nonzero divisor");
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![F::zero(); r.len() - db];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = r[r.len() - 1].clone() * lead_inv.clone();
        for (i, bi) in b.iter().enumerate() {
            r[k + i] = r[k + i].clone() - c.clone() * bi.clone();
        }
        q[k] = c;
        r.pop();
        uni_trim(&mut r);
    }
    (q, r)
}

fn uni_gcd<F: Field>(mut a: Vec<F>, mut b: Vec<F>) -> Vec<F> {
    uni_trim(&mut a);
    uni_trim(&mut b);
    while !b.is_empty() {
        let (_, r) = uni_divrem(&a, &b);
        a = b;
        b = r;
    }
    let inv = a.last().expect("nonzero").inv().expect("nonzero");
    a.into_iter().map(|c| c * inv.clone()).collect()
}

impl<F: Field> PartialEq for HomForm<F> {
    fn eq(&self, other: &Self) -> bool {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => true,
            (false, false) => {
                self.nvars == other.nvars
                    && self.degree == other.degree
                    && self.coeffs == other.coeffs
            }
            _ => false,
        }
    }
}

impl<F: Field> Add for &HomForm<F> {
    type Output = HomForm<F>;
    fn add(self, rhs: &HomForm<F>) -> HomForm<F> {
        assert_eq!(self.nvars, rhs.nvars, "adding forms in different rings");
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        assert_eq!(self.degree, rhs.degree, "adding forms of different degree");
        HomForm {
            nvars: self.nvars,
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<F: Field> Neg for &HomForm<F> {
    type Output = HomForm<F>;
    fn neg(self) -> HomForm<F> {
        HomForm {
            nvars: self.nvars,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|a| -a.clone()).collect(),
        }
    }
}

impl<F: Field> Sub for &HomForm<F> {
    type Output = HomForm<F>;
    fn sub(self, rhs: &HomForm<F>) -> HomForm<F> {
        self + &(-rhs)
    }
}

impl<F: Field> Mul for &HomForm<F> {
    type Output = HomForm<F>;
    fn mul(self, rhs: &HomForm<F>) -> HomForm<F> {
        assert_eq!(self.nvars, rhs.nvars, "multiplying forms in different rings");
        let degree = self.degree + rhs.degree;
        let mut out = HomForm::zero(self.nvars, degree);
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        if self.nvars == 2 {
            for (i, a) in self.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in rhs.coeffs.iter().enumerate() {
                    out.coeffs[i + j] = out.coeffs[i + j].clone() + a.clone() * b.clone();
                }
            }
            return out;
        }
        let lhs_terms = self.terms();
        let rhs_terms = rhs.terms();
        for (a, ea) in &lhs_terms {
            for (b, eb) in &rhs_terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let k = monomial_index(&e);
                out.coeffs[k] = out.coeffs[k].clone() + a.clone() * b.clone();
            }
        }
        out
    }
}

impl<F: Field> fmt::Display for HomForm<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        let names: &[&str] = if self.nvars == 2 { &NAMES_2 } else { &NAMES_3 };
        let rendered: Vec<String> = terms
            .iter()
            .map(|(c, e)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| {
                        if k == 1 {
                            names[i].to_string()
                        } else {
                            format!("{}^{}", names[i], k)
                        }
                    })
                    .collect();
                match (mono.is_empty(), c.is_one()) {
                    (true, _) => c.to_string(),
                    (false, true) => mono.join("*"),
                    (false, false) => format!("{}*{}", c, mono.join("*")),
                }
            })
            .collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

impl<F: Field> fmt::Debug for HomForm<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HomForm[{}](", self.degree)?;
        fmt::Display::fmt(self, f)?;
        write!(f, ")")
    }
}
