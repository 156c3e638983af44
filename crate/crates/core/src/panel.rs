//! Slope panels: rank-length tuples of slopes compared in the sup norm.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::Rational;

/// Non-increasing tuple of exact slopes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SlopePanel(Vec<Rational>);

impl SlopePanel {
    /// Sorts the entries into non-increasing order.
    pub fn new(mut entries: Vec<Rational>) -> Self {
        entries.sort_by(|a, b| b.cmp(a));
        SlopePanel(entries)
    }

    pub fn from_integers(parts: &[i64]) -> Self {
        Self::new(parts.iter().map(|&p| Rational::from_integer(p)).collect())
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.0.iter().copied().sum()
    }
}

impl fmt::Display for SlopePanel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Rational::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Serialize for SlopePanel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let parts: Vec<String> = self.0.iter().map(Rational::to_string).collect();
        parts.serialize(s)
    }
}

/// Graded pieces `(rank, slope)` of a filtration, first subsheaf first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationData(pub Vec<(u32, Rational)>);

impl FiltrationData {
    pub fn total_rank(&self) -> u32 {
        self.0.iter().map(|(r, _)| r).sum()
    }

    pub fn single(rank: u32, slope: Rational) -> Self {
        FiltrationData(vec![(rank, slope)])
    }
}

/// A filtration panel in filtration order together with its sorted view.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationPanel {
    pub ordered: Vec<Rational>,
    pub sorted: SlopePanel,
}

pub fn panel_from_filtration(f: &FiltrationData) -> Result<FiltrationPanel> {
    if f.0.is_empty() {
        return Err(Error::InvalidInput("empty filtration".into()));
    }
    if f.0.iter().any(|(r, _)| *r == 0) {
        return Err(Error::InvalidInput("graded piece of rank zero".into()));
    }
    let ordered: Vec<Rational> = f
        .0
        .iter()
        .flat_map(|&(r, mu)| std::iter::repeat_n(mu, r as usize))
        .collect();
    Ok(FiltrationPanel {
        sorted: SlopePanel::new(ordered.clone()),
        ordered,
    })
}

pub fn sup_distance(p: &SlopePanel, q: &SlopePanel) -> Result<Rational> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch(p.len(), q.len()));
    }
    Ok(p.0
        .iter()
        .zip(&q.0)
        .map(|(a, b)| (a - b).abs())
        .max()
        .unwrap_or_else(Rational::zero))
}

/// Panel against `d` times the line class: every slope scaled by `d`.
pub fn expected_panel(hn: &FiltrationData, d: u32) -> Result<SlopePanel> {
    if d == 0 {
        return Err(Error::InvalidInput("curve degree must be positive".into()));
    }
    let p = panel_from_filtration(hn)?;
    Ok(SlopePanel::new(
        p.ordered
            .into_iter()
            .map(|mu| mu * Rational::from_integer(d as i64))
            .collect(),
    ))
}

/// Prefix sums of `dominant` bound those of `other` from above, with equal
/// totals. `other` is taken in the order given, so it may be a filtration
/// panel in filtration order.
pub fn majorizes(dominant: &[Rational], other: &[Rational]) -> Result<bool> {
    if dominant.len() != other.len() {
        return Err(Error::LengthMismatch(dominant.len(), other.len()));
    }
    let mut a = Rational::zero();
    let mut b = Rational::zero();
    for (x, y) in dominant.iter().zip(other) {
        a += x;
        b += y;
        if a < b {
            return Ok(false);
        }
    }
    Ok(a == b)
}

pub fn majorization_check(hn_panel: &SlopePanel, other: &SlopePanel) -> Result<bool> {
    majorizes(&hn_panel.0, &other.0)
}

/// Checks `|Σa' - Σa| / Σb <= max |a'_i - a_i| / b_i` over `(a, a', b)`.
pub fn mediant_check(pairs: &[(i64, i64, i64)]) -> Result<bool> {
    if pairs.iter().any(|&(_, _, b)| b <= 0) {
        return Err(Error::InvalidInput("denominators must be positive".into()));
    }
    if pairs.is_empty() {
        return Ok(true);
    }
    let (sa, sa2, sb) = pairs.iter().fold((0i64, 0i64, 0i64), |acc, &(a, a2, b)| {
        (acc.0 + a, acc.1 + a2, acc.2 + b)
    });
    let lhs = Rational::new((sa2 - sa).abs(), sb);
    let rhs = pairs
        .iter()
        .map(|&(a, a2, b)| Rational::new((a2 - a).abs(), b))
        .max()
        .expect("non-empty");
    Ok(lhs <= rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn filtration_panels() {
        let p = panel_from_filtration(&FiltrationData(vec![(2, q(3, 2))])).unwrap();
        assert_eq!(p.ordered, vec![q(3, 2), q(3, 2)]);
        let p = panel_from_filtration(&FiltrationData(vec![(1, q(1, 1)), (1, q(2, 1))])).unwrap();
        assert_eq!(p.ordered, vec![q(1, 1), q(2, 1)]);
        assert_eq!(p.sorted, SlopePanel::from_integers(&[2, 1]));
        assert!(panel_from_filtration(&FiltrationData(vec![])).is_err());
    }

    #[test]
    fn distances() {
        let a = SlopePanel::from_integers(&[2, 1]);
        assert_eq!(sup_distance(&a, &a).unwrap(), q(0, 1));
        let b = SlopePanel::new(vec![q(3, 2), q(3, 2)]);
        assert_eq!(sup_distance(&a, &b).unwrap(), q(1, 2));
        let c = SlopePanel::from_integers(&[4, 2]);
        let d = SlopePanel::from_integers(&[3, 3]);
        assert_eq!(sup_distance(&c, &d).unwrap(), q(1, 1));
        assert!(sup_distance(&a, &SlopePanel::from_integers(&[1])).is_err());
    }

    #[test]
    fn expected_panels() {
        let stable = FiltrationData::single(2, q(3, 2));
        assert_eq!(expected_panel(&stable, 2).unwrap(), SlopePanel::from_integers(&[3, 3]));
        assert_eq!(
            expected_panel(&stable, 1).unwrap(),
            SlopePanel::new(vec![q(3, 2), q(3, 2)])
        );
        let unstable = FiltrationData(vec![(1, q(2, 1)), (1, q(1, 1))]);
        assert_eq!(expected_panel(&unstable, 3).unwrap(), SlopePanel::from_integers(&[6, 3]));
    }

    #[test]
    fn majorization_examples() {
        let a = SlopePanel::from_integers(&[3, 1]);
        let b = SlopePanel::from_integers(&[2, 2]);
        assert!(majorization_check(&a, &b).unwrap());
        assert!(!majorization_check(&b, &a).unwrap());
        assert!(majorization_check(&a, &a).unwrap());
    }

    #[test]
    fn mediant_examples() {
        assert!(mediant_check(&[(1, 4, 3)]).unwrap());
        assert!(mediant_check(&[(1, 1, 3), (5, 5, 2)]).unwrap());
        assert!(mediant_check(&[(1, 1, 0)]).is_err());
    }
}
