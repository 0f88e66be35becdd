use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::constants::check_eta;
use crate::error::{Error, Result};

const ORDER_EPS: f64 = 1e-12;

/// Growth order `n^p log(n)^q`, compared lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Order {
    pub p: f64,
    pub q: f64,
}

impl Order {
    pub const ONE: Order = Order { p: 0.0, q: 0.0 };

    pub fn new(p: f64, q: f64) -> Self {
        Order { p, q }
    }

    pub fn cmp_order(self, other: Order) -> Ordering {
        let cmp = |a: f64, b: f64| {
            if (a - b).abs() <= ORDER_EPS {
                Ordering::Equal
            } else {
                a.total_cmp(&b)
            }
        };
        cmp(self.p, other.p).then(cmp(self.q, other.q))
    }

    pub fn scale(self, s: f64) -> Order {
        Order::new(self.p * s, self.q * s)
    }

    pub fn plus(self, o: Order) -> Order {
        Order::new(self.p + o.p, self.q + o.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coef: f64,
    pub order: Order,
}

/// A finite sum of terms `α n^p log(n)^q`.
///
/// Parsed from strings such as `n^0.6`, `2*sqrt(n)*log(n)`,
/// `n^0.8 + n^0.5` or `3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthExpr {
    terms: Vec<Term>,
}

impl GrowthExpr {
    pub fn term(coef: f64, p: f64, q: f64) -> Self {
        GrowthExpr::from_terms(vec![Term {
            coef,
            order: Order::new(p, q),
        }])
    }

    /// Merges terms of equal order and drops cancelled ones.
    pub fn from_terms(terms: Vec<Term>) -> Self {
        let mut merged: Vec<Term> = Vec::new();
        for t in terms {
            match merged
                .iter_mut()
                .find(|m| m.order.cmp_order(t.order) == Ordering::Equal)
            {
                Some(m) => m.coef += t.coef,
                None => merged.push(t),
            }
        }
        let scale = merged.iter().fold(0.0f64, |a, t| a.max(t.coef.abs()));
        merged.retain(|t| t.coef.abs() > 1e-12 * scale);
        merged.sort_by(|a, b| b.order.cmp_order(a.order));
        GrowthExpr { terms: merged }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn eval(&self, n: f64) -> f64 {
        let log = n.ln();
        self.terms
            .iter()
            .map(|t| t.coef * n.powf(t.order.p) * log.powf(t.order.q))
            .sum()
    }

    /// The dominant term, if any.
    pub fn leading(&self) -> Option<Term> {
        self.terms.first().copied()
    }

    pub fn sub(&self, other: &GrowthExpr) -> GrowthExpr {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|t| Term {
            coef: -t.coef,
            order: t.order,
        }));
        GrowthExpr::from_terms(terms)
    }
}

impl fmt::Display for GrowthExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", t.coef)?;
            if t.order.p != 0.0 {
                write!(f, "*n^{}", t.order.p)?;
            }
            if t.order.q != 0.0 {
                write!(f, "*log(n)^{}", t.order.q)?;
            }
        }
        Ok(())
    }
}

fn parse_number(s: &str, whole: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse(format!("bad number `{s}` in growth expression `{whole}`")))
}

fn parse_factor(f: &str, whole: &str) -> Result<Term> {
    let f = f.trim();
    let (base, exp) = match f.split_once('^') {
        Some((b, e)) => (
            b.trim(),
            parse_number(e.trim_matches(|c| c == '(' || c == ')'), whole)?,
        ),
        None => (f, 1.0),
    };
    let order = match base {
        "n" => Order::new(exp, 0.0),
        "log(n)" | "ln(n)" => Order::new(0.0, exp),
        "sqrt(n)" => Order::new(0.5 * exp, 0.0),
        _ => {
            return Ok(Term {
                coef: parse_number(base, whole)?.powf(exp),
                order: Order::ONE,
            })
        }
    };
    Ok(Term { coef: 1.0, order })
}

impl FromStr for GrowthExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty growth expression".into()));
        }
        // Split on '+' / '-' that separate terms, not exponent signs.
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = compact.as_bytes();
        let mut pieces = Vec::new();
        for i in 1..bytes.len() {
            let c = bytes[i];
            if (c == b'+' || c == b'-') && !matches!(bytes[i - 1], b'^' | b'e' | b'E' | b'(' | b'*')
            {
                pieces.push(&compact[start..i]);
                start = i;
            }
        }
        pieces.push(&compact[start..]);
        for piece in pieces {
            let (sign, body) = match piece.as_bytes()[0] {
                b'+' => (1.0, &piece[1..]),
                b'-' => (-1.0, &piece[1..]),
                _ => (1.0, piece),
            };
            if body.is_empty() {
                return Err(Error::Parse(format!("dangling sign in `{s}`")));
            }
            let mut term = Term {
                coef: sign,
                order: Order::ONE,
            };
            for factor in body.split('*') {
                let t = parse_factor(factor, s)?;
                term.coef *= t.coef;
                term.order = term.order.plus(t.order);
            }
            terms.push(term);
        }
        Ok(GrowthExpr::from_terms(terms))
    }
}

/// The four sparse-regime cases for `B = (1/n) [[a, b], [b, a]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SparseCase {
    /// a and b both bounded.
    Bounded,
    /// b, a and a − b all of the same order.
    Proportional,
    /// b = o(a).
    WeakBetween,
    /// a − b = o(b).
    SmallDifference,
}

impl SparseCase {
    pub fn number(self) -> u8 {
        match self {
            SparseCase::Bounded => 1,
            SparseCase::Proportional => 2,
            SparseCase::WeakBetween => 3,
            SparseCase::SmallDifference => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseRow {
    pub n: f64,
    pub a: f64,
    pub b: f64,
    /// `min{b, (a−b)/2}`, which equals γn here.
    pub m: f64,
    /// `m² / (a+b)`
    pub a2_lhs: f64,
    /// `8 log(n/η)`
    pub a2_rhs: f64,
    pub a2_holds: bool,
    /// `√(a−b) m^{7/2} / (a+b)³`
    pub a1_lhs: f64,
    /// `127.5 √n log(n/η)`
    pub a1_rhs: f64,
    pub a1_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseRegimeReport {
    pub a: String,
    pub b: String,
    pub eta: f64,
    pub case: SparseCase,
    /// Eventual truth of the separation condition; `None` at the boundary
    /// where leading constants decide.
    pub predicted_a1: Option<bool>,
    /// Eventual truth of the eigengap condition.
    pub predicted_a2: Option<bool>,
    pub rows: Vec<SparseRow>,
}

/// Reduced eigengap and separation inequalities at one `n`.
pub fn sparse_row(a: f64, b: f64, n: f64, eta: f64) -> SparseRow {
    let m = b.min((a - b) / 2.0);
    let log = (n / eta).ln();
    let a2_lhs = m * m / (a + b);
    let a2_rhs = 8.0 * log;
    // Log space keeps m^3.5 from overflowing on very large grids.
    let a1_lhs = (0.5 * (a - b).ln() + 3.5 * m.ln() - 3.0 * (a + b).ln()).exp();
    let a1_rhs = 127.5 * n.sqrt() * log;
    SparseRow {
        n,
        a,
        b,
        m,
        a2_lhs,
        a2_rhs,
        a2_holds: a2_lhs > a2_rhs,
        a1_lhs,
        a1_rhs,
        a1_holds: a1_lhs > a1_rhs,
    }
}

fn prediction(lhs: Order, rhs: Order) -> Option<bool> {
    match lhs.cmp_order(rhs) {
        Ordering::Greater => Some(true),
        Ordering::Less => Some(false),
        Ordering::Equal => None,
    }
}

/// Classifies `(a, b)` and predicts the eventual truth of both conditions.
pub fn classify(
    a: &GrowthExpr,
    b: &GrowthExpr,
) -> Result<(SparseCase, Option<bool>, Option<bool>)> {
    let la = a.leading().filter(|t| t.coef > 0.0);
    let lb = b.leading().filter(|t| t.coef > 0.0);
    let ld = a.sub(b).leading().filter(|t| t.coef > 0.0);
    let (Some(la), Some(lb), Some(ld)) = (la, lb, ld) else {
        return Err(Error::param(
            "a, b",
            format!("{a}, {b}"),
            "need a > b > 0 eventually",
        ));
    };
    let (oa, ob, od) = (la.order, lb.order, ld.order);
    if oa.cmp_order(Order::ONE) != Ordering::Greater {
        return Ok((SparseCase::Bounded, Some(false), Some(false)));
    }
    let log1 = Order::new(0.0, 1.0);
    if ob.cmp_order(oa) == Ordering::Less {
        let a2 = prediction(ob.plus(oa.scale(-0.5)), Order::new(0.0, 0.5));
        let a1 = prediction(ob.scale(3.5).plus(oa.scale(-2.5)), Order::new(0.5, 1.0));
        return Ok((SparseCase::WeakBetween, a1, a2));
    }
    if od.cmp_order(ob) == Ordering::Less {
        let a2 = prediction(od, ob.plus(log1).scale(0.5));
        let a1 = prediction(od, ob.scale(0.75).plus(Order::new(0.125, 0.25)));
        return Ok((SparseCase::SmallDifference, a1, a2));
    }
    let a2 = prediction(ob, log1);
    let a1 = prediction(ob, Order::new(0.5, 1.0));
    Ok((SparseCase::Proportional, a1, a2))
}

/// Evaluates the reduced conditions for `B = (1/n) [[a, b], [b, a]]` with two
/// equal blocks on `n_grid`, and classifies the growth regime.
pub fn sparse_regime(
    a: &GrowthExpr,
    b: &GrowthExpr,
    n_grid: &[f64],
    eta: f64,
) -> Result<SparseRegimeReport> {
    check_eta(eta)?;
    let (case, predicted_a1, predicted_a2) = classify(a, b)?;
    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let (av, bv) = (a.eval(n), b.eval(n));
        if av.partial_cmp(&bv) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::param(
                "a",
                av,
                format!("need a > b = {bv} at n = {n}"),
            ));
        }
        if bv.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::param("b", bv, format!("need b > 0 at n = {n}")));
        }
        rows.push(sparse_row(av, bv, n, eta));
    }
    Ok(SparseRegimeReport {
        a: a.to_string(),
        b: b.to_string(),
        eta,
        case,
        predicted_a1,
        predicted_a2,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GrowthExpr {
        s.parse().unwrap()
    }

    #[test]
    fn parses_terms() {
        let e = g("2*n^0.5*log(n) + 3");
        assert!((e.eval(100.0) - (2.0 * 10.0 * 100f64.ln() + 3.0)).abs() < 1e-12);
        assert_eq!(g("sqrt(n)").leading().unwrap().order, Order::new(0.5, 0.0));
        assert_eq!(g("n^-0.5").leading().unwrap().order, Order::new(-0.5, 0.0));
        assert!("n^".parse::<GrowthExpr>().is_err());
        assert!("".parse::<GrowthExpr>().is_err());
    }

    #[test]
    fn difference_cancels_leading_terms() {
        let d = g("n^0.8 + n^0.5").sub(&g("n^0.8"));
        assert_eq!(d.terms().len(), 1);
        assert_eq!(d.leading().unwrap().order, Order::new(0.5, 0.0));
    }

    #[test]
    fn cases() {
        let c = |a: &str, b: &str| classify(&g(a), &g(b)).unwrap();
        assert_eq!(c("5", "2"), (SparseCase::Bounded, Some(false), Some(false)));
        assert_eq!(
            c("2*n^0.6", "n^0.6"),
            (SparseCase::Proportional, Some(true), Some(true))
        );
        assert_eq!(
            c("2*n^0.4", "n^0.4"),
            (SparseCase::Proportional, Some(false), Some(true))
        );
        assert_eq!(c("2*sqrt(n)*log(n)", "sqrt(n)*log(n)").1, None);
        assert_eq!(c("n^0.9", "n^0.2").0, SparseCase::WeakBetween);
        assert_eq!(c("n^0.9 + n^0.5", "n^0.9").0, SparseCase::SmallDifference);
    }

    #[test]
    fn rejects_a_not_above_b() {
        assert!(classify(&g("n^0.5"), &g("n^0.5")).is_err());
        assert!(sparse_regime(&g("n^0.5 + 1"), &g("n^0.6"), &[100.0], 0.05).is_err());
    }
}
