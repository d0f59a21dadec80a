//! Exact Laurent polynomial arithmetic in one variable.
//!
//! `Laurent<C>` is a sparse map from integer exponents to coefficients with no
//! stored zeros. The default scalar of the whole crate is `LaurentPoly =
//! Laurent<BigInt>`, read as a polynomial in `v`. Invariants of punctured
//! surfaces only depend on `q = v^-2`; the [`QView`] wrapper re-expresses an
//! even-support polynomial in `q` and carries the coefficient analyzers
//! (positivity, symmetry, log-concavity).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    /// A `v`-polynomial with an odd exponent has no expression in `q = v^-2`.
    #[error("odd exponent {0} has no q-view (q = v^-2)")]
    OddExponent(i64),
    /// Laurent polynomials cannot be evaluated at zero.
    #[error("evaluation point must be nonzero")]
    ZeroPoint,
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
    /// The polynomial is not an integer polynomial in `v^-1 - v`.
    #[error("polynomial is not an integer polynomial in v^-1 - v")]
    NotXiPolynomial,
}

/// Coefficient ring interface. Implemented by `BigInt`, `BigRational` and the
/// real number-field elements used for non-crystallographic types.
pub trait Coeff:
    Clone + PartialEq + fmt::Debug + Zero + One + Neg<Output = Self> + Sub<Output = Self>
{
    /// Rendering used by the canonical printer; `None` means the coefficient
    /// has no plain sign and is printed in parentheses.
    fn fmt_parts(&self) -> (Option<bool>, String);
}

/// Coefficients with an exactly decidable sign (for the analyzers).
pub trait SignedCoeff: Coeff {
    /// -1, 0 or +1.
    fn sign(&self) -> i8;
}

/// Coefficients forming a field.
pub trait FieldCoeff: Coeff {
    fn inv(&self) -> Self;
}

impl Coeff for BigInt {
    fn fmt_parts(&self) -> (Option<bool>, String) {
        (Some(self.is_negative()), self.abs().to_string())
    }
}

impl SignedCoeff for BigInt {
    fn sign(&self) -> i8 {
        match self.cmp(&BigInt::zero()) {
            std::cmp::Ordering::Less => -1,
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Greater => 1,
        }
    }
}

impl Coeff for BigRational {
    fn fmt_parts(&self) -> (Option<bool>, String) {
        (Some(self.is_negative()), self.abs().to_string())
    }
}

impl SignedCoeff for BigRational {
    fn sign(&self) -> i8 {
        match self.cmp(&BigRational::zero()) {
            std::cmp::Ordering::Less => -1,
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Greater => 1,
        }
    }
}

impl FieldCoeff for BigRational {
    fn inv(&self) -> Self {
        self.recip()
    }
}

/// Sparse exact Laurent polynomial; no zero coefficients are ever stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Laurent<C: Coeff> {
    terms: BTreeMap<i64, C>,
}

impl<C: Coeff> Eq for Laurent<C> {}

/// The scalar ring of the crate: integer Laurent polynomials in `v`.
pub type LaurentPoly = Laurent<BigInt>;

impl<C: Coeff> Default for Laurent<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> Laurent<C> {
    pub fn zero() -> Self {
        Laurent {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial(0, C::one())
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(exp: i64, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Laurent { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, C)>>(iter: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in iter {
            p.add_term(e, &c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn coeff(&self, exp: i64) -> C {
        self.terms.get(&exp).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn add_term(&mut self, exp: i64, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(cur) => {
                let sum = cur.clone() + c.clone();
                if sum.is_zero() {
                    self.terms.remove(&exp);
                } else {
                    *cur = sum;
                }
            }
            None => {
                self.terms.insert(exp, c.clone());
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (e, c) in &other.terms {
            self.add_term(*e, c);
        }
    }

    pub fn sub_assign(&mut self, other: &Self) {
        for (e, c) in &other.terms {
            self.add_term(*e, &(-c.clone()));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r.add_assign(other);
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut r = self.clone();
        r.sub_assign(other);
        r
    }

    pub fn neg(&self) -> Self {
        Laurent {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut r = Self::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                r.add_term(e1 + e2, &(c1.clone() * c2.clone()));
            }
        }
        r
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (e, x) in &self.terms {
            out.add_term(*e, &(x.clone() * c.clone()));
        }
        out
    }

    /// Multiply by the monomial `var^shift`.
    pub fn shift(&self, shift: i64) -> Self {
        Laurent {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e + shift, c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, n: u64) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// The involution `var -> var^-1` (exponent negation).
    pub fn bar(&self) -> Self {
        Laurent {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Coefficient sequence over the contiguous exponent range of the
    /// support, lowest exponent first; internal gaps appear as zeros.
    pub fn coeff_sequence(&self) -> Vec<C> {
        match (self.min_exp(), self.max_exp()) {
            (Some(lo), Some(hi)) => (lo..=hi).map(|e| self.coeff(e)).collect(),
            _ => Vec::new(),
        }
    }

    pub fn map_coeffs<D: Coeff, F: Fn(&C) -> D>(&self, f: F) -> Laurent<D> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let d = f(c);
            if !d.is_zero() {
                terms.insert(*e, d);
            }
        }
        Laurent { terms }
    }
}

impl<C: FieldCoeff> Laurent<C> {
    /// Exact division; `None` when the divisor does not divide exactly.
    pub fn div_exact(&self, den: &Self) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let a_lo = self.min_exp().unwrap();
        let d_lo = den.min_exp().unwrap();
        let mut rem = self.shift(-a_lo);
        let dpoly = den.shift(-d_lo);
        let dtop = dpoly.max_exp().unwrap();
        let dlead_inv = dpoly.coeff(dtop).inv();
        let mut quot = Self::zero();
        while !rem.is_zero() {
            let rtop = rem.max_exp().unwrap();
            if rtop < dtop {
                return None;
            }
            let c = rem.coeff(rtop) * dlead_inv.clone();
            let k = rtop - dtop;
            quot.add_term(k, &c);
            rem.sub_assign(&dpoly.shift(k).scale(&c));
        }
        Some(quot.shift(a_lo - d_lo))
    }
}

impl LaurentPoly {
    /// `c * v^exp` from machine integers.
    pub fn term(exp: i64, c: i64) -> Self {
        Self::monomial(exp, BigInt::from(c))
    }

    pub fn from_pairs(pairs: &[(i64, i64)]) -> Self {
        Self::from_terms(pairs.iter().map(|&(e, c)| (e, BigInt::from(c))))
    }

    /// The q-view of an even-support polynomial in `v`, via `q = v^-2`.
    pub fn to_q_view(&self) -> Result<QView<BigInt>, LaurentError> {
        QView::from_v_poly(self)
    }

    /// Exact evaluation at a nonzero rational point.
    pub fn evaluate(&self, point: &BigRational) -> Result<BigRational, LaurentError> {
        evaluate_terms(self.terms(), point)
    }

    /// Expand as an integer polynomial in `xi = v^-1 - v`; returns the
    /// coefficients of `xi^0, xi^1, ...`.
    pub fn expand_in_xi(&self) -> Result<Vec<BigInt>, LaurentError> {
        let xi = LaurentPoly::from_pairs(&[(-1, 1), (1, -1)]);
        let mut rest = self.clone();
        let mut out: Vec<BigInt> = Vec::new();
        while !rest.is_zero() {
            let lo = rest.min_exp().unwrap();
            if lo > 0 {
                return Err(LaurentError::NotXiPolynomial);
            }
            let m = (-lo) as usize;
            let a = rest.coeff(lo);
            if out.len() <= m {
                out.resize(m + 1, BigInt::zero());
            }
            out[m] += &a;
            rest.sub_assign(&xi.pow(m as u64).scale(&a));
            if let Some(new_lo) = rest.min_exp() {
                // Each step strictly raises the lowest exponent.
                debug_assert!(new_lo > lo);
            }
            if rest.max_exp().map(|h| h > m as i64).unwrap_or(false) {
                return Err(LaurentError::NotXiPolynomial);
            }
        }
        Ok(out)
    }
}

fn evaluate_terms<'a, I>(terms: I, point: &BigRational) -> Result<BigRational, LaurentError>
where
    I: Iterator<Item = (i64, &'a BigInt)>,
{
    if point.is_zero() {
        return Err(LaurentError::ZeroPoint);
    }
    let mut acc = BigRational::zero();
    for (e, c) in terms {
        let p = rational_pow(point, e);
        acc += BigRational::from(c.clone()) * p;
    }
    Ok(acc)
}

pub(crate) fn rational_pow(x: &BigRational, e: i64) -> BigRational {
    if e == 0 {
        return BigRational::one();
    }
    let mut base = if e < 0 { x.recip() } else { x.clone() };
    let mut n = e.unsigned_abs();
    let mut acc = BigRational::one();
    while n > 0 {
        if n & 1 == 1 {
            acc *= &base;
        }
        n >>= 1;
        if n > 0 {
            base = base.clone() * &base;
        }
    }
    acc
}

/// Analyzer report for a coefficient sequence in `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoeffReport {
    /// Every coefficient on the support is strictly positive.
    pub is_positive: bool,
    /// The coefficient sequence over the contiguous support reads the same
    /// reversed.
    pub is_bar_symmetric: bool,
    /// `a_i^2 >= a_{i-1} a_{i+1}` over the contiguous support; an internal
    /// zero between nonzeros fails.
    pub is_log_concave: bool,
}

/// A Laurent polynomial in `q = v^-2`, obtained from an even-support
/// `v`-polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct QView<C: Coeff> {
    inner: Laurent<C>,
}

impl<C: Coeff> Eq for QView<C> {}

pub type QPoly = QView<BigInt>;

impl<C: Coeff> QView<C> {
    pub fn zero() -> Self {
        QView {
            inner: Laurent::zero(),
        }
    }

    pub fn one() -> Self {
        QView {
            inner: Laurent::one(),
        }
    }

    /// Build directly from terms in `q`.
    pub fn from_q_terms<I: IntoIterator<Item = (i64, C)>>(iter: I) -> Self {
        QView {
            inner: Laurent::from_terms(iter),
        }
    }

    pub fn from_q_laurent(inner: Laurent<C>) -> Self {
        QView { inner }
    }

    pub fn from_v_poly(p: &Laurent<C>) -> Result<Self, LaurentError> {
        let mut terms = BTreeMap::new();
        for (e, c) in p.terms() {
            if e % 2 != 0 {
                return Err(LaurentError::OddExponent(e));
            }
            terms.insert(-e / 2, c.clone());
        }
        Ok(QView {
            inner: Laurent { terms },
        })
    }

    /// Embed back as a `v`-polynomial via `q = v^-2`.
    pub fn to_v_poly(&self) -> Laurent<C> {
        Laurent {
            terms: self
                .inner
                .terms()
                .map(|(e, c)| (-2 * e, c.clone()))
                .collect(),
        }
    }

    pub fn as_laurent(&self) -> &Laurent<C> {
        &self.inner
    }

    pub fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    pub fn coeff(&self, exp: i64) -> C {
        self.inner.coeff(exp)
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.inner.min_exp()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.inner.max_exp()
    }

    pub fn add(&self, other: &Self) -> Self {
        QView {
            inner: self.inner.add(&other.inner),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        QView {
            inner: self.inner.sub(&other.inner),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        QView {
            inner: self.inner.mul(&other.inner),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        QView {
            inner: self.inner.scale(c),
        }
    }

    pub fn shift(&self, k: i64) -> Self {
        QView {
            inner: self.inner.shift(k),
        }
    }

    pub fn pow(&self, n: u64) -> Self {
        QView {
            inner: self.inner.pow(n),
        }
    }

    /// `q -> q^-1`.
    pub fn bar(&self) -> Self {
        QView {
            inner: self.inner.bar(),
        }
    }

    pub fn map_coeffs<D: Coeff, F: Fn(&C) -> D>(&self, f: F) -> QView<D> {
        QView {
            inner: self.inner.map_coeffs(f),
        }
    }
}

impl<C: SignedCoeff> QView<C> {
    pub fn analyze(&self) -> CoeffReport {
        let seq = self.inner.coeff_sequence();
        if seq.is_empty() {
            return CoeffReport {
                is_positive: true,
                is_bar_symmetric: true,
                is_log_concave: true,
            };
        }
        let n = seq.len();
        let is_positive = seq.iter().all(|c| c.sign() > 0);
        let is_bar_symmetric = (0..n).all(|i| seq[i] == seq[n - 1 - i]);
        let mut is_log_concave = true;
        for i in 1..n.saturating_sub(1) {
            let lhs = seq[i].clone() * seq[i].clone();
            let rhs = seq[i - 1].clone() * seq[i + 1].clone();
            if (lhs - rhs).sign() < 0 {
                is_log_concave = false;
                break;
            }
        }
        CoeffReport {
            is_positive,
            is_bar_symmetric,
            is_log_concave,
        }
    }
}

impl QPoly {
    pub fn from_pairs(pairs: &[(i64, i64)]) -> Self {
        Self::from_q_terms(pairs.iter().map(|&(e, c)| (e, BigInt::from(c))))
    }

    pub fn evaluate(&self, point: &BigRational) -> Result<BigRational, LaurentError> {
        evaluate_terms(self.inner.terms(), point)
    }

    /// Value at `q = 1`: the coefficient sum.
    pub fn value_at_one(&self) -> BigInt {
        let mut s = BigInt::zero();
        for (_, c) in self.inner.terms() {
            s += c;
        }
        s
    }
}

// ---------------------------------------------------------------------------
// Canonical printing and parsing.
//
// Terms in strictly decreasing exponent order, explicit "+"/"-", exponent 0
// printed as a constant, coefficient 1 suppressed:
//   "q^3 + 2*q^2 + 10*q + 10 + 10*q^-1 + 2*q^-2 + q^-3"
// ---------------------------------------------------------------------------

pub(crate) fn format_laurent<C: Coeff>(
    p: &Laurent<C>,
    var: char,
    f: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    if p.is_zero() {
        return write!(f, "0");
    }
    // Terms run in decreasing q-degree: descending exponents for q, and
    // ascending exponents for v (q = v^-2 reverses the direction).
    let order: Vec<(&i64, &C)> = if var == 'v' {
        p.terms.iter().collect()
    } else {
        p.terms.iter().rev().collect()
    };
    let mut first = true;
    for (e, c) in order {
        let (sign, body) = c.fmt_parts();
        let neg = sign.unwrap_or(false);
        if first {
            if neg {
                write!(f, "-")?;
            }
            first = false;
        } else if neg {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        let coeff_is_one = body == "1";
        match (*e, coeff_is_one) {
            (0, _) => write!(f, "{}", body)?,
            (1, true) => write!(f, "{}", var)?,
            (1, false) => write!(f, "{}*{}", body, var)?,
            (_, true) => write!(f, "{}^{}", var, e)?,
            (_, false) => write!(f, "{}*{}^{}", body, var, e)?,
        }
    }
    Ok(())
}

/// Adapter displaying a Laurent polynomial in a chosen variable letter.
pub struct DisplayIn<'a, C: Coeff>(pub &'a Laurent<C>, pub char);


impl<C: Coeff> fmt::Display for DisplayIn<'_, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        format_laurent(self.0, self.1, f)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        format_laurent(self, 'v', f)
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        format_laurent(&self.inner, 'q', f)
    }
}

impl fmt::Display for QView<crate::numfield::NfElem> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        format_laurent(&self.inner, 'q', f)
    }
}

/// Parse the canonical text format. Returns the polynomial together with the
/// variable letter that appeared (`None` for pure constants).
pub fn parse_poly(s: &str) -> Result<(Laurent<BigInt>, Option<char>), LaurentError> {
    let mut p = Laurent::zero();
    let mut var_seen: Option<char> = None;
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(LaurentError::Parse("empty input".into()));
    }
    let bytes = compact.as_bytes();
    let mut i = 0usize;
    let mut sign = 1i64;
    if bytes[i] == b'+' {
        i += 1;
    } else if bytes[i] == b'-' {
        sign = -1;
        i += 1;
    }
    while i < bytes.len() {
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let coeff: BigInt = if start == i {
            BigInt::one()
        } else {
            compact[start..i]
                .parse()
                .map_err(|_| LaurentError::Parse(format!("bad coefficient in {compact:?}")))?
        };
        let mut exp: i64 = 0;
        let mut has_var = false;
        if i < bytes.len() && bytes[i] == b'*' {
            i += 1;
            if i >= bytes.len() {
                return Err(LaurentError::Parse("dangling '*'".into()));
            }
        }
        if i < bytes.len() && (bytes[i] == b'v' || bytes[i] == b'q') {
            let v = bytes[i] as char;
            match var_seen {
                None => var_seen = Some(v),
                Some(prev) if prev != v => {
                    return Err(LaurentError::Parse(format!(
                        "mixed variables {prev} and {v}"
                    )))
                }
                _ => {}
            }
            has_var = true;
            exp = 1;
            i += 1;
            if i < bytes.len() && bytes[i] == b'^' {
                i += 1;
                let estart = i;
                if i < bytes.len() && bytes[i] == b'-' {
                    i += 1;
                }
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if estart == i || (i == estart + 1 && bytes[estart] == b'-') {
                    return Err(LaurentError::Parse("missing exponent".into()));
                }
                exp = compact[estart..i]
                    .parse()
                    .map_err(|_| LaurentError::Parse("bad exponent".into()))?;
            }
        }
        if start == i && !has_var {
            return Err(LaurentError::Parse(format!(
                "unexpected character at {i} in {compact:?}"
            )));
        }
        p.add_term(exp, &(coeff * BigInt::from(sign)));
        if i < bytes.len() {
            match bytes[i] {
                b'+' => {
                    sign = 1;
                    i += 1;
                }
                b'-' => {
                    sign = -1;
                    i += 1;
                }
                _ => {
                    return Err(LaurentError::Parse(format!(
                        "expected '+' or '-' at {i} in {compact:?}"
                    )))
                }
            }
            if i >= bytes.len() {
                return Err(LaurentError::Parse("trailing sign".into()));
            }
        }
    }
    Ok((p, var_seen))
}

impl FromStr for LaurentPoly {
    type Err = LaurentError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (p, var) = parse_poly(s)?;
        match var {
            Some('q') => Err(LaurentError::Parse("expected variable v, got q".into())),
            _ => Ok(p),
        }
    }
}

impl FromStr for QPoly {
    type Err = LaurentError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (p, var) = parse_poly(s)?;
        match var {
            Some('v') => Err(LaurentError::Parse("expected variable q, got v".into())),
            _ => Ok(QView { inner: p }),
        }
    }
}

// ---------------------------------------------------------------------------
// JSON form: {"var":"q"|"v","terms":[{"exp":int,"coef":"decimal-string"},...]}
// with terms sorted by decreasing exponent.
// ---------------------------------------------------------------------------

pub fn poly_to_json(p: &Laurent<BigInt>, var: &str) -> serde_json::Value {
    let terms: Vec<serde_json::Value> = p
        .terms
        .iter()
        .rev()
        .map(|(e, c)| serde_json::json!({"exp": e, "coef": c.to_string()}))
        .collect();
    serde_json::json!({"var": var, "terms": terms})
}

pub fn poly_from_json(
    value: &serde_json::Value,
) -> Result<(Laurent<BigInt>, String), LaurentError> {
    let var = value
        .get("var")
        .and_then(|v| v.as_str())
        .ok_or_else(|| LaurentError::Parse("missing \"var\"".into()))?;
    if var != "q" && var != "v" {
        return Err(LaurentError::Parse(format!("unknown variable {var:?}")));
    }
    let terms = value
        .get("terms")
        .and_then(|t| t.as_array())
        .ok_or_else(|| LaurentError::Parse("missing \"terms\"".into()))?;
    let mut p = Laurent::zero();
    for t in terms {
        let exp = t
            .get("exp")
            .and_then(|e| e.as_i64())
            .ok_or_else(|| LaurentError::Parse("missing term \"exp\"".into()))?;
        let coef = t
            .get("coef")
            .and_then(|c| c.as_str())
            .ok_or_else(|| LaurentError::Parse("missing term \"coef\"".into()))?;
        let c: BigInt = coef
            .parse()
            .map_err(|_| LaurentError::Parse(format!("bad coefficient {coef:?}")))?;
        p.add_term(exp, &c);
    }
    Ok((p, var.to_string()))
}

impl LaurentPoly {
    pub fn to_json(&self) -> serde_json::Value {
        poly_to_json(self, "v")
    }
}

impl QPoly {
    pub fn to_json(&self) -> serde_json::Value {
        poly_to_json(&self.inner, "q")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, LaurentError> {
        let (p, var) = poly_from_json(value)?;
        if var != "q" {
            return Err(LaurentError::Parse("expected q-polynomial".into()));
        }
        Ok(QView { inner: p })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(pairs: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_pairs(pairs)
    }

    #[test]
    fn add_cancellation_and_identity() {
        let a = v(&[(1, 1), (0, 1)]); // v + 1
        let b = v(&[(1, -1)]); // -v
        assert_eq!(a.add(&b), LaurentPoly::one());
        let p = v(&[(3, 2), (-1, 5)]);
        assert_eq!(LaurentPoly::zero().add(&p), p);
        let c = v(&[(-1, 1), (1, -1)]); // v^-1 - v
        assert_eq!(c.add(&c), v(&[(-1, 2), (1, -2)]));
    }

    #[test]
    fn mul_expansion_and_identity() {
        let xi = v(&[(-1, 1), (1, -1)]);
        assert_eq!(xi.mul(&xi), v(&[(-2, 1), (0, -2), (2, 1)]));
        let p = v(&[(5, 3), (-2, 7)]);
        assert_eq!(p.mul(&LaurentPoly::one()), p);
        let a = v(&[(-2, 1), (0, 1)]);
        assert_eq!(a.mul(&a), v(&[(-4, 1), (-2, 2), (0, 1)]));
    }

    #[test]
    fn bar_examples() {
        assert_eq!(v(&[(2, 1), (0, 2)]).bar(), v(&[(-2, 1), (0, 2)]));
        assert_eq!(v(&[(0, 7)]).bar(), v(&[(0, 7)]));
        let p = v(&[(3, 1), (-1, 4), (0, -2)]);
        assert_eq!(p.bar().bar(), p);
    }

    #[test]
    fn q_view_mapping() {
        let p = v(&[(-2, 1), (0, 2), (2, 1)]);
        let q = p.to_q_view().unwrap();
        assert_eq!(q, QPoly::from_pairs(&[(1, 1), (0, 2), (-1, 1)]));
        assert_eq!(LaurentPoly::one().to_q_view().unwrap(), QPoly::one());
        assert!(matches!(
            v(&[(-1, 1)]).to_q_view(),
            Err(LaurentError::OddExponent(-1))
        ));
    }

    #[test]
    fn evaluate_examples() {
        let q1 = QPoly::from_pairs(&[(1, 1), (0, 2), (-1, 1)]);
        assert_eq!(q1.value_at_one(), BigInt::from(4));
        let p11_a2 = QPoly::from_pairs(&[
            (3, 1),
            (2, 2),
            (1, 4),
            (0, 4),
            (-1, 4),
            (-2, 2),
            (-3, 1),
        ]);
        assert_eq!(p11_a2.value_at_one(), BigInt::from(18));
        let one = BigRational::one();
        assert_eq!(
            q1.evaluate(&one).unwrap(),
            BigRational::from(BigInt::from(4))
        );
        assert!(matches!(
            q1.evaluate(&BigRational::zero()),
            Err(LaurentError::ZeroPoint)
        ));
    }

    #[test]
    fn analyze_examples() {
        let r = QPoly::from_pairs(&[(1, 1), (0, 2), (-1, 1)]).analyze();
        assert!(r.is_positive && r.is_bar_symmetric && r.is_log_concave);

        // G2, g=0, k=3: a negative coefficient appears.
        let g2 = QPoly::from_pairs(&[
            (6, 1),
            (5, 2),
            (4, 2),
            (3, 2),
            (2, 2),
            (1, 72),
            (0, -18),
            (-1, 72),
            (-2, 2),
            (-3, 2),
            (-4, 2),
            (-5, 2),
            (-6, 1),
        ]);
        assert!(!g2.analyze().is_positive);
        assert!(g2.analyze().is_bar_symmetric);

        let one = QPoly::one().analyze();
        assert!(one.is_positive && one.is_bar_symmetric && one.is_log_concave);

        // A zero between nonzeros fails log-concavity.
        let gap = QPoly::from_pairs(&[(2, 1), (0, 1)]);
        assert!(!gap.analyze().is_log_concave);

        let notsym = QPoly::from_pairs(&[(1, 2), (0, 1)]);
        assert!(!notsym.analyze().is_bar_symmetric);
    }

    #[test]
    fn canonical_printing() {
        let p = QPoly::from_pairs(&[
            (3, 1),
            (2, 2),
            (1, 10),
            (0, 10),
            (-1, 10),
            (-2, 2),
            (-3, 1),
        ]);
        assert_eq!(
            p.to_string(),
            "q^3 + 2*q^2 + 10*q + 10 + 10*q^-1 + 2*q^-2 + q^-3"
        );
        let c = v(&[(-1, 1), (1, -1)]);
        assert_eq!(c.to_string(), "v^-1 - v");
        assert_eq!(LaurentPoly::zero().to_string(), "0");
        assert_eq!(v(&[(0, -3), (1, 72)]).to_string(), "-3 + 72*v");
        assert_eq!(v(&[(2, -1)]).to_string(), "-v^2");
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            "q^3 + 2*q^2 + 10*q + 10 + 10*q^-1 + 2*q^-2 + q^-3",
            "v^-1 - v",
            "0",
            "-v^2",
            "72*q - 18",
            "1",
        ] {
            let (p, var) = parse_poly(s).unwrap();
            let out = DisplayIn(&p, var.unwrap_or('q')).to_string();
            assert_eq!(out, s);
        }
        assert!(parse_poly("q + v").is_err());
        assert!(parse_poly("").is_err());
        assert!(parse_poly("q^").is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = v(&[(2, 3), (0, -1), (-4, 11)]);
        let j = p.to_json();
        assert_eq!(
            j,
            serde_json::json!({"var":"v","terms":[
                {"exp":2,"coef":"3"},{"exp":0,"coef":"-1"},{"exp":-4,"coef":"11"}
            ]})
        );
        let (back, var) = poly_from_json(&j).unwrap();
        assert_eq!(back, p);
        assert_eq!(var, "v");
    }

    #[test]
    fn xi_expansion() {
        let xi = v(&[(-1, 1), (1, -1)]);
        let p = xi
            .pow(2)
            .add(&xi.scale(&BigInt::from(3)))
            .add(&LaurentPoly::one());
        let coeffs = p.expand_in_xi().unwrap();
        assert_eq!(
            coeffs,
            vec![BigInt::from(1), BigInt::from(3), BigInt::from(1)]
        );
        assert!(v(&[(1, 1)]).expand_in_xi().is_err());
        assert_eq!(
            LaurentPoly::zero().expand_in_xi().unwrap(),
            Vec::<BigInt>::new()
        );
    }

    #[test]
    fn exact_division() {
        let a = v(&[(2, 1), (0, -1)]); // v^2 - 1
        let b = v(&[(1, 1), (0, 1)]); // v + 1
        let qa = a.map_coeffs(|c| BigRational::from(c.clone()));
        let qb = b.map_coeffs(|c| BigRational::from(c.clone()));
        let q = qa.div_exact(&qb).unwrap();
        assert_eq!(q.mul(&qb), qa);
        let bad = qa.div_exact(&v(&[(1, 1), (0, 2)]).map_coeffs(|c| BigRational::from(c.clone())));
        assert!(bad.is_none());
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        proptest::collection::vec(((-6i64..=6), (-9i64..=9)), 0..6)
            .prop_map(|pairs| LaurentPoly::from_pairs(&pairs))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        }

        #[test]
        fn bar_is_ring_involution(a in arb_poly(), b in arb_poly()) {
            prop_assert_eq!(a.bar().bar(), a.clone());
            prop_assert_eq!(a.mul(&b).bar(), a.bar().mul(&b.bar()));
            prop_assert_eq!(a.add(&b).bar(), a.bar().add(&b.bar()));
        }

        #[test]
        fn q_view_round_trip(a in arb_poly()) {
            let even = Laurent::from_terms(a.terms().map(|(e, c)| (2 * e, c.clone())));
            let q = even.to_q_view().unwrap();
            prop_assert_eq!(q.to_v_poly(), even);
        }

        #[test]
        fn evaluate_is_multiplicative(a in arb_poly(), b in arb_poly(), num in 1i64..5, den in 1i64..5) {
            let x = BigRational::new(BigInt::from(num), BigInt::from(den));
            let lhs = a.mul(&b).evaluate(&x).unwrap();
            let rhs = a.evaluate(&x).unwrap() * b.evaluate(&x).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn text_round_trip(a in arb_poly()) {
            let s = a.to_string();
            let back: LaurentPoly = s.parse().unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
