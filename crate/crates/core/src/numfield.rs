//! Exact arithmetic in real number fields Q(a), a = 2cos(pi/m).
//!
//! Non-crystallographic Coxeter types need irrational scalars: the reflection
//! representation of I2(m) uses 2cos(pi/m) and H3 uses the golden ratio
//! 2cos(pi/5). The dihedral Schur elements and the generic center backend
//! additionally need exact signs and exact root-finding over these fields.
//!
//! Elements are represented in the power basis of a fixed monic integer
//! minimal polynomial; signs are decided exactly by interval refinement of
//! Sturm-isolated real roots. A field-free element (`field: None`) is a plain
//! rational and promotes on contact, so `NfElem` doubles as the generic
//! field-coefficient type of the crate.

use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::laurent::Coeff;

// ---------------------------------------------------------------------------
// Rational intervals
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct Iv {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Iv {
    pub fn point(x: BigRational) -> Self {
        Iv { lo: x.clone(), hi: x }
    }

    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        Iv { lo, hi }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from(BigInt::from(2))
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Sign if determined: -1, 0 (only for exact point zero), +1.
    pub fn sign(&self) -> Option<i8> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn add(&self, o: &Iv) -> Iv {
        Iv::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn sub(&self, o: &Iv) -> Iv {
        Iv::new(&self.lo - &o.hi, &self.hi - &o.lo)
    }

    pub fn neg(&self) -> Iv {
        Iv::new(-self.hi.clone(), -self.lo.clone())
    }

    pub fn mul(&self, o: &Iv) -> Iv {
        let cands = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let mut lo = cands[0].clone();
        let mut hi = cands[0].clone();
        for c in &cands[1..] {
            if c < &lo {
                lo = c.clone();
            }
            if c > &hi {
                hi = c.clone();
            }
        }
        Iv::new(lo, hi)
    }

    /// Division by an interval that excludes zero.
    pub fn div(&self, o: &Iv) -> Option<Iv> {
        if o.contains_zero() {
            return None;
        }
        let inv = Iv::new(o.hi.recip(), o.lo.recip());
        Some(self.mul(&inv))
    }

    pub fn scale(&self, c: &BigRational) -> Iv {
        if c.is_negative() {
            Iv::new(&self.hi * c, &self.lo * c)
        } else {
            Iv::new(&self.lo * c, &self.hi * c)
        }
    }
}

// ---------------------------------------------------------------------------
// Dense rational polynomials (internal helper)
// ---------------------------------------------------------------------------

/// Dense univariate polynomial over the rationals, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct RatPoly(pub Vec<BigRational>);

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        RatPoly(coeffs)
    }

    pub fn zero() -> Self {
        RatPoly(Vec::new())
    }

    pub fn one() -> Self {
        RatPoly(vec![BigRational::one()])
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        RatPoly(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Self::new(v.iter().map(|&c| BigRational::from(BigInt::from(c))).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    pub fn lead(&self) -> Option<&BigRational> {
        self.0.last()
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.0.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, o: &RatPoly) -> RatPoly {
        let n = self.0.len().max(o.0.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &RatPoly) -> RatPoly {
        let n = self.0.len().max(o.0.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> RatPoly {
        RatPoly(self.0.iter().map(|c| -c.clone()).collect())
    }

    pub fn mul(&self, o: &RatPoly) -> RatPoly {
        if self.is_zero() || o.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> RatPoly {
        RatPoly::new(self.0.iter().map(|x| x * c).collect())
    }

    /// Euclidean division; divisor must be nonzero.
    pub fn div_rem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let dl = d.lead().unwrap().clone();
        let mut rem = self.0.clone();
        if rem.len() < d.0.len() {
            return (RatPoly::zero(), RatPoly::new(rem));
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        while rem.len() >= d.0.len() {
            let top = rem.last().unwrap().clone();
            if top.is_zero() {
                rem.pop();
                continue;
            }
            let k = rem.len() - 1 - dd;
            let c = &top / &dl;
            quot[k] = c.clone();
            for (i, dc) in d.0.iter().enumerate() {
                let idx = k + i;
                let t = dc * &c;
                rem[idx] -= t;
            }
            rem.pop();
        }
        (RatPoly::new(quot), RatPoly::new(rem))
    }

    pub fn exact_div(&self, d: &RatPoly) -> Option<RatPoly> {
        let (q, r) = self.div_rem(d);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    pub fn derivative(&self) -> RatPoly {
        if self.0.len() <= 1 {
            return RatPoly::zero();
        }
        RatPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from(BigInt::from(i as i64)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_iv(&self, x: &Iv) -> Iv {
        let mut acc = Iv::point(BigRational::zero());
        for c in self.0.iter().rev() {
            acc = acc.mul(x).add(&Iv::point(c.clone()));
        }
        acc
    }

    /// Monic generator of the ideal (self, other).
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if let Some(l) = a.lead().cloned() {
            a = a.scale(&l.recip());
        }
        a
    }

    pub fn squarefree_part(&self) -> RatPoly {
        if self.is_zero() {
            return RatPoly::zero();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            let l = self.lead().unwrap().clone();
            return self.scale(&l.recip());
        }
        let q = self.exact_div(&g).expect("gcd divides");
        let l = q.lead().unwrap().clone();
        q.scale(&l.recip())
    }

    fn sturm_chain(&self) -> Vec<RatPoly> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.neg());
        }
        chain
    }

    fn sign_variations(chain: &[RatPoly], x: &BigRational) -> usize {
        let mut prev: Option<bool> = None;
        let mut count = 0;
        for p in chain {
            let v = p.eval(x);
            if v.is_zero() {
                continue;
            }
            let s = v.is_positive();
            if let Some(ps) = prev {
                if ps != s {
                    count += 1;
                }
            }
            prev = Some(s);
        }
        count
    }

    /// Number of distinct real roots in (a, b]; requires squarefree self.
    pub fn count_roots(&self, chain: &[RatPoly], a: &BigRational, b: &BigRational) -> usize {
        Self::sign_variations(chain, a) - Self::sign_variations(chain, b)
    }

    /// Isolating intervals (lo, hi] for every real root of a squarefree
    /// polynomial, in increasing order.
    pub fn isolate_real_roots(&self) -> Vec<Iv> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let chain = self.sturm_chain();
        // Cauchy bound.
        let lead = self.lead().unwrap();
        let mut m = BigRational::zero();
        for c in &self.0 {
            let a = (c / lead).abs();
            if a > m {
                m = a;
            }
        }
        let bound = m + BigRational::one();
        let mut out = Vec::new();
        let mut stack = vec![(-bound.clone(), bound.clone())];
        while let Some((lo, hi)) = stack.pop() {
            let n = self.count_roots(&chain, &lo, &hi);
            if n == 0 {
                continue;
            }
            if n == 1 {
                out.push(Iv::new(lo, hi));
                continue;
            }
            let mid = (&lo + &hi) / BigRational::from(BigInt::from(2));
            stack.push((lo, mid.clone()));
            stack.push((mid, hi));
        }
        out.sort_by(|a, b| a.lo.cmp(&b.lo));
        out
    }

    /// Halve an isolating interval, preserving "exactly one root in (lo, hi]".
    pub fn refine_root(&self, chain: &[RatPoly], iv: &Iv) -> Iv {
        let mid = iv.mid();
        if self.count_roots(chain, &iv.lo, &mid) == 1 {
            Iv::new(iv.lo.clone(), mid)
        } else {
            Iv::new(mid, iv.hi.clone())
        }
    }
}

// ---------------------------------------------------------------------------
// Cyclotomic data
// ---------------------------------------------------------------------------

/// The n-th cyclotomic polynomial, exact integer coefficients.
pub fn cyclotomic(n: u32) -> RatPoly {
    assert!(n >= 1);
    // x^n - 1 divided by the cyclotomic polynomials of proper divisors.
    let mut num = vec![BigRational::zero(); n as usize + 1];
    num[0] = -BigRational::one();
    num[n as usize] = BigRational::one();
    let mut p = RatPoly::new(num);
    for d in 1..n {
        if n % d == 0 {
            let c = cyclotomic(d);
            p = p.exact_div(&c).expect("cyclotomic division is exact");
        }
    }
    p
}

/// Minimal polynomial of 2cos(2*pi/n) over Q, for n >= 3 (degree phi(n)/2).
pub fn real_cyclotomic_minpoly(n: u32) -> RatPoly {
    assert!(n >= 3);
    let phi = cyclotomic(n);
    let deg = phi.degree().unwrap();
    debug_assert!(deg % 2 == 0);
    let m = deg / 2;
    // phi is palindromic; write z^-m * phi(z) in the basis p_j = z^j + z^-j
    // using p_{j+1} = x p_j - p_{j-1}, p_0 = 2, p_1 = x.
    let mut basis = vec![RatPoly::constant(BigRational::from(BigInt::from(2))), RatPoly::x()];
    for j in 2..=m {
        let next = RatPoly::x().mul(&basis[j - 1]).sub(&basis[j - 2]);
        basis.push(next);
    }
    let mut out = RatPoly::zero();
    // constant term of the symmetric expression: coefficient of z^m.
    out = out.add(&RatPoly::constant(phi.coeff(m)));
    for j in 1..=m {
        out = out.add(&basis[j].scale(&phi.coeff(m + j)));
    }
    out
}

// ---------------------------------------------------------------------------
// Number fields
// ---------------------------------------------------------------------------

/// A real number field Q(a) with monic integer minimal polynomial, all of
/// whose roots are real (true for the real cyclotomic fields used here).
#[derive(Debug)]
pub struct NumberField {
    /// Human-readable generator description, e.g. "2cos(pi/5)".
    pub name: String,
    pub minpoly: RatPoly,
    pub degree: usize,
    /// Isolating intervals for all real roots, ascending; refined on demand.
    roots: RwLock<Vec<Iv>>,
    chain: Vec<RatPoly>,
    /// Index into `roots` of the distinguished embedding of the generator.
    pub primary: usize,
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.minpoly == other.minpoly && self.primary == other.primary
    }
}

impl NumberField {
    pub fn new(name: &str, minpoly: RatPoly, primary_root_near: &BigRational) -> Arc<Self> {
        let deg = minpoly.degree().expect("nonzero minimal polynomial");
        assert!(deg >= 1);
        let sf = minpoly.squarefree_part();
        assert_eq!(sf.degree(), minpoly.degree(), "minimal polynomial must be squarefree");
        let chain = minpoly.sturm_chain();
        let roots = minpoly.isolate_real_roots();
        assert_eq!(roots.len(), deg, "field is not totally real");
        // Pick the root whose interval is closest to the requested location.
        let mut primary = 0;
        let mut best: Option<BigRational> = None;
        for (i, iv) in roots.iter().enumerate() {
            let d = (iv.mid() - primary_root_near).abs();
            if best.as_ref().map(|b| &d < b).unwrap_or(true) {
                best = Some(d);
                primary = i;
            }
        }
        Arc::new(NumberField {
            name: name.to_string(),
            minpoly,
            degree: deg,
            roots: RwLock::new(roots),
            chain,
            primary,
        })
    }

    /// Field of 2cos(pi/m), the scalar ring for the I2(m) family (m >= 3) and
    /// H3 (m = 5, the golden ratio).
    pub fn two_cos_pi_over(m: u32) -> Arc<Self> {
        assert!(m >= 3);
        let mp = real_cyclotomic_minpoly(2 * m);
        // 2cos(pi/m) is the largest root.
        let near = BigRational::from(BigInt::from(2));
        NumberField::new(&format!("2cos(pi/{m})"), mp, &near)
    }

    /// Interval for embedding `idx` of the generator, of width at most `eps`.
    pub fn root_iv(&self, idx: usize, eps: &BigRational) -> Iv {
        {
            let roots = self.roots.read().unwrap();
            if roots[idx].width() <= *eps {
                return roots[idx].clone();
            }
        }
        let mut roots = self.roots.write().unwrap();
        while roots[idx].width() > *eps {
            roots[idx] = self.minpoly.refine_root(&self.chain, &roots[idx]);
        }
        roots[idx].clone()
    }
}

/// Element of a number field in the power basis; `field: None` encodes a
/// plain rational, which promotes on contact with any field element.
#[derive(Debug, Clone)]
pub struct NfElem {
    pub field: Option<Arc<NumberField>>,
    /// Power-basis coordinates, lowest first, trailing zeros trimmed.
    pub coeffs: Vec<BigRational>,
}

impl NfElem {
    pub fn rational(c: BigRational) -> Self {
        let coeffs = if c.is_zero() { vec![] } else { vec![c] };
        NfElem { field: None, coeffs }
    }

    pub fn from_int(c: i64) -> Self {
        Self::rational(BigRational::from(BigInt::from(c)))
    }

    pub fn in_field(field: &Arc<NumberField>, coeffs: Vec<BigRational>) -> Self {
        let mut e = NfElem {
            field: Some(field.clone()),
            coeffs,
        };
        e.reduce();
        e
    }

    pub fn generator(field: &Arc<NumberField>) -> Self {
        Self::in_field(field, vec![BigRational::zero(), BigRational::one()])
    }

    fn reduce(&mut self) {
        if let Some(f) = &self.field {
            let d = f.degree;
            if self.coeffs.len() > d {
                let p = RatPoly::new(std::mem::take(&mut self.coeffs));
                let (_, r) = p.div_rem(&f.minpoly);
                self.coeffs = r.0;
            }
        }
        while self.coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.coeffs.pop();
        }
        if self.field.is_some() && self.coeffs.is_empty() {
            // keep the field tag for zero? drop it: zero is universal.
            self.field = None;
        }
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        match self.coeffs.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    fn unified_field(&self, other: &Self) -> Option<Arc<NumberField>> {
        match (&self.field, &other.field) {
            (Some(a), Some(b)) => {
                assert!(
                    a.as_ref() == b.as_ref(),
                    "mixed number fields: {} vs {}",
                    a.name,
                    b.name
                );
                Some(a.clone())
            }
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (None, None) => None,
        }
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        match &self.field {
            None => NfElem::rational(self.coeffs[0].recip()),
            Some(f) => {
                // Extended Euclid: u*self + v*minpoly = gcd = 1.
                let a = RatPoly::new(self.coeffs.clone());
                let b = f.minpoly.clone();
                let (mut r0, mut r1) = (a, b);
                let (mut s0, mut s1) = (RatPoly::one(), RatPoly::zero());
                while !r1.is_zero() {
                    let (q, r) = r0.div_rem(&r1);
                    let s = s0.sub(&q.mul(&s1));
                    r0 = r1;
                    r1 = r;
                    s0 = s1;
                    s1 = s;
                }
                assert_eq!(r0.degree(), Some(0), "element not invertible");
                let c = r0.coeff(0).recip();
                NfElem::in_field(f, s0.scale(&c).0)
            }
        }
    }

    /// Interval enclosure under embedding `idx` (primary if the element is
    /// rational), of width at most `eps`.
    pub fn embed_iv(&self, idx: usize, eps: &BigRational) -> Iv {
        match &self.field {
            None => Iv::point(self.to_rational().unwrap()),
            Some(f) => {
                let p = RatPoly::new(self.coeffs.clone());
                // Refine the root until the polynomial image is tight enough.
                let mut root_eps = eps.clone();
                loop {
                    let r = f.root_iv(idx, &root_eps);
                    let out = p.eval_iv(&r);
                    if out.width() <= *eps {
                        return out;
                    }
                    root_eps = root_eps / BigRational::from(BigInt::from(16));
                }
            }
        }
    }

    /// Exact sign via interval refinement (nonzero is decided in finitely
    /// many steps; zero is decided syntactically by the reduced form).
    pub fn exact_sign(&self) -> i8 {
        if self.coeffs.is_empty() {
            return 0;
        }
        match &self.field {
            None => {
                if self.coeffs[0].is_positive() {
                    1
                } else {
                    -1
                }
            }
            Some(f) => {
                let mut eps = BigRational::new(BigInt::one(), BigInt::from(16));
                loop {
                    let iv = self.embed_iv(f.primary, &eps);
                    if let Some(s) = iv.sign() {
                        if s != 0 {
                            return s;
                        }
                    }
                    if iv.lo.is_zero() && iv.hi.is_zero() {
                        return 0;
                    }
                    eps = eps / BigRational::from(BigInt::from(64));
                }
            }
        }
    }
}

impl PartialEq for NfElem {
    fn eq(&self, other: &Self) -> bool {
        // Structural equality of reduced forms; fields must agree when both
        // are present (promotion keeps reduced forms canonical).
        if self.coeffs.len() != other.coeffs.len() {
            return false;
        }
        self.coeffs == other.coeffs
    }
}

impl NfElem {
    fn add_impl(&self, other: &Self) -> Self {
        let field = self.unified_field(other);
        let a = RatPoly::new(self.coeffs.clone());
        let b = RatPoly::new(other.coeffs.clone());
        let mut e = NfElem {
            field,
            coeffs: a.add(&b).0,
        };
        e.reduce();
        e
    }

    fn mul_impl(&self, other: &Self) -> Self {
        let field = self.unified_field(other);
        let a = RatPoly::new(self.coeffs.clone());
        let b = RatPoly::new(other.coeffs.clone());
        let mut e = NfElem {
            field,
            coeffs: a.mul(&b).0,
        };
        e.reduce();
        e
    }

    fn neg_impl(&self) -> Self {
        NfElem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

impl Zero for NfElem {
    fn zero() -> Self {
        NfElem {
            field: None,
            coeffs: vec![],
        }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for NfElem {
    fn one() -> Self {
        NfElem::from_int(1)
    }
    fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }
}

impl std::ops::Add for NfElem {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.add_impl(&o)
    }
}

impl std::ops::Sub for NfElem {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.add_impl(&o.neg_impl())
    }
}

impl std::ops::Mul for NfElem {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.mul_impl(&o)
    }
}

impl std::ops::Neg for NfElem {
    type Output = Self;
    fn neg(self) -> Self {
        self.neg_impl()
    }
}

impl Coeff for NfElem {
    fn fmt_parts(&self) -> (Option<bool>, String) {
        match self.to_rational() {
            Some(r) => (Some(r.is_negative()), r.abs().to_string()),
            None => (None, format!("({})", self)),
        }
    }
}

impl crate::laurent::SignedCoeff for NfElem {
    fn sign(&self) -> i8 {
        self.exact_sign()
    }
}

impl crate::laurent::FieldCoeff for NfElem {
    fn inv(&self) -> Self {
        NfElem::inv(self)
    }
}

impl fmt::Display for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
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
            match i {
                0 => write!(f, "{}", a)?,
                1 if a.is_one() => write!(f, "a")?,
                1 => write!(f, "{}*a", a)?,
                _ if a.is_one() => write!(f, "a^{}", i)?,
                _ => write!(f, "{}*a^{}", a, i)?,
            }
        }
        Ok(())
    }
}

/// 2cos(j*theta) as a polynomial in x = 2cos(theta), evaluated at `x`.
pub fn two_cos_multiple(x: &NfElem, j: u32) -> NfElem {
    // p_0 = 2, p_1 = x, p_{j+1} = x p_j - p_{j-1}.
    if j == 0 {
        return NfElem::from_int(2);
    }
    let mut prev = NfElem::from_int(2);
    let mut cur = x.clone();
    for _ in 1..j {
        let next = x.clone() * cur.clone() - prev;
        prev = cur;
        cur = next;
    }
    cur
}

// ---------------------------------------------------------------------------
// Exact roots of monic polynomials over a number field
// ---------------------------------------------------------------------------

/// Monic polynomial over the field, lowest-degree coefficient first,
/// `coeffs.len() = deg + 1`, last coefficient 1.
pub struct NfPoly(pub Vec<NfElem>);

impl NfPoly {
    pub fn eval(&self, x: &NfElem) -> NfElem {
        let mut acc = NfElem::zero();
        for c in self.0.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    fn degree(&self) -> usize {
        self.0.len() - 1
    }

    /// Norm to Q[T]: the product of the conjugates of the polynomial,
    /// computed exactly as a resultant via cofactor expansion of the
    /// Sylvester matrix (field degrees here are tiny).
    fn norm(&self, field: &Arc<NumberField>) -> RatPoly {
        let d = field.degree;
        // g(x, T) = sum_j c_j(x) T^j as a polynomial in x with RatPoly (in T)
        // coefficients.
        let mut g: Vec<RatPoly> = vec![RatPoly::zero(); d.max(1)];
        for (j, c) in self.0.iter().enumerate() {
            for (i, a) in c.coeffs.iter().enumerate() {
                let mut term = vec![BigRational::zero(); j + 1];
                term[j] = a.clone();
                g[i] = g[i].add(&RatPoly::new(term));
            }
        }
        while g.last().map(|p| p.is_zero()).unwrap_or(false) && g.len() > 1 {
            g.pop();
        }
        let dg = g.len() - 1;
        if dg == 0 {
            // Constant in x: norm is g_0^d.
            let mut out = RatPoly::one();
            for _ in 0..d {
                out = out.mul(&g[0]);
            }
            return out;
        }
        // Sylvester matrix of f (degree d) and g (x-degree dg), size d + dg.
        let n = d + dg;
        let mut mat: Vec<Vec<RatPoly>> = vec![vec![RatPoly::zero(); n]; n];
        let f = &field.minpoly;
        for row in 0..dg {
            for i in 0..=d {
                mat[row][row + i] = RatPoly::constant(f.coeff(d - i));
            }
        }
        for row in 0..d {
            for i in 0..=dg {
                mat[dg + row][row + i] = g[dg - i].clone();
            }
        }
        det_ratpoly(&mat)
    }
}

fn det_ratpoly(mat: &[Vec<RatPoly>]) -> RatPoly {
    let n = mat.len();
    if n == 1 {
        return mat[0][0].clone();
    }
    // Cofactor expansion along the first column (n <= 5 or so here).
    let mut det = RatPoly::zero();
    for i in 0..n {
        if mat[i][0].is_zero() {
            continue;
        }
        let minor: Vec<Vec<RatPoly>> = (0..n)
            .filter(|&r| r != i)
            .map(|r| mat[r][1..].to_vec())
            .collect();
        let sub = det_ratpoly(&minor);
        let term = mat[i][0].mul(&sub);
        det = if i % 2 == 0 { det.add(&term) } else { det.sub(&term) };
    }
    det
}

/// Best rational approximation to the midpoint of `iv` with denominator at
/// most `max_den` (continued fractions).
fn rational_reconstruct(iv: &Iv, max_den: &BigInt) -> BigRational {
    use num_integer::Integer;
    let x = iv.mid();
    let mut p0 = BigInt::one();
    let mut q0 = BigInt::zero();
    let mut p1 = x.numer().div_floor(x.denom());
    let mut q1 = BigInt::one();
    let mut frac = &x - BigRational::from(p1.clone());
    while !frac.is_zero() && &q1 <= max_den {
        let inv = frac.recip();
        let a = inv.numer().div_floor(inv.denom());
        frac = inv - BigRational::from(a.clone());
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    if &q1 <= max_den {
        BigRational::new(p1, q1)
    } else {
        BigRational::new(p0, q0.max(BigInt::one()))
    }
}

/// All roots of a monic `NfPoly` that lie in the coefficient field (or in Q
/// when `field` is `None`). Exactly verified; intended for polynomials known
/// to split with distinct roots, but safe in general (returns whatever roots
/// exist in the field).
pub fn roots_in_field(poly: &NfPoly, field: Option<&Arc<NumberField>>) -> Vec<NfElem> {
    let k = poly.degree();
    if k == 0 {
        return Vec::new();
    }
    // Fast path: rational coefficients that are all integers. Roots in Q of
    // a monic integer polynomial are integers; find them mod p + lifting.
    if field.is_none() {
        let ints: Option<Vec<BigInt>> = poly
            .0
            .iter()
            .map(|c| {
                c.to_rational()
                    .filter(|r| r.is_integer())
                    .map(|r| r.to_integer())
            })
            .collect();
        if let Some(cs) = ints {
            if let Some(roots) = integer_roots(&cs) {
                return roots
                    .into_iter()
                    .map(|r| NfElem::rational(BigRational::from(r)))
                    .collect();
            }
        }
    }
    let d = field.map(|f| f.degree).unwrap_or(1);
    // Norm polynomial over Q, squarefree part, isolated real roots.
    let norm = match field {
        Some(f) => poly.norm(f),
        None => RatPoly::new(
            poly.0
                .iter()
                .map(|c| c.to_rational().expect("rational coefficients"))
                .collect(),
        ),
    };
    let sf = norm.squarefree_part();
    let ivs = sf.isolate_real_roots();
    let chain = sf.sturm_chain();

    let mut found: Vec<NfElem> = Vec::new();
    let mut eps = BigRational::new(BigInt::one(), BigInt::from(1u32 << 20));
    let max_dens = [BigInt::from(1), BigInt::from(64), BigInt::from(4096)];
    'outer: for attempt in 0..3 {
        found.clear();
        // Refine all root intervals to the current precision.
        let mut roots: Vec<Iv> = ivs.clone();
        for r in roots.iter_mut() {
            while r.width() > eps {
                *r = sf.refine_root(&chain, r);
            }
        }
        match field {
            None => {
                for r in &roots {
                    let cand = rational_reconstruct(r, &max_dens[attempt]);
                    let c = NfElem::rational(cand);
                    if poly.eval(&c).is_zero() && !found.contains(&c) {
                        found.push(c);
                    }
                }
            }
            Some(f) => {
                // For each choice of d embedded values (one per embedding of
                // the generator), solve the Vandermonde system for the
                // power-basis coordinates and verify exactly.
                let gen_ivs: Vec<Iv> = (0..f.degree).map(|i| f.root_iv(i, &eps)).collect();
                let combos = roots.len().pow((d - 1) as u32);
                for first in 0..roots.len() {
                    for rest in 0..combos {
                        let mut pick = vec![0usize; d];
                        pick[0] = first;
                        let mut r = rest;
                        for slot in pick.iter_mut().skip(1) {
                            *slot = r % roots.len();
                            r /= roots.len();
                        }
                        if let Some(c) =
                            solve_vandermonde(f, &gen_ivs, &roots, &pick, &max_dens[attempt])
                        {
                            if poly.eval(&c).is_zero() && !found.contains(&c) {
                                found.push(c);
                                if found.len() == k {
                                    break 'outer;
                                }
                            }
                        }
                    }
                }
            }
        }
        if found.len() == k {
            break 'outer;
        }
        eps = BigRational::new(BigInt::one(), BigInt::from(1u64 << 48))
            * eps.clone();
    }
    found
}

/// Solve for c in V c = vals where V is the Vandermonde matrix of the
/// generator embeddings; interval arithmetic followed by rational
/// reconstruction. Returns a candidate (to be verified by the caller).
fn solve_vandermonde(
    f: &Arc<NumberField>,
    gen_ivs: &[Iv],
    root_ivs: &[Iv],
    pick: &[usize],
    max_den: &BigInt,
) -> Option<NfElem> {
    let d = f.degree;
    if d == 1 {
        let c = rational_reconstruct(&root_ivs[pick[0]], max_den);
        return Some(NfElem::rational(c));
    }
    // Build interval matrix rows [1, a_i, a_i^2, ...] and rhs values.
    let mut mat: Vec<Vec<Iv>> = Vec::with_capacity(d);
    let mut rhs: Vec<Iv> = Vec::with_capacity(d);
    for (emb, &ri) in pick.iter().enumerate() {
        let a = &gen_ivs[emb];
        let mut row = Vec::with_capacity(d);
        let mut p = Iv::point(BigRational::one());
        for _ in 0..d {
            row.push(p.clone());
            p = p.mul(a);
        }
        mat.push(row);
        rhs.push(root_ivs[ri].clone());
    }
    // Interval Gaussian elimination.
    for col in 0..d {
        // pivot: a row whose entry excludes zero
        let mut piv = None;
        for row in col..d {
            if !mat[row][col].contains_zero() {
                piv = Some(row);
                break;
            }
        }
        let piv = piv?;
        mat.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..d {
            let factor = mat[row][col].div(&mat[col][col])?;
            for c2 in col..d {
                let t = factor.mul(&mat[col][c2]);
                mat[row][c2] = mat[row][c2].sub(&t);
            }
            let t = factor.mul(&rhs[col]);
            rhs[row] = rhs[row].sub(&t);
        }
    }
    let mut sol = vec![Iv::point(BigRational::zero()); d];
    for row in (0..d).rev() {
        let mut acc = rhs[row].clone();
        for c2 in row + 1..d {
            let t = mat[row][c2].mul(&sol[c2]);
            acc = acc.sub(&t);
        }
        sol[row] = acc.div(&mat[row][row])?;
    }
    let coeffs: Vec<BigRational> = sol
        .iter()
        .map(|iv| rational_reconstruct(iv, max_den))
        .collect();
    Some(NfElem::in_field(f, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::SignedCoeff;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic(1), RatPoly::from_ints(&[-1, 1]));
        assert_eq!(cyclotomic(2), RatPoly::from_ints(&[1, 1]));
        assert_eq!(cyclotomic(4), RatPoly::from_ints(&[1, 0, 1]));
        assert_eq!(cyclotomic(5), RatPoly::from_ints(&[1, 1, 1, 1, 1]));
        assert_eq!(cyclotomic(12), RatPoly::from_ints(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn real_cyclotomic_minpolys() {
        // 2cos(pi/5): golden ratio, x^2 - x - 1.
        assert_eq!(real_cyclotomic_minpoly(10), RatPoly::from_ints(&[-1, -1, 1]));
        // 2cos(pi/4) = sqrt(2): x^2 - 2.
        assert_eq!(real_cyclotomic_minpoly(8), RatPoly::from_ints(&[-2, 0, 1]));
        // 2cos(pi/7): x^3 - x^2 - 2x + 1.
        assert_eq!(
            real_cyclotomic_minpoly(14),
            RatPoly::from_ints(&[1, -2, -1, 1])
        );
        // 2cos(pi/3) = 1: x - 1.
        assert_eq!(real_cyclotomic_minpoly(6), RatPoly::from_ints(&[-1, 1]));
    }

    #[test]
    fn sturm_isolation() {
        // (x^2 - 2)(x - 3): roots -sqrt2, sqrt2, 3.
        let p = RatPoly::from_ints(&[-2, 0, 1]).mul(&RatPoly::from_ints(&[-3, 1]));
        let roots = p.isolate_real_roots();
        assert_eq!(roots.len(), 3);
        assert!(roots[0].lo < rat(-1, 1) && roots[0].hi > rat(-3, 2));
        assert!(roots[2].lo < rat(3, 1) && roots[2].hi >= rat(3, 1));
    }

    #[test]
    fn field_arithmetic_golden_ratio() {
        let f = NumberField::two_cos_pi_over(5);
        let phi = NfElem::generator(&f);
        // phi^2 = phi + 1
        assert_eq!(phi.clone() * phi.clone(), phi.clone() + NfElem::from_int(1));
        // phi > 0, 1 - phi < 0
        assert_eq!(phi.sign(), 1);
        assert_eq!((NfElem::from_int(1) - phi.clone()).sign(), -1);
        // inverse: phi^-1 = phi - 1
        assert_eq!(phi.inv(), phi.clone() - NfElem::from_int(1));
        // 2cos(2pi/5) = phi^2 - 2 ... = phi - 1; check the Chebyshev helper.
        let c2 = two_cos_multiple(&phi, 2);
        assert_eq!(c2, phi.clone() - NfElem::from_int(1));
        assert_eq!(c2.sign(), 1);
        // 2cos(3pi/5) < 0
        let c3 = two_cos_multiple(&phi, 3);
        assert_eq!(c3.sign(), -1);
    }

    #[test]
    fn rational_promotion() {
        let f = NumberField::two_cos_pi_over(7);
        let a = NfElem::generator(&f);
        let two = NfElem::from_int(2);
        let s = a.clone() + two.clone();
        assert_eq!(s - a.clone(), two);
        assert!((a.clone() - a.clone()).is_zero());
    }

    #[test]
    fn roots_in_rational_field() {
        // (T - 2)(T - 7)(T + 5), monic over Q.
        let p = NfPoly(vec![
            NfElem::from_int(70),
            NfElem::from_int(-31),
            NfElem::from_int(-4),
            NfElem::from_int(1),
        ]);
        let mut roots: Vec<i64> = roots_in_field(&p, None)
            .into_iter()
            .map(|r| {
                let q = r.to_rational().unwrap();
                assert!(q.is_integer());
                q.to_integer().try_into().unwrap()
            })
            .collect();
        roots.sort();
        assert_eq!(roots, vec![-5, 2, 7]);
    }

    #[test]
    fn roots_in_golden_field() {
        let f = NumberField::two_cos_pi_over(5);
        let phi = NfElem::generator(&f);
        // (T - phi)(T - (2 - phi)) = T^2 - 2T + (2phi - phi^2) ; phi^2 = phi+1
        let r1 = phi.clone();
        let r2 = NfElem::from_int(2) - phi.clone();
        let c0 = r1.clone() * r2.clone();
        let c1 = -(r1.clone() + r2.clone());
        let p = NfPoly(vec![c0, c1, NfElem::from_int(1)]);
        let roots = roots_in_field(&p, Some(&f));
        assert_eq!(roots.len(), 2);
        assert!(roots.contains(&r1));
        assert!(roots.contains(&r2));
    }
}

/// All integer roots of a monic integer polynomial (lowest-degree
/// coefficient first, leading coefficient 1), by root finding modulo a
/// medium prime, Hensel lifting, and exact verification. Returns `None` when
/// no tried prime is usable (e.g. the integer roots are not simple).
pub fn integer_roots(coeffs: &[BigInt]) -> Option<Vec<BigInt>> {
    use num_traits::ToPrimitive;
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Some(vec![]);
    }
    // Cauchy bound on root magnitude
    let mut bound = BigInt::one();
    for c in coeffs.iter().take(deg) {
        let a = c.magnitude().clone();
        if BigInt::from(a.clone()) > bound {
            bound = BigInt::from(a);
        }
    }
    bound += 1;
    let eval_mod = |x: u64, p: u64| -> u64 {
        let mut acc: u64 = 0;
        for c in coeffs.iter().rev() {
            let cm = ((c % BigInt::from(p)) + BigInt::from(p)) % BigInt::from(p);
            let cm = cm.to_u64().unwrap();
            acc = ((acc as u128 * x as u128 + cm as u128) % p as u128) as u64;
        }
        acc
    };
    let primes: [u64; 8] = [10007, 10009, 10037, 10039, 10061, 10067, 10069, 10079];
    'prime: for &p in &primes {
        // roots mod p by brute force
        let mut roots_p = Vec::new();
        for x in 0..p {
            if eval_mod(x, p) == 0 {
                roots_p.push(x);
            }
        }
        if roots_p.len() > deg {
            continue;
        }
        // derivative coefficients
        let deriv: Vec<BigInt> = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i as u64))
            .collect();
        let eval_big = |x: &BigInt, cs: &[BigInt], md: &BigInt| -> BigInt {
            let mut acc = BigInt::zero();
            for c in cs.iter().rev() {
                acc = (acc * x + c) % md;
            }
            ((acc % md) + md) % md
        };
        let mut out = Vec::new();
        for &u in &roots_p {
            let pbig = BigInt::from(p);
            // simple root mod p required for lifting
            let d0 = eval_big(&BigInt::from(u), &deriv, &pbig);
            if d0.is_zero() {
                continue 'prime;
            }
            // Hensel: double the modulus until it exceeds 2*bound
            let mut modulus = pbig.clone();
            let mut x = BigInt::from(u);
            let target = &bound * BigInt::from(2) + 1;
            while modulus < target {
                modulus = &modulus * &modulus;
                let fx = eval_big(&x, coeffs, &modulus);
                let dx = eval_big(&x, &deriv, &modulus);
                let dinv = mod_inverse(&dx, &modulus)?;
                x = ((&x - fx * dinv) % &modulus + &modulus) % &modulus;
            }
            // centered representative
            let half = &modulus / BigInt::from(2);
            if x > half {
                x -= &modulus;
            }
            // exact verification
            let mut acc = BigInt::zero();
            for c in coeffs.iter().rev() {
                acc = acc * &x + c;
            }
            if acc.is_zero() && !out.contains(&x) {
                out.push(x);
            }
        }
        return Some(out);
    }
    None
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    // extended Euclid
    let (mut r0, mut r1) = (m.clone(), ((a % m) + m) % m);
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = r1;
        r1 = r2;
        let t2 = &t0 - &q * &t1;
        t0 = t1;
        t1 = t2;
    }
    if r0 != BigInt::one() {
        return None;
    }
    Some(((t0 % m) + m) % m)
}
