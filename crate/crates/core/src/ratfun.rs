//! Rational functions num/den of Laurent polynomials over a coefficient
//! field, with exact cross-multiplication equality and gcd reduction.

use crate::laurent::{FieldCoeff, Laurent};


/// A quotient of Laurent polynomials over a field; denominator nonzero.
#[derive(Debug, Clone)]
pub struct RatFun<C: FieldCoeff> {
    pub num: Laurent<C>,
    pub den: Laurent<C>,
}

impl<C: FieldCoeff> RatFun<C> {
    pub fn new(num: Laurent<C>, den: Laurent<C>) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut r = RatFun { num, den };
        r.reduce();
        r
    }

    pub fn from_poly(num: Laurent<C>) -> Self {
        RatFun {
            num,
            den: Laurent::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(Laurent::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Laurent::one())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Exact Laurent polynomial value, if the denominator divides.
    pub fn to_poly(&self) -> Option<Laurent<C>> {
        self.num.div_exact(&self.den)
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = Laurent::one();
            return;
        }
        let g = laurent_gcd(&self.num, &self.den);
        if !g.is_one() {
            self.num = self.num.div_exact(&g).expect("gcd divides num");
            self.den = self.den.div_exact(&g).expect("gcd divides den");
        }
        // normalize: monic denominator anchored at exponent 0
        let top = self.den.max_exp().unwrap();
        let lead = self.den.coeff(top);
        let lead_inv = lead.inv();
        let lo = self.den.min_exp().unwrap();
        self.den = self.den.shift(-lo).scale(&lead_inv);
        self.num = self.num.shift(-lo).scale(&lead_inv);
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(
            self.num.mul(&o.den).sub(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn div(&self, o: &Self) -> Self {
        assert!(!o.is_zero(), "division by zero rational function");
        Self::new(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    pub fn neg(&self) -> Self {
        RatFun {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i64) -> Self {
        if e == 0 {
            return Self::one();
        }
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut acc = Self::one();
        let mut b = base;
        let mut n = e.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&b);
            }
            n >>= 1;
            if n > 0 {
                b = b.mul(&b);
            }
        }
        acc
    }
}

impl<C: FieldCoeff> PartialEq for RatFun<C> {
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

/// Gcd of two Laurent polynomials over a field (as polynomials after
/// clearing the monomial content; monomials are units here).
pub fn laurent_gcd<C: FieldCoeff>(a: &Laurent<C>, b: &Laurent<C>) -> Laurent<C> {
    if a.is_zero() {
        return normalize(b);
    }
    if b.is_zero() {
        return normalize(a);
    }
    let mut x = a.shift(-a.min_exp().unwrap());
    let mut y = b.shift(-b.min_exp().unwrap());
    while !y.is_zero() {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
    }
    normalize(&x)
}

fn normalize<C: FieldCoeff>(p: &Laurent<C>) -> Laurent<C> {
    if p.is_zero() {
        return Laurent::zero();
    }
    let lo = p.min_exp().unwrap();
    let shifted = p.shift(-lo);
    let lead = shifted.coeff(shifted.max_exp().unwrap());
    shifted.scale(&lead.inv())
}

fn poly_rem<C: FieldCoeff>(a: &Laurent<C>, b: &Laurent<C>) -> Laurent<C> {
    // both have min_exp 0; ordinary polynomial remainder
    let dtop = b.max_exp().unwrap();
    let dlead_inv = b.coeff(dtop).inv();
    let mut rem = a.clone();
    while !rem.is_zero() {
        let rtop = rem.max_exp().unwrap();
        if rtop < dtop {
            break;
        }
        let c = rem.coeff(rtop) * dlead_inv.clone();
        rem.sub_assign(&b.shift(rtop - dtop).scale(&c));
    }
    rem
}

/// Solve the square linear system M x = rhs over the fraction field by
/// Gaussian elimination; `None` when M is singular.
pub fn solve_linear<C: FieldCoeff>(
    mut m: Vec<Vec<RatFun<C>>>,
    mut rhs: Vec<Vec<RatFun<C>>>,
) -> Option<Vec<Vec<RatFun<C>>>> {
    let n = m.len();
    let k = rhs[0].len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        rhs.swap(col, piv);
        let inv = m[col][col].inv();
        for c in col..n {
            m[col][c] = m[col][c].mul(&inv);
        }
        for c in 0..k {
            rhs[col][c] = rhs[col][c].mul(&inv);
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in col..n {
                let t = f.mul(&m[col][c]);
                m[r][c] = m[r][c].sub(&t);
            }
            for c in 0..k {
                let t = f.mul(&rhs[col][c]);
                rhs[r][c] = rhs[r][c].sub(&t);
            }
        }
    }
    Some(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    type Q = BigRational;
    fn p(pairs: &[(i64, i64)]) -> Laurent<Q> {
        Laurent::from_terms(
            pairs
                .iter()
                .map(|&(e, c)| (e, BigRational::from(BigInt::from(c)))),
        )
    }

    #[test]
    fn arithmetic_and_equality() {
        // (v^2 - 1)/(v - 1) == v + 1
        let a = RatFun::new(p(&[(2, 1), (0, -1)]), p(&[(1, 1), (0, -1)]));
        let b = RatFun::from_poly(p(&[(1, 1), (0, 1)]));
        assert_eq!(a, b);
        assert_eq!(a.to_poly().unwrap(), p(&[(1, 1), (0, 1)]));
        let half = RatFun::new(p(&[(0, 1)]), p(&[(1, 1), (0, 1)]));
        let s = half.add(&half);
        assert_eq!(
            s,
            RatFun::new(p(&[(0, 2)]), p(&[(1, 1), (0, 1)]))
        );
        assert!(half.sub(&half).is_zero());
        assert_eq!(half.mul(&half.inv()), RatFun::one());
        assert_eq!(b.pow(-1).mul(&b), RatFun::one());
    }

    #[test]
    fn linear_solve() {
        // [[1, v], [v, v^2+1]] has determinant 1
        let m = vec![
            vec![RatFun::from_poly(p(&[(0, 1)])), RatFun::from_poly(p(&[(1, 1)]))],
            vec![
                RatFun::from_poly(p(&[(1, 1)])),
                RatFun::from_poly(p(&[(2, 1), (0, 1)])),
            ],
        ];
        let id = vec![
            vec![RatFun::one(), RatFun::zero()],
            vec![RatFun::zero(), RatFun::one()],
        ];
        let inv = solve_linear(m.clone(), id).unwrap();
        // inv = [[v^2+1, -v], [-v, 1]]
        assert_eq!(inv[0][0].to_poly().unwrap(), p(&[(2, 1), (0, 1)]));
        assert_eq!(inv[0][1].to_poly().unwrap(), p(&[(1, -1)]));
        assert_eq!(inv[1][1].to_poly().unwrap(), p(&[(0, 1)]));
        // singular matrix
        let sing = vec![
            vec![RatFun::from_poly(p(&[(1, 1)])), RatFun::from_poly(p(&[(2, 1)]))],
            vec![RatFun::from_poly(p(&[(1, 1)])), RatFun::from_poly(p(&[(2, 1)]))],
        ];
        let id2 = vec![
            vec![RatFun::one(), RatFun::zero()],
            vec![RatFun::zero(), RatFun::one()],
        ];
        assert!(solve_linear::<Q>(sing, id2).is_none());
    }
}
