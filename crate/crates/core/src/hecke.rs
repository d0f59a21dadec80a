//! The Iwahori-Hecke algebra of a finite Coxeter system over Z[v^{+-1}].
//!
//! Elements are finitely supported maps from group elements to Laurent
//! polynomials in the standard basis {h_w}. Products are computed by
//! right-multiplication one generator at a time along canonical words, using
//! the quadratic relation h_s^2 = (v^-1 - v) h_s + 1. The module also houses
//! the standard trace and its structure-constant tensor c_xyz = tr(h_x h_y
//! h_z), the bar/anti/duality involutions, the Kazhdan-Lusztig basis, dual
//! bases and the Casimir builders feeding the surface invariants.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use rayon::prelude::*;
use thiserror::Error;

use crate::coxeter::{CoxeterSystem, ElemId};
use crate::laurent::{Coeff, Laurent, LaurentPoly};
use crate::numfield::NfElem;
use crate::ratfun::{solve_linear, RatFun};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeckeError {
    #[error("elements are in different bases")]
    BasisMismatch,
    #[error("elements belong to different Coxeter systems")]
    SystemMismatch,
    #[error("Gram matrix is singular; the family is not a basis")]
    SingularGram,
    #[error("dual basis has non-integral coordinates")]
    NonIntegralDual,
    #[error("structure tensor guard exceeded: {0} entries")]
    SizeGuardExceeded(u64),
    #[error("cannot parse element: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Standard,
    Kl,
}

/// `xi = v^-1 - v`, the coefficient of the quadratic relation.
pub fn xi<C: Coeff>() -> Laurent<C> {
    Laurent::from_terms([(-1, C::one()), (1, -C::one())])
}

/// A Hecke algebra element: sparse coordinates over the group, tagged with
/// the basis the coordinates refer to.
#[derive(Clone)]
pub struct HeckeElt<C: Coeff> {
    pub system: Arc<CoxeterSystem>,
    pub basis: Basis,
    coords: BTreeMap<u32, Laurent<C>>,
}

pub type HeckeElement = HeckeElt<BigInt>;

impl<C: Coeff> fmt::Debug for HeckeElt<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.basis {
            Basis::Standard => "h",
            Basis::Kl => "b",
        };
        if self.coords.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.coords {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(
                f,
                "({:?})*{}[{}]",
                c,
                tag,
                self.system.word_string(ElemId(*w))
            )?;
        }
        Ok(())
    }
}

impl<C: Coeff> PartialEq for HeckeElt<C> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.system, &other.system)
            && self.basis == other.basis
            && self.coords == other.coords
    }
}

impl<C: Coeff> HeckeElt<C> {
    pub fn zero(system: &Arc<CoxeterSystem>) -> Self {
        HeckeElt {
            system: system.clone(),
            basis: Basis::Standard,
            coords: BTreeMap::new(),
        }
    }

    pub fn unit(system: &Arc<CoxeterSystem>) -> Self {
        Self::basis_elt(system, ElemId::IDENTITY)
    }

    /// The standard basis vector h_w.
    pub fn basis_elt(system: &Arc<CoxeterSystem>, w: ElemId) -> Self {
        let mut coords = BTreeMap::new();
        coords.insert(w.0, Laurent::one());
        HeckeElt {
            system: system.clone(),
            basis: Basis::Standard,
            coords,
        }
    }

    pub fn from_coords<I: IntoIterator<Item = (ElemId, Laurent<C>)>>(
        system: &Arc<CoxeterSystem>,
        basis: Basis,
        iter: I,
    ) -> Self {
        let mut e = HeckeElt {
            system: system.clone(),
            basis,
            coords: BTreeMap::new(),
        };
        for (w, c) in iter {
            e.add_coord(w, &c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coords.len()
    }

    pub fn coord(&self, w: ElemId) -> Laurent<C> {
        self.coords.get(&w.0).cloned().unwrap_or_default()
    }

    pub fn coords(&self) -> impl Iterator<Item = (ElemId, &Laurent<C>)> {
        self.coords.iter().map(|(w, c)| (ElemId(*w), c))
    }

    pub fn support(&self) -> impl Iterator<Item = ElemId> + '_ {
        self.coords.keys().map(|&w| ElemId(w))
    }

    pub fn add_coord(&mut self, w: ElemId, c: &Laurent<C>) {
        if c.is_zero() {
            return;
        }
        match self.coords.get_mut(&w.0) {
            Some(cur) => {
                cur.add_assign(c);
                if cur.is_zero() {
                    self.coords.remove(&w.0);
                }
            }
            None => {
                self.coords.insert(w.0, c.clone());
            }
        }
    }

    fn assert_compatible(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.system, &other.system),
            "{}",
            HeckeError::SystemMismatch
        );
        assert!(self.basis == other.basis, "{}", HeckeError::BasisMismatch);
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let mut r = self.clone();
        for (w, c) in other.coords() {
            r.add_coord(w, c);
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let mut r = self.clone();
        for (w, c) in other.coords() {
            r.add_coord(w, &c.neg());
        }
        r
    }

    pub fn neg(&self) -> Self {
        HeckeElt {
            system: self.system.clone(),
            basis: self.basis,
            coords: self
                .coords
                .iter()
                .map(|(w, c)| (*w, c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Laurent<C>) -> Self {
        if c.is_zero() {
            return HeckeElt {
                system: self.system.clone(),
                basis: self.basis,
                coords: BTreeMap::new(),
            };
        }
        let mut out = HeckeElt {
            system: self.system.clone(),
            basis: self.basis,
            coords: BTreeMap::new(),
        };
        for (w, x) in self.coords() {
            out.add_coord(w, &x.mul(c));
        }
        out
    }

    /// Right multiplication by the generator h_s (standard basis).
    pub fn mul_gen_right(&self, s: usize) -> Self {
        debug_assert_eq!(self.basis, Basis::Standard);
        let sys = &self.system;
        let xi: Laurent<C> = xi();
        let mut out = Self::zero(sys);
        for (w, c) in self.coords() {
            let ws = sys.mul_gen(w, s);
            if sys.is_right_descent(w, s) {
                out.add_coord(w, &c.mul(&xi));
                out.add_coord(ws, c);
            } else {
                out.add_coord(ws, c);
            }
        }
        out
    }

    /// Left multiplication by the generator h_s (standard basis).
    pub fn mul_gen_left(&self, s: usize) -> Self {
        debug_assert_eq!(self.basis, Basis::Standard);
        let sys = &self.system;
        let xi: Laurent<C> = xi();
        let mut out = Self::zero(sys);
        for (w, c) in self.coords() {
            let sw = sys.gen_mul(s, w);
            if sys.is_left_descent(w, s) {
                out.add_coord(w, &c.mul(&xi));
                out.add_coord(sw, c);
            } else {
                out.add_coord(sw, c);
            }
        }
        out
    }

    /// Right multiplication by the basis vector h_u.
    pub fn mul_basis_right(&self, u: ElemId) -> Self {
        let mut acc = self.clone();
        let word = self.system.word(u).to_vec();
        for s in word {
            acc = acc.mul_gen_right(s as usize);
        }
        acc
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, HeckeError> {
        if !Arc::ptr_eq(&self.system, &other.system) {
            return Err(HeckeError::SystemMismatch);
        }
        if self.basis != Basis::Standard || other.basis != Basis::Standard {
            return Err(HeckeError::BasisMismatch);
        }
        let mut out = Self::zero(&self.system);
        for (u, cu) in other.coords() {
            let part = self.mul_basis_right(u);
            for (w, c) in part.coords() {
                out.add_coord(w, &c.mul(cu));
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("compatible Hecke elements")
    }

    pub fn pow(&self, n: u64) -> Self {
        let mut acc = Self::unit(&self.system);
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

    /// The standard trace: the coefficient of h_e.
    pub fn trace(&self) -> Laurent<C> {
        debug_assert_eq!(self.basis, Basis::Standard);
        self.coord(ElemId::IDENTITY)
    }

    /// tr(self * other) without forming the product: tr(h_x h_y) is
    /// delta_{x, y^-1}, so the trace pairs coordinates at mutually inverse
    /// group elements.
    pub fn trace_mul(&self, other: &Self) -> Laurent<C> {
        self.assert_compatible(other);
        debug_assert_eq!(self.basis, Basis::Standard);
        let sys = &self.system;
        let mut acc = Laurent::zero();
        for (w, c) in self.coords() {
            let winv = sys.inverse(w);
            let d = other.coord(winv);
            if !d.is_zero() {
                acc.add_assign(&c.mul(&d));
            }
        }
        acc
    }

    /// Whether the element commutes with every generator.
    pub fn is_central(&self) -> bool {
        (0..self.system.rank()).all(|s| self.mul_gen_left(s) == self.mul_gen_right(s))
    }

    pub fn map_coeffs<D: Coeff, F: Fn(&Laurent<C>) -> Laurent<D>>(&self, f: F) -> HeckeElt<D> {
        let mut out: HeckeElt<D> = HeckeElt {
            system: self.system.clone(),
            basis: self.basis,
            coords: BTreeMap::new(),
        };
        for (w, c) in self.coords() {
            let d = f(c);
            if !d.is_zero() {
                out.coords.insert(w.0, d);
            }
        }
        out
    }
}

impl HeckeElement {
    /// Lift integer coordinates into the system's scalar field.
    pub fn to_field(&self) -> HeckeElt<NfElem> {
        self.map_coeffs(|c| c.map_coeffs(|x| NfElem::rational(BigRational::from(x.clone()))))
    }
}

impl HeckeElt<NfElem> {
    /// Drop back to integer coordinates when all coefficients are integers.
    pub fn to_int(&self) -> Option<HeckeElement> {
        let mut out = HeckeElement {
            system: self.system.clone(),
            basis: self.basis,
            coords: BTreeMap::new(),
        };
        for (w, c) in self.coords() {
            let mut ic = LaurentPoly::zero();
            for (e, x) in c.terms() {
                let r = x.to_rational()?;
                if !r.is_integer() {
                    return None;
                }
                ic.add_term(e, &r.to_integer());
            }
            out.coords.insert(w.0, ic);
        }
        Some(out)
    }
}

// ---------------------------------------------------------------------------
// Involutions
// ---------------------------------------------------------------------------

/// (h_w)^-1, by inverting the canonical word letter by letter;
/// (h_s)^-1 = h_s + v - v^-1.
pub fn inverse_of_basis(system: &Arc<CoxeterSystem>, w: ElemId) -> HeckeElement {
    let mut acc = HeckeElement::unit(system);
    let gen_inv: Vec<HeckeElement> = (0..system.rank())
        .map(|s| {
            let mut e = HeckeElement::basis_elt(system, system.generator(s));
            e.add_coord(
                ElemId::IDENTITY,
                &LaurentPoly::from_pairs(&[(1, 1), (-1, -1)]),
            );
            e
        })
        .collect();
    for &s in system.word(w).iter().rev() {
        acc = acc.mul(&gen_inv[s as usize]);
    }
    acc
}

/// The bar involution: v -> v^-1 on coefficients, h_w -> (h_{w^-1})^-1.
pub fn bar_involution(a: &HeckeElement) -> HeckeElement {
    debug_assert_eq!(a.basis, Basis::Standard);
    let sys = &a.system;
    let mut out = HeckeElement::zero(sys);
    for (w, c) in a.coords() {
        let t = inverse_of_basis(sys, sys.inverse(w)).scale(&c.bar());
        out = out.add(&t);
    }
    out
}

/// The anti-involution h_w -> h_{w^-1} (coefficients untouched).
pub fn anti_involution_sigma<C: Coeff>(a: &HeckeElt<C>) -> HeckeElt<C> {
    debug_assert_eq!(a.basis, Basis::Standard);
    let sys = a.system.clone();
    HeckeElt::from_coords(
        &sys,
        Basis::Standard,
        a.coords().map(|(w, c)| (sys.inverse(w), c.clone())),
    )
}

/// The duality algebra homomorphism gamma(h_s) = -(h_s)^-1, extended
/// multiplicatively along canonical words. In the unnormalized generators
/// T_s = v^-1 h_s this is the classical gamma(T_s) = -q T_s^-1; it is the
/// unique scalar multiple of (h_s)^-1 whose eigenvalue pair matches that of
/// h_s, so it respects the quadratic relation.
pub fn gamma_map(a: &HeckeElement) -> HeckeElement {
    debug_assert_eq!(a.basis, Basis::Standard);
    let sys = &a.system;
    // gamma(h_s) = -h_s - v + v^-1
    let gen_img: Vec<HeckeElement> = (0..sys.rank())
        .map(|s| {
            let mut e = HeckeElement::zero(sys);
            e.add_coord(sys.generator(s), &LaurentPoly::from_pairs(&[(0, -1)]));
            e.add_coord(
                ElemId::IDENTITY,
                &LaurentPoly::from_pairs(&[(1, -1), (-1, 1)]),
            );
            e
        })
        .collect();
    let mut out = HeckeElement::zero(sys);
    for (w, c) in a.coords() {
        let mut term = HeckeElement::unit(sys);
        for &s in sys.word(w) {
            term = term.mul(&gen_img[s as usize]);
        }
        out = out.add(&term.scale(c));
    }
    out
}

// ---------------------------------------------------------------------------
// Structure constants
// ---------------------------------------------------------------------------

/// c_xyz = tr(h_x h_y h_z): the coefficient of h_{z^-1} in h_x h_y.
pub fn structure_constant(
    system: &Arc<CoxeterSystem>,
    x: ElemId,
    y: ElemId,
    z: ElemId,
) -> LaurentPoly {
    let p = HeckeElement::basis_elt(system, x).mul_basis_right(y);
    p.coord(system.inverse(z))
}

/// Dense |W|^3 table of structure constants.
pub struct StructureTensor {
    pub system: Arc<CoxeterSystem>,
    size: usize,
    table: Vec<LaurentPoly>,
}

pub const DEFAULT_TENSOR_ENTRY_LIMIT: u64 = 2_000_000;

impl StructureTensor {
    pub fn build(system: &Arc<CoxeterSystem>) -> Result<Self, HeckeError> {
        Self::build_with_limit(system, DEFAULT_TENSOR_ENTRY_LIMIT)
    }

    pub fn build_with_limit(
        system: &Arc<CoxeterSystem>,
        limit: u64,
    ) -> Result<Self, HeckeError> {
        let n = system.size();
        let entries = (n as u64).pow(3);
        if entries > limit {
            return Err(HeckeError::SizeGuardExceeded(entries));
        }
        let rows: Vec<Vec<LaurentPoly>> = (0..n as u32)
            .into_par_iter()
            .map(|x| {
                let mut row = vec![LaurentPoly::zero(); n * n];
                for y in 0..n as u32 {
                    let p = HeckeElement::basis_elt(system, ElemId(x)).mul_basis_right(ElemId(y));
                    for (u, c) in p.coords() {
                        let z = system.inverse(u);
                        row[y as usize * n + z.index()] = c.clone();
                    }
                }
                row
            })
            .collect();
        let mut table = Vec::with_capacity(n * n * n);
        for row in rows {
            table.extend(row);
        }
        Ok(StructureTensor {
            system: system.clone(),
            size: n,
            table,
        })
    }

    #[inline]
    pub fn c(&self, x: ElemId, y: ElemId, z: ElemId) -> &LaurentPoly {
        &self.table[(x.index() * self.size + y.index()) * self.size + z.index()]
    }

    /// The structure constant with each index optionally inverted, per the
    /// orientation of the edge against the face.
    pub fn c_oriented(&self, ids: [(ElemId, bool); 3]) -> &LaurentPoly {
        let f = |(w, forward): (ElemId, bool)| {
            if forward {
                w
            } else {
                self.system.inverse(w)
            }
        };
        self.c(f(ids[0]), f(ids[1]), f(ids[2]))
    }
}

// ---------------------------------------------------------------------------
// Kazhdan-Lusztig basis
// ---------------------------------------------------------------------------

/// The Kazhdan-Lusztig basis {b_w}, each stored in standard coordinates.
pub struct KlBasis {
    pub system: Arc<CoxeterSystem>,
    elts: Vec<HeckeElement>,
}

impl KlBasis {
    /// Inductive construction: b_w is extracted from b_s b_{sw} by
    /// subtracting multiples of shorter b_z until every lower coordinate
    /// lies in vZ[v]. Subtracted multiples are forced to be bar-symmetric,
    /// which pins them uniquely.
    pub fn build(system: &Arc<CoxeterSystem>) -> Self {
        let n = system.size();
        let mut elts: Vec<HeckeElement> = Vec::with_capacity(n);
        elts.push(HeckeElement::unit(system));
        for id in 1..n as u32 {
            let w = ElemId(id);
            let s = system
                .left_descents(w)
                .next()
                .expect("non-identity has a descent");
            let rest = system.gen_mul(s, w); // sw, shorter, already built
            debug_assert!(rest.0 < id);
            // b_s * b_{sw}
            let mut c = elts[rest.index()].mul_gen_left(s);
            let v = LaurentPoly::term(1, 1);
            c = c.add(&elts[rest.index()].scale(&v));
            // straighten: largest bad coordinate first
            loop {
                let mut bad: Option<(ElemId, LaurentPoly)> = None;
                for (z, coef) in c.coords() {
                    if z == w {
                        continue;
                    }
                    if coef.min_exp().map(|e| e <= 0).unwrap_or(false) {
                        bad = Some((z, coef.clone()));
                    }
                }
                let Some((z, coef)) = bad else { break };
                debug_assert!(system.length(z) < system.length(w));
                // the bar-symmetric completion of the non-positive part
                let mut a = LaurentPoly::zero();
                for (d, cd) in coef.terms() {
                    if d < 0 {
                        a.add_term(d, cd);
                        a.add_term(-d, cd);
                    } else if d == 0 {
                        a.add_term(0, cd);
                    }
                }
                c = c.sub(&elts[z.index()].scale(&a));
            }
            debug_assert!(c.coord(w).is_one());
            elts.push(c);
        }
        KlBasis {
            system: system.clone(),
            elts,
        }
    }

    /// b_w in standard coordinates.
    pub fn element(&self, w: ElemId) -> &HeckeElement {
        &self.elts[w.index()]
    }

    /// Expand a standard-basis element in the KL basis (unitriangular, so a
    /// greedy sweep from the longest support element works).
    pub fn to_kl(&self, a: &HeckeElement) -> HeckeElement {
        assert_eq!(a.basis, Basis::Standard);
        let mut rest = a.clone();
        let mut out = HeckeElement::zero(&self.system);
        out.basis = Basis::Kl;
        while let Some(w) = rest.support().max_by_key(|w| (self.system.length(*w), *w)) {
            let c = rest.coord(w);
            rest = rest.sub(&self.elts[w.index()].scale(&c));
            out.add_coord(w, &c);
        }
        out
    }

    /// Interpret KL coordinates and return the standard-basis element.
    pub fn from_kl(&self, a: &HeckeElement) -> HeckeElement {
        assert_eq!(a.basis, Basis::Kl);
        let mut out = HeckeElement::zero(&self.system);
        for (w, c) in a.coords() {
            out = out.add(&self.elts[w.index()].scale(c));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Dual bases and Casimir elements
// ---------------------------------------------------------------------------

/// A basis (C_w) of the algebra together with its trace-dual basis (C^w):
/// tr(C_x C^y) = delta_{x,y}. Both sides are stored in standard coordinates,
/// indexed by element id.
pub struct DualBasisPair {
    pub system: Arc<CoxeterSystem>,
    pub basis: Vec<HeckeElement>,
    pub dual: Vec<HeckeElement>,
}

impl DualBasisPair {
    /// The standard pair: C_w = h_w, C^w = h_{w^-1}.
    pub fn standard(system: &Arc<CoxeterSystem>) -> Self {
        let basis = system
            .elements()
            .map(|w| HeckeElement::basis_elt(system, w))
            .collect();
        let dual = system
            .elements()
            .map(|w| HeckeElement::basis_elt(system, system.inverse(w)))
            .collect();
        DualBasisPair {
            system: system.clone(),
            basis,
            dual,
        }
    }

    /// Trace-dual basis of an arbitrary basis by exact Gram inversion over
    /// the fraction field, with a final integrality check.
    pub fn from_basis(
        system: &Arc<CoxeterSystem>,
        basis: Vec<HeckeElement>,
    ) -> Result<Self, HeckeError> {
        let n = system.size();
        assert_eq!(basis.len(), n, "need |W| elements");
        let to_rf = |p: &LaurentPoly| {
            RatFun::from_poly(p.map_coeffs(|c| BigRational::from(c.clone())))
        };
        // Gram matrix G[x][z] = tr(C_x C_z)
        let gram: Vec<Vec<RatFun<BigRational>>> = (0..n)
            .map(|x| {
                (0..n)
                    .map(|z| to_rf(&basis[x].trace_mul(&basis[z])))
                    .collect()
            })
            .collect();
        let id: Vec<Vec<RatFun<BigRational>>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| if r == c { RatFun::one() } else { RatFun::zero() })
                    .collect()
            })
            .collect();
        let inv = solve_linear(gram, id).ok_or(HeckeError::SingularGram)?;
        // C^y = sum_z (G^-1)[z][y] C_z
        let mut dual = Vec::with_capacity(n);
        for y in 0..n {
            let mut acc: HeckeElt<BigRational> = HeckeElt {
                system: system.clone(),
                basis: Basis::Standard,
                coords: BTreeMap::new(),
            };
            for (z, b) in basis.iter().enumerate() {
                let coef = inv[z][y]
                    .to_poly()
                    .ok_or(HeckeError::NonIntegralDual)?;
                let zb = b.map_coeffs(|c| c.map_coeffs(|x| BigRational::from(x.clone())));
                acc = acc.add(&zb.scale(&coef));
            }
            // integrality
            let mut int_elt = HeckeElement::zero(system);
            for (w, c) in acc.coords() {
                let mut ic = LaurentPoly::zero();
                for (e, x) in c.terms() {
                    if !x.is_integer() {
                        return Err(HeckeError::NonIntegralDual);
                    }
                    ic.add_term(e, &x.to_integer());
                }
                int_elt.add_coord(w, &ic);
            }
            dual.push(int_elt);
        }
        let pair = DualBasisPair {
            system: system.clone(),
            basis,
            dual,
        };
        if !pair.verify() {
            return Err(HeckeError::SingularGram);
        }
        Ok(pair)
    }

    /// Re-check tr(C_x C^y) = delta_{x,y}.
    pub fn verify(&self) -> bool {
        let n = self.system.size();
        for x in 0..n {
            for y in 0..n {
                let t = self.basis[x].trace_mul(&self.dual[y]);
                let expected = if x == y {
                    LaurentPoly::one()
                } else {
                    LaurentPoly::zero()
                };
                if t != expected {
                    return false;
                }
            }
        }
        true
    }
}

/// The order-2 Casimir element: sum_w C_w C^w. Central; basis-independent.
pub fn casimir2(pair: &DualBasisPair) -> HeckeElement {
    let sys = &pair.system;
    let n = sys.size();
    (0..n)
        .into_par_iter()
        .map(|w| pair.basis[w].mul(&pair.dual[w]))
        .reduce(|| HeckeElement::zero(sys), |a, b| a.add(&b))
}

/// The conjugation average: sum_w C_w h C^w. Central for every h.
pub fn conj_average(pair: &DualBasisPair, h: &HeckeElement) -> HeckeElement {
    let sys = &pair.system;
    let n = sys.size();
    (0..n)
        .into_par_iter()
        .map(|w| pair.basis[w].mul(h).mul(&pair.dual[w]))
        .reduce(|| HeckeElement::zero(sys), |a, b| a.add(&b))
}

/// The order-4 Casimir element: sum_{x,y} C_x C_y C^x C^y. Central.
pub fn casimir4(pair: &DualBasisPair) -> HeckeElement {
    let sys = &pair.system;
    let n = sys.size();
    (0..n)
        .into_par_iter()
        .map(|x| {
            let inner = conj_average_seq(pair, &pair.dual[x]);
            pair.basis[x].mul(&inner)
        })
        .reduce(|| HeckeElement::zero(sys), |a, b| a.add(&b))
}

fn conj_average_seq(pair: &DualBasisPair, h: &HeckeElement) -> HeckeElement {
    let sys = &pair.system;
    let mut acc = HeckeElement::zero(sys);
    for w in 0..sys.size() {
        acc = acc.add(&pair.basis[w].mul(h).mul(&pair.dual[w]));
    }
    acc
}

// ---------------------------------------------------------------------------
// JSON form
// ---------------------------------------------------------------------------

impl HeckeElement {
    /// {"basis":"standard"|"kl","terms":[{"word":"121","coef":<poly-json>}]}
    pub fn to_json(&self) -> serde_json::Value {
        let basis = match self.basis {
            Basis::Standard => "standard",
            Basis::Kl => "kl",
        };
        let terms: Vec<serde_json::Value> = self
            .coords()
            .map(|(w, c)| {
                serde_json::json!({
                    "word": self.system.word_string(w),
                    "coef": c.to_json(),
                })
            })
            .collect();
        serde_json::json!({"basis": basis, "terms": terms})
    }

    pub fn from_json(
        system: &Arc<CoxeterSystem>,
        value: &serde_json::Value,
    ) -> Result<Self, HeckeError> {
        let basis = match value.get("basis").and_then(|b| b.as_str()) {
            Some("standard") | None => Basis::Standard,
            Some("kl") => Basis::Kl,
            Some(other) => return Err(HeckeError::Parse(format!("unknown basis {other:?}"))),
        };
        let terms = value
            .get("terms")
            .and_then(|t| t.as_array())
            .ok_or_else(|| HeckeError::Parse("missing \"terms\"".into()))?;
        let mut out = HeckeElement::zero(system);
        out.basis = basis;
        for t in terms {
            let word = t
                .get("word")
                .and_then(|w| w.as_str())
                .ok_or_else(|| HeckeError::Parse("missing term \"word\"".into()))?;
            let w = system
                .parse_word(word)
                .map_err(|e| HeckeError::Parse(e.to_string()))?;
            let coef = match t.get("coef") {
                Some(serde_json::Value::String(s)) => s
                    .parse::<LaurentPoly>()
                    .map_err(|e| HeckeError::Parse(e.to_string()))?,
                Some(v) => {
                    let (p, var) = crate::laurent::poly_from_json(v)
                        .map_err(|e| HeckeError::Parse(e.to_string()))?;
                    if var == "q" {
                        crate::laurent::QView::from_q_laurent(p).to_v_poly()
                    } else {
                        p
                    }
                }
                None => LaurentPoly::one(),
            };
            out.add_coord(w, &coef);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::CoxeterType;
    use rand::{Rng, SeedableRng};

    fn sys(t: &str) -> Arc<CoxeterSystem> {
        CoxeterSystem::build(t.parse::<CoxeterType>().unwrap()).unwrap()
    }

    fn h(system: &Arc<CoxeterSystem>, word: &str) -> HeckeElement {
        HeckeElement::basis_elt(system, system.parse_word(word).unwrap())
    }

    fn vp(pairs: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_pairs(pairs)
    }

    fn random_elt(system: &Arc<CoxeterSystem>, rng: &mut impl Rng) -> HeckeElement {
        let mut e = HeckeElement::zero(system);
        for _ in 0..3 {
            let w = ElemId(rng.gen_range(0..system.size() as u32));
            let c = vp(&[
                (rng.gen_range(-2..=2), rng.gen_range(-3..=3)),
                (rng.gen_range(-2..=2), rng.gen_range(-3..=3)),
            ]);
            e.add_coord(w, &c);
        }
        e
    }

    #[test]
    fn quadratic_relation() {
        let w = sys("A1");
        let hs = h(&w, "1");
        let sq = hs.mul(&hs);
        // h_s^2 = 1 + (v^-1 - v) h_s
        let mut expect = HeckeElement::unit(&w);
        expect.add_coord(w.parse_word("1").unwrap(), &vp(&[(-1, 1), (1, -1)]));
        assert_eq!(sq, expect);
    }

    #[test]
    fn worked_product_in_a2() {
        // h_{sts} h_{st} = h_s + xi h_{st} + xi h_{ts} + xi^2 h_{sts}
        let w = sys("A2");
        let p = h(&w, "121").mul(&h(&w, "12"));
        let xi = vp(&[(-1, 1), (1, -1)]);
        let mut expect = HeckeElement::zero(&w);
        expect.add_coord(w.parse_word("1").unwrap(), &LaurentPoly::one());
        expect.add_coord(w.parse_word("12").unwrap(), &xi);
        expect.add_coord(w.parse_word("21").unwrap(), &xi);
        expect.add_coord(w.parse_word("121").unwrap(), &xi.mul(&xi));
        assert_eq!(p, expect);
    }

    #[test]
    fn unit_and_reduced_words() {
        let w = sys("A2");
        let e = HeckeElement::unit(&w);
        let x = h(&w, "121");
        assert_eq!(e.mul(&x), x);
        assert_eq!(x.mul(&e), x);
        // h_{sts} = h_s h_t h_s
        assert_eq!(h(&w, "1").mul(&h(&w, "2")).mul(&h(&w, "1")), x);
    }

    #[test]
    fn trace_values() {
        let w = sys("A2");
        assert_eq!(h(&w, "1").trace(), LaurentPoly::zero());
        assert_eq!(HeckeElement::unit(&w).trace(), LaurentPoly::one());
        assert_eq!(h(&w, "1").mul(&h(&w, "1")).trace(), LaurentPoly::one());
        assert_eq!(h(&w, "1").mul(&h(&w, "2")).trace(), LaurentPoly::zero());
        // via trace_mul too
        assert_eq!(h(&w, "1").trace_mul(&h(&w, "1")), LaurentPoly::one());
        assert_eq!(h(&w, "12").trace_mul(&h(&w, "21")), LaurentPoly::one());
        assert_eq!(h(&w, "12").trace_mul(&h(&w, "12")), LaurentPoly::zero());
    }

    #[test]
    fn structure_constants_a1() {
        let w = sys("A1");
        let e = ElemId::IDENTITY;
        let s = w.parse_word("1").unwrap();
        assert_eq!(structure_constant(&w, s, s, s), vp(&[(-1, 1), (1, -1)]));
        assert_eq!(structure_constant(&w, e, s, s), LaurentPoly::one());
        assert_eq!(structure_constant(&w, e, e, s), LaurentPoly::zero());
        assert_eq!(structure_constant(&w, e, e, e), LaurentPoly::one());
        assert_eq!(structure_constant(&w, s, e, s), LaurentPoly::one());
    }

    #[test]
    fn structure_tensor_properties() {
        for t in ["A1", "A2", "B2"] {
            let w = sys(t);
            let tensor = StructureTensor::build(&w).unwrap();
            for x in w.elements() {
                for y in w.elements() {
                    for z in w.elements() {
                        let c = tensor.c(x, y, z);
                        // cyclic symmetry
                        assert_eq!(c, tensor.c(y, z, x), "{t} cyclic");
                        // orientation reversal
                        assert_eq!(
                            c,
                            tensor.c(w.inverse(z), w.inverse(y), w.inverse(x)),
                            "{t} reversal"
                        );
                        // c_{xye} = delta_{x, y^-1}
                        if z == ElemId::IDENTITY {
                            let expect = if x == w.inverse(y) {
                                LaurentPoly::one()
                            } else {
                                LaurentPoly::zero()
                            };
                            assert_eq!(*c, expect, "{t} trace form");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn flip_identity_sampled() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let w = sys("A2");
        let tensor = StructureTensor::build(&w).unwrap();
        for _ in 0..50 {
            let pick = |rng: &mut rand_chacha::ChaCha8Rng| ElemId(rng.gen_range(0..6));
            let (x, y, z, v) = (pick(&mut rng), pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let mut lhs = LaurentPoly::zero();
            let mut rhs = LaurentPoly::zero();
            for t in w.elements() {
                lhs.add_assign(&tensor.c(x, y, t).mul(tensor.c(w.inverse(t), z, v)));
                rhs.add_assign(&tensor.c(y, z, t).mul(tensor.c(x, w.inverse(t), v)));
            }
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn xi_positivity_of_structure_constants() {
        // every standard structure constant is a nonnegative integer
        // polynomial in xi = v^-1 - v
        for t in ["A2", "B2"] {
            let w = sys(t);
            let tensor = StructureTensor::build(&w).unwrap();
            for x in w.elements() {
                for y in w.elements() {
                    for z in w.elements() {
                        let c = tensor.c(x, y, z);
                        if c.is_zero() {
                            continue;
                        }
                        let coeffs = c.expand_in_xi().unwrap();
                        assert!(
                            coeffs.iter().all(|a| a.sign() != num_bigint::Sign::Minus),
                            "{t}: c({x:?},{y:?},{z:?}) = {c} not xi-positive"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn basis_inverses() {
        let w = sys("A2");
        let s = w.parse_word("1").unwrap();
        let inv = inverse_of_basis(&w, s);
        let mut expect = h(&w, "1");
        expect.add_coord(ElemId::IDENTITY, &vp(&[(1, 1), (-1, -1)]));
        assert_eq!(inv, expect);
        assert_eq!(
            inverse_of_basis(&w, ElemId::IDENTITY),
            HeckeElement::unit(&w)
        );
        for e in w.elements() {
            let prod = inverse_of_basis(&w, e).mul(&HeckeElement::basis_elt(&w, e));
            assert_eq!(prod, HeckeElement::unit(&w), "inverse of {}", w.word_string(e));
        }
    }

    #[test]
    fn bar_involution_props() {
        let w = sys("A2");
        // b_s = h_s + v is fixed
        let mut bs = h(&w, "1");
        bs.add_coord(ElemId::IDENTITY, &vp(&[(1, 1)]));
        assert_eq!(bar_involution(&bs), bs);
        assert_eq!(
            bar_involution(&HeckeElement::unit(&w)),
            HeckeElement::unit(&w)
        );
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let a = random_elt(&w, &mut rng);
            assert_eq!(bar_involution(&bar_involution(&a)), a);
            let b = random_elt(&w, &mut rng);
            // ring automorphism
            assert_eq!(
                bar_involution(&a.mul(&b)),
                bar_involution(&a).mul(&bar_involution(&b))
            );
        }
    }

    #[test]
    fn sigma_antihomomorphism() {
        let w = sys("A2");
        assert_eq!(anti_involution_sigma(&h(&w, "12")), h(&w, "21"));
        assert_eq!(
            anti_involution_sigma(&HeckeElement::unit(&w)),
            HeckeElement::unit(&w)
        );
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let a = random_elt(&w, &mut rng);
            let b = random_elt(&w, &mut rng);
            assert_eq!(anti_involution_sigma(&anti_involution_sigma(&a)), a);
            assert_eq!(
                anti_involution_sigma(&a.mul(&b)),
                anti_involution_sigma(&b).mul(&anti_involution_sigma(&a))
            );
        }
    }

    #[test]
    fn gamma_respects_relations() {
        let w = sys("A2");
        // gamma(h_s) = -(h_s)^-1 = -h_s - v + v^-1
        let g = gamma_map(&h(&w, "1"));
        let neg_inv = inverse_of_basis(&w, w.parse_word("1").unwrap()).neg();
        assert_eq!(g, neg_inv);
        let mut expect = HeckeElement::zero(&w);
        expect.add_coord(w.parse_word("1").unwrap(), &vp(&[(0, -1)]));
        expect.add_coord(ElemId::IDENTITY, &vp(&[(1, -1), (-1, 1)]));
        assert_eq!(g, expect);
        assert_eq!(gamma_map(&HeckeElement::unit(&w)), HeckeElement::unit(&w));
        // quadratic image: gamma(h_s)^2 = xi gamma(h_s) + 1
        let sq = g.mul(&g);
        let expect2 = g.scale(&xi()).add(&HeckeElement::unit(&w));
        assert_eq!(sq, expect2);
        // homomorphism on random products
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..8 {
            let a = random_elt(&w, &mut rng);
            let b = random_elt(&w, &mut rng);
            assert_eq!(gamma_map(&a.mul(&b)), gamma_map(&a).mul(&gamma_map(&b)));
        }
    }

    #[test]
    fn kl_basis_small() {
        let w = sys("A2");
        let kl = KlBasis::build(&w);
        assert_eq!(*kl.element(ElemId::IDENTITY), HeckeElement::unit(&w));
        // b_s = h_s + v
        let mut bs = h(&w, "1");
        bs.add_coord(ElemId::IDENTITY, &vp(&[(1, 1)]));
        assert_eq!(*kl.element(w.parse_word("1").unwrap()), bs);
        // b_{w0} = sum_z v^(3 - l(z)) h_z in A2
        let w0 = w.longest_element();
        let mut expect = HeckeElement::zero(&w);
        for z in w.elements() {
            expect.add_coord(z, &vp(&[(3 - w.length(z) as i64, 1)]));
        }
        assert_eq!(*kl.element(w0), expect);
    }

    #[test]
    fn kl_self_dual_and_positive() {
        for t in ["A2", "B2", "A3"] {
            let w = sys(t);
            let kl = KlBasis::build(&w);
            for e in w.elements() {
                let b = kl.element(e);
                assert_eq!(bar_involution(b), *b, "{t}: b_{} not self-dual", w.word_string(e));
                for (z, c) in b.coords() {
                    assert!(w.bruhat_leq(z, e), "{t}: support outside Bruhat interval");
                    if z == e {
                        assert!(c.is_one());
                    } else {
                        assert!(
                            c.min_exp().unwrap() >= 1,
                            "{t}: h_({},{}) = {} not in vZ[v]",
                            w.word_string(z),
                            w.word_string(e),
                            c
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn kl_conversions_and_mu_positivity() {
        let w = sys("B2");
        let kl = KlBasis::build(&w);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let a = random_elt(&w, &mut rng);
            let round = kl.from_kl(&kl.to_kl(&a));
            assert_eq!(round, a);
        }
        // mu coefficients: b_x b_y in the KL basis has coefficients in
        // Z_{>=0}[v^{+-1}]
        for x in w.elements() {
            for y in w.elements() {
                let prod = kl.element(x).mul(kl.element(y));
                let in_kl = kl.to_kl(&prod);
                for (_, c) in in_kl.coords() {
                    for (_, a) in c.terms() {
                        assert!(a.sign() != num_bigint::Sign::Minus);
                    }
                }
            }
        }
    }

    #[test]
    fn standard_dual_pair() {
        let w = sys("A2");
        let pair = DualBasisPair::standard(&w);
        assert!(pair.verify());
        // h^{st} = h_{ts}
        let st = w.parse_word("12").unwrap();
        assert_eq!(pair.dual[st.index()], h(&w, "21"));
    }

    #[test]
    fn kl_dual_pair_a1() {
        let w = sys("A1");
        let kl = KlBasis::build(&w);
        let basis: Vec<HeckeElement> = w.elements().map(|e| kl.element(e).clone()).collect();
        let pair = DualBasisPair::from_basis(&w, basis).unwrap();
        // b^e = 1 - v h_s, b^s = h_s
        let mut be = HeckeElement::unit(&w);
        be.add_coord(w.parse_word("1").unwrap(), &vp(&[(1, -1)]));
        assert_eq!(pair.dual[0], be);
        assert_eq!(pair.dual[1], h(&w, "1"));
    }

    #[test]
    fn casimir_elements() {
        let w = sys("A1");
        let pair = DualBasisPair::standard(&w);
        let c2 = casimir2(&pair);
        // 2 + (v^-1 - v) h_s
        let mut expect = HeckeElement::zero(&w);
        expect.add_coord(ElemId::IDENTITY, &vp(&[(0, 2)]));
        expect.add_coord(w.parse_word("1").unwrap(), &vp(&[(-1, 1), (1, -1)]));
        assert_eq!(c2, expect);
        assert_eq!(conj_average(&pair, &HeckeElement::unit(&w)), c2);
        assert!(c2.is_central());

        // basis independence: KL pair gives the same casimir
        let kl = KlBasis::build(&w);
        let klpair =
            DualBasisPair::from_basis(&w, w.elements().map(|e| kl.element(e).clone()).collect())
                .unwrap();
        assert_eq!(casimir2(&klpair), c2);

        let a2 = sys("A2");
        let pair2 = DualBasisPair::standard(&a2);
        let c2a = casimir2(&pair2);
        let c4a = casimir4(&pair2);
        assert!(c2a.is_central());
        assert!(c4a.is_central());
        let kl2 = KlBasis::build(&a2);
        let klpair2 = DualBasisPair::from_basis(
            &a2,
            a2.elements().map(|e| kl2.element(e).clone()).collect(),
        )
        .unwrap();
        assert_eq!(casimir2(&klpair2), c2a);
        assert_eq!(casimir4(&klpair2), c4a);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let hrand = random_elt(&a2, &mut rng);
        assert!(conj_average(&pair2, &hrand).is_central());
    }

    #[test]
    fn associativity_sampled() {
        let w = sys("B2");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let a = random_elt(&w, &mut rng);
            let b = random_elt(&w, &mut rng);
            let c = random_elt(&w, &mut rng);
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }
    }

    #[test]
    fn json_round_trip() {
        let w = sys("A2");
        let mut e = h(&w, "12");
        e.add_coord(ElemId::IDENTITY, &vp(&[(0, 2), (-1, 1)]));
        let j = e.to_json();
        let back = HeckeElement::from_json(&w, &j).unwrap();
        assert_eq!(back, e);
        let kl_json = serde_json::json!({
            "basis": "kl",
            "terms": [{"word": "121", "coef": {"var": "v", "terms": [{"exp": 0, "coef": "1"}]}}]
        });
        let klelt = HeckeElement::from_json(&w, &kl_json).unwrap();
        assert_eq!(klelt.basis, Basis::Kl);
    }

    #[test]
    fn mismatch_errors() {
        let w1 = sys("A2");
        let w2 = sys("B2");
        let a = HeckeElement::unit(&w1);
        let b = HeckeElement::unit(&w2);
        assert!(matches!(a.try_mul(&b), Err(HeckeError::SystemMismatch)));
        let kl = KlBasis::build(&w1);
        let c = kl.to_kl(&h(&w1, "1"));
        assert!(matches!(a.try_mul(&c), Err(HeckeError::BasisMismatch)));
    }
}
