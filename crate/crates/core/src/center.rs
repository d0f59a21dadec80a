//! The Wedderburn/center layer: central elements Z_lambda, Schur elements,
//! irreducible dimensions and Hecke characters.
//!
//! The decomposition is computed generically from a separating central
//! element zeta (a conjugation average), whose minimal polynomial splits
//! over F(v) with Laurent-polynomial roots t_lambda = omega_lambda(zeta);
//! Lagrange interpolation in zeta then yields the primitive idempotents
//! e_lambda, the dimensions fall out of the regular trace (an idempotent's
//! regular trace is dim^2), s_lambda = dim / tr(e_lambda) and Z_lambda =
//! s_lambda e_lambda. Two interchangeable backends recover the eigenvalue
//! data: an exact fraction-field route (symbolic minimal polynomial plus a
//! power-series lift from one specialization), and a
//! specialization-plus-interpolation route that solves the problem exactly
//! at many rational points v = r and interpolates. Either way the result is
//! discarded unless the full symbolic verification passes, so correctness
//! does not depend on the route taken.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::coxeter::{CoxeterSystem, ElemId};
use crate::hecke::{casimir2, conj_average, DualBasisPair, HeckeElement, HeckeElt};
use crate::laurent::{CoeffReport, Laurent, LaurentPoly, QView};
use crate::numfield::{roots_in_field, NfElem, NfPoly};
use crate::schur::{closed_schur_table, IrrLabel, ShiftStatus};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CenterError {
    #[error("no closed-form Schur table for type {0}")]
    UnsupportedType(String),
    #[error("central decomposition verification failed: {0}")]
    VerificationFailed(String),
    #[error("compute guard exceeded: {0}")]
    SizeGuard(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CenterBackend {
    Auto,
    /// Symbolic minimal polynomial over the fraction field, eigenvalues by a
    /// series lift from one good specialization.
    Exact,
    /// Solve exactly at many rational points and interpolate coordinates
    /// with the degree bound 2 l(w0) + 4.
    Interpolated,
}

/// Group orders up to this bound use the exact backend under `Auto`.
const AUTO_EXACT_LIMIT: usize = 30;

/// The family {Z_lambda, s_lambda, dim V_lambda}, everything in standard
/// coordinates over the system's scalar field.
pub struct CentralDecomposition {
    pub system: Arc<CoxeterSystem>,
    pub labels: Vec<IrrLabel>,
    pub z: Vec<HeckeElt<NfElem>>,
    /// Schur elements in the q-view.
    pub schur: Vec<QView<NfElem>>,
    pub dims: Vec<BigInt>,
}

struct RawLabel {
    z: HeckeElt<NfElem>,
    schur_v: Laurent<NfElem>,
    dim: BigInt,
}

impl CentralDecomposition {
    pub fn compute(system: &Arc<CoxeterSystem>) -> Result<Self, CenterError> {
        Self::compute_with(system, CenterBackend::Auto)
    }

    pub fn compute_with(
        system: &Arc<CoxeterSystem>,
        backend: CenterBackend,
    ) -> Result<Self, CenterError> {
        let backend = match backend {
            CenterBackend::Auto => {
                // pointwise root recovery over a real number field is far
                // slower than the rational fast path, so field cases go
                // through the single-specialization exact route
                if system.size() <= AUTO_EXACT_LIMIT || system.field().is_some() {
                    CenterBackend::Exact
                } else {
                    CenterBackend::Interpolated
                }
            }
            b => b,
        };
        let k = system.conjugacy_class_count();
        let pair = DualBasisPair::standard(system);
        let mut last_err = CenterError::VerificationFailed("no probe attempted".into());
        for probe in 0..6 {
            let zeta = probe_zeta(system, &pair, probe);
            let raw = match backend {
                CenterBackend::Exact => decompose_exact(system, &zeta, k),
                CenterBackend::Interpolated => decompose_interpolated(system, &zeta, k),
                CenterBackend::Auto => unreachable!(),
            };
            match raw.and_then(|r| finish(system, r, k)) {
                Ok(d) => return Ok(d),
                Err(e) => last_err = e,
            }
        }
        Err(last_err)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// s_lambda as an (even-support) polynomial in v.
    pub fn schur_v(&self, i: usize) -> Laurent<NfElem> {
        self.schur[i].to_v_poly()
    }

    /// chi_lambda(h) = tr(Z_lambda h).
    pub fn character(&self, i: usize, h: &HeckeElement) -> Laurent<NfElem> {
        self.z[i].trace_mul(&h.to_field())
    }

    /// Character value as an integer polynomial, when it is one.
    pub fn character_int(&self, i: usize, h: &HeckeElement) -> Option<LaurentPoly> {
        laurent_to_int(&self.character(i, h))
    }

    /// {s_lambda(q^-1)} = {s_lambda(q)} as multisets.
    pub fn schur_multiset_duality_check(&self) -> bool {
        let mut plain: Vec<String> = self.schur.iter().map(|s| print_qnf(s)).collect();
        let mut barred: Vec<String> = self.schur.iter().map(|s| print_qnf(&s.bar())).collect();
        plain.sort();
        barred.sort();
        plain == barred
    }

    /// Per-label positivity / symmetry / log-concavity report.
    pub fn analyzer_table(&self) -> Vec<(IrrLabel, BigInt, CoeffReport)> {
        (0..self.len())
            .map(|i| {
                (
                    self.labels[i].clone(),
                    self.dims[i].clone(),
                    self.schur[i].analyze(),
                )
            })
            .collect()
    }
}

fn print_qnf(s: &QView<NfElem>) -> String {
    format!("{}", s)
}

pub(crate) fn laurent_to_int(p: &Laurent<NfElem>) -> Option<LaurentPoly> {
    let mut out = LaurentPoly::zero();
    for (e, c) in p.terms() {
        let r = c.to_rational()?;
        if !r.is_integer() {
            return None;
        }
        out.add_term(e, &r.to_integer());
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// Probes and shared helpers
// ---------------------------------------------------------------------------

fn probe_zeta(system: &Arc<CoxeterSystem>, pair: &DualBasisPair, probe: u64) -> HeckeElement {
    if probe == 0 {
        return casimir2(pair);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0000 + probe);
    let mut h = HeckeElement::zero(system);
    for _ in 0..3 {
        let w = ElemId(rng.gen_range(0..system.size() as u32));
        let c = LaurentPoly::term(0, rng.gen_range(1..6));
        h.add_coord(w, &c);
    }
    conj_average(pair, &h)
}

/// Regular traces of the standard basis: regtr[w] is the trace of
/// right-multiplication by h_w on the algebra.
fn regular_traces(system: &Arc<CoxeterSystem>) -> Vec<LaurentPoly> {
    system
        .elements()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&w| {
            let mut acc = LaurentPoly::zero();
            for u in system.elements() {
                let p = HeckeElement::basis_elt(system, u).mul_basis_right(w);
                acc.add_assign(&p.coord(u));
            }
            acc
        })
        .collect()
}

fn max_abs_exp(p: &LaurentPoly) -> i64 {
    p.terms().map(|(e, _)| e.abs()).max().unwrap_or(0)
}

fn elt_max_abs_exp(h: &HeckeElement) -> i64 {
    h.coords().map(|(_, c)| max_abs_exp(c)).max().unwrap_or(0)
}

/// dim^2 from the regular trace of an idempotent; `None` unless it is a
/// nonnegative perfect-square integer constant.
fn dim_from_square(x: &BigRational) -> Option<BigInt> {
    if !x.is_integer() || x.is_negative() {
        return None;
    }
    let n = x.to_integer();
    let r = n.sqrt();
    if &r * &r == n {
        Some(r)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Interpolated backend
// ---------------------------------------------------------------------------

struct PointData {
    r: BigRational,
    /// Per label (sorted by the threading key): (t, s value, z coords).
    labels: Vec<(NfElem, NfElem, Vec<NfElem>)>,
    dims: Vec<BigInt>,
}

fn decompose_interpolated(
    system: &Arc<CoxeterSystem>,
    zeta: &HeckeElement,
    k: usize,
) -> Result<Vec<RawLabel>, CenterError> {
    let n = system.size();
    let l0 = system.length(system.longest_element()) as i64;
    let regtr = regular_traces(system);
    // powers of zeta, symbolic, reused at every point
    let mut powers: Vec<HeckeElement> = vec![HeckeElement::unit(system)];
    for _ in 0..k {
        powers.push(powers.last().unwrap().mul(zeta));
    }
    // eigenvalue window (coarse but safe: degree of zeta plus one step per
    // letter of a longest word)
    let w_t = elt_max_abs_exp(zeta) + l0 + 2;
    for attempt in 0..3u32 {
        // coordinate interpolation window; grown on failure
        let w_z = (2 * l0 + 4) << attempt;
        let needed = (2 * w_z + 1) as usize;
        let base: i64 = 2 + 37 * attempt as i64;
        // evaluate candidate points lazily in chunks until enough are good
        let mut good: Vec<PointData> = Vec::with_capacity(needed);
        let chunk = needed.max(8);
        let mut next = base;
        while good.len() < needed && next < base + 6 * needed as i64 {
            let candidates: Vec<i64> = (next..next + chunk as i64).collect();
            next += chunk as i64;
            let results: Vec<Option<PointData>> = candidates
                .par_iter()
                .map(|&r| point_solve(system, &powers, &regtr, k, r, w_t, n))
                .collect();
            good.extend(results.into_iter().flatten());
        }
        good.truncate(needed);
        if good.len() < needed {
            continue;
        }
        // consistency of dims across points
        let dims = good[0].dims.clone();
        if good.iter().any(|p| p.dims != dims) {
            continue;
        }
        // interpolate s and z coordinates per label
        let xs: Vec<BigRational> = good.iter().map(|p| p.r.clone()).collect();
        let scale: Vec<BigRational> = xs
            .iter()
            .map(|x| crate::laurent::rational_pow(x, w_z))
            .collect();
        let mut raw = Vec::with_capacity(k);
        let mut ok = true;
        for lab in 0..k {
            let ys_s: Vec<NfElem> = good
                .iter()
                .zip(&scale)
                .map(|(p, sc)| p.labels[lab].1.clone() * NfElem::rational(sc.clone()))
                .collect();
            let s_shift = interpolate(&xs, &ys_s);
            let schur_v = poly_to_laurent(&s_shift, -w_z);
            let mut coords: Vec<(ElemId, Laurent<NfElem>)> = Vec::new();
            for c in 0..n {
                if good.iter().all(|p| p.labels[lab].2[c].is_zero()) {
                    continue;
                }
                let ys: Vec<NfElem> = good
                    .iter()
                    .zip(&scale)
                    .map(|(p, sc)| p.labels[lab].2[c].clone() * NfElem::rational(sc.clone()))
                    .collect();
                let poly = interpolate(&xs, &ys);
                let lau = poly_to_laurent(&poly, -w_z);
                coords.push((ElemId(c as u32), lau));
            }
            if schur_v.is_zero() {
                ok = false;
            }
            raw.push(RawLabel {
                z: HeckeElt::from_coords(system, crate::hecke::Basis::Standard, coords),
                schur_v,
                dim: dims[lab].clone(),
            });
        }
        if ok {
            return Ok(raw);
        }
    }
    Err(CenterError::VerificationFailed(
        "interpolation failed to stabilize".into(),
    ))
}

/// Solve the decomposition exactly at v = r; `None` if the point is bad
/// (eigenvalue collision, window too small, any sanity check fails).
#[allow(clippy::too_many_arguments)]
fn point_solve(
    system: &Arc<CoxeterSystem>,
    powers: &[HeckeElement],
    regtr: &[LaurentPoly],
    k: usize,
    r: i64,
    w_t: i64,
    n: usize,
) -> Option<PointData> {
    let rq = BigRational::from(BigInt::from(r));
    // specialize powers
    let pvecs: Vec<Vec<BigRational>> = powers
        .iter()
        .map(|p| {
            let mut v = vec![BigRational::zero(); n];
            for (w, c) in p.coords() {
                v[w.index()] = c.evaluate(&rq).expect("nonzero point");
            }
            v
        })
        .collect();
    // Krylov echelon over Q with coefficient tracking: find the first j with
    // pvecs[j] dependent on the previous ones.
    let mut pivots: Vec<(usize, Vec<BigRational>, Vec<BigRational>)> = Vec::new(); // (pivot col, vector, combo)
    let mut minpoly: Option<Vec<BigRational>> = None;
    for (j, pv) in pvecs.iter().enumerate() {
        let mut vec = pv.clone();
        let mut combo = vec![BigRational::zero(); k + 1];
        combo[j] = BigRational::one();
        for (pc, pvec, pcombo) in &pivots {
            if vec[*pc].is_zero() {
                continue;
            }
            let f = vec[*pc].clone();
            for i in 0..n {
                let t = &f * &pvec[i];
                vec[i] -= t;
            }
            for i in 0..=k {
                let t = &f * &pcombo[i];
                combo[i] -= t;
            }
        }
        match vec.iter().position(|x| !x.is_zero()) {
            Some(pc) => {
                let inv = vec[pc].clone().recip();
                for x in vec.iter_mut() {
                    *x *= &inv;
                }
                for x in combo.iter_mut() {
                    *x *= &inv;
                }
                pivots.push((pc, vec, combo));
            }
            None => {
                // dependence: combo gives minpoly coefficients
                if j != k {
                    return None; // eigenvalues collide at this point
                }
                minpoly = Some(combo);
                break;
            }
        }
    }
    let mp = minpoly?;
    // monic degree-k polynomial: mp[k] should be 1 after normalization
    let lead = mp[k].clone();
    if lead.is_zero() {
        return None;
    }
    let mp: Vec<BigRational> = mp.iter().map(|c| c / &lead).collect();
    // rescale roots: t * r^w_t must be an algebraic integer
    let mut rescaled: Vec<NfElem> = Vec::with_capacity(k + 1);
    for (j, c) in mp.iter().enumerate().take(k + 1) {
        let factor = crate::laurent::rational_pow(&rq, (k - j) as i64 * w_t);
        let v = c * factor;
        if j < k && !v.is_integer() {
            return None; // window too small at this point
        }
        rescaled.push(NfElem::rational(v));
    }
    let field = system.field().cloned();
    let roots = roots_in_field(&NfPoly(rescaled), field.as_ref());
    if roots.len() != k {
        return None;
    }
    let down = NfElem::rational(crate::laurent::rational_pow(&rq, w_t).recip());
    let ts: Vec<NfElem> = roots.into_iter().map(|t| t * down.clone()).collect();
    // Lagrange idempotents from the cached powers
    let regtr_r: Vec<BigRational> = regtr
        .iter()
        .map(|p| p.evaluate(&rq).expect("nonzero point"))
        .collect();
    let mut labels: Vec<(NfElem, NfElem, Vec<NfElem>, BigInt)> = Vec::with_capacity(k);
    let mut esum = vec![NfElem::zero(); n];
    for t in &ts {
        // synthetic division: m(T) / (T - t)
        let mut b = vec![NfElem::zero(); k]; // coefficients of n_t
        b[k - 1] = NfElem::one();
        for j in (0..k - 1).rev() {
            b[j] = NfElem::rational(mp[j + 1].clone()) + t.clone() * b[j + 1].clone();
        }
        // remainder must vanish: mp[0] + t*b[0] == 0
        let rem = NfElem::rational(mp[0].clone()) + t.clone() * b[0].clone();
        if !rem.is_zero() {
            return None;
        }
        // denominator m'(t) = n_t(t)
        let mut den = NfElem::zero();
        for j in (0..k).rev() {
            den = den * t.clone() + b[j].clone();
        }
        if den.is_zero() {
            return None;
        }
        let den_inv = den.inv();
        // e = sum_j b_j zeta^j / den
        let mut e = vec![NfElem::zero(); n];
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            for c in 0..n {
                if !pvecs[j][c].is_zero() {
                    e[c] = e[c].clone()
                        + bj.clone() * NfElem::rational(pvecs[j][c].clone()) * den_inv.clone();
                }
            }
        }
        // dim from the regular trace
        let mut rt = NfElem::zero();
        for c in 0..n {
            if !e[c].is_zero() && !regtr_r[c].is_zero() {
                rt = rt + e[c].clone() * NfElem::rational(regtr_r[c].clone());
            }
        }
        let dim = dim_from_square(&rt.to_rational()?)?;
        if dim.is_zero() {
            return None;
        }
        // s = dim / tr(e)
        let tr = e[0].clone();
        if tr.is_zero() {
            return None;
        }
        let s = NfElem::rational(BigRational::from(dim.clone())) * tr.inv();
        let z: Vec<NfElem> = e.iter().map(|c| c.clone() * s.clone()).collect();
        for (acc, c) in esum.iter_mut().zip(e.iter()) {
            *acc = acc.clone() + c.clone();
        }
        labels.push((t.clone(), s, z, dim));
    }
    // sum of idempotents must be the unit
    for (c, acc) in esum.iter().enumerate() {
        let expect = if c == 0 { NfElem::one() } else { NfElem::zero() };
        if *acc != expect {
            return None;
        }
    }
    // deterministic threading order: (dim, embedding key of t)
    labels.sort_by(|a, b| {
        a.3.cmp(&b.3).then_with(|| nf_order(&a.0, &b.0))
    });
    let dims = labels.iter().map(|l| l.3.clone()).collect();
    Some(PointData {
        r: rq,
        labels: labels.into_iter().map(|l| (l.0, l.1, l.2)).collect(),
        dims,
    })
}

/// Total order on field elements via the primary real embedding.
fn nf_order(a: &NfElem, b: &NfElem) -> std::cmp::Ordering {
    let d = a.clone() - b.clone();
    match d.exact_sign() {
        -1 => std::cmp::Ordering::Less,
        0 => std::cmp::Ordering::Equal,
        _ => std::cmp::Ordering::Greater,
    }
}

/// Coefficients (lowest first) of the unique polynomial of degree < xs.len()
/// through the points, by Newton divided differences over the field.
fn interpolate(xs: &[BigRational], ys: &[NfElem]) -> Vec<NfElem> {
    let n = xs.len();
    let mut dd: Vec<NfElem> = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            let num = dd[i].clone() - dd[i - 1].clone();
            let den = NfElem::rational(&xs[i] - &xs[i - j]);
            dd[i] = num * den.inv();
        }
    }
    // Horner expansion of the Newton form: p <- p (x - xs[i]) + dd[i]
    let mut poly = vec![NfElem::zero(); n];
    poly[0] = dd[n - 1].clone();
    let mut deg = 0usize;
    for i in (0..n - 1).rev() {
        let xi = NfElem::rational(xs[i].clone());
        for j in (0..=deg + 1).rev() {
            let lower = if j >= 1 {
                poly[j - 1].clone()
            } else {
                NfElem::zero()
            };
            poly[j] = lower - xi.clone() * poly[j].clone();
        }
        poly[0] = poly[0].clone() + dd[i].clone();
        deg += 1;
    }
    poly
}

fn poly_to_laurent(coeffs: &[NfElem], shift: i64) -> Laurent<NfElem> {
    Laurent::from_terms(
        coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| (j as i64 + shift, c.clone())),
    )
}

// ---------------------------------------------------------------------------
// Exact backend
// ---------------------------------------------------------------------------

fn decompose_exact(
    system: &Arc<CoxeterSystem>,
    zeta: &HeckeElement,
    k: usize,
) -> Result<Vec<RawLabel>, CenterError> {
    let regtr = regular_traces(system);
    let mut powers: Vec<HeckeElement> = vec![HeckeElement::unit(system)];
    for _ in 0..k {
        powers.push(powers.last().unwrap().mul(zeta));
    }
    // symbolic minimal polynomial by probing coordinate subsets
    let minpoly = symbolic_minpoly(system, &powers, k)
        .ok_or_else(|| CenterError::VerificationFailed("no degree-k minimal polynomial".into()))?;
    // Newton polygon: a Laurent-polynomial root of the monic minpoly has
    // |degree| at most max_j |deg c_j| / (k - j).
    let w_t = minpoly
        .iter()
        .take(k)
        .enumerate()
        .map(|(j, c)| {
            let m = c.terms().map(|(e, _)| e.abs()).max().unwrap_or(0);
            let d = (k - j) as i64;
            (m + d - 1) / d
        })
        .max()
        .unwrap_or(0)
        + 1;
    // one good specialization point
    let field = system.field().cloned();
    let mut ts: Option<Vec<Laurent<NfElem>>> = None;
    for r in 2..40i64 {
        let rq = BigRational::from(BigInt::from(r));
        let mut rescaled = Vec::with_capacity(k + 1);
        let mut ok = true;
        for (j, c) in minpoly.iter().enumerate() {
            let val = c
                .evaluate(&rq)
                .expect("nonzero point")
                * crate::laurent::rational_pow(&rq, (k - j) as i64 * w_t);
            if j < k && !val.is_integer() {
                ok = false;
                break;
            }
            rescaled.push(NfElem::rational(val));
        }
        if !ok {
            continue;
        }
        let roots = roots_in_field(&NfPoly(rescaled), field.as_ref());
        if roots.len() != k {
            continue;
        }
        let down = NfElem::rational(crate::laurent::rational_pow(&rq, w_t).recip());
        let point_roots: Vec<NfElem> = roots.into_iter().map(|t| t * down.clone()).collect();
        // series lift of each root to a Laurent polynomial eigenvalue
        let lifted = lift_all_roots(&minpoly, &point_roots, r, w_t);
        if let Some(l) = lifted {
            ts = Some(l);
            break;
        }
    }
    let ts =
        ts.ok_or_else(|| CenterError::VerificationFailed("eigenvalue lifting failed".into()))?;
    // Lagrange in zeta with symbolic eigenvalues
    let mp_nf: Vec<Laurent<NfElem>> = minpoly.iter().map(lift_laurent).collect();
    let powers_nf: Vec<HeckeElt<NfElem>> = powers.iter().map(|p| p.to_field()).collect();
    let mut raw = Vec::with_capacity(k);
    for t in &ts {
        // synthetic division m / (T - t)
        let mut b: Vec<Laurent<NfElem>> = vec![Laurent::zero(); k];
        b[k - 1] = Laurent::one();
        for j in (0..k - 1).rev() {
            b[j] = mp_nf[j + 1].add(&t.mul(&b[j + 1]));
        }
        let rem = mp_nf[0].add(&t.mul(&b[0]));
        if !rem.is_zero() {
            return Err(CenterError::VerificationFailed(
                "eigenvalue is not a root".into(),
            ));
        }
        let mut den: Laurent<NfElem> = Laurent::zero();
        for j in (0..k).rev() {
            den = den.mul(t).add(&b[j]);
        }
        if den.is_zero() {
            return Err(CenterError::VerificationFailed("repeated eigenvalue".into()));
        }
        // e_num = sum_j b_j zeta^j
        let mut e_num: HeckeElt<NfElem> = HeckeElt::zero(system);
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            e_num = e_num.add(&powers_nf[j].scale(bj));
        }
        // dim^2 = regtrace(e_num) / den
        let mut rt: Laurent<NfElem> = Laurent::zero();
        for (w, c) in e_num.coords() {
            let rw = lift_laurent(&regtr[w.index()]);
            rt.add_assign(&c.mul(&rw));
        }
        let dim2 = rt
            .div_exact(&den)
            .and_then(|p| constant_of(&p))
            .and_then(|c| c.to_rational())
            .and_then(|r| dim_from_square(&r))
            .ok_or_else(|| {
                CenterError::VerificationFailed("regular trace is not a square".into())
            })?;
        if dim2.is_zero() {
            return Err(CenterError::VerificationFailed("zero dimension".into()));
        }
        // s = dim * den / tr(e_num)
        let tr_num = e_num.coord(ElemId::IDENTITY);
        if tr_num.is_zero() {
            return Err(CenterError::VerificationFailed("idempotent has zero trace".into()));
        }
        let dim_c = NfElem::rational(BigRational::from(dim2.clone()));
        let schur_v = den
            .scale(&dim_c)
            .div_exact(&tr_num)
            .ok_or_else(|| CenterError::VerificationFailed("Schur element not polynomial".into()))?;
        // Z = s * e = e_num * s / den, coordinatewise exact division
        let mut z: HeckeElt<NfElem> = HeckeElt::zero(system);
        for (w, c) in e_num.coords() {
            let num = c.mul(&schur_v);
            let q = num.div_exact(&den).ok_or_else(|| {
                CenterError::VerificationFailed("Z coordinate not polynomial".into())
            })?;
            z.add_coord(w, &q);
        }
        raw.push(RawLabel {
            z,
            schur_v,
            dim: dim2,
        });
    }
    Ok(raw)
}

fn constant_of(p: &Laurent<NfElem>) -> Option<NfElem> {
    if p.is_zero() {
        return Some(NfElem::zero());
    }
    if p.min_exp() == Some(0) && p.max_exp() == Some(0) {
        Some(p.coeff(0))
    } else {
        None
    }
}

fn lift_laurent(p: &LaurentPoly) -> Laurent<NfElem> {
    p.map_coeffs(|c| NfElem::rational(BigRational::from(c.clone())))
}

/// Find the monic degree-k polynomial annihilating zeta by Cramer's rule on
/// a k x k coordinate-probe system (fraction-free Bareiss determinants, so
/// no gcd reduction ever runs), verified globally before returning.
fn symbolic_minpoly(
    system: &Arc<CoxeterSystem>,
    powers: &[HeckeElement],
    k: usize,
) -> Option<Vec<LaurentPoly>> {
    // Central elements pair equal coordinates at u and u^-1 (characters are
    // inverse-invariant), so probe one representative per inverse pair.
    let pool: Vec<u32> = {
        let mut s: Vec<u32> = powers
            .iter()
            .flat_map(|p| p.support().map(|w| w.0))
            .filter(|&w| system.inverse(ElemId(w)).0 >= w)
            .collect();
        s.sort();
        s.dedup();
        s
    };
    if pool.len() < k {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xABCD);
    for attempt in 0..40usize {
        let coords: Vec<u32> = if attempt == 0 {
            pool.iter().copied().take(k).collect()
        } else {
            let mut shuffled = pool.clone();
            for i in (1..shuffled.len()).rev() {
                shuffled.swap(i, rng.gen_range(0..=i));
            }
            shuffled.truncate(k);
            shuffled
        };
        let base: Vec<Vec<LaurentPoly>> = coords
            .iter()
            .map(|&c| (0..k).map(|j| powers[j].coord(ElemId(c))).collect())
            .collect();
        let Some(det) = bareiss_det(base.clone()) else {
            continue;
        };
        if det.is_zero() {
            continue;
        }
        // Cramer: column j replaced by -zeta^k coordinates
        let rhs: Vec<LaurentPoly> = coords
            .iter()
            .map(|&c| powers[k].coord(ElemId(c)).neg())
            .collect();
        let mut dets = Vec::with_capacity(k);
        let mut ok = true;
        for j in 0..k {
            let mut m = base.clone();
            for (r, row) in m.iter_mut().enumerate() {
                row[j] = rhs[r].clone();
            }
            match bareiss_det(m) {
                Some(dj) => dets.push(dj),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        // global verification without forming fractions:
        // sum_j det_j zeta^j + det zeta^k = 0
        let mut acc: HeckeElement = powers[k].scale(&det);
        for (j, dj) in dets.iter().enumerate() {
            acc = acc.add(&powers[j].scale(dj));
        }
        if !acc.is_zero() {
            continue;
        }
        // coefficients c_j = det_j / det must be integer Laurent polynomials
        let mut coeffs: Vec<LaurentPoly> = Vec::with_capacity(k + 1);
        for dj in &dets {
            coeffs.push(div_exact_int(dj, &det)?);
        }
        coeffs.push(LaurentPoly::one());
        return Some(coeffs);
    }
    None
}

/// Fraction-free Bareiss determinant over integer Laurent polynomials;
/// divisions are exact at every step.
fn bareiss_det(mut m: Vec<Vec<LaurentPoly>>) -> Option<LaurentPoly> {
    let n = m.len();
    let mut sign = false;
    let mut prev: LaurentPoly = LaurentPoly::one();
    for c in 0..n {
        let piv = (c..n).find(|&r| !m[r][c].is_zero());
        let Some(piv) = piv else {
            return Some(LaurentPoly::zero());
        };
        if piv != c {
            m.swap(c, piv);
            sign = !sign;
        }
        for r in c + 1..n {
            for cc in c + 1..n {
                let t = m[r][cc].mul(&m[c][c]).sub(&m[r][c].mul(&m[c][cc]));
                m[r][cc] = div_exact_int(&t, &prev)?;
            }
            m[r][c] = LaurentPoly::zero();
        }
        prev = m[c][c].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Some(if sign { det.neg() } else { det })
}

/// Exact division of integer Laurent polynomials, valid when the quotient is
/// known to have integer coefficients (as in Bareiss elimination). Returns
/// `None` if any step fails to divide.
fn div_exact_int(a: &LaurentPoly, b: &LaurentPoly) -> Option<LaurentPoly> {
    use num_integer::Integer;
    if b.is_zero() {
        return None;
    }
    if a.is_zero() {
        return Some(LaurentPoly::zero());
    }
    let a_lo = a.min_exp().unwrap();
    let b_lo = b.min_exp().unwrap();
    let mut rem = a.shift(-a_lo);
    let d = b.shift(-b_lo);
    let dtop = d.max_exp().unwrap();
    let dlead = d.coeff(dtop);
    let mut quot = LaurentPoly::zero();
    while !rem.is_zero() {
        let rtop = rem.max_exp().unwrap();
        if rtop < dtop {
            return None;
        }
        let (q, r) = rem.coeff(rtop).div_rem(&dlead);
        if !r.is_zero() {
            return None;
        }
        let k = rtop - dtop;
        quot.add_term(k, &q);
        rem.sub_assign(&d.shift(k).scale(&q));
    }
    Some(quot.shift(a_lo - b_lo))
}

// Truncated power series over the field, for the eigenvalue lift.
#[derive(Clone)]
struct Ser(Vec<NfElem>);

impl Ser {
    fn constant(c: NfElem, prec: usize) -> Ser {
        let mut v = vec![NfElem::zero(); prec];
        v[0] = c;
        Ser(v)
    }

    fn add(&self, o: &Ser) -> Ser {
        Ser(self
            .0
            .iter()
            .zip(&o.0)
            .map(|(a, b)| a.clone() + b.clone())
            .collect())
    }

    fn sub(&self, o: &Ser) -> Ser {
        Ser(self
            .0
            .iter()
            .zip(&o.0)
            .map(|(a, b)| a.clone() - b.clone())
            .collect())
    }

    fn mul(&self, o: &Ser) -> Ser {
        let p = self.0.len();
        let mut out = vec![NfElem::zero(); p];
        for i in 0..p {
            if self.0[i].is_zero() {
                continue;
            }
            for j in 0..p - i {
                if o.0[j].is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].clone() + self.0[i].clone() * o.0[j].clone();
            }
        }
        Ser(out)
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    fn inv(&self) -> Option<Ser> {
        let p = self.0.len();
        if self.0[0].is_zero() {
            return None;
        }
        let c0 = self.0[0].inv();
        let mut out = vec![NfElem::zero(); p];
        out[0] = c0.clone();
        for i in 1..p {
            let mut acc = NfElem::zero();
            for j in 0..i {
                acc = acc + out[j].clone() * self.0[i - j].clone();
            }
            out[i] = -(acc * c0.clone());
        }
        Some(Ser(out))
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    /// Multiply by the linear series (r + u) in O(prec).
    fn mul_linear(&self, r: &NfElem) -> Ser {
        let p = self.0.len();
        let mut out = vec![NfElem::zero(); p];
        for i in 0..p {
            out[i] = self.0[i].clone() * r.clone();
            if i >= 1 {
                out[i] = out[i].clone() + self.0[i - 1].clone();
            }
        }
        Ser(out)
    }

    /// Divide by the linear series (r + u) in O(prec); r must be nonzero.
    fn div_linear(&self, r: &NfElem) -> Ser {
        let p = self.0.len();
        let rinv = r.clone().inv();
        let mut out = vec![NfElem::zero(); p];
        out[0] = self.0[0].clone() * rinv.clone();
        for i in 1..p {
            out[i] = (self.0[i].clone() - out[i - 1].clone()) * rinv.clone();
        }
        Ser(out)
    }
}

/// Lift every pointwise root to a Laurent-polynomial eigenvalue by Newton
/// iteration in F[[v - r]], then verify m(t(v)) = 0 symbolically.
fn lift_all_roots(
    minpoly: &[LaurentPoly],
    point_roots: &[NfElem],
    r: i64,
    w_t: i64,
) -> Option<Vec<Laurent<NfElem>>> {
    let k = minpoly.len() - 1;
    let prec = (2 * w_t + 2) as usize;
    let rq = BigRational::from(BigInt::from(r));
    // (r + u) and its inverse as series
    let mut base = vec![NfElem::zero(); prec];
    base[0] = NfElem::rational(rq.clone());
    if prec > 1 {
        base[1] = NfElem::one();
    }
    let rnf = NfElem::rational(rq.clone());
    // minpoly coefficients as series in u, by Horner over the exponent range
    // with O(prec) multiplications by (r + u) and its inverse.
    let coeff_series: Vec<Ser> = minpoly
        .iter()
        .map(|c| {
            if c.is_zero() {
                return Ser(vec![NfElem::zero(); prec]);
            }
            let lo = c.min_exp().unwrap();
            let hi = c.max_exp().unwrap();
            // Horner from the top exponent down to lo
            let mut acc = Ser(vec![NfElem::zero(); prec]);
            for e in (lo..=hi).rev() {
                acc = acc.mul_linear(&rnf);
                let a = c.coeff(e);
                if !a.is_zero() {
                    acc.0[0] = acc.0[0].clone() + NfElem::rational(BigRational::from(a));
                }
            }
            // multiply by (r+u)^lo
            if lo > 0 {
                for _ in 0..lo {
                    acc = acc.mul_linear(&rnf);
                }
            } else {
                for _ in 0..(-lo) {
                    acc = acc.div_linear(&rnf);
                }
            }
            acc
        })
        .collect();
    let pow_series = |e: i64| -> Ser {
        let mut acc = Ser::constant(NfElem::one(), prec);
        if e >= 0 {
            for _ in 0..e {
                acc = acc.mul_linear(&rnf);
            }
        } else {
            for _ in 0..(-e) {
                acc = acc.div_linear(&rnf);
            }
        }
        acc
    };
    let eval = |t: &Ser| -> Ser {
        let mut acc = Ser(vec![NfElem::zero(); prec]);
        for j in (0..=k).rev() {
            acc = acc.mul(t).add(&coeff_series[j]);
        }
        acc
    };
    let truncate = |s: &Ser, p: usize| Ser(s.0.iter().take(p).cloned().collect());
    let mut out = Vec::with_capacity(point_roots.len());
    for tau in point_roots {
        // Newton with doubling precision: accuracy doubles per step, so work
        // at each stage only as hard as that stage needs.
        let mut cur = 1usize;
        let mut t = Ser::constant(tau.clone(), 1);
        while cur < prec {
            cur = (cur * 2).min(prec);
            let mut tc = truncate(&t, cur);
            tc.0.resize(cur, NfElem::zero());
            let cs: Vec<Ser> = coeff_series.iter().map(|c| truncate(c, cur)).collect();
            let evalc = |x: &Ser| -> Ser {
                let mut acc = Ser(vec![NfElem::zero(); cur]);
                for j in (0..=k).rev() {
                    acc = acc.mul(x).add(&cs[j]);
                }
                acc
            };
            let derivc = |x: &Ser| -> Ser {
                let mut acc = Ser(vec![NfElem::zero(); cur]);
                for j in (1..=k).rev() {
                    let cj = Ser(cs[j]
                        .0
                        .iter()
                        .map(|c| {
                            c.clone()
                                * NfElem::rational(BigRational::from(BigInt::from(j as i64)))
                        })
                        .collect());
                    acc = acc.mul(x).add(&cj);
                }
                acc
            };
            let f = evalc(&tc);
            if !f.is_zero() {
                let d = derivc(&tc);
                let step = f.mul(&d.inv()?);
                tc = tc.sub(&step);
            }
            t = tc;
        }
        if !eval(&t).is_zero() {
            return None;
        }
        // recover the Laurent polynomial: g(v) = t(v) v^{w_t} has degree
        // <= 2 w_t; its Taylor series at r is t-series * (r+u)^{w_t}.
        let g = t.mul(&pow_series(w_t));
        if g.0.iter().skip((2 * w_t + 1) as usize).any(|c| !c.is_zero()) {
            return None;
        }
        // g(v) = sum_s g_s (v - r)^s
        let mut gv: Laurent<NfElem> = Laurent::zero();
        let mut vr_pow: Laurent<NfElem> = Laurent::one();
        let vr = {
            let mut p: Laurent<NfElem> = Laurent::monomial(1, NfElem::one());
            p.add_term(0, &NfElem::rational(-rq.clone()));
            p
        };
        for c in g.0.iter().take((2 * w_t + 1) as usize) {
            gv.add_assign(&vr_pow.scale(c));
            vr_pow = vr_pow.mul(&vr);
        }
        let t_poly = gv.shift(-w_t);
        // verify symbolically
        let mut acc: Laurent<NfElem> = Laurent::zero();
        for j in (0..=k).rev() {
            acc = acc.mul(&t_poly).add(&lift_laurent(&minpoly[j]));
        }
        if !acc.is_zero() {
            return None;
        }
        out.push(t_poly);
    }
    // distinctness
    for i in 0..out.len() {
        for j in i + 1..out.len() {
            if out[i] == out[j] {
                return None;
            }
        }
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// Verification and label attachment
// ---------------------------------------------------------------------------

fn finish(
    system: &Arc<CoxeterSystem>,
    mut raw: Vec<RawLabel>,
    k: usize,
) -> Result<CentralDecomposition, CenterError> {
    if raw.len() != k {
        return Err(CenterError::VerificationFailed(format!(
            "{} blocks, expected {k}",
            raw.len()
        )));
    }
    // sum of squares
    let mut sq = BigInt::zero();
    for l in &raw {
        sq += &l.dim * &l.dim;
    }
    if sq != BigInt::from(system.size()) {
        return Err(CenterError::VerificationFailed(format!(
            "sum of dim^2 = {sq} != |W|"
        )));
    }
    // centrality, trace, orthogonality relations
    for l in &raw {
        if !l.z.is_central() {
            return Err(CenterError::VerificationFailed("Z not central".into()));
        }
        let tr = l.z.coord(ElemId::IDENTITY);
        if constant_of(&tr).and_then(|c| c.to_rational()) != Some(BigRational::from(l.dim.clone()))
        {
            return Err(CenterError::VerificationFailed("tr Z != dim".into()));
        }
    }
    for i in 0..k {
        for j in 0..k {
            let prod = raw[i].z.mul(&raw[j].z);
            let expect = if i == j {
                raw[i].z.scale(&raw[i].schur_v)
            } else {
                HeckeElt::zero(system)
            };
            if prod != expect {
                return Err(CenterError::VerificationFailed(
                    "Z_i Z_j != delta s Z".into(),
                ));
            }
        }
    }
    // sum_l Z_l prod_{m != l} s_m == prod_m s_m
    let mut total: HeckeElt<NfElem> = HeckeElt::zero(system);
    let mut sprod: Laurent<NfElem> = Laurent::one();
    for l in &raw {
        sprod = sprod.mul(&l.schur_v);
    }
    for l in &raw {
        let others = sprod
            .div_exact(&l.schur_v)
            .ok_or_else(|| CenterError::VerificationFailed("s division failed".into()))?;
        total = total.add(&l.z.scale(&others));
    }
    let unit_scaled = HeckeElt::<NfElem>::from_coords(
        system,
        crate::hecke::Basis::Standard,
        [(ElemId::IDENTITY, sprod)],
    );
    if total != unit_scaled {
        return Err(CenterError::VerificationFailed(
            "sum Z_l / s_l != 1".into(),
        ));
    }
    // q-views
    let mut schur_q = Vec::with_capacity(k);
    for l in &raw {
        let q = QView::from_v_poly(&l.schur_v).map_err(|_| {
            CenterError::VerificationFailed("Schur element has odd v-support".into())
        })?;
        schur_q.push(q);
    }
    // label attachment
    let labels = attach_labels(system, &raw, &mut schur_q)?;
    // reorder by the attachment (attach_labels returns parallel ordering)
    let (labels, order) = labels;
    let mut z = Vec::with_capacity(k);
    let mut dims = Vec::with_capacity(k);
    let mut schur = Vec::with_capacity(k);
    for &idx in &order {
        let l = &mut raw[idx];
        z.push(std::mem::replace(&mut l.z, HeckeElt::zero(system)));
        dims.push(l.dim.clone());
        schur.push(schur_q[idx].clone());
    }
    Ok(CentralDecomposition {
        system: system.clone(),
        labels,
        z,
        schur,
        dims,
    })
}

/// Match generic blocks against the closed-form table when one exists; the
/// matching also pins the monomial shifts the B/D closed forms leave open.
///
/// Coefficient sequences of Schur elements are palindromic, so a label and
/// its dual have identical normalized product parts; inside such an
/// ambiguity group the orientation is fixed deterministically: the label
/// with the larger first partition receives the Schur element with the
/// higher top exponent (the trivial label of type B/D carries the Poincare
/// polynomial, which is the all-positive-exponent member of its pair).
#[allow(clippy::type_complexity)]
fn attach_labels(
    system: &Arc<CoxeterSystem>,
    raw: &[RawLabel],
    schur_q: &mut [QView<NfElem>],
) -> Result<(Vec<IrrLabel>, Vec<usize>), CenterError> {
    let k = raw.len();
    match closed_schur_table(system.ctype()) {
        Some(table) => {
            if table.len() != k {
                return Err(CenterError::VerificationFailed(
                    "closed table size mismatch".into(),
                ));
            }
            let mut assignment: Vec<Option<usize>> = vec![None; table.len()];
            let mut used = vec![false; k];
            // group the table rows by (dim, status, normalized sequence key)
            let norm_key = |s: &QView<NfElem>| -> String {
                match s.min_exp() {
                    Some(lo) => print_qnf(&s.shift(-lo)),
                    None => String::new(),
                }
            };
            let mut groups: std::collections::BTreeMap<(String, String), Vec<usize>> =
                std::collections::BTreeMap::new();
            for (ti, (_, dim, s_closed, status)) in table.iter().enumerate() {
                let key = match status {
                    ShiftStatus::Exact => (format!("{dim}|exact"), print_qnf(s_closed)),
                    ShiftStatus::Normalized => (format!("{dim}|norm"), norm_key(s_closed)),
                };
                groups.entry(key).or_default().push(ti);
            }
            for ((dimkey, seq), mut members) in groups {
                let exact = dimkey.ends_with("exact");
                let dim: BigInt = dimkey
                    .split('|')
                    .next()
                    .unwrap()
                    .parse()
                    .expect("dim key");
                // candidate raw blocks
                let mut cands: Vec<usize> = (0..k)
                    .filter(|&i| {
                        !used[i]
                            && raw[i].dim == dim
                            && if exact {
                                print_qnf(&schur_q[i]) == seq
                            } else {
                                norm_key(&schur_q[i]) == seq
                            }
                    })
                    .collect();
                if cands.len() != members.len() {
                    return Err(CenterError::VerificationFailed(format!(
                        "{} generic blocks match {} closed rows (dim {dim})",
                        cands.len(),
                        members.len()
                    )));
                }
                // orientation: labels by descending first-partition weight,
                // candidates by descending top exponent
                members.sort_by(|&a, &b| {
                    label_orientation(&table[b].0).cmp(&label_orientation(&table[a].0))
                });
                cands.sort_by(|&a, &b| {
                    let ka = (schur_q[a].max_exp().unwrap_or(0), print_qnf(&schur_q[a]));
                    let kb = (schur_q[b].max_exp().unwrap_or(0), print_qnf(&schur_q[b]));
                    kb.cmp(&ka)
                });
                for (ti, ci) in members.iter().zip(cands.iter()) {
                    assignment[*ti] = Some(*ci);
                    used[*ci] = true;
                }
            }
            let mut labels = Vec::with_capacity(k);
            let mut order = Vec::with_capacity(k);
            for (ti, (label, _, _, _)) in table.iter().enumerate() {
                let ci = assignment[ti].ok_or_else(|| {
                    CenterError::VerificationFailed(format!("unmatched label {label}"))
                })?;
                labels.push(label.clone());
                order.push(ci);
            }
            Ok((labels, order))
        }
        None => {
            // generic labels sorted by (dim, printed s)
            let mut idx: Vec<usize> = (0..k).collect();
            idx.sort_by(|&a, &b| {
                raw[a]
                    .dim
                    .cmp(&raw[b].dim)
                    .then_with(|| print_qnf(&schur_q[a]).cmp(&print_qnf(&schur_q[b])))
            });
            let labels = idx
                .iter()
                .enumerate()
                .map(|(pos, &i)| {
                    use num_traits::ToPrimitive;
                    IrrLabel::Generic(pos, raw[i].dim.to_u64().unwrap_or(0))
                })
                .collect();
            Ok((labels, idx))
        }
    }
}

/// Orientation key: bigger first component wins the more positive Schur
/// element of its duality pair.
fn label_orientation(l: &IrrLabel) -> (u32, String) {
    match l {
        IrrLabel::Pair(a, _) => (a.size(), format!("{l}")),
        IrrLabel::DSplit(a, _) => (a.size(), format!("{l}")),
        _ => (0, format!("{l}")),
    }
}

#[cfg(test)]
mod bareiss_tests {
    use super::*;

    #[test]
    fn bareiss_known_dets() {
        let p = |pairs: &[(i64, i64)]| LaurentPoly::from_pairs(pairs);
        // det [[1, v],[v, v^2+1]] = 1
        let m = vec![
            vec![p(&[(0, 1)]), p(&[(1, 1)])],
            vec![p(&[(1, 1)]), p(&[(2, 1), (0, 1)])],
        ];
        assert_eq!(bareiss_det(m).unwrap(), LaurentPoly::one());
        // det [[v, 0, 1],[2, v, 0],[1, 1, v]] = v^3 - 2 + ... compute by cofactor:
        // v*(v*v - 0*1) - 0*(2v - 0) + 1*(2 - v) = v^3 + 2 - v
        let m3 = vec![
            vec![p(&[(1, 1)]), p(&[]), p(&[(0, 1)])],
            vec![p(&[(0, 2)]), p(&[(1, 1)]), p(&[])],
            vec![p(&[(0, 1)]), p(&[(0, 1)]), p(&[(1, 1)])],
        ];
        assert_eq!(bareiss_det(m3).unwrap(), p(&[(3, 1), (0, 2), (1, -1)]));
        // singular
        let ms = vec![
            vec![p(&[(1, 1)]), p(&[(2, 2)])],
            vec![p(&[(1, 2)]), p(&[(2, 4)])],
        ];
        assert!(bareiss_det(ms).unwrap().is_zero());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::CoxeterType;
    use crate::hecke::{casimir4, Basis, KlBasis};
    use crate::ratfun::RatFun;
    use crate::schur::Partition;

    fn sys(t: &str) -> Arc<CoxeterSystem> {
        CoxeterSystem::build(t.parse::<CoxeterType>().unwrap()).unwrap()
    }

    fn nf_laurent(pairs: &[(i64, i64)]) -> Laurent<NfElem> {
        Laurent::from_terms(
            pairs
                .iter()
                .map(|&(e, c)| (e, NfElem::rational(BigRational::from(BigInt::from(c))))),
        )
    }

    #[test]
    fn a1_hand_oracle() {
        // Two-dimensional linear algebra by hand: the two central elements
        // are Z_(2) = h_e + v^-1 h_s and Z_(1,1) = h_e - v h_s with Schur
        // elements 1 + q and 1 + q^-1 (q = v^-2).
        let w = sys("A1");
        let d = CentralDecomposition::compute(&w).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(
            d.labels,
            vec![
                IrrLabel::Partition(Partition::new(vec![2])),
                IrrLabel::Partition(Partition::new(vec![1, 1]))
            ]
        );
        assert_eq!(d.dims, vec![BigInt::one(), BigInt::one()]);
        let s = w.parse_word("1").unwrap();
        let mut z_triv = HeckeElt::<NfElem>::from_coords(
            &w,
            Basis::Standard,
            [(ElemId::IDENTITY, nf_laurent(&[(0, 1)]))],
        );
        z_triv.add_coord(s, &nf_laurent(&[(-1, 1)]));
        let mut z_sign = HeckeElt::<NfElem>::from_coords(
            &w,
            Basis::Standard,
            [(ElemId::IDENTITY, nf_laurent(&[(0, 1)]))],
        );
        z_sign.add_coord(s, &nf_laurent(&[(1, -1)]));
        assert_eq!(d.z[0], z_triv);
        assert_eq!(d.z[1], z_sign);
        assert_eq!(d.schur_v(0), nf_laurent(&[(0, 1), (-2, 1)]));
        assert_eq!(d.schur_v(1), nf_laurent(&[(0, 1), (2, 1)]));
    }

    #[test]
    fn a2_schur_multiset() {
        let w = sys("A2");
        let d = CentralDecomposition::compute(&w).unwrap();
        assert_eq!(d.len(), 3);
        let mut printed: Vec<String> = d.schur.iter().map(print_qnf).collect();
        printed.sort();
        let mut expect = vec![
            "q^3 + 2*q^2 + 2*q + 1".to_string(),
            "q + 1 + q^-1".to_string(),
            "1 + 2*q^-1 + 2*q^-2 + q^-3".to_string(),
        ];
        expect.sort();
        assert_eq!(printed, expect);
        assert!(d.schur_multiset_duality_check());
    }

    #[test]
    fn backends_agree() {
        for t in ["A2", "B2", "I2(5)"] {
            let w = sys(t);
            let a = CentralDecomposition::compute_with(&w, CenterBackend::Exact).unwrap();
            let b = CentralDecomposition::compute_with(&w, CenterBackend::Interpolated).unwrap();
            assert_eq!(a.labels, b.labels, "{t}");
            assert_eq!(a.dims, b.dims, "{t}");
            for i in 0..a.len() {
                assert_eq!(a.schur[i], b.schur[i], "{t} s_{i}");
                assert_eq!(a.z[i], b.z[i], "{t} Z_{i}");
            }
        }
    }

    #[test]
    fn casimir_decompositions() {
        for t in ["A2", "B2"] {
            let w = sys(t);
            let d = CentralDecomposition::compute(&w).unwrap();
            let pair = DualBasisPair::standard(&w);
            // casimir2 = sum dim_l Z_l
            let c2 = casimir2(&pair).to_field();
            let mut expect = HeckeElt::<NfElem>::zero(&w);
            for i in 0..d.len() {
                let dim = NfElem::rational(BigRational::from(d.dims[i].clone()));
                expect = expect.add(&d.z[i].scale(&Laurent::constant(dim)));
            }
            assert_eq!(c2, expect, "{t} casimir2");
            // casimir4 = sum s_l Z_l
            let c4 = casimir4(&pair).to_field();
            let mut expect4 = HeckeElt::<NfElem>::zero(&w);
            for i in 0..d.len() {
                expect4 = expect4.add(&d.z[i].scale(&d.schur_v(i)));
            }
            assert_eq!(c4, expect4, "{t} casimir4");
            // conj_average(h) = sum chi_l(h) Z_l on random h
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            for _ in 0..5 {
                let mut h = HeckeElement::zero(&w);
                for _ in 0..3 {
                    let u = ElemId(rng.gen_range(0..w.size() as u32));
                    h.add_coord(
                        u,
                        &LaurentPoly::from_pairs(&[(
                            rng.gen_range(-2..=2),
                            rng.gen_range(-3..=3),
                        )]),
                    );
                }
                let avg = conj_average(&pair, &h).to_field();
                let mut expect = HeckeElt::<NfElem>::zero(&w);
                for i in 0..d.len() {
                    let chi = d.character(i, &h);
                    expect = expect.add(&d.z[i].scale(&chi));
                }
                assert_eq!(avg, expect, "{t} conj_average");
            }
        }
    }

    #[test]
    fn characters() {
        let w = sys("A1");
        let d = CentralDecomposition::compute(&w).unwrap();
        // chi(1) = dim
        for i in 0..d.len() {
            let chi1 = d.character(i, &HeckeElement::unit(&w));
            assert_eq!(
                constant_of(&chi1).unwrap().to_rational().unwrap(),
                BigRational::from(d.dims[i].clone())
            );
        }
        // chi at b_s = h_s + v: values v + v^-1 and 0
        let kl = KlBasis::build(&w);
        let bs = kl.element(w.parse_word("1").unwrap());
        let vals: Vec<Laurent<NfElem>> = (0..2).map(|i| d.character(i, bs)).collect();
        assert_eq!(vals[0], nf_laurent(&[(1, 1), (-1, 1)]));
        assert!(vals[1].is_zero());
    }

    #[test]
    fn character_orthogonality() {
        // sum_w chi_l(C_w) chi_m(C^w) = delta_{l,m} s_l dim_l, with
        // chi_l(h_w) = Z_l coord at w^-1.
        for t in ["A2", "B2"] {
            let w = sys(t);
            let d = CentralDecomposition::compute(&w).unwrap();
            for i in 0..d.len() {
                for j in 0..d.len() {
                    let mut acc: Laurent<NfElem> = Laurent::zero();
                    for u in w.elements() {
                        let a = d.z[i].coord(w.inverse(u));
                        let b = d.z[j].coord(u);
                        if !a.is_zero() && !b.is_zero() {
                            acc.add_assign(&a.mul(&b));
                        }
                    }
                    let expect = if i == j {
                        let dim = NfElem::rational(BigRational::from(d.dims[i].clone()));
                        d.schur_v(i).scale(&dim)
                    } else {
                        Laurent::zero()
                    };
                    assert_eq!(acc, expect, "{t} orthogonality ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn i2_5_field_case() {
        let w = sys("I2(5)");
        let d = CentralDecomposition::compute(&w).unwrap();
        assert_eq!(d.len(), 4);
        let dims: Vec<i64> = d.dims.iter().map(|d| d.try_into().unwrap()).collect();
        assert_eq!(dims, vec![1, 1, 2, 2]);
        // one of the 2-dimensional Schur elements has a negative coefficient
        let negatives = d
            .analyzer_table()
            .iter()
            .filter(|(_, _, rep)| !rep.is_positive)
            .count();
        assert_eq!(negatives, 1);
        assert!(d.schur_multiset_duality_check());
    }

    #[test]
    fn g2_closed_matches_generic() {
        let w = sys("I2(6)");
        let d = CentralDecomposition::compute(&w).unwrap();
        assert_eq!(d.len(), 6);
        let striv = d
            .labels
            .iter()
            .position(|l| *l == IrrLabel::DihTrivial)
            .unwrap();
        assert_eq!(
            print_qnf(&d.schur[striv]),
            "q^6 + 2*q^5 + 2*q^4 + 2*q^3 + 2*q^2 + 2*q + 1"
        );
        assert!(d.schur_multiset_duality_check());
    }

    #[test]
    fn b2_shift_pinned_matches_dihedral() {
        // B2 via hook formulas (shift pinned by the decomposition) equals
        // I2(4) via the explicit dihedral forms.
        let b2 = sys("B2");
        let d = CentralDecomposition::compute(&b2).unwrap();
        let mut got: Vec<String> = d.schur.iter().map(print_qnf).collect();
        got.sort();
        let i4 = sys("I2(4)");
        let d2 = CentralDecomposition::compute(&i4).unwrap();
        let mut expect: Vec<String> = d2.schur.iter().map(print_qnf).collect();
        expect.sort();
        assert_eq!(got, expect);
        // the trivial-type label carries the all-positive-exponent member
        let triv = d
            .labels
            .iter()
            .position(|l| {
                *l == IrrLabel::Pair(Partition::new(vec![2]), Partition::empty())
            })
            .unwrap();
        assert_eq!(d.schur[triv].min_exp(), Some(0));
        assert_eq!(d.schur[triv].max_exp(), Some(4));
    }

    #[test]
    fn center_dimension_matches_commutator_nullspace() {
        // Independent check of the center dimension: the common nullspace of
        // the commutator maps h -> h_s h - h h_s has dimension = #classes.
        for t in ["A1", "A2", "B2"] {
            let w = sys(t);
            let n = w.size();
            let mut rows: Vec<Vec<RatFun<BigRational>>> = Vec::new();
            for s in 0..w.rank() {
                let cols: Vec<HeckeElement> = w
                    .elements()
                    .map(|u| {
                        let hw = HeckeElement::basis_elt(&w, u);
                        hw.mul_gen_left(s).sub(&hw.mul_gen_right(s))
                    })
                    .collect();
                for u in w.elements() {
                    let row: Vec<RatFun<BigRational>> = cols
                        .iter()
                        .map(|c| {
                            RatFun::from_poly(
                                c.coord(u).map_coeffs(|x| BigRational::from(x.clone())),
                            )
                        })
                        .collect();
                    rows.push(row);
                }
            }
            let mut rank = 0;
            let mut mat = rows;
            for col in 0..n {
                let piv = (rank..mat.len()).find(|&r| !mat[r][col].is_zero());
                let Some(piv) = piv else { continue };
                mat.swap(rank, piv);
                let inv = mat[rank][col].inv();
                for c in col..n {
                    mat[rank][c] = mat[rank][c].mul(&inv);
                }
                for r in 0..mat.len() {
                    if r == rank || mat[r][col].is_zero() {
                        continue;
                    }
                    let f = mat[r][col].clone();
                    for c in col..n {
                        let t = f.mul(&mat[rank][c]);
                        mat[r][c] = mat[r][c].sub(&t);
                    }
                }
                rank += 1;
            }
            assert_eq!(n - rank, w.conjugacy_class_count(), "{t}");
        }
    }
}
