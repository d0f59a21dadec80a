//! Ciliated surfaces, triangulations with flips, and the invariant
//! pipelines.
//!
//! A ciliated surface of genus g with k punctures and boundary circles
//! carrying cilia gets a Laurent-polynomial invariant computed four ways:
//!
//! * `invariant_statesum`: sum over labelings of the internal edges of a
//!   triangulation of products of oriented structure constants per face;
//! * `invariant_polygon`: the trace of the product of (dual) basis vectors
//!   along the boundary word of a polygon with identified sides;
//! * `invariant_trace`: the trace of Casimir products, one order-2 factor
//!   per puncture beyond the first and one order-4 factor per handle;
//! * `invariant_schur`: the closed formula sum_l (dim V_l)^k s_l^{2g-2+k+n}
//!   chi_l(h_1) ... chi_l(h_n) over the central decomposition.
//!
//! All pipelines agree exactly on every admissible input; the test suites
//! check this agreement, flip invariance, orientation independence and the
//! q = 1 counting identities.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::center::{laurent_to_int, CentralDecomposition};
use crate::coxeter::{CoxeterSystem, ElemId};
use crate::hecke::{
    anti_involution_sigma, casimir2, casimir4, conj_average, Basis, DualBasisPair, HeckeElement,
    KlBasis, StructureTensor,
};
use crate::laurent::{Laurent, LaurentPoly, QPoly};
use crate::numfield::NfElem;
use crate::ratfun::RatFun;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("surface is not triangulable: {0}")]
    NotTriangulable(String),
    #[error("edge cannot be flipped")]
    NotFlippable,
    #[error("compute guard exceeded: {0}")]
    ComputeGuardExceeded(String),
    #[error("boundary shapes do not match: {0}")]
    ShapeMismatch(String),
    #[error("explicit formula did not clear to a Laurent polynomial")]
    NonpolynomialResult,
    #[error("cannot parse surface: {0}")]
    Parse(String),
}

/// Compute guards for the pipelines, overridable by the caller.
#[derive(Debug, Clone, Copy)]
pub struct Guards {
    /// State sum and polygon pipelines: |W|^(#summed indices) at most this.
    pub max_labelings: u64,
    /// Trace pipeline: |W|^2 at most this (order-4 Casimir cost).
    pub max_order_squared: u64,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            max_labelings: 100_000_000,
            max_order_squared: 10_000_000,
        }
    }
}

// ---------------------------------------------------------------------------
// Surfaces
// ---------------------------------------------------------------------------

/// A ciliated surface: genus, punctures, and boundary components carrying
/// cyclic lists of labels (one label per boundary segment between cilia).
#[derive(Clone)]
pub struct CiliatedSurface {
    pub system: Arc<CoxeterSystem>,
    pub genus: u32,
    pub punctures: u32,
    pub boundaries: Vec<Vec<HeckeElement>>,
}

impl CiliatedSurface {
    /// Labels in the Kazhdan-Lusztig basis are converted to the standard
    /// basis here.
    pub fn new(
        system: &Arc<CoxeterSystem>,
        genus: u32,
        punctures: u32,
        boundaries: Vec<Vec<HeckeElement>>,
    ) -> Result<Self, SurfaceError> {
        if punctures as usize + boundaries.len() == 0 {
            return Err(SurfaceError::NotTriangulable(
                "need at least one puncture or boundary".into(),
            ));
        }
        if boundaries.iter().any(|b| b.is_empty()) {
            return Err(SurfaceError::ShapeMismatch(
                "boundary component with no cilium".into(),
            ));
        }
        let needs_kl = boundaries
            .iter()
            .flatten()
            .any(|l| l.basis == Basis::Kl);
        let kl = if needs_kl {
            Some(KlBasis::build(system))
        } else {
            None
        };
        let boundaries = boundaries
            .into_iter()
            .map(|comp| {
                comp.into_iter()
                    .map(|l| match l.basis {
                        Basis::Standard => l,
                        Basis::Kl => kl.as_ref().unwrap().from_kl(&l),
                    })
                    .collect()
            })
            .collect();
        Ok(CiliatedSurface {
            system: system.clone(),
            genus,
            punctures,
            boundaries,
        })
    }

    pub fn punctured(
        system: &Arc<CoxeterSystem>,
        genus: u32,
        punctures: u32,
    ) -> Result<Self, SurfaceError> {
        Self::new(system, genus, punctures, Vec::new())
    }

    pub fn num_boundaries(&self) -> usize {
        self.boundaries.len()
    }

    pub fn cilia_count(&self) -> usize {
        self.boundaries.iter().map(|b| b.len()).sum()
    }

    /// Whether a triangulation with vertices at punctures and cilia exists.
    pub fn is_triangulable(&self) -> bool {
        let kn = self.punctures as usize + self.num_boundaries();
        let c = self.cilia_count();
        if kn == 0 {
            return false;
        }
        if self.genus > 0 {
            return true;
        }
        kn >= 3 || (kn == 2 && c >= 1) || (kn == 1 && c >= 3)
    }

    /// Product of the labels along each boundary component in stored cyclic
    /// order (well-defined up to conjugacy, which is all the invariant
    /// needs).
    pub fn boundary_products(&self) -> Vec<HeckeElement> {
        self.boundaries
            .iter()
            .map(|comp| {
                let mut acc = HeckeElement::unit(&self.system);
                for l in comp {
                    acc = acc.mul(l);
                }
                acc
            })
            .collect()
    }

    /// {"type":"A2","genus":1,"punctures":2,"boundaries":[{"labels":[...]}]}
    pub fn from_json(
        value: &serde_json::Value,
        system: &Arc<CoxeterSystem>,
    ) -> Result<Self, SurfaceError> {
        let genus = value
            .get("genus")
            .and_then(|g| g.as_u64())
            .ok_or_else(|| SurfaceError::Parse("missing \"genus\"".into()))? as u32;
        let punctures = value
            .get("punctures")
            .and_then(|k| k.as_u64())
            .ok_or_else(|| SurfaceError::Parse("missing \"punctures\"".into()))?
            as u32;
        let mut boundaries = Vec::new();
        if let Some(arr) = value.get("boundaries").and_then(|b| b.as_array()) {
            for comp in arr {
                let labels = comp
                    .get("labels")
                    .and_then(|l| l.as_array())
                    .ok_or_else(|| SurfaceError::Parse("boundary missing \"labels\"".into()))?;
                let mut out = Vec::new();
                for l in labels {
                    out.push(parse_label(system, l)?);
                }
                boundaries.push(out);
            }
        }
        Self::new(system, genus, punctures, boundaries)
    }
}

/// A label is either a bare basis vector {"basis":"kl","word":"121"} or a
/// full element {"basis":...,"terms":[...]}.
fn parse_label(
    system: &Arc<CoxeterSystem>,
    value: &serde_json::Value,
) -> Result<HeckeElement, SurfaceError> {
    if value.get("terms").is_some() {
        return HeckeElement::from_json(system, value)
            .map_err(|e| SurfaceError::Parse(e.to_string()));
    }
    let word = value
        .get("word")
        .and_then(|w| w.as_str())
        .ok_or_else(|| SurfaceError::Parse("label needs \"word\" or \"terms\"".into()))?;
    let w = system
        .parse_word(word)
        .map_err(|e| SurfaceError::Parse(e.to_string()))?;
    let basis = match value.get("basis").and_then(|b| b.as_str()) {
        Some("kl") => Basis::Kl,
        _ => Basis::Standard,
    };
    let mut e = HeckeElement::basis_elt(system, w);
    e.basis = basis;
    Ok(e)
}

// ---------------------------------------------------------------------------
// Triangulations
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Fixed group-element label for external (boundary) edges.
    pub label: Option<ElemId>,
}

/// Combinatorial triangulation: faces are triples of (edge, direction)
/// slots read along the counterclockwise boundary of the face; `true` means
/// the slot runs along the edge's stored orientation. Internal edges appear
/// in exactly two slots with opposite directions.
#[derive(Clone)]
pub struct Triangulation {
    pub system: Arc<CoxeterSystem>,
    pub edges: Vec<Edge>,
    pub faces: Vec<[(usize, bool); 3]>,
}

impl Triangulation {
    pub fn num_internal_edges(&self) -> usize {
        self.edges.iter().filter(|e| e.label.is_none()).count()
    }

    pub fn internal_edges(&self) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&i| self.edges[i].label.is_none())
            .collect()
    }

    fn check_consistency(&self) {
        let mut occurrences: Vec<Vec<bool>> = vec![Vec::new(); self.edges.len()];
        for f in &self.faces {
            for &(e, dir) in f {
                occurrences[e].push(dir);
            }
        }
        for (e, occ) in occurrences.iter().enumerate() {
            match self.edges[e].label {
                None => {
                    assert_eq!(occ.len(), 2, "internal edge {e} in {} slots", occ.len());
                    assert_ne!(occ[0], occ[1], "internal edge {e} traversed twice the same way");
                }
                Some(_) => {
                    assert_eq!(occ.len(), 1, "external edge {e} in {} slots", occ.len());
                }
            }
        }
    }

    /// Diagonal exchange in the quadrilateral formed by the two faces of an
    /// internal edge.
    pub fn flip(&self, edge: usize) -> Result<Triangulation, SurfaceError> {
        if edge >= self.edges.len() || self.edges[edge].label.is_some() {
            return Err(SurfaceError::NotFlippable);
        }
        let adjacent: Vec<usize> = self
            .faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.iter().any(|&(e, _)| e == edge))
            .map(|(i, _)| i)
            .collect();
        if adjacent.len() != 2 {
            // both occurrences inside one face: not a quadrilateral
            return Err(SurfaceError::NotFlippable);
        }
        // rotate each face so the shared edge comes first; f1 traverses it
        // forward, f2 backward
        let rot = |f: &[(usize, bool); 3]| -> [(usize, bool); 3] {
            let p = f.iter().position(|&(e, _)| e == edge).unwrap();
            [f[p], f[(p + 1) % 3], f[(p + 2) % 3]]
        };
        let mut f1 = rot(&self.faces[adjacent[0]]);
        let mut f2 = rot(&self.faces[adjacent[1]]);
        if !f1[0].1 {
            std::mem::swap(&mut f1, &mut f2);
        }
        debug_assert!(f1[0].1 && !f2[0].1);
        let (a, b) = (f1[1], f1[2]);
        let (c, d) = (f2[1], f2[2]);
        // quadrilateral boundary a b c d; new diagonal joins the corners
        // between b|c and d|a
        let mut out = self.clone();
        out.faces[adjacent[0]] = [b, c, (edge, false)];
        out.faces[adjacent[1]] = [d, a, (edge, true)];
        out.check_consistency();
        Ok(out)
    }

    /// Reverse the orientation of the surface: each face is traversed the
    /// other way round.
    pub fn reverse_orientation(&self) -> Triangulation {
        let mut out = self.clone();
        for f in out.faces.iter_mut() {
            *f = [
                (f[2].0, !f[2].1),
                (f[1].0, !f[1].1),
                (f[0].0, !f[0].1),
            ];
        }
        out.check_consistency();
        out
    }

    /// Invert every boundary label (the combinatorics is unchanged; an
    /// external edge with reversed orientation carries the inverse label).
    pub fn invert_external_labels(&self) -> Triangulation {
        let mut out = self.clone();
        for e in out.edges.iter_mut() {
            if let Some(w) = e.label {
                e.label = Some(self.system.inverse(w));
            }
        }
        out
    }

    /// Re-draw the stored orientation of an internal edge (the state sum
    /// must not depend on these choices).
    pub fn reorient_internal_edge(&self, edge: usize) -> Result<Triangulation, SurfaceError> {
        if edge >= self.edges.len() || self.edges[edge].label.is_some() {
            return Err(SurfaceError::NotFlippable);
        }
        let mut out = self.clone();
        for f in out.faces.iter_mut() {
            for slot in f.iter_mut() {
                if slot.0 == edge {
                    slot.1 = !slot.1;
                }
            }
        }
        out.check_consistency();
        Ok(out)
    }
}

/// Side of a polygon before identification.
#[derive(Debug, Clone, PartialEq)]
enum Side {
    /// Internal class occurrence: (class index, sign).
    Class(usize, bool),
    /// Boundary side with a fixed label.
    External(ElemId),
}

/// Fan triangulation of an N-gon with identified sides; the workhorse
/// behind the canned surface triangulations.
fn fan_triangulation(
    system: &Arc<CoxeterSystem>,
    sides: &[Side],
    num_classes: usize,
) -> Result<Triangulation, SurfaceError> {
    let n = sides.len();
    if n < 3 {
        return Err(SurfaceError::NotTriangulable(format!(
            "{n}-gon cannot be fan-triangulated"
        )));
    }
    // edges: one per class, one per external side, then the diagonals
    let mut edges: Vec<Edge> = vec![Edge { label: None }; num_classes];
    let mut side_slots: Vec<(usize, bool)> = Vec::with_capacity(n);
    for s in sides {
        match s {
            Side::Class(c, sign) => side_slots.push((*c, *sign)),
            Side::External(w) => {
                edges.push(Edge { label: Some(*w) });
                side_slots.push((edges.len() - 1, true));
            }
        }
    }
    let diag_base = edges.len();
    for _ in 0..n.saturating_sub(3) {
        edges.push(Edge { label: None });
    }
    // faces of the fan from vertex 0: (0, j, j+1) for j = 1..n-2; the
    // diagonal d_j runs 0 -> j (j = 2..n-2)
    let diag = |j: usize| diag_base + j - 2;
    let mut faces = Vec::with_capacity(n - 2);
    for j in 1..=n - 2 {
        let first = if j == 1 {
            side_slots[0]
        } else {
            (diag(j), true)
        };
        let last = if j == n - 2 {
            side_slots[n - 1]
        } else {
            (diag(j + 1), false)
        };
        faces.push([first, side_slots[j], last]);
    }
    let tri = Triangulation {
        system: system.clone(),
        edges,
        faces,
    };
    tri.check_consistency();
    Ok(tri)
}

/// Triangulation of the punctured surface of genus g with k punctures, from
/// the polygon with boundary word
/// `a_1 b_1 a_1' b_1' ... a_g b_g a_g' b_g' x_1 x_1' ... x_{k-1} x_{k-1}'`.
pub fn triangulate_punctured(
    system: &Arc<CoxeterSystem>,
    genus: u32,
    punctures: u32,
) -> Result<Triangulation, SurfaceError> {
    if punctures == 0 {
        return Err(SurfaceError::NotTriangulable(
            "closed surfaces have no triangulation with puncture vertices".into(),
        ));
    }
    let g = genus as usize;
    let k = punctures as usize;
    let mut sides = Vec::new();
    for i in 0..g {
        let a = 2 * i;
        let b = 2 * i + 1;
        sides.push(Side::Class(a, true));
        sides.push(Side::Class(b, true));
        sides.push(Side::Class(a, false));
        sides.push(Side::Class(b, false));
    }
    for j in 0..k - 1 {
        let x = 2 * g + j;
        sides.push(Side::Class(x, true));
        sides.push(Side::Class(x, false));
    }
    let tri = fan_triangulation(system, &sides, 2 * g + k - 1)?;
    // face and edge counts of a triangulation of this surface
    let expect_edges = 6 * g as i64 - 6 + 3 * (k as i64);
    let expect_faces = 4 * g as i64 - 4 + 2 * (k as i64);
    assert_eq!(tri.edges.len() as i64, expect_edges);
    assert_eq!(tri.faces.len() as i64, expect_faces);
    Ok(tri)
}

/// The ciliated disc with three boundary edges labeled x, y, z read along
/// the boundary.
pub fn triangle_disc(
    system: &Arc<CoxeterSystem>,
    labels: [ElemId; 3],
) -> Result<Triangulation, SurfaceError> {
    fan_triangulation(
        system,
        &[
            Side::External(labels[0]),
            Side::External(labels[1]),
            Side::External(labels[2]),
        ],
        0,
    )
}

/// The ciliated disc with four boundary edges, fan-triangulated.
pub fn quadrilateral_disc(
    system: &Arc<CoxeterSystem>,
    labels: [ElemId; 4],
) -> Result<Triangulation, SurfaceError> {
    fan_triangulation(
        system,
        &[
            Side::External(labels[0]),
            Side::External(labels[1]),
            Side::External(labels[2]),
            Side::External(labels[3]),
        ],
        0,
    )
}

// ---------------------------------------------------------------------------
// State sum pipeline
// ---------------------------------------------------------------------------

/// The state sum: sum over labelings of the internal edges of the product of
/// oriented structure constants over faces, with early pruning on zero
/// factors.
pub fn invariant_statesum(
    tri: &Triangulation,
    tensor: &StructureTensor,
    guards: &Guards,
) -> Result<LaurentPoly, SurfaceError> {
    assert!(Arc::ptr_eq(&tri.system, &tensor.system), "tensor system");
    let n = tri.system.size() as u64;
    let internal = tri.internal_edges();
    let count = n
        .checked_pow(internal.len() as u32)
        .filter(|&c| c <= guards.max_labelings);
    if count.is_none() {
        return Err(SurfaceError::ComputeGuardExceeded(format!(
            "|W|^{} labelings exceed {}",
            internal.len(),
            guards.max_labelings
        )));
    }
    // edge -> position among internal edges
    let mut pos = vec![usize::MAX; tri.edges.len()];
    for (i, &e) in internal.iter().enumerate() {
        pos[e] = i;
    }
    // face becomes evaluable once all its internal edges are assigned
    let mut ready_at: Vec<Vec<usize>> = vec![Vec::new(); internal.len() + 1];
    for (fi, f) in tri.faces.iter().enumerate() {
        let last = f
            .iter()
            .filter_map(|&(e, _)| (pos[e] != usize::MAX).then_some(pos[e]))
            .max();
        match last {
            Some(p) => ready_at[p + 1].push(fi),
            None => ready_at[0].push(fi),
        }
    }
    let fixed: Vec<Option<ElemId>> = tri.edges.iter().map(|e| e.label).collect();

    struct Ctx<'a> {
        tri: &'a Triangulation,
        tensor: &'a StructureTensor,
        internal: &'a [usize],
        ready_at: &'a [Vec<usize>],
    }

    fn face_weight(
        ctx: &Ctx,
        fi: usize,
        labels: &[Option<ElemId>],
    ) -> LaurentPoly {
        let f = &ctx.tri.faces[fi];
        let get = |slot: (usize, bool)| {
            let w = labels[slot.0].expect("assigned");
            (w, slot.1)
        };
        ctx.tensor
            .c_oriented([get(f[0]), get(f[1]), get(f[2])])
            .clone()
    }

    fn dfs(
        ctx: &Ctx,
        depth: usize,
        labels: &mut Vec<Option<ElemId>>,
        partial: &LaurentPoly,
        acc: &mut LaurentPoly,
    ) {
        if depth == ctx.internal.len() {
            acc.add_assign(partial);
            return;
        }
        let edge = ctx.internal[depth];
        for w in ctx.tri.system.elements() {
            labels[edge] = Some(w);
            let mut p = partial.clone();
            let mut dead = false;
            for &fi in &ctx.ready_at[depth + 1] {
                let wgt = face_weight(ctx, fi, labels);
                if wgt.is_zero() {
                    dead = true;
                    break;
                }
                p = p.mul(&wgt);
            }
            if !dead {
                dfs(ctx, depth + 1, labels, &p, acc);
            }
        }
        labels[edge] = None;
    }

    let ctx = Ctx {
        tri,
        tensor,
        internal: &internal,
        ready_at: &ready_at,
    };
    // faces with no internal edges multiply into the seed
    let mut seed = LaurentPoly::one();
    for &fi in &ready_at[0] {
        let wgt = face_weight(&ctx, fi, &fixed);
        if wgt.is_zero() {
            return Ok(LaurentPoly::zero());
        }
        seed = seed.mul(&wgt);
    }
    if internal.is_empty() {
        return Ok(seed);
    }
    // parallelize over the first internal edge's label
    let first = internal[0];
    let total = tri
        .system
        .elements()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|w| {
            let mut labels = fixed.clone();
            labels[first] = Some(w);
            let mut p = seed.clone();
            for &fi in &ready_at[1] {
                let wgt = face_weight(&ctx, fi, &labels);
                if wgt.is_zero() {
                    return LaurentPoly::zero();
                }
                p = p.mul(&wgt);
            }
            let mut acc = LaurentPoly::zero();
            dfs(&ctx, 1, &mut labels, &p, &mut acc);
            acc
        })
        .reduce(LaurentPoly::zero, |a, b| a.add(&b));
    Ok(total)
}

// ---------------------------------------------------------------------------
// Polygon trace pipeline
// ---------------------------------------------------------------------------

/// A cyclic polygon word: occurrences of edge classes with signs. Internal
/// classes occur exactly twice, once with each sign; classes occurring once
/// are external and carry labels.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonWord {
    pub sides: Vec<(String, bool)>,
}

impl PolygonWord {
    /// Parse "a b a' b'": identifiers with a trailing apostrophe for the
    /// inverse occurrence.
    pub fn parse(s: &str) -> Result<Self, SurfaceError> {
        let mut sides = Vec::new();
        for tok in s.split_whitespace() {
            let (name, inv) = match tok.strip_suffix('\'') {
                Some(base) => (base, true),
                None => (tok, false),
            };
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(SurfaceError::Parse(format!("bad side token {tok:?}")));
            }
            sides.push((name.to_string(), inv));
        }
        let w = PolygonWord { sides };
        w.validate()?;
        Ok(w)
    }

    fn validate(&self) -> Result<(), SurfaceError> {
        let mut seen: BTreeMap<&str, Vec<bool>> = BTreeMap::new();
        for (name, inv) in &self.sides {
            seen.entry(name).or_default().push(*inv);
        }
        for (name, occ) in seen {
            match occ.len() {
                1 => {}
                2 => {
                    if occ[0] == occ[1] {
                        return Err(SurfaceError::Parse(format!(
                            "class {name:?} occurs twice with the same sign"
                        )));
                    }
                }
                n => {
                    return Err(SurfaceError::Parse(format!(
                        "class {name:?} occurs {n} times"
                    )))
                }
            }
        }
        Ok(())
    }

    /// Classes occurring twice (to be summed over the group).
    pub fn internal_classes(&self) -> Vec<String> {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for (name, _) in &self.sides {
            *counts.entry(name).or_default() += 1;
        }
        counts
            .into_iter()
            .filter(|(_, c)| *c == 2)
            .map(|(n, _)| n.to_string())
            .collect()
    }

    pub fn external_classes(&self) -> Vec<String> {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for (name, _) in &self.sides {
            *counts.entry(name).or_default() += 1;
        }
        counts
            .into_iter()
            .filter(|(_, c)| *c == 1)
            .map(|(n, _)| n.to_string())
            .collect()
    }
}

/// The trace of the product along the polygon boundary, summed over all
/// labelings of the internal classes; the inverse occurrence of a class
/// contributes the dual basis vector h_{w^-1}, and an external label h at an
/// inverse occurrence contributes its anti-involution image.
pub fn invariant_polygon(
    system: &Arc<CoxeterSystem>,
    word: &PolygonWord,
    external: &BTreeMap<String, HeckeElement>,
    guards: &Guards,
) -> Result<LaurentPoly, SurfaceError> {
    word.validate()?;
    let classes = word.internal_classes();
    for name in word.external_classes() {
        if !external.contains_key(&name) {
            return Err(SurfaceError::ShapeMismatch(format!(
                "external class {name:?} has no label"
            )));
        }
    }
    let n = system.size() as u64;
    if n.checked_pow(classes.len() as u32)
        .filter(|&c| c <= guards.max_labelings)
        .is_none()
    {
        return Err(SurfaceError::ComputeGuardExceeded(format!(
            "|W|^{} labelings exceed {}",
            classes.len(),
            guards.max_labelings
        )));
    }
    if word.sides.is_empty() {
        return Ok(LaurentPoly::one());
    }
    let class_index: BTreeMap<&str, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    // precompute external factors for both signs
    let ext: BTreeMap<&str, (HeckeElement, HeckeElement)> = external
        .iter()
        .map(|(k, v)| (k.as_str(), (v.clone(), anti_involution_sigma(v))))
        .collect();

    let eval = |assign: &[ElemId]| -> LaurentPoly {
        let mut acc: Option<HeckeElement> = None;
        let last = word.sides.len() - 1;
        let mut result = LaurentPoly::zero();
        for (i, (name, inv)) in word.sides.iter().enumerate() {
            let factor: HeckeElement = match class_index.get(name.as_str()) {
                Some(&ci) => {
                    let w = assign[ci];
                    let w = if *inv { system.inverse(w) } else { w };
                    HeckeElement::basis_elt(system, w)
                }
                None => {
                    let (plain, sigma) = &ext[name.as_str()];
                    if *inv {
                        sigma.clone()
                    } else {
                        plain.clone()
                    }
                }
            };
            if i == last {
                let head = acc.take().unwrap_or_else(|| HeckeElement::unit(system));
                result = head.trace_mul(&factor);
            } else {
                acc = Some(match acc.take() {
                    Some(a) => a.mul(&factor),
                    None => factor,
                });
            }
        }
        result
    };

    if classes.is_empty() {
        return Ok(eval(&[]));
    }
    let total = system
        .elements()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|w0| {
            let mut assign = vec![ElemId::IDENTITY; classes.len()];
            assign[0] = w0;
            let mut acc = LaurentPoly::zero();
            enumerate_rest(system, &mut assign, 1, &eval, &mut acc);
            acc
        })
        .reduce(LaurentPoly::zero, |a, b| a.add(&b));
    Ok(total)
}

fn enumerate_rest<F: Fn(&[ElemId]) -> LaurentPoly>(
    system: &Arc<CoxeterSystem>,
    assign: &mut Vec<ElemId>,
    depth: usize,
    eval: &F,
    acc: &mut LaurentPoly,
) {
    if depth == assign.len() {
        acc.add_assign(&eval(assign));
        return;
    }
    for w in system.elements() {
        assign[depth] = w;
        enumerate_rest(system, assign, depth + 1, eval, acc);
    }
}

/// The canonical polygon word of the punctured surface of genus g with k
/// punctures.
pub fn punctured_polygon_word(genus: u32, punctures: u32) -> Result<PolygonWord, SurfaceError> {
    if punctures == 0 {
        return Err(SurfaceError::NotTriangulable(
            "polygon words here require at least one puncture".into(),
        ));
    }
    let mut sides = Vec::new();
    for i in 0..genus {
        sides.push((format!("a{i}"), false));
        sides.push((format!("b{i}"), false));
        sides.push((format!("a{i}"), true));
        sides.push((format!("b{i}"), true));
    }
    for j in 0..punctures.saturating_sub(1) {
        sides.push((format!("x{j}"), false));
        sides.push((format!("x{j}"), true));
    }
    Ok(PolygonWord { sides })
}

// ---------------------------------------------------------------------------
// Casimir trace pipeline
// ---------------------------------------------------------------------------

/// tr(casimir2^{k-1} casimir4^g) for punctured surfaces; with boundary the
/// Casimir product is completed by conjugation averages of the boundary
/// holonomies and one bare boundary factor.
pub fn invariant_trace(
    surface: &CiliatedSurface,
    guards: &Guards,
) -> Result<LaurentPoly, SurfaceError> {
    let system = &surface.system;
    let n = system.size() as u64;
    if n * n > guards.max_order_squared {
        return Err(SurfaceError::ComputeGuardExceeded(format!(
            "|W|^2 = {} exceeds {}",
            n * n,
            guards.max_order_squared
        )));
    }
    let g = surface.genus as u64;
    let k = surface.punctures as u64;
    let nb = surface.num_boundaries() as u64;
    if k + nb == 0 {
        return Err(SurfaceError::NotTriangulable(
            "need a puncture or boundary".into(),
        ));
    }
    let pair = DualBasisPair::standard(system);
    let c2 = casimir2(&pair);
    let mut acc = HeckeElement::unit(system);
    if g > 0 {
        let c4 = casimir4(&pair);
        acc = acc.mul(&c4.pow(g));
    }
    if nb == 0 {
        // tr(c2^{k-1} c4^g)
        acc = acc.mul(&c2.pow(k - 1));
        Ok(acc.trace())
    } else {
        // tr(c4^g c2^k prod_{i>=2} conj_avg(h_i) h_1)
        let hs = surface.boundary_products();
        acc = acc.mul(&c2.pow(k));
        for h in hs.iter().skip(1) {
            acc = acc.mul(&conj_average(&pair, h));
        }
        Ok(acc.trace_mul(&hs[0]))
    }
}

// ---------------------------------------------------------------------------
// Schur formula pipeline
// ---------------------------------------------------------------------------

/// sum_l (dim V_l)^k s_l(q)^{2g-2+k+n} chi_l(h_1) ... chi_l(h_n), evaluated
/// over the fraction field when the exponent is negative and verified to
/// clear to an integer Laurent polynomial.
pub fn invariant_schur(
    surface: &CiliatedSurface,
    decomp: &CentralDecomposition,
) -> Result<LaurentPoly, SurfaceError> {
    assert!(Arc::ptr_eq(&surface.system, &decomp.system), "decomposition system");
    let g = surface.genus as i64;
    let k = surface.punctures as i64;
    let nb = surface.num_boundaries() as i64;
    let m = 2 * g - 2 + k + nb;
    let hs = surface.boundary_products();
    let mut acc: RatFun<NfElem> = RatFun::zero();
    for i in 0..decomp.len() {
        let dim = NfElem::rational(BigRational::from(decomp.dims[i].clone()));
        let mut dimk = NfElem::one();
        for _ in 0..k {
            dimk = dimk * dim.clone();
        }
        let mut numer: Laurent<NfElem> = Laurent::constant(dimk);
        for h in &hs {
            let chi = decomp.character(i, h);
            if chi.is_zero() {
                numer = Laurent::zero();
                break;
            }
            numer = numer.mul(&chi);
        }
        if numer.is_zero() {
            continue;
        }
        let term = RatFun::from_poly(numer).mul(&RatFun::from_poly(decomp.schur_v(i)).pow(m));
        acc = acc.add(&term);
    }
    let poly = acc.to_poly().ok_or(SurfaceError::NonpolynomialResult)?;
    laurent_to_int(&poly).ok_or(SurfaceError::NonpolynomialResult)
}

// ---------------------------------------------------------------------------
// Gluing
// ---------------------------------------------------------------------------

/// The invariant of a surface with labeled boundary slots, tabulated over
/// all group labelings (dense, mixed-radix index with the first slot
/// fastest).
pub struct BoundaryFn {
    pub system: Arc<CoxeterSystem>,
    pub arity: usize,
    values: Vec<LaurentPoly>,
}

impl BoundaryFn {
    pub fn tabulate<F: Fn(&[ElemId]) -> LaurentPoly>(
        system: &Arc<CoxeterSystem>,
        arity: usize,
        f: F,
    ) -> Self {
        let n = system.size();
        let total = n.pow(arity as u32);
        let mut values = Vec::with_capacity(total);
        let mut labels = vec![ElemId::IDENTITY; arity];
        for idx in 0..total {
            let mut rest = idx;
            for l in labels.iter_mut() {
                *l = ElemId((rest % n) as u32);
                rest /= n;
            }
            values.push(f(&labels));
        }
        BoundaryFn {
            system: system.clone(),
            arity,
            values,
        }
    }

    /// The triangle: (x, y, z) -> c_xyz.
    pub fn triangle(tensor: &StructureTensor) -> Self {
        Self::tabulate(&tensor.system.clone(), 3, |l| {
            tensor.c(l[0], l[1], l[2]).clone()
        })
    }

    pub fn eval(&self, labels: &[ElemId]) -> &LaurentPoly {
        assert_eq!(labels.len(), self.arity);
        let n = self.system.size();
        let mut idx = 0;
        for l in labels.iter().rev() {
            idx = idx * n + l.index();
        }
        &self.values[idx]
    }

    /// Glue two surfaces with identical boundary shape:
    /// sum_D P1(D) P2(D).
    pub fn glue_sum(&self, other: &BoundaryFn) -> Result<LaurentPoly, SurfaceError> {
        if !Arc::ptr_eq(&self.system, &other.system) || self.arity != other.arity {
            return Err(SurfaceError::ShapeMismatch(format!(
                "arity {} vs {}",
                self.arity, other.arity
            )));
        }
        let mut acc = LaurentPoly::zero();
        for (a, b) in self.values.iter().zip(&other.values) {
            if !a.is_zero() && !b.is_zero() {
                acc.add_assign(&a.mul(b));
            }
        }
        Ok(acc)
    }

    /// Add a puncture to a surface with a triangle boundary (x, y, z):
    /// P'(x, y, z) = sum_{x', z', w} c_{x x'^-1 w} c_{z w^-1 z'^-1} P(x', y, z').
    pub fn extend_puncture(&self, tensor: &StructureTensor) -> Result<BoundaryFn, SurfaceError> {
        if self.arity != 3 {
            return Err(SurfaceError::ShapeMismatch(
                "puncture extension needs a triangle boundary".into(),
            ));
        }
        let sys = &self.system;
        let inv = |w: ElemId| sys.inverse(w);
        Ok(Self::tabulate(sys, 3, |l| {
            let (x, y, z) = (l[0], l[1], l[2]);
            let mut acc = LaurentPoly::zero();
            for xp in sys.elements() {
                for w in sys.elements() {
                    let c1 = tensor.c(x, inv(xp), w);
                    if c1.is_zero() {
                        continue;
                    }
                    for zp in sys.elements() {
                        let c2 = tensor.c(z, inv(w), inv(zp));
                        if c2.is_zero() {
                            continue;
                        }
                        let p = self.eval(&[xp, y, zp]);
                        if !p.is_zero() {
                            acc.add_assign(&c1.mul(c2).mul(p));
                        }
                    }
                }
            }
            acc
        }))
    }

    /// Close a triangle boundary by gluing a bare triangle onto it:
    /// sum_{x,y,z} c_{xyz} P(x, y, z).
    pub fn close_triangle(&self, tensor: &StructureTensor) -> Result<LaurentPoly, SurfaceError> {
        if self.arity != 3 {
            return Err(SurfaceError::ShapeMismatch(
                "closing needs a triangle boundary".into(),
            ));
        }
        let tri = BoundaryFn::triangle(tensor);
        self.glue_sum(&tri)
    }
}

// ---------------------------------------------------------------------------
// Invariant analysis
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    /// All v-exponents even, so the q-view exists (punctured surfaces).
    pub has_q_view: bool,
    /// Invariant under q -> q^-1.
    pub bar_symmetric: bool,
    pub value_at_one: BigInt,
    /// P(1) = |W|^{k-1} x #commutator solutions (when the count is feasible).
    pub commutator_count_check: Option<bool>,
    /// P(1) = |W|^{2g-2+k} sum_l dim_l^{2-2g} (needs the decomposition).
    pub character_form_check: Option<bool>,
}

/// The q = 1 and symmetry checks for a punctured-surface invariant.
pub fn analyze_invariant(
    p: &LaurentPoly,
    system: &Arc<CoxeterSystem>,
    genus: u32,
    punctures: u32,
    decomp: Option<&CentralDecomposition>,
) -> InvariantReport {
    let q_view = p.to_q_view();
    let has_q_view = q_view.is_ok();
    let (bar_symmetric, value_at_one) = match &q_view {
        Ok(q) => (q.bar() == *q, q.value_at_one()),
        Err(_) => (
            false,
            p.evaluate(&BigRational::one())
                .expect("evaluation at 1")
                .to_integer(),
        ),
    };
    let commutator_count_check = system.commutator_solution_count(genus).ok().map(|count| {
        let mut expect = count;
        let order = BigInt::from(system.size());
        for _ in 1..punctures {
            expect *= &order;
        }
        expect == value_at_one
    });
    let character_form_check = decomp.map(|d| {
        // |W|^{2g-2+k} sum dim^{2-2g} as an exact rational
        let order = BigRational::from(BigInt::from(system.size()));
        let e = 2 * genus as i64 - 2 + punctures as i64;
        let mut expect = crate::laurent::rational_pow(&order, e);
        let mut sum = BigRational::zero();
        for dim in &d.dims {
            let dq = BigRational::from(dim.clone());
            sum += crate::laurent::rational_pow(&dq, 2 - 2 * genus as i64);
        }
        expect *= sum;
        expect == BigRational::from(value_at_one.clone())
    });
    InvariantReport {
        has_q_view,
        bar_symmetric,
        value_at_one,
        commutator_count_check,
        character_form_check,
    }
}

/// Convenience: the q-view of a punctured-surface invariant.
pub fn to_q_invariant(p: &LaurentPoly) -> Result<QPoly, SurfaceError> {
    p.to_q_view()
        .map_err(|_| SurfaceError::NonpolynomialResult)
}
