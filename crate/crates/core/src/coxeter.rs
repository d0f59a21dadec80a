//! Finite Coxeter systems with exact element arithmetic.
//!
//! Elements are realized through their permutation action on the finite root
//! system of the geometric representation. Crystallographic types use integer
//! Cartan entries; I2(m) for general m works over Q(2cos(pi/m)) and H3 over
//! the golden ratio field. The closure of the simple roots under the
//! generator reflections produces the positive roots, and every group datum
//! (length, descents, canonical reduced words, multiplication tables) falls
//! out of that action.
//!
//! Canonical words are the lexicographically least reduced words, obtained by
//! repeatedly stripping the smallest-index left descent. Elements get dense
//! ids in (length, canonical word) order, with 0 the identity.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::numfield::{NfElem, NumberField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoxeterError {
    #[error("unsupported Coxeter type: {0}")]
    UnsupportedType(String),
    #[error("group order {order} exceeds the guard {limit} (raise the limit to opt in)")]
    SizeGuardExceeded { order: u64, limit: u64 },
    #[error("elements belong to different Coxeter systems")]
    SystemMismatch,
    #[error("cannot parse word {0:?}: expected digits 1..{1}")]
    WordParse(String, usize),
    #[error("compute guard exceeded: {0}")]
    ComputeGuardExceeded(String),
}

/// Default cap on the group order; E6 (51840) requires opting in.
pub const DEFAULT_MAX_ORDER: u64 = 1200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    A,
    B,
    D,
    I2,
    F4,
    E6,
    H3,
}

/// A supported finite Coxeter type symbol, e.g. A3, B2, D4, I2(7), F4, E6, H3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoxeterType {
    pub family: Family,
    /// Rank for A/B/D, the bond label m for I2; fixed for F4/E6/H3.
    pub param: u32,
}

impl CoxeterType {
    pub fn new(family: Family, param: u32) -> Result<Self, CoxeterError> {
        let ok = match family {
            Family::A => param >= 1,
            Family::B => param >= 2,
            Family::D => param >= 4,
            Family::I2 => param >= 2,
            Family::F4 => param == 4,
            Family::E6 => param == 6,
            Family::H3 => param == 3,
        };
        if !ok {
            return Err(CoxeterError::UnsupportedType(format!("{family:?}{param}")));
        }
        Ok(CoxeterType { family, param })
    }

    pub fn rank(&self) -> usize {
        match self.family {
            Family::A | Family::B | Family::D => self.param as usize,
            Family::I2 => 2,
            Family::F4 => 4,
            Family::E6 => 6,
            Family::H3 => 3,
        }
    }

    /// The classical order formula.
    pub fn order(&self) -> u64 {
        fn fact(n: u64) -> u64 {
            (1..=n).product()
        }
        match self.family {
            Family::A => fact(self.param as u64 + 1),
            Family::B => (1u64 << self.param) * fact(self.param as u64),
            Family::D => (1u64 << (self.param - 1)) * fact(self.param as u64),
            Family::I2 => 2 * self.param as u64,
            Family::F4 => 1152,
            Family::E6 => 51840,
            Family::H3 => 120,
        }
    }

    pub fn num_positive_roots(&self) -> usize {
        let n = self.param as usize;
        match self.family {
            Family::A => n * (n + 1) / 2,
            Family::B => n * n,
            Family::D => n * (n - 1),
            Family::I2 => n,
            Family::F4 => 24,
            Family::E6 => 36,
            Family::H3 => 15,
        }
    }

    /// Coxeter matrix entries m_st (m_ss = 1).
    pub fn coxeter_matrix(&self) -> Vec<Vec<u32>> {
        let n = self.rank();
        let mut m = vec![vec![2u32; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        let bond = |m: &mut Vec<Vec<u32>>, i: usize, j: usize, v: u32| {
            m[i][j] = v;
            m[j][i] = v;
        };
        match self.family {
            Family::A => {
                for i in 0..n.saturating_sub(1) {
                    bond(&mut m, i, i + 1, 3);
                }
            }
            Family::B => {
                for i in 0..n - 2 {
                    bond(&mut m, i, i + 1, 3);
                }
                bond(&mut m, n - 2, n - 1, 4);
            }
            Family::D => {
                for i in 0..n - 2 {
                    bond(&mut m, i, i + 1, 3);
                }
                bond(&mut m, n - 3, n - 1, 3);
            }
            Family::I2 => bond(&mut m, 0, 1, self.param),
            Family::F4 => {
                bond(&mut m, 0, 1, 3);
                bond(&mut m, 1, 2, 4);
                bond(&mut m, 2, 3, 3);
            }
            Family::E6 => {
                // chain 0-1-2-3-4 with 5 attached to 2
                for i in 0..4 {
                    bond(&mut m, i, i + 1, 3);
                }
                bond(&mut m, 2, 5, 3);
            }
            Family::H3 => {
                bond(&mut m, 0, 1, 5);
                bond(&mut m, 1, 2, 3);
            }
        }
        m
    }

    pub fn is_crystallographic(&self) -> bool {
        match self.family {
            Family::I2 => matches!(self.param, 2 | 3 | 4 | 6),
            Family::H3 => false,
            _ => true,
        }
    }
}

impl fmt::Display for CoxeterType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::A => write!(f, "A{}", self.param),
            Family::B => write!(f, "B{}", self.param),
            Family::D => write!(f, "D{}", self.param),
            Family::I2 => write!(f, "I2({})", self.param),
            Family::F4 => write!(f, "F4"),
            Family::E6 => write!(f, "E6"),
            Family::H3 => write!(f, "H3"),
        }
    }
}

impl FromStr for CoxeterType {
    type Err = CoxeterError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || CoxeterError::UnsupportedType(s.to_string());
        if let Some(rest) = s.strip_prefix("I2(").and_then(|r| r.strip_suffix(')')) {
            let m: u32 = rest.parse().map_err(|_| bad())?;
            return CoxeterType::new(Family::I2, m);
        }
        if s.len() < 2 {
            return Err(bad());
        }
        let fam = &s[..1];
        let num: u32 = s[1..].parse().map_err(|_| bad())?;
        match (fam, num) {
            ("A", n) => CoxeterType::new(Family::A, n),
            ("B", n) => CoxeterType::new(Family::B, n),
            ("C", n) => CoxeterType::new(Family::B, n),
            ("D", n) => CoxeterType::new(Family::D, n),
            ("G", 2) => CoxeterType::new(Family::I2, 6),
            ("F", 4) => CoxeterType::new(Family::F4, 4),
            ("E", 6) => CoxeterType::new(Family::E6, 6),
            ("H", 3) => CoxeterType::new(Family::H3, 3),
            _ => Err(bad()),
        }
    }
}

/// Dense element id within one [`CoxeterSystem`]; 0 is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElemId(pub u32);

impl ElemId {
    pub const IDENTITY: ElemId = ElemId(0);

    pub fn index(&self) -> usize {
        self.0 as usize
    }
}

/// A fully enumerated finite Coxeter system with lookup tables for all
/// element arithmetic.
pub struct CoxeterSystem {
    ctype: CoxeterType,
    rank: usize,
    size: usize,
    field: Option<Arc<NumberField>>,
    num_pos_roots: usize,
    /// Root permutations of the generators over signed-root indices
    /// (0..N positive, N..2N negative).
    gen_perms: Vec<Vec<u32>>,
    length: Vec<u32>,
    canonical: Vec<Vec<u8>>,
    right: Vec<u32>,
    left: Vec<u32>,
    inverse: Vec<u32>,
    left_desc: Vec<u16>,
    right_desc: Vec<u16>,
    class_count: OnceLock<usize>,
}

impl fmt::Debug for CoxeterSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoxeterSystem({}, |W|={})", self.ctype, self.size)
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

impl CoxeterSystem {
    pub fn build(ctype: CoxeterType) -> Result<Arc<Self>, CoxeterError> {
        Self::build_with_limit(ctype, DEFAULT_MAX_ORDER)
    }

    pub fn build_with_limit(ctype: CoxeterType, limit: u64) -> Result<Arc<Self>, CoxeterError> {
        let order = ctype.order();
        if order > limit {
            return Err(CoxeterError::SizeGuardExceeded { order, limit });
        }
        let n = ctype.rank();
        let mcox = ctype.coxeter_matrix();

        // Scalar field and Cartan entries c[i][j] = <alpha_j, alpha_i^vee>,
        // so s_i(alpha_j) = alpha_j - c[i][j] alpha_i.
        let field: Option<Arc<NumberField>> = if ctype.is_crystallographic() {
            None
        } else {
            let m = mcox
                .iter()
                .flatten()
                .copied()
                .filter(|&m| m != 1 && m != 2 && m != 3)
                .max()
                .expect("non-crystallographic type has a bond > 3");
            Some(NumberField::two_cos_pi_over(m))
        };
        let nf_int = |k: i64| NfElem::rational(rat(k));
        let mut cartan = vec![vec![NfElem::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    cartan[i][j] = nf_int(2);
                    continue;
                }
                cartan[i][j] = match mcox[i][j] {
                    2 => NfElem::zero(),
                    3 => nf_int(-1),
                    4 => {
                        // asymmetric integer pair (-1, -2)
                        if i < j {
                            nf_int(-1)
                        } else {
                            nf_int(-2)
                        }
                    }
                    6 => {
                        if i < j {
                            nf_int(-1)
                        } else {
                            nf_int(-3)
                        }
                    }
                    m => {
                        // symmetric -2cos(pi/m); the only bond beyond 6 in a
                        // supported type is the one the field was built from
                        let f = field.as_ref().expect("field present");
                        debug_assert_eq!(f.name, format!("2cos(pi/{m})"));
                        -NfElem::generator(f)
                    }
                };
            }
        }

        // Positive-root closure from the simple roots. s_i permutes the
        // positive roots other than alpha_i, so the closure below stays in
        // the positive system and no sign tests are needed.
        let key_of = |coords: &[NfElem]| -> Vec<Vec<BigRational>> {
            coords.iter().map(|c| c.coeffs.clone()).collect()
        };
        let mut pos_roots: Vec<Vec<NfElem>> = Vec::new();
        let mut root_index: HashMap<Vec<Vec<BigRational>>, usize> = HashMap::new();
        for i in 0..n {
            let mut c = vec![NfElem::zero(); n];
            c[i] = NfElem::one();
            root_index.insert(key_of(&c), i);
            pos_roots.push(c);
        }
        let expected_roots = ctype.num_positive_roots();
        let mut head = 0;
        while head < pos_roots.len() {
            let beta = pos_roots[head].clone();
            for i in 0..n {
                if head == i {
                    // alpha_i itself maps to its negative
                    continue;
                }
                // skip alpha_i: only when beta IS alpha_i (head == i covers
                // the initial simple roots; general beta never equals a
                // simple root again because indices are unique)
                let image = reflect(&cartan, i, &beta);
                let k = key_of(&image);
                if !root_index.contains_key(&k) {
                    if pos_roots.len() >= 4 * expected_roots + 8 {
                        return Err(CoxeterError::ComputeGuardExceeded(
                            "root closure did not terminate".into(),
                        ));
                    }
                    root_index.insert(k, pos_roots.len());
                    pos_roots.push(image);
                }
            }
            head += 1;
        }
        let num_pos = pos_roots.len();
        assert_eq!(
            num_pos, expected_roots,
            "positive root count mismatch for {ctype}"
        );

        // Generator permutations on signed roots.
        let mut gen_perms: Vec<Vec<u32>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut perm = vec![0u32; 2 * num_pos];
            for (r, beta) in pos_roots.iter().enumerate() {
                let target: u32 = if r == i {
                    (num_pos + r) as u32
                } else {
                    let image = reflect(&cartan, i, beta);
                    *root_index
                        .get(&key_of(&image))
                        .expect("closure is complete") as u32
                };
                perm[r] = target;
                // negative mirror
                perm[num_pos + r] = if target >= num_pos as u32 {
                    target - num_pos as u32
                } else {
                    target + num_pos as u32
                };
            }
            gen_perms.push(perm);
        }

        // Enumerate the group by BFS over right multiplication.
        let two_n = 2 * num_pos;
        let identity: Vec<u32> = (0..two_n as u32).collect();
        let elem_key = |perm: &[u32]| -> Vec<u32> { (0..n).map(|i| perm[i]).collect() };
        let mut perms: Vec<Vec<u32>> = vec![identity.clone()];
        let mut index: HashMap<Vec<u32>, u32> = HashMap::new();
        index.insert(elem_key(&identity), 0);
        let mut head = 0usize;
        while head < perms.len() {
            let cur = perms[head].clone();
            for s in gen_perms.iter() {
                // (w s)(x) = w(s(x))
                let comp: Vec<u32> = (0..two_n).map(|x| cur[s[x] as usize]).collect();
                let k = elem_key(&comp);
                if !index.contains_key(&k) {
                    index.insert(k, perms.len() as u32);
                    perms.push(comp);
                }
            }
            head += 1;
        }
        let size = perms.len();
        assert_eq!(size as u64, order, "group order mismatch for {ctype}");

        // Provisional tables in BFS order.
        let lengths: Vec<u32> = perms
            .iter()
            .map(|p| (0..num_pos).filter(|&r| p[r] >= num_pos as u32).count() as u32)
            .collect();
        let compose_left = |s: &[u32], w: &[u32]| -> Vec<u32> {
            (0..two_n).map(|x| s[w[x] as usize]).collect()
        };
        let mut left_prov = vec![0u32; size * n];
        let mut right_prov = vec![0u32; size * n];
        for (w, perm) in perms.iter().enumerate() {
            for (i, s) in gen_perms.iter().enumerate() {
                let rp: Vec<u32> = (0..two_n).map(|x| perm[s[x] as usize]).collect();
                right_prov[w * n + i] = index[&elem_key(&rp)];
                let lp = compose_left(s, perm);
                left_prov[w * n + i] = index[&elem_key(&lp)];
            }
        }

        // Canonical words: strip the smallest left descent, memoized in
        // order of increasing length.
        let mut order_ids: Vec<u32> = (0..size as u32).collect();
        order_ids.sort_by_key(|&w| lengths[w as usize]);
        let mut words: Vec<Vec<u8>> = vec![Vec::new(); size];
        for &w in &order_ids {
            let wl = lengths[w as usize];
            if wl == 0 {
                continue;
            }
            let mut s = usize::MAX;
            for i in 0..n {
                let sw = left_prov[w as usize * n + i];
                if lengths[sw as usize] < wl {
                    s = i;
                    break;
                }
            }
            let rest = left_prov[w as usize * n + s];
            let mut word = Vec::with_capacity(wl as usize);
            word.push(s as u8);
            word.extend_from_slice(&words[rest as usize]);
            words[w as usize] = word;
        }

        // Final ids: sort by (length, canonical word).
        let mut final_order: Vec<u32> = (0..size as u32).collect();
        final_order.sort_by(|&a, &b| {
            lengths[a as usize]
                .cmp(&lengths[b as usize])
                .then_with(|| words[a as usize].cmp(&words[b as usize]))
        });
        let mut new_id = vec![0u32; size];
        for (new, &old) in final_order.iter().enumerate() {
            new_id[old as usize] = new as u32;
        }

        let mut length = vec![0u32; size];
        let mut canonical = vec![Vec::new(); size];
        let mut right = vec![0u32; size * n];
        let mut left = vec![0u32; size * n];
        for old in 0..size {
            let newi = new_id[old] as usize;
            length[newi] = lengths[old];
            canonical[newi] = std::mem::take(&mut words[old]);
            for i in 0..n {
                right[newi * n + i] = new_id[right_prov[old * n + i] as usize];
                left[newi * n + i] = new_id[left_prov[old * n + i] as usize];
            }
        }

        // Descent bitmasks and inverses.
        let mut left_desc = vec![0u16; size];
        let mut right_desc = vec![0u16; size];
        for w in 0..size {
            for i in 0..n {
                if length[left[w * n + i] as usize] < length[w] {
                    left_desc[w] |= 1 << i;
                }
                if length[right[w * n + i] as usize] < length[w] {
                    right_desc[w] |= 1 << i;
                }
            }
        }
        let mut inverse = vec![0u32; size];
        for w in 0..size {
            let mut acc = 0u32;
            for &s in canonical[w].iter().rev() {
                acc = right[acc as usize * n + s as usize];
            }
            inverse[w] = acc;
        }

        debug_assert_eq!(length[size - 1] as usize, num_pos, "l(w0) = #positive roots");

        Ok(Arc::new(CoxeterSystem {
            ctype,
            rank: n,
            size,
            field,
            num_pos_roots: num_pos,
            gen_perms,
            length,
            canonical,
            right,
            left,
            inverse,
            left_desc,
            right_desc,
            class_count: OnceLock::new(),
        }))
    }

    pub fn ctype(&self) -> CoxeterType {
        self.ctype
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn field(&self) -> Option<&Arc<NumberField>> {
        self.field.as_ref()
    }

    pub fn num_positive_roots(&self) -> usize {
        self.num_pos_roots
    }

    pub fn identity(&self) -> ElemId {
        ElemId(0)
    }

    pub fn generator(&self, i: usize) -> ElemId {
        assert!(i < self.rank);
        ElemId(self.right[i])
    }

    /// Elements in the deterministic enumeration order: by length, then by
    /// lexicographic canonical word.
    pub fn elements(&self) -> impl Iterator<Item = ElemId> {
        (0..self.size as u32).map(ElemId)
    }

    pub fn longest_element(&self) -> ElemId {
        ElemId(self.size as u32 - 1)
    }

    pub fn length(&self, w: ElemId) -> u32 {
        self.length[w.index()]
    }

    pub fn word(&self, w: ElemId) -> &[u8] {
        &self.canonical[w.index()]
    }

    /// Canonical word in the external 1-based digit format, e.g. "121".
    pub fn word_string(&self, w: ElemId) -> String {
        if w == ElemId::IDENTITY {
            return "e".to_string();
        }
        self.canonical[w.index()]
            .iter()
            .map(|&s| char::from_digit(s as u32 + 1, 10).unwrap())
            .collect()
    }

    /// Parse a word over 1-based generator digits ("121"); "e" or "" is the
    /// identity. The word need not be reduced.
    pub fn parse_word(&self, s: &str) -> Result<ElemId, CoxeterError> {
        let t = s.trim();
        if t.is_empty() || t == "e" {
            return Ok(ElemId::IDENTITY);
        }
        let mut acc = ElemId::IDENTITY;
        for ch in t.chars() {
            let d = ch
                .to_digit(10)
                .filter(|&d| d >= 1 && d <= self.rank as u32)
                .ok_or_else(|| CoxeterError::WordParse(s.to_string(), self.rank))?;
            acc = self.mul_gen(acc, d as usize - 1);
        }
        Ok(acc)
    }

    pub fn mul_gen(&self, w: ElemId, s: usize) -> ElemId {
        ElemId(self.right[w.index() * self.rank + s])
    }

    pub fn gen_mul(&self, s: usize, w: ElemId) -> ElemId {
        ElemId(self.left[w.index() * self.rank + s])
    }

    pub fn mul(&self, a: ElemId, b: ElemId) -> ElemId {
        let mut acc = a;
        for &s in self.word(b) {
            acc = self.mul_gen(acc, s as usize);
        }
        acc
    }

    pub fn inverse(&self, w: ElemId) -> ElemId {
        ElemId(self.inverse[w.index()])
    }

    pub fn left_descents(&self, w: ElemId) -> impl Iterator<Item = usize> + '_ {
        let mask = self.left_desc[w.index()];
        (0..self.rank).filter(move |i| mask & (1 << i) != 0)
    }

    pub fn right_descents(&self, w: ElemId) -> impl Iterator<Item = usize> + '_ {
        let mask = self.right_desc[w.index()];
        (0..self.rank).filter(move |i| mask & (1 << i) != 0)
    }

    pub fn is_left_descent(&self, w: ElemId, s: usize) -> bool {
        self.left_desc[w.index()] & (1 << s) != 0
    }

    pub fn is_right_descent(&self, w: ElemId, s: usize) -> bool {
        self.right_desc[w.index()] & (1 << s) != 0
    }

    /// Bruhat order comparison via descent recursion.
    pub fn bruhat_leq(&self, a: ElemId, b: ElemId) -> bool {
        let mut a = a;
        let mut b = b;
        loop {
            if a == ElemId::IDENTITY {
                return true;
            }
            if self.length(a) > self.length(b) {
                return false;
            }
            let s = self.left_descents(b).next().expect("b != e has a descent");
            b = self.gen_mul(s, b);
            if self.is_left_descent(a, s) {
                a = self.gen_mul(s, a);
            }
        }
    }

    /// The permutation of signed-root indices realized by `w` (computed on
    /// demand from the generator permutations).
    pub fn root_permutation(&self, w: ElemId) -> Vec<u32> {
        let two_n = 2 * self.num_pos_roots;
        let mut perm: Vec<u32> = (0..two_n as u32).collect();
        // w = s_1 ... s_k acting on the left: apply generators right-to-left.
        for &s in self.word(w).iter().rev() {
            let g = &self.gen_perms[s as usize];
            perm = (0..two_n).map(|x| g[perm[x] as usize]).collect();
        }
        // perm currently equals w as built by left-composition; verify length
        debug_assert_eq!(
            (0..self.num_pos_roots)
                .filter(|&r| perm[r] >= self.num_pos_roots as u32)
                .count() as u32,
            self.length(w)
        );
        perm
    }

    /// Number of conjugacy classes (= number of irreducibles).
    pub fn conjugacy_class_count(&self) -> usize {
        *self.class_count.get_or_init(|| {
            let mut seen = vec![false; self.size];
            let mut classes = 0;
            for w in 0..self.size {
                if seen[w] {
                    continue;
                }
                classes += 1;
                // orbit closure under conjugation by generators
                let mut stack = vec![w as u32];
                seen[w] = true;
                while let Some(u) = stack.pop() {
                    for s in 0..self.rank {
                        let c = self.gen_mul(s, self.mul_gen(ElemId(u), s));
                        if !seen[c.index()] {
                            seen[c.index()] = true;
                            stack.push(c.0);
                        }
                    }
                }
            }
            classes
        })
    }

    /// Exact count of 2g-tuples (a_1, b_1, ..., a_g, b_g) with
    /// `prod [a_i, b_i] = e`, by brute force over all tuples.
    pub fn commutator_solution_count(&self, genus: u32) -> Result<BigInt, CoxeterError> {
        if genus == 0 {
            return Ok(BigInt::one());
        }
        let pairs = (self.size as u64).checked_pow(2).ok_or_else(|| {
            CoxeterError::ComputeGuardExceeded("commutator count overflow".into())
        })?;
        let total = pairs.checked_pow(genus).filter(|&t| t <= 200_000_000);
        if total.is_none() {
            return Err(CoxeterError::ComputeGuardExceeded(format!(
                "|W|^(2g) too large for brute force (|W|={}, g={})",
                self.size, genus
            )));
        }
        // freq[c] = #{(a, b) : a b a^-1 b^-1 = c}
        let mut freq: Vec<BigInt> = vec![BigInt::zero(); self.size];
        for a in 0..self.size {
            for b in 0..self.size {
                let ab = self.mul(ElemId(a as u32), ElemId(b as u32));
                let aibi = self.mul(
                    self.inverse(ElemId(a as u32)),
                    self.inverse(ElemId(b as u32)),
                );
                freq[self.mul(ab, aibi).index()] += 1;
            }
        }
        // counts[w] = #tuples of j commutators multiplying to w
        let mut counts = freq.clone();
        for _ in 1..genus {
            let mut next: Vec<BigInt> = vec![BigInt::zero(); self.size];
            for w in 0..self.size {
                if counts[w].is_zero() {
                    continue;
                }
                for c in 0..self.size {
                    if freq[c].is_zero() {
                        continue;
                    }
                    let t = self.mul(ElemId(w as u32), ElemId(c as u32));
                    next[t.index()] += &counts[w] * &freq[c];
                }
            }
            counts = next;
        }
        Ok(counts[0].clone())
    }
}

fn reflect(cartan: &[Vec<NfElem>], i: usize, beta: &[NfElem]) -> Vec<NfElem> {
    // s_i(beta) = beta - <beta, alpha_i^vee> alpha_i
    let mut pairing = NfElem::zero();
    for (j, b) in beta.iter().enumerate() {
        if !b.is_zero() && !cartan[i][j].is_zero() {
            pairing = pairing + cartan[i][j].clone() * b.clone();
        }
    }
    let mut out = beta.to_vec();
    out[i] = out[i].clone() - pairing;
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(s: &str) -> Arc<CoxeterSystem> {
        CoxeterSystem::build(s.parse().unwrap()).unwrap()
    }

    #[test]
    fn orders_match_formulas() {
        for (t, order, roots) in [
            ("A1", 2u64, 1usize),
            ("A2", 6, 3),
            ("A3", 24, 6),
            ("A4", 120, 10),
            ("A5", 720, 15),
            ("B2", 8, 4),
            ("B3", 48, 9),
            ("B4", 384, 16),
            ("D4", 192, 12),
            ("I2(5)", 10, 5),
            ("I2(6)", 12, 6),
            ("I2(7)", 14, 7),
            ("I2(12)", 24, 12),
            ("F4", 1152, 24),
            ("H3", 120, 15),
        ] {
            let w = sys(t);
            assert_eq!(w.size() as u64, order, "{t}");
            assert_eq!(w.num_positive_roots(), roots, "{t}");
            assert_eq!(
                w.length(w.longest_element()) as usize,
                w.num_positive_roots(),
                "{t}"
            );
        }
    }

    #[test]
    fn type_parsing() {
        assert_eq!("A3".parse::<CoxeterType>().unwrap().to_string(), "A3");
        assert_eq!("I2(7)".parse::<CoxeterType>().unwrap().to_string(), "I2(7)");
        assert_eq!("G2".parse::<CoxeterType>().unwrap().to_string(), "I2(6)");
        assert!("H4".parse::<CoxeterType>().is_err());
        assert!("E7".parse::<CoxeterType>().is_err());
        assert!("E8".parse::<CoxeterType>().is_err());
        assert!("D3".parse::<CoxeterType>().is_err());
        assert!("Z5".parse::<CoxeterType>().is_err());
    }

    #[test]
    fn size_guard() {
        let e6: CoxeterType = "E6".parse().unwrap();
        assert!(matches!(
            CoxeterSystem::build(e6),
            Err(CoxeterError::SizeGuardExceeded { .. })
        ));
        let a6: CoxeterType = "A6".parse().unwrap();
        assert!(CoxeterSystem::build(a6).is_err());
        assert!(CoxeterSystem::build_with_limit(a6, 10_000).is_ok());
    }

    #[test]
    fn braid_relation_in_a2() {
        let w = sys("A2");
        let sts = w.parse_word("121").unwrap();
        let tst = w.parse_word("212").unwrap();
        assert_eq!(sts, tst);
        assert_eq!(w.word_string(sts), "121");
        assert_eq!(w.length(sts), 3);
    }

    #[test]
    fn enumeration_order_a2() {
        let w = sys("A2");
        let words: Vec<String> = w.elements().map(|e| w.word_string(e)).collect();
        assert_eq!(words, vec!["e", "1", "2", "12", "21", "121"]);
        let lengths: Vec<u32> = w.elements().map(|e| w.length(e)).collect();
        assert_eq!(lengths, vec![0, 1, 1, 2, 2, 3]);
    }

    #[test]
    fn b2_longest_element() {
        let w = sys("B2");
        assert_eq!(w.size(), 8);
        assert_eq!(w.length(w.longest_element()), 4);
        assert_eq!(w.word_string(w.longest_element()), "1212");
        let stst = w.parse_word("1212").unwrap();
        let tsts = w.parse_word("2121").unwrap();
        assert_eq!(stst, tsts);
    }

    #[test]
    fn inverse_and_identity() {
        let w = sys("A2");
        let st = w.parse_word("12").unwrap();
        let ts = w.parse_word("21").unwrap();
        assert_eq!(w.inverse(st), ts);
        assert_eq!(w.inverse(ElemId::IDENTITY), ElemId::IDENTITY);
        for g in 0..w.rank() {
            let s = w.generator(g);
            assert_eq!(w.inverse(s), s);
        }
        for e in w.elements() {
            assert_eq!(w.mul(e, w.inverse(e)), ElemId::IDENTITY);
            assert_eq!(w.mul(ElemId::IDENTITY, e), e);
            assert_eq!(w.length(w.inverse(e)), w.length(e));
        }
    }

    #[test]
    fn descents() {
        let w = sys("A2");
        assert_eq!(w.left_descents(ElemId::IDENTITY).count(), 0);
        let s = w.generator(0);
        assert_eq!(w.left_descents(s).collect::<Vec<_>>(), vec![0]);
        let w0 = w.longest_element();
        assert_eq!(w.left_descents(w0).count(), w.rank());
        // l(sw) = l(w) +/- 1 for all w, s
        for e in w.elements() {
            for s in 0..w.rank() {
                let sw = w.gen_mul(s, e);
                let d = w.length(sw) as i64 - w.length(e) as i64;
                assert!(d == 1 || d == -1);
            }
        }
    }

    #[test]
    fn canonical_word_round_trip() {
        for t in ["A3", "B3", "I2(7)", "H3", "D4"] {
            let w = sys(t);
            for e in w.elements() {
                let word: String = w.word_string(e);
                assert_eq!(w.parse_word(&word).unwrap(), e, "{t} {word}");
            }
        }
    }

    #[test]
    fn matsumoto_sampled() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for t in ["A3", "B3", "H3"] {
            let w = sys(t);
            for _ in 0..50 {
                let e = ElemId(rng.gen_range(0..w.size() as u32));
                // random reduced word by stripping random left descents
                let mut word = Vec::new();
                let mut cur = e;
                while cur != ElemId::IDENTITY {
                    let descents: Vec<usize> = w.left_descents(cur).collect();
                    let s = descents[rng.gen_range(0..descents.len())];
                    word.push(s);
                    cur = w.gen_mul(s, cur);
                }
                assert_eq!(word.len() as u32, w.length(e));
                let mut acc = ElemId::IDENTITY;
                for &s in &word {
                    acc = w.mul_gen(acc, s);
                }
                assert_eq!(acc, e);
            }
        }
    }

    #[test]
    fn conjugacy_class_counts() {
        assert_eq!(sys("A1").conjugacy_class_count(), 2);
        assert_eq!(sys("A2").conjugacy_class_count(), 3);
        assert_eq!(sys("B2").conjugacy_class_count(), 5);
        assert_eq!(sys("A3").conjugacy_class_count(), 5);
        assert_eq!(sys("I2(5)").conjugacy_class_count(), 4);
        assert_eq!(sys("I2(6)").conjugacy_class_count(), 6);
        assert_eq!(sys("B3").conjugacy_class_count(), 10);
        assert_eq!(sys("H3").conjugacy_class_count(), 10);
        assert_eq!(sys("D4").conjugacy_class_count(), 13);
    }

    #[test]
    fn commutator_counts() {
        let a1 = sys("A1");
        assert_eq!(a1.commutator_solution_count(0).unwrap(), BigInt::from(1));
        assert_eq!(a1.commutator_solution_count(1).unwrap(), BigInt::from(4));
        let a2 = sys("A2");
        // brute force must equal sum over w of |Cent(w)| = |W| * #classes
        assert_eq!(a2.commutator_solution_count(1).unwrap(), BigInt::from(18));
        let mut cent_sum = 0u64;
        for w in a2.elements() {
            for u in a2.elements() {
                let uw = a2.mul(u, w);
                let wu = a2.mul(w, u);
                if uw == wu {
                    cent_sum += 1;
                }
            }
        }
        assert_eq!(cent_sum, 18);
    }

    #[test]
    fn bruhat_order() {
        let w = sys("A2");
        let e = ElemId::IDENTITY;
        let s = w.parse_word("1").unwrap();
        let st = w.parse_word("12").unwrap();
        let w0 = w.longest_element();
        assert!(w.bruhat_leq(e, w0));
        assert!(w.bruhat_leq(s, st));
        assert!(w.bruhat_leq(st, w0));
        assert!(!w.bruhat_leq(w0, st));
        let t = w.parse_word("2").unwrap();
        assert!(w.bruhat_leq(t, st));
        // subword property spot check in B2
        let b = sys("B2");
        let sts = b.parse_word("121").unwrap();
        let ts = b.parse_word("21").unwrap();
        assert!(b.bruhat_leq(ts, sts));
    }

    #[test]
    fn root_permutation_consistency() {
        let w = sys("B2");
        for e in w.elements() {
            let p = w.root_permutation(e);
            let q = w.root_permutation(w.inverse(e));
            // q is the inverse permutation of p
            for x in 0..p.len() {
                assert_eq!(q[p[x] as usize] as usize, x);
            }
        }
    }
}
