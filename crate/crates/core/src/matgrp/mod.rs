//! Matrix groups over `GF(q²)` acting on points, and the permutation-group
//! machinery behind them.

pub mod cosets;
pub mod perm;
pub mod stabchain;
pub mod unitary;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::geometry::{GeometryError, PointSet};
use crate::matrix::Matrix;
pub use perm::{Perm, PermError};
pub use stabchain::StabChain;

/// Default enumeration cap for element tables.
pub const DEFAULT_GROUP_CAP: u128 = 1 << 21;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("group of order {order} exceeds the enumeration cap {cap}")]
    CapExceeded { order: u128, cap: u128 },
    #[error("matrix is not in the group: {0}")]
    NotMember(String),
    #[error("matrix has the wrong shape or field")]
    Shape,
    #[error("point {0} is not in the action domain")]
    NotInDomain(String),
    #[error("{0} requires odd n, got {1}")]
    NeedsOddDimension(&'static str, usize),
    #[error("not a subgroup of the ambient group")]
    NotSubgroup,
    #[error("the action is not faithful modulo scalars")]
    NotFaithful,
    #[error("{what}: expected order {expected}, got {got}")]
    OrderMismatch { what: String, expected: u128, got: u128 },
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("{0}")]
    Unsupported(String),
}

/// A permutation group given by generators. Its stabilizer chain and element
/// table are computed on demand and cached.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    chain: Arc<OnceLock<Arc<StabChain>>>,
    table: Arc<OnceLock<Arc<GroupTable>>>,
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PermGroup(degree={}, gens={})", self.degree, self.gens.len())
    }
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Perm>) -> Result<PermGroup, GroupError> {
        if let Some(g) = gens.iter().find(|g| g.degree() != degree) {
            return Err(GroupError::DegreeMismatch(degree, g.degree()));
        }
        Ok(PermGroup { degree, gens, chain: Default::default(), table: Default::default() })
    }

    pub fn trivial(degree: usize) -> PermGroup {
        PermGroup::new(degree, Vec::new()).unwrap()
    }

    /// `Z_n` acting regularly on `n` points.
    pub fn cyclic(n: usize) -> PermGroup {
        PermGroup::new(n, vec![Perm::cycle(n)]).unwrap()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn gens(&self) -> &[Perm] {
        &self.gens
    }

    pub fn chain(&self) -> &StabChain {
        self.chain.get_or_init(|| Arc::new(StabChain::new(self.degree, &self.gens)))
    }

    pub fn order(&self) -> u128 {
        self.chain().order()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        self.chain().contains(g)
    }

    pub fn subgroup(&self, gens: Vec<Perm>) -> Result<PermGroup, GroupError> {
        let h = PermGroup::new(self.degree, gens)?;
        if !h.gens.iter().all(|g| self.contains(g)) {
            return Err(GroupError::NotSubgroup);
        }
        Ok(h)
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.gens.iter().all(|g| other.contains(g))
    }

    pub fn orbit(&self, pt: u32) -> Vec<u32> {
        orbit_of(self.degree, &self.gens, pt)
    }

    /// Orbits, each sorted, listed by least point.
    pub fn orbits(&self) -> Vec<Vec<u32>> {
        orbits_of(self.degree, &self.gens)
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || self.orbit(0).len() == self.degree
    }

    /// `k`-transitivity through the stabilizers of `0, 1, …, k-2`.
    pub fn is_k_transitive(&self, k: usize) -> bool {
        if k > self.degree {
            return false;
        }
        let prefix: Vec<u32> = (0..k.saturating_sub(1) as u32).collect();
        let chain = StabChain::with_base(self.degree, &self.gens, &prefix);
        for i in 0..k {
            let gens = if i == 0 { self.gens.clone() } else { chain.stabilizer_gens(i) };
            let orbit = orbit_of(self.degree, &gens, i as u32);
            if orbit.len() != self.degree - i {
                return false;
            }
        }
        true
    }

    /// Stabilizer of a point, generated by Schreier generators.
    pub fn stabilizer(&self, pt: u32) -> Result<PermGroup, GroupError> {
        if pt as usize >= self.degree {
            return Err(GroupError::NotInDomain(pt.to_string()));
        }
        let chain = StabChain::with_base(self.degree, &self.gens, &[pt]);
        let gens = chain.stabilizer_gens(1);
        let h = PermGroup::new(self.degree, gens)?;
        debug_assert_eq!(h.order() * chain.orbit_lengths()[0] as u128, self.order());
        Ok(h)
    }

    /// The element table, enumerating if needed.
    pub fn table(&self, cap: u128) -> Result<Arc<GroupTable>, GroupError> {
        if let Some(t) = self.table.get() {
            return Ok(t.clone());
        }
        let order = self.order();
        if order > cap {
            return Err(GroupError::CapExceeded { order, cap });
        }
        let t = Arc::new(GroupTable::enumerate(self));
        let _ = self.table.set(t.clone());
        Ok(self.table.get().unwrap().clone())
    }

    pub fn cached_table(&self) -> Option<Arc<GroupTable>> {
        self.table.get().cloned()
    }

    /// Sharpen the generating set: keep a generator only if it enlarges the
    /// group generated by the ones kept so far.
    pub fn reduced(&self) -> PermGroup {
        let mut kept: Vec<Perm> = Vec::new();
        let mut chain = StabChain::new(self.degree, &kept);
        for g in &self.gens {
            if !chain.contains(g) {
                kept.push(g.clone());
                chain = StabChain::new(self.degree, &kept);
            }
        }
        let out = PermGroup::new(self.degree, kept).unwrap();
        let _ = out.chain.set(Arc::new(chain));
        out
    }
}

pub(crate) fn orbit_of(degree: usize, gens: &[Perm], pt: u32) -> Vec<u32> {
    let mut seen = vec![false; degree];
    seen[pt as usize] = true;
    let mut orbit = vec![pt];
    let mut head = 0;
    while head < orbit.len() {
        let b = orbit[head];
        for s in gens {
            let c = s.apply(b);
            if !seen[c as usize] {
                seen[c as usize] = true;
                orbit.push(c);
            }
        }
        head += 1;
    }
    orbit
}

pub fn orbits_of(degree: usize, gens: &[Perm]) -> Vec<Vec<u32>> {
    let mut seen = vec![false; degree];
    let mut out = Vec::new();
    for p in 0..degree as u32 {
        if seen[p as usize] {
            continue;
        }
        let mut o = orbit_of(degree, gens, p);
        for &x in &o {
            seen[x as usize] = true;
        }
        o.sort_unstable();
        out.push(o);
    }
    out
}

/// All elements of a group in canonical order, with constant-time lookup.
///
/// Canonical order is breadth-first over the generators (words read left to
/// right), each layer sorted by image array. Elements are keyed by their
/// images of a base of the group.
pub struct GroupTable {
    degree: usize,
    elements: Vec<Perm>,
    base: Vec<u32>,
    bits: u32,
    index: HashMap<u128, u32>,
}

impl GroupTable {
    fn enumerate(g: &PermGroup) -> GroupTable {
        let base = g.chain().base();
        let bits = (usize::BITS - g.degree.max(2).saturating_sub(1).leading_zeros()).max(1);
        assert!(base.len() as u32 * bits <= 128, "base too long to pack");
        let mut t = GroupTable { degree: g.degree, elements: Vec::new(), base, bits, index: HashMap::new() };
        let id = Perm::identity(g.degree);
        t.insert(id);
        let mut layer_start = 0;
        while layer_start < t.elements.len() {
            let layer_end = t.elements.len();
            let mut next: Vec<Perm> = Vec::new();
            let mut pending: HashMap<u128, ()> = HashMap::new();
            for i in layer_start..layer_end {
                for s in &g.gens {
                    let y = t.elements[i].mul(s);
                    let k = t.key(&y);
                    if !t.index.contains_key(&k) && pending.insert(k, ()).is_none() {
                        next.push(y);
                    }
                }
            }
            next.sort_unstable();
            for y in next {
                t.insert(y);
            }
            layer_start = layer_end;
        }
        debug_assert_eq!(t.elements.len() as u128, g.order());
        t
    }

    fn insert(&mut self, p: Perm) {
        let k = self.key(&p);
        self.index.insert(k, self.elements.len() as u32);
        self.elements.push(p);
    }

    #[inline]
    fn pack(&self, images: impl Iterator<Item = u32>) -> u128 {
        images.fold(0u128, |acc, x| (acc << self.bits) | x as u128)
    }

    fn key(&self, p: &Perm) -> u128 {
        self.pack(self.base.iter().map(|&b| p.apply(b)))
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn get(&self, i: u32) -> &Perm {
        &self.elements[i as usize]
    }

    pub fn identity(&self) -> u32 {
        0
    }

    pub fn index_of(&self, p: &Perm) -> Option<u32> {
        if p.degree() != self.degree {
            return None;
        }
        let i = *self.index.get(&self.key(p))?;
        (self.elements[i as usize] == *p).then_some(i)
    }

    /// Index of `a ∘ b`.
    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (&self.elements[a as usize], &self.elements[b as usize]);
        let k = self.pack(self.base.iter().map(|&p| x.apply(y.apply(p))));
        self.index[&k]
    }

    pub fn base(&self) -> &[u32] {
        &self.base
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.index_of(&self.elements[a as usize].inv()).expect("closed under inverses")
    }

    pub fn element_order(&self, a: u32) -> u128 {
        self.elements[a as usize].order()
    }

    /// Subgroup generated by the given indices, as a membership mask plus the
    /// element list in breadth-first order.
    pub fn closure(&self, gens: &[u32]) -> IndexSubgroup {
        let mut mask = vec![false; self.len()];
        let mut list = vec![self.identity()];
        mask[0] = true;
        let mut head = 0;
        while head < list.len() {
            let x = list[head];
            for &s in gens {
                let y = self.mul(x, s);
                if !mask[y as usize] {
                    mask[y as usize] = true;
                    list.push(y);
                }
            }
            head += 1;
        }
        IndexSubgroup { mask, list }
    }
}

/// A subgroup of a [`GroupTable`], as indices.
#[derive(Clone, Debug)]
pub struct IndexSubgroup {
    pub mask: Vec<bool>,
    pub list: Vec<u32>,
}

impl IndexSubgroup {
    pub fn order(&self) -> usize {
        self.list.len()
    }

    pub fn contains(&self, i: u32) -> bool {
        self.mask[i as usize]
    }
}

/// A group together with how it was built: label, action domain, and the
/// matrices its generators came from.
#[derive(Clone)]
pub struct GroupHandle {
    pub label: String,
    pub domain: Option<Arc<PointSet>>,
    pub gen_matrices: Vec<Matrix>,
    pub group: PermGroup,
}

impl GroupHandle {
    pub fn from_perm_group(label: impl Into<String>, group: PermGroup) -> GroupHandle {
        GroupHandle { label: label.into(), domain: None, gen_matrices: Vec::new(), group }
    }

    pub fn order(&self) -> u128 {
        self.group.order()
    }

    pub fn degree(&self) -> usize {
        self.group.degree()
    }

    /// `<label> domain=<size> order=<order>`.
    pub fn descriptor(&self) -> String {
        format!("{} domain={} order={}", self.label, self.degree(), self.order())
    }

    /// A subgroup sharing label and domain.
    pub fn subgroup(&self, gens: Vec<Perm>) -> Result<GroupHandle, GroupError> {
        Ok(GroupHandle {
            label: self.label.clone(),
            domain: self.domain.clone(),
            gen_matrices: Vec::new(),
            group: self.group.subgroup(gens)?,
        })
    }

    /// Permutation induced by a matrix on the domain.
    pub fn perm_of(&self, m: &Matrix) -> Result<Perm, GroupError> {
        let domain = self.domain.as_ref().ok_or_else(|| GroupError::Unsupported("group has no matrix domain".into()))?;
        perm_on_points(domain, m)
    }

    pub fn point_index(&self, v: &[crate::gf::Elem]) -> Result<u32, GroupError> {
        let domain = self.domain.as_ref().ok_or_else(|| GroupError::Unsupported("group has no matrix domain".into()))?;
        domain
            .index_of(v)
            .map(|i| i as u32)
            .ok_or_else(|| GroupError::NotInDomain(format!("{v:?}")))
    }
}

/// `SLₙ(q)` acting on all points of `P(GF(q)ⁿ)`, generated by elementary
/// transvections `I + cEᵢⱼ` with `c` running over a prime-field basis.
pub fn special_linear(n: usize, q: u64, cap: u64) -> Result<GroupHandle, GroupError> {
    let (p, s) = crate::arith::prime_power(q).ok_or(GeometryError::NotPrimePower(q))?;
    let f = crate::gf::Field::new(p, s).map_err(GeometryError::from)?;
    let domain = Arc::new(crate::geometry::all_points(&f, n, cap)?);
    let mut mats = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for k in 0..s {
                let mut m = Matrix::identity(&f, n);
                m.set(i, j, crate::gf::Elem::from_raw((p as u32).pow(k)));
                mats.push(m);
            }
        }
    }
    let perms = mats.iter().map(|m| perm_on_points(&domain, m)).collect::<Result<Vec<_>, _>>()?;
    let group = PermGroup::new(domain.len(), perms)?.reduced();
    Ok(GroupHandle { label: format!("SL {n} {q}"), domain: Some(domain), gen_matrices: mats, group })
}

/// Images of the domain points under `m`.
pub fn perm_on_points(domain: &PointSet, m: &Matrix) -> Result<Perm, GroupError> {
    if m.rows() != domain.dim() || m.cols() != domain.dim() || m.field() != domain.field() {
        return Err(GroupError::Shape);
    }
    let images = domain
        .points()
        .iter()
        .map(|p| {
            domain
                .index_of(&m.mul_vec(&p.coords))
                .map(|i| i as u32)
                .ok_or_else(|| GroupError::NotMember("does not preserve the domain".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Perm::from_images(images)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s4() -> PermGroup {
        let t = Perm::from_images(vec![1, 0, 2, 3]).unwrap();
        PermGroup::new(4, vec![Perm::cycle(4), t]).unwrap()
    }

    #[test]
    fn table_matches_order_and_is_canonical() {
        let g = s4();
        let t = g.table(DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(t.len(), 24);
        assert!(t.get(0).is_identity());
        for a in 0..24u32 {
            for b in 0..24u32 {
                let p = t.get(a).mul(t.get(b));
                assert_eq!(t.index_of(&p), Some(t.mul(a, b)));
            }
            assert_eq!(t.mul(a, t.inv(a)), 0);
        }
        let again = GroupTable::enumerate(&g);
        assert_eq!(again.elements(), t.elements());
    }

    #[test]
    fn cap_is_enforced() {
        assert_eq!(s4().table(10).err(), Some(GroupError::CapExceeded { order: 24, cap: 10 }));
    }

    #[test]
    fn orbits_and_transitivity() {
        assert!(s4().is_k_transitive(4));
        let c = PermGroup::cyclic(6);
        assert!(c.is_transitive());
        assert!(!c.is_k_transitive(2));
        let trivial = PermGroup::trivial(3);
        assert_eq!(trivial.orbits(), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(s4().stabilizer(2).unwrap().order(), 6);
        let sq = PermGroup::new(6, vec![Perm::cycle(6).pow(2)]).unwrap();
        assert_eq!(sq.orbits(), vec![vec![0, 2, 4], vec![1, 3, 5]]);
    }

    #[test]
    fn closure_in_table() {
        let g = s4();
        let t = g.table(100).unwrap();
        let c4 = t.index_of(&Perm::cycle(4)).unwrap();
        assert_eq!(t.closure(&[c4]).order(), 4);
        assert_eq!(t.closure(&[]).order(), 1);
    }

    #[test]
    fn reduced_generating_set() {
        let g = PermGroup::new(6, vec![Perm::cycle(6), Perm::cycle(6).pow(2), Perm::cycle(6).pow(3)]).unwrap();
        let r = g.reduced();
        assert_eq!(r.gens().len(), 1);
        assert_eq!(r.order(), 6);
    }
}
