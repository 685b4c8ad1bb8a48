//! Double cosets, conjugate intersections and sharp transitivity.

use std::collections::HashMap;
use std::hash::Hash;

use super::{GroupError, GroupTable, IndexSubgroup, Perm, PermGroup};
use crate::arith;

/// `G = ⋃ HgᵢK` with representatives as indices into the table of `G`.
#[derive(Clone, Debug)]
pub struct DoubleCosetDecomposition {
    pub reps: Vec<u32>,
    pub sizes: Vec<usize>,
    /// Double-coset number of every element of `G`.
    pub labels: Vec<u32>,
    pub h: IndexSubgroup,
    pub k: IndexSubgroup,
}

impl DoubleCosetDecomposition {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

/// Indices in `table` of the elements of `h`; fails if `h` is not inside.
pub fn embed_subgroup(table: &GroupTable, h: &PermGroup, cap: u128) -> Result<IndexSubgroup, GroupError> {
    if h.degree() != table.degree() {
        return Err(GroupError::DegreeMismatch(table.degree(), h.degree()));
    }
    let gens = h.gens().iter().map(|g| table.index_of(g).ok_or(GroupError::NotSubgroup)).collect::<Result<Vec<_>, _>>()?;
    let sub = table.closure(&gens);
    if (sub.order() as u128) > cap {
        return Err(GroupError::CapExceeded { order: sub.order() as u128, cap });
    }
    Ok(sub)
}

/// Representatives are the least unclassified elements in canonical order.
pub fn double_cosets(table: &GroupTable, h: &IndexSubgroup, k: &IndexSubgroup) -> DoubleCosetDecomposition {
    let mut labels = vec![u32::MAX; table.len()];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    for g in 0..table.len() as u32 {
        if labels[g as usize] != u32::MAX {
            continue;
        }
        let label = reps.len() as u32;
        let mut size = 0;
        for &x in &h.list {
            let xg = table.mul(x, g);
            for &y in &k.list {
                let z = table.mul(xg, y) as usize;
                if labels[z] == u32::MAX {
                    labels[z] = label;
                    size += 1;
                }
            }
        }
        reps.push(g);
        sizes.push(size);
    }
    debug_assert_eq!(sizes.iter().sum::<usize>(), table.len());
    DoubleCosetDecomposition { reps, sizes, labels, h: h.clone(), k: k.clone() }
}

/// Whether `H ∩ gKg⁻¹ = 1` for all `g`. Coprime orders settle it at once;
/// otherwise it suffices to test one `g` per double coset.
pub fn conjugate_disjointness(table: &GroupTable, h: &IndexSubgroup, k: &IndexSubgroup) -> bool {
    if arith::gcd(h.order() as u128, k.order() as u128) == 1 {
        return true;
    }
    conjugate_intersection_witness(table, h, k).is_none()
}

/// Some `(g, x)` with `1 ≠ x ∈ H ∩ gKg⁻¹`, if one exists.
pub fn conjugate_intersection_witness(table: &GroupTable, h: &IndexSubgroup, k: &IndexSubgroup) -> Option<(u32, u32)> {
    let dc = double_cosets(table, h, k);
    for &g in &dc.reps {
        let gi = table.inv(g);
        for &y in k.list.iter().skip(1) {
            let x = table.mul(table.mul(g, y), gi);
            if h.contains(x) {
                return Some((g, x));
            }
        }
    }
    None
}

/// True iff every `y` in `targets` is `a·x` for exactly one `a` in `a_set`.
pub fn sharply_transitive<T, Y: Eq + Hash>(a_set: &[T], targets: &[Y], x: &Y, act: impl Fn(&T, &Y) -> Y) -> bool {
    let mut hits: HashMap<Y, usize> = HashMap::new();
    for a in a_set {
        *hits.entry(act(a, x)).or_insert(0) += 1;
    }
    targets.iter().all(|y| hits.get(y) == Some(&1))
}

/// [`sharply_transitive`] for permutations acting on points.
pub fn sharply_transitive_on_points(a_set: &[Perm], targets: &[u32], x: u32) -> Result<bool, GroupError> {
    if let Some(a) = a_set.first() {
        if x as usize >= a.degree() {
            return Err(GroupError::NotInDomain(x.to_string()));
        }
    }
    Ok(sharply_transitive(a_set, targets, &x, |a, &p| a.apply(p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgrp::DEFAULT_GROUP_CAP;

    fn s4() -> PermGroup {
        let t = Perm::from_images(vec![1, 0, 2, 3]).unwrap();
        PermGroup::new(4, vec![Perm::cycle(4), t]).unwrap()
    }

    #[test]
    fn double_cosets_of_s4() {
        let g = s4();
        let t = g.table(DEFAULT_GROUP_CAP).unwrap();
        let whole = embed_subgroup(&t, &g, 100).unwrap();
        let dc = double_cosets(&t, &whole, &whole);
        assert_eq!(dc.len(), 1);
        // S3 (fixing 3) and a 4-cycle: |S3||C4| = 24 but they meet, so more than one coset
        let s3 = g.stabilizer(3).unwrap();
        let c4 = PermGroup::new(4, vec![Perm::cycle(4)]).unwrap();
        let hs = embed_subgroup(&t, &s3, 100).unwrap();
        let ks = embed_subgroup(&t, &c4, 100).unwrap();
        let dc = double_cosets(&t, &hs, &ks);
        assert_eq!(dc.sizes.iter().sum::<usize>(), 24);
        // C4 is regular on 4 points so S3·C4 = S4
        assert_eq!(dc.len(), 1);
        assert!(conjugate_disjointness(&t, &hs, &ks) == (dc.sizes[0] == 24));
        assert!(!conjugate_disjointness(&t, &whole, &whole));
    }

    #[test]
    fn coprime_shortcut_agrees_with_search() {
        let g = s4();
        let t = g.table(100).unwrap();
        let a3 = PermGroup::new(4, vec![Perm::from_images(vec![1, 2, 0, 3]).unwrap()]).unwrap();
        let v4 = PermGroup::new(4, vec![Perm::from_images(vec![1, 0, 3, 2]).unwrap(), Perm::from_images(vec![2, 3, 0, 1]).unwrap()]).unwrap();
        let h = embed_subgroup(&t, &a3, 100).unwrap();
        let k = embed_subgroup(&t, &v4, 100).unwrap();
        assert!(conjugate_disjointness(&t, &h, &k));
        assert!(conjugate_intersection_witness(&t, &h, &k).is_none());
        let dc = double_cosets(&t, &h, &k);
        assert!(dc.sizes.iter().all(|&s| s == 12));
        assert_eq!(dc.len(), 2);
    }

    #[test]
    fn sharp_transitivity_on_points() {
        let c = Perm::cycle(5);
        let a: Vec<Perm> = (0..5).map(|i| c.pow(i)).collect();
        let ys: Vec<u32> = (0..5).collect();
        assert!(sharply_transitive_on_points(&a, &ys, 0).unwrap());
        let mut doubled = a.clone();
        doubled.push(Perm::identity(5));
        assert!(!sharply_transitive_on_points(&doubled, &ys, 0).unwrap());
        assert!(sharply_transitive_on_points(&[Perm::identity(5)], &[2], 2).unwrap());
        assert!(sharply_transitive_on_points(&a, &ys, 9).is_err());
    }
}
