//! Logarithmic signatures: verification, minimality, serialization.

use std::collections::HashSet;
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use thiserror::Error;

use crate::arith;
use crate::matgrp::{GroupHandle, Perm, PermError, PermGroup, StabChain};

/// Largest group order verified by default (one bit per element).
pub const DEFAULT_VERIFY_CAP: u128 = 1 << 33;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LsError {
    #[error("structural: {0}")]
    Structural(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("descriptor mismatch: file has `{got}`, group is `{expected}`")]
    DescriptorMismatch { expected: String, got: String },
    #[error("block {block}, element {index} is not in the group")]
    NotInGroup { block: usize, index: usize },
    #[error("group order {order} exceeds the verification cap {cap}")]
    CapExceeded { order: u128, cap: u128 },
}

/// `[A₁, …, A_s]` for a group; elements are permutations of the group's domain.
#[derive(Clone)]
pub struct LogSignature {
    group: GroupHandle,
    blocks: Vec<Vec<Perm>>,
}

impl fmt::Debug for LogSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogSignature({}, type={:?})", self.group.descriptor(), self.type_vector())
    }
}

impl PartialEq for LogSignature {
    fn eq(&self, other: &Self) -> bool {
        self.group.descriptor() == other.group.descriptor() && self.blocks == other.blocks
    }
}

/// Outcome of [`ls_verify`]. A collision names two distinct index tuples
/// (positions inside the blocks) with the same product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verification {
    Valid,
    Collision { first: Vec<usize>, second: Vec<usize> },
}

impl Verification {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verification::Valid)
    }
}

impl LogSignature {
    /// Checks `Π rᵢ = |G|`, distinct elements within blocks, and membership.
    pub fn new(group: GroupHandle, blocks: Vec<Vec<Perm>>) -> Result<LogSignature, LsError> {
        if blocks.is_empty() {
            return Err(LsError::Structural("no blocks".into()));
        }
        if let Some(i) = blocks.iter().position(|b| b.is_empty()) {
            return Err(LsError::Structural(format!("block {i} is empty")));
        }
        let product = blocks.iter().try_fold(1u128, |acc, b| acc.checked_mul(b.len() as u128));
        if product != Some(group.order()) {
            return Err(LsError::Structural(format!(
                "block sizes multiply to {}, group order is {}",
                product.map(|p| p.to_string()).unwrap_or_else(|| "overflow".into()),
                group.order()
            )));
        }
        for (bi, block) in blocks.iter().enumerate() {
            let mut seen = HashSet::new();
            for (ei, x) in block.iter().enumerate() {
                if !seen.insert(x) {
                    return Err(LsError::Structural(format!("block {bi} repeats element {ei}")));
                }
                if !group.group.contains(x) {
                    return Err(LsError::NotInGroup { block: bi, index: ei });
                }
            }
        }
        Ok(LogSignature { group, blocks })
    }

    pub fn group(&self) -> &GroupHandle {
        &self.group
    }

    pub fn blocks(&self) -> &[Vec<Perm>] {
        &self.blocks
    }

    pub fn type_vector(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }

    /// `l(α) = Σ |Aᵢ|`.
    pub fn length(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    /// `s ≥ 2` and every block has at least two elements.
    pub fn is_nontrivial(&self) -> bool {
        self.blocks.len() >= 2 && self.blocks.iter().all(|b| b.len() >= 2)
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.group.descriptor());
        out.push('\n');
        let ty: Vec<String> = self.type_vector().iter().map(|r| r.to_string()).collect();
        out.push_str(&format!("blocks={} type={}\n", self.blocks.len(), ty.join(",")));
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                out.push_str("%\n");
            }
            for x in block {
                out.push_str(&x.to_string());
                out.push('\n');
            }
        }
        out
    }
}

/// `label`, `domain` and `order` of a descriptor line `<label> domain=<d> order=<o>`.
pub fn parse_descriptor(line: &str) -> Option<(String, usize, u128)> {
    let mut parts: Vec<&str> = line.split_whitespace().collect();
    let order = parts.pop()?.strip_prefix("order=")?.parse().ok()?;
    let domain = parts.pop()?.strip_prefix("domain=")?.parse().ok()?;
    Some((parts.join(" "), domain, order))
}

/// Parse the LS text format against a group with the same descriptor.
pub fn ls_parse(text: &str, group: &GroupHandle) -> Result<LogSignature, LsError> {
    let (header, blocks) = parse_blocks(text)?;
    if header != group.descriptor() {
        return Err(LsError::DescriptorMismatch { expected: group.descriptor(), got: header });
    }
    LogSignature::new(group.clone(), blocks)
}

/// Parse an LS file without a prebuilt group: the group is generated by the
/// block elements and must have the order named in the descriptor.
pub fn ls_load(text: &str) -> Result<LogSignature, LsError> {
    let (header, blocks) = parse_blocks(text)?;
    let (label, degree, order) = parse_descriptor(&header).expect("checked by parse_blocks");
    let gens: Vec<Perm> = blocks.iter().flatten().filter(|p| !p.is_identity()).cloned().collect();
    let group = PermGroup::new(degree, gens).map_err(|e| LsError::Structural(e.to_string()))?;
    let handle = GroupHandle::from_perm_group(label, group.reduced());
    if handle.order() != order {
        return Err(LsError::DescriptorMismatch { expected: handle.descriptor(), got: header });
    }
    LogSignature::new(handle, blocks)
}

/// Descriptor line and raw blocks of an LS file, with the structural checks
/// that do not need the group.
pub fn parse_blocks(text: &str) -> Result<(String, Vec<Vec<Perm>>), LsError> {
    let lines: Vec<&str> = text.lines().collect();
    let header = *lines.first().ok_or(LsError::Parse { line: 1, msg: "missing group descriptor".into() })?;
    let (_, degree, _) =
        parse_descriptor(header).ok_or(LsError::Parse { line: 1, msg: "malformed group descriptor".into() })?;
    let meta = lines.get(1).ok_or(LsError::Parse { line: 2, msg: "missing blocks line".into() })?;
    let bad_meta = || LsError::Parse { line: 2, msg: "expected `blocks=<s> type=<r1,...>`".into() };
    let mut it = meta.split_whitespace();
    let s: usize = it.next().and_then(|t| t.strip_prefix("blocks=")).and_then(|t| t.parse().ok()).ok_or_else(bad_meta)?;
    let ty: Vec<usize> = it
        .next()
        .and_then(|t| t.strip_prefix("type="))
        .ok_or_else(bad_meta)?
        .split(',')
        .map(|t| t.parse().map_err(|_| bad_meta()))
        .collect::<Result<_, _>>()?;
    if ty.len() != s || it.next().is_some() {
        return Err(bad_meta());
    }
    let mut blocks: Vec<Vec<Perm>> = vec![Vec::new()];
    for (k, line) in lines.iter().enumerate().skip(2) {
        let lineno = k + 1;
        if *line == "%" {
            if blocks.last().unwrap().is_empty() {
                return Err(LsError::Structural(format!("empty block before line {lineno}")));
            }
            blocks.push(Vec::new());
            continue;
        }
        let p = Perm::parse(line).map_err(|e| LsError::Parse { line: lineno, msg: e.to_string() })?;
        if p.degree() != degree {
            return Err(LsError::Parse {
                line: lineno,
                msg: PermError::NotBijection(degree).to_string(),
            });
        }
        blocks.last_mut().unwrap().push(p);
    }
    if blocks.last().unwrap().is_empty() {
        return Err(LsError::Structural(format!("empty block at end of input (line {})", lines.len() + 1)));
    }
    if blocks.len() != s {
        return Err(LsError::Parse { line: lines.len() + 1, msg: format!("expected {s} blocks, found {}", blocks.len()) });
    }
    for (i, (b, &r)) in blocks.iter().zip(&ty).enumerate() {
        if b.len() != r {
            return Err(LsError::Parse { line: lines.len() + 1, msg: format!("block {i} has {} elements, type says {r}", b.len()) });
        }
    }
    Ok((header.to_string(), blocks))
}

fn verify_cap_check(order: u128, cap: u128) -> Result<(), LsError> {
    if order > cap || order > usize::MAX as u128 {
        return Err(LsError::CapExceeded { order, cap });
    }
    Ok(())
}

/// Product images of the base points for one tuple, prefix already composed.
#[inline]
fn rank_of(chain: &StabChain, base: &[u32], prefix: &Perm, last: &Perm, scratch: &mut [u32]) -> u128 {
    for (x, &b) in scratch.iter_mut().zip(base) {
        *x = prefix.apply(last.apply(b));
    }
    chain.rank_from_base_images(scratch).expect("product of group elements lies in the group")
}

/// Calls `visit(tuple, rank)` for every tuple whose first coordinate is `first`.
fn walk_tuples(
    chain: &StabChain,
    base: &[u32],
    blocks: &[Vec<Perm>],
    first: usize,
    mut visit: impl FnMut(&[usize], u128) -> bool,
) {
    let s = blocks.len();
    let mut tuple = vec![0usize; s];
    tuple[0] = first;
    let mut scratch = vec![0u32; base.len()];
    // prefixes[k] = A₀[t₀] ∘ … ∘ A_k[t_k]
    let mut prefixes: Vec<Perm> = Vec::with_capacity(s);
    prefixes.push(blocks[0][first].clone());
    for k in 1..s - 1 {
        let p = prefixes[k - 1].mul(&blocks[k][0]);
        prefixes.push(p);
    }
    if s == 1 {
        let id = Perm::identity(chain.degree());
        let r = rank_of(chain, base, &id, &blocks[0][first], &mut scratch);
        visit(&tuple, r);
        return;
    }
    loop {
        let prefix = &prefixes[s - 2];
        for (j, last) in blocks[s - 1].iter().enumerate() {
            tuple[s - 1] = j;
            let r = rank_of(chain, base, prefix, last, &mut scratch);
            if !visit(&tuple, r) {
                return;
            }
        }
        // advance the middle coordinates
        let mut k = s - 2;
        loop {
            if k == 0 {
                return;
            }
            tuple[k] += 1;
            if tuple[k] < blocks[k].len() {
                break;
            }
            tuple[k] = 0;
            k -= 1;
        }
        for m in k..s - 1 {
            prefixes[m] = prefixes[m - 1].mul(&blocks[m][tuple[m]]);
        }
    }
}

/// Exhaustive check that `(a₁, …, a_s) ↦ a₁⋯a_s` is injective, using a bitset
/// indexed by stabilizer-chain ranks. Parallel over the first block; the
/// reported witness is the lexicographically first collision.
pub fn ls_verify(alpha: &LogSignature) -> Result<Verification, LsError> {
    ls_verify_capped(alpha, DEFAULT_VERIFY_CAP)
}

pub fn ls_verify_capped(alpha: &LogSignature, cap: u128) -> Result<Verification, LsError> {
    let order = alpha.group.order();
    verify_cap_check(order, cap)?;
    let chain = alpha.group.group.chain();
    let base = chain.base();
    let words = (order as usize).div_ceil(64);
    let bits: Vec<AtomicU64> = (0..words).map(|_| AtomicU64::new(0)).collect();
    let clash = AtomicBool::new(false);
    (0..alpha.blocks[0].len()).into_par_iter().for_each(|first| {
        walk_tuples(chain, &base, &alpha.blocks, first, |_, r| {
            let (w, b) = ((r / 64) as usize, r % 64);
            let prev = bits[w].fetch_or(1 << b, Ordering::Relaxed);
            if prev & (1 << b) != 0 {
                clash.store(true, Ordering::Relaxed);
                return false;
            }
            !clash.load(Ordering::Relaxed)
        });
    });
    if !clash.load(Ordering::Relaxed) {
        return Ok(Verification::Valid);
    }
    Ok(first_collision(alpha, chain, &base))
}

fn first_collision(alpha: &LogSignature, chain: &StabChain, base: &[u32]) -> Verification {
    let mut owner: std::collections::HashMap<u128, Vec<usize>> = std::collections::HashMap::new();
    let mut found = None;
    for first in 0..alpha.blocks[0].len() {
        walk_tuples(chain, base, &alpha.blocks, first, |t, r| {
            if let Some(prev) = owner.get(&r) {
                found = Some((prev.clone(), t.to_vec()));
                return false;
            }
            owner.insert(r, t.to_vec());
            true
        });
        if found.is_some() {
            break;
        }
    }
    let (first, second) = found.expect("a collision was seen in the parallel pass");
    Verification::Collision { first, second }
}

/// Factorization of `|G|`, the bound `Σ βⱼpⱼ`, and the achieved length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalityCertificate {
    pub factorization: Vec<(u128, u32)>,
    pub bound: u128,
    pub achieved_length: u128,
    pub minimal: bool,
}

impl fmt::Display for MinimalityCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fac: Vec<String> = self
            .factorization
            .iter()
            .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(
            f,
            "order={} bound={} length={} minimal={}",
            fac.join("*"),
            self.bound,
            self.achieved_length,
            if self.minimal { "yes" } else { "no" }
        )
    }
}

pub fn minimality_for(order: u128, length: u128) -> MinimalityCertificate {
    let factorization = arith::factorize(order);
    let bound = arith::mls_bound(order);
    MinimalityCertificate { factorization, bound, achieved_length: length, minimal: length == bound }
}

pub fn ls_minimality(alpha: &LogSignature) -> MinimalityCertificate {
    minimality_for(alpha.group.order(), alpha.length() as u128)
}

/// Whether the block is `{x⁰, …, x^{r-1}}` for some `x` of order at least `r`.
/// Candidates: block members, products of two members, then the whole group
/// when its table is cached.
pub fn ls_is_cyclic_block(block: &[Perm], group: &PermGroup) -> bool {
    let r = block.len();
    if r == 0 {
        return false;
    }
    let set: HashSet<&Perm> = block.iter().collect();
    if set.len() != r {
        return false;
    }
    let check = |x: &Perm| -> bool {
        if x.order() < r as u128 {
            return false;
        }
        let mut cur = Perm::identity(x.degree());
        for _ in 0..r {
            if !set.contains(&cur) {
                return false;
            }
            cur = cur.mul(x);
        }
        true
    };
    if block.iter().any(check) {
        return true;
    }
    for a in block {
        for b in block {
            if check(&a.mul(b)) {
                return true;
            }
        }
    }
    match group.cached_table() {
        Some(t) => t.elements().iter().any(check),
        None => false,
    }
}

/// `A₁ = H` as sets and the remaining blocks meet the bound for `[G : H]`.
pub fn ls_over_subgroup_check(alpha: &LogSignature, h: &PermGroup) -> bool {
    let a1 = &alpha.blocks[0];
    let ho = h.order();
    if a1.len() as u128 != ho || !a1.iter().all(|x| h.contains(x)) {
        return false;
    }
    let go = alpha.group.order();
    if go % ho != 0 {
        return false;
    }
    let rest: usize = alpha.blocks[1..].iter().map(|b| b.len()).sum();
    rest as u128 == arith::mls_bound(go / ho)
}

/// Whether all products `a₁⋯a_s` are distinct (a factorization of the set they form).
pub fn products_distinct(blocks: &[Vec<Perm>]) -> bool {
    let Some(degree) = blocks.first().and_then(|b| b.first()).map(|p| p.degree()) else {
        return true;
    };
    let mut acc: Vec<Perm> = vec![Perm::identity(degree)];
    for b in blocks {
        acc = acc.iter().flat_map(|x| b.iter().map(move |y| x.mul(y))).collect();
    }
    let n = acc.len();
    acc.into_iter().collect::<HashSet<_>>().len() == n
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z6() -> (GroupHandle, Perm) {
        let g = PermGroup::cyclic(6);
        (GroupHandle::from_perm_group("Z 6", g), Perm::cycle(6))
    }

    #[test]
    fn cyclic_six_examples() {
        let (g, a) = z6();
        let e = Perm::identity(6);
        let good = LogSignature::new(g.clone(), vec![vec![e.clone(), a.pow(3)], vec![e.clone(), a.clone(), a.pow(2)]]).unwrap();
        assert_eq!(ls_verify(&good).unwrap(), Verification::Valid);
        assert_eq!(good.length(), 5);
        let cert = ls_minimality(&good);
        assert!(cert.minimal);
        assert_eq!(cert.bound, 5);
        // {e, a} × {e, a, a²}: a·a = e·a²
        let bad = LogSignature::new(g.clone(), vec![vec![e.clone(), a.clone()], vec![e.clone(), a.clone(), a.pow(2)]]).unwrap();
        assert_eq!(
            ls_verify(&bad).unwrap(),
            Verification::Collision { first: vec![0, 1], second: vec![1, 0] }
        );
        let whole: Vec<Perm> = (0..6).map(|i| a.pow(i)).collect();
        let trivial = LogSignature::new(g.clone(), vec![whole]).unwrap();
        assert!(ls_verify(&trivial).unwrap().is_valid());
        assert!(!trivial.is_nontrivial());
    }

    #[test]
    fn load_without_group() {
        let (g, a) = z6();
        let e = Perm::identity(6);
        let ls = LogSignature::new(g, vec![vec![e.clone(), a.pow(3)], vec![e.clone(), a.pow(2), a.pow(4)]]).unwrap();
        let text = ls.serialize();
        assert_eq!(ls_load(&text).unwrap().serialize(), text);
        // generated group is Z3, descriptor says 6
        let wrong = text.replace(&format!("{}\n", a.pow(3)), &format!("{}\n", a.pow(4)));
        assert!(ls_load(&wrong).is_err());
    }

    #[test]
    fn structural_errors() {
        let (g, a) = z6();
        let e = Perm::identity(6);
        assert!(matches!(LogSignature::new(g.clone(), vec![vec![e.clone(), a.clone()]]), Err(LsError::Structural(_))));
        assert!(matches!(
            LogSignature::new(g.clone(), vec![vec![e.clone(), e.clone()], vec![e.clone(), a.clone(), a.pow(2)]]),
            Err(LsError::Structural(_))
        ));
        let outside = Perm::from_images(vec![1, 0, 2, 3, 4, 5]).unwrap();
        assert_eq!(
            LogSignature::new(g, vec![vec![e, outside], vec![a.pow(0), a.clone(), a.pow(2)]]).err(),
            Some(LsError::NotInGroup { block: 0, index: 1 })
        );
    }

    #[test]
    fn cyclic_blocks() {
        let (g, a) = z6();
        let _ = g.group.table(100).unwrap();
        let e = Perm::identity(6);
        assert!(ls_is_cyclic_block(std::slice::from_ref(&e), &g.group));
        assert!(ls_is_cyclic_block(&[e.clone(), a.clone(), a.pow(2)], &g.group));
        // {e, a³} is ⟨a³⟩
        assert!(ls_is_cyclic_block(&[e.clone(), a.pow(3)], &g.group));
        // {a, a³}: no element has x⁰ = a
        assert!(!ls_is_cyclic_block(&[a.clone(), a.pow(3)], &g.group));
    }

    #[test]
    fn over_subgroup() {
        let (g, a) = z6();
        let e = Perm::identity(6);
        let h = PermGroup::new(6, vec![a.pow(3)]).unwrap();
        let alpha = LogSignature::new(g.clone(), vec![vec![e.clone(), a.pow(3)], vec![e.clone(), a.pow(2), a.pow(4)]]).unwrap();
        assert!(ls_verify(&alpha).unwrap().is_valid());
        assert!(ls_over_subgroup_check(&alpha, &h));
        let trivial = PermGroup::trivial(6);
        let plain = LogSignature::new(g.clone(), vec![vec![e.clone()], vec![e.clone(), a.pow(3)], vec![e.clone(), a.pow(2), a.pow(4)]]).unwrap();
        let without = LogSignature::new(g.clone(), plain.blocks()[1..].to_vec()).unwrap();
        assert!(ls_over_subgroup_check(&plain, &trivial));
        assert!(ls_minimality(&without).minimal);
        let h3 = PermGroup::new(6, vec![a.pow(2)]).unwrap();
        assert!(!ls_over_subgroup_check(&alpha, &h3));
    }

    #[test]
    fn serialization_round_trip_and_errors() {
        let (g, a) = z6();
        let e = Perm::identity(6);
        let alpha = LogSignature::new(g.clone(), vec![vec![e.clone(), a.pow(3)], vec![e, a.clone(), a.pow(2)]]).unwrap();
        let text = alpha.serialize();
        assert!(text.starts_with("Z 6 domain=6 order=6\nblocks=2 type=2,3\n"));
        let back = ls_parse(&text, &g).unwrap();
        assert_eq!(back, alpha);
        assert_eq!(back.serialize(), text);
        let truncated: String = text.lines().take(6).map(|l| format!("{l}\n")).collect();
        assert!(matches!(ls_parse(&truncated, &g), Err(LsError::Parse { .. })));
        let empty = text.replacen("%\n", "%\n%\n", 1);
        assert!(matches!(ls_parse(&empty, &g), Err(LsError::Structural(_))));
        let wrong = text.replacen("Z 6", "Z 7", 1);
        assert!(matches!(ls_parse(&wrong, &g), Err(LsError::DescriptorMismatch { .. })));
        let bad_perm = text.replacen("0 1 2 3 4 5", "0 0 2 3 4 5", 1);
        assert_eq!(ls_parse(&bad_perm, &g).err().map(|e| matches!(e, LsError::Parse { line: 3, .. })), Some(true));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn translation_and_reordering(shift in 0i64..12, swap in proptest::bool::ANY) {
            let g = PermGroup::cyclic(12);
            let h = GroupHandle::from_perm_group("Z 12", g);
            let a = Perm::cycle(12);
            let mut blocks = vec![
                vec![a.pow(0), a.pow(6)],
                vec![a.pow(0), a.pow(3)],
                vec![a.pow(0), a.pow(4), a.pow(8)],
            ];
            if swap { blocks.swap(0, 2); }
            let alpha = LogSignature::new(h.clone(), blocks.clone()).unwrap();
            prop_assert!(ls_verify(&alpha).unwrap().is_valid());
            let g0 = a.pow(shift);
            let moved: Vec<Perm> = blocks[0].iter().map(|x| g0.mul(x)).collect();
            blocks[0] = moved;
            let beta = LogSignature::new(h, blocks).unwrap();
            prop_assert!(ls_verify(&beta).unwrap().is_valid());
            prop_assert_eq!(ls_minimality(&alpha).bound, ls_minimality(&beta).bound);
            prop_assert!(ls_minimality(&beta).minimal);
        }
    }
}
