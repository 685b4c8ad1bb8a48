//! Log signatures built from group structure: solvable groups, quotients,
//! spreads, double cosets and the Holmes condition. The unitary recipes live
//! in [`psu`].

pub mod psu;

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::arith;
use crate::geometry::{self, GeometryError, PointSet, Spread};
use crate::gf::Elem;
use crate::logsig::{self, LogSignature, LsError, Verification};
use crate::matgrp::cosets::{self, sharply_transitive};
use crate::matgrp::{GroupError, GroupHandle, GroupTable, IndexSubgroup, Perm};
use crate::matrix::Matrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Ls(#[from] LsError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("group of order {0} is not solvable")]
    NotSolvable(u128),
    #[error("hypothesis failed: {}", .0.join("; "))]
    Hypothesis(Vec<String>),
    #[error("products collide: tuples {first:?} and {second:?}")]
    Collision { first: Vec<usize>, second: Vec<usize> },
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerificationMode {
    /// Every product was enumerated.
    Full,
    /// Only the listed hypotheses were checked.
    Component,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

/// Text sidecar for a construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub theorem: String,
    pub checks: Vec<Check>,
    pub orders: Vec<(String, u128)>,
    pub notes: Vec<String>,
    pub reps: Option<usize>,
    pub mode: VerificationMode,
    pub length: Option<usize>,
    pub minimal: Option<bool>,
}

impl Certificate {
    pub fn new(theorem: impl Into<String>) -> Certificate {
        Certificate {
            theorem: theorem.into(),
            checks: Vec::new(),
            orders: Vec::new(),
            notes: Vec::new(),
            reps: None,
            mode: VerificationMode::Component,
            length: None,
            minimal: None,
        }
    }

    /// Record a check and return its outcome.
    pub fn check(&mut self, name: impl Into<String>, passed: bool) -> bool {
        self.checks.push(Check { name: name.into(), passed });
        passed
    }

    pub fn order(&mut self, name: impl Into<String>, value: u128) {
        self.orders.push((name.into(), value));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<String> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect()
    }

    fn hypothesis_error(&self) -> ConstructError {
        ConstructError::Hypothesis(self.failed())
    }

    fn absorb(&mut self, other: Certificate) {
        self.checks.extend(other.checks);
        for o in other.orders {
            if !self.orders.contains(&o) {
                self.orders.push(o);
            }
        }
        self.notes.extend(other.notes);
        self.reps = other.reps.or(self.reps);
        self.mode = other.mode;
        self.length = other.length.or(self.length);
        self.minimal = other.minimal.or(self.minimal);
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "theorem={}", self.theorem)?;
        for c in &self.checks {
            writeln!(f, "check {}: {}", c.name, if c.passed { "PASS" } else { "FAIL" })?;
        }
        for (name, v) in &self.orders {
            writeln!(f, "order {name}={v}")?;
        }
        for n in &self.notes {
            writeln!(f, "note {n}")?;
        }
        if let Some(r) = self.reps {
            writeln!(f, "reps={r}")?;
        }
        let mode = match self.mode {
            VerificationMode::Full => "full",
            VerificationMode::Component => "component",
        };
        write!(f, "verification={mode}")?;
        if let Some(l) = self.length {
            write!(f, "\nlength={l}")?;
        }
        if let Some(m) = self.minimal {
            write!(f, " minimal={}", if m { "yes" } else { "no" })?;
        }
        Ok(())
    }
}

/// A log signature together with its certificate. `ls` is absent when only
/// a component-level report could be produced.
#[derive(Clone, Debug)]
pub struct Construction {
    pub ls: Option<LogSignature>,
    pub certificate: Certificate,
}

fn verify(ls: &LogSignature) -> Result<(), ConstructError> {
    match logsig::ls_verify(ls)? {
        Verification::Valid => Ok(()),
        Verification::Collision { first, second } => Err(ConstructError::Collision { first, second }),
    }
}

fn perms_of(t: &GroupTable, idx: &[u32]) -> Vec<Perm> {
    idx.iter().map(|&i| t.get(i).clone()).collect()
}

fn table_gens(t: &GroupTable, g: &GroupHandle) -> Vec<u32> {
    g.group.gens().iter().map(|x| t.index_of(x).expect("generator lies in its own table")).collect()
}

fn power(t: &GroupTable, x: u32, e: u128) -> u32 {
    let mut acc = t.identity();
    for _ in 0..e {
        acc = t.mul(acc, x);
    }
    acc
}

fn commutator(t: &GroupTable, x: u32, y: u32) -> u32 {
    t.mul(t.mul(x, y), t.mul(t.inv(x), t.inv(y)))
}

fn normal_closure(t: &GroupTable, mut gens: Vec<u32>, by: &[u32]) -> (Vec<u32>, IndexSubgroup) {
    let mut sub = t.closure(&gens);
    loop {
        let mut grew = false;
        for i in 0..gens.len() {
            for &x in by {
                let c = t.mul(t.mul(x, gens[i]), t.inv(x));
                if !sub.contains(c) {
                    gens.push(c);
                    sub = t.closure(&gens);
                    grew = true;
                }
            }
        }
        if !grew {
            return (gens, sub);
        }
    }
}

/// Derived series `G = G⁰ ≥ G¹ ≥ …` down to its last term, as index subgroups.
pub fn derived_series(t: &GroupTable, gens: &[u32]) -> Vec<IndexSubgroup> {
    let mut cur_gens = gens.to_vec();
    let mut series = vec![t.closure(&cur_gens)];
    loop {
        let mut comms = Vec::new();
        let mut seen = HashSet::new();
        for &x in &cur_gens {
            for &y in &cur_gens {
                let c = commutator(t, x, y);
                if c != t.identity() && seen.insert(c) {
                    comms.push(c);
                }
            }
        }
        let (ng, ns) = normal_closure(t, comms, &cur_gens);
        if ns.order() == series.last().unwrap().order() {
            return series;
        }
        let done = ns.order() == 1;
        series.push(ns);
        cur_gens = ng;
        if done {
            return series;
        }
    }
}

/// Cyclic transversals `{1, y, …, y^{p-1}}` of a prime-index chain refining
/// `series`, listed from the top of the chain down.
fn refine_series(t: &GroupTable, series: &[IndexSubgroup]) -> Vec<Vec<u32>> {
    let mut l_gens: Vec<u32> = Vec::new();
    let mut l = t.closure(&[]);
    let mut blocks = Vec::new();
    for s in series.iter().rev().skip(1) {
        while l.order() < s.order() {
            let x = (0..t.len() as u32).find(|&x| s.contains(x) && !l.contains(x)).unwrap();
            let mut e = 1u128;
            let mut cur = x;
            while !l.contains(cur) {
                cur = t.mul(cur, x);
                e += 1;
            }
            let p = arith::prime_divisors(e)[0];
            let y = power(t, x, e / p);
            let mut block = vec![t.identity()];
            for _ in 1..p {
                block.push(t.mul(*block.last().unwrap(), y));
            }
            l_gens.push(y);
            l = t.closure(&l_gens);
            blocks.push(block);
        }
    }
    blocks.reverse();
    blocks
}

/// Blocks of an MLS of a solvable group, without the final verification.
pub fn solvable_blocks(g: &GroupHandle, cap: u128) -> Result<Vec<Vec<Perm>>, ConstructError> {
    let t = g.group.table(cap)?;
    let series = derived_series(&t, &table_gens(&t, g));
    if series.last().unwrap().order() != 1 {
        return Err(ConstructError::NotSolvable(g.order()));
    }
    if t.len() == 1 {
        return Ok(vec![vec![t.get(0).clone()]]);
    }
    Ok(refine_series(&t, &series).iter().map(|b| perms_of(&t, b)).collect())
}

/// MLS of a solvable group from a prime-index refinement of its derived
/// series; every block is a cyclic set of prime size.
pub fn mls_solvable(g: &GroupHandle, cap: u128) -> Result<LogSignature, ConstructError> {
    let ls = LogSignature::new(g.clone(), solvable_blocks(g, cap)?)?;
    verify(&ls)?;
    let cert = logsig::ls_minimality(&ls);
    if !cert.minimal && g.order() > 1 {
        return Err(ConstructError::SearchExhausted(format!("refined series has length {} above {}", cert.achieved_length, cert.bound)));
    }
    Ok(ls)
}

/// Images `η(Aᵢ)` of an LS `[A₁, …, A_k]` of a set `A` of coset
/// representatives; `η(a) ≠ η(b)` for distinct `a, b ∈ A` is checked first.
pub fn ls_quotient(blocks: &[Vec<Perm>], eta: impl Fn(&Perm) -> Result<Perm, ConstructError>) -> Result<Vec<Vec<Perm>>, ConstructError> {
    if blocks.is_empty() || blocks.iter().any(|b| b.is_empty()) {
        return Err(ConstructError::Hypothesis(vec!["blocks are non-empty".into()]));
    }
    if !logsig::products_distinct(blocks) {
        return Err(ConstructError::Hypothesis(vec!["blocks factor A uniquely".into()]));
    }
    let degree = blocks[0][0].degree();
    let mut a_set = vec![Perm::identity(degree)];
    for b in blocks {
        a_set = a_set.iter().flat_map(|x| b.iter().map(move |y| x.mul(y))).collect();
    }
    let images = a_set.iter().map(&eta).collect::<Result<Vec<_>, _>>()?;
    let distinct: HashSet<&Perm> = images.iter().collect();
    if distinct.len() != images.len() {
        return Err(ConstructError::Hypothesis(vec!["distinct elements of A lie in distinct cosets".into()]));
    }
    let out = blocks.iter().map(|b| b.iter().map(&eta).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>()?;
    let mut prods = vec![Perm::identity(out[0][0].degree())];
    for b in &out {
        prods = prods.iter().flat_map(|x| b.iter().map(move |y| x.mul(y))).collect();
    }
    let prod_set: HashSet<Perm> = prods.into_iter().collect();
    if prod_set.len() != images.len() || !images.iter().all(|x| prod_set.contains(x)) {
        return Err(ConstructError::Hypothesis(vec!["η is multiplicative on A".into()]));
    }
    Ok(out)
}

/// The permutation of `points` induced by a permutation of `vectors`.
pub fn induced_on_points(vectors: &PointSet, points: &PointSet, g: &Perm) -> Result<Perm, ConstructError> {
    let images = points
        .points()
        .iter()
        .map(|p| {
            let i = vectors.index_of(&p.coords).ok_or_else(|| GroupError::NotInDomain(format!("{:?}", p.coords)))?;
            let img = &vectors.get(g.apply(i as u32) as usize).coords;
            points.index_of(img).map(|j| j as u32).ok_or_else(|| GroupError::NotInDomain(format!("{img:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Perm::from_images(images).map_err(GroupError::from)?)
}

/// `[A, B, G_w]` for a group acting on a point set `L` (its domain), a
/// spread whose members partition `L`, `W` the first member and `w ∈ P(W)`.
/// Every hypothesis is checked; the failures are named.
pub fn ls_spread(g: &GroupHandle, spread: &Spread, a: &[Matrix], b: &[Matrix], w: &[Elem], cap: u128) -> Result<LogSignature, ConstructError> {
    let domain = g.domain.clone().ok_or_else(|| GroupError::Unsupported("spread action needs a matrix domain".into()))?;
    let mut cert = Certificate::new("spread");
    let report = geometry::spread_validate(spread, Some(&domain));
    cert.check("spread members meet trivially", report.pairwise_ok);
    cert.check("projectivized spread partitions L", report.partition_ok == Some(true));
    let w_member = spread.members.first().ok_or_else(|| ConstructError::Hypothesis(vec!["spread is non-empty".into()]))?;
    let w_idx = domain.index_of(w);
    cert.check("w ∈ L ∩ P(W)", w_idx.is_some() && w_member.contains(w));
    let a_perms = a.iter().map(|m| g.perm_of(m)).collect::<Result<Vec<_>, _>>();
    let b_perms = b.iter().map(|m| g.perm_of(m)).collect::<Result<Vec<_>, _>>();
    let in_g = |ps: &Result<Vec<Perm>, GroupError>| ps.as_ref().map(|v| v.iter().all(|x| g.group.contains(x))).unwrap_or(false);
    cert.check("A ⊆ G", in_g(&a_perms));
    cert.check("B ⊆ G", in_g(&b_perms));
    cert.check(
        "A sharply transitive on S with respect to W",
        sharply_transitive(a, &spread.members, w_member, |m, s| s.apply(m)),
    );
    let targets: Vec<u32> = w_member.points().iter().filter_map(|p| domain.index_of(p)).map(|i| i as u32).collect();
    let b_sharp = match (&b_perms, w_idx) {
        (Ok(bp), Some(wi)) => sharply_transitive(bp, &targets, &(wi as u32), |x, &pt| x.apply(pt)),
        _ => false,
    };
    cert.check("B sharply transitive on L ∩ P(W) with respect to w", b_sharp);
    let stab = match w_idx {
        Some(wi) => Some(g.group.stabilizer(wi as u32)?),
        None => None,
    };
    let gw = stab.as_ref().map(|s| s.order()).unwrap_or(0);
    cert.check("|A|·|B|·|G_w| = |G|", a.len() as u128 * b.len() as u128 * gw == g.order());
    if !cert.all_passed() {
        return Err(cert.hypothesis_error());
    }
    let stab = stab.unwrap();
    let gw_elems = stab.table(cap)?.elements().to_vec();
    let ls = LogSignature::new(g.clone(), vec![a_perms?, b_perms?, gw_elems])?;
    verify(&ls)?;
    Ok(ls)
}

fn admissible_block(block: &[Perm], g: &GroupHandle) -> bool {
    let r = block.len() as u128;
    r == 1 || r == 4 || arith::is_prime(r) || logsig::ls_is_cyclic_block(block, &g.group)
}

/// `[MLS(H)…, A₁, …, A_m, MLS(K)…]` for `G = ⋃ HgᵢK` with `H ∩ gKg⁻¹ = 1`
/// for all `g`. The representatives `{gᵢ} = A₁⋯A_m` must hit each double
/// coset once; a prime, 4 or 1 rep count defaults to a single block.
pub fn mls_double_coset(
    g: &GroupHandle,
    h: &GroupHandle,
    k: &GroupHandle,
    rep_blocks: Option<Vec<Vec<Perm>>>,
    cap: u128,
) -> Result<Construction, ConstructError> {
    let mut cert = Certificate::new("double_coset");
    cert.order("G", g.order());
    cert.order("H", h.order());
    cert.order("K", k.order());
    let t = g.group.table(cap)?;
    let hs = cosets::embed_subgroup(&t, &h.group, cap);
    let ks = cosets::embed_subgroup(&t, &k.group, cap);
    cert.check("H ≤ G", hs.is_ok());
    cert.check("K ≤ G", ks.is_ok());
    let (Ok(hs), Ok(ks)) = (hs, ks) else {
        return Err(cert.hypothesis_error());
    };
    let coprime = arith::gcd(h.order(), k.order()) == 1;
    if coprime {
        cert.note("gcd(|H|, |K|) = 1");
    }
    if !cert.check("H ∩ gKg⁻¹ = 1 for all g", cosets::conjugate_disjointness(&t, &hs, &ks)) {
        if let Some((x, y)) = cosets::conjugate_intersection_witness(&t, &hs, &ks) {
            cert.note(format!("witness g={} x={}", t.get(x), t.get(y)));
        }
        return Err(cert.hypothesis_error());
    }
    let dc = cosets::double_cosets(&t, &hs, &ks);
    let n = dc.len();
    cert.reps = Some(n);
    assert_eq!(n as u128 * h.order() * k.order(), g.order(), "double cosets of a disjoint pair all have size |H||K|");
    let reps: Vec<Vec<Perm>> = match rep_blocks {
        Some(blocks) => blocks,
        None if n == 1 => Vec::new(),
        None if n == 4 || arith::is_prime(n as u128) => vec![perms_of(&t, &dc.reps)],
        None => {
            cert.check(format!("{n} representatives need a factorization"), false);
            return Err(cert.hypothesis_error());
        }
    };
    cert.check("representative blocks are cyclic, of size 4 or of prime size", reps.iter().all(|b| admissible_block(b, g)));
    let mut labels = Vec::new();
    let mut prods = vec![Perm::identity(g.degree())];
    for b in &reps {
        prods = prods.iter().flat_map(|x| b.iter().map(move |y| x.mul(y))).collect();
    }
    for x in &prods {
        match t.index_of(x) {
            Some(i) => labels.push(dc.labels[i as usize]),
            None => labels.push(u32::MAX),
        }
    }
    let hit: HashSet<u32> = labels.iter().copied().collect();
    cert.check("representatives meet every double coset once", labels.len() == n && hit.len() == n && !hit.contains(&u32::MAX));
    if !cert.all_passed() {
        return Err(cert.hypothesis_error());
    }
    let mut blocks = solvable_blocks(h, cap)?;
    if h.order() == 1 {
        blocks.clear();
    }
    blocks.extend(reps);
    if k.order() > 1 {
        blocks.extend(solvable_blocks(k, cap)?);
    }
    if blocks.is_empty() {
        blocks.push(vec![Perm::identity(g.degree())]);
    }
    let ls = LogSignature::new(g.clone(), blocks)?;
    verify(&ls)?;
    cert.mode = VerificationMode::Full;
    let m = logsig::ls_minimality(&ls);
    cert.length = Some(ls.length());
    cert.minimal = Some(m.minimal);
    Ok(Construction { ls: Some(ls), certificate: cert })
}

/// Left cosets `xH` as labels, and whether `K` permutes them transitively.
fn transitive_on_cosets(t: &GroupTable, hs: &IndexSubgroup, k_gens: &[u32]) -> (usize, bool) {
    let mut label = vec![u32::MAX; t.len()];
    let mut reps = Vec::new();
    for x in 0..t.len() as u32 {
        if label[x as usize] == u32::MAX {
            for &y in &hs.list {
                label[t.mul(x, y) as usize] = reps.len() as u32;
            }
            reps.push(x);
        }
    }
    let mut seen = vec![false; reps.len()];
    seen[label[0] as usize] = true;
    let mut queue = vec![0u32];
    while let Some(c) = queue.pop() {
        for &s in k_gens {
            let d = label[t.mul(s, reps[c as usize]) as usize];
            if !seen[d as usize] {
                seen[d as usize] = true;
                queue.push(d);
            }
        }
    }
    (reps.len(), seen.iter().all(|&b| b))
}

/// Chain `C = L₀ < L₁ < … < K` with prime indices, by depth-first search
/// over generators in canonical order; returns right transversals `Xⱼ`
/// of `L_{j-1}` in `Lⱼ`.
fn prime_chain_over(t: &GroupTable, c: &IndexSubgroup) -> Option<Vec<Vec<u32>>> {
    fn go(t: &GroupTable, gens: &mut Vec<u32>, l: &IndexSubgroup, dead: &mut HashSet<Vec<u32>>, out: &mut Vec<Vec<u32>>) -> bool {
        if l.order() == t.len() {
            return true;
        }
        let mut key = l.list.clone();
        key.sort_unstable();
        if dead.contains(&key) {
            return false;
        }
        let mut tried: HashSet<Vec<u32>> = HashSet::new();
        for x in 0..t.len() as u32 {
            if l.contains(x) {
                continue;
            }
            gens.push(x);
            let m = t.closure(gens);
            let idx = m.order() / l.order();
            let mut mk = m.list.clone();
            mk.sort_unstable();
            if arith::is_prime(idx as u128) && tried.insert(mk) {
                let mut xs = Vec::new();
                let mut covered = vec![false; t.len()];
                for &y in &m.list {
                    if !covered[y as usize] {
                        xs.push(y);
                        for &z in &l.list {
                            covered[t.mul(z, y) as usize] = true;
                        }
                    }
                }
                xs.sort_unstable();
                out.push(xs);
                if go(t, gens, &m, dead, out) {
                    return true;
                }
                out.pop();
            }
            gens.pop();
        }
        dead.insert(key);
        false
    }
    let mut gens: Vec<u32> = Vec::new();
    for &x in &c.list {
        if !t.closure(&gens).contains(x) {
            gens.push(x);
        }
    }
    let mut out = Vec::new();
    go(t, &mut gens, c, &mut HashSet::new(), &mut out).then_some(out)
}

/// `[MLS(H)…, B₂, …, B_t]` where `[K ∩ H, B₂, …, B_t]` is an MLS of `K`
/// over `K ∩ H` and `K` is transitive on the cosets of `H`.
pub fn mls_holmes(g: &GroupHandle, h: &GroupHandle, k: &GroupHandle, cap: u128) -> Result<LogSignature, ConstructError> {
    let mut cert = Certificate::new("holmes");
    let t = g.group.table(cap)?;
    let hs = cosets::embed_subgroup(&t, &h.group, cap);
    let ks = cosets::embed_subgroup(&t, &k.group, cap);
    cert.check("H ≤ G", hs.is_ok());
    cert.check("K ≤ G", ks.is_ok());
    let (Ok(hs), Ok(_)) = (hs, ks) else {
        return Err(cert.hypothesis_error());
    };
    let (_, transitive) = transitive_on_cosets(&t, &hs, &table_gens(&t, k));
    if !cert.check("K transitive on the cosets of H", transitive) {
        return Err(cert.hypothesis_error());
    }
    let kt = k.group.table(cap)?;
    let mut inter_gens = Vec::new();
    let mut inter = kt.closure(&[]);
    for i in 0..kt.len() as u32 {
        if h.group.contains(kt.get(i)) && !inter.contains(i) {
            inter_gens.push(i);
            inter = kt.closure(&inter_gens);
        }
    }
    let chain = prime_chain_over(&kt, &inter);
    let Some(chain) = chain else {
        cert.check("K has an MLS over K ∩ H", false);
        return Err(cert.hypothesis_error());
    };
    let mut over = vec![perms_of(&kt, &inter.list)];
    over.extend(chain.iter().map(|b| perms_of(&kt, b)));
    let over_ls = LogSignature::new(k.clone(), over.clone())?;
    let inter_group = k.subgroup(perms_of(&kt, &inter_gens))?;
    let ok = logsig::ls_verify(&over_ls)?.is_valid() && logsig::ls_over_subgroup_check(&over_ls, &inter_group.group);
    if !cert.check("K has an MLS over K ∩ H", ok) {
        return Err(cert.hypothesis_error());
    }
    let mut blocks = if h.order() > 1 { solvable_blocks(h, cap)? } else { Vec::new() };
    blocks.extend(over.into_iter().skip(1));
    if blocks.is_empty() {
        blocks.push(vec![Perm::identity(g.degree())]);
    }
    let ls = LogSignature::new(g.clone(), blocks)?;
    verify(&ls)?;
    Ok(ls)
}
