//! Deterministic Schreier–Sims.

use std::collections::HashSet;

use super::perm::Perm;

#[derive(Clone, Debug)]
struct Level {
    point: u32,
    gens: Vec<Perm>,
    orbit: Vec<u32>,
    // index into `reps` for each orbit point
    slot: Vec<Option<u32>>,
    reps: Vec<Perm>,
    reps_inv: Vec<Perm>,
}

impl Level {
    fn new(point: u32, degree: usize) -> Level {
        let mut slot = vec![None; degree];
        slot[point as usize] = Some(0);
        Level {
            point,
            gens: Vec::new(),
            orbit: vec![point],
            slot,
            reps: vec![Perm::identity(degree)],
            reps_inv: vec![Perm::identity(degree)],
        }
    }

    /// Extend the orbit, keeping existing transversal elements.
    fn extend_orbit(&mut self) {
        let mut head = 0;
        while head < self.orbit.len() {
            let b = self.orbit[head];
            let u = self.reps[self.slot[b as usize].unwrap() as usize].clone();
            for s in &self.gens {
                let c = s.apply(b);
                if self.slot[c as usize].is_none() {
                    let v = s.mul(&u);
                    self.slot[c as usize] = Some(self.reps.len() as u32);
                    self.reps_inv.push(v.inv());
                    self.reps.push(v);
                    self.orbit.push(c);
                }
            }
            head += 1;
        }
    }

    fn rep(&self, b: u32) -> Option<&Perm> {
        self.slot[b as usize].map(|k| &self.reps[k as usize])
    }

    fn rep_inv(&self, b: u32) -> Option<&Perm> {
        self.slot[b as usize].map(|k| &self.reps_inv[k as usize])
    }
}

/// A base and strong generating set with explicit transversals.
#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    pub fn new(degree: usize, gens: &[Perm]) -> StabChain {
        StabChain::with_base(degree, gens, &[])
    }

    /// Chain whose base starts with `prefix`.
    pub fn with_base(degree: usize, gens: &[Perm], prefix: &[u32]) -> StabChain {
        let gens: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut chain = StabChain { degree, levels: Vec::new() };
        for &p in prefix {
            chain.levels.push(Level::new(p, degree));
        }
        for g in &gens {
            if chain.levels.iter().all(|l| g.apply(l.point) == l.point) {
                let p = g.first_moved().unwrap();
                chain.levels.push(Level::new(p, degree));
            }
        }
        for g in &gens {
            for l in 0..chain.levels.len() {
                chain.levels[l].gens.push(g.clone());
                if g.apply(chain.levels[l].point) != chain.levels[l].point {
                    break;
                }
            }
        }
        for level in &mut chain.levels {
            level.extend_orbit();
        }
        chain.complete();
        chain
    }

    fn complete(&mut self) {
        let mut checked: Vec<HashSet<(u32, usize)>> = vec![HashSet::new(); self.levels.len()];
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let li = i as usize;
            match self.bad_schreier(li, &mut checked[li]) {
                Some((h, j)) => {
                    for l in li + 1..=j {
                        if l == self.levels.len() {
                            let p = h.first_moved().expect("residue is not the identity");
                            self.levels.push(Level::new(p, self.degree));
                            checked.push(HashSet::new());
                        }
                        self.levels[l].gens.push(h.clone());
                        self.levels[l].extend_orbit();
                    }
                    i = j as isize;
                }
                None => i -= 1,
            }
        }
    }

    fn bad_schreier(&self, i: usize, checked: &mut HashSet<(u32, usize)>) -> Option<(Perm, usize)> {
        let level = &self.levels[i];
        for &b in &level.orbit {
            for (k, s) in level.gens.iter().enumerate() {
                if !checked.insert((b, k)) {
                    continue;
                }
                let u = level.rep(b).unwrap();
                let sb = s.apply(b);
                let g = level.rep_inv(sb).unwrap().mul(&s.mul(u));
                if g.is_identity() {
                    continue;
                }
                let (h, j) = self.sift_from(g, i + 1);
                if !h.is_identity() {
                    checked.remove(&(b, k));
                    return Some((h, j));
                }
            }
        }
        None
    }

    /// Sift `g` through levels `start..`; returns the residue and the level
    /// where it stopped (`len` when it passed every level).
    fn sift_from(&self, mut g: Perm, start: usize) -> (Perm, usize) {
        for l in start..self.levels.len() {
            let level = &self.levels[l];
            let b = g.apply(level.point);
            match level.rep_inv(b) {
                Some(ui) => g = ui.mul(&g),
                None => return (g, l),
            }
        }
        let len = self.levels.len();
        (g, len)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && self.sift_from(g.clone(), 0).0.is_identity()
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.point).collect()
    }

    /// Basic orbit lengths `|G^(i) : G^(i+1)|`.
    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn basic_orbit(&self, level: usize) -> &[u32] {
        &self.levels[level].orbit
    }

    /// Strong generators of the pointwise stabilizer of the first `level` base points.
    pub fn stabilizer_gens(&self, level: usize) -> Vec<Perm> {
        self.levels.get(level).map(|l| l.gens.clone()).unwrap_or_default()
    }

    /// An element `u` of level `level` with `u(base point) = b`.
    pub fn transversal(&self, level: usize, b: u32) -> Option<&Perm> {
        self.levels.get(level)?.rep(b)
    }

    /// Mixed-radix index of `g`, computed from base images only.
    /// Returns `None` when `g` is not in the group.
    pub fn rank_from_base_images(&self, images: &mut [u32]) -> Option<u128> {
        let mut rank = 0u128;
        for l in 0..self.levels.len() {
            let level = &self.levels[l];
            let k = level.slot[images[l] as usize]?;
            rank = rank * level.orbit.len() as u128 + level.orbit_position(k);
            let ui = &level.reps_inv[k as usize];
            for x in images[l..].iter_mut() {
                *x = ui.apply(*x);
            }
        }
        Some(rank)
    }
}

impl Level {
    fn orbit_position(&self, slot: u32) -> u128 {
        // reps are created in orbit order, so the slot is the orbit position
        slot as u128
    }
}
