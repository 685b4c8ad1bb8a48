//! Permutations of `{0, …, n-1}` stored as image arrays.

use std::fmt;

/// A permutation given by its images. `a.mul(&b)` is `a ∘ b`: apply `b` first,
/// matching the product of the matrices the permutations come from.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PermError {
    #[error("image list is not a bijection of 0..{0}")]
    NotBijection(usize),
    #[error("cannot parse permutation: {0}")]
    Parse(String),
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Result<Perm, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            let i = i as usize;
            if i >= n || seen[i] {
                return Err(PermError::NotBijection(n));
            }
            seen[i] = true;
        }
        Ok(Perm(images))
    }

    /// The `n`-cycle `i ↦ i + 1 mod n`.
    pub fn cycle(n: usize) -> Perm {
        Perm((0..n as u32).map(|i| (i + 1) % n as u32).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, i: u32) -> u32 {
        self.0[i as usize]
    }

    pub fn mul(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&j| self.0[j as usize]).collect())
    }

    pub fn inv(&self) -> Perm {
        let mut out = vec![0u32; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            out[j as usize] = i as u32;
        }
        Perm(out)
    }

    pub fn pow(&self, e: i64) -> Perm {
        let mut base = if e < 0 { self.inv() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Perm::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn conjugate_by(&self, g: &Perm) -> Perm {
        g.mul(self).mul(&g.inv())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    pub fn first_moved(&self) -> Option<u32> {
        self.0.iter().enumerate().find(|(i, j)| *i as u32 != **j).map(|(i, _)| i as u32)
    }

    /// Order as the lcm of cycle lengths.
    pub fn order(&self) -> u128 {
        let mut seen = vec![false; self.0.len()];
        let mut order = 1u128;
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0u128;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.0[i] as usize;
                len += 1;
            }
            order = order / crate::arith::gcd(order, len) * len;
        }
        order
    }

    pub fn parse(line: &str) -> Result<Perm, PermError> {
        let images = line
            .split_whitespace()
            .map(|t| t.parse::<u32>().map_err(|_| PermError::Parse(t.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Perm::from_images(images)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm[{self}]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_applies_right_factor_first() {
        let a = Perm::from_images(vec![1, 2, 0]).unwrap();
        let b = Perm::from_images(vec![1, 0, 2]).unwrap();
        // (a ∘ b)(0) = a(1) = 2
        assert_eq!(a.mul(&b).apply(0), 2);
        assert!(a.mul(&a.inv()).is_identity());
        assert_eq!(a.order(), 3);
        assert_eq!(a.pow(-1), a.inv());
        assert_eq!(Perm::cycle(6).pow(3).order(), 2);
    }

    #[test]
    fn parse_round_trip_and_rejects_non_bijections() {
        let a = Perm::parse("2 0 1").unwrap();
        assert_eq!(Perm::parse(&a.to_string()).unwrap(), a);
        assert_eq!(Perm::parse("0 0 1"), Err(PermError::NotBijection(3)));
        assert!(matches!(Perm::parse("0 x"), Err(PermError::Parse(_))));
    }
}
