//! Small integer helpers: gcd, primality, trial-division factorization.

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u128;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u128) -> Vec<(u128, u32)> {
    let mut out = Vec::new();
    let mut d = 2u128;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Distinct prime divisors.
pub fn prime_divisors(n: u128) -> Vec<u128> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// `q = p^s` with `p` prime, or `None`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let f = factorize(q as u128);
    match f.as_slice() {
        [(p, s)] => Some((*p as u64, *s)),
        _ => None,
    }
}

/// Lower bound `Σ βⱼpⱼ` on the length of a logarithmic signature of a group of order `n`.
pub fn mls_bound(n: u128) -> u128 {
    factorize(n).iter().map(|&(p, e)| p * e as u128).sum()
}

/// Modular inverse of `a` mod `m`, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Order of `SU_n(q)`: `q^{n(n-1)/2} Π_{i=2}^{n} (q^i - (-1)^i)`.
pub fn su_order(n: u32, q: u64) -> u128 {
    let q = q as u128;
    let mut order = q.pow(n * (n - 1) / 2);
    for i in 2..=n {
        let t = q.pow(i);
        order *= if i % 2 == 0 { t - 1 } else { t + 1 };
    }
    order
}

/// Order of the center of `SU_n(q)`, `gcd(n, q + 1)`.
pub fn unitary_center_order(n: u32, q: u64) -> u64 {
    gcd(n as u128, q as u128 + 1) as u64
}

pub fn psu_order(n: u32, q: u64) -> u128 {
    su_order(n, q) / unitary_center_order(n, q) as u128
}

/// Number of isotropic points of a non-degenerate Hermitian form on `GF(q²)^n`.
pub fn isotropic_point_count(n: u32, q: u64) -> u128 {
    let q = q as i128;
    let sign: i128 = if n % 2 == 0 { 1 } else { -1 };
    let a = q.pow(n) - sign;
    let b = q.pow(n - 1) + sign;
    ((a * b) / (q * q - 1)) as u128
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorizations() {
        assert_eq!(factorize(62400), vec![(2, 6), (3, 1), (5, 2), (13, 1)]);
        assert_eq!(factorize(6048), vec![(2, 5), (3, 3), (7, 1)]);
        assert_eq!(factorize(1), vec![]);
        assert_eq!(mls_bound(62400), 38);
        assert_eq!(mls_bound(6048), 26);
        assert_eq!(mls_bound(6), 5);
    }

    #[test]
    fn unitary_orders() {
        assert_eq!(psu_order(3, 2), 72);
        assert_eq!(psu_order(3, 3), 6048);
        assert_eq!(psu_order(3, 4), 62400);
        assert_eq!(psu_order(3, 5), 126000);
        assert_eq!(psu_order(3, 9), 42573600);
        assert_eq!(psu_order(4, 2), 25920);
        assert_eq!(su_order(3, 2), 216);
    }

    #[test]
    fn isotropic_counts_closed_form() {
        assert_eq!(isotropic_point_count(3, 2), 9);
        assert_eq!(isotropic_point_count(3, 4), 65);
        assert_eq!(isotropic_point_count(4, 2), 45);
        assert_eq!(isotropic_point_count(5, 2), 165);
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(mod_inverse(3, 8), Some(3));
        assert_eq!(mod_inverse(2, 8), None);
    }
}
