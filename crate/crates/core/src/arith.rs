//! Exact integer and residue arithmetic.

use std::cell::Cell;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Negative discriminant `D ≡ 0, 1 (mod 4)` of a binary quadratic form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Discriminant(i64);

impl Discriminant {
    pub fn new(d: i64) -> Result<Self> {
        if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
            return Err(Error::InvalidDiscriminant(d));
        }
        Ok(Discriminant(d))
    }

    pub fn value(self) -> i64 {
        self.0
    }
}

impl TryFrom<i64> for Discriminant {
    type Error = Error;

    fn try_from(d: i64) -> Result<Self> {
        Discriminant::new(d)
    }
}

/// A level `(N, p)`: `N > 1`, `p` an odd prime, `gcd(N, p) = 1`.
///
/// The cyclotomic flag records whether `N` is a square mod `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Level {
    n: u64,
    p: u64,
    cyclotomic: bool,
}

impl Level {
    pub fn new(n: u64, p: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidLevel { n, p, reason: "N must exceed 1" });
        }
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidLevel { n, p, reason: "p must be an odd prime" });
        }
        if n.gcd(&p) != 1 {
            return Err(Error::InvalidLevel { n, p, reason: "N and p must be coprime" });
        }
        let cyclotomic = kronecker(n as i64, p) == 1;
        Ok(Level { n, p, cyclotomic })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_cyclotomic(&self) -> bool {
        self.cyclotomic
    }

    /// Least positive inverse of `N` mod `p`.
    pub fn n_inverse(&self) -> u64 {
        inv_mod(self.n % self.p, self.p).expect("N is a unit mod p")
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.n, self.p)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization as `(prime, exponent)` pairs in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            let mut e = 0;
            while n.is_multiple_of(q) {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1, "divisors of zero");
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn euler_phi(r: u64) -> u64 {
    assert!(r >= 1);
    factorize(r)
        .into_iter()
        .fold(r, |acc, (q, _)| acc / q * (q - 1))
}

/// Index of `Γ₀(N)/{±1}` in `PSL₂(ℤ)`: `N ∏_{q | N} (1 + 1/q)`.
pub fn psi_index(n: u64) -> u64 {
    assert!(n >= 1);
    factorize(n)
        .into_iter()
        .fold(n, |acc, (q, _)| acc / q * (q + 1))
}

/// Kronecker symbol `(a | m)` for `m ≥ 1`.
pub fn kronecker(a: i64, m: u64) -> i8 {
    assert!(m >= 1, "Kronecker symbol needs a positive modulus");
    let mut t: i8 = 1;
    let mut n = m;
    let twos = n.trailing_zeros();
    if twos > 0 {
        if a.rem_euclid(2) == 0 {
            return 0;
        }
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            t = -t;
        }
        n >>= twos;
    }
    // Jacobi symbol (a | n), n odd.
    let mut a = a.rem_euclid(n as i64) as u64;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` mod `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// Square root of `a` modulo the odd prime `p` (Tonelli–Shanks).
///
/// Returns the smaller of the two roots, or `None` when `a` is a non-residue.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if kronecker(a as i64, p) != 1 {
        return None;
    }
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| kronecker(z as i64, p) == -1)?;
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r.min(p - r))
}

/// Least non-square in `𝔽p*`.
pub fn least_non_square(p: u64) -> u64 {
    (2..p)
        .find(|&v| kronecker(v as i64, p) == -1)
        .expect("odd primes have non-squares")
}

/// Integers `(a, b)` with `a²N − b p² = 1`, `a` minimal in `(0, p²)`.
pub fn lift_sqrt_mod_p2(n: u64, p: u64) -> Result<(BigInt, BigInt)> {
    if n.is_multiple_of(p) || kronecker(n as i64, p) != 1 {
        return Err(Error::NotASquare { n, p });
    }
    let p2 = p * p;
    let nm = n % p2;
    let a = (1..p2)
        .find(|&a| mul_mod(mul_mod(a, a, p2), nm, p2) == 1)
        .ok_or(Error::NotASquare { n, p })?;
    let a_big = BigInt::from(a);
    let b = (&a_big * &a_big * BigInt::from(n) - 1) / BigInt::from(p2);
    Ok((a_big, b))
}

/// Class number of primitive positive definite forms of discriminant `d`.
///
/// Counts reduced forms `(a, b, c)` with `b² − 4ac = D`, `|b| ≤ a ≤ c`,
/// `b ≥ 0` whenever `|b| = a` or `a = c`, and `gcd(a, b, c) = 1`.
pub fn class_number(d: Discriminant) -> u64 {
    let h = reduced_forms(d).into_iter().filter(|f| f.is_primitive()).count() as u64;
    h + CLASS_NUMBER_FAULT.with(Cell::get)
}

thread_local! {
    static CLASS_NUMBER_FAULT: Cell<u64> = const { Cell::new(0) };
}

/// Run `f` with every class number on this thread off by one. Test harness
/// fault injection only.
#[doc(hidden)]
pub fn with_corrupted_class_numbers<R>(f: impl FnOnce() -> R) -> R {
    struct Reset;
    impl Drop for Reset {
        fn drop(&mut self) {
            CLASS_NUMBER_FAULT.with(|c| c.set(0));
        }
    }
    CLASS_NUMBER_FAULT.with(|c| c.set(1));
    let _reset = Reset;
    f()
}

/// A positive definite binary quadratic form `a x² + b xy + c y²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn content(&self) -> i64 {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    /// Order of the proper automorphism group modulo `±1`.
    pub fn automorphism_weight(&self) -> u64 {
        let g = self.content();
        match self.discriminant() / (g * g) {
            -4 => 2,
            -3 => 3,
            _ => 1,
        }
    }
}

/// All reduced positive definite forms of discriminant `d`, primitive or not.
pub fn reduced_forms(d: Discriminant) -> Vec<QuadForm> {
    let d = d.value();
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (b < 0 && a == c) {
                continue;
            }
            out.push(QuadForm { a, b, c });
        }
        a += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisor_lists() {
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(20), vec![1, 2, 4, 5, 10, 20]);
        assert_eq!(divisors(49), vec![1, 7, 49]);
    }

    fn units_brute(r: u64) -> u64 {
        (1..=r).filter(|k| k.gcd(&r) == 1).count() as u64
    }

    #[test]
    fn phi_small_values() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(2), 1);
        assert_eq!(units_brute(20), 8);
        assert_eq!(euler_phi(20), 8);
        for r in 1..=500 {
            assert_eq!(euler_phi(r), units_brute(r), "phi({r})");
        }
    }

    /// Size of `P¹(ℤ/N)`, by enumerating pairs `(c, d)` generating `ℤ/N`
    /// modulo unit scalars.
    fn projective_line_size(n: u64) -> u64 {
        let units = (1..=n).filter(|u| u.gcd(&n) == 1).count() as u64;
        let pairs = (0..n)
            .flat_map(|c| (0..n).map(move |d| (c, d)))
            .filter(|&(c, d)| c.gcd(&d).gcd(&n) == 1)
            .count() as u64;
        pairs / units
    }

    #[test]
    fn psi_matches_projective_line() {
        assert_eq!(projective_line_size(2), 3);
        assert_eq!(projective_line_size(4), 6);
        assert_eq!(projective_line_size(5), 6);
        assert_eq!(psi_index(2), 3);
        assert_eq!(psi_index(4), 6);
        assert_eq!(psi_index(5), 6);
        for n in 1..=200 {
            assert_eq!(psi_index(n), projective_line_size(n), "psi({n})");
        }
    }

    #[test]
    fn psi_is_multiplicative() {
        for a in 1..40u64 {
            for b in 1..40u64 {
                if a.gcd(&b) == 1 {
                    assert_eq!(psi_index(a * b), psi_index(a) * psi_index(b));
                }
            }
        }
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(4, 5), 1);
        assert_eq!(kronecker(2, 3), -1);
        assert_eq!(kronecker(3, 7), -1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(0, 1), 1);
    }

    #[test]
    fn legendre_agrees_with_residue_enumeration() {
        for p in (3..50).filter(|&p| is_prime(p)) {
            let squares: Vec<u64> = (1..p).map(|x| x * x % p).collect();
            for a in 0..p {
                let expect = if a == 0 {
                    0
                } else if squares.contains(&a) {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker(a as i64, p), expect, "({a}|{p})");
            }
        }
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(sqrt_mod(0, 5), Some(0));
        assert_eq!(sqrt_mod(4, 5), Some(2));
        assert_eq!(sqrt_mod(2, 5), None);
    }

    #[test]
    fn sqrt_matches_legendre() {
        for p in (3..50).filter(|&p| is_prime(p)) {
            for a in 0..p {
                let k = kronecker(a as i64, p);
                match sqrt_mod(a, p) {
                    Some(r) => {
                        assert!(k >= 0);
                        assert_eq!(r * r % p, a);
                        assert!(r <= p - r || r == 0);
                    }
                    None => assert_eq!(k, -1),
                }
            }
        }
    }

    #[test]
    fn lifts_to_p_squared() {
        assert_eq!(lift_sqrt_mod_p2(4, 3).unwrap(), (BigInt::from(4), BigInt::from(7)));
        assert_eq!(lift_sqrt_mod_p2(1, 3).unwrap(), (BigInt::from(1), BigInt::from(0)));
        // a = 9 gives 324 − 325 = −1; the least valid a is 12.
        assert_eq!(lift_sqrt_mod_p2(4, 5).unwrap(), (BigInt::from(12), BigInt::from(23)));
        assert!(lift_sqrt_mod_p2(2, 3).is_err());
        for p in [3u64, 5, 7, 11, 13] {
            for n in 2..60u64 {
                if let Ok((a, b)) = lift_sqrt_mod_p2(n, p) {
                    let lhs = &a * &a * BigInt::from(n) - &b * BigInt::from(p * p);
                    assert_eq!(lhs, BigInt::from(1));
                }
            }
        }
    }

    /// Class number by reducing every form with `|b| ≤ bound` to a canonical
    /// representative, independently of the reduced-form enumeration.
    fn class_number_by_reduction(d: i64) -> u64 {
        fn reduce(mut f: (i64, i64, i64)) -> (i64, i64, i64) {
            loop {
                let (a, b, c) = f;
                if a > c {
                    f = (c, -b, a);
                    continue;
                }
                if b > a || b <= -a {
                    // translate x -> x + k y to bring b into (-a, a]
                    let k = Integer::div_floor(&(a - b), &(2 * a));
                    let nb = b + 2 * a * k;
                    let nc = a * k * k + b * k + c;
                    f = (a, nb, nc);
                    continue;
                }
                if a == c && b < 0 {
                    f = (a, -b, c);
                    continue;
                }
                return f;
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        let a_max = 2 * ((-d) as f64).sqrt() as i64 + 2;
        for a in 1..=a_max {
            for b in -2 * a..=2 * a {
                let num = b * b - d;
                if num % (4 * a) != 0 {
                    continue;
                }
                let c = num / (4 * a);
                if a.gcd(&b).gcd(&c) != 1 {
                    continue;
                }
                seen.insert(reduce((a, b, c)));
            }
        }
        seen.len() as u64
    }

    #[test]
    fn class_number_examples() {
        let h = |d| class_number(Discriminant::new(d).unwrap());
        assert_eq!(h(-3), 1);
        assert_eq!(h(-4), 1);
        assert_eq!(h(-20), 2);
        assert_eq!(h(-23), 3);
        assert_eq!(h(-12), 1);
        assert_eq!(h(-16), 1);
        assert!(Discriminant::new(0).is_err());
        assert!(Discriminant::new(-5).is_err());
        assert!(Discriminant::new(-6).is_err());
        assert!(Discriminant::new(5).is_err());
    }

    #[test]
    fn class_number_agrees_with_reduction_oracle() {
        for d in (-500..0).filter(|d: &i64| matches!(d.rem_euclid(4), 0 | 1)) {
            let h = class_number(Discriminant::new(d).unwrap());
            assert_eq!(h, class_number_by_reduction(d), "h({d})");
        }
    }

    #[test]
    fn level_validation() {
        assert!(Level::new(4, 3).unwrap().is_cyclotomic());
        assert!(!Level::new(2, 3).unwrap().is_cyclotomic());
        assert!(Level::new(6, 3).is_err());
        assert!(Level::new(1, 3).is_err());
        assert!(Level::new(4, 2).is_err());
        assert!(Level::new(4, 9).is_err());
        assert_eq!(Level::new(5, 3).unwrap().n_inverse(), 2);
    }
}
