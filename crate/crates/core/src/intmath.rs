//! Small integer helpers shared by the field and group code.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Prime factorization by trial division, as (prime, exponent) pairs in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// All positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    ds.sort_unstable();
    ds
}

/// The units of Z/nZ, in increasing order.
pub fn units(n: u64) -> Vec<u64> {
    if n == 1 {
        return vec![0];
    }
    (1..n).filter(|&k| gcd(k, n) == 1).collect()
}

/// Representatives of the units of Z/nZ modulo ±1 (the smaller of k and n-k).
pub fn units_mod_sign(n: u64) -> Vec<u64> {
    units(n).into_iter().filter(|&k| n <= 2 || k <= n - k).collect()
}

pub fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Legendre symbol (a/p) for an odd prime p, as -1, 0 or 1.
pub fn legendre(a: i64, p: u64) -> i32 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    if mod_pow(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Writes a nonzero integer as sign * s * t^2 with s squarefree and positive.
/// Returns (sign, s, t).
pub fn squarefree_decomposition(a: &BigInt) -> (i32, BigInt, BigInt) {
    assert!(!a.is_zero());
    let sign = if a.is_negative() { -1 } else { 1 };
    let mut n = a.abs();
    let mut s = BigInt::one();
    let mut t = BigInt::one();
    let mut d = BigInt::from(2);
    while &d * &d <= n {
        let mut e = 0;
        while (&n % &d).is_zero() {
            n /= &d;
            e += 1;
        }
        for _ in 0..e / 2 {
            t *= &d;
        }
        if e % 2 == 1 {
            s *= &d;
        }
        d += 1;
    }
    s *= n;
    (sign, s, t)
}

/// Lowest common multiple of all m with totient(m) <= bound.
pub fn lcm_of_orders_with_totient_at_most(bound: u64) -> BigInt {
    // totient(m) >= sqrt(m/2), so m <= 2 bound^2 covers every candidate.
    let limit = 2 * bound * bound + 2;
    let mut l = BigInt::one();
    for m in 1..=limit {
        if totient(m) <= bound {
            l = l.lcm(&BigInt::from(m));
        }
    }
    l
}
