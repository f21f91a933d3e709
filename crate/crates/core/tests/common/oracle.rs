//! Independent numeric signature oracle.
//!
//! Field elements are embedded with a private fixed-point implementation of
//! pi, cos and sin, and the resulting Hermitian matrix is diagonalized by
//! cyclic complex Jacobi rotations. No numeric code from the library is used.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use chl_core::{CycElem, HermForm};

/// Working precision in bits. The reported counts need 128 bits; the extra
/// bits absorb rounding in the rotations.
pub const PREC: u32 = 192;

/// Eigenvalues of modulus below 2^-ZERO_BITS count as zero.
const ZERO_BITS: u32 = 64;

type Fx = BigInt;

fn one() -> Fx {
    BigInt::one() << PREC
}

fn fmul(a: &Fx, b: &Fx) -> Fx {
    (a * b) >> PREC
}

fn fdiv(a: &Fx, b: &Fx) -> Fx {
    (a << PREC).div_floor(b)
}

fn fsqrt(a: &Fx) -> Fx {
    assert!(!a.is_negative(), "square root of a negative number");
    (a << PREC).sqrt()
}

fn from_int_ratio(n: &BigInt, d: &BigInt) -> Fx {
    (n << PREC).div_floor(d)
}

/// arctan(1/x) by its alternating series.
fn atan_inv(x: i64) -> Fx {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = one() / &x;
    let mut sum = BigInt::zero();
    let mut k = 0i64;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    sum
}

/// Machin's formula.
fn pi() -> Fx {
    atan_inv(5) * 16 - atan_inv(239) * 4
}

/// cos and sin of a fixed-point angle by Taylor series.
fn cos_sin(theta: &Fx) -> (Fx, Fx) {
    let mut c = BigInt::zero();
    let mut s = BigInt::zero();
    let mut term = one();
    let mut k: i64 = 0;
    while !term.is_zero() {
        match k % 4 {
            0 => c += &term,
            1 => s += &term,
            2 => c -= &term,
            _ => s -= &term,
        }
        k += 1;
        term = fmul(&term, theta) / BigInt::from(k);
    }
    (c, s)
}

#[derive(Clone, Debug)]
struct Cx {
    re: Fx,
    im: Fx,
}

impl Cx {
    fn zero() -> Cx {
        Cx { re: BigInt::zero(), im: BigInt::zero() }
    }
    fn add(&self, o: &Cx) -> Cx {
        Cx { re: &self.re + &o.re, im: &self.im + &o.im }
    }
    fn sub(&self, o: &Cx) -> Cx {
        Cx { re: &self.re - &o.re, im: &self.im - &o.im }
    }
    fn mul(&self, o: &Cx) -> Cx {
        Cx {
            re: fmul(&self.re, &o.re) - fmul(&self.im, &o.im),
            im: fmul(&self.re, &o.im) + fmul(&self.im, &o.re),
        }
    }
    fn scale(&self, r: &Fx) -> Cx {
        Cx { re: fmul(&self.re, r), im: fmul(&self.im, r) }
    }
    fn conj(&self) -> Cx {
        Cx { re: self.re.clone(), im: -&self.im }
    }
    fn abs_sq(&self) -> Fx {
        fmul(&self.re, &self.re) + fmul(&self.im, &self.im)
    }
}

/// The numeric value of a field element under zeta_n -> exp(2 pi i k / n).
fn embed(a: &CycElem) -> Cx {
    let field = a.field();
    let n = field.n() as i64;
    let k = field.embedding_k() as i64;
    let two_pi = pi() * 2;
    let mut acc = Cx::zero();
    for (j, c) in a.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = (k * j as i64).rem_euclid(n);
        let theta = (&two_pi * BigInt::from(e)) / BigInt::from(n);
        let (co, si) = cos_sin(&theta);
        let q = from_int_ratio(c.numer(), c.denom());
        acc = acc.add(&Cx { re: fmul(&co, &q), im: fmul(&si, &q) });
    }
    acc
}

/// Eigenvalues of a Hermitian matrix given by its numeric entries.
fn jacobi_eigenvalues(mut a: Vec<Vec<Cx>>) -> Vec<Fx> {
    let n = a.len();
    let tol = BigInt::one() << (PREC - 150);
    for _sweep in 0..100 {
        let off: Fx = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j].abs_sq())
            .sum();
        if off < fmul(&tol, &tol) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let r2 = a[p][q].abs_sq();
                if r2.is_zero() {
                    continue;
                }
                let r = fsqrt(&r2);
                if r.is_zero() {
                    continue;
                }
                // Make a[p][q] real and positive: scale column q by u, row q by conj(u).
                let u = Cx { re: fdiv(&a[p][q].re, &r), im: -fdiv(&a[p][q].im, &r) };
                for row in a.iter_mut() {
                    row[q] = row[q].mul(&u);
                }
                let uc = u.conj();
                for j in 0..n {
                    a[q][j] = uc.mul(&a[q][j]);
                }
                let app = a[p][p].re.clone();
                let aqq = a[q][q].re.clone();
                let apq = a[p][q].re.clone();
                if apq.is_zero() {
                    continue;
                }
                let tau = fdiv(&(&aqq - &app), &(&apq * 2));
                let root = fsqrt(&(one() + fmul(&tau, &tau)));
                let t = if tau.is_negative() {
                    -fdiv(&one(), &(-&tau + &root))
                } else {
                    fdiv(&one(), &(&tau + &root))
                };
                let c = fdiv(&one(), &fsqrt(&(one() + fmul(&t, &t))));
                let s = fmul(&t, &c);
                // A <- A P, then A <- P^T A, with P_pp = P_qq = c, P_pq = s, P_qp = -s.
                for row in a.iter_mut() {
                    let xp = row[p].clone();
                    let xq = row[q].clone();
                    row[p] = xp.scale(&c).sub(&xq.scale(&s));
                    row[q] = xp.scale(&s).add(&xq.scale(&c));
                }
                for j in 0..n {
                    let xp = a[p][j].clone();
                    let xq = a[q][j].clone();
                    a[p][j] = xp.scale(&c).sub(&xq.scale(&s));
                    a[q][j] = xp.scale(&s).add(&xq.scale(&c));
                }
            }
        }
    }
    (0..n).map(|i| a[i][i].re.clone()).collect()
}

/// (positive, negative, zero) eigenvalue counts of the numeric embedding.
pub fn numeric_signature(h: &HermForm) -> [usize; 3] {
    let m = h.mat();
    let n = m.rows();
    let a: Vec<Vec<Cx>> = (0..n).map(|i| (0..n).map(|j| embed(m.get(i, j))).collect()).collect();
    let zero_tol = BigInt::one() << (PREC - ZERO_BITS);
    let mut sig = [0usize; 3];
    for e in jacobi_eigenvalues(a) {
        if e.abs() < zero_tol {
            sig[2] += 1;
        } else if e.is_positive() {
            sig[0] += 1;
        } else {
            sig[1] += 1;
        }
    }
    sig
}

/// Numeric value of an element as f64 parts, for sanity checks of the oracle itself.
pub fn approx(a: &CycElem) -> (f64, f64) {
    let e = embed(a);
    let to = |x: &Fx| -> f64 {
        let shift = PREC - 60;
        let v: i128 = (x >> shift).try_into().unwrap_or(0);
        v as f64 / (1u64 << 60) as f64
    };
    (to(&e.re), to(&e.im))
}
