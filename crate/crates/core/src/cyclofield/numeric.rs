//! Certified fixed-point ball arithmetic used to embed field elements into C.
//!
//! A [`Ball`] with precision `P` stands for the real interval
//! `[(mid - rad) / 2^P, (mid + rad) / 2^P]`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::elem::CycElem;

const GUARD_BITS: u32 = 32;

/// A real ball with a fixed-point midpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    pub mid: BigInt,
    pub rad: BigInt,
    pub prec: u32,
}

/// A rectangle `re + i im` of real balls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBall {
    pub re: Ball,
    pub im: Ball,
}

fn shr_floor(x: &BigInt, s: u32) -> BigInt {
    x.div_floor(&(BigInt::one() << s))
}

fn shr_ceil(x: &BigInt, s: u32) -> BigInt {
    -shr_floor(&-x, s)
}

impl Ball {
    pub fn zero(prec: u32) -> Self {
        Ball { mid: BigInt::zero(), rad: BigInt::zero(), prec }
    }

    pub fn from_int(v: &BigInt, prec: u32) -> Self {
        Ball { mid: v << prec, rad: BigInt::zero(), prec }
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        let scaled = q.numer() << prec;
        let (d, r) = scaled.div_mod_floor(q.denom());
        Ball { mid: d, rad: if r.is_zero() { BigInt::zero() } else { BigInt::one() }, prec }
    }

    pub fn add(&self, o: &Ball) -> Ball {
        debug_assert_eq!(self.prec, o.prec);
        Ball { mid: &self.mid + &o.mid, rad: &self.rad + &o.rad, prec: self.prec }
    }

    pub fn sub(&self, o: &Ball) -> Ball {
        debug_assert_eq!(self.prec, o.prec);
        Ball { mid: &self.mid - &o.mid, rad: &self.rad + &o.rad, prec: self.prec }
    }

    pub fn neg(&self) -> Ball {
        Ball { mid: -&self.mid, rad: self.rad.clone(), prec: self.prec }
    }

    pub fn mul(&self, o: &Ball) -> Ball {
        debug_assert_eq!(self.prec, o.prec);
        let p = self.prec;
        let prod = &self.mid * &o.mid;
        let mid = shr_floor(&prod, p);
        let err = self.mid.abs() * &o.rad + o.mid.abs() * &self.rad + &self.rad * &o.rad;
        let rad = shr_ceil(&err, p) + 1;
        Ball { mid, rad, prec: p }
    }

    pub fn mul_int(&self, k: &BigInt) -> Ball {
        Ball { mid: &self.mid * k, rad: &self.rad * k.abs(), prec: self.prec }
    }

    /// Division by a positive integer.
    pub fn div_int(&self, k: &BigInt) -> Ball {
        debug_assert!(k.is_positive());
        let mid = self.mid.div_floor(k);
        let rad = self.rad.div_ceil(k) + 1;
        Ball { mid, rad, prec: self.prec }
    }

    /// Drops precision to `p` bits, widening the radius to stay certified.
    pub fn round_to(&self, p: u32) -> Ball {
        if p >= self.prec {
            let s = p - self.prec;
            return Ball { mid: &self.mid << s, rad: &self.rad << s, prec: p };
        }
        let s = self.prec - p;
        Ball { mid: shr_floor(&self.mid, s), rad: shr_ceil(&self.rad, s) + 1, prec: p }
    }

    /// Certified sign, or None when the ball contains zero.
    pub fn sign(&self) -> Option<i32> {
        if &self.mid - &self.rad > BigInt::zero() {
            Some(1)
        } else if &self.mid + &self.rad < BigInt::zero() {
            Some(-1)
        } else {
            None
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.sign().is_none()
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(&self.mid - &self.rad, BigInt::one() << self.prec)
    }

    pub fn upper(&self) -> BigRational {
        BigRational::new(&self.mid + &self.rad, BigInt::one() << self.prec)
    }

    pub fn mid_rational(&self) -> BigRational {
        BigRational::new(self.mid.clone(), BigInt::one() << self.prec)
    }

    pub fn rad_rational(&self) -> BigRational {
        BigRational::new(self.rad.clone(), BigInt::one() << self.prec)
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.mid.bits() as i64;
        let shift = (bits - 60).max(0) as u32;
        let m = (&self.mid >> shift).to_f64().unwrap_or(0.0);
        m * 2f64.powi(shift as i32 - self.prec as i32)
    }

    /// Upper bound on |x| as a rational.
    pub fn abs_upper(&self) -> BigRational {
        BigRational::new(self.mid.abs() + &self.rad, BigInt::one() << self.prec)
    }
}

impl ComplexBall {
    pub fn zero(prec: u32) -> Self {
        ComplexBall { re: Ball::zero(prec), im: Ball::zero(prec) }
    }

    pub fn from_rationals(re: &BigRational, im: &BigRational, prec: u32) -> Self {
        ComplexBall { re: Ball::from_rational(re, prec), im: Ball::from_rational(im, prec) }
    }

    pub fn add(&self, o: &ComplexBall) -> ComplexBall {
        ComplexBall { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &ComplexBall) -> ComplexBall {
        ComplexBall { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn mul(&self, o: &ComplexBall) -> ComplexBall {
        ComplexBall {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn conj(&self) -> ComplexBall {
        ComplexBall { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn mul_int(&self, k: &BigInt) -> ComplexBall {
        ComplexBall { re: self.re.mul_int(k), im: self.im.mul_int(k) }
    }

    pub fn div_int(&self, k: &BigInt) -> ComplexBall {
        ComplexBall { re: self.re.div_int(k), im: self.im.div_int(k) }
    }

    pub fn round_to(&self, p: u32) -> ComplexBall {
        ComplexBall { re: self.re.round_to(p), im: self.im.round_to(p) }
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Upper bound on the modulus, as a rational (via |re| + |im|... refined by
    /// a rational square root bound).
    pub fn abs_upper(&self) -> BigRational {
        let a = self.re.abs_upper();
        let b = self.im.abs_upper();
        sqrt_upper(&(&a * &a + &b * &b))
    }
}

/// A rational upper bound for sqrt(x), x >= 0, within a relative error of about 2^-60.
pub fn sqrt_upper(x: &BigRational) -> BigRational {
    if x.is_zero() {
        return BigRational::zero();
    }
    let scale = 128u32;
    let scaled = (x.numer() << (2 * scale)).div_ceil(x.denom());
    let r = scaled.sqrt() + 1;
    BigRational::new(r, BigInt::one() << scale)
}

/// A rational lower bound for sqrt(x), x >= 0.
pub fn sqrt_lower(x: &BigRational) -> BigRational {
    if x.is_zero() {
        return BigRational::zero();
    }
    let scale = 128u32;
    let scaled = (x.numer() << (2 * scale)).div_floor(x.denom());
    BigRational::new(scaled.sqrt(), BigInt::one() << scale)
}

/// atan(1/x) for an integer x >= 2 as a ball.
fn atan_inv(x: u32, prec: u32) -> Ball {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let one = BigInt::one() << prec;
    let mut power = one.div_floor(&x); // 1/x^{2k+1}, truncated
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    let mut terms: u64 = 0;
    loop {
        let term = power.div_floor(&BigInt::from(2 * k + 1));
        if term.is_zero() {
            break;
        }
        if k % 2 == 0 {
            sum += &term;
        } else {
            sum -= &term;
        }
        power = power.div_floor(&x2);
        k += 1;
        terms += 1;
    }
    // each truncation costs at most 2 ulps and the tail is below one ulp
    Ball { mid: sum, rad: BigInt::from(2 * terms + 2), prec }
}

/// pi as a certified ball (Machin's formula).
pub fn pi(prec: u32) -> Ball {
    let w = prec + GUARD_BITS;
    let a = atan_inv(5, w).mul_int(&BigInt::from(16));
    let b = atan_inv(239, w).mul_int(&BigInt::from(4));
    a.sub(&b).round_to(prec)
}

/// cos and sin of a ball x with |x| <= 4 via Taylor series with a tail bound.
fn cos_sin(x: &Ball) -> (Ball, Ball) {
    let p = x.prec;
    let one = Ball::from_int(&BigInt::one(), p);
    let mut cos = one.clone();
    let mut sin = x.clone();
    let mut term = x.clone(); // x^k / k!
    let mut k: u64 = 1;
    // the running term carries a few ulps of rounding error, so stop once
    // it is this small and account for the rest in the tail bound
    let eps = BigInt::from(16);
    loop {
        k += 1;
        term = term.mul(x).div_int(&BigInt::from(k));
        let t = term.clone();
        match k % 4 {
            0 => cos = cos.add(&t),
            1 => sin = sin.add(&t),
            2 => cos = cos.sub(&t),
            _ => sin = sin.sub(&t),
        }
        if k > 8 && t.mid.abs() + &t.rad <= eps {
            // remaining terms are bounded by a geometric series of ratio 1/2
            let tail = (t.mid.abs() + &t.rad) * 2 + 2;
            cos.rad += &tail;
            sin.rad += &tail;
            break;
        }
    }
    (cos, sin)
}

type TrigTable = Arc<Vec<ComplexBall>>;

/// exp(2 pi i j/n) for 0 <= j < n, cached per (n, precision).
pub fn roots_of_unity(n: u32, prec: u32) -> TrigTable {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), TrigTable>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&(n, prec)) {
        return t.clone();
    }
    let w = prec + GUARD_BITS;
    let two_pi = pi(w).mul_int(&BigInt::from(2));
    let mut table = vec![ComplexBall::zero(prec); n as usize];
    for j in 0..n {
        // reduce to an angle in [0, pi] and use symmetry for the rest
        let jj = j.min(n - j);
        let ball = if jj == 0 {
            ComplexBall { re: Ball::from_int(&BigInt::one(), w), im: Ball::zero(w) }
        } else if 4 * jj == n {
            ComplexBall { re: Ball::zero(w), im: Ball::from_int(&BigInt::one(), w) }
        } else if 2 * jj == n {
            ComplexBall { re: Ball::from_int(&BigInt::from(-1), w), im: Ball::zero(w) }
        } else if 4 * jj > n {
            // angle in (pi/2, pi): use theta = pi - phi with phi in (0, pi/2)
            let phi = two_pi.mul_int(&BigInt::from(n - 2 * jj)).div_int(&BigInt::from(2 * n));
            let (c, s) = cos_sin(&phi);
            ComplexBall { re: c.neg(), im: s }
        } else {
            let theta = two_pi.mul_int(&BigInt::from(jj)).div_int(&BigInt::from(n));
            let (c, s) = cos_sin(&theta);
            ComplexBall { re: c, im: s }
        };
        let ball = if jj != j { ball.conj() } else { ball };
        table[j as usize] = ball.round_to(prec);
    }
    let t = Arc::new(table);
    cache.lock().unwrap().insert((n, prec), t.clone());
    t
}

/// Embeds a field element under its field's chosen embedding.
pub fn embed(a: &CycElem, prec: u32) -> ComplexBall {
    let field = a.field();
    let n = field.n();
    let k = field.embedding_k() as u64;
    let table = roots_of_unity(n, prec);
    let mut acc = ComplexBall::zero(prec);
    for (j, c) in a.numerators().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let idx = ((j as u64 * k) % n as u64) as usize;
        acc = acc.add(&table[idx].mul_int(c));
    }
    if a.denominator().is_one() {
        acc
    } else {
        acc.div_int(a.denominator())
    }
}

/// Renders a real number with 15 significant digits.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..15).contains(&mag) {
        let decimals = (14 - mag).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        trim_zeros(&s)
    } else {
        format!("{:.14e}", x)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        t.to_string()
    } else {
        s.to_string()
    }
}

/// Renders a complex number with 15 significant digits per part.
pub fn format_complex(re: f64, im: f64) -> String {
    let tiny = 1e-300;
    match (re.abs() < tiny, im.abs() < tiny) {
        (_, true) => format_real(re),
        (true, false) => format!("{}i", format_real(im)),
        _ => {
            let sign = if im < 0.0 { "-" } else { "+" };
            format!("{} {} {}i", format_real(re), sign, format_real(im.abs()))
        }
    }
}

/// 15-significant-digit rendering of a field element at the given precision.
/// Components that are exactly zero are shown as zero rather than as rounding noise.
pub fn format_approx(a: &CycElem, prec: u32) -> String {
    let b = embed(a, prec);
    let re = if a.re().is_zero() { 0.0 } else { b.re.to_f64() };
    let im = if a.is_real() { 0.0 } else { b.im.to_f64() };
    format_complex(re, im)
}

impl Ball {
    /// The sign of the midpoint, for reporting.
    pub fn mid_sign(&self) -> Sign {
        self.mid.sign()
    }
}
