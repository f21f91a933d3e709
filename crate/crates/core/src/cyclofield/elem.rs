use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::field::CycField;
use super::numeric::{self, ComplexBall};
use crate::error::{Error, Result};
use crate::intmath;

/// An exact element of Q(zeta_n), stored as an integer numerator vector in the
/// power basis modulo Phi_n over a positive common denominator, in lowest terms.
#[derive(Clone)]
pub struct CycElem {
    field: CycField,
    num: Vec<BigInt>,
    den: BigInt,
}

/// The Galois automorphism zeta_n -> zeta_n^k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisAut {
    field: CycField,
    k: u64,
}

impl GaloisAut {
    pub fn new(field: &CycField, k: u64) -> Result<Self> {
        let n = field.n() as u64;
        let k = k % n.max(1);
        if n > 1 && intmath::gcd(k, n) != 1 {
            return Err(Error::InvalidAutomorphism { k, n: field.n() });
        }
        Ok(GaloisAut { field: field.clone(), k: if n == 1 { 1 } else { k } })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn field(&self) -> &CycField {
        &self.field
    }

    pub fn apply(&self, a: &CycElem) -> Result<CycElem> {
        a.check_field(&self.field)?;
        Ok(a.galois_unchecked(self.k))
    }
}

impl CycElem {
    fn from_parts(field: &CycField, num: Vec<BigInt>, den: BigInt) -> Self {
        let mut e = CycElem { field: field.clone(), num, den };
        e.normalize();
        e
    }

    fn normalize(&mut self) {
        if self.num.iter().all(|c| c.is_zero()) {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_negative() {
            self.den = -&self.den;
            for c in self.num.iter_mut() {
                *c = -&*c;
            }
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() {
            self.den /= &g;
            for c in self.num.iter_mut() {
                *c /= &g;
            }
        }
    }

    pub fn zero(field: &CycField) -> Self {
        CycElem { field: field.clone(), num: vec![BigInt::zero(); field.basis_dim()], den: BigInt::one() }
    }

    pub fn one(field: &CycField) -> Self {
        Self::from_int(field, 1)
    }

    pub fn from_int(field: &CycField, v: i64) -> Self {
        Self::from_bigint(field, BigInt::from(v))
    }

    pub fn from_bigint(field: &CycField, v: BigInt) -> Self {
        let mut num = vec![BigInt::zero(); field.basis_dim()];
        num[0] = v;
        CycElem { field: field.clone(), num, den: BigInt::one() }
    }

    pub fn from_rational(field: &CycField, q: &BigRational) -> Self {
        let mut num = vec![BigInt::zero(); field.basis_dim()];
        num[0] = q.numer().clone();
        Self::from_parts(field, num, q.denom().clone())
    }

    /// Builds an element from its power-basis coordinates.
    pub fn from_coeffs(field: &CycField, coeffs: &[BigRational]) -> Result<Self> {
        if coeffs.len() != field.basis_dim() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coefficients, got {}",
                field.basis_dim(),
                coeffs.len()
            )));
        }
        let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        Ok(Self::from_parts(field, num, den))
    }

    /// Integer combination of powers of zeta: sum of c_j zeta^{e_j}.
    pub fn from_powers(field: &CycField, terms: &[(i64, u64)]) -> Self {
        let phi = field.basis_dim();
        let mut acc = vec![0i64; phi];
        for &(c, e) in terms {
            for (a, p) in acc.iter_mut().zip(field.power(e)) {
                *a += c * p;
            }
        }
        Self::from_parts(field, acc.into_iter().map(BigInt::from).collect(), BigInt::one())
    }

    /// zeta_n itself.
    pub fn zeta(field: &CycField) -> Self {
        Self::from_powers(field, &[(1, 1)])
    }

    /// zeta_n^e for any integer e.
    pub fn zeta_pow(field: &CycField, e: i64) -> Self {
        let n = field.n() as i64;
        Self::from_powers(field, &[(1, e.rem_euclid(n) as u64)])
    }

    /// exp(2 pi i a/m), when it lies in the field.
    pub fn root_of_unity(field: &CycField, m: u32, a: i64) -> Result<Self> {
        let n = field.n() as i64;
        let m64 = m as i64;
        if n % m64 == 0 {
            return Ok(Self::zeta_pow(field, a * (n / m64)));
        }
        if n % 2 == 1 && (2 * n) % m64 == 0 {
            // exp(2 pi i a/m) = exp(pi i j/n) with j = 2 n a/m
            let j = (2 * n / m64) * a;
            if j.rem_euclid(2) == 0 {
                return Ok(Self::zeta_pow(field, j / 2));
            }
            return Ok(-Self::zeta_pow(field, (j + n) / 2));
        }
        Err(Error::NotInField(format!("exp(2 pi i/{m}) in Q(zeta_{n})")))
    }

    /// The positive square root of a positive rational (or i times it for a
    /// negative rational), built from Gauss sums.
    pub fn sqrt_rational(field: &CycField, q: &BigRational) -> Result<Self> {
        if q.is_zero() {
            return Ok(Self::zero(field));
        }
        let ab = q.numer() * q.denom();
        let (sign, s, t) = intmath::squarefree_decomposition(&ab);
        let scale = BigRational::new(t, q.denom().clone());
        let mut root = Self::one(field);
        let mut rem = s.clone();
        let mut p = BigInt::from(2);
        while !rem.is_one() {
            if (&rem % &p).is_zero() {
                rem /= &p;
                let pu: u64 = p.clone().try_into().map_err(|_| Error::NotInField("large prime".into()))?;
                root = &root * &Self::sqrt_prime(field, pu)?;
            }
            p += 1;
        }
        let mut out = root.scale(&scale);
        if sign < 0 {
            out = &out * &Self::root_of_unity(field, 4, 1)?;
        }
        Ok(out)
    }

    fn sqrt_prime(field: &CycField, p: u64) -> Result<Self> {
        let raw = if p == 2 {
            // zeta_8 + zeta_8^{-1}
            &Self::root_of_unity(field, 8, 1)? + &Self::root_of_unity(field, 8, -1)?
        } else {
            // Gauss sum g with g^2 = (-1)^{(p-1)/2} p
            let mut g = Self::zero(field);
            for a in 1..p {
                let term = Self::root_of_unity(field, p as u32, a as i64)?;
                if intmath::legendre(a as i64, p) > 0 {
                    g = &g + &term;
                } else {
                    g = &g - &term;
                }
            }
            if p % 4 == 1 {
                g
            } else {
                &g * &Self::root_of_unity(field, 4, 1)?
            }
        };
        // fix the branch so that the result is positive under the embedding
        if raw.real_sign()? < 0 {
            Ok(-raw)
        } else {
            Ok(raw)
        }
    }

    pub fn field(&self) -> &CycField {
        &self.field
    }

    /// Power-basis coordinates as exact rationals.
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num.iter().map(|c| BigRational::new(c.clone(), self.den.clone())).collect()
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.num[1..].iter().all(|c| c.is_zero())
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        if self.is_rational() {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    /// Algebraic integer test: the power basis is an integral basis of Z[zeta_n].
    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    pub(crate) fn check_field(&self, f: &CycField) -> Result<()> {
        if &self.field == f {
            Ok(())
        } else {
            Err(Error::IncompatibleFields(self.field.n(), f.n()))
        }
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::IncompatibleFields(self.field.n(), other.field.n()))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if self.den == other.den {
            let num = self.num.iter().zip(&other.num).map(|(a, b)| a + b).collect();
            return Ok(Self::from_parts(&self.field, num, self.den.clone()));
        }
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| a * &other.den + b * &self.den)
            .collect();
        Ok(Self::from_parts(&self.field, num, &self.den * &other.den))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let phi = self.field.basis_dim();
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&self.field));
        }
        let mut prod = vec![BigInt::zero(); 2 * phi - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let mut out: Vec<BigInt> = prod[..phi].to_vec();
        for (e, c) in prod.iter().enumerate().skip(phi) {
            if c.is_zero() {
                continue;
            }
            for (o, &p) in out.iter_mut().zip(self.field.power(e as u64)) {
                if p != 0 {
                    *o += c * p;
                }
            }
        }
        Ok(Self::from_parts(&self.field, out, &self.den * &other.den))
    }

    /// Multiplicative inverse via the product of the nontrivial conjugates.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = self.to_rational() {
            return Ok(Self::from_rational(&self.field, &q.recip()));
        }
        let mut others = Self::one(&self.field);
        for k in self.field.galois_exponents() {
            if k != 1 {
                others = &others * &self.galois_unchecked(k);
            }
        }
        let norm = (self * &others)
            .to_rational()
            .expect("the field norm is rational");
        Ok(others.scale(&norm.recip()))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(&self.field);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        Ok(acc)
    }

    /// Multiplication by a rational scalar.
    pub fn scale(&self, q: &BigRational) -> Self {
        let num = self.num.iter().map(|c| c * q.numer()).collect();
        Self::from_parts(&self.field, num, &self.den * q.denom())
    }

    fn neg_ref(&self) -> Self {
        CycElem { field: self.field.clone(), num: self.num.iter().map(|c| -c).collect(), den: self.den.clone() }
    }

    pub(crate) fn galois_unchecked(&self, k: u64) -> Self {
        let phi = self.field.basis_dim();
        let mut out = vec![BigInt::zero(); phi];
        for (j, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, &p) in out.iter_mut().zip(self.field.power(j as u64 * k)) {
                if p != 0 {
                    *o += c * p;
                }
            }
        }
        Self::from_parts(&self.field, out, self.den.clone())
    }

    /// Image under zeta -> zeta^k.
    pub fn galois(&self, k: u64) -> Result<Self> {
        GaloisAut::new(&self.field, k)?.apply(self)
    }

    /// Complex conjugation zeta -> zeta^{n-1}.
    pub fn conj(&self) -> Self {
        let n = self.field.n() as u64;
        self.galois_unchecked(if n <= 2 { 1 } else { n - 1 })
    }

    /// Squared modulus a * conj(a), a real element.
    pub fn norm_sq(&self) -> Self {
        self * &self.conj()
    }

    /// Real part (a + conj a)/2.
    pub fn re(&self) -> Self {
        (self + &self.conj()).scale(&BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    /// The imaginary part as a real field element, (a - conj a)/(2i).
    /// Requires i in the field unless a is already real or purely imaginary
    /// in a way expressible without i; errors otherwise.
    pub fn im(&self) -> Result<Self> {
        let d = self - &self.conj();
        if d.is_zero() {
            return Ok(Self::zero(&self.field));
        }
        let i = Self::root_of_unity(&self.field, 4, 1)?;
        Ok((&d * &i).scale(&BigRational::new(BigInt::from(-1), BigInt::from(2))))
    }

    /// Image in a field containing this one (explicit coercion).
    pub fn lift(&self, target: &CycField) -> Result<Self> {
        if target.n() == self.field.n() {
            return Ok(CycElem { field: target.clone(), num: self.num.clone(), den: self.den.clone() });
        }
        let rho = Self::root_of_unity(target, self.field.n(), 1)?;
        let mut acc = Self::zero(target);
        let mut pw = Self::one(target);
        for c in &self.num {
            if !c.is_zero() {
                acc = &acc + &pw.scale(&BigRational::from_integer(c.clone()));
            }
            pw = &pw * &rho;
        }
        Ok(acc.scale(&BigRational::new(BigInt::one(), self.den.clone())))
    }

    /// Compact polynomial rendering in z = zeta_n, e.g. "1 - 2z^3" or "1/3z".
    pub fn to_poly_string(&self) -> String {
        let mut out = String::new();
        for (j, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match j {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{j}"),
            };
            if j == 0 || !a.is_one() {
                out.push_str(&a.to_string());
            }
            out.push_str(&mono);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// Certified complex ball containing the embedded value.
    pub fn embed_numeric(&self, precision_bits: u32) -> ComplexBall {
        numeric::embed(self, precision_bits.max(32))
    }

    /// Exact sign of a real element under the field's embedding.
    pub fn real_sign(&self) -> Result<i32> {
        if !self.is_real() {
            return Err(Error::NotReal);
        }
        if self.is_zero() {
            return Ok(0);
        }
        let mut prec = 64;
        loop {
            let b = numeric::embed(self, prec).re;
            if let Some(s) = b.sign() {
                return Ok(s);
            }
            prec *= 2;
        }
    }

    /// Approximate complex value (re, im).
    pub fn to_f64(&self) -> (f64, f64) {
        let b = numeric::embed(self, 96);
        (b.re.to_f64(), b.im.to_f64())
    }

    /// Human readable rendering with the exact coefficients and a 15 significant
    /// digit approximation.
    pub fn display_with_approx(&self) -> String {
        format!("{} (approx {})", self, numeric::format_approx(self, 96))
    }
}

impl PartialEq for CycElem {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.den == other.den && self.num == other.num
    }
}

impl Eq for CycElem {}

impl Hash for CycElem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.n().hash(state);
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl fmt::Debug for CycElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Exact textual form "Q(zeta_n): [c0, c1, ...]".
impl fmt::Display for CycElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(zeta_{}): [", self.field.n())?;
        for (i, c) in self.coeffs().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for CycElem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("cannot parse field element {s:?}"));
        let s = s.trim();
        let rest = s.strip_prefix("Q(zeta_").ok_or_else(bad)?;
        let (n, rest) = rest.split_once(')').ok_or_else(bad)?;
        let n: u32 = n.trim().parse().map_err(|_| bad())?;
        let rest = rest.trim_start().strip_prefix(':').ok_or_else(bad)?.trim();
        let inner = rest.strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
        let coeffs = parse_rational_list(inner)?;
        Self::from_coeffs(&CycField::new(n), &coeffs)
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("cannot parse rational {s:?}"));
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(BigRational::new(a, b))
    } else {
        let a: BigInt = s.parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(a))
    }
}

fn parse_rational_list(s: &str) -> Result<Vec<BigRational>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_rational).collect()
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&CycElem> for &CycElem {
            type Output = CycElem;
            fn $method(self, rhs: &CycElem) -> CycElem {
                self.$try(rhs).expect("operands must share a field")
            }
        }
        impl $trait<CycElem> for CycElem {
            type Output = CycElem;
            fn $method(self, rhs: CycElem) -> CycElem {
                (&self).$try(&rhs).expect("operands must share a field")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Div<&CycElem> for &CycElem {
    type Output = CycElem;
    /// Panics on division by zero; use `try_div` for a checked version.
    fn div(self, rhs: &CycElem) -> CycElem {
        self.try_div(rhs).expect("division by a nonzero element of the same field")
    }
}

impl Neg for &CycElem {
    type Output = CycElem;
    fn neg(self) -> CycElem {
        self.neg_ref()
    }
}

impl Neg for CycElem {
    type Output = CycElem;
    fn neg(self) -> CycElem {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn cube_roots_sum_to_minus_one() {
        let f = CycField::new(3);
        let z = CycElem::zeta(&f);
        assert_eq!(&z + &(&z * &z), CycElem::from_int(&f, -1));
    }

    #[test]
    fn i_squared() {
        let f = CycField::new(12);
        let i3 = CycElem::zeta_pow(&f, 3);
        assert_eq!(&i3 * &i3, CycElem::from_int(&f, -1));
        assert_eq!(CycElem::zeta_pow(&f, 6), CycElem::from_int(&f, -1));
    }

    #[test]
    fn alpha_inverse() {
        let f = CycField::new(3);
        let z = CycElem::zeta(&f);
        let zm1 = &z - &CycElem::one(&f);
        let alpha = zm1.inv().unwrap();
        assert!((&alpha * &zm1).is_one());
        assert_eq!(alpha.conj(), (&z.conj() - &CycElem::one(&f)).inv().unwrap());
    }

    #[test]
    fn division_by_zero() {
        let f = CycField::new(5);
        assert_eq!(CycElem::zero(&f).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn conj_of_i() {
        let f = CycField::new(4);
        let i = CycElem::zeta(&f);
        assert_eq!(i.conj(), CycElem::zeta_pow(&f, 3));
    }

    #[test]
    fn sqrt3_and_galois() {
        let f = CycField::new(12);
        let s3 = &CycElem::zeta(&f) - &CycElem::zeta_pow(&f, 5);
        assert_eq!(&s3 * &s3, CycElem::from_int(&f, 3));
        assert!(s3.is_real());
        assert_eq!(s3.galois(5).unwrap(), -&s3);
        assert_eq!(CycElem::sqrt_rational(&f, &q(3, 1)).unwrap(), s3);
    }

    #[test]
    fn sqrt5_in_q_zeta10() {
        let f = CycField::new(10);
        let s5 = CycElem::sqrt_rational(&f, &q(5, 1)).unwrap();
        assert_eq!(&s5 * &s5, CycElem::from_int(&f, 5));
        assert_eq!(s5.real_sign().unwrap(), 1);
        assert_eq!(s5.galois(3).unwrap(), -&s5);
    }

    #[test]
    fn sqrt_of_rationals() {
        let f = CycField::new(24);
        let r = CycElem::sqrt_rational(&f, &q(2, 3)).unwrap();
        assert_eq!(&r * &r, CycElem::from_rational(&f, &q(2, 3)));
        assert_eq!(r.real_sign().unwrap(), 1);
        let m = CycElem::sqrt_rational(&f, &q(-6, 1)).unwrap();
        assert_eq!(&m * &m, CycElem::from_int(&f, -6));
        assert!(CycElem::sqrt_rational(&CycField::new(5), &q(3, 1)).is_err());
    }

    #[test]
    fn odd_conductor_contains_minus_roots() {
        let f = CycField::new(5);
        // exp(i pi/5) = -zeta_5^3
        let r = CycElem::root_of_unity(&f, 10, 1).unwrap();
        assert_eq!(r, -CycElem::zeta_pow(&f, 3));
        assert_eq!(r.pow(10).unwrap(), CycElem::one(&f));
        assert_eq!(r.pow(5).unwrap(), CycElem::from_int(&f, -1));
    }

    #[test]
    fn real_signs() {
        let f = CycField::new(12);
        let s3 = CycElem::sqrt_rational(&f, &q(3, 1)).unwrap();
        let two = CycElem::from_int(&f, 2);
        let a = &two + &s3;
        assert_eq!(a.real_sign().unwrap(), 1);
        assert_eq!(a.galois(5).unwrap().real_sign().unwrap(), 1);
        assert_eq!((&a - &CycElem::from_int(&f, 4)).real_sign().unwrap(), -1);
        assert_eq!(CycElem::zero(&f).real_sign().unwrap(), 0);
        assert_eq!(CycElem::zeta(&f).real_sign(), Err(Error::NotReal));
    }

    #[test]
    fn two_minus_golden_ratio_is_positive() {
        let f = CycField::new(5);
        let s5 = CycElem::sqrt_rational(&CycField::new(5), &q(5, 1)).unwrap();
        let phi = (&CycElem::one(&f) + &s5).scale(&q(1, 2));
        assert_eq!((&CycElem::from_int(&f, 2) - &phi).real_sign().unwrap(), 1);
    }

    #[test]
    fn lifting() {
        let f3 = CycField::new(3);
        let f12 = CycField::new(12);
        let w = CycElem::zeta(&f3);
        assert_eq!(w.lift(&f12).unwrap(), CycElem::zeta_pow(&f12, 4));
        let f6 = CycField::new(6);
        let z6 = CycElem::zeta(&f6);
        assert_eq!(z6.lift(&f3).unwrap(), -CycElem::zeta_pow(&f3, 2));
        assert!(w.lift(&CycField::new(4)).is_err());
        assert!(w.try_add(&CycElem::zeta(&f12)).is_err());
    }

    #[test]
    fn text_round_trip() {
        let f = CycField::new(12);
        let a = (&CycElem::zeta(&f) + &CycElem::from_int(&f, 2)).scale(&q(-3, 7));
        let s = a.to_string();
        assert_eq!(s, "Q(zeta_12): [-6/7, -3/7, 0, 0]");
        assert_eq!(s.parse::<CycElem>().unwrap(), a);
    }

    #[test]
    fn conductor_one_and_two() {
        let f1 = CycField::new(1);
        assert_eq!(CycElem::zeta(&f1), CycElem::one(&f1));
        let f2 = CycField::new(2);
        assert_eq!(CycElem::zeta(&f2), CycElem::from_int(&f2, -1));
        assert_eq!(CycElem::from_int(&f2, 3).inv().unwrap().to_rational().unwrap(), q(1, 3));
    }
}
