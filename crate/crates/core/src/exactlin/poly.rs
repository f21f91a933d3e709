use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::matrix::MatC;
use crate::cyclofield::{CycElem, CycField};
use crate::error::Result;

/// A univariate polynomial with coefficients in a cyclotomic field, lowest
/// degree first, with no trailing zero coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: CycField,
    coeffs: Vec<CycElem>,
}

impl Poly {
    pub fn new(field: &CycField, mut coeffs: Vec<CycElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { field: field.clone(), coeffs }
    }

    pub fn zero(field: &CycField) -> Self {
        Poly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &CycField) -> Self {
        Self::new(field, vec![CycElem::one(field)])
    }

    /// The monomial x^k.
    pub fn x_pow(field: &CycField, k: usize) -> Self {
        let mut c = vec![CycElem::zero(field); k + 1];
        c[k] = CycElem::one(field);
        Self::new(field, c)
    }

    /// x - a.
    pub fn linear(a: &CycElem) -> Self {
        let f = a.field();
        Self::new(f, vec![-a, CycElem::one(f)])
    }

    pub fn field(&self) -> &CycField {
        &self.field
    }

    pub fn coeffs(&self) -> &[CycElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as None.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&CycElem> {
        self.coeffs.last()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = CycElem::zero(&self.field);
        let c = (0..n)
            .map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z))
            .collect();
        Poly::new(&self.field, c)
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(&CycElem::from_int(&self.field, -1)))
    }

    pub fn scale(&self, s: &CycElem) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(&self.field);
        }
        let mut c = vec![CycElem::zero(&self.field); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] = &c[i + j] + &(a * b);
            }
        }
        Poly::new(&self.field, c)
    }

    /// The monic associate (zero stays zero).
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some(l) => self.scale(&l.inv().expect("nonzero leading coefficient")),
        }
    }

    /// Quotient and remainder of division by a nonzero polynomial.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead_inv = d.leading().unwrap().inv().expect("nonzero leading coefficient");
        let mut r = self.coeffs.clone();
        let mut q = vec![CycElem::zero(&self.field); r.len().saturating_sub(dd).max(1)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = r.last().unwrap() * &lead_inv;
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] = &r[k + j] - &(&c * dc);
            }
            q[k] = c;
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        (Poly::new(&self.field, q), Poly::new(&self.field, r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            &self.field,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.scale(&BigRational::from_integer(BigInt::from(i as u64))))
                .collect(),
        )
    }

    /// The monic squarefree part p / gcd(p, p').
    pub fn squarefree_part(&self) -> Poly {
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// x^e modulo m.
    pub fn x_pow_mod(e: &BigInt, m: &Poly) -> Poly {
        let f = m.field().clone();
        let mut result = Poly::one(&f).rem(m);
        let mut base = Poly::x_pow(&f, 1).rem(m);
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                result = result.mul(&base).rem(m);
            }
            if i + 1 < bits {
                base = base.mul(&base).rem(m);
            }
        }
        result
    }

    pub fn eval(&self, x: &CycElem) -> CycElem {
        self.coeffs
            .iter()
            .rev()
            .fold(CycElem::zero(&self.field), |acc, c| &(&acc * x) + c)
    }

    /// Evaluation at a square matrix by Horner's rule.
    pub fn eval_matrix(&self, a: &MatC) -> Result<MatC> {
        let n = a.rows();
        let id = MatC::identity(&self.field, n);
        let mut acc = MatC::zeros(&self.field, n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.try_mul(a)?.try_add(&id.scale(c))?;
        }
        Ok(acc)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({})", c.to_poly_string())?,
                1 => write!(f, "({})x", c.to_poly_string())?,
                _ => write!(f, "({})x^{i}", c.to_poly_string())?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squarefree_and_gcd() {
        let f = CycField::new(3);
        let z = CycElem::zeta(&f);
        let one = CycElem::one(&f);
        // (x-1)^3 (x-z)
        let p = Poly::linear(&one).mul(&Poly::linear(&one)).mul(&Poly::linear(&one)).mul(&Poly::linear(&z));
        let s = p.squarefree_part();
        assert_eq!(s, Poly::linear(&one).mul(&Poly::linear(&z)));
        assert_eq!(p.gcd(&p.derivative()), Poly::linear(&one).mul(&Poly::linear(&one)));
    }

    #[test]
    fn x_power_mod() {
        let f = CycField::new(3);
        let z = CycElem::zeta(&f);
        let m = Poly::linear(&z);
        // x^3 = z^3 = 1 mod (x - z)
        assert_eq!(Poly::x_pow_mod(&BigInt::from(3), &m), Poly::one(&f));
        assert_eq!(Poly::x_pow_mod(&BigInt::from(4), &m), Poly::new(&f, vec![z.clone()]));
    }

    #[test]
    fn division() {
        let f = CycField::new(1);
        let p = Poly::new(&f, [-1, 0, 0, 1].iter().map(|&v| CycElem::from_int(&f, v)).collect());
        let d = Poly::linear(&CycElem::one(&f));
        let (q, r) = p.div_rem(&d);
        assert!(r.is_zero());
        assert_eq!(q.degree(), Some(2));
        assert_eq!(q.mul(&d), p);
    }
}
