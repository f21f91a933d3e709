use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use crate::cyclofield::{parse_rational, CycElem, CycField};
use crate::error::{Error, Result};

/// A dense matrix over a cyclotomic field, stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct MatC {
    field: CycField,
    rows: usize,
    cols: usize,
    data: Vec<CycElem>,
}

/// JSON wire format: entries are listed row-major, each as its power-basis
/// coordinates written as exact rational strings.
#[derive(Serialize, Deserialize)]
struct MatJson {
    field: u32,
    rows: usize,
    cols: usize,
    entries: Vec<Vec<String>>,
}

impl MatC {
    pub fn new(field: &CycField, rows: usize, cols: usize, data: Vec<CycElem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        for e in &data {
            e.check_field(field)?;
        }
        Ok(MatC { field: field.clone(), rows, cols, data })
    }

    pub fn from_rows(field: &CycField, rows: Vec<Vec<CycElem>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(field, r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(field: &CycField, rows: usize, cols: usize, f: impl Fn(usize, usize) -> CycElem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        MatC { field: field.clone(), rows, cols, data }
    }

    pub fn zeros(field: &CycField, rows: usize, cols: usize) -> Self {
        Self::from_fn(field, rows, cols, |_, _| CycElem::zero(field))
    }

    pub fn identity(field: &CycField, n: usize) -> Self {
        Self::from_fn(field, n, n, |i, j| if i == j { CycElem::one(field) } else { CycElem::zero(field) })
    }

    /// Column vector.
    pub fn column(field: &CycField, v: &[CycElem]) -> Self {
        Self::from_fn(field, v.len(), 1, |i, _| v[i].clone())
    }

    pub fn field(&self) -> &CycField {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CycElem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CycElem) {
        debug_assert!(v.field() == &self.field);
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[CycElem] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<CycElem> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<CycElem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<CycElem>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    fn check_same_field(&self, other: &MatC) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::IncompatibleFields(self.field.n(), other.field.n()))
        }
    }

    pub fn try_mul(&self, other: &MatC) -> Result<MatC> {
        self.check_same_field(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = CycElem::zero(f);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.push(acc);
            }
        }
        Ok(MatC { field: f.clone(), rows: self.rows, cols: other.cols, data: out })
    }

    fn zip_with(&self, other: &MatC, f: impl Fn(&CycElem, &CycElem) -> CycElem) -> Result<MatC> {
        self.check_same_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect();
        Ok(MatC { field: self.field.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn try_add(&self, other: &MatC) -> Result<MatC> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &MatC) -> Result<MatC> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn map(&self, f: impl Fn(&CycElem) -> CycElem) -> MatC {
        MatC { field: self.field.clone(), rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn scale(&self, s: &CycElem) -> MatC {
        self.map(|a| a * s)
    }

    pub fn transpose(&self) -> MatC {
        MatC::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> MatC {
        self.map(|a| a.conj())
    }

    /// The conjugate transpose A*.
    pub fn conj_transpose(&self) -> MatC {
        MatC::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Entrywise Galois automorphism zeta -> zeta^k.
    pub fn galois(&self, k: u64) -> Result<MatC> {
        let aut = crate::cyclofield::GaloisAut::new(&self.field, k)?;
        let data = self.data.iter().map(|a| aut.apply(a)).collect::<Result<Vec<_>>>()?;
        Ok(MatC { field: self.field.clone(), rows: self.rows, cols: self.cols, data })
    }

    /// The same matrix viewed in a larger field (or the same field with another embedding).
    pub fn lift(&self, target: &CycField) -> Result<MatC> {
        let data = self.data.iter().map(|a| a.lift(target)).collect::<Result<Vec<_>>>()?;
        Ok(MatC { field: target.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| if i == j { self.get(i, j).is_one() } else { self.get(i, j).is_zero() })
            })
    }

    pub fn trace(&self) -> CycElem {
        (0..self.rows.min(self.cols)).fold(CycElem::zero(&self.field), |acc, i| &acc + self.get(i, i))
    }

    /// Principal submatrix on the given (0-based) indices.
    pub fn principal_submatrix(&self, idx: &[usize]) -> MatC {
        MatC::from_fn(&self.field, idx.len(), idx.len(), |i, j| self.get(idx[i], idx[j]).clone())
    }

    /// Submatrix on arbitrary row and column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> MatC {
        MatC::from_fn(&self.field, rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn mul_vec(&self, v: &[CycElem]) -> Result<Vec<CycElem>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols).fold(CycElem::zero(&self.field), |acc, j| &acc + &(self.get(i, j) * &v[j]))
            })
            .collect())
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!("{}x{} is not square", self.rows, self.cols)))
        }
    }

    /// Inverse by Gauss-Jordan elimination.
    pub fn inv(&self) -> Result<MatC> {
        self.require_square()?;
        let n = self.rows;
        let f = &self.field;
        let mut a = self.to_rows();
        let mut b = MatC::identity(f, n).to_rows();
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r][c].is_zero()).ok_or(Error::SingularMatrix)?;
            a.swap(c, p);
            b.swap(c, p);
            let piv = a[c][c].inv()?;
            for j in 0..n {
                a[c][j] = &a[c][j] * &piv;
                b[c][j] = &b[c][j] * &piv;
            }
            for r in 0..n {
                if r == c || a[r][c].is_zero() {
                    continue;
                }
                let m = a[r][c].clone();
                for j in 0..n {
                    if !a[c][j].is_zero() {
                        a[r][j] = &a[r][j] - &(&m * &a[c][j]);
                    }
                    if !b[c][j].is_zero() {
                        b[r][j] = &b[r][j] - &(&m * &b[c][j]);
                    }
                }
            }
        }
        MatC::from_rows(f, b)
    }

    /// Integer power; negative exponents use the inverse.
    pub fn pow(&self, e: i64) -> Result<MatC> {
        self.require_square()?;
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = MatC::identity(&self.field, self.rows);
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

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<CycElem> {
        self.require_square()?;
        let n = self.rows;
        let f = &self.field;
        if n == 0 {
            return Ok(CycElem::one(f));
        }
        let mut a = self.to_rows();
        let mut sign_flip = false;
        let mut prev = CycElem::one(f);
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(p) => {
                        a.swap(k, p);
                        sign_flip = !sign_flip;
                    }
                    None => return Ok(CycElem::zero(f)),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = num.try_div(&prev)?;
                }
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        Ok(if sign_flip { -d } else { d })
    }

    /// Rank by Gaussian elimination with exact zero tests.
    pub fn rank(&self) -> usize {
        let mut a = self.to_rows();
        let (m, n) = (self.rows, self.cols);
        let mut r = 0;
        for c in 0..n {
            let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(r, p);
            let piv = a[r][c].inv().expect("nonzero pivot");
            for i in r + 1..m {
                if a[i][c].is_zero() {
                    continue;
                }
                let factor = &a[i][c] * &piv;
                for j in c..n {
                    if !a[r][j].is_zero() {
                        a[i][j] = &a[i][j] - &(&factor * &a[r][j]);
                    }
                }
            }
            r += 1;
            if r == m {
                break;
            }
        }
        r
    }

    /// A basis of the right kernel {x : A x = 0}.
    pub fn kernel(&self) -> Vec<Vec<CycElem>> {
        let f = &self.field;
        let (m, n) = (self.rows, self.cols);
        let mut a = self.to_rows();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..n {
            let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(r, p);
            let piv = a[r][c].inv().expect("nonzero pivot");
            for j in 0..n {
                a[r][j] = &a[r][j] * &piv;
            }
            for i in 0..m {
                if i != r && !a[i][c].is_zero() {
                    let factor = a[i][c].clone();
                    for j in 0..n {
                        a[i][j] = &a[i][j] - &(&factor * &a[r][j]);
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == m {
                break;
            }
        }
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![CycElem::zero(f); n];
                v[fc] = CycElem::one(f);
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -&a[row][fc];
                }
                v
            })
            .collect()
    }

    /// Characteristic polynomial det(x I - A) by the Faddeev-LeVerrier recursion.
    pub fn char_poly(&self) -> Result<Poly> {
        self.require_square()?;
        let n = self.rows;
        let f = &self.field;
        let mut coeffs = vec![CycElem::zero(f); n + 1];
        coeffs[n] = CycElem::one(f);
        let id = MatC::identity(f, n);
        let mut m = MatC::zeros(f, n, n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k)/k
            m = &(self * &m) + &id.scale(&coeffs[n - k + 1]);
            let am = self * &m;
            let c = am.trace().scale(&BigRational::new(BigInt::from(-1), BigInt::from(k as u64)));
            coeffs[n - k] = c;
        }
        Ok(Poly::new(f, coeffs))
    }

    /// Exact JSON per the documented matrix schema.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("serializable")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let m = MatJson {
            field: self.field.n(),
            rows: self.rows,
            cols: self.cols,
            entries: self.data.iter().map(|e| e.coeffs().iter().map(|c| c.to_string()).collect()).collect(),
        };
        serde_json::to_value(m).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<MatC> {
        let v: serde_json::Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(&v)
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<MatC> {
        let m: MatJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let f = CycField::new(m.field);
        let data = m
            .entries
            .iter()
            .map(|cs| {
                let q = cs.iter().map(|c| parse_rational(c)).collect::<Result<Vec<_>>>()?;
                CycElem::from_coeffs(&f, &q)
            })
            .collect::<Result<Vec<_>>>()?;
        MatC::new(&f, m.rows, m.cols, data)
    }

    /// Whether every entry is an algebraic integer.
    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|e| e.is_integral())
    }
}

impl Hash for MatC {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
        self.cols.hash(state);
        for e in &self.data {
            e.hash(state);
        }
    }
}

impl fmt::Debug for MatC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatC[{}]", self.field)?;
        for i in 0..self.rows {
            write!(f, "\n  [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j).to_poly_string())?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

impl fmt::Display for MatC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> =
            (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).to_poly_string()).collect()).collect();
        let width = cells.iter().flatten().map(|s| s.len()).max().unwrap_or(1);
        for (i, row) in cells.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[")?;
            for (j, c) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, "  ")?;
                }
                write!(f, "{c:>width$}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

macro_rules! mat_binop {
    ($trait:ident, $method:ident, $try:ident) => {
        impl $trait<&MatC> for &MatC {
            type Output = MatC;
            fn $method(self, rhs: &MatC) -> MatC {
                self.$try(rhs).expect("compatible matrices")
            }
        }
        impl $trait<MatC> for MatC {
            type Output = MatC;
            fn $method(self, rhs: MatC) -> MatC {
                (&self).$try(&rhs).expect("compatible matrices")
            }
        }
    };
}

mat_binop!(Add, add, try_add);
mat_binop!(Sub, sub, try_sub);
mat_binop!(Mul, mul, try_mul);

impl Neg for &MatC {
    type Output = MatC;
    fn neg(self) -> MatC {
        self.map(|a| -a)
    }
}

/// Sum over a vector of field elements, used by callers building linear combinations.
pub fn dot(x: &[CycElem], y: &[CycElem]) -> Option<CycElem> {
    let f = x.first()?.field().clone();
    Some(x.iter().zip(y).fold(CycElem::zero(&f), |acc, (a, b)| &acc + &(a * b)))
}

impl MatC {
    /// Integer matrix convenience constructor.
    pub fn from_int_rows(field: &CycField, rows: &[Vec<i64>]) -> MatC {
        MatC::from_rows(field, rows.iter().map(|r| r.iter().map(|&v| CycElem::from_int(field, v)).collect()).collect())
            .expect("rectangular integer rows")
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        self.data.iter().filter(|e| !e.is_zero()).count()
    }

    /// Whether all entries are rational integers.
    pub fn is_rational(&self) -> bool {
        self.data.iter().all(|e| e.is_rational())
    }

    /// Sum of squared numerators, a cheap size measure for tests.
    pub fn height(&self) -> BigInt {
        self.data
            .iter()
            .flat_map(|e| e.numerators().iter().map(|c| c * c))
            .fold(BigInt::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z3() -> (CycField, CycElem) {
        let f = CycField::new(3);
        let z = CycElem::zeta(&f);
        (f, z)
    }

    #[test]
    fn inverse_and_det() {
        let (f, z) = z3();
        let one = CycElem::one(&f);
        let zero = CycElem::zero(&f);
        let r1 = MatC::from_rows(
            &f,
            vec![
                vec![z.clone(), one.clone(), zero.clone(), zero.clone()],
                vec![zero.clone(), one.clone(), zero.clone(), zero.clone()],
                vec![zero.clone(), zero.clone(), one.clone(), zero.clone()],
                vec![zero.clone(), zero.clone(), zero.clone(), one.clone()],
            ],
        )
        .unwrap();
        assert!((&r1 * &r1.inv().unwrap()).is_identity());
        assert_eq!(r1.det().unwrap(), z);
        assert_eq!(r1.pow(3).unwrap(), MatC::identity(&f, 4));
        assert_eq!((&r1 - &MatC::identity(&f, 4)).rank(), 1);
        let cp = r1.char_poly().unwrap();
        assert!(cp.eval_matrix(&r1).unwrap().is_zero());
        assert_eq!(cp.eval(&z), CycElem::zero(&f));
    }

    #[test]
    fn singular() {
        let f = CycField::new(4);
        let m = MatC::from_int_rows(&f, &[vec![1, 2], vec![2, 4]]);
        assert_eq!(m.inv(), Err(Error::SingularMatrix));
        assert!(m.det().unwrap().is_zero());
        assert_eq!(m.rank(), 1);
        assert_eq!(m.kernel().len(), 1);
        assert_eq!(MatC::zeros(&f, 3, 3).rank(), 0);
    }

    #[test]
    fn det_needs_row_swap() {
        let f = CycField::new(1);
        let m = MatC::from_int_rows(&f, &[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 5]]);
        assert_eq!(m.det().unwrap(), CycElem::from_int(&f, -5));
    }

    #[test]
    fn json_round_trip() {
        let (f, z) = z3();
        let m = MatC::from_rows(&f, vec![vec![z.clone(), z.inv().unwrap().scale(&BigRational::new(1.into(), 3.into()))]])
            .unwrap();
        let s = m.to_json();
        let back = MatC::from_json(&s).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), s);
    }

    #[test]
    fn dimension_errors() {
        let f = CycField::new(1);
        let a = MatC::zeros(&f, 2, 3);
        assert!(matches!(a.try_mul(&a), Err(Error::DimensionMismatch(_))));
        assert!(matches!(a.inv(), Err(Error::DimensionMismatch(_))));
    }
}
