use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::matrix::MatC;
use crate::cyclofield::{CycElem, CycField};
use crate::error::{Error, Result};

/// Inertia of a Hermitian form: numbers of positive, negative and zero squares.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
}

impl Signature {
    pub fn new(pos: usize, neg: usize, zero: usize) -> Self {
        Signature { pos, neg, zero }
    }

    pub fn dim(&self) -> usize {
        self.pos + self.neg + self.zero
    }

    /// Positive or negative definite.
    pub fn is_definite(&self) -> bool {
        self.zero == 0 && (self.pos == 0 || self.neg == 0)
    }

    pub fn is_degenerate(&self) -> bool {
        self.zero > 0
    }

    /// Signature (n, 1, 0): a complex hyperbolic form.
    pub fn is_hyperbolic(&self) -> bool {
        self.neg == 1 && self.zero == 0 && self.pos >= 1
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.pos, self.neg, self.zero]
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.pos, self.neg, self.zero)
    }
}

/// A Hermitian matrix over a cyclotomic field, with a lazily computed signature
/// under the field's chosen embedding.
#[derive(Clone)]
pub struct HermForm {
    mat: MatC,
    signature_cache: OnceLock<Signature>,
}

impl PartialEq for HermForm {
    fn eq(&self, other: &Self) -> bool {
        self.mat == other.mat
    }
}

impl Eq for HermForm {}

impl fmt::Debug for HermForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HermForm({:?})", self.mat)
    }
}

impl HermForm {
    pub fn new(mat: MatC) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch("form must be square".into()));
        }
        if mat.conj_transpose() != mat {
            return Err(Error::NotHermitian);
        }
        Ok(HermForm { mat, signature_cache: OnceLock::new() })
    }

    pub fn identity(field: &CycField, n: usize) -> Self {
        HermForm::new(MatC::identity(field, n)).expect("identity is Hermitian")
    }

    pub fn mat(&self) -> &MatC {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn field(&self) -> &CycField {
        self.mat.field()
    }

    /// The pairing <x, y> = y* H x, linear in the first argument.
    pub fn pairing(&self, x: &[CycElem], y: &[CycElem]) -> Result<CycElem> {
        let n = self.dim();
        if x.len() != n || y.len() != n {
            return Err(Error::DimensionMismatch(format!("vectors of length {}, {} for a form of size {n}", x.len(), y.len())));
        }
        let hx = self.mat.mul_vec(x)?;
        Ok(y.iter().zip(&hx).fold(CycElem::zero(self.field()), |acc, (a, b)| &acc + &(&a.conj() * b)))
    }

    /// Entrywise Galois conjugate H^sigma for sigma: zeta -> zeta^k.
    pub fn galois(&self, k: u64) -> Result<HermForm> {
        HermForm::new(self.mat.galois(k)?)
    }

    /// Congruence P* H P.
    pub fn congruent(&self, p: &MatC) -> Result<HermForm> {
        HermForm::new(p.conj_transpose().try_mul(&self.mat)?.try_mul(p)?)
    }

    /// The principal sub-form on the given (0-based) indices.
    pub fn restrict(&self, idx: &[usize]) -> HermForm {
        HermForm::new(self.mat.principal_submatrix(idx)).expect("principal submatrices stay Hermitian")
    }

    /// The same form over the field with another embedding.
    pub fn reembed(&self, k: u32) -> Result<HermForm> {
        HermForm::new(self.mat.lift(&self.field().reembed(k)?)?)
    }

    /// Exact inertia under the field's embedding.
    pub fn signature(&self) -> Signature {
        *self.signature_cache.get_or_init(|| ldl_signature(&self.mat))
    }

    pub fn det(&self) -> CycElem {
        self.mat.det().expect("square")
    }
}

/// Pivoted LDL* signature. Diagonal pivots contribute the sign of a real field
/// element; a zero diagonal with a nonzero off-diagonal entry b is handled by
/// the 2x2 pivot [[0, b], [conj b, 0]], which contributes one positive and one
/// negative square.
fn ldl_signature(h: &MatC) -> Signature {
    let mut a = h.to_rows();
    let mut active: Vec<usize> = (0..h.rows()).collect();
    let mut sig = Signature::new(0, 0, 0);
    while !active.is_empty() {
        if let Some(&i) = active.iter().find(|&&i| !a[i][i].is_zero()) {
            let d = a[i][i].clone();
            match d.real_sign().expect("diagonal of a Hermitian matrix is real") {
                1 => sig.pos += 1,
                _ => sig.neg += 1,
            }
            let dinv = d.inv().expect("nonzero pivot");
            active.retain(|&x| x != i);
            let col: Vec<CycElem> = active.iter().map(|&r| a[r][i].clone()).collect();
            for (ri, &r) in active.iter().enumerate() {
                if col[ri].is_zero() {
                    continue;
                }
                let left = &col[ri] * &dinv;
                for &s in &active {
                    if !a[i][s].is_zero() {
                        a[r][s] = &a[r][s] - &(&left * &a[i][s]);
                    }
                }
            }
            continue;
        }
        let pair = active
            .iter()
            .flat_map(|&i| active.iter().map(move |&j| (i, j)))
            .find(|&(i, j)| i < j && !a[i][j].is_zero());
        let Some((i, j)) = pair else {
            sig.zero += active.len();
            break;
        };
        sig.pos += 1;
        sig.neg += 1;
        let b = a[i][j].clone();
        let b_inv = b.inv().expect("nonzero");
        let bbar_inv = b.conj().inv().expect("nonzero");
        active.retain(|&x| x != i && x != j);
        // A_rs -= A_ri (1/conj b) A_js + A_rj (1/b) A_is
        let ci: Vec<CycElem> = active.iter().map(|&r| a[r][i].clone()).collect();
        let cj: Vec<CycElem> = active.iter().map(|&r| a[r][j].clone()).collect();
        for (ri, &r) in active.iter().enumerate() {
            let li = &ci[ri] * &bbar_inv;
            let lj = &cj[ri] * &b_inv;
            for &s in &active {
                let upd = &(&li * &a[j][s]) + &(&lj * &a[i][s]);
                if !upd.is_zero() {
                    a[r][s] = &a[r][s] - &upd;
                }
            }
        }
    }
    sig
}
