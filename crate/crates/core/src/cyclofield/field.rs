use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::intmath;

/// The cyclotomic field Q(zeta_n) together with a chosen complex embedding
/// zeta_n -> exp(2 pi i k / n).
#[derive(Clone)]
pub struct CycField {
    data: Arc<FieldData>,
}

struct FieldData {
    n: u32,
    phi: usize,
    embedding_k: u32,
    /// Coefficients of Phi_n, lowest degree first (monic).
    cyclotomic: Vec<i64>,
    /// x^e reduced modulo Phi_n, for 0 <= e < n.
    powers: Vec<Vec<i64>>,
}

/// Integer coefficients of the cyclotomic polynomial Phi_n, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<i64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().unwrap().get(&n) {
        return c.clone();
    }
    // x^n - 1 divided by Phi_d for every proper divisor d.
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in intmath::divisors(n as u64) {
        if d as u32 == n {
            continue;
        }
        let q = cyclotomic_polynomial(d as u32);
        p = exact_monic_div(&p, &q);
    }
    cache.lock().unwrap().insert(n, p.clone());
    p
}

fn exact_monic_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let nd = r.len() - 1;
    let mut q = vec![0i64; nd - dd + 1];
    for i in (0..=nd - dd).rev() {
        let c = r[i + dd];
        q[i] = c;
        for (j, &d) in den.iter().enumerate() {
            r[i + j] -= c * d;
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

impl CycField {
    /// Q(zeta_n) with the standard embedding.
    pub fn new(n: u32) -> Self {
        Self::with_embedding(n, 1).expect("k = 1 is always a unit")
    }

    /// Q(zeta_n) embedded by zeta_n -> exp(2 pi i k / n).
    pub fn with_embedding(n: u32, k: u32) -> Result<Self> {
        assert!(n >= 1, "conductor must be positive");
        let k = k % n.max(1);
        let k = if n == 1 { 0 } else { k };
        if n > 1 && intmath::gcd(k as u64, n as u64) != 1 {
            return Err(Error::InvalidAutomorphism { k: k as u64, n });
        }
        static REGISTRY: OnceLock<Mutex<HashMap<(u32, u32), CycField>>> = OnceLock::new();
        let reg = REGISTRY.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(f) = reg.lock().unwrap().get(&(n, k)) {
            return Ok(f.clone());
        }
        let cyclotomic = cyclotomic_polynomial(n);
        let phi = cyclotomic.len() - 1;
        let mut powers = Vec::with_capacity(n as usize);
        let mut cur = vec![0i64; phi];
        cur[0] = 1;
        for _ in 0..n {
            powers.push(cur.clone());
            // multiply by x and reduce with the monic Phi_n
            let top = cur[phi - 1];
            for j in (1..phi).rev() {
                cur[j] = cur[j - 1] - top * cyclotomic[j];
            }
            cur[0] = -top * cyclotomic[0];
        }
        let f = CycField {
            data: Arc::new(FieldData {
                n,
                phi,
                embedding_k: if n == 1 { 1 } else { k },
                cyclotomic,
                powers,
            }),
        };
        reg.lock().unwrap().insert((n, k), f.clone());
        Ok(f)
    }

    /// The conductor n.
    pub fn n(&self) -> u32 {
        self.data.n
    }

    /// The degree phi(n) of the field over Q.
    pub fn basis_dim(&self) -> usize {
        self.data.phi
    }

    /// The exponent k selecting the embedding zeta_n -> exp(2 pi i k/n).
    pub fn embedding_k(&self) -> u32 {
        self.data.embedding_k
    }

    /// The same field with a different embedding.
    pub fn reembed(&self, k: u32) -> Result<Self> {
        Self::with_embedding(self.n(), k)
    }

    pub fn cyclotomic(&self) -> &[i64] {
        &self.data.cyclotomic
    }

    /// x^e modulo Phi_n, for any e >= 0.
    pub(crate) fn power(&self, e: u64) -> &[i64] {
        &self.data.powers[(e % self.data.n as u64) as usize]
    }

    /// The units of Z/nZ, i.e. the exponents of Galois automorphisms.
    pub fn galois_exponents(&self) -> Vec<u64> {
        intmath::units(self.n() as u64)
            .into_iter()
            .map(|k| if self.n() == 1 { 1 } else { k })
            .collect()
    }

    /// Whether exp(2 pi i/m) lies in this field.
    pub fn contains_root_of_unity(&self, m: u32) -> bool {
        let n = self.n();
        n % m == 0 || (n % 2 == 1 && (2 * n) % m == 0)
    }
}

impl PartialEq for CycField {
    fn eq(&self, other: &Self) -> bool {
        self.n() == other.n() && self.embedding_k() == other.embedding_k()
    }
}

impl Eq for CycField {}

impl fmt::Debug for CycField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.embedding_k() == 1 {
            write!(f, "Q(zeta_{})", self.n())
        } else {
            write!(f, "Q(zeta_{})[k={}]", self.n(), self.embedding_k())
        }
    }
}

impl fmt::Display for CycField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(zeta_{})", self.n())
    }
}
