//! Heisenberg-group description of parabolic stabilizers.
//!
//! In blocked coordinates the form is H = [[0,0,1],[0,K,0],[1,0,0]] with K
//! positive definite, and a parabolic isometry fixing e_1 reads
//! P(B,w,t) = [[1, -w*KB, -w*Kw/2 + it], [0, B, w], [0, 0, 1]].

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{Catalog, CuspSpec, GroupInstance, Params};
use crate::cyclofield::{CycElem, CycField};
use crate::error::{Error, Result};
use crate::exactlin::{HermForm, MatC};
use crate::fingroup::{self, DEFAULT_MAX_ORDER};
use crate::intmath;
use crate::reflect::{format_word, parse_word, Word};

/// A Hermitian form in the blocked shape, over a field containing i.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockedForm {
    h: HermForm,
    k: HermForm,
}

impl BlockedForm {
    pub fn new(h: &HermForm) -> Result<Self> {
        let n = h.dim();
        if n < 3 {
            return Err(Error::FormMismatch("blocked forms have size at least 3".into()));
        }
        let f0 = h.field();
        let field = if f0.n() % 4 == 0 {
            f0.clone()
        } else {
            CycField::with_embedding(intmath::lcm(f0.n() as u64, 4) as u32, f0.embedding_k())?
        };
        let m = h.mat().lift(&field)?;
        let last = n - 1;
        for i in 0..n {
            for j in 0..n {
                let corner = (i == 0 && j == last) || (i == last && j == 0);
                let inner = (1..last).contains(&i) && (1..last).contains(&j);
                let e = m.get(i, j);
                if corner && !e.is_one() {
                    return Err(Error::FormMismatch(format!("entry ({},{}) must be 1", i + 1, j + 1)));
                }
                if !corner && !inner && !e.is_zero() {
                    return Err(Error::FormMismatch(format!("entry ({},{}) must be 0", i + 1, j + 1)));
                }
            }
        }
        let idx: Vec<usize> = (1..last).collect();
        let h = HermForm::new(m)?;
        let k = h.restrict(&idx);
        if k.signature().pos != last - 1 {
            return Err(Error::FormMismatch(format!("inner block has signature {}", k.signature())));
        }
        Ok(BlockedForm { h, k })
    }

    pub fn h(&self) -> &HermForm {
        &self.h
    }

    pub fn k(&self) -> &HermForm {
        &self.k
    }

    pub fn field(&self) -> &CycField {
        self.h.field()
    }

    /// Size of the full form.
    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    /// Size of the horizontal block.
    pub fn horizontal_dim(&self) -> usize {
        self.k.dim()
    }

    /// w'* K w.
    pub fn k_pairing(&self, w: &[CycElem], w2: &[CycElem]) -> CycElem {
        self.k.pairing(w, w2).expect("vectors of the horizontal size")
    }

    pub fn lift_matrix(&self, m: &MatC) -> Result<MatC> {
        if m.field() == self.field() {
            Ok(m.clone())
        } else {
            m.lift(self.field())
        }
    }
}

/// An element P(B, w, t) of a parabolic stabilizer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HeisElem {
    pub b: MatC,
    pub w: Vec<CycElem>,
    pub t: CycElem,
}

impl HeisElem {
    pub fn identity(f: &BlockedForm) -> Self {
        let fld = f.field();
        HeisElem {
            b: MatC::identity(fld, f.horizontal_dim()),
            w: vec![CycElem::zero(fld); f.horizontal_dim()],
            t: CycElem::zero(fld),
        }
    }

    /// The Heisenberg translation U(w, t).
    pub fn translation(f: &BlockedForm, w: Vec<CycElem>, t: CycElem) -> Self {
        HeisElem { b: MatC::identity(f.field(), f.horizontal_dim()), w, t }
    }

    /// The vertical translation U(0, t).
    pub fn vertical(f: &BlockedForm, t: CycElem) -> Self {
        Self::translation(f, vec![CycElem::zero(f.field()); f.horizontal_dim()], t)
    }

    pub fn is_translation(&self) -> bool {
        self.b.is_identity()
    }

    pub fn is_vertical(&self) -> bool {
        self.is_translation() && self.w.iter().all(|x| x.is_zero())
    }

    /// P(B,w,t)^{-1} = P(B^{-1}, -B^{-1}w, -t).
    pub fn inverse(&self) -> Result<Self> {
        let bi = self.b.inv()?;
        let w = bi.mul_vec(&self.w)?.into_iter().map(|x| -&x).collect();
        Ok(HeisElem { b: bi, w, t: -&self.t })
    }

    /// The matrix P(B, w, t).
    pub fn reassemble(&self, f: &BlockedForm) -> Result<MatC> {
        let fld = f.field();
        let n = f.dim();
        let last = n - 1;
        let kw = f.k.mat().mul_vec(&self.w)?;
        // row 0 middle block: -w* K B
        let wk: Vec<CycElem> = (0..last - 1).map(|j| dot_conj(&self.w, &f.k.mat().col(j))).collect();
        let wkb: Vec<CycElem> = (0..last - 1)
            .map(|j| (0..last - 1).fold(CycElem::zero(fld), |acc, l| &acc + &(&wk[l] * self.b.get(l, j))))
            .collect();
        let half = BigRational::new(BigInt::from(-1), BigInt::from(2));
        let i = CycElem::root_of_unity(fld, 4, 1)?;
        let corner = &dot_conj(&self.w, &kw).scale(&half) + &(&i * &self.t);
        let mut m = MatC::identity(fld, n);
        for j in 0..last - 1 {
            m.set(0, j + 1, -&wkb[j]);
            m.set(j + 1, last, self.w[j].clone());
            for r in 0..last - 1 {
                m.set(r + 1, j + 1, self.b.get(r, j).clone());
            }
        }
        m.set(0, last, corner);
        Ok(m)
    }
}

/// x* y for column vectors.
fn dot_conj(x: &[CycElem], y: &[CycElem]) -> CycElem {
    let f = x.first().map(|e| e.field().clone()).or_else(|| y.first().map(|e| e.field().clone()));
    let Some(f) = f else { unreachable!("empty vectors") };
    x.iter().zip(y).fold(CycElem::zero(&f), |acc, (a, b)| &acc + &(&a.conj() * b))
}

fn is_isometry(m: &MatC, f: &BlockedForm) -> Result<bool> {
    Ok(&m.conj_transpose().try_mul(f.h.mat())?.try_mul(m)? == f.h.mat())
}

/// Reads off (B, w, t) from a parabolic isometry fixing e_1.
pub fn parabolic_decompose(m: &MatC, f: &BlockedForm) -> Result<HeisElem> {
    let n = f.dim();
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix for a form of size {n}", m.rows(), m.cols())));
    }
    let m = f.lift_matrix(m)?;
    let last = n - 1;
    let lower_ok = (1..n).all(|i| m.get(i, 0).is_zero()) && (0..last).all(|j| m.get(last, j).is_zero());
    if !lower_ok {
        return Err(Error::NotParabolicShape);
    }
    if !is_isometry(&m, f)? {
        return Err(Error::FormMismatch("matrix does not preserve the blocked form".into()));
    }
    if !m.get(0, 0).is_one() || !m.get(last, last).is_one() {
        return Err(Error::NotUnipotentCorner);
    }
    let inner: Vec<usize> = (1..last).collect();
    let b = m.submatrix(&inner, &inner);
    let w: Vec<CycElem> = inner.iter().map(|&i| m.get(i, last).clone()).collect();
    let kw = f.k.mat().mul_vec(&w)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let y = m.get(0, last) + &dot_conj(&w, &kw).scale(&half);
    if !y.re().is_zero() {
        return Err(Error::NotParabolicShape);
    }
    let t = y.im()?;
    let u = HeisElem { b, w, t };
    if u.reassemble(f)? != m {
        return Err(Error::NotParabolicShape);
    }
    Ok(u)
}

/// The Heisenberg group law in the general P form:
/// P(B,w,t) P(B',w',t') = P(BB', Bw' + w, t + t' + Im(w'* B* K w)).
pub fn heis_mul(a: &HeisElem, b: &HeisElem, f: &BlockedForm) -> Result<HeisElem> {
    let k = f.horizontal_dim();
    if a.w.len() != k || b.w.len() != k || a.b.rows() != k || b.b.rows() != k {
        return Err(Error::FormMismatch("Heisenberg elements of another size".into()));
    }
    let bb = a.b.try_mul(&b.b)?;
    let bw2 = a.b.mul_vec(&b.w)?;
    let w: Vec<CycElem> = bw2.iter().zip(&a.w).map(|(x, y)| x + y).collect();
    let kw = f.k.mat().mul_vec(&a.w)?;
    let bkw = a.b.conj_transpose().mul_vec(&kw)?;
    let cross = dot_conj(&b.w, &bkw).im()?;
    Ok(HeisElem { b: bb, w, t: &(&a.t + &b.t) + &cross })
}

/// a b a^{-1} b^{-1}.
pub fn heis_commutator(a: &HeisElem, b: &HeisElem, f: &BlockedForm) -> Result<HeisElem> {
    let ab = heis_mul(a, b, f)?;
    let ba = heis_mul(b, a, f)?;
    heis_mul(&ab, &ba.inverse()?, f)
}

/// Parameters (alpha, C, v) of an isometry of the blocked form.
#[derive(Clone, Debug)]
pub struct IsometryShape {
    pub alpha: CycElem,
    pub c: MatC,
    pub v: Vec<CycElem>,
}

/// Recognizes Q = [[alpha, *, *], [0, C, v], [0, 0, 1/alpha]] with alpha real.
pub fn isometry_shape(q: &MatC, f: &BlockedForm) -> Result<IsometryShape> {
    let n = f.dim();
    if q.rows() != n || q.cols() != n {
        return Err(Error::NotIsometryShape);
    }
    let q = f.lift_matrix(q)?;
    let last = n - 1;
    let lower_ok = (1..n).all(|i| q.get(i, 0).is_zero()) && (0..last).all(|j| q.get(last, j).is_zero());
    let alpha = q.get(0, 0).clone();
    if !lower_ok || alpha.is_zero() || !alpha.is_real() || !is_isometry(&q, f)? {
        return Err(Error::NotIsometryShape);
    }
    let inner: Vec<usize> = (1..last).collect();
    Ok(IsometryShape {
        alpha,
        c: q.submatrix(&inner, &inner),
        v: inner.iter().map(|&i| q.get(i, last).clone()).collect(),
    })
}

/// Q P Q^{-1} for an isometry Q of the blocked shape. For a translation this is
/// U(alpha C w, alpha^2 (t + 2 Im(w* C* K v))).
pub fn conjugate_scaling(q: &MatC, u: &HeisElem, f: &BlockedForm) -> Result<HeisElem> {
    let q = f.lift_matrix(q)?;
    isometry_shape(&q, f)?;
    let m = q.try_mul(&u.reassemble(f)?)?.try_mul(&q.inv()?)?;
    parabolic_decompose(&m, f)
}

/// The isometry with parameters alpha (real, nonzero), C = Id and v = 0.
pub fn scaling_isometry(f: &BlockedForm, alpha: &CycElem) -> Result<MatC> {
    let mut q = MatC::identity(f.field(), f.dim());
    q.set(0, 0, alpha.clone());
    q.set(f.dim() - 1, f.dim() - 1, alpha.inv()?);
    Ok(q)
}

/// A translation found during enumeration, with a shortest word producing it.
#[derive(Clone, Debug, Serialize)]
pub struct TranslationRecord {
    pub word: String,
    #[serde(serialize_with = "ser_elems")]
    pub w: Vec<CycElem>,
    #[serde(serialize_with = "ser_elem")]
    pub t: CycElem,
}

fn ser_elem<S: serde::Serializer>(e: &CycElem, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&e.to_string())
}

fn ser_elems<S: serde::Serializer>(v: &[CycElem], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for e in v {
        seq.serialize_element(&e.to_string())?;
    }
    seq.end()
}

/// Summary of the translation subgroup of a cusp group.
#[derive(Clone, Debug)]
pub struct CuspProfile {
    pub form: BlockedForm,
    pub linear_part_order: Option<usize>,
    pub vertical_generator: Option<CycElem>,
    pub vertical_lengths: Vec<CycElem>,
    pub horizontal_norms: Vec<CycElem>,
    pub horizontal_basis: Vec<Vec<CycElem>>,
    pub horizontal_rank: usize,
    pub translations: Vec<TranslationRecord>,
    pub elements_enumerated: usize,
    pub flags: Vec<String>,
}

impl CuspProfile {
    /// A genuine cusp: full-rank discrete horizontal lattice and a vertical generator.
    pub fn is_complete(&self) -> bool {
        let full = 2 * self.form.horizontal_dim();
        self.horizontal_rank == full && self.horizontal_basis.len() == full && self.vertical_generator.is_some()
    }

    /// The translation with given horizontal and vertical parts, if found.
    pub fn find_translation(&self, w: &[CycElem], t: &CycElem) -> Option<&TranslationRecord> {
        self.translations.iter().find(|r| r.w.as_slice() == w && &r.t == t)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "linear_part_order": self.linear_part_order,
            "vertical_generator": self.vertical_generator.as_ref().map(|v| v.to_string()),
            "vertical_generator_approx": self.vertical_generator.as_ref().map(|v| v.to_f64().0),
            "horizontal_norms": self.horizontal_norms.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "horizontal_rank": self.horizontal_rank,
            "horizontal_basis": self.horizontal_basis.iter().map(|w| w.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "translations": self.translations,
            "flags": self.flags,
        })
    }
}

fn word_to_string(w: &Word) -> String {
    format_word(w)
}

/// Enumerates words of length at most `word_len` in the generators and their
/// inverses and assembles the translation data of the group they generate.
pub fn translation_lattice(gens: &[MatC], f: &BlockedForm, word_len: usize) -> Result<CuspProfile> {
    let n = f.dim();
    let mut letters: Vec<(HeisElem, (usize, i32))> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        let g = f.lift_matrix(g)?;
        if g.rows() != n || (1..n).any(|r| !g.get(r, 0).is_zero()) {
            return Err(Error::NotCommonFixedPoint);
        }
        let u = parabolic_decompose(&g, f)?;
        let ui = u.inverse()?;
        letters.push((u.clone(), (i, 1)));
        if ui != u {
            letters.push((ui, (i, -1)));
        }
    }
    let id = HeisElem::identity(f);
    let mut seen: HashMap<HeisElem, Word> = HashMap::from([(id.clone(), vec![])]);
    let mut order: Vec<HeisElem> = vec![id.clone()];
    let mut frontier = vec![id];
    for _ in 0..word_len {
        let next: Vec<(HeisElem, usize, usize)> = frontier
            .par_iter()
            .enumerate()
            .flat_map_iter(|(fi, e)| {
                letters
                    .iter()
                    .enumerate()
                    .map(move |(li, (l, _))| (heis_mul(e, l, f).expect("same blocked form"), fi, li))
            })
            .collect();
        let mut nf = Vec::new();
        for (e, fi, li) in next {
            if seen.contains_key(&e) {
                continue;
            }
            let mut w = seen[&frontier[fi]].clone();
            w.push(letters[li].1);
            seen.insert(e.clone(), w);
            order.push(e.clone());
            nf.push(e);
        }
        frontier = nf;
        if frontier.is_empty() {
            break;
        }
    }
    let mut flags = Vec::new();
    let mut translations: Vec<(HeisElem, Word)> = order
        .iter()
        .filter(|e| e.is_translation() && !e.is_vertical())
        .map(|e| (e.clone(), seen[e].clone()))
        .collect();
    translations.sort_by_key(|(_, w)| w.len());
    let mut verticals: Vec<CycElem> = order.iter().filter(|e| e.is_vertical() && !e.t.is_zero()).map(|e| e.t.clone()).collect();
    // commutators of translations are vertical
    let sample: Vec<&HeisElem> = translations.iter().map(|(e, _)| e).take(64).collect();
    for (i, a) in sample.iter().enumerate() {
        for b in &sample[i + 1..] {
            let c = heis_commutator(a, b, f)?;
            if !c.t.is_zero() {
                verticals.push(c.t);
            }
        }
    }
    let mut uniq_v: Vec<CycElem> = Vec::new();
    for v in verticals {
        let v = if v.real_sign()? < 0 { -&v } else { v };
        if !uniq_v.contains(&v) {
            uniq_v.push(v);
        }
    }
    let vertical_generator = rational_gcd_on_line(&uniq_v)?;
    if vertical_generator.is_none() {
        if uniq_v.is_empty() {
            flags.push("no vertical translation found".to_string());
        } else {
            flags.push("vertical lengths are not commensurable".to_string());
        }
    }
    let ws: Vec<Vec<CycElem>> = translations.iter().map(|(e, _)| e.w.clone()).collect();
    let horizontal_rank = real_rank(&ws, f.field())?;
    let horizontal_basis = z_basis(&ws, f.field());
    let mut norms: Vec<CycElem> = Vec::new();
    for w in &ws {
        let v = f.k_pairing(w, w);
        if !norms.contains(&v) {
            norms.push(v);
        }
    }
    norms.sort_by(|a, b| a.to_f64().0.partial_cmp(&b.to_f64().0).unwrap_or(std::cmp::Ordering::Equal));
    let full = 2 * f.horizontal_dim();
    if horizontal_rank < full {
        flags.push(format!("NotALattice: horizontal rank {horizontal_rank} < {full}"));
    } else if horizontal_basis.len() != full {
        flags.push(format!("horizontal Z-rank {} differs from {full}", horizontal_basis.len()));
    }
    let bs: Vec<MatC> = letters.iter().filter(|(_, (_, e))| *e > 0).map(|(u, _)| u.b.clone()).collect();
    let linear_part_order = if bs.is_empty() {
        None
    } else {
        match fingroup::closure(&bs, DEFAULT_MAX_ORDER) {
            Ok(g) => Some(g.order()),
            Err(e) => {
                flags.push(format!("linear part: {e}"));
                None
            }
        }
    };
    let mut dedup: HashSet<(Vec<CycElem>, CycElem)> = HashSet::new();
    let records: Vec<TranslationRecord> = translations
        .iter()
        .filter(|(e, _)| dedup.insert((e.w.clone(), e.t.clone())))
        .map(|(e, w)| TranslationRecord { word: word_to_string(w), w: e.w.clone(), t: e.t.clone() })
        .collect();
    Ok(CuspProfile {
        form: f.clone(),
        linear_part_order,
        vertical_generator,
        vertical_lengths: uniq_v,
        horizontal_norms: norms,
        horizontal_basis,
        horizontal_rank,
        translations: records,
        elements_enumerated: order.len(),
        flags,
    })
}

/// The positive generator of the subgroup of R generated by real values
/// lying on one rational line, or None when they are not commensurable.
fn rational_gcd_on_line(values: &[CycElem]) -> Result<Option<CycElem>> {
    let Some(base) = values.first() else { return Ok(None) };
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for v in values {
        let Some(r) = v.try_div(base)?.to_rational() else { return Ok(None) };
        num = num.gcd(r.numer());
        den = den.lcm(r.denom());
    }
    let g = base.scale(&BigRational::new(num, den));
    Ok(Some(if g.real_sign()? < 0 { -&g } else { g }))
}

/// Real rank of vectors: the field rank of the rows (w, conj w).
fn real_rank(ws: &[Vec<CycElem>], field: &CycField) -> Result<usize> {
    if ws.is_empty() {
        return Ok(0);
    }
    let rows: Vec<Vec<CycElem>> = ws
        .iter()
        .map(|w| w.iter().cloned().chain(w.iter().map(|x| x.conj())).collect())
        .collect();
    Ok(MatC::from_rows(field, rows)?.rank())
}

/// A Z-basis of the Z-span of the vectors, read in rational coordinates of
/// the power basis, by integer row reduction.
fn z_basis(ws: &[Vec<CycElem>], field: &CycField) -> Vec<Vec<CycElem>> {
    if ws.is_empty() {
        return vec![];
    }
    let k = ws[0].len();
    let d = field.basis_dim();
    let rat_rows: Vec<Vec<BigRational>> = ws
        .iter()
        .map(|w| w.iter().flat_map(|x| x.coeffs()).collect())
        .collect();
    let common = rat_rows.iter().flatten().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let mut rows: Vec<Vec<BigInt>> = rat_rows
        .iter()
        .map(|r| r.iter().map(|q| (q * BigRational::from_integer(common.clone())).to_integer()).collect())
        .collect();
    let basis = hermite_rows(&mut rows);
    basis
        .into_iter()
        .map(|r| {
            (0..k)
                .map(|i| {
                    let c: Vec<BigRational> = r[i * d..(i + 1) * d]
                        .iter()
                        .map(|x| BigRational::new(x.clone(), common.clone()))
                        .collect();
                    CycElem::from_coeffs(field, &c).expect("coordinates of the field")
                })
                .collect()
        })
        .collect()
}

/// Row echelon form over Z by repeated Euclidean reduction; returns the nonzero rows.
fn hermite_rows(rows: &mut Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let Some(ncols) = rows.first().map(|r| r.len()) else { return vec![] };
    let mut out = Vec::new();
    let mut work: Vec<Vec<BigInt>> = rows.drain(..).filter(|r| r.iter().any(|x| !x.is_zero())).collect();
    for c in 0..ncols {
        loop {
            let nz: Vec<usize> = (0..work.len()).filter(|&i| !work[i][c].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| work[i][c].abs()).unwrap();
            let pivot = work[p].clone();
            for &i in &nz {
                if i == p {
                    continue;
                }
                let q = work[i][c].div_floor(&pivot[c]);
                for j in 0..ncols {
                    let v = &work[i][j] - &q * &pivot[j];
                    work[i][j] = v;
                }
            }
        }
        if let Some(i) = (0..work.len()).find(|&i| !work[i][c].is_zero()) {
            let mut r = work.swap_remove(i);
            if r[c].is_negative() {
                r.iter_mut().for_each(|x| *x = -x.clone());
            }
            out.push(r);
        }
        work.retain(|r| r.iter().any(|x| !x.is_zero()));
    }
    out
}

/// Result of the one-scalar rationality test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CommensurabilityVerdict {
    /// rho_a / rho_b is irrational, so no positive scalar relates the cusps.
    Incommensurable { ratio: CycElem },
    /// rho_a / rho_b is rational; the test gives no information.
    NotDistinguished { ratio: CycElem },
}

impl CommensurabilityVerdict {
    pub fn ratio(&self) -> &CycElem {
        match self {
            CommensurabilityVerdict::Incommensurable { ratio } | CommensurabilityVerdict::NotDistinguished { ratio } => ratio,
        }
    }

    pub fn is_incommensurable(&self) -> bool {
        matches!(self, CommensurabilityVerdict::Incommensurable { .. })
    }
}

/// rho = vertical generator / smallest nonzero horizontal norm.
pub fn cusp_ratio(p: &CuspProfile) -> Result<CycElem> {
    if !p.is_complete() {
        return Err(Error::IncompleteProfile(p.flags.join("; ")));
    }
    let v = p.vertical_generator.as_ref().unwrap();
    let norm = p
        .horizontal_norms
        .iter()
        .find(|x| !x.is_zero())
        .ok_or_else(|| Error::IncompleteProfile("no nonzero horizontal norm".into()))?;
    v.try_div(norm)
}

/// Compares rho for two cusp profiles. A scalar lambda relating the cusps
/// multiplies horizontal norms and vertical lengths alike, so rho_a / rho_b
/// must be rational for commensurable cusps.
pub fn incommensurable_cusps(a: &CuspProfile, b: &CuspProfile) -> Result<CommensurabilityVerdict> {
    let ra = cusp_ratio(a)?;
    let rb = cusp_ratio(b)?;
    let n = intmath::lcm(ra.field().n() as u64, rb.field().n() as u64) as u32;
    let common = CycField::new(n);
    let ratio = ra.lift(&common)?.try_div(&rb.lift(&common)?)?;
    Ok(if ratio.is_rational() {
        CommensurabilityVerdict::NotDistinguished { ratio }
    } else {
        CommensurabilityVerdict::Incommensurable { ratio }
    })
}

/// A catalog cusp with its generators in blocked coordinates.
#[derive(Clone, Debug)]
pub struct CuspSetup {
    pub spec: CuspSpec,
    pub instance: GroupInstance,
    pub change_of_basis: Option<MatC>,
    pub form: BlockedForm,
    pub gens: Vec<MatC>,
    env: crate::catalog::Env,
}

impl CuspSetup {
    /// Builds the cusp with id such as "G29:3" or "B4_34_DM".
    pub fn from_catalog(cat: &Catalog, id: &str) -> Result<CuspSetup> {
        let spec = cat.cusp(id)?.clone();
        let instance = cat.instantiate(&spec.family, &Params::from_list(&spec.params)?)?;
        let mut env = instance.env().clone();
        for (name, e) in &spec.defs {
            env.define(name, e)?;
        }
        let eval_mat = |rows: &Vec<Vec<String>>| -> Result<MatC> {
            let r = rows
                .iter()
                .map(|row| row.iter().map(|e| env.eval(e)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            MatC::from_rows(env.field(), r)
        };
        let q = spec.change_of_basis.as_ref().map(&eval_mat).transpose()?;
        let h = match &q {
            Some(q) => instance.form.congruent(q)?,
            None => instance.form.clone(),
        };
        if let Some(adapted) = &spec.adapted_form {
            if &eval_mat(adapted)? != h.mat() {
                return Err(Error::FormMismatch(format!("{id}: Q*HQ differs from the adapted form")));
            }
        }
        let form = BlockedForm::new(&h)?;
        let qi = q.as_ref().map(|q| q.inv()).transpose()?;
        let gens = spec
            .generators
            .iter()
            .map(|&g| {
                let r = &instance.gens[g - 1].matrix;
                let s = match (&q, &qi) {
                    (Some(q), Some(qi)) => qi.try_mul(r)?.try_mul(q)?,
                    _ => r.clone(),
                };
                form.lift_matrix(&s)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CuspSetup { spec, instance, change_of_basis: q, form, gens, env })
    }

    /// The catalog cusp of a family instance.
    pub fn for_instance(cat: &Catalog, family: &str, params: &Params) -> Result<CuspSetup> {
        let c = cat
            .cusps
            .iter()
            .find(|c| c.family == family && c.params == params.to_list())
            .ok_or_else(|| Error::NoStratumTable(format!("no cusp data for {family} {params}")))?;
        Self::from_catalog(cat, &c.id)
    }

    pub fn eval(&self, e: &str) -> Result<CycElem> {
        self.env.eval(e)?.lift(self.form.field())
    }

    pub fn word(&self, w: &str) -> Result<HeisElem> {
        let w = parse_word(w)?;
        let mut acc = HeisElem::identity(&self.form);
        for &(g, e) in &w {
            let m = self.gens.get(g).ok_or_else(|| Error::MalformedWord(format!("generator {} out of range", g + 1)))?;
            let u = parabolic_decompose(m, &self.form)?;
            let u = if e > 0 { u } else { u.inverse()? };
            acc = heis_mul(&acc, &u, &self.form)?;
        }
        Ok(acc)
    }

    /// Expected (w, t) of each listed translation.
    pub fn expected_translations(&self) -> Result<Vec<(String, Vec<CycElem>, CycElem)>> {
        self.spec
            .translations
            .iter()
            .map(|t| {
                let w = t.w.iter().map(|e| self.eval(e)).collect::<Result<Vec<_>>>()?;
                Ok((t.name.clone(), w, self.eval(&t.t)?))
            })
            .collect()
    }

    /// Expected linear parts B_j.
    pub fn expected_linear_parts(&self) -> Result<Vec<MatC>> {
        self.spec
            .linear_parts
            .iter()
            .map(|rows| {
                let r = rows
                    .iter()
                    .map(|row| row.iter().map(|e| self.eval(e)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                MatC::from_rows(self.form.field(), r)
            })
            .collect()
    }

    pub fn profile(&self, word_len: usize) -> Result<CuspProfile> {
        translation_lattice(&self.gens, &self.form, word_len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dm_form() -> BlockedForm {
        let f = CycField::new(4);
        let i = CycElem::zeta(&f);
        let one = CycElem::one(&f);
        let z = CycElem::zero(&f);
        let two = CycElem::from_int(&f, 2);
        let a = -&(&one + &i);
        let m = MatC::from_rows(
            &f,
            vec![
                vec![z.clone(), z.clone(), z.clone(), one.clone()],
                vec![z.clone(), two.clone(), a.clone(), z.clone()],
                vec![z.clone(), a.conj(), two.clone(), z.clone()],
                vec![one.clone(), z.clone(), z.clone(), z.clone()],
            ],
        )
        .unwrap();
        BlockedForm::new(&HermForm::new(m).unwrap()).unwrap()
    }

    #[test]
    fn identity_decomposes_trivially() {
        let f = dm_form();
        let id = MatC::identity(f.field(), 4);
        assert_eq!(parabolic_decompose(&id, &f).unwrap(), HeisElem::identity(&f));
    }

    #[test]
    fn reassemble_roundtrip_and_law() {
        let f = dm_form();
        let fl = f.field().clone();
        let i = CycElem::zeta(&fl);
        let one = CycElem::one(&fl);
        let u = HeisElem::translation(&f, vec![one.clone(), i.clone()], CycElem::from_int(&fl, 3));
        let v = HeisElem::translation(&f, vec![-&i, CycElem::from_int(&fl, 2)], CycElem::from_int(&fl, -1));
        let mu = u.reassemble(&f).unwrap();
        assert_eq!(parabolic_decompose(&mu, &f).unwrap(), u);
        let prod = heis_mul(&u, &v, &f).unwrap();
        let mprod = mu.try_mul(&v.reassemble(&f).unwrap()).unwrap();
        assert_eq!(parabolic_decompose(&mprod, &f).unwrap(), prod);
        let c = heis_commutator(&u, &v, &f).unwrap();
        let expect = f.k_pairing(&u.w, &v.w).im().unwrap();
        assert!(c.is_vertical());
        assert_eq!(c.t, &expect + &expect);
        assert!(heis_mul(&u, &u.inverse().unwrap(), &f).unwrap() == HeisElem::identity(&f));
    }

    #[test]
    fn scaling_of_vertical() {
        let f = dm_form();
        let fl = f.field().clone();
        let q = scaling_isometry(&f, &CycElem::from_int(&fl, 2)).unwrap();
        let u = HeisElem::vertical(&f, CycElem::from_int(&fl, 5));
        assert_eq!(conjugate_scaling(&q, &u, &f).unwrap(), HeisElem::vertical(&f, CycElem::from_int(&fl, 20)));
        let id = MatC::identity(&fl, 4);
        assert_eq!(conjugate_scaling(&id, &u, &f).unwrap(), u);
    }

    #[test]
    fn shape_errors() {
        let f = dm_form();
        let fl = f.field().clone();
        let bad = MatC::from_int_rows(&fl, &[vec![1, 0, 0, 0], vec![1, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
        assert_eq!(parabolic_decompose(&bad, &f).unwrap_err(), Error::NotParabolicShape);
        let q = scaling_isometry(&f, &CycElem::from_int(&fl, 2)).unwrap();
        assert_eq!(parabolic_decompose(&q, &f).unwrap_err(), Error::NotUnipotentCorner);
        let not_iso = MatC::from_int_rows(&fl, &[vec![1, 0, 0, 0], vec![0, 2, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]);
        assert!(matches!(parabolic_decompose(&not_iso, &f), Err(Error::FormMismatch(_))));
        assert_eq!(isometry_shape(&not_iso, &f).unwrap_err(), Error::NotIsometryShape);
    }

    #[test]
    fn identity_generators_give_flagged_profile() {
        let f = dm_form();
        let p = translation_lattice(&[MatC::identity(f.field(), 4)], &f, 3).unwrap();
        assert!(!p.is_complete());
        assert!(p.flags.iter().any(|s| s.starts_with("NotALattice")));
        assert!(matches!(cusp_ratio(&p), Err(Error::IncompleteProfile(_))));
    }

    #[test]
    fn hermite_reduction() {
        let mut rows = vec![
            vec![BigInt::from(2), BigInt::from(0)],
            vec![BigInt::from(3), BigInt::from(1)],
            vec![BigInt::from(4), BigInt::from(2)],
        ];
        let b = hermite_rows(&mut rows);
        assert_eq!(b.len(), 2);
        assert_eq!(b[0][0], BigInt::from(1));
    }
}
