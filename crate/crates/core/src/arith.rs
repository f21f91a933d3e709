//! Element classification, adjoint trace fields and arithmeticity.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{Catalog, GroupInstance};
use crate::cyclofield::{cyclotomic_polynomial, numeric, ComplexBall, CycElem, CycField};
use crate::error::{Error, Result};
use crate::exactlin::{HermForm, MatC, Poly, Signature};
use crate::intmath;
use crate::reflect::{parse_word, WordEvaluator};

/// Dynamical type of an isometry of a Hermitian form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementClass {
    EllipticFinite { order: u64 },
    EllipticInfinite,
    Parabolic,
    Loxodromic,
}

impl fmt::Display for ElementClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementClass::EllipticFinite { order } => write!(f, "elliptic_finite(order {order})"),
            ElementClass::EllipticInfinite => write!(f, "elliptic_infinite"),
            ElementClass::Parabolic => write!(f, "parabolic"),
            ElementClass::Loxodromic => write!(f, "loxodromic"),
        }
    }
}

/// Classifies an isometry `a` of `form` by its eigenvalues.
///
/// Roots of the squarefree part s of the characteristic polynomial are first
/// isolated in certified discs, which detects roots off the unit circle. When
/// every root is a root of unity the element is elliptic of finite order or
/// parabolic according to whether s(a) vanishes; with all roots on the circle
/// but some not roots of unity it is elliptic of infinite order or parabolic
/// by the same test.
pub fn classify_element(a: &MatC, form: &HermForm) -> Result<ElementClass> {
    if !a.is_square() || a.rows() != form.dim() {
        return Err(Error::DimensionMismatch(format!("{}x{} element for a form of size {}", a.rows(), a.cols(), form.dim())));
    }
    let a = if a.field() != form.field() { a.lift(form.field())? } else { a.clone() };
    let h = form.mat();
    if &a.conj_transpose().try_mul(h)?.try_mul(&a)? != h {
        return Err(Error::FormMismatch("element does not preserve the form".into()));
    }
    let s = a.char_poly()?.squarefree_part();
    let deg = s.degree().unwrap_or(0);
    let semisimple = s.eval_matrix(&a)?.is_zero();
    // a certified root off the unit circle settles the question before the
    // exact test, whose intermediate coefficients grow like |root|^L
    let on_circle = match unit_circle_roots(&s) {
        Ok(RootsOnCircle::No) => return Ok(ElementClass::Loxodromic),
        Ok(RootsOnCircle::All) => Some(true),
        Err(_) => None,
    };
    let n = a.field().n() as u64;
    let bound = deg as u64 * intmath::totient(n);
    if let Some(orders) = root_of_unity_orders(&s, bound) {
        if !semisimple {
            return Ok(ElementClass::Parabolic);
        }
        let order = orders.iter().fold(1u64, |acc, &m| intmath::lcm(acc, m));
        return Ok(ElementClass::EllipticFinite { order });
    }
    match on_circle {
        Some(_) if semisimple => Ok(ElementClass::EllipticInfinite),
        Some(_) => Ok(ElementClass::Parabolic),
        None => Err(Error::Inconclusive("root isolation did not certify the eigenvalue moduli".into())),
    }
}

/// If every root of the squarefree polynomial `s` is a root of unity, the
/// orders m that occur. A root of unity of order m in an extension of degree
/// at most `bound` over Q has phi(m) <= bound, and phi(m) >= sqrt(m/2) limits
/// the search to m <= 2 bound^2.
fn root_of_unity_orders(s: &Poly, bound: u64) -> Option<Vec<u64>> {
    let deg = s.degree()?;
    let f = s.field();
    let mut found = 0usize;
    let mut orders = Vec::new();
    for m in 1..=2 * bound * bound {
        if intmath::totient(m) > bound {
            continue;
        }
        let phi = cyclotomic_polynomial(m as u32);
        let phi = Poly::new(f, phi.iter().map(|&c| CycElem::from_int(f, c)).collect());
        let g = s.gcd(&phi.rem(s));
        let gd = g.degree().unwrap_or(0);
        if gd > 0 {
            found += gd;
            orders.push(m);
            if found == deg {
                return Some(orders);
            }
        }
    }
    (found == deg).then_some(orders)
}

enum RootsOnCircle {
    All,
    No,
}

/// A disc with rational center and radius known to contain a root.
struct Disc {
    re: BigRational,
    im: BigRational,
    rad: BigRational,
}

impl Disc {
    fn center_abs_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    fn disjoint(&self, o: &Disc) -> bool {
        let dr = &self.re - &o.re;
        let di = &self.im - &o.im;
        let r = &self.rad + &o.rad;
        &dr * &dr + &di * &di > &r * &r
    }

    /// An enclosing disc of the image under z -> 1/conj(z); None when the disc meets 0.
    fn inverted(&self) -> Option<Disc> {
        let c2 = self.center_abs_sq();
        let r2 = &self.rad * &self.rad;
        if c2 <= r2 {
            return None;
        }
        let den = c2 - r2;
        Some(Disc { re: &self.re / &den, im: &self.im / &den, rad: &self.rad / &den })
    }
}

/// Simultaneous root approximation by the Aberth iteration.
fn aberth(coeffs: &[Complex64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    let lead = coeffs[d];
    let c: Vec<Complex64> = coeffs.iter().map(|x| x / lead).collect();
    let bound = 1.0 + c[..d].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(0.5 * bound, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64))
        .collect();
    let eval = |x: Complex64| {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for a in c.iter().rev() {
            dp = dp * x + p;
            p = p * x + a;
        }
        (p, dp)
    };
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..d).filter(|&j| j != i).map(|j| Complex64::one() / (z[i] - z[j])).sum();
            let step = ratio / (Complex64::one() - ratio * sum);
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn rat_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

/// Lower bound on the modulus of a complex ball.
fn abs_lower(b: &ComplexBall) -> BigRational {
    let part = |x: &numeric::Ball| {
        let lo = x.lower();
        let hi = x.upper();
        if lo.is_positive() {
            lo
        } else if hi.is_negative() {
            -hi
        } else {
            BigRational::zero()
        }
    };
    part(&b.re).max(part(&b.im))
}

/// Decides whether all roots of a squarefree polynomial lie on the unit circle.
///
/// Each approximate root c gets the disc of radius d |s(c)/s'(c)|, which is
/// known to contain a root. A disc lying off the circle proves a root off the
/// circle. If the discs are pairwise disjoint they hold exactly one root each,
/// and a disc whose inversion image meets no other disc holds a root fixed by
/// inversion, since the root set of an isometry's characteristic polynomial is
/// closed under z -> 1/conj(z).
fn unit_circle_roots(s: &Poly) -> Result<RootsOnCircle> {
    let d = s.degree().unwrap_or(0);
    if d == 0 {
        return Ok(RootsOnCircle::All);
    }
    let ds = s.derivative();
    for prec in [128u32, 256, 512] {
        let coeffs: Vec<ComplexBall> = s.coeffs().iter().map(|c| numeric::embed(c, prec)).collect();
        let dcoeffs: Vec<ComplexBall> = ds.coeffs().iter().map(|c| numeric::embed(c, prec)).collect();
        let approx: Vec<Complex64> = coeffs.iter().map(|b| {
            let (re, im) = b.to_f64();
            Complex64::new(re, im)
        }).collect();
        let roots = aberth(&approx);
        let horner = |cs: &[ComplexBall], x: &ComplexBall| {
            cs.iter().rev().fold(ComplexBall::zero(prec), |acc, c| acc.mul(x).add(c).round_to(prec))
        };
        let mut discs = Vec::with_capacity(d);
        let mut ok = true;
        for r in &roots {
            let (cre, cim) = (rat_from_f64(r.re), rat_from_f64(r.im));
            let x = ComplexBall::from_rationals(&cre, &cim, prec);
            let pv = horner(&coeffs, &x).abs_upper();
            let dv = abs_lower(&horner(&dcoeffs, &x));
            if dv.is_zero() {
                ok = false;
                break;
            }
            let rad = BigRational::from_integer(BigInt::from(d)) * pv / dv;
            discs.push(Disc { re: cre, im: cim, rad });
        }
        if !ok {
            continue;
        }
        for disc in &discs {
            let c2 = disc.center_abs_sq();
            let one = BigRational::one();
            let outer = &one + &disc.rad;
            if c2 > &outer * &outer {
                return Ok(RootsOnCircle::No);
            }
            if disc.rad < one {
                let inner = &one - &disc.rad;
                if c2 < &inner * &inner {
                    return Ok(RootsOnCircle::No);
                }
            }
        }
        let pairwise = (0..d).all(|i| (i + 1..d).all(|j| discs[i].disjoint(&discs[j])));
        if !pairwise {
            continue;
        }
        let fixed = (0..d).all(|i| {
            discs[i]
                .inverted()
                .is_some_and(|inv| (0..d).all(|j| j == i || inv.disjoint(&discs[j])))
        });
        if fixed {
            return Ok(RootsOnCircle::All);
        }
    }
    Err(Error::Inconclusive("root isolation did not certify the eigenvalue moduli".into()))
}

/// The field generated by |tr g|^2 over sampled group elements, described as
/// the fixed field of a subgroup of (Z/n)*.
#[derive(Clone, Debug, Serialize)]
pub struct TraceField {
    pub n: u32,
    pub degree: usize,
    pub descriptor: String,
    pub fixing: Vec<u64>,
    pub samples: usize,
    pub elements: usize,
}

/// How a computed trace field compares with the tabulated one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TraceFieldStatus {
    Matches,
    Exceeds,
    Below,
}

impl fmt::Display for TraceFieldStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TraceFieldStatus::Matches => "matches",
            TraceFieldStatus::Exceeds => "exceeds",
            TraceFieldStatus::Below => "below",
        };
        write!(f, "{s}")
    }
}

/// Degree of a descriptor such as "Q" or "Q(sqrt5)".
pub fn descriptor_degree(desc: &str) -> Option<usize> {
    if desc == "Q" {
        Some(1)
    } else if desc.starts_with("Q(sqrt") && desc.ends_with(')') {
        Some(2)
    } else {
        None
    }
}

impl TraceField {
    pub fn compare(&self, expected: &str) -> TraceFieldStatus {
        match descriptor_degree(expected) {
            Some(e) if self.degree > e => TraceFieldStatus::Exceeds,
            Some(e) if self.degree < e => TraceFieldStatus::Below,
            _ if self.descriptor == expected => TraceFieldStatus::Matches,
            _ => TraceFieldStatus::Exceeds,
        }
    }
}

/// All distinct products of at most `word_len` generators, as (word, matrix).
pub fn enumerate_elements(gens: &[MatC], word_len: usize) -> Vec<(Vec<usize>, MatC)> {
    let Some(first) = gens.first() else { return vec![] };
    let id = MatC::identity(first.field(), first.rows());
    let mut seen: HashSet<MatC> = HashSet::from([id.clone()]);
    let mut out = vec![(vec![], id)];
    let mut frontier: Vec<(Vec<usize>, MatC)> = out.clone();
    for _ in 0..word_len {
        let next: Vec<(Vec<usize>, MatC)> = frontier
            .par_iter()
            .flat_map_iter(|(w, m)| {
                gens.iter().enumerate().map(move |(i, g)| {
                    let mut w2 = w.clone();
                    w2.push(i + 1);
                    (w2, m.try_mul(g).expect("square generators"))
                })
            })
            .collect();
        frontier.clear();
        for (w, m) in next {
            if seen.insert(m.clone()) {
                frontier.push((w.clone(), m.clone()));
                out.push((w, m));
            }
        }
        if frontier.is_empty() {
            break;
        }
    }
    out
}

fn sqrt_conductor(d: u64) -> u64 {
    if d % 4 == 1 {
        d
    } else {
        4 * d
    }
}

fn is_squarefree(d: u64) -> bool {
    intmath::factorize(d).iter().all(|&(_, e)| e == 1)
}

/// Names the fixed field of `fixing` inside Q(zeta_n).
fn describe(field: &CycField, fixing: &[u64], degree: usize) -> String {
    let n = field.n() as u64;
    match degree {
        1 => "Q".to_string(),
        2 => {
            for d in (2..=4 * n).filter(|&d| is_squarefree(d) && n % sqrt_conductor(d) == 0) {
                let Ok(r) = CycElem::sqrt_rational(field, &BigRational::from_integer(BigInt::from(d))) else {
                    continue;
                };
                if fixing.iter().all(|&k| r.galois(k).is_ok_and(|g| g == r)) {
                    return format!("Q(sqrt{d})");
                }
            }
            format!("real quadratic subfield of Q(zeta_{n})")
        }
        _ => format!("degree {degree} subfield of Q(zeta_{n})"),
    }
}

/// Samples |tr g|^2 over products of at most `word_len` generators.
pub fn adjoint_trace_field(gens: &[MatC], word_len: usize) -> Result<TraceField> {
    let field = gens.first().ok_or_else(|| Error::DimensionMismatch("no generators".into()))?.field().clone();
    let elements = enumerate_elements(gens, word_len);
    let mut values: Vec<CycElem> = elements
        .par_iter()
        .map(|(_, m)| Ok(m.trace().norm_sq()))
        .collect::<Result<Vec<_>>>()?;
    let mut uniq: Vec<CycElem> = Vec::new();
    values.retain(|v| !v.is_rational());
    for v in values {
        if !uniq.contains(&v) {
            uniq.push(v);
        }
    }
    let n = field.n() as u64;
    let fixing: Vec<u64> = intmath::units(n)
        .into_par_iter()
        .filter(|&k| uniq.iter().all(|v| v.galois(k).is_ok_and(|g| &g == v)))
        .collect();
    let degree = (intmath::totient(n) as usize) / fixing.len().max(1);
    Ok(TraceField {
        n: field.n(),
        degree,
        descriptor: describe(&field, &fixing, degree),
        fixing,
        samples: uniq.len(),
        elements: elements.len(),
    })
}

/// Signatures of the Galois conjugate forms, one per class of (Z/n)* modulo sign.
#[derive(Clone, Debug, Serialize)]
pub struct Arithmeticity {
    pub arithmetic: bool,
    pub conjugate_signatures: BTreeMap<u64, Signature>,
    /// Representatives k outside the trace field's fixing group.
    pub nontrivial: Vec<u64>,
}

/// The lattice is arithmetic when its generators are integral and every
/// conjugate form H^sigma, for sigma nontrivial on the trace field, is definite.
pub fn arithmeticity(gens: &[MatC], form: &HermForm, tf: &TraceField) -> Result<Arithmeticity> {
    if !gens.iter().all(|g| g.is_integral()) {
        return Err(Error::IntegralityNotEstablished);
    }
    let n = form.field().n() as u64;
    let reps = intmath::units_mod_sign(n);
    let sigs: Vec<(u64, Signature)> = reps
        .par_iter()
        .map(|&k| form.galois(k).map(|f| (k, f.signature())))
        .collect::<Result<_>>()?;
    let nontrivial: Vec<u64> = reps
        .iter()
        .copied()
        .filter(|k| !tf.fixing.contains(k) && !tf.fixing.contains(&((n - k) % n.max(1))))
        .collect();
    let conjugate_signatures: BTreeMap<u64, Signature> = sigs.into_iter().collect();
    let arithmetic = nontrivial.iter().all(|k| conjugate_signatures[k].is_definite());
    Ok(Arithmeticity { arithmetic, conjugate_signatures, nontrivial })
}

/// Outcome of a catalog witness check.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessCheck {
    pub word: String,
    pub kind: String,
    pub expected: String,
    pub computed: String,
    pub holds: bool,
}

/// Checks the witness traces listed for the instance's family.
pub fn check_witnesses(inst: &GroupInstance) -> Result<Vec<WitnessCheck>> {
    inst.witnesses()
        .into_iter()
        .map(|w| {
            let tr = inst.word_matrix(&w.word)?.trace();
            let (kind, expr, computed) = match (&w.trace, &w.abs_trace_sq) {
                (Some(e), _) => ("trace", e, tr),
                (None, Some(e)) => ("abs_trace_sq", e, tr.norm_sq()),
                _ => return Err(Error::Catalog(format!("witness {} has no expected value", w.word))),
            };
            let expected = inst.eval(expr)?;
            Ok(WitnessCheck {
                word: w.word.clone(),
                kind: kind.to_string(),
                expected: expected.display_with_approx(),
                computed: computed.display_with_approx(),
                holds: expected == computed,
            })
        })
        .collect()
}

/// The full computed verdict for one instance.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub family: String,
    pub params: Vec<u32>,
    pub branch: String,
    pub signature: Signature,
    pub trace_field: TraceField,
    pub arithmetic: bool,
    pub conjugate_signatures: BTreeMap<u64, Signature>,
    pub cocompact: bool,
    pub cocompact_source: String,
    pub witnesses: Vec<WitnessCheck>,
}

impl Verdict {
    pub fn to_json(&self) -> serde_json::Value {
        let sigs: serde_json::Map<String, serde_json::Value> = self
            .conjugate_signatures
            .iter()
            .map(|(k, s)| (k.to_string(), serde_json::json!(s.as_array())))
            .collect();
        serde_json::json!({
            "family": self.family,
            "params": self.params,
            "branch": self.branch,
            "signature": self.signature.as_array(),
            "trace_field": self.trace_field.descriptor,
            "trace_field_degree": self.trace_field.degree,
            "arithmetic": self.arithmetic,
            "cocompact": self.cocompact,
            "cocompact_source": self.cocompact_source,
            "conjugate_signatures": sigs,
            "witnesses": self.witnesses,
        })
    }
}

/// Computes trace field, arithmeticity, cocompactness and witnesses.
///
/// For an arithmetic lattice the lattice is commensurable with the integral
/// points of a unitary group over an imaginary quadratic extension of the
/// trace field K; it is non-cocompact exactly when K = Q, as indefinite
/// Hermitian forms in three or more variables over an imaginary quadratic
/// field are isotropic, while for K != Q a definite conjugate makes the form
/// anisotropic. A non-arithmetic lattice is certified non-cocompact by a
/// parabolic element from its cusp record; otherwise the catalog value is used.
pub fn verdict(cat: &Catalog, inst: &GroupInstance, word_len: usize) -> Result<Verdict> {
    let gens = inst.matrices();
    let tf = adjoint_trace_field(&gens, word_len)?;
    let ar = arithmeticity(&gens, &inst.form, &tf)?;
    let (cocompact, source) = if ar.arithmetic {
        (tf.degree > 1, "trace field".to_string())
    } else if let Some(c) = cat.cusps.iter().find(|c| c.family == inst.family() && c.params == inst.params.to_list()) {
        let cusp_gens: Vec<MatC> = c.generators.iter().map(|&i| gens[i - 1].clone()).collect();
        let ev = WordEvaluator::new(&cusp_gens)?;
        let m = ev.eval(&parse_word(&c.translations[0].word)?)?;
        if classify_element(&m, &inst.form)? == ElementClass::Parabolic {
            (false, format!("parabolic element {}", c.translations[0].name))
        } else {
            (inst.cocompact.unwrap_or(true), "catalog".to_string())
        }
    } else {
        (inst.cocompact.unwrap_or(true), "catalog".to_string())
    };
    Ok(Verdict {
        family: inst.family().to_string(),
        params: inst.params.to_list(),
        branch: inst.branch.clone(),
        signature: inst.signature(),
        trace_field: tf,
        arithmetic: ar.arithmetic,
        conjugate_signatures: ar.conjugate_signatures,
        cocompact,
        cocompact_source: source,
        witnesses: check_witnesses(inst)?,
    })
}
