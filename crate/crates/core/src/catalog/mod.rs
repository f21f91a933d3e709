//! Data-driven instantiation of the lattice families and their selection tests.

pub mod expr;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{classify_element, ElementClass};
use crate::cyclofield::{CycElem, CycField};
use crate::error::{Error, Result};
use crate::exactlin::{HermForm, MatC, Signature};
use crate::intmath;
use crate::reflect::{self, parse_word, reflection, Reflection, Relation};
pub use expr::Env;

const BUILTIN: &str = include_str!("../../data/catalog.json");

/// Family parameters: none, p, or (p, q).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Params {
    None,
    P(u32),
    PQ(u32, u32),
}

impl Params {
    pub fn from_list(v: &[u32]) -> Result<Params> {
        match v {
            [] => Ok(Params::None),
            [p] => Ok(Params::P(*p)),
            [p, q] => Ok(Params::PQ(*p, *q)),
            _ => Err(Error::Parse(format!("too many parameters: {v:?}"))),
        }
    }

    pub fn to_list(&self) -> Vec<u32> {
        match *self {
            Params::None => vec![],
            Params::P(p) => vec![p],
            Params::PQ(p, q) => vec![p, q],
        }
    }

    /// The integer bindings p (and q) used by catalog expressions.
    pub fn bindings(&self) -> BTreeMap<String, i64> {
        let mut m = BTreeMap::new();
        match *self {
            Params::None => {}
            Params::P(p) => {
                m.insert("p".into(), p as i64);
            }
            Params::PQ(p, q) => {
                m.insert("p".into(), p as i64);
                m.insert("q".into(), q as i64);
            }
        }
        m
    }

    pub fn p(&self) -> Option<u32> {
        match *self {
            Params::None => None,
            Params::P(p) | Params::PQ(p, _) => Some(p),
        }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Params::None => write!(f, "-"),
            Params::P(p) => write!(f, "{p}"),
            Params::PQ(p, q) => write!(f, "({p},{q})"),
        }
    }
}

impl FromStr for Params {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')').trim();
        if t.is_empty() || t == "-" {
            return Ok(Params::None);
        }
        let v = t
            .split(',')
            .map(|x| x.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad parameters {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Params::from_list(&v)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormSpec {
    #[serde(default)]
    pub diagonal: Option<Vec<String>>,
    pub entries: Vec<(usize, usize, String)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BranchSpec {
    pub name: String,
    pub defs: Vec<(String, String)>,
}

/// A candidate-selection test. Tests with a `params` list apply only to those parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SelectionTest {
    /// The principal sub-form on `indices` must have the given signature.
    SubblockSignature {
        indices: Vec<usize>,
        expect: [usize; 3],
        #[serde(default)]
        params: Option<Vec<Vec<u32>>>,
    },
    /// The sub-form on `indices` spans a stratum with `mirrors` mirrors of
    /// codimension `codim`; kappa > 1 requires signature (codim-1, 1), kappa < 1
    /// requires a definite block and kappa = 1 a degenerate one.
    KappaBlock {
        indices: Vec<usize>,
        mirrors: u32,
        codim: u32,
        #[serde(default)]
        params: Option<Vec<Vec<u32>>>,
    },
    /// Rejects a candidate in which the word is elliptic of infinite order.
    NotEllipticInfinite {
        word: String,
        #[serde(default)]
        params: Option<Vec<Vec<u32>>>,
    },
    /// For a cocompact lattice, rejects a candidate whose sub-form on `indices`
    /// is degenerate while the word is parabolic.
    CocompactParabolic {
        indices: Vec<usize>,
        word: String,
        #[serde(default)]
        params: Option<Vec<Vec<u32>>>,
    },
}

impl SelectionTest {
    fn applies(&self, params: &Params) -> bool {
        let filter = match self {
            SelectionTest::SubblockSignature { params, .. }
            | SelectionTest::KappaBlock { params, .. }
            | SelectionTest::NotEllipticInfinite { params, .. }
            | SelectionTest::CocompactParabolic { params, .. } => params,
        };
        filter.as_ref().is_none_or(|ps| ps.iter().any(|p| *p == params.to_list()))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessSpec {
    pub word: String,
    #[serde(default)]
    pub trace: Option<String>,
    #[serde(default)]
    pub abs_trace_sq: Option<String>,
    #[serde(default)]
    pub params: Option<Vec<Vec<u32>>>,
}

/// Static description of a family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilySpec {
    pub id: String,
    pub dim: usize,
    pub param_kind: String,
    pub allowed: Vec<Vec<u32>>,
    pub conductor: Vec<String>,
    pub mirror_orbits: u32,
    pub ring: String,
    pub defs: Vec<(String, String)>,
    pub branches: Vec<BranchSpec>,
    pub form: FormSpec,
    #[serde(default)]
    pub polar: Option<Vec<Vec<String>>>,
    pub multipliers: Vec<String>,
    pub relations: Vec<String>,
    pub selection: Vec<SelectionTest>,
    pub witnesses: Vec<WitnessSpec>,
}

impl FamilySpec {
    pub fn allowed_params(&self) -> Vec<Params> {
        self.allowed.iter().filter_map(|v| Params::from_list(v).ok()).collect()
    }
}

/// One row of the verdict table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Table3Row {
    pub family: String,
    pub params: Vec<u32>,
    pub cocompact: bool,
    pub arithmetic: bool,
    pub trace_field: String,
}

/// Metadata-only row for the two-dimensional families.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Table2dRow {
    pub family: String,
    pub params: Vec<u32>,
    pub cocompact: bool,
    pub arithmetic: bool,
}

/// A stratum: number of mirrors containing it per mirror orbit, and its codimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumData {
    pub name: String,
    pub counts: Vec<u32>,
    pub codim: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StratumTable {
    pub family: String,
    pub orbit_params: Vec<String>,
    pub strata: Vec<StratumData>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TranslationSpec {
    pub name: String,
    pub word: String,
    pub w: Vec<String>,
    pub t: String,
}

/// Data for one cusp: the family instance, the generators of the parabolic
/// stabilizer, an optional change of basis to the blocked form and the values
/// to be recovered.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CuspSpec {
    pub id: String,
    pub family: String,
    pub params: Vec<u32>,
    pub stratum: String,
    pub defs: Vec<(String, String)>,
    pub change_of_basis: Option<Vec<Vec<String>>>,
    pub adapted_form: Option<Vec<Vec<String>>>,
    pub generators: Vec<usize>,
    pub linear_parts: Vec<Vec<Vec<String>>>,
    pub translations: Vec<TranslationSpec>,
    pub vertical_generator: Option<String>,
    pub linear_part_order: usize,
    pub word_len: usize,
}

/// The whole declarative catalog.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Catalog {
    pub version: u32,
    pub embedding_k: u32,
    #[serde(default)]
    pub notes: Vec<String>,
    pub families: Vec<Arc<FamilySpec>>,
    pub table3: Vec<Table3Row>,
    pub table_2d: Vec<Table2dRow>,
    pub strata: Vec<StratumTable>,
    pub cusps: Vec<CuspSpec>,
}

/// A concrete member of a family with one resolution of its free parameters.
#[derive(Clone, Debug)]
pub struct GroupInstance {
    pub spec: Arc<FamilySpec>,
    pub params: Params,
    pub branch: String,
    pub branch_values: Vec<(String, CycElem)>,
    pub field: CycField,
    pub form: HermForm,
    pub gens: Vec<Reflection>,
    pub relations: Vec<Relation>,
    pub cocompact: Option<bool>,
    env: Env,
}

/// Why a candidate was kept or rejected.
#[derive(Clone, Debug, Serialize)]
pub struct CandidateReport {
    pub branch: String,
    pub signature: [usize; 3],
    pub passed: bool,
    pub reasons: Vec<String>,
}

/// The selected instance with the reports for all candidates.
#[derive(Clone, Debug)]
pub struct Selection {
    pub chosen: GroupInstance,
    pub reports: Vec<CandidateReport>,
}

impl Catalog {
    /// The catalog shipped with the library.
    pub fn builtin() -> &'static Catalog {
        static CAT: OnceLock<Catalog> = OnceLock::new();
        CAT.get_or_init(|| Catalog::from_json(BUILTIN).expect("built-in catalog parses"))
    }

    pub fn from_json(s: &str) -> Result<Catalog> {
        let c: Catalog = serde_json::from_str(s).map_err(|e| Error::Catalog(e.to_string()))?;
        if c.version != 1 {
            return Err(Error::Catalog(format!("unsupported catalog version {}", c.version)));
        }
        Ok(c)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Catalog> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::Catalog(format!("{}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    pub fn family(&self, id: &str) -> Result<&Arc<FamilySpec>> {
        if let Some(f) = self.families.iter().find(|f| f.id == id) {
            return Ok(f);
        }
        if self.table_2d.iter().any(|r| r.family == id) {
            return Err(Error::MetadataOnlyFamily(id.to_string()));
        }
        Err(Error::UnknownFamily(id.to_string()))
    }

    pub fn table3_row(&self, family: &str, params: &Params) -> Option<&Table3Row> {
        self.table3.iter().find(|r| r.family == family && r.params == params.to_list())
    }

    fn check_params(&self, spec: &FamilySpec, params: &Params) -> Result<()> {
        if spec.allowed.iter().any(|a| *a == params.to_list()) {
            Ok(())
        } else {
            Err(Error::DisallowedParams { family: spec.id.clone(), params: params.to_string() })
        }
    }

    /// The field of an instance: the lcm of the family's conductor terms.
    pub fn instance_field(&self, spec: &FamilySpec, params: &Params) -> Result<CycField> {
        let ints: std::collections::HashMap<String, i64> = params.bindings().into_iter().collect();
        let mut n: u64 = 1;
        for c in &spec.conductor {
            n = intmath::lcm(n, expr::eval_int_expr(c, &ints)? as u64);
        }
        CycField::with_embedding(n as u32, self.embedding_k)
    }

    /// Every branch resolution of the family's free parameters.
    pub fn enumerate_candidates(&self, family: &str, params: &Params) -> Result<Vec<GroupInstance>> {
        let spec = self.family(family)?.clone();
        self.check_params(&spec, params)?;
        let field = self.instance_field(&spec, params)?;
        let default_branch = [BranchSpec { name: "default".into(), defs: vec![] }];
        let branches: &[BranchSpec] = if spec.branches.is_empty() { &default_branch } else { &spec.branches };
        let cocompact = self.table3_row(family, params).map(|r| r.cocompact);
        branches
            .iter()
            .map(|b| build_instance(&spec, params, &field, b, cocompact))
            .collect()
    }

    /// Enumerates the candidates and applies the selection tests.
    pub fn instantiate(&self, family: &str, params: &Params) -> Result<GroupInstance> {
        Ok(self.instantiate_with_report(family, params)?.chosen)
    }

    pub fn instantiate_with_report(&self, family: &str, params: &Params) -> Result<Selection> {
        select_lattice_candidate(self.enumerate_candidates(family, params)?)
    }

    pub fn strata_table(&self, family: &str) -> Result<&StratumTable> {
        let key = if family == "B4_34_DM" { "B4" } else { family };
        self.strata
            .iter()
            .find(|t| t.family == key)
            .ok_or_else(|| Error::NoStratumTable(family.to_string()))
    }

    /// Strata with kappa_L = 1.
    pub fn cusp_strata(&self, family: &str, params: &Params) -> Result<Vec<StratumData>> {
        let table = self.strata_table(family)?;
        let params = if family == "B4_34_DM" { Params::PQ(3, 4) } else { params.clone() };
        let orders = params.to_list();
        if orders.len() != table.orbit_params.len() {
            return Err(Error::DisallowedParams { family: family.to_string(), params: params.to_string() });
        }
        Ok(table
            .strata
            .iter()
            .filter(|s| kappa(s, &orders).is_one())
            .cloned()
            .collect())
    }

    pub fn cusp(&self, id: &str) -> Result<&CuspSpec> {
        self.cusps.iter().find(|c| c.id == id).ok_or_else(|| Error::NoStratumTable(id.to_string()))
    }
}

/// kappa_L = sum over mirror orbits of count_i (1 - 2/p_i), divided by codim L.
pub fn kappa(stratum: &StratumData, orders: &[u32]) -> BigRational {
    let sum = stratum
        .counts
        .iter()
        .zip(orders)
        .fold(BigRational::zero(), |acc, (&c, &p)| {
            acc + BigRational::from_integer(BigInt::from(c))
                * (BigRational::one() - BigRational::new(BigInt::from(2), BigInt::from(p)))
        });
    sum / BigRational::from_integer(BigInt::from(stratum.codim))
}

/// kappa_L as an affine function of the inverse orders: constant + sum_i coeffs[i] / p_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaExpr {
    pub constant: BigRational,
    pub coeffs: Vec<BigRational>,
}

impl KappaExpr {
    pub fn eval(&self, orders: &[u32]) -> BigRational {
        self.coeffs.iter().zip(orders).fold(self.constant.clone(), |acc, (c, &p)| {
            acc + c / BigRational::from_integer(BigInt::from(p))
        })
    }

    /// Renders with the given parameter names, e.g. "3 - 2/p1 - 4/p2".
    pub fn render(&self, names: &[String]) -> String {
        let mut out = if self.constant.is_zero() { String::new() } else { self.constant.to_string() };
        for (c, name) in self.coeffs.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            let term = if mag.denom().is_one() {
                format!("{}/{name}", mag.numer())
            } else {
                format!("{}/({}{name})", mag.numer(), mag.denom())
            };
            if out.is_empty() {
                out = if sign == "-" { format!("-{term}") } else { term };
            } else {
                out = format!("{out} {sign} {term}");
            }
        }
        if out.is_empty() {
            "0".to_string()
        } else {
            out
        }
    }
}

/// kappa_L = sum_i count_i (1 - 2/p_i) / codim, in symbolic form.
pub fn kappa_symbolic(stratum: &StratumData) -> KappaExpr {
    let codim = BigRational::from_integer(BigInt::from(stratum.codim));
    let total: u32 = stratum.counts.iter().sum();
    KappaExpr {
        constant: BigRational::from_integer(BigInt::from(total)) / &codim,
        coeffs: stratum
            .counts
            .iter()
            .map(|&c| BigRational::from_integer(BigInt::from(-2 * c as i64)) / &codim)
            .collect(),
    }
}

fn build_instance(
    spec: &Arc<FamilySpec>,
    params: &Params,
    field: &CycField,
    branch: &BranchSpec,
    cocompact: Option<bool>,
) -> Result<GroupInstance> {
    let mut env = Env::new(field);
    for (k, v) in params.bindings() {
        env.set_int(&k, v);
    }
    let mut branch_values = Vec::new();
    for (name, e) in &branch.defs {
        env.define(name, e)?;
        branch_values.push((name.clone(), env.get(name).unwrap().clone()));
    }
    for (name, e) in &spec.defs {
        env.define(name, e)?;
    }
    let n = spec.dim;
    let mut h = MatC::identity(field, n);
    if let Some(d) = &spec.form.diagonal {
        if d.len() != n {
            return Err(Error::Catalog(format!("{}: diagonal has {} entries", spec.id, d.len())));
        }
        for (i, e) in d.iter().enumerate() {
            h.set(i, i, env.eval(e)?);
        }
    }
    for (i, j, e) in &spec.form.entries {
        let (i, j) = (i - 1, j - 1);
        if i >= n || j >= n || i == j {
            return Err(Error::Catalog(format!("{}: bad form entry ({}, {})", spec.id, i + 1, j + 1)));
        }
        let v = env.eval(e)?;
        h.set(j, i, v.conj());
        h.set(i, j, v);
    }
    let form = HermForm::new(h)?;
    let polars: Vec<Vec<CycElem>> = match &spec.polar {
        Some(rows) => rows
            .iter()
            .map(|r| r.iter().map(|e| env.eval(e)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?,
        None => (0..n)
            .map(|i| (0..n).map(|j| CycElem::from_int(field, (i == j) as i64)).collect())
            .collect(),
    };
    let mults: Vec<CycElem> = if spec.multipliers.len() == 1 {
        let m = env.eval(&spec.multipliers[0])?;
        vec![m; polars.len()]
    } else if spec.multipliers.len() == polars.len() {
        spec.multipliers.iter().map(|e| env.eval(e)).collect::<Result<_>>()?
    } else {
        return Err(Error::Catalog(format!("{}: multiplier count mismatch", spec.id)));
    };
    let gens = polars
        .iter()
        .zip(&mults)
        .map(|(v, z)| reflection(&form, v, z))
        .collect::<Result<Vec<_>>>()?;
    let ints: std::collections::HashMap<String, i64> = params.bindings().into_iter().collect();
    let relations = spec
        .relations
        .iter()
        .map(|r| Relation::parse_with(r, &ints))
        .collect::<Result<Vec<_>>>()?;
    Ok(GroupInstance {
        spec: spec.clone(),
        params: params.clone(),
        branch: branch.name.clone(),
        branch_values,
        field: field.clone(),
        form,
        gens,
        relations,
        cocompact,
        env,
    })
}

/// The unique candidate passing the family's selection tests.
pub fn select_lattice_candidate(cands: Vec<GroupInstance>) -> Result<Selection> {
    let Some(first) = cands.first() else {
        return Err(Error::NoCandidate("empty candidate list".into()));
    };
    let label = format!("{} {}", first.spec.id, first.params);
    let mut reports = Vec::new();
    let mut survivors = Vec::new();
    for c in cands {
        let (passed, reasons) = run_selection(&c)?;
        reports.push(CandidateReport {
            branch: c.branch.clone(),
            signature: c.form.signature().as_array(),
            passed,
            reasons,
        });
        if passed {
            survivors.push(c);
        }
    }
    match survivors.len() {
        0 => Err(Error::NoCandidate(label)),
        1 => Ok(Selection { chosen: survivors.pop().unwrap(), reports }),
        _ => Err(Error::AmbiguousSelection(label)),
    }
}

fn run_selection(c: &GroupInstance) -> Result<(bool, Vec<String>)> {
    let mut reasons = Vec::new();
    let mut ok = true;
    let sig = c.form.signature();
    if sig.is_hyperbolic() && sig.pos + 1 == c.spec.dim {
        reasons.push(format!("signature {sig} is hyperbolic"));
    } else {
        reasons.push(format!("signature {sig} is not ({},1,0)", c.spec.dim - 1));
        return Ok((false, reasons));
    }
    for t in c.spec.selection.iter().filter(|t| t.applies(&c.params)) {
        match t {
            SelectionTest::SubblockSignature { indices, expect, .. } => {
                let s = c.form.restrict(&zero_based(indices)).signature();
                let want = Signature::new(expect[0], expect[1], expect[2]);
                if s == want {
                    reasons.push(format!("block {indices:?} has signature {s}"));
                } else {
                    ok = false;
                    reasons.push(format!("block {indices:?} has signature {s}, expected {want}"));
                }
            }
            SelectionTest::KappaBlock { indices, mirrors, codim, .. } => {
                let p = c.params.p().ok_or_else(|| Error::Catalog("kappa test needs p".into()))?;
                let k = kappa(&StratumData { name: String::new(), counts: vec![*mirrors], codim: *codim }, &[p]);
                let s = c.form.restrict(&zero_based(indices)).signature();
                let good = if k > BigRational::one() {
                    s == Signature::new(indices.len() - 1, 1, 0)
                } else if k < BigRational::one() {
                    s.is_definite()
                } else {
                    s.is_degenerate()
                };
                ok &= good;
                reasons.push(format!(
                    "kappa = {k} on block {indices:?} with signature {s}: {}",
                    if good { "consistent" } else { "inconsistent" }
                ));
            }
            SelectionTest::NotEllipticInfinite { word, .. } => {
                let m = c.word_matrix(word)?;
                match classify_element(&m, &c.form) {
                    Ok(ElementClass::EllipticInfinite) => {
                        ok = false;
                        reasons.push(format!("word {word} is elliptic of infinite order"));
                    }
                    Ok(cls) => reasons.push(format!("word {word} is {cls}")),
                    Err(e) => {
                        ok = false;
                        reasons.push(format!("word {word}: {e}"));
                    }
                }
            }
            SelectionTest::CocompactParabolic { indices, word, .. } => {
                if c.cocompact != Some(true) {
                    continue;
                }
                let s = c.form.restrict(&zero_based(indices)).signature();
                if !s.is_degenerate() {
                    reasons.push(format!("block {indices:?} is nondegenerate"));
                    continue;
                }
                let m = c.word_matrix(word)?;
                match classify_element(&m, &c.form) {
                    Ok(ElementClass::Parabolic) => {
                        ok = false;
                        reasons.push(format!(
                            "block {indices:?} is degenerate and word {word} is parabolic, impossible in a cocompact lattice"
                        ));
                    }
                    Ok(cls) => reasons.push(format!("word {word} is {cls}")),
                    Err(e) => {
                        ok = false;
                        reasons.push(format!("word {word}: {e}"));
                    }
                }
            }
        }
    }
    Ok((ok, reasons))
}

fn zero_based(idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|i| i - 1).collect()
}

impl GroupInstance {
    pub fn family(&self) -> &str {
        &self.spec.id
    }

    pub fn matrices(&self) -> Vec<MatC> {
        self.gens.iter().map(|g| g.matrix.clone()).collect()
    }

    pub fn signature(&self) -> Signature {
        self.form.signature()
    }

    /// Evaluates a catalog expression in this instance's environment.
    pub fn eval(&self, e: &str) -> Result<CycElem> {
        self.env.eval(e)
    }

    pub fn env(&self) -> &Env {
        &self.env
    }

    /// Product of generators along a word such as "4 3 2" (1-based, negatives for inverses).
    pub fn word_matrix(&self, word: &str) -> Result<MatC> {
        let ev = reflect::WordEvaluator::new(&self.matrices())?;
        ev.eval(&parse_word(word)?)
    }

    pub fn verify_presentation(&self) -> Result<reflect::PresentationReport> {
        reflect::verify_presentation(&self.matrices(), &self.relations)
    }

    /// Witness words that apply to these parameters.
    pub fn witnesses(&self) -> Vec<&WitnessSpec> {
        self.spec
            .witnesses
            .iter()
            .filter(|w| w.params.as_ref().is_none_or(|ps| ps.iter().any(|p| *p == self.params.to_list())))
            .collect()
    }

    /// Whether every generator entry is an algebraic integer.
    pub fn is_integral(&self) -> bool {
        self.gens.iter().all(|g| g.matrix.is_integral())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let branch: serde_json::Map<String, serde_json::Value> = self
            .branch_values
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.to_string())))
            .collect();
        serde_json::json!({
            "family": self.spec.id,
            "params": self.params.to_list(),
            "field": self.field.n(),
            "embedding_k": self.field.embedding_k(),
            "branch": self.branch,
            "branch_choices": branch,
            "signature": self.signature().as_array(),
            "cocompact": self.cocompact,
            "form": self.form.mat().to_json_value(),
            "generators": self.gens.iter().map(|g| g.matrix.to_json_value()).collect::<Vec<_>>(),
            "relations": self.relations.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// beta^2 = (z+w)/(z+w-1-zw) in Q(zeta_lcm(p,q)).
pub fn g28_beta_squared(p: u32, q: u32) -> Result<CycElem> {
    let f = CycField::new(intmath::lcm(p as u64, q as u64) as u32);
    let z = CycElem::root_of_unity(&f, p, 1)?;
    let w = CycElem::root_of_unity(&f, q, 1)?;
    let s = &z + &w;
    if s.is_zero() {
        return Err(Error::DegenerateParameters(format!("z + w = 0 for (p,q) = ({p},{q})")));
    }
    let den = &(&s - &CycElem::one(&f)) - &(&z * &w);
    s.try_div(&den)
}

/// The conductor of Q(sqrt(r)) for a positive rational r.
fn sqrt_conductor(r: &BigRational) -> u64 {
    let (_, d, _) = intmath::squarefree_decomposition(&(r.numer() * r.denom()));
    let d: u64 = d.try_into().expect("small squarefree part");
    if d == 1 {
        1
    } else if d % 4 == 1 {
        d
    } else {
        4 * d
    }
}

/// The positive root beta of beta^2 = (z+w)/(z+w-1-zw), in the smallest
/// cyclotomic field containing it together with z and w.
pub fn derive_g28_beta(p: u32, q: u32) -> Result<CycElem> {
    let cat = Catalog::builtin();
    let spec = cat.family("G28")?;
    cat.check_params(spec, &Params::PQ(p, q))?;
    let b2 = g28_beta_squared(p, q)?;
    if let Some(r) = b2.to_rational() {
        if !r.is_positive() {
            return Err(Error::BetaNotCyclotomic(format!("beta^2 = {r} is not positive")));
        }
        let n = intmath::lcm(intmath::lcm(p as u64, q as u64), sqrt_conductor(&r));
        return CycElem::sqrt_rational(&CycField::new(n as u32), &r);
    }
    // beta^2 generates a real subfield; beta is cyclotomic only if Q(beta) is abelian.
    let f = b2.field().clone();
    let mut orbit: Vec<CycElem> = Vec::new();
    for k in f.galois_exponents() {
        let g = b2.galois(k)?;
        if !orbit.contains(&g) {
            orbit.push(g);
        }
    }
    if orbit.len() == 2 {
        // quadratic case: Q(beta) is Galois over Q iff the norm is a square or d times a square
        let norm = (&orbit[0] * &orbit[1]).to_rational().expect("norm of a quadratic element");
        let disc = (&orbit[0] - &orbit[1]).norm_sq().to_rational().expect("real discriminant");
        let is_sq = |x: &BigRational| {
            let (s, d, _) = intmath::squarefree_decomposition(&(x.numer() * x.denom()));
            s > 0 && d.is_one()
        };
        let galois = is_sq(&norm) || is_sq(&(&norm * &disc));
        let detail = format!("beta^2 = {} has norm {norm}", b2.to_poly_string());
        return Err(Error::BetaNotCyclotomic(if galois {
            format!("{detail}; Q(beta) is abelian but not constructed")
        } else {
            format!("{detail}, so Q(beta) is not Galois over Q")
        }));
    }
    Err(Error::BetaNotCyclotomic(format!("beta^2 = {} has degree {}", b2.to_poly_string(), orbit.len())))
}
