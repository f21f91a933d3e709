//! Complex reflections, braid relations and presentation checks.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::cyclofield::CycElem;
use crate::error::{Error, Result};
use crate::exactlin::{HermForm, MatC};

/// The reflection x -> x + (z - 1) (<x, v> / <v, v>) v.
#[derive(Clone, Debug)]
pub struct Reflection {
    pub matrix: MatC,
    pub polar: Vec<CycElem>,
    pub multiplier: CycElem,
    pub form: HermForm,
}

/// Builds the reflection with polar vector `v` and multiplier `z` for the form `h`.
pub fn reflection(h: &HermForm, v: &[CycElem], z: &CycElem) -> Result<Reflection> {
    let f = h.field();
    let vv = h.pairing(v, v)?;
    if vv.is_zero() {
        return Err(Error::IsotropicPolarVector);
    }
    if !z.norm_sq().is_one() {
        return Err(Error::NonUnitMultiplier);
    }
    let n = h.dim();
    // row vector v* H
    let vstar_h: Vec<CycElem> = (0..n)
        .map(|j| (0..n).fold(CycElem::zero(f), |acc, k| &acc + &(&v[k].conj() * h.mat().get(k, j))))
        .collect();
    let c = &(z - &CycElem::one(f)) / &vv;
    let matrix = MatC::from_fn(f, n, n, |i, j| {
        let base = if i == j { CycElem::one(f) } else { CycElem::zero(f) };
        &base + &(&(&c * &v[i]) * &vstar_h[j])
    });
    Ok(Reflection { matrix, polar: v.to_vec(), multiplier: z.clone(), form: h.clone() })
}

impl Reflection {
    /// Checks matrix* H matrix = H, det = z and rank(matrix - I) = 1.
    pub fn check_invariants(&self) -> bool {
        let m = &self.matrix;
        let h = self.form.mat();
        let preserves = &(&m.conj_transpose() * h) * m == *h;
        let n = m.rows();
        let moved = (m - &MatC::identity(m.field(), n)).rank();
        let det_ok = m.det().map(|d| d == self.multiplier).unwrap_or(false);
        preserves && det_ok && (moved == 1 || self.multiplier.is_one())
    }
}

/// Alternating product A B A ... with k factors.
pub fn alternating_product(a: &MatC, b: &MatC, k: usize) -> Result<MatC> {
    let mut acc = MatC::identity(a.field(), a.rows());
    for i in 0..k {
        acc = acc.try_mul(if i % 2 == 0 { a } else { b })?;
    }
    Ok(acc)
}

/// Whether the braid relation of length k holds: ABA... = BAB... (k factors each).
pub fn braid_holds(a: &MatC, b: &MatC, k: usize) -> Result<bool> {
    if !a.is_square() || a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch("braid relation needs square matrices of equal size".into()));
    }
    Ok(alternating_product(a, b, k)? == alternating_product(b, a, k)?)
}

/// The smallest k in 2..=k_max with a braid relation of length k.
pub fn braid_length(a: &MatC, b: &MatC, k_max: usize) -> Result<Option<usize>> {
    for k in 2..=k_max {
        if braid_holds(a, b, k)? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// A word in the generators: (0-based generator index, exponent +1 or -1).
pub type Word = Vec<(usize, i32)>;

/// A relation between words in the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Relation {
    /// The braid relation of length k between two words.
    Braid { a: Word, b: Word, k: usize },
    /// word^m = 1.
    Power { word: Word, m: usize },
    /// All listed words are equal.
    Equal(Vec<Word>),
}

/// Parses a word such as "1 2 -3" (1-based, negative for inverses).
pub fn parse_word(s: &str) -> Result<Word> {
    let bad = || Error::MalformedWord(s.to_string());
    let w: Word = s
        .split_whitespace()
        .map(|tok| {
            let v: i64 = tok.parse().map_err(|_| bad())?;
            if v == 0 {
                return Err(bad());
            }
            Ok(((v.unsigned_abs() - 1) as usize, if v < 0 { -1 } else { 1 }))
        })
        .collect::<Result<_>>()?;
    if w.is_empty() {
        return Err(bad());
    }
    Ok(w)
}

pub fn format_word(w: &Word) -> String {
    w.iter()
        .map(|&(g, e)| if e < 0 { format!("-{}", g + 1) } else { format!("{}", g + 1) })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Inverse word.
pub fn invert_word(w: &Word) -> Word {
    w.iter().rev().map(|&(g, e)| (g, -e)).collect()
}

impl Relation {
    /// Parses one relation line, resolving symbolic exponents such as "p"
    /// through `params`.
    pub fn parse_with(line: &str, params: &HashMap<String, i64>) -> Result<Relation> {
        let bad = || Error::MalformedWord(line.to_string());
        let (head, body) = line.split_once(':').ok_or_else(bad)?;
        let mut head = head.split_whitespace();
        let kind = head.next().ok_or_else(bad)?;
        let arg = head.next();
        if head.next().is_some() {
            return Err(bad());
        }
        let number = |a: Option<&str>| -> Result<usize> {
            let a = a.ok_or_else(bad)?;
            let v = match a.parse::<i64>() {
                Ok(v) => v,
                Err(_) => *params.get(a).ok_or_else(bad)?,
            };
            if v < 1 {
                return Err(bad());
            }
            Ok(v as usize)
        };
        match kind {
            "br" => {
                let k = number(arg)?;
                let (a, b) = if body.contains(',') {
                    let (x, y) = body.split_once(',').ok_or_else(bad)?;
                    (parse_word(x)?, parse_word(y)?)
                } else {
                    let toks: Vec<&str> = body.split_whitespace().collect();
                    if toks.len() != 2 {
                        return Err(bad());
                    }
                    (parse_word(toks[0])?, parse_word(toks[1])?)
                };
                Ok(Relation::Braid { a, b, k })
            }
            "pow" => Ok(Relation::Power { word: parse_word(body)?, m: number(arg)? }),
            "eq" => {
                if arg.is_some() {
                    return Err(bad());
                }
                let words = body.split('=').map(parse_word).collect::<Result<Vec<_>>>()?;
                if words.len() < 2 {
                    return Err(bad());
                }
                Ok(Relation::Equal(words))
            }
            _ => Err(bad()),
        }
    }

    /// Largest generator index used, plus one.
    pub fn generators_used(&self) -> usize {
        let words: Vec<&Word> = match self {
            Relation::Braid { a, b, .. } => vec![a, b],
            Relation::Power { word, .. } => vec![word],
            Relation::Equal(ws) => ws.iter().collect(),
        };
        words.iter().flat_map(|w| w.iter().map(|&(g, _)| g + 1)).max().unwrap_or(0)
    }
}

impl FromStr for Relation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Relation::parse_with(s, &HashMap::new())
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Braid { a, b, k } => {
                if a.len() == 1 && b.len() == 1 {
                    write!(f, "br {k}: {} {}", format_word(a), format_word(b))
                } else {
                    write!(f, "br {k}: {}, {}", format_word(a), format_word(b))
                }
            }
            Relation::Power { word, m } => write!(f, "pow {m}: {}", format_word(word)),
            Relation::Equal(ws) => {
                write!(f, "eq: {}", ws.iter().map(format_word).collect::<Vec<_>>().join(" = "))
            }
        }
    }
}

/// Parses a multi-line presentation, ignoring blank lines and '#' comments.
pub fn parse_presentation(text: &str, params: &HashMap<String, i64>) -> Result<Vec<Relation>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| Relation::parse_with(l, params))
        .collect()
}

/// Generators together with their inverses, for word evaluation.
pub struct WordEvaluator {
    gens: Vec<MatC>,
    invs: Vec<MatC>,
}

impl WordEvaluator {
    pub fn new(gens: &[MatC]) -> Result<Self> {
        let invs = gens.iter().map(|g| g.inv()).collect::<Result<Vec<_>>>()?;
        Ok(WordEvaluator { gens: gens.to_vec(), invs })
    }

    pub fn generators(&self) -> &[MatC] {
        &self.gens
    }

    pub fn inverses(&self) -> &[MatC] {
        &self.invs
    }

    pub fn eval(&self, w: &Word) -> Result<MatC> {
        let first = self.gens.first().ok_or_else(|| Error::MalformedWord("no generators".into()))?;
        let mut acc = MatC::identity(first.field(), first.rows());
        for &(g, e) in w {
            let m = if e > 0 { self.gens.get(g) } else { self.invs.get(g) };
            let m = m.ok_or_else(|| Error::MalformedWord(format!("generator {} out of range", g + 1)))?;
            acc = acc.try_mul(m)?;
        }
        Ok(acc)
    }
}

/// Outcome of checking a single relation.
#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub index: usize,
    pub relation: String,
    pub holds: bool,
    /// lhs - rhs for the first failing pair, as matrix JSON.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub difference: Option<serde_json::Value>,
}

/// Per-relation results in input order.
#[derive(Clone, Debug, Serialize)]
pub struct PresentationReport {
    pub checks: Vec<RelationCheck>,
    pub first_failure: Option<usize>,
}

impl PresentationReport {
    pub fn all_hold(&self) -> bool {
        self.first_failure.is_none()
    }
}

fn check_relation(ev: &WordEvaluator, rel: &Relation) -> Result<(bool, Option<MatC>)> {
    let pairs: Vec<(MatC, MatC)> = match rel {
        Relation::Braid { a, b, k } => {
            if a == b {
                return Err(Error::IdenticalGenerators);
            }
            let ma = ev.eval(a)?;
            let mb = ev.eval(b)?;
            vec![(alternating_product(&ma, &mb, *k)?, alternating_product(&mb, &ma, *k)?)]
        }
        Relation::Power { word, m } => {
            let w = ev.eval(word)?;
            let id = MatC::identity(w.field(), w.rows());
            vec![(w.pow(*m as i64)?, id)]
        }
        Relation::Equal(ws) => {
            let ms = ws.iter().map(|w| ev.eval(w)).collect::<Result<Vec<_>>>()?;
            ms.windows(2).map(|p| (p[0].clone(), p[1].clone())).collect()
        }
    };
    for (l, r) in pairs {
        if l != r {
            return Ok((false, Some(l.try_sub(&r)?)));
        }
    }
    Ok((true, None))
}

/// Checks every relation on the given generator matrices. Relations are
/// evaluated in parallel and reported in input order.
pub fn verify_presentation(gens: &[MatC], relations: &[Relation]) -> Result<PresentationReport> {
    let ev = WordEvaluator::new(gens)?;
    for r in relations {
        if r.generators_used() > gens.len() {
            return Err(Error::MalformedWord(format!("{r} uses more than {} generators", gens.len())));
        }
    }
    let results: Vec<Result<(bool, Option<MatC>)>> =
        relations.par_iter().map(|r| check_relation(&ev, r)).collect();
    let mut checks = Vec::with_capacity(relations.len());
    let mut first_failure = None;
    for (i, (rel, res)) in relations.iter().zip(results).enumerate() {
        let (holds, diff) = res?;
        if !holds && first_failure.is_none() {
            first_failure = Some(i);
        }
        checks.push(RelationCheck {
            index: i,
            relation: rel.to_string(),
            holds,
            difference: if first_failure == Some(i) { diff.map(|d| d.to_json_value()) } else { None },
        });
    }
    Ok(PresentationReport { checks, first_failure })
}
