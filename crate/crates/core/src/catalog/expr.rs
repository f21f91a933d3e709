//! A small expression language for catalog entries.
//!
//! Grammar: `+ - * / ^` with the usual precedence, parentheses, rational
//! literals, identifiers bound in an environment, and the functions
//! `zeta(m)`, `zeta(m, a)` (exp(2 pi i a/m)), `sqrt(x)` for rational x,
//! `conj(x)`, `re(x)` and `lcm(a, b)` for integers. Built-in names are
//! `z = zeta(p)`, `w = zeta(q)`, `i = zeta(4)` and `omega = zeta(3)`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::cyclofield::{CycElem, CycField};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = chars[st..i].iter().collect();
            out.push(Tok::Num(t.parse().expect("digits")));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[st..i].iter().collect()));
        } else if "+-*/^(),".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Catalog(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

/// A value during evaluation: exact rationals stay rational until they meet a
/// field element, so integer arithmetic on parameters works without a field.
#[derive(Clone, Debug)]
pub enum Value {
    Rat(BigRational),
    Elem(CycElem),
}

impl Value {
    fn into_elem(self, f: &CycField) -> CycElem {
        match self {
            Value::Rat(q) => CycElem::from_rational(f, &q),
            Value::Elem(e) => e,
        }
    }

    fn as_rational(&self) -> Option<BigRational> {
        match self {
            Value::Rat(q) => Some(q.clone()),
            Value::Elem(e) => e.to_rational(),
        }
    }
}

/// Evaluation environment: a field, integer parameters and named elements.
#[derive(Clone, Debug)]
pub struct Env {
    field: CycField,
    ints: HashMap<String, i64>,
    vars: HashMap<String, CycElem>,
}

impl Env {
    pub fn new(field: &CycField) -> Self {
        Env { field: field.clone(), ints: HashMap::new(), vars: HashMap::new() }
    }

    pub fn field(&self) -> &CycField {
        &self.field
    }

    pub fn set_int(&mut self, name: &str, v: i64) {
        self.ints.insert(name.to_string(), v);
    }

    pub fn set(&mut self, name: &str, v: CycElem) {
        self.vars.insert(name.to_string(), v);
    }

    pub fn get(&self, name: &str) -> Option<&CycElem> {
        self.vars.get(name)
    }

    pub fn ints(&self) -> &HashMap<String, i64> {
        &self.ints
    }

    /// Evaluates `s` to a field element.
    pub fn eval(&self, s: &str) -> Result<CycElem> {
        Ok(self.eval_value(s)?.into_elem(&self.field))
    }

    /// Evaluates `s` to an integer (parameters and literals only).
    pub fn eval_int(&self, s: &str) -> Result<i64> {
        let v = self.eval_value(s)?;
        int_of(&v, s)
    }

    /// Evaluates and binds `name`.
    pub fn define(&mut self, name: &str, s: &str) -> Result<()> {
        let v = self.eval(s)?;
        self.set(name, v);
        Ok(())
    }

    fn eval_value(&self, s: &str) -> Result<Value> {
        let toks = tokenize(s)?;
        let mut p = Parser { toks: &toks, pos: 0, env: self, src: s };
        let v = p.expr()?;
        if p.pos != toks.len() {
            return Err(p.err("trailing input"));
        }
        Ok(v)
    }

    fn builtin(&self, name: &str) -> Result<Option<CycElem>> {
        let root = |m: i64| -> Result<CycElem> {
            CycElem::root_of_unity(&self.field, m as u32, 1).map_err(|e| Error::Catalog(format!("{name}: {e}")))
        };
        Ok(match name {
            "z" => Some(root(*self.ints.get("p").ok_or_else(|| Error::Catalog("z needs parameter p".into()))?)?),
            "w" => Some(root(*self.ints.get("q").ok_or_else(|| Error::Catalog("w needs parameter q".into()))?)?),
            "i" => Some(root(4)?),
            "omega" => Some(root(3)?),
            _ => None,
        })
    }
}

fn int_of(v: &Value, src: &str) -> Result<i64> {
    let q = v.as_rational().ok_or_else(|| Error::Catalog(format!("{src:?} is not rational")))?;
    if !q.is_integer() {
        return Err(Error::Catalog(format!("{src:?} is not an integer")));
    }
    q.to_integer().to_i64().ok_or_else(|| Error::Catalog(format!("{src:?} is too large")))
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    env: &'a Env,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Catalog(format!("{msg} in expression {:?}", self.src))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected {c:?}")))
        }
    }

    fn f(&self) -> &CycField {
        &self.env.field
    }

    fn binop(&self, a: Value, b: Value, op: char) -> Result<Value> {
        match (a, b) {
            (Value::Rat(x), Value::Rat(y)) => Ok(Value::Rat(match op {
                '+' => x + y,
                '-' => x - y,
                '*' => x * y,
                _ => {
                    if y.is_zero() {
                        return Err(Error::DivisionByZero);
                    }
                    x / y
                }
            })),
            (a, b) => {
                let (x, y) = (a.into_elem(self.f()), b.into_elem(self.f()));
                Ok(Value::Elem(match op {
                    '+' => &x + &y,
                    '-' => &x - &y,
                    '*' => &x * &y,
                    _ => x.try_div(&y)?,
                }))
            }
        }
    }

    fn expr(&mut self) -> Result<Value> {
        let mut v = self.term()?;
        loop {
            if self.eat('+') {
                let r = self.term()?;
                v = self.binop(v, r, '+')?;
            } else if self.eat('-') {
                let r = self.term()?;
                v = self.binop(v, r, '-')?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<Value> {
        let mut v = self.unary()?;
        loop {
            if self.eat('*') {
                let r = self.unary()?;
                v = self.binop(v, r, '*')?;
            } else if self.eat('/') {
                let r = self.unary()?;
                v = self.binop(v, r, '/')?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<Value> {
        if self.eat('-') {
            let v = self.unary()?;
            return self.binop(Value::Rat(BigRational::zero()), v, '-');
        }
        self.power()
    }

    fn power(&mut self) -> Result<Value> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.unary()?;
            let e = int_of(&e, self.src)?;
            return Ok(match base {
                Value::Rat(q) => {
                    if q.is_zero() && e < 0 {
                        return Err(Error::DivisionByZero);
                    }
                    let r = num_traits::pow::pow(q.clone(), e.unsigned_abs() as usize);
                    Value::Rat(if e < 0 { r.recip() } else { r })
                }
                Value::Elem(x) => Value::Elem(x.pow(e)?),
            });
        }
        Ok(base)
    }

    fn args(&mut self) -> Result<Vec<Value>> {
        self.expect('(')?;
        let mut out = vec![self.expr()?];
        while self.eat(',') {
            out.push(self.expr()?);
        }
        self.expect(')')?;
        Ok(out)
    }

    fn atom(&mut self) -> Result<Value> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Value::Rat(BigRational::from_integer(n)))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::Op('(')) {
                    let args = self.args()?;
                    return self.call(&name, args);
                }
                if let Some(v) = self.env.vars.get(&name) {
                    return Ok(Value::Elem(v.clone()));
                }
                if let Some(&v) = self.env.ints.get(&name) {
                    return Ok(Value::Rat(BigRational::from_integer(BigInt::from(v))));
                }
                match self.env.builtin(&name)? {
                    Some(v) => Ok(Value::Elem(v)),
                    None => Err(self.err(&format!("unknown name {name:?}"))),
                }
            }
            _ => Err(self.err("unexpected token")),
        }
    }

    fn call(&self, name: &str, args: Vec<Value>) -> Result<Value> {
        let arity = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(self.err(&format!("{name} expects {n} argument(s)")))
            }
        };
        match name {
            "zeta" => {
                if args.is_empty() || args.len() > 2 {
                    return Err(self.err("zeta expects 1 or 2 arguments"));
                }
                let m = int_of(&args[0], self.src)?;
                let a = if args.len() == 2 { int_of(&args[1], self.src)? } else { 1 };
                if m < 1 {
                    return Err(self.err("zeta order must be positive"));
                }
                CycElem::root_of_unity(self.f(), m as u32, a)
                    .map(Value::Elem)
                    .map_err(|e| Error::Catalog(format!("{e} in {:?}", self.src)))
            }
            "sqrt" => {
                arity(1)?;
                let q = args[0].as_rational().ok_or_else(|| self.err("sqrt of a non-rational"))?;
                CycElem::sqrt_rational(self.f(), &q)
                    .map(Value::Elem)
                    .map_err(|e| Error::Catalog(format!("{e} in {:?}", self.src)))
            }
            "conj" => {
                arity(1)?;
                Ok(match &args[0] {
                    Value::Rat(q) => Value::Rat(q.clone()),
                    Value::Elem(e) => Value::Elem(e.conj()),
                })
            }
            "re" => {
                arity(1)?;
                Ok(match &args[0] {
                    Value::Rat(q) => Value::Rat(q.clone()),
                    Value::Elem(e) => Value::Elem(e.re()),
                })
            }
            "lcm" => {
                arity(2)?;
                let a = int_of(&args[0], self.src)?;
                let b = int_of(&args[1], self.src)?;
                let l = num_integer::lcm(a.abs(), b.abs());
                Ok(Value::Rat(BigRational::from_integer(BigInt::from(l))))
            }
            _ => Err(self.err(&format!("unknown function {name:?}"))),
        }
    }
}

/// Evaluates an integer expression in the given parameters, without a field.
pub fn eval_int_expr(s: &str, params: &HashMap<String, i64>) -> Result<i64> {
    let mut env = Env::new(&CycField::new(1));
    for (k, v) in params {
        env.set_int(k, *v);
    }
    env.eval_int(s)
}

/// The sign-normalized rational `q` as a field element; convenience for tests.
pub fn rational(f: &CycField, a: i64, b: i64) -> CycElem {
    CycElem::from_rational(f, &BigRational::new(BigInt::from(a), BigInt::from(b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env12() -> Env {
        let mut e = Env::new(&CycField::new(12));
        e.set_int("p", 3);
        e
    }

    #[test]
    fn arithmetic_and_builtins() {
        let e = env12();
        let f = e.field().clone();
        assert_eq!(e.eval("z + z^2").unwrap(), CycElem::from_int(&f, -1));
        assert_eq!(e.eval("i^2").unwrap(), CycElem::from_int(&f, -1));
        assert_eq!(e.eval("sqrt(3)^2 - 3").unwrap(), CycElem::zero(&f));
        assert_eq!(e.eval("zeta(12) - zeta(12,5)").unwrap(), e.eval("sqrt(3)").unwrap());
        assert_eq!(e.eval("conj(omega)").unwrap(), e.eval("omega^2").unwrap());
        assert_eq!(e.eval("-2^2").unwrap(), CycElem::from_int(&f, -4));
        assert_eq!(e.eval("1/(z-1) * (z-1)").unwrap(), CycElem::one(&f));
        assert_eq!(e.eval_int("lcm(p, 4)").unwrap(), 12);
        assert_eq!(e.eval_int("(p+1)/2").unwrap(), 2);
    }

    #[test]
    fn definitions() {
        let mut e = env12();
        e.define("alpha", "1/(z-1)").unwrap();
        e.define("mu", "1+i").unwrap();
        let v = e.eval("mu*conj(z)*alpha").unwrap();
        let f = e.field().clone();
        let z = CycElem::root_of_unity(&f, 3, 1).unwrap();
        let mu = &CycElem::one(&f) + &CycElem::root_of_unity(&f, 4, 1).unwrap();
        assert_eq!(v, &(&mu * &z.conj()) / &(&z - &CycElem::one(&f)));
    }

    #[test]
    fn errors() {
        let e = env12();
        assert!(e.eval("foo").is_err());
        assert!(e.eval("1 +").is_err());
        assert!(e.eval("zeta(5)").is_err());
        assert!(e.eval("w").is_err());
        assert!(e.eval("1/0").is_err());
        assert!(e.eval("2 $ 3").is_err());
    }
}
