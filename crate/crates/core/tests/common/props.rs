//! Randomized property checks shared by the property test target and the
//! acceptance harness. Each check runs `cases` random instances and returns
//! the first counterexample as an error message.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use chl_core::cusp::{heis_commutator, heis_mul, parabolic_decompose, BlockedForm, HeisElem};
use chl_core::reflect::reflection;
use chl_core::{CycElem, CycField, HermForm, MatC};

pub const CASES: u32 = 1000;

const FIELDS: [u32; 8] = [3, 4, 5, 7, 8, 9, 12, 15];

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn report<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

/// Raw coefficients: eight numerators and a common denominator.
fn raw_elem(range: i64) -> impl Strategy<Value = (Vec<i64>, i64)> {
    (prop::collection::vec(-range..=range, 8), 1i64..=4)
}

fn elem(f: &CycField, raw: &(Vec<i64>, i64)) -> CycElem {
    let d = BigInt::from(raw.1);
    let coeffs: Vec<BigRational> = raw
        .0
        .iter()
        .take(f.basis_dim())
        .map(|&c| BigRational::new(BigInt::from(c), d.clone()))
        .collect();
    CycElem::from_coeffs(f, &coeffs).expect("coefficient vector of the basis size")
}

fn check(cond: bool, what: &str) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(what.to_string()))
    }
}

/// Ring and field axioms, conjugation and Galois action in Q(zeta_n).
pub fn field_axioms(cases: u32) -> Result<(), String> {
    let strat = (prop::sample::select(FIELDS.to_vec()), raw_elem(6), raw_elem(6), raw_elem(6), 1u64..60);
    report(runner(cases).run(&strat, |(n, ra, rb, rc, k)| {
        let f = CycField::new(n);
        let (a, b, c) = (elem(&f, &ra), elem(&f, &rb), elem(&f, &rc));
        check(&(&a + &b) + &c == &a + &(&b + &c), "additive associativity")?;
        check(&a + &b == &b + &a, "additive commutativity")?;
        check(&(&a * &b) * &c == &a * &(&b * &c), "multiplicative associativity")?;
        check(&a * &b == &b * &a, "multiplicative commutativity")?;
        check(&a * &(&b + &c) == &(&a * &b) + &(&a * &c), "distributivity")?;
        check(&a - &a == CycElem::zero(&f), "additive inverse")?;
        check(&a * &CycElem::one(&f) == a, "multiplicative identity")?;
        if !a.is_zero() {
            check((&a * &a.inv().unwrap()).is_one(), "multiplicative inverse")?;
        }
        check((&a * &b).conj() == &a.conj() * &b.conj(), "conjugation is multiplicative")?;
        check(a.conj().conj() == a, "conjugation is an involution")?;
        check(a.norm_sq().is_real(), "norms are real")?;
        let k = (0..n as u64).map(|j| (k + j) % n as u64).find(|j| num_integer::gcd(*j, n as u64) == 1).unwrap();
        let ga = a.galois(k).unwrap();
        let gb = b.galois(k).unwrap();
        check((&a * &b).galois(k).unwrap() == &ga * &gb, "Galois action is multiplicative")?;
        check((&a + &b).galois(k).unwrap() == &ga + &gb, "Galois action is additive")?;
        check(a.conj().galois(k).unwrap() == ga.conj(), "Galois action commutes with conjugation")?;
        Ok(())
    }))
}

fn hermitian(f: &CycField, dim: usize, diag: &[i64], off: &[(Vec<i64>, i64)]) -> HermForm {
    let mut m = MatC::zeros(f, dim, dim);
    let mut next = 0;
    for i in 0..dim {
        m.set(i, i, CycElem::from_int(f, diag[i]));
        for j in (i + 1)..dim {
            let e = elem(f, &off[next]);
            next += 1;
            m.set(j, i, e.conj());
            m.set(i, j, e);
        }
    }
    HermForm::new(m).expect("Hermitian by construction")
}

fn square(f: &CycField, dim: usize, raw: &[(Vec<i64>, i64)]) -> MatC {
    MatC::from_fn(f, dim, dim, |i, j| elem(f, &raw[i * dim + j]))
}

/// Sylvester's law of inertia: P* H P has the signature of H for invertible P.
pub fn sylvester(cases: u32) -> Result<(), String> {
    let strat = (
        prop::sample::select(vec![4u32, 5, 12]),
        3usize..=4,
        prop::collection::vec(-4i64..=4, 4),
        prop::collection::vec(raw_elem(2), 6),
        prop::collection::vec(raw_elem(2), 16),
    );
    report(runner(cases).run(&strat, |(n, dim, diag, off, p)| {
        let f = CycField::new(n);
        let h = hermitian(&f, dim, &diag, &off);
        let p = square(&f, dim, &p);
        if p.det().map(|d| d.is_zero()).unwrap_or(true) {
            return Ok(());
        }
        let congruent = &(&p.conj_transpose() * h.mat()) * &p;
        let g = HermForm::new(congruent).unwrap();
        check(g.signature() == h.signature(), "signature changed under congruence")?;
        check(h.signature().dim() == dim, "signature counts add up to the dimension")
    }))
}

/// Reflections preserve their form, fix the mirror, scale the polar vector by
/// the multiplier and do not depend on the scaling of the polar vector.
pub fn reflections(cases: u32) -> Result<(), String> {
    let strat = (
        prop::collection::vec(-3i64..=3, 3),
        prop::collection::vec(raw_elem(2), 3),
        prop::collection::vec(raw_elem(2), 3),
        raw_elem(3),
        0i64..12,
        prop::collection::vec(raw_elem(2), 3),
    );
    report(runner(cases).run(&strat, |(diag, off, v, lambda, j, x)| {
        let f = CycField::new(12);
        let h = hermitian(&f, 3, &diag, &off);
        let v: Vec<CycElem> = v.iter().map(|r| elem(&f, r)).collect();
        if h.pairing(&v, &v).unwrap().is_zero() {
            return Ok(());
        }
        let z = CycElem::zeta_pow(&f, j);
        let r = reflection(&h, &v, &z).unwrap();
        let m = &r.matrix;
        check(&(&m.conj_transpose() * h.mat()) * m == *h.mat(), "form not preserved")?;
        let rv = m.mul_vec(&v).unwrap();
        check(rv == v.iter().map(|e| &z * e).collect::<Vec<_>>(), "polar vector not scaled by multiplier")?;
        let x: Vec<CycElem> = x.iter().map(|r| elem(&f, r)).collect();
        if h.pairing(&v, &x).unwrap().is_zero() {
            check(m.mul_vec(&x).unwrap() == x, "mirror vector moved")?;
        }
        let lambda = elem(&f, &lambda);
        if !lambda.is_zero() {
            let lv: Vec<CycElem> = v.iter().map(|e| &lambda * e).collect();
            let r2 = reflection(&h, &lv, &z).unwrap();
            check(r2.matrix == *m, "reflection depends on the scaling of the polar vector")?;
        }
        check(r.check_invariants(), "reflection invariants")
    }))
}

fn heis_form() -> BlockedForm {
    let f = CycField::new(12);
    let o = CycElem::one(&f);
    let z = CycElem::zero(&f);
    let two = CycElem::from_int(&f, 2);
    let c = CycElem::zeta(&f);
    let m = MatC::from_rows(
        &f,
        vec![
            vec![z.clone(), z.clone(), z.clone(), o.clone()],
            vec![z.clone(), two.clone(), c.clone(), z.clone()],
            vec![z.clone(), c.conj(), two, z.clone()],
            vec![o, z.clone(), z.clone(), z],
        ],
    )
    .unwrap();
    BlockedForm::new(&HermForm::new(m).unwrap()).unwrap()
}

fn heis(f: &BlockedForm, rot: i64, w: &[(Vec<i64>, i64)], t: (i64, i64)) -> HeisElem {
    let fld = f.field();
    let u = CycElem::zeta_pow(fld, rot);
    let b = MatC::identity(fld, 2).scale(&u);
    HeisElem {
        b,
        w: w.iter().map(|r| elem(fld, r)).collect(),
        t: CycElem::from_rational(fld, &BigRational::new(BigInt::from(t.0), BigInt::from(t.1))),
    }
}

/// Heisenberg group law: agreement with matrix multiplication, associativity,
/// centrality of vertical translations and the commutator formula.
pub fn heisenberg(cases: u32) -> Result<(), String> {
    let one_elem = || (0i64..12, prop::collection::vec(raw_elem(3), 2), (-6i64..=6, 1i64..=3));
    let strat = (one_elem(), one_elem(), one_elem(), (-6i64..=6, 1i64..=3));
    let f = heis_form();
    report(runner(cases).run(&strat, |(a, b, c, v)| {
        let a = heis(&f, a.0, &a.1, a.2);
        let b = heis(&f, b.0, &b.1, b.2);
        let c = heis(&f, c.0, &c.1, c.2);
        let ma = a.reassemble(&f).unwrap();
        let mb = b.reassemble(&f).unwrap();
        check(parabolic_decompose(&ma, &f).unwrap() == a, "decompose(reassemble) is not the identity")?;
        let ab = heis_mul(&a, &b, &f).unwrap();
        check(ab.reassemble(&f).unwrap() == &ma * &mb, "group law differs from matrix product")?;
        let left = heis_mul(&ab, &c, &f).unwrap();
        let right = heis_mul(&a, &heis_mul(&b, &c, &f).unwrap(), &f).unwrap();
        check(left == right, "associativity")?;
        let vert = heis(&f, 0, &[(vec![0; 8], 1), (vec![0; 8], 1)], v);
        check(
            heis_mul(&vert, &a, &f).unwrap() == heis_mul(&a, &vert, &f).unwrap(),
            "vertical translation is not central",
        )?;
        let ta = HeisElem::translation(&f, a.w.clone(), a.t.clone());
        let tb = HeisElem::translation(&f, b.w.clone(), b.t.clone());
        let comm = heis_commutator(&ta, &tb, &f).unwrap();
        let im = f.k_pairing(&ta.w, &tb.w).im().unwrap();
        check(comm == HeisElem::vertical(&f, &im + &im), "commutator formula")?;
        check(heis_mul(&a, &a.inverse().unwrap(), &f).unwrap() == HeisElem::identity(&f), "inverse")
    }))
}

/// Every square matrix satisfies its characteristic polynomial.
pub fn cayley_hamilton(cases: u32) -> Result<(), String> {
    let strat = (prop::sample::select(vec![3u32, 5, 8, 12]), 1usize..=4, prop::collection::vec(raw_elem(3), 16));
    report(runner(cases).run(&strat, |(n, dim, raw)| {
        let f = CycField::new(n);
        let a = square(&f, dim, &raw);
        let p = a.char_poly().unwrap();
        check(p.degree() == Some(dim), "degree of the characteristic polynomial")?;
        check(p.eval_matrix(&a).unwrap().is_zero(), "p(A) != 0")?;
        check(&p.coeffs()[dim - 1] == &-&a.trace(), "subleading coefficient is -trace")
    }))
}
