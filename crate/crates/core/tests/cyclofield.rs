//! Exact arithmetic, conjugation, Galois action and certified signs in Q(zeta_n).

use chl_core::catalog::Env;
use chl_core::{CycElem, CycField, Error};

fn env(n: u32) -> Env {
    Env::new(&CycField::new(n))
}

#[test]
fn small_identities() {
    let f3 = CycField::new(3);
    let z = CycElem::zeta(&f3);
    assert_eq!(&z + &z.pow(2).unwrap(), CycElem::from_int(&f3, -1));
    let f12 = CycField::new(12);
    let z3 = CycElem::zeta_pow(&f12, 3);
    assert_eq!(&z3 * &z3, CycElem::zeta_pow(&f12, 6));
    assert_eq!(&z3 * &z3, CycElem::from_int(&f12, -1));
}

#[test]
fn alpha_and_its_conjugate() {
    let f = CycField::new(3);
    let z = CycElem::zeta(&f);
    let one = CycElem::one(&f);
    let alpha = (&z - &one).inv().unwrap();
    assert!((&alpha * &(&z - &one)).is_one());
    assert_eq!(alpha.conj(), (&z.conj() - &one).inv().unwrap());
}

#[test]
fn conjugation() {
    let f = CycField::new(4);
    let i = CycElem::zeta(&f);
    assert_eq!(i.conj(), CycElem::zeta_pow(&f, 3));
    assert_eq!(i.conj(), -&i);
    let e = env(12);
    let s3 = e.eval("zeta(12) - zeta(12)^5").unwrap();
    assert_eq!(s3, e.eval("sqrt(3)").unwrap());
    assert_eq!(s3.conj(), s3);
}

#[test]
fn conjugation_fixes_exactly_the_numerically_real_elements() {
    let f = CycField::new(15);
    for a in -2i64..=2 {
        for b in -2i64..=2 {
            for c in -1i64..=1 {
                let x = CycElem::from_powers(&f, &[(a, 0), (b, 1), (c, 14)]);
                let (_, im) = x.to_f64();
                assert_eq!(x.conj() == x, im.abs() < 1e-12, "{x}");
                assert_eq!(x.is_real(), im.abs() < 1e-12);
            }
        }
    }
}

#[test]
fn galois_action_on_square_roots() {
    let e = env(12);
    let s3 = e.eval("sqrt(3)").unwrap();
    assert_eq!(s3.galois(5).unwrap(), -&s3);
    let e10 = env(10);
    let s5 = e10.eval("sqrt(5)").unwrap();
    assert_eq!(s5.galois(3).unwrap(), -&s5);
    let x = e.eval("2 + zeta(12)^3 - zeta(12)/7").unwrap();
    assert_eq!(x.galois(1).unwrap(), x);
}

#[test]
fn certified_signs() {
    let e5 = env(5);
    assert_eq!(e5.eval("2 - (1+sqrt(5))/2").unwrap().real_sign().unwrap(), 1);
    let e = env(12);
    let a = e.eval("2 + sqrt(3)").unwrap();
    assert_eq!(a.real_sign().unwrap(), 1);
    assert_eq!(a.galois(5).unwrap().real_sign().unwrap(), 1);
    let four = CycElem::from_int(a.field(), 4);
    assert_eq!((&a - &four).real_sign().unwrap(), -1);
    assert_eq!(CycElem::zero(a.field()).real_sign().unwrap(), 0);
    assert_eq!(CycElem::zeta(a.field()).real_sign().unwrap_err(), Error::NotReal);
    // Convergents of sqrt(2) bracket it closely from both sides.
    let e8 = env(8);
    assert_eq!(e8.eval("sqrt(2) - 99/70").unwrap().real_sign().unwrap(), -1);
    assert_eq!(e8.eval("sqrt(2) - 1393/985").unwrap().real_sign().unwrap(), 1);
}

#[test]
fn numeric_embedding() {
    let f4 = CycField::new(4);
    let b = CycElem::zeta(&f4).embed_numeric(128);
    let (re, im) = b.to_f64();
    assert!(re.abs() < 1e-30 && (im - 1.0).abs() < 1e-15);
    let f12 = CycField::new(12);
    let z = CycElem::zeta(&f12);
    let v = &(&z.pow(2).unwrap() + &z) + &CycElem::one(&f12);
    let (re, im) = v.embed_numeric(128).to_f64();
    let direct = (1.0 + (std::f64::consts::PI / 6.0).cos() + (std::f64::consts::PI / 3.0).cos(), (std::f64::consts::PI / 6.0).sin() + (std::f64::consts::PI / 3.0).sin());
    assert!((re - direct.0).abs() < 1e-14 && (re - 1.5 - 3f64.sqrt() / 2.0).abs() < 1e-14);
    assert!((im - direct.1).abs() < 1e-14 && (im - (3f64.sqrt() + 1.0) / 2.0).abs() < 1e-14);
    let zero = CycElem::zero(&f12).embed_numeric(128);
    assert!(zero.contains_zero());
    assert_eq!(zero.re.mid, 0.into());
    assert_eq!(zero.re.rad, 0.into());
}

#[test]
fn errors() {
    let f = CycField::new(12);
    assert_eq!(CycElem::zero(&f).inv().unwrap_err(), Error::DivisionByZero);
    let g = CycField::new(5);
    assert_eq!(CycElem::one(&f).try_add(&CycElem::one(&g)).unwrap_err(), Error::IncompatibleFields(12, 5));
    assert!(matches!(CycElem::one(&f).galois(2), Err(Error::InvalidAutomorphism { k: 2, n: 12 })));
}

#[test]
fn text_round_trip() {
    let e = env(12);
    let x = e.eval("(1 + sqrt(3))/5 - 2*i").unwrap();
    let back: CycElem = x.to_string().parse().unwrap();
    assert_eq!(back, x);
    assert!(x.display_with_approx().contains("approx"));
}

#[test]
fn lifting_between_fields() {
    let e3 = env(3);
    let w = e3.eval("zeta(3)").unwrap();
    let f12 = CycField::new(12);
    let lifted = w.lift(&f12).unwrap();
    assert_eq!(lifted, CycElem::zeta_pow(&f12, 4));
    assert!(CycElem::zeta(&f12).lift(&CycField::new(3)).is_err());
}
