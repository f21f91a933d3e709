//! Family instantiation, candidate selection, kappa and catalog errors.

use num_bigint::BigInt;
use num_rational::BigRational;

use chl_core::catalog::{derive_g28_beta, g28_beta_squared, kappa, Catalog, Params, StratumData};
use chl_core::reflect::braid_length;
use chl_core::{CycElem, Error};

fn cat() -> &'static Catalog {
    Catalog::builtin()
}

fn q(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

#[test]
fn g29_instance() {
    let g = cat().instantiate("G29", &Params::P(3)).unwrap();
    assert_eq!(g.gens.len(), 4);
    assert_eq!(g.field.n(), 12);
    assert_eq!(g.signature().as_array(), [3, 1, 0]);
    assert_eq!(g.branch, "mu=1+i");
    let j = g.to_json();
    assert_eq!(j["signature"], serde_json::json!([3, 1, 0]));
    assert_eq!(j["generators"].as_array().unwrap().len(), 4);
}

#[test]
fn g30_generators_are_integral() {
    let g = cat().instantiate("G30", &Params::P(5)).unwrap();
    assert_eq!(g.field.n(), 5);
    assert!(g.is_integral());
}

#[test]
fn dm_braid_lengths() {
    let g = cat().instantiate("B4_34_DM", &Params::None).unwrap();
    let r = g.matrices();
    assert_eq!(r.len(), 4);
    assert_eq!(braid_length(&r[0], &r[1], 12).unwrap(), Some(4));
    assert_eq!(braid_length(&r[1], &r[2], 12).unwrap(), Some(3));
    assert_eq!(braid_length(&r[2], &r[3], 12).unwrap(), Some(3));
}

#[test]
fn candidates() {
    let c = cat().enumerate_candidates("G29", &Params::P(4)).unwrap();
    assert_eq!(c.len(), 2);
    let lower: Vec<[usize; 3]> = c.iter().map(|g| g.form.restrict(&[1, 2, 3]).signature().as_array()).collect();
    let plus = c.iter().position(|g| g.branch == "mu=1+i").unwrap();
    assert_eq!(lower[plus], [2, 1, 0]);
    assert_ne!(lower[1 - plus], [2, 1, 0]);

    let c = cat().enumerate_candidates("G33", &Params::P(3)).unwrap();
    assert_eq!(c.len(), 2);
    for g in &c {
        let s = g.signature().as_array();
        if g.branch == "lambda=-omega" {
            assert!(s[2] > 0);
        } else {
            assert_eq!(s, [4, 1, 0]);
        }
    }

    let c = cat().enumerate_candidates("G31", &Params::P(3)).unwrap();
    let minus = c.iter().find(|g| g.branch == "r=-exp(i pi/p)").unwrap();
    assert_eq!(minus.signature().as_array(), [4, 0, 0]);
}

#[test]
fn selection() {
    let s = cat().instantiate_with_report("G29", &Params::P(3)).unwrap();
    assert_eq!(s.chosen.branch, "mu=1+i");
    assert_eq!(s.reports.iter().filter(|r| r.passed).count(), 1);
    assert_eq!(cat().instantiate("G31", &Params::P(5)).unwrap().branch, "r=exp(i pi/p)");
    let g34 = cat().instantiate("G34", &Params::P(3)).unwrap();
    assert!(g34.branch.starts_with("H+"));
    assert_eq!(g34.form.restrict(&[0, 1, 2, 3, 4]).signature().as_array(), [4, 1, 0]);
    assert_eq!(g34.to_json()["branch_choices"]["lambda"], serde_json::json!(g34.eval("-conj(omega)").unwrap().to_string()));
}

#[test]
fn every_table_row_selects_exactly_one_candidate() {
    for row in &cat().table3 {
        let p = Params::from_list(&row.params).unwrap();
        let s = cat().instantiate_with_report(&row.family, &p).unwrap();
        assert_eq!(s.reports.iter().filter(|r| r.passed).count(), 1, "{} {p}", row.family);
    }
}

#[test]
fn kappa_values() {
    let cat = cat();
    let g29 = cat.strata_table("G29").unwrap();
    let l124 = g29.strata.iter().find(|s| s.name == "L124").unwrap();
    assert_eq!(kappa(l124, &[3]), q(1, 1));
    let b4 = cat.strata_table("B4").unwrap();
    let l234 = b4.strata.iter().find(|s| s.name == "L234").unwrap();
    assert_eq!(kappa(l234, &[3, 4]), q(1, 1));
    for s in b4.strata.iter() {
        assert_eq!(kappa(s, &[2, 2]), q(0, 1));
    }
    let l12345 = StratumData { name: "L12345".into(), counts: vec![45], codim: 5 };
    assert_eq!(kappa(&l12345, &[3]), q(3, 1));
}

#[test]
fn cusp_strata() {
    let names = |v: Vec<StratumData>| v.into_iter().map(|s| s.name).collect::<Vec<_>>();
    assert_eq!(names(cat().cusp_strata("G29", &Params::P(3)).unwrap()), ["L124"]);
    assert_eq!(names(cat().cusp_strata("B4", &Params::PQ(3, 4)).unwrap()), ["L234"]);
    assert_eq!(names(cat().cusp_strata("B4_34_DM", &Params::None).unwrap()), ["L234"]);
    // Evaluating the G29 table at p = 4 gives kappa = 1 on three orbits.
    assert_eq!(names(cat().cusp_strata("G29", &Params::P(4)).unwrap()), ["L24", "L123", "L12343"]);
}

#[test]
fn g28_beta() {
    let b = g28_beta_squared(2, 4).unwrap();
    assert_eq!(b.to_rational(), Some(q(1, 2)));
    let beta = derive_g28_beta(2, 4).unwrap();
    assert_eq!(&beta * &beta, b.lift(beta.field()).unwrap());
    assert!(matches!(g28_beta_squared(2, 1), Err(Error::DegenerateParameters(_))));
    assert!(matches!(derive_g28_beta(3, 4), Err(Error::BetaNotCyclotomic(_))));
}

#[test]
fn errors() {
    let c = cat();
    assert_eq!(c.instantiate("G99", &Params::P(3)).unwrap_err(), Error::UnknownFamily("G99".into()));
    assert!(matches!(c.instantiate("G29", &Params::P(7)), Err(Error::DisallowedParams { .. })));
    assert!(matches!(c.instantiate("G23", &Params::P(3)), Err(Error::MetadataOnlyFamily(_))));
    assert!(matches!(c.strata_table("G30"), Err(Error::NoStratumTable(_))));
    assert!(matches!(Catalog::from_json("{\"version\": 2}"), Err(Error::Catalog(_))));
}

#[test]
fn params_text() {
    for p in [Params::None, Params::P(3), Params::PQ(2, 12)] {
        assert_eq!(p.to_string().parse::<Params>().unwrap(), p);
    }
    assert!("a,b".parse::<Params>().is_err());
}

#[test]
fn expression_environment() {
    let g = cat().instantiate("G29", &Params::P(3)).unwrap();
    let alpha = g.eval("alpha").unwrap();
    let z = g.eval("z").unwrap();
    assert!((&alpha * &(&z - &CycElem::one(&g.field))).is_one());
    assert_eq!(g.eval("mu").unwrap(), g.eval("1+i").unwrap());
}
