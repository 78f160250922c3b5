//! The depth ladder in closed form. Normal-ordering g^m tr^m collapses it to
//! a pure (Ncal, C) function; this module compares that ground truth with
//! the stated rising-factorial formula 4^{-m} ((C-Ncal+1)/2)_m ((C+Ncal-1)/2)_m
//! and with the falling-factorial variant
//! 4^m ((Ncal+C-1)/2)^(falling m) ((Ncal-C-1)/2)^(falling m),
//! reporting the exact ratio instead of presuming either.

use super::normal::{normalize, CurvatureClass};
use super::parse::parse;
use crate::exact::ncfun::NCFun;
use crate::exact::ncpoly::NCPoly;
use crate::exact::rational::{format_rational, rat, rat_i, Rational};
use num_traits::One;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct FunctionJson {
    pub num: String,
    pub den: String,
}

fn to_json(f: &NCFun) -> FunctionJson {
    FunctionJson { num: f.num().render(), den: f.den().render() }
}

#[derive(Debug, Clone, Serialize)]
pub struct PochhammerReport {
    pub m: u32,
    pub dim: u32,
    /// normalize("g^m tr^m"), the ground truth
    pub normalized: FunctionJson,
    /// the stated rising-factorial expression
    pub stated: FunctionJson,
    /// normalized / stated, canonical
    pub ratio: FunctionJson,
    /// "agree" | "constant_ratio" | "nonconstant_ratio"
    pub verdict: String,
    /// present when the ratio is a constant
    pub constant: Option<String>,
    /// whether the falling-factorial variant reproduces the ground truth
    pub falling_form_matches: bool,
}

/// prod_{j=0}^{m-1} (base + j)
fn rising(base: &NCPoly, m: u32) -> NCPoly {
    let mut acc = NCPoly::one();
    for j in 0..m {
        acc = acc.mul(&base.add(&NCPoly::constant(rat_i(j as i64))));
    }
    acc
}

/// prod_{j=0}^{m-1} (base - j)
fn falling(base: &NCPoly, m: u32) -> NCPoly {
    let mut acc = NCPoly::one();
    for j in 0..m {
        acc = acc.mul(&base.sub(&NCPoly::constant(rat_i(j as i64))));
    }
    acc
}

fn pow4(m: u32) -> Rational {
    let mut q = Rational::one();
    for _ in 0..m {
        q *= rat_i(4);
    }
    q
}

pub fn pochhammer_report(m: u32, dim: u32) -> PochhammerReport {
    assert!(m >= 1);
    let expr = parse(&format!("g^{m} tr^{m}")).unwrap();
    let nf = normalize(&expr, dim, CurvatureClass::Flat);
    assert_eq!(nf.monos.len(), 1, "g^m tr^m must collapse to a pure function");
    let truth = nf.monos.get(&(0, 0, 0, 0)).expect("pure function").clone();

    let half = rat(1, 2);
    // (C - Ncal + 1)/2 and (C + Ncal - 1)/2
    let base_minus = NCPoly::ccal()
        .sub(&NCPoly::ncal())
        .add(&NCPoly::one())
        .scale(&half);
    let base_plus = NCPoly::ccal()
        .add(&NCPoly::ncal())
        .sub(&NCPoly::one())
        .scale(&half);
    let stated = NCFun::from_poly(
        rising(&base_minus, m).mul(&rising(&base_plus, m)).scale(&pow4(m).recip()),
    );

    let ratio = truth.div(&stated).expect("stated formula is nonzero");
    let (verdict, constant) = match ratio.as_constant() {
        Some(q) if q.is_one() => ("agree".to_string(), Some(format_rational(&q))),
        Some(q) => ("constant_ratio".to_string(), Some(format_rational(&q))),
        None => ("nonconstant_ratio".to_string(), None),
    };

    // falling variant: 4^m ((Ncal+C-1)/2 falling)_m ((Ncal-C-1)/2 falling)_m
    let fbase_plus = NCPoly::ncal().add(&NCPoly::ccal()).sub(&NCPoly::one()).scale(&half);
    let fbase_minus = NCPoly::ncal().sub(&NCPoly::ccal()).sub(&NCPoly::one()).scale(&half);
    let fall = NCFun::from_poly(
        falling(&fbase_plus, m).mul(&falling(&fbase_minus, m)).scale(&pow4(m)),
    );
    let falling_form_matches = fall == truth;

    PochhammerReport {
        m,
        dim,
        normalized: to_json(&truth),
        stated: to_json(&stated),
        ratio: to_json(&ratio),
        verdict,
        constant,
        falling_form_matches,
    }
}
