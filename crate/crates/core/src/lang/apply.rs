//! Bridge from the abstract operator language to the concrete tensor
//! representation. Words apply right to left; spectral coefficients apply
//! through the depth decomposition.

use super::ast::{Expr, Gen};
use super::normal::{CurvatureClass, NormalForm};
use crate::depth::{apply_ncfun, apply_ncfun_allow_box, div_tilde, grad_tilde};
use crate::error::{Error, Result};
use crate::exact::ncfun::NCFun;
use crate::exact::ncpoly::NCPoly;
use crate::exact::rational::rat;
use crate::geometry::Geometry;
use crate::ops::{casimir_c, div, grad, lichnerowicz_box, op_g, op_n, op_tr};
use crate::tensor::SymTensorField;

pub fn geometry_class(geo: &Geometry) -> CurvatureClass {
    if geo.is_flat() {
        CurvatureClass::Flat
    } else {
        CurvatureClass::ConstantCurvature
    }
}

fn apply_gen(g: Gen, psi: &SymTensorField) -> Result<SymTensorField> {
    let n = psi.geometry().dim() as i64;
    Ok(match g {
        Gen::G => op_g(psi),
        Gen::Tr => op_tr(psi),
        Gen::BigN => op_n(psi),
        Gen::Grad => grad(psi),
        Gen::Div => div(psi),
        Gen::Gradt => grad_tilde(psi)?,
        Gen::Divt => div_tilde(psi)?,
        Gen::Box => lichnerowicz_box(psi),
        Gen::LittleC => casimir_c(psi),
        Gen::Ncal => op_n(psi).add(&psi.scale(&rat(n, 2))).expect("same geometry"),
        Gen::C => apply_ncfun(psi, &NCFun::from_poly(NCPoly::ccal()))?,
        Gen::Kappa => {
            let p = NCPoly::ncal()
                .sub(&NCPoly::ccal())
                .sub(&NCPoly::one())
                .scale(&rat(1, 2));
            apply_ncfun(psi, &NCFun::from_poly(p))?
        }
    })
}

/// Apply an operator expression to a tensor.
pub fn apply_expr(e: &Expr, psi: &SymTensorField) -> Result<SymTensorField> {
    match e {
        Expr::Rat(q) => Ok(psi.scale(q)),
        Expr::Gen(g) => apply_gen(*g, psi),
        Expr::Inv(p) => {
            let f = NCFun::from_poly(p.clone()).inv()?;
            apply_ncfun(psi, &f)
        }
        Expr::Pow(b, k) => {
            let mut acc = psi.clone();
            for _ in 0..*k {
                acc = apply_expr(b, &acc)?;
            }
            Ok(acc)
        }
        Expr::Mul(parts) => {
            let mut acc = psi.clone();
            for p in parts.iter().rev() {
                acc = apply_expr(p, &acc)?;
            }
            Ok(acc)
        }
        Expr::Sum(parts) => {
            let mut out = SymTensorField::zero(psi.geometry().clone());
            for (negated, p) in parts {
                let v = apply_expr(p, psi)?;
                out = if *negated { out.sub(&v)? } else { out.add(&v)? };
            }
            Ok(out)
        }
    }
}

/// Apply a normal form: per monomial, tr^d then divt^c, the central
/// coefficient spectrally (wave-operator powers as Lichnerowicz
/// applications), then gradt^b and g^a.
pub fn apply_normal_form(nf: &NormalForm, psi: &SymTensorField) -> Result<SymTensorField> {
    let geo = psi.geometry();
    if nf.dim as usize != geo.dim() || nf.class != geometry_class(geo) {
        return Err(Error::GeometryMismatch);
    }
    let mut out = SymTensorField::zero(geo.clone());
    for ((a, b, c, d), f) in &nf.monos {
        let mut cur = psi.clone();
        for _ in 0..*d {
            cur = op_tr(&cur);
        }
        for _ in 0..*c {
            cur = div_tilde(&cur)?;
        }
        cur = apply_ncfun_allow_box(&cur, f)?;
        for _ in 0..*b {
            cur = grad_tilde(&cur)?;
        }
        for _ in 0..*a {
            cur = op_g(&cur);
        }
        out = out.add(&cur)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::normal::normalize;
    use crate::lang::parse::parse;
    use crate::rng::SplitMix64;
    use crate::tensor::{make_tensor, random_tensor};
    use std::sync::Arc;

    fn flat(p: u32, q: u32) -> Arc<Geometry> {
        Arc::new(Geometry::flat(p, q).unwrap())
    }

    fn hyp(n: usize) -> Arc<Geometry> {
        Arc::new(Geometry::hyperbolic(n).unwrap())
    }

    #[test]
    fn tr_g_on_scalar() {
        let e3 = flat(3, 0);
        let one = make_tensor(e3.clone(), "1").unwrap();
        let expr = parse("tr g").unwrap();
        let direct = apply_expr(&expr, &one).unwrap();
        assert_eq!(direct, make_tensor(e3.clone(), "6").unwrap());
        let nf = normalize(&expr, 3, CurvatureClass::Flat);
        assert_eq!(apply_normal_form(&nf, &one).unwrap(), direct);
    }

    #[test]
    fn kappa_fixes_metric() {
        let e2 = flat(2, 0);
        let g = SymTensorField::metric_field(e2);
        let expr = parse("kappa").unwrap();
        assert_eq!(apply_expr(&expr, &g).unwrap(), g);
    }

    #[test]
    fn box_on_flat_scalar() {
        let e2 = flat(2, 0);
        let f = make_tensor(e2.clone(), "x1^2").unwrap();
        let expr = parse("box").unwrap();
        assert_eq!(apply_expr(&expr, &f).unwrap(), make_tensor(e2, "2").unwrap());
    }

    #[test]
    fn class_mismatch_rejected() {
        let e2 = flat(2, 0);
        let one = make_tensor(e2, "1").unwrap();
        let nf = normalize(&parse("g").unwrap(), 2, CurvatureClass::ConstantCurvature);
        assert_eq!(apply_normal_form(&nf, &one), Err(Error::GeometryMismatch));
    }

    #[test]
    fn adapted_gradient_equals_defining_combination() {
        let expr = parse("grad - g div inv(Ncal + C - 1)").unwrap();
        for geo in [flat(3, 0), hyp(3)] {
            for seed in 0..3u64 {
                let psi = random_tensor(geo.clone(), seed, 3, 1);
                assert_eq!(apply_expr(&expr, &psi).unwrap(), grad_tilde(&psi).unwrap());
            }
        }
    }

    fn random_word(rng: &mut SplitMix64) -> Expr {
        const ALPHABET: [Gen; 9] = [
            Gen::G,
            Gen::Tr,
            Gen::BigN,
            Gen::Gradt,
            Gen::Divt,
            Gen::Box,
            Gen::C,
            Gen::Kappa,
            Gen::LittleC,
        ];
        let len = 1 + rng.below(4) as usize;
        let mut parts = Vec::with_capacity(len);
        for _ in 0..len {
            parts.push(Expr::Gen(ALPHABET[rng.below(ALPHABET.len() as u64) as usize]));
        }
        Expr::Mul(parts)
    }

    #[test]
    fn normalization_preserves_action() {
        let mut rng = SplitMix64::new(0x5eed);
        let geos = [flat(2, 0), flat(1, 1), hyp(2), flat(3, 0), hyp(3)];
        let mut checked = 0u32;
        let mut skipped = 0u32;
        for trial in 0..50 {
            let word = random_word(&mut rng);
            let geo = &geos[trial % geos.len()];
            let psi = random_tensor(geo.clone(), 1000 + trial as u64, 3, 1);
            let nf = normalize(&word, geo.dim() as u32, geometry_class(geo));
            let direct = apply_expr(&word, &psi);
            let via_nf = apply_normal_form(&nf, &psi);
            match (direct, via_nf) {
                (Ok(a), Ok(b)) => {
                    assert_eq!(a, b, "word {word} disagreed on {:?}", geo.kind());
                    checked += 1;
                }
                (Err(Error::DenominatorSingularOnSpectrum { .. }), _)
                | (_, Err(Error::DenominatorSingularOnSpectrum { .. })) => {
                    skipped += 1;
                }
                (a, b) => panic!("unexpected outcome for {word}: {a:?} vs {b:?}"),
            }
        }
        assert!(checked >= 20, "only {checked} comparisons ran ({skipped} skipped)");
    }
}
