//! The flat-space detour operator
//!
//!   G = box - grad div + 1/2 (grad^2 tr + g div^2) - 1/2 g (box + 1/2 grad div) tr
//!
//! which generates the massless field equations for every rank at once: box
//! on scalars, the Maxwell operator box - grad div on rank one, the
//! linearized Einstein operator on rank two.
//!
//! Commuting everything to the right with the flat relations gives
//!
//!   G grad = 1/2 grad^3 tr - 3/4 g grad box tr - 1/4 g grad^2 div tr
//!   div G  = 1/2 g div^3  - 3/4 g box div tr  - 1/4 g grad div^2 tr
//!
//! so gauge invariance holds exactly for trace-free gauge parameters of any
//! rank, and the divergence identity div G = 0 holds identically through
//! rank two (every obstruction needs div^3 or a trace). The report measures
//! these boundaries on random fields rather than asserting them blindly.

use std::sync::Arc;

use serde::Serialize;

use crate::depth::trace_decompose;
use crate::error::{Error, Result};
use crate::exact::rational::{rat, rat_i};
use crate::exact::LaurentPoly;
use crate::geometry::Geometry;
use crate::ops::{div, grad, lichnerowicz_box, op_g, op_tr};
use crate::tensor::{random_tensor, SymTensorField};

pub fn detour_operator(psi: &SymTensorField) -> Result<SymTensorField> {
    if !psi.geometry().is_flat() {
        return Err(Error::FlatOnly);
    }
    let half = rat(1, 2);
    let tr_psi = op_tr(psi);
    let mut out = lichnerowicz_box(psi);
    out = out.sub(&grad(&div(psi))).unwrap();
    out = out.add(&grad(&grad(&tr_psi)).scale(&half)).unwrap();
    out = out.add(&op_g(&div(&div(psi))).scale(&half)).unwrap();
    out = out.sub(&op_g(&lichnerowicz_box(&tr_psi)).scale(&half)).unwrap();
    out = out.sub(&op_g(&grad(&div(&tr_psi))).scale(&rat(1, 4))).unwrap();
    Ok(out)
}

/// G(grad xi); identically zero exactly when xi is an admissible gauge
/// parameter.
pub fn gauge_invariance_check(xi: &SymTensorField) -> Result<SymTensorField> {
    detour_operator(&grad(xi))
}

#[derive(Debug, Clone)]
pub struct BianchiResiduals {
    /// div G psi
    pub plain: SymTensorField,
    /// (div - 1/2 grad tr) G psi
    pub trace_corrected: SymTensorField,
}

pub fn bianchi_check(psi: &SymTensorField) -> Result<BianchiResiduals> {
    let gpsi = detour_operator(psi)?;
    let plain = div(&gpsi);
    let trace_corrected = plain.sub(&grad(&op_tr(&gpsi)).scale(&rat(1, 2))).unwrap();
    Ok(BianchiResiduals { plain, trace_corrected })
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualLine {
    pub class: String,
    pub candidate: String,
    pub trials: u32,
    pub zero: u32,
    pub nonzero: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct DetourReport {
    pub dim: u32,
    pub signature: [u32; 2],
    pub seed: u64,
    pub trials_per_class: u32,
    pub gauge: Vec<ResidualLine>,
    pub bianchi: Vec<ResidualLine>,
}

fn leading_monomial(geo: &Arc<Geometry>, rank: u32) -> SymTensorField {
    let n = geo.dim();
    let mut u = vec![0u32; n];
    u[0] = rank;
    SymTensorField::monomial(geo.clone(), u, LaurentPoly::constant(n, rat_i(1)))
}

fn traceless_part(t: &SymTensorField, s: u32) -> SymTensorField {
    trace_decompose(t)
        .unwrap()
        .components
        .iter()
        .find(|c| c.s == s && c.k == 0)
        .map(|c| c.phi.clone())
        .unwrap_or_else(|| SymTensorField::zero(t.geometry().clone()))
}

/// x1^3 monomial; the residuals that distinguish the candidate identities
/// carry up to three derivatives of the sample's trace part, so every
/// traceful sample deliberately keeps a coefficient of degree three alive.
fn cubic_coeff(geo: &Arc<Geometry>) -> LaurentPoly {
    let n = geo.dim();
    let mut x = vec![0i32; n];
    x[0] = 3;
    LaurentPoly::monomial(n, x, rat_i(1))
}

/// One constraint-class sample per trial: a random field of the class, built
/// from the seeded stream.
fn class_sample(geo: &Arc<Geometry>, class: &str, seed: u64) -> SymTensorField {
    let rank: u32 = match class {
        "scalar" => 0,
        "rank1" => 1,
        "rank2_traceless" | "rank2_traceful" => 2,
        "rank3_traceless" | "rank3_traceful" => 3,
        other => unreachable!("unknown sample class {other}"),
    };
    let mut t = random_tensor(geo.clone(), seed, rank, 4).rank_part(rank);
    if t.is_zero() {
        // the stream may leave a rank slot empty; fall back to a monomial
        t = leading_monomial(geo, rank);
    }
    match class {
        "scalar" | "rank1" => t,
        "rank2_traceless" | "rank3_traceless" => {
            let tf = traceless_part(&t, rank);
            if tf.is_zero() {
                // u1^rank always has a nonzero trace-free slice
                traceless_part(&leading_monomial(geo, rank), rank)
            } else {
                tf
            }
        }
        "rank2_traceful" => {
            // trace part g*w with a genuinely position-dependent scalar w
            let tf = class_sample(geo, "rank2_traceless", seed);
            let mut w = random_tensor(geo.clone(), seed ^ 0xD17A, 0, 4).rank_part(0);
            w = w
                .add(&SymTensorField::scalar(geo.clone(), cubic_coeff(geo)))
                .unwrap();
            tf.add(&op_g(&w)).unwrap()
        }
        "rank3_traceful" => {
            let tf = class_sample(geo, "rank3_traceless", seed);
            let mut v = random_tensor(geo.clone(), seed ^ 0x3F1E, 1, 4).rank_part(1);
            let mut u = vec![0u32; geo.dim()];
            u[0] = 1;
            v = v
                .add(&SymTensorField::monomial(geo.clone(), u, cubic_coeff(geo)))
                .unwrap();
            tf.add(&op_g(&v)).unwrap()
        }
        other => unreachable!("unknown sample class {other}"),
    }
}

pub fn detour_report(geo: &Arc<Geometry>, seed: u64, trials: u32) -> Result<DetourReport> {
    if !geo.is_flat() {
        return Err(Error::FlatOnly);
    }
    let classes = [
        "scalar",
        "rank1",
        "rank2_traceless",
        "rank2_traceful",
        "rank3_traceless",
        "rank3_traceful",
    ];
    let mut gauge = Vec::new();
    let mut bianchi = Vec::new();
    for class in classes {
        let mut gz = 0u32;
        let mut gn = 0u32;
        let mut bz = [0u32; 2];
        let mut bn = [0u32; 2];
        for t in 0..trials {
            let sample = class_sample(geo, class, seed ^ (t as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let res = gauge_invariance_check(&sample)?;
            if res.is_zero() {
                gz += 1;
            } else {
                gn += 1;
            }
            let b = bianchi_check(&sample)?;
            for (i, r) in [&b.plain, &b.trace_corrected].into_iter().enumerate() {
                if r.is_zero() {
                    bz[i] += 1;
                } else {
                    bn[i] += 1;
                }
            }
        }
        gauge.push(ResidualLine {
            class: class.into(),
            candidate: "G grad".into(),
            trials,
            zero: gz,
            nonzero: gn,
        });
        for (i, cand) in ["div G", "(div - 1/2 grad tr) G"].into_iter().enumerate() {
            bianchi.push(ResidualLine {
                class: class.into(),
                candidate: cand.into(),
                trials,
                zero: bz[i],
                nonzero: bn[i],
            });
        }
    }
    let (p, q) = geo.signature();
    Ok(DetourReport {
        dim: geo.dim() as u32,
        signature: [p, q],
        seed,
        trials_per_class: trials,
        gauge,
        bianchi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{normalize, ord_degree, parse, CurvatureClass, OrdDegree};
    use crate::ops::op_n;

    fn flats() -> Vec<Arc<Geometry>> {
        vec![
            Arc::new(Geometry::flat(2, 0).unwrap()),
            Arc::new(Geometry::flat(1, 1).unwrap()),
            Arc::new(Geometry::flat(3, 0).unwrap()),
            Arc::new(Geometry::flat(2, 1).unwrap()),
            Arc::new(Geometry::flat(4, 0).unwrap()),
        ]
    }

    #[test]
    fn wave_operator_on_scalars() {
        for geo in flats() {
            let phi = random_tensor(geo.clone(), 11, 0, 3);
            let lhs = detour_operator(&phi).unwrap();
            assert_eq!(lhs, lichnerowicz_box(&phi));
        }
    }

    #[test]
    fn maxwell_operator_on_rank_one() {
        for geo in flats() {
            for seed in [1u64, 2, 3] {
                let a = random_tensor(geo.clone(), seed, 1, 3).rank_part(1);
                let lhs = detour_operator(&a).unwrap();
                let rhs = lichnerowicz_box(&a).sub(&grad(&div(&a))).unwrap();
                assert_eq!(lhs, rhs);
                // the Maxwell divergence identity
                assert!(div(&lhs).is_zero());
            }
        }
    }

    #[test]
    fn gauge_invariance_through_rank_one() {
        for geo in flats() {
            for seed in [4u64, 5] {
                let xi = random_tensor(geo.clone(), seed, 0, 3);
                assert!(gauge_invariance_check(&xi).unwrap().is_zero());
                let xi = random_tensor(geo.clone(), seed, 1, 3).rank_part(1);
                assert!(gauge_invariance_check(&xi).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn rank_is_preserved() {
        let geo = Arc::new(Geometry::flat(3, 0).unwrap());
        for rank in 0..=3u32 {
            let psi = random_tensor(geo.clone(), 7 + rank as u64, rank, 2).rank_part(rank);
            if psi.is_zero() {
                continue;
            }
            let out = detour_operator(&psi).unwrap();
            // N eigenvalue check: every term of G psi has the same rank
            assert_eq!(op_n(&out), out.scale(&rat_i(rank as i64)));
        }
    }

    #[test]
    fn curved_background_rejected() {
        let geo = Arc::new(Geometry::hyperbolic(2).unwrap());
        let phi = SymTensorField::scalar(geo.clone(), LaurentPoly::constant(geo.dim(), rat_i(1)));
        assert!(matches!(detour_operator(&phi), Err(Error::FlatOnly)));
    }

    // The same operator written in the expression language: second order in
    // the grading that counts gradients, divergences, and two per wave
    // operator.
    #[test]
    fn expression_form_is_second_order_and_matches() {
        let text = "box - grad div + 1/2 grad^2 tr + 1/2 g div^2 - 1/2 g box tr - 1/4 g grad div tr";
        let e = parse(text).unwrap();
        for n in [2u32, 3, 4] {
            let nf = normalize(&e, n, CurvatureClass::Flat);
            assert_eq!(ord_degree(&nf), OrdDegree::Degree(2), "n = {n}");
        }
        // and it acts identically to the direct composition
        let geo = Arc::new(Geometry::flat(3, 0).unwrap());
        for seed in [21u64, 22] {
            let psi = random_tensor(geo.clone(), seed, 2, 2);
            let via_lang = crate::lang::apply_expr(&e, &psi).unwrap();
            assert_eq!(via_lang, detour_operator(&psi).unwrap());
        }
    }

    #[test]
    fn report_shape_and_low_rank_rows() {
        let geo = Arc::new(Geometry::flat(3, 0).unwrap());
        let rep = detour_report(&geo, 42, 4).unwrap();
        assert_eq!(rep.gauge.len(), 6);
        assert_eq!(rep.bianchi.len(), 12);
        // G grad annihilates exactly the trace-free parameters.
        for line in &rep.gauge {
            match line.class.as_str() {
                "scalar" | "rank1" | "rank2_traceless" | "rank3_traceless" => {
                    assert_eq!(line.nonzero, 0, "{}", line.class);
                }
                "rank2_traceful" | "rank3_traceful" => {
                    assert!(line.nonzero >= 1, "{}", line.class);
                }
                other => panic!("unexpected class {other}"),
            }
        }
        for line in &rep.bianchi {
            match (line.candidate.as_str(), line.class.as_str()) {
                // div G = 0 identically through rank two; the first
                // obstruction is 1/2 g div^3 at rank three, trace or no.
                ("div G", "scalar" | "rank1" | "rank2_traceless" | "rank2_traceful") => {
                    assert_eq!(line.nonzero, 0, "{}", line.class);
                }
                ("div G", _) => assert!(line.nonzero >= 1, "{}", line.class),
                // the corrected candidate picks up (n - 2) div^2 terms
                // already at traceless rank two, so only the vector-and-below
                // rows vanish here at n = 3.
                (_, "scalar" | "rank1") => {
                    assert_eq!(line.nonzero, 0, "{} / {}", line.class, line.candidate);
                }
                (_, "rank2_traceless") => {
                    assert!(line.nonzero >= 1, "{} / {}", line.class, line.candidate);
                }
                _ => {}
            }
        }
        // determinism
        let again = detour_report(&geo, 42, 4).unwrap();
        assert_eq!(
            serde_json::to_string(&rep).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }
}
