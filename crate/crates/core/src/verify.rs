//! Randomized identity verification over the operator algebra.
//!
//! A suite is a fixed list of identities. Each identity is checked on a
//! stream of deterministic random tensor fields; both sides of the relation
//! are applied exactly and the difference must vanish. Trials that hit a
//! spectral singularity in a rational coefficient are skipped and the
//! offending (s, k, n) triple is recorded in the report, so a pass is never
//! silent about slices the relation could not be evaluated on. An identity
//! passes only if it has zero failures and at least one fully checked trial.

use crate::depth::{reconstruct_div, reconstruct_grad, trace_decompose};
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::lang::{
    apply_expr, apply_normal_form, geometry_class, nf_equal, normalize, ord_degree, parse,
    CurvatureClass, Expr, Gen, OrdDegree,
};
use crate::ops::{bochner_laplacian, casimir_c, curvature_op, div, grad, op_n, op_tr};
use crate::rng::SplitMix64;
use crate::tensor::{random_tensor, SymTensorField};
use serde::Serialize;
use std::sync::Arc;

#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    pub suite: String,
    pub geometry: String,
    pub dim: u32,
    pub signature: [u32; 2],
    pub seed: u64,
    pub trials: u32,
    pub max_rank: u32,
    pub max_degree: u32,
}

/// Depth slice on which a rational coefficient had a vanishing denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SkippedSpectrum {
    pub s: u32,
    pub k: u32,
    pub dim: u32,
}

#[derive(Debug, Serialize)]
pub struct IdentityResult {
    pub name: String,
    pub relation: String,
    pub trials: u32,
    pub checked: u32,
    pub skipped: u32,
    pub failures: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_counterexample: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skipped_spectra: Vec<SkippedSpectrum>,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct VerificationReport {
    pub config: VerifyConfig,
    pub identities: Vec<IdentityResult>,
    pub pass: bool,
}

enum Outcome {
    Pass,
    Skip,
    Fail(String),
}

type Skips = Vec<SkippedSpectrum>;
type CheckFn = Box<dyn Fn(u32, &SymTensorField, &mut Skips) -> Outcome>;

struct Identity {
    name: &'static str,
    relation: String,
    trials: u32,
    check: CheckFn,
}

fn mix(seed: u64, salt: u64, trial: u64) -> u64 {
    let mut r = SplitMix64::new(
        seed ^ salt.wrapping_mul(0x9E3779B97F4A7C15) ^ trial.wrapping_mul(0xBF58476D1CE4E5B9),
    );
    r.next_u64()
}

fn short(t: &SymTensorField) -> String {
    let s = t.to_string();
    if s.len() > 160 {
        format!("{}...", &s[..160])
    } else {
        s
    }
}

/// Apply one side; a vanishing spectral denominator is recorded and reported
/// as `None`, anything else unexpected is a hard failure.
fn apply_side(
    e: &Expr,
    psi: &SymTensorField,
    skips: &mut Skips,
) -> std::result::Result<Option<SymTensorField>, String> {
    match apply_expr(e, psi) {
        Ok(v) => Ok(Some(v)),
        Err(Error::DenominatorSingularOnSpectrum { s, k, dim }) => {
            skips.push(SkippedSpectrum { s, k, dim });
            Ok(None)
        }
        Err(e) => Err(e.to_string()),
    }
}

/// Check a conjunction of lhs = rhs pairs on one tensor. In sliced mode the
/// input is split into its depth components first, so a singular slice only
/// skips itself rather than the whole trial.
fn run_pairs(
    pairs: &[(Expr, Expr)],
    psi: &SymTensorField,
    sliced: bool,
    skips: &mut Skips,
) -> Outcome {
    let fields: Vec<SymTensorField> = if sliced {
        match trace_decompose(psi) {
            Ok(d) => d.components.iter().map(|c| c.embedded()).collect(),
            Err(e) => return Outcome::Fail(format!("decomposition failed: {e}")),
        }
    } else {
        vec![psi.clone()]
    };
    let mut evaluated = false;
    for f in &fields {
        for (l, r) in pairs {
            let a = match apply_side(l, f, skips) {
                Ok(Some(v)) => v,
                Ok(None) => continue,
                Err(m) => return Outcome::Fail(m),
            };
            let b = match apply_side(r, f, skips) {
                Ok(Some(v)) => v,
                Ok(None) => continue,
                Err(m) => return Outcome::Fail(m),
            };
            let d = a.sub(&b).expect("same geometry");
            if !d.is_zero() {
                return Outcome::Fail(format!("lhs != rhs on {}", short(f)));
            }
            evaluated = true;
        }
    }
    if evaluated {
        Outcome::Pass
    } else {
        Outcome::Skip
    }
}

fn multi(
    name: &'static str,
    texts: &[(&str, &str)],
    sliced: bool,
    trials: u32,
) -> Identity {
    let relation = texts
        .iter()
        .map(|(l, r)| format!("{l} = {r}"))
        .collect::<Vec<_>>()
        .join("; ");
    let pairs: Vec<(Expr, Expr)> = texts
        .iter()
        .map(|(l, r)| {
            (
                parse(l).expect("relation lhs parses"),
                parse(r).expect("relation rhs parses"),
            )
        })
        .collect();
    Identity {
        name,
        relation,
        trials,
        check: Box::new(move |_, psi, skips| run_pairs(&pairs, psi, sliced, skips)),
    }
}

fn expr_id(name: &'static str, lhs: &str, rhs: &str, sliced: bool, trials: u32) -> Identity {
    multi(name, &[(lhs, rhs)], sliced, trials)
}

fn custom(name: &'static str, relation: String, trials: u32, check: CheckFn) -> Identity {
    Identity { name, relation, trials, check }
}

fn sp2_suite(geo: &Arc<Geometry>, trials: u32) -> Vec<Identity> {
    let two_n = 2 * geo.dim();
    vec![
        expr_id("sp2_tr_g", "tr g - g tr", &format!("4 N + {two_n}"), false, trials),
        expr_id("sp2_n_tr", "N tr - tr N", "-2 tr", false, trials),
        expr_id("sp2_n_g", "N g - g N", "2 g", false, trials),
    ]
}

fn doublet_suite(trials: u32) -> Vec<Identity> {
    let mut v = vec![
        expr_id("doublet_n_grad", "N grad - grad N", "grad", false, trials),
        expr_id("doublet_n_div", "N div - div N", "-div", false, trials),
        expr_id("doublet_tr_grad", "tr grad - grad tr", "2 div", false, trials),
        expr_id("doublet_div_g", "div g - g div", "2 grad", false, trials),
    ];
    v.push(custom(
        "doublet_div_grad",
        "div grad - grad div = Delta - R##".to_string(),
        trials,
        Box::new(|_, psi, _| {
            let l = div(&grad(psi)).sub(&grad(&div(psi))).expect("same geometry");
            let r = bochner_laplacian(psi)
                .sub(&curvature_op(psi))
                .expect("same geometry");
            if l.sub(&r).expect("same geometry").is_zero() {
                Outcome::Pass
            } else {
                Outcome::Fail(format!("lhs != rhs on {}", short(psi)))
            }
        }),
    ));
    v
}

fn box_suite(geo: &Arc<Geometry>, trials: u32) -> Vec<Identity> {
    let mut v = vec![
        expr_id("box_central_g", "box g - g box", "0", false, trials),
        expr_id("box_central_n", "box N - N box", "0", false, trials),
        expr_id("box_central_tr", "box tr - tr box", "0", false, trials),
    ];
    if geo.is_flat() {
        v.push(expr_id("box_div_grad_form", "div grad - grad div", "box", false, trials));
    } else {
        v.push(expr_id("box_central_grad", "box grad - grad box", "0", false, trials));
        v.push(expr_id("box_central_div", "box div - div box", "0", false, trials));
        v.push(custom(
            "box_curvature_action",
            "R## = -c".to_string(),
            trials,
            Box::new(|_, psi, _| {
                if curvature_op(psi)
                    .add(&casimir_c(psi))
                    .expect("same geometry")
                    .is_zero()
                {
                    Outcome::Pass
                } else {
                    Outcome::Fail(format!("R## + c != 0 on {}", short(psi)))
                }
            }),
        ));
        v.push(expr_id(
            "box_div_grad_form",
            "div grad - grad div",
            "box + 2 c",
            false,
            trials,
        ));
    }
    v
}

fn fig3_suite(geo: &Arc<Geometry>, trials: u32) -> Vec<Identity> {
    let bracket = if geo.is_flat() { "box" } else { "(box + 2 c)" };
    let exchange_rhs = format!(
        "C^2 (Ncal + C + 1) (Ncal + C - 3)^2 inv((C + 1) (C - 1) (Ncal + C - 1)^3) gradt divt \
         + 2 C^2 (Ncal + C + 1) inv((C + 1) (Ncal + C - 1)^2) {bracket}"
    );
    vec![
        multi(
            "fig3_shift_gradt",
            &[("Ncal gradt", "gradt (Ncal + 1)"), ("C gradt", "gradt (C + 1)")],
            false,
            trials,
        ),
        multi(
            "fig3_shift_divt",
            &[("Ncal divt", "divt (Ncal - 1)"), ("C divt", "divt (C - 1)")],
            false,
            trials,
        ),
        multi(
            "fig3_shift_tr",
            &[("Ncal tr", "tr (Ncal - 2)"), ("C tr", "tr C")],
            false,
            trials,
        ),
        multi(
            "fig3_shift_g",
            &[("Ncal g", "g (Ncal + 2)"), ("C g", "g C")],
            false,
            trials,
        ),
        expr_id("fig3_tr_g", "tr g", "(Ncal + C + 1) (Ncal - C + 1)", false, trials),
        expr_id("fig3_g_tr", "g tr", "(Ncal + C - 1) (Ncal - C - 1)", false, trials),
        expr_id(
            "fig3_gradt_g",
            "gradt g",
            "g gradt (Ncal + C - 1) inv(Ncal + C + 1)",
            false,
            trials,
        ),
        expr_id(
            "fig3_tr_divt",
            "tr divt",
            "(Ncal + C - 1) inv(Ncal + C + 1) divt tr",
            false,
            trials,
        ),
        expr_id(
            "fig3_tr_gradt",
            "tr gradt",
            "(Ncal + C + 1) (Ncal + C - 3) inv((Ncal + C - 1)^2) gradt tr",
            false,
            trials,
        ),
        expr_id(
            "fig3_divt_g",
            "divt g",
            "g divt (Ncal + C + 1) (Ncal + C - 3) inv((Ncal + C - 1)^2)",
            true,
            trials,
        ),
        expr_id("fig3_divt_gradt", "divt gradt", &exchange_rhs, true, trials),
    ]
}

fn depth_suite(geo: &Arc<Geometry>, trials: u32) -> Vec<Identity> {
    let n = geo.dim() as i64;
    let half = crate::exact::rational::rat(n - 2, 2);
    let half_sq = &half * &half;
    let casimir_rhs = if half_sq == crate::exact::rational::rat_i(0) {
        "-c".to_string()
    } else {
        format!("{} - c", crate::exact::rational::format_rational(&half_sq))
    };
    let c_expr = parse("C").expect("parses");
    let kappa_expr = parse("kappa").expect("parses");
    vec![
        custom(
            "depth_roundtrip",
            "reassemble(decompose(psi)) = psi".to_string(),
            trials,
            Box::new(|_, psi, _| match trace_decompose(psi) {
                Ok(d) => {
                    let back = d.reassemble(psi.geometry().clone());
                    if back.sub(psi).expect("same geometry").is_zero() {
                        Outcome::Pass
                    } else {
                        Outcome::Fail(format!("roundtrip drift on {}", short(psi)))
                    }
                }
                Err(e) => Outcome::Fail(e.to_string()),
            }),
        ),
        custom(
            "depth_eigenvalues",
            "N, C, kappa, c take their tabulated values on g^k phi_s".to_string(),
            trials,
            Box::new(move |_, psi, _| {
                let dec = match trace_decompose(psi) {
                    Ok(d) => d,
                    Err(e) => return Outcome::Fail(e.to_string()),
                };
                for comp in &dec.components {
                    let f = comp.embedded();
                    let checks = [
                        (op_n(&f), f.scale(&comp.n_eig())),
                        (casimir_c(&f), f.scale(&comp.c_eig())),
                        (
                            apply_expr(&c_expr, &f).expect("polynomial application"),
                            f.scale(&comp.ccal_eig()),
                        ),
                        (
                            apply_expr(&kappa_expr, &f).expect("polynomial application"),
                            f.scale(&comp.kappa_eig()),
                        ),
                    ];
                    for (got, want) in checks {
                        if !got.sub(&want).expect("same geometry").is_zero() {
                            return Outcome::Fail(format!(
                                "eigenvalue mismatch on slice s={}, k={}",
                                comp.s, comp.k
                            ));
                        }
                    }
                }
                Outcome::Pass
            }),
        ),
        expr_id("depth_kappa_function", "kappa", "1/2 Ncal - 1/2 C - 1/2", false, trials),
        expr_id("depth_casimir_identity", "C^2", &casimir_rhs, false, trials),
        multi(
            "depth_kappa_central",
            &[("kappa gradt", "gradt kappa"), ("kappa divt", "divt kappa")],
            false,
            trials,
        ),
        custom(
            "depth_gradt_tracefree",
            "tr gradt phi = 0 when tr phi = 0".to_string(),
            trials,
            Box::new(|_, psi, _| {
                let dec = match trace_decompose(psi) {
                    Ok(d) => d,
                    Err(e) => return Outcome::Fail(e.to_string()),
                };
                let mut phi = SymTensorField::zero(psi.geometry().clone());
                for comp in dec.components.iter().filter(|c| c.k == 0) {
                    phi = phi.add(&comp.embedded()).expect("same geometry");
                }
                let gt = match crate::depth::grad_tilde(&phi) {
                    Ok(v) => v,
                    Err(e) => return Outcome::Fail(e.to_string()),
                };
                if op_tr(&gt).is_zero() {
                    Outcome::Pass
                } else {
                    Outcome::Fail(format!("trace survives on {}", short(&phi)))
                }
            }),
        ),
    ]
}

fn inversion_suite(trials: u32) -> Vec<Identity> {
    fn reconstruction(
        name: &'static str,
        relation: &str,
        trials: u32,
        rebuilt: fn(&SymTensorField) -> Result<SymTensorField>,
        direct: fn(&SymTensorField) -> SymTensorField,
    ) -> Identity {
        custom(
            name,
            relation.to_string(),
            trials,
            Box::new(move |_, psi, skips| {
                let dec = match trace_decompose(psi) {
                    Ok(d) => d,
                    Err(e) => return Outcome::Fail(e.to_string()),
                };
                let mut evaluated = false;
                for comp in &dec.components {
                    let f = comp.embedded();
                    let got = match rebuilt(&f) {
                        Ok(v) => v,
                        Err(Error::DenominatorSingularOnSpectrum { s, k, dim }) => {
                            skips.push(SkippedSpectrum { s, k, dim });
                            continue;
                        }
                        Err(e) => return Outcome::Fail(e.to_string()),
                    };
                    if !got.sub(&direct(&f)).expect("same geometry").is_zero() {
                        return Outcome::Fail(format!(
                            "reconstruction mismatch on slice s={}, k={}",
                            comp.s, comp.k
                        ));
                    }
                    evaluated = true;
                }
                if evaluated {
                    Outcome::Pass
                } else {
                    Outcome::Skip
                }
            }),
        )
    }
    vec![
        reconstruction(
            "inversion_grad",
            "grad rebuilt from (gradt, divt, tr, g) = grad",
            trials,
            reconstruct_grad,
            grad,
        ),
        reconstruction(
            "inversion_div",
            "div rebuilt from (gradt, divt, tr, g) = div",
            trials,
            reconstruct_div,
            div,
        ),
    ]
}

const WORD_ALPHABET: [Gen; 9] = [
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

fn sample_word(seed: u64) -> Expr {
    let mut r = SplitMix64::new(seed);
    let len = 1 + r.below(5) as usize;
    let mut gens: Vec<Expr> = (0..len)
        .map(|_| Expr::Gen(WORD_ALPHABET[r.below(9) as usize]))
        .collect();
    if len == 1 {
        gens.pop().unwrap()
    } else {
        Expr::Mul(gens)
    }
}

fn rewriter_suite(geo: &Arc<Geometry>, seed: u64, trials: u32) -> Vec<Identity> {
    let dim = geo.dim() as u32;
    let class = geometry_class(geo);
    let word_trials = trials.max(100);
    vec![
        custom(
            "rewriter_oracle",
            "normalize(w) applied = w applied, random words over \
             {g, tr, N, gradt, divt, box, C, kappa, c} of length 1..=5"
                .to_string(),
            word_trials,
            Box::new(move |t, psi, skips| {
                let word = sample_word(mix(seed, 0xA11CE, t as u64));
                let direct = match apply_side(&word, psi, skips) {
                    Ok(Some(v)) => v,
                    Ok(None) => return Outcome::Skip,
                    Err(m) => return Outcome::Fail(format!("word {word}: {m}")),
                };
                let nf = normalize(&word, dim, class);
                let via = match apply_normal_form(&nf, psi) {
                    Ok(v) => v,
                    Err(Error::DenominatorSingularOnSpectrum { s, k, dim }) => {
                        skips.push(SkippedSpectrum { s, k, dim });
                        return Outcome::Skip;
                    }
                    Err(e) => return Outcome::Fail(format!("word {word}: {e}")),
                };
                if direct.sub(&via).expect("same geometry").is_zero() {
                    Outcome::Pass
                } else {
                    Outcome::Fail(format!("word {word} on {}", short(psi)))
                }
            }),
        ),
        custom(
            "rewriter_idempotent",
            "normalize(parse(render(normalize(w)))) = normalize(w)".to_string(),
            word_trials,
            Box::new(move |t, _, _| {
                let word = sample_word(mix(seed, 0x1DE4, t as u64));
                let nf = normalize(&word, dim, class);
                let text = nf.render();
                let back = match parse(&text) {
                    Ok(e) => e,
                    Err(e) => return Outcome::Fail(format!("render {text:?}: {e}")),
                };
                if nf_equal(&normalize(&back, dim, class), &nf) {
                    Outcome::Pass
                } else {
                    Outcome::Fail(format!("word {word}, rendered {text:?}"))
                }
            }),
        ),
        custom(
            "rewriter_ord_additive",
            // On a curved background the divt/gradt exchange inserts the
            // bracket (box - 2 rho), mixing derivative degrees 2 and 0, so
            // homogeneity of a normalized word is only guaranteed flat;
            // whenever all three words stay homogeneous the degrees add.
            "ord(w1 w2) = ord(w1) + ord(w2) when both sides homogeneous \
             (unconditional on a flat background)"
                .to_string(),
            word_trials,
            Box::new(move |t, _, _| {
                let w1 = sample_word(mix(seed, 0x04D1, t as u64));
                let w2 = sample_word(mix(seed, 0x04D2, t as u64));
                let product = Expr::Mul(vec![w1.clone(), w2.clone()]);
                let (d1, d2, d12) = (
                    ord_degree(&normalize(&w1, dim, class)),
                    ord_degree(&normalize(&w2, dim, class)),
                    ord_degree(&normalize(&product, dim, class)),
                );
                match (d1, d2, d12) {
                    (OrdDegree::Degree(a), OrdDegree::Degree(b), OrdDegree::Degree(c)) => {
                        if a + b == c {
                            Outcome::Pass
                        } else {
                            Outcome::Fail(format!(
                                "words {w1} and {w2}: {a} + {b} != {c}"
                            ))
                        }
                    }
                    _ if class == CurvatureClass::Flat => Outcome::Fail(format!(
                        "words {w1} and {w2} lost homogeneity on a flat background: \
                         {d1:?}, {d2:?}, {d12:?}"
                    )),
                    _ => Outcome::Skip,
                }
            }),
        ),
    ]
}

pub const SUITES: [&str; 8] =
    ["sp2", "doublet", "box", "fig3", "depth", "inversion", "rewriter", "all"];

fn build_suite(
    geo: &Arc<Geometry>,
    suite: &str,
    seed: u64,
    trials: u32,
) -> Result<Vec<Identity>> {
    Ok(match suite {
        "sp2" => sp2_suite(geo, trials),
        "doublet" => doublet_suite(trials),
        "box" => box_suite(geo, trials),
        "fig3" => fig3_suite(geo, trials),
        "depth" => depth_suite(geo, trials),
        "inversion" => inversion_suite(trials),
        "rewriter" => rewriter_suite(geo, seed, trials),
        "all" => {
            let mut v = sp2_suite(geo, trials);
            v.extend(doublet_suite(trials));
            v.extend(box_suite(geo, trials));
            v.extend(fig3_suite(geo, trials));
            v.extend(depth_suite(geo, trials));
            v.extend(inversion_suite(trials));
            v.extend(rewriter_suite(geo, seed, trials));
            v
        }
        other => {
            return Err(Error::InvalidFlags(format!(
                "unknown suite {other:?}; expected one of {SUITES:?}"
            )))
        }
    })
}

pub fn run_verification(
    geo: &Arc<Geometry>,
    suite: &str,
    seed: u64,
    trials: u32,
    max_rank: u32,
    max_degree: u32,
) -> Result<VerificationReport> {
    let identities = build_suite(geo, suite, seed, trials)?;
    let (p, q) = geo.signature();
    let config = VerifyConfig {
        suite: suite.to_string(),
        geometry: if geo.is_flat() { "flat" } else { "hyperbolic" }.to_string(),
        dim: geo.dim() as u32,
        signature: [p, q],
        seed,
        trials,
        max_rank,
        max_degree,
    };
    let mut results = Vec::with_capacity(identities.len());
    for (index, ident) in identities.iter().enumerate() {
        let mut skips: Skips = Vec::new();
        let mut checked = 0;
        let mut skipped = 0;
        let mut failures = 0;
        let mut first_counterexample = None;
        for t in 0..ident.trials {
            let psi = random_tensor(
                geo.clone(),
                mix(seed, index as u64, t as u64),
                max_rank,
                max_degree,
            );
            match (ident.check)(t, &psi, &mut skips) {
                Outcome::Pass => checked += 1,
                Outcome::Skip => skipped += 1,
                Outcome::Fail(msg) => {
                    failures += 1;
                    if first_counterexample.is_none() {
                        first_counterexample = Some(msg);
                    }
                }
            }
        }
        skips.sort();
        skips.dedup();
        let pass = failures == 0 && checked > 0;
        results.push(IdentityResult {
            name: ident.name.to_string(),
            relation: ident.relation.clone(),
            trials: ident.trials,
            checked,
            skipped,
            failures,
            first_counterexample,
            skipped_spectra: skips,
            pass,
        });
    }
    let pass = results.iter().all(|r| r.pass);
    Ok(VerificationReport { config, identities: results, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat3() -> Arc<Geometry> {
        Arc::new(Geometry::flat(3, 0).unwrap())
    }

    fn hyp(n: usize) -> Arc<Geometry> {
        Arc::new(Geometry::hyperbolic(n).unwrap())
    }

    #[test]
    fn all_suites_pass_on_flat_r3() {
        let rep = run_verification(&flat3(), "all", 11, 4, 3, 2).unwrap();
        assert!(rep.pass, "{}", serde_json::to_string_pretty(&rep).unwrap());
        // 3 sp2 + 5 doublet + 4 box (flat) + 11 fig3 + 6 depth + 2 inversion + 3 rewriter
        assert_eq!(rep.identities.len(), 34);
        for r in &rep.identities {
            assert!(r.checked > 0, "identity {} never ran", r.name);
        }
    }

    #[test]
    fn all_suites_pass_on_hyperbolic_h3() {
        let rep = run_verification(&hyp(3), "all", 12, 4, 3, 2).unwrap();
        assert!(rep.pass, "{}", serde_json::to_string_pretty(&rep).unwrap());
        // box suite grows to 7 identities on a curved background
        assert_eq!(rep.identities.len(), 37);
        for r in &rep.identities {
            assert!(r.checked > 0, "identity {} never ran", r.name);
        }
    }

    #[test]
    fn hyperbolic_plane_logs_singular_spectra() {
        let rep = run_verification(&hyp(2), "fig3", 13, 5, 4, 2).unwrap();
        assert!(rep.pass, "{}", serde_json::to_string_pretty(&rep).unwrap());
        let exchange = rep
            .identities
            .iter()
            .find(|r| r.name == "fig3_divt_gradt")
            .unwrap();
        assert!(
            !exchange.skipped_spectra.is_empty(),
            "the exchange relation must log its singular slices on the plane"
        );
        for sk in &exchange.skipped_spectra {
            assert_eq!(sk.dim, 2);
            assert!(sk.s <= 1, "only s = 0, 1 are singular here, got s = {}", sk.s);
        }
        assert!(exchange.checked > 0);
        let dg = rep.identities.iter().find(|r| r.name == "fig3_divt_g").unwrap();
        assert!(dg
            .skipped_spectra
            .iter()
            .any(|sk| sk.s == 0 && sk.k == 0 && sk.dim == 2));
    }

    #[test]
    fn report_json_is_byte_stable() {
        let a = run_verification(&hyp(3), "sp2", 99, 3, 3, 1).unwrap();
        let b = run_verification(&hyp(3), "sp2", 99, 3, 3, 1).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn unknown_suite_is_rejected() {
        let err = run_verification(&flat3(), "everything", 1, 1, 1, 1).unwrap_err();
        assert!(matches!(err, Error::InvalidFlags(_)));
    }

    #[test]
    fn rewriter_runs_at_least_a_hundred_words() {
        let rep = run_verification(&flat3(), "rewriter", 7, 10, 3, 1).unwrap();
        assert!(rep.pass);
        let oracle = rep
            .identities
            .iter()
            .find(|r| r.name == "rewriter_oracle")
            .unwrap();
        assert_eq!(oracle.trials, 100);
        assert_eq!(oracle.failures, 0);
    }
}
