//! Serialized wire formats. Field order and term order are deterministic so
//! equal inputs always produce byte-identical JSON.

use crate::error::{Error, Result};
use crate::exact::rational::{format_rational, parse_rational};
use crate::exact::LaurentPoly;
use crate::geometry::Geometry;
use crate::tensor::SymTensorField;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorJson {
    pub dim: usize,
    pub signature: [u32; 2],
    pub geometry: String,
    pub terms: Vec<TensorTermJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorTermJson {
    pub u: Vec<u32>,
    pub coeff: Vec<TensorCoeffJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorCoeffJson {
    pub x: Vec<i32>,
    pub q: String,
}

pub fn tensor_to_json(t: &SymTensorField) -> TensorJson {
    let geo = t.geometry();
    let (p, q) = geo.signature();
    TensorJson {
        dim: geo.dim(),
        signature: [p, q],
        geometry: if geo.is_flat() { "flat".into() } else { "hyperbolic".into() },
        terms: t
            .terms()
            .map(|(ue, c)| TensorTermJson {
                u: ue.clone(),
                coeff: c
                    .terms()
                    .map(|(xe, r)| TensorCoeffJson { x: xe.clone(), q: format_rational(r) })
                    .collect(),
            })
            .collect(),
    }
}

pub fn geometry_from_json(j: &TensorJson) -> Result<Arc<Geometry>> {
    let geo = match j.geometry.as_str() {
        "flat" => Geometry::flat(j.signature[0], j.signature[1])?,
        "hyperbolic" => Geometry::hyperbolic(j.dim)?,
        other => {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("unknown geometry {other:?}"),
            })
        }
    };
    if geo.dim() != j.dim {
        return Err(Error::Parse {
            pos: 0,
            msg: format!(
                "dim {} does not match signature/geometry (expected {})",
                j.dim,
                geo.dim()
            ),
        });
    }
    if !geo.is_flat() && j.signature != [j.dim as u32, 0] {
        return Err(Error::Parse {
            pos: 0,
            msg: "hyperbolic space is Riemannian; signature must be [dim, 0]".into(),
        });
    }
    Ok(Arc::new(geo))
}

pub fn tensor_from_json(j: &TensorJson) -> Result<SymTensorField> {
    let geo = geometry_from_json(j)?;
    let n = geo.dim();
    let mut out = SymTensorField::zero(geo.clone());
    for term in &j.terms {
        if term.u.len() != n {
            return Err(Error::MismatchedVariables(term.u.len(), n));
        }
        let mut poly = LaurentPoly::zero(n);
        for c in &term.coeff {
            if c.x.len() != n {
                return Err(Error::MismatchedVariables(c.x.len(), n));
            }
            let r = parse_rational(&c.q)?;
            poly = poly.add(&LaurentPoly::monomial(n, c.x.clone(), r))?;
        }
        out = out.add(&SymTensorField::monomial(geo.clone(), term.u.clone(), poly))?;
    }
    out.validate()?;
    Ok(out)
}

/// One normal-form monomial g^a gradt^b coeff divt^c tr^d; the coefficient
/// is a ratio of polynomials in (Ncal, C), the numerator possibly carrying
/// wave-operator powers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalFormMonoJson {
    pub g: u32,
    pub gradt: u32,
    pub divt: u32,
    pub tr: u32,
    pub coeff: CoeffJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoeffJson {
    pub num: String,
    pub den: String,
}

pub fn normal_form_to_json(nf: &crate::lang::NormalForm) -> Vec<NormalFormMonoJson> {
    nf.monos
        .iter()
        .map(|((a, b, c, d), f)| NormalFormMonoJson {
            g: *a,
            gradt: *b,
            divt: *c,
            tr: *d,
            coeff: CoeffJson { num: f.num().render(), den: f.den().render() },
        })
        .collect()
}

/// One slice of the depth decomposition: psi = sum over k of g^k phi, with
/// phi trace-free of rank s; the eigenvalues are exact rationals.
#[derive(Debug, Clone, Serialize)]
pub struct DepthComponentJson {
    pub s: u32,
    pub k: u32,
    pub phi: TensorJson,
    #[serde(rename = "N_eig")]
    pub n_eig: String,
    #[serde(rename = "Ccal_eig")]
    pub ccal_eig: String,
    pub kappa_eig: String,
}

pub fn decomposition_to_json(d: &crate::depth::DepthDecomposition) -> Vec<DepthComponentJson> {
    d.components
        .iter()
        .map(|c| DepthComponentJson {
            s: c.s,
            k: c.k,
            phi: tensor_to_json(&c.phi),
            n_eig: format_rational(&c.n_eig()),
            ccal_eig: format_rational(&c.ccal_eig()),
            kappa_eig: format_rational(&c.kappa_eig()),
        })
        .collect()
}
