//! Depth decomposition. Every rank-r symmetric tensor splits uniquely as
//! sum_k g^k Phi_k with Phi_k trace-free of rank s = r - 2k; the integer k is
//! the depth. On each slice the operators Ncal, C, kappa, c act by scalars,
//! so rational functions of (Ncal, C) act spectrally.

use crate::error::{Error, Result};
use crate::exact::ncfun::NCFun;
use crate::exact::rational::{rat, rat_i, Rational};
use crate::ops::{casimir_c, div, grad, lichnerowicz_box, op_g, op_tr};
use crate::tensor::SymTensorField;
use num_traits::Zero;

#[derive(Debug, Clone)]
pub struct DepthComponent {
    pub s: u32,
    pub k: u32,
    /// Trace-free part of rank s.
    pub phi: SymTensorField,
}

impl DepthComponent {
    fn n(&self) -> i64 {
        self.phi.geometry().dim() as i64
    }

    /// Rank of the slice g^k phi.
    pub fn rank(&self) -> u32 {
        self.s + 2 * self.k
    }

    pub fn n_eig(&self) -> Rational {
        rat_i(self.s as i64 + 2 * self.k as i64)
    }

    pub fn ncal_eig(&self) -> Rational {
        rat_i(self.s as i64 + 2 * self.k as i64) + rat(self.n(), 2)
    }

    pub fn ccal_eig(&self) -> Rational {
        rat_i(self.s as i64) + rat(self.n() - 2, 2)
    }

    pub fn kappa_eig(&self) -> Rational {
        rat_i(self.k as i64)
    }

    pub fn c_eig(&self) -> Rational {
        let s = self.s as i64;
        rat_i(-s * (s + self.n() - 2))
    }

    /// The slice itself, g^k phi.
    pub fn embedded(&self) -> SymTensorField {
        let mut h = self.phi.clone();
        for _ in 0..self.k {
            h = op_g(&h);
        }
        h
    }
}

#[derive(Debug, Clone)]
pub struct DepthDecomposition {
    pub components: Vec<DepthComponent>,
}

impl DepthDecomposition {
    pub fn reassemble(&self, geo: std::sync::Arc<crate::geometry::Geometry>) -> SymTensorField {
        let mut acc = SymTensorField::zero(geo);
        for c in &self.components {
            acc = acc.add(&c.embedded()).expect("same geometry");
        }
        acc
    }
}

/// Casimir eigenvalue -s(s+n-2) for trace-free rank s.
fn c_eigenvalue(s: i64, n: i64) -> Rational {
    rat_i(-s * (s + n - 2))
}

/// Split into trace-free slices. Projects each rank part onto the Casimir
/// eigenspaces with a Lagrange interpolation in c, then strips the metric
/// powers with repeated traces. The result is checked against the input and
/// each part is checked trace-free; any discrepancy is an internal error,
/// reported rather than patched up.
pub fn trace_decompose(psi: &SymTensorField) -> Result<DepthDecomposition> {
    let geo = psi.geometry().clone();
    let n = geo.dim() as i64;
    let mut components = Vec::new();
    for (r, part) in psi.rank_parts() {
        let depths: Vec<u32> = (0..=r / 2).collect();
        let eigs: Vec<Rational> =
            depths.iter().map(|&k| c_eigenvalue((r - 2 * k) as i64, n)).collect();
        let mut reassembled = SymTensorField::zero(geo.clone());
        for (idx, &k) in depths.iter().enumerate() {
            let s = r - 2 * k;
            // Lagrange projector onto the c = eigs[idx] eigenspace
            let mut proj = part.clone();
            for (jdx, lam) in eigs.iter().enumerate() {
                if jdx == idx {
                    continue;
                }
                let denom = eigs[idx].clone() - lam.clone();
                debug_assert!(!denom.is_zero(), "casimir eigenvalues must be distinct");
                proj = casimir_c(&proj)
                    .sub(&proj.scale(lam))
                    .expect("same geometry")
                    .scale(&denom.recip());
            }
            if proj.is_zero() {
                continue;
            }
            reassembled = reassembled.add(&proj).expect("same geometry");
            // strip the metric powers: tr^k (g^k phi) = 2^k k! prod_j (2s+n+2j) phi
            let mut phi = proj;
            for _ in 0..k {
                phi = op_tr(&phi);
            }
            let mut norm = Rational::from_integer(1.into());
            for j in 0..k as i64 {
                norm *= rat_i(2 * (j + 1)) * rat_i(2 * s as i64 + n + 2 * j);
            }
            phi = phi.scale(&norm.recip());
            if !op_tr(&phi).is_zero() {
                return Err(Error::ReassemblyFailed);
            }
            components.push(DepthComponent { s, k, phi });
        }
        if reassembled != part {
            return Err(Error::ReassemblyFailed);
        }
    }
    let out = DepthDecomposition { components };
    if out.reassemble(geo) != *psi {
        return Err(Error::ReassemblyFailed);
    }
    Ok(out)
}

/// Apply a rational function of (Ncal, C) spectrally: evaluate on each depth
/// slice and rescale. The function must be free of the wave-operator symbol.
pub fn apply_ncfun(psi: &SymTensorField, f: &NCFun) -> Result<SymTensorField> {
    if !f.is_box_free() {
        return Err(Error::BoxSymbolPresent);
    }
    apply_ncfun_allow_box(psi, f)
}

/// Like `apply_ncfun` but wave-operator powers in the numerator are realized
/// by applying the Lichnerowicz operator, slice by slice.
pub fn apply_ncfun_allow_box(psi: &SymTensorField, f: &NCFun) -> Result<SymTensorField> {
    let geo = psi.geometry().clone();
    let n = geo.dim() as u32;
    let dec = trace_decompose(psi)?;
    let mut acc = SymTensorField::zero(geo);
    for comp in &dec.components {
        let coeffs = f
            .eval_box_coeffs(&comp.ncal_eig(), &comp.ccal_eig())
            .map_err(|_| Error::DenominatorSingularOnSpectrum { s: comp.s, k: comp.k, dim: n })?;
        let mut slice = comp.embedded();
        for c in coeffs {
            if !c.is_zero() {
                acc = acc.add(&slice.scale(&c)).expect("same geometry");
            }
            slice = lichnerowicz_box(&slice);
        }
    }
    Ok(acc)
}

/// Trace-decomposition-adapted gradient: on each slice, grad minus the pure
/// trace correction g div / (2s+2k+n-2). Maps the (s,k) slice into (s+1,k).
pub fn grad_tilde(psi: &SymTensorField) -> Result<SymTensorField> {
    let geo = psi.geometry().clone();
    let n = geo.dim() as i64;
    let dec = trace_decompose(psi)?;
    let mut acc = SymTensorField::zero(geo);
    for comp in &dec.components {
        let h = comp.embedded();
        let e = 2 * comp.s as i64 + 2 * comp.k as i64 + n - 2;
        let mut piece = grad(&h);
        if e != 0 {
            piece = piece
                .sub(&op_g(&div(&h)).scale(&rat_i(e).recip()))
                .expect("same geometry");
        }
        acc = acc.add(&piece).expect("same geometry");
    }
    Ok(acc)
}

/// Adapted divergence: div minus grad tr weighted by 1/(Ncal+C-1) on the
/// image. Maps the (s,k) slice into (s-1,k); the weight is never singular
/// because the image slices all have Ncal+C-1 > 0.
pub fn div_tilde(psi: &SymTensorField) -> Result<SymTensorField> {
    let one = NCFun::one();
    let ncpc = NCFun::from_poly(
        crate::exact::ncpoly::NCPoly::ncal()
            .add(&crate::exact::ncpoly::NCPoly::ccal())
            .sub(&crate::exact::ncpoly::NCPoly::one()),
    );
    let weight = one.div(&ncpc).expect("nonzero");
    let corr = apply_ncfun(&grad(&op_tr(psi)), &weight)?;
    div(psi).sub(&corr)
}

fn half_ncfun(num_shift: i64, den: NCFun) -> NCFun {
    // (Ncal + C + num_shift) / (2 den)
    let num = crate::exact::ncpoly::NCPoly::ncal()
        .add(&crate::exact::ncpoly::NCPoly::ccal())
        .add(&crate::exact::ncpoly::NCPoly::constant(rat_i(num_shift)));
    NCFun::from_poly(num).div(&den.scale(&rat_i(2))).expect("nonzero denominator")
}

/// Rebuild grad from the adapted operators, slice by slice:
/// grad = gradt (Ncal+C-1)/(2C) + g (Ncal+C-3)/(2(C-1)(Ncal+C-1)) divt,
/// with both weights evaluated on the source spectrum. Evaluating at the
/// source matters: in two dimensions gradt and divt each annihilate whole
/// slices whose weight carries the matching pole, so an image-side
/// evaluation would miss the degeneracy and silently return the wrong
/// tensor. Slices with s = 0 have no divt term at all, and only the first
/// weight is consulted there.
pub fn reconstruct_grad(psi: &SymTensorField) -> Result<SymTensorField> {
    let geo = psi.geometry().clone();
    let n = geo.dim() as u32;
    let dec = trace_decompose(psi)?;
    let one = rat_i(1);
    let mut acc = SymTensorField::zero(geo);
    for comp in &dec.components {
        let singular = Error::DenominatorSingularOnSpectrum { s: comp.s, k: comp.k, dim: n };
        let nc = comp.ncal_eig();
        let cc = comp.ccal_eig();
        if cc.is_zero() {
            return Err(singular);
        }
        let w1 = (&nc + &cc - &one) / (&cc * rat_i(2));
        let slice = comp.embedded();
        let mut piece = grad_tilde(&slice.scale(&w1))?;
        if comp.s >= 1 {
            let den = (&cc - &one) * (&nc + &cc - &one) * rat_i(2);
            if den.is_zero() {
                return Err(singular);
            }
            let w2 = (&nc + &cc - rat_i(3)) / den;
            piece = piece
                .add(&op_g(&div_tilde(&slice.scale(&w2))?))
                .expect("same geometry");
        }
        acc = acc.add(&piece).expect("same geometry");
    }
    Ok(acc)
}

/// Rebuild div from the adapted operators, weights applied at the source:
/// div = divt(f1 psi) + gradt(tr(f2 psi)).
pub fn reconstruct_div(psi: &SymTensorField) -> Result<SymTensorField> {
    use crate::exact::ncpoly::NCPoly;
    let f1 = half_ncfun(-3, NCFun::from_poly(NCPoly::ccal().sub(&NCPoly::one())));
    let f2 = half_ncfun(
        -3,
        NCFun::from_poly(
            NCPoly::ccal().mul(&NCPoly::ncal().add(&NCPoly::ccal()).sub(&NCPoly::one())),
        ),
    );
    let a = div_tilde(&apply_ncfun(psi, &f1)?)?;
    let b = grad_tilde(&op_tr(&apply_ncfun(psi, &f2)?))?;
    a.add(&b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ncpoly::NCPoly;
    use crate::geometry::Geometry;
    use crate::tensor::{make_tensor, random_tensor};
    use std::sync::Arc;

    fn flat(n: u32) -> Arc<Geometry> {
        Arc::new(Geometry::flat(n, 0).unwrap())
    }

    fn hyp(n: usize) -> Arc<Geometry> {
        Arc::new(Geometry::hyperbolic(n).unwrap())
    }

    fn t(geo: &Arc<Geometry>, s: &str) -> SymTensorField {
        make_tensor(geo.clone(), s).unwrap()
    }

    #[test]
    fn rank2_split_euclidean_plane() {
        let e2 = flat(2);
        let dec = trace_decompose(&t(&e2, "u1^2")).unwrap();
        assert_eq!(dec.components.len(), 2);
        let tf = &dec.components[0];
        assert_eq!((tf.s, tf.k), (2, 0));
        assert_eq!(tf.phi, t(&e2, "1/2*u1^2 - 1/2*u2^2"));
        let pure = &dec.components[1];
        assert_eq!((pure.s, pure.k), (0, 1));
        assert_eq!(pure.phi, t(&e2, "1/2"));
    }

    #[test]
    fn eigenvalue_accessors() {
        let e3 = flat(3);
        let dec = trace_decompose(&t(&e3, "u1")).unwrap();
        let c = &dec.components[0];
        assert_eq!(c.ncal_eig(), rat(5, 2));
        assert_eq!(c.ccal_eig(), rat(3, 2));
        assert_eq!(c.kappa_eig(), rat_i(0));
        assert_eq!(c.c_eig(), rat_i(-2));
    }

    #[test]
    fn decompose_reassembles_randoms() {
        for geo in [flat(2), flat(3), hyp(2), hyp(3)] {
            for seed in 0..4u64 {
                let psi = random_tensor(geo.clone(), seed, 4, 2);
                let dec = trace_decompose(&psi).unwrap();
                assert_eq!(dec.reassemble(geo.clone()), psi);
                for c in &dec.components {
                    assert!(op_tr(&c.phi).is_zero(), "phi not trace-free at ({},{})", c.s, c.k);
                    assert_eq!(casimir_c(&c.phi), c.phi.scale(&c.c_eig()));
                }
            }
        }
    }

    #[test]
    fn spectral_function_on_rank1() {
        let e3 = flat(3);
        let u1 = t(&e3, "u1");
        // 1/(Ncal+C-1) has eigenvalue 1/3 on a rank-1 trace-free slice in 3d
        let f = NCFun::one()
            .div(&NCFun::from_poly(NCPoly::ncal().add(&NCPoly::ccal()).sub(&NCPoly::one())))
            .unwrap();
        assert_eq!(apply_ncfun(&u1, &f).unwrap(), u1.scale(&rat(1, 3)));
        // C itself
        let c = NCFun::from_poly(NCPoly::ccal());
        assert_eq!(apply_ncfun(&u1, &c).unwrap(), u1.scale(&rat(3, 2)));
    }

    #[test]
    fn spectral_singularity_reported() {
        let e2 = flat(2);
        let one = t(&e2, "1");
        let f = NCFun::one()
            .div(&NCFun::from_poly(NCPoly::ncal().add(&NCPoly::ccal()).sub(&NCPoly::one())))
            .unwrap();
        assert_eq!(
            apply_ncfun(&one, &f),
            Err(Error::DenominatorSingularOnSpectrum { s: 0, k: 0, dim: 2 })
        );
    }

    #[test]
    fn box_symbol_rejected_in_plain_apply() {
        let e2 = flat(2);
        let f = NCFun::from_poly(NCPoly::boxsym());
        assert_eq!(apply_ncfun(&t(&e2, "u1"), &f), Err(Error::BoxSymbolPresent));
    }

    #[test]
    fn kappa_counts_metric_power() {
        let e2 = flat(2);
        // kappa = (Ncal - C - 1)/2
        let kappa = NCFun::from_poly(
            NCPoly::ncal().sub(&NCPoly::ccal()).sub(&NCPoly::one()),
        )
        .scale(&rat(1, 2));
        let g = SymTensorField::metric_field(e2.clone());
        assert_eq!(apply_ncfun(&g, &kappa).unwrap(), g);
        assert!(apply_ncfun(&t(&e2, "u1"), &kappa).unwrap().is_zero());
    }

    #[test]
    fn adapted_gradient_anchor() {
        let e3 = flat(3);
        let gt = grad_tilde(&t(&e3, "x1*u1")).unwrap();
        let expect = t(&e3, "u1^2 - 1/3*(u1^2+u2^2+u3^2)");
        assert_eq!(gt, expect);
        assert!(op_tr(&gt).is_zero());
    }

    #[test]
    fn adapted_divergence_anchor() {
        let e3 = flat(3);
        assert!(div_tilde(&t(&e3, "x1*(u1^2+u2^2+u3^2)")).unwrap().is_zero());
    }

    #[test]
    fn adapted_ops_shift_slices() {
        let h2 = hyp(2);
        for seed in 0..3u64 {
            let psi = random_tensor(h2.clone(), seed, 3, 1);
            for comp in trace_decompose(&psi).unwrap().components {
                let up = trace_decompose(&grad_tilde(&comp.embedded()).unwrap()).unwrap();
                for c in up.components {
                    assert_eq!((c.s, c.k), (comp.s + 1, comp.k));
                }
                let down = trace_decompose(&div_tilde(&comp.embedded()).unwrap()).unwrap();
                for c in down.components {
                    assert_eq!((c.s, c.k), (comp.s - 1, comp.k));
                }
            }
        }
    }

    #[test]
    fn reconstruction_matches_true_operators() {
        use crate::ops::{div, grad};
        // stick to spectra where the inversion weights are regular
        for geo in [flat(3), flat(5), hyp(3)] {
            for seed in 0..3u64 {
                let psi = random_tensor(geo.clone(), seed, 3, 1);
                assert_eq!(reconstruct_grad(&psi).unwrap(), grad(&psi));
                assert_eq!(reconstruct_div(&psi).unwrap(), div(&psi));
            }
        }
    }

    #[test]
    fn reconstruct_grad_example() {
        let e3 = flat(3);
        let psi = t(&e3, "x1*u1");
        assert_eq!(reconstruct_grad(&psi).unwrap(), t(&e3, "u1^2"));
    }

    #[test]
    fn metric_slice_singularity_in_dim4() {
        let e4 = flat(4);
        let g = SymTensorField::metric_field(e4.clone());
        // the div inversion weight has a pole at C = 1, hit by the pure-trace
        // slice in four dimensions
        assert_eq!(
            reconstruct_div(&g),
            Err(Error::DenominatorSingularOnSpectrum { s: 0, k: 1, dim: 4 })
        );
        // the grad inversion weights are regular at C = 1, and the constant
        // scalar kills both terms, matching grad g = 0
        assert!(reconstruct_grad(&g).unwrap().is_zero());
    }
}
