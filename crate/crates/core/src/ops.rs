//! Geometric operators in the fiber-variable representation. A symmetric
//! tensor is a polynomial in u^1..u^n; index operations become u-derivatives
//! and u-multiplications, and the covariant derivative acts on the Laurent
//! coefficients with a connection correction.

use crate::exact::rational::rat_i;
use crate::tensor::SymTensorField;

/// nabla_m = d/dx^m - Gamma^l_{mn} u^n d/du^l.
pub fn covariant_derivative(t: &SymTensorField, m: usize) -> SymTensorField {
    let geo = t.geometry().clone();
    let n = geo.dim();
    let mut out = t.x_derivative(m);
    for l in 0..n {
        for nn in 0..n {
            let gamma = geo.christoffel(l, m, nn);
            if gamma.is_zero() {
                continue;
            }
            let piece = t.u_derivative(l).mul_u(nn).scale_poly(gamma);
            out = out.sub(&piece).expect("same geometry");
        }
    }
    out
}

/// grad = u^m nabla_m, raising the rank by one.
pub fn grad(t: &SymTensorField) -> SymTensorField {
    let geo = t.geometry().clone();
    let mut out = SymTensorField::zero(geo.clone());
    for m in 0..geo.dim() {
        out = out.add(&covariant_derivative(t, m).mul_u(m)).expect("same geometry");
    }
    out
}

/// div = g^{mm} d/du^m nabla_m, lowering the rank by one.
pub fn div(t: &SymTensorField) -> SymTensorField {
    let geo = t.geometry().clone();
    let mut out = SymTensorField::zero(geo.clone());
    for m in 0..geo.dim() {
        let piece = covariant_derivative(t, m).u_derivative(m).scale_poly(geo.inv_metric_diag(m));
        out = out.add(&piece).expect("same geometry");
    }
    out
}

/// Connection Laplacian g^{mm} (nabla_m nabla_m - Gamma^l_{mm} nabla_l).
pub fn bochner_laplacian(t: &SymTensorField) -> SymTensorField {
    let geo = t.geometry().clone();
    let n = geo.dim();
    let mut out = SymTensorField::zero(geo.clone());
    for m in 0..n {
        let mut piece = covariant_derivative(&covariant_derivative(t, m), m);
        for l in 0..n {
            let gamma = geo.christoffel(l, m, m);
            if gamma.is_zero() {
                continue;
            }
            piece = piece.sub(&covariant_derivative(t, l).scale_poly(gamma)).expect("same geometry");
        }
        out = out.add(&piece.scale_poly(geo.inv_metric_diag(m))).expect("same geometry");
    }
    out
}

/// The curvature contraction R_m{}^n{}_r{}^s u^m d/du^n u^r d/du^s, factors
/// applied right to left.
pub fn curvature_op(t: &SymTensorField) -> SymTensorField {
    let geo = t.geometry().clone();
    let n = geo.dim();
    let mut out = SymTensorField::zero(geo.clone());
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let r = geo.riemann_mixed(a, b, c, d);
                    if r.is_zero() {
                        continue;
                    }
                    let piece = t.u_derivative(d).mul_u(c).u_derivative(b).mul_u(a).scale_poly(r);
                    out = out.add(&piece).expect("same geometry");
                }
            }
        }
    }
    out
}

/// Lichnerowicz wave operator: Bochner Laplacian plus the curvature
/// contraction. Central on constant-curvature backgrounds.
pub fn lichnerowicz_box(t: &SymTensorField) -> SymTensorField {
    bochner_laplacian(t).add(&curvature_op(t)).expect("same geometry")
}

/// Rank operator N = u^m d/du^m.
pub fn op_n(t: &SymTensorField) -> SymTensorField {
    let geo = t.geometry().clone();
    let mut out = SymTensorField::zero(geo.clone());
    for m in 0..geo.dim() {
        out = out.add(&t.u_derivative(m).mul_u(m)).expect("same geometry");
    }
    out
}

/// Multiplication by the metric, raising the rank by two.
pub fn op_g(t: &SymTensorField) -> SymTensorField {
    SymTensorField::metric_field(t.geometry().clone()).mul(t).expect("same geometry")
}

/// Trace tr = g^{mm} d2/du^m du^m, lowering the rank by two.
pub fn op_tr(t: &SymTensorField) -> SymTensorField {
    let geo = t.geometry().clone();
    let mut out = SymTensorField::zero(geo.clone());
    for m in 0..geo.dim() {
        let piece = t.u_derivative(m).u_derivative(m).scale_poly(geo.inv_metric_diag(m));
        out = out.add(&piece).expect("same geometry");
    }
    out
}

/// so(d+1,1)-type quadratic Casimir on the fiber: g tr - N (N + n - 2).
/// Eigenvalue -s(s+n-2) on trace-free rank-s symbols.
pub fn casimir_c(t: &SymTensorField) -> SymTensorField {
    let n = t.geometry().dim() as i64;
    let nt = op_n(t);
    op_g(&op_tr(t))
        .sub(&op_n(&nt))
        .expect("same geometry")
        .sub(&nt.scale(&rat_i(n - 2)))
        .expect("same geometry")
}

/// f(g(t)) - g(f(t)), for checking commutation relations on sample tensors.
pub fn commutator_residual(
    f: impl Fn(&SymTensorField) -> SymTensorField,
    g: impl Fn(&SymTensorField) -> SymTensorField,
    t: &SymTensorField,
) -> SymTensorField {
    f(&g(t)).sub(&g(&f(t))).expect("same geometry")
}
