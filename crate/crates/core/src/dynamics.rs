//! Floating-point integrator for the spinning-geodesic model: a point moving
//! on flat or hyperbolic space carrying a complex frame vector z^m, with
//! curvature couplings chosen so the energy, the symplectic triple f, and the
//! doublet v are conserved along the flow.
//!
//! First-order form. The integrated variables are (x, pi, z) with pi the
//! covariant momentum, xdot^mu = g^{mu nu} pi_nu, and
//!
//!   zdot^m  = -xdot^rho omega_rho^m_n z^n + i R^m_n^r_s z^n conj(z)_r z^s
//!   pidot_mu = -1/2 d_mu g^{rho sig} pi_rho pi_sig
//!              + i xdot^rho (d_mu W_rho - d_rho W_mu)
//!              - i omega_mu^m_n (conj(zdot)_m z^n + conj(z)_m zdot^n)
//!
//! where W_rho = omega_rho^m_n conj(z)_m z^n. Every pi term is real: the
//! omega and curvature contractions against conj(z) z are anti-Hermitian, so
//! the explicit factors of i above are forced by reality (the second-order
//! geodesic equation carries the same factor on its curvature force).

// the kernels below index several arrays per loop, mirroring the component
// equations; iterator chains obscure which index is which
#![allow(clippy::needless_range_loop)]

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::rational::rat_i;
use crate::exact::LaurentPoly;
use crate::geometry::{Geometry, GeometryKind};

#[derive(Debug, Clone, Serialize)]
pub struct PhaseState {
    pub x: Vec<f64>,
    /// covariant momentum pi_mu
    pub pi: Vec<f64>,
    /// frame components of the spinning vector, stored as [re, im] pairs
    pub z: Vec<[f64; 2]>,
    pub time: f64,
}

impl PhaseState {
    pub fn new(x: Vec<f64>, pi: Vec<f64>, z: Vec<[f64; 2]>) -> PhaseState {
        PhaseState { x, pi, z, time: 0.0 }
    }

    fn zc(&self) -> Vec<Complex64> {
        self.z.iter().map(|p| Complex64::new(p[0], p[1])).collect()
    }
}

/// Orthonormal frame data for a geometry: vielbein, spin connection, and the
/// frame-component Riemann tensor, all in closed form. Construction verifies
/// covariant constancy of the frame,
/// d_rho e_mu^m - Gamma^nu_{rho mu} e_nu^m + omega_rho^m_n e_mu^n = 0,
/// as an exact polynomial identity against the geometry's Christoffel table,
/// and likewise that the constant frame curvature reproduces the geometry's
/// Riemann tensor through the vielbein.
#[derive(Debug, Clone)]
pub struct FrameData {
    geo: Arc<Geometry>,
}

impl FrameData {
    pub fn new(geo: Arc<Geometry>) -> FrameData {
        let fd = FrameData { geo };
        fd.check_frame_constancy();
        fd.check_frame_curvature();
        fd
    }

    pub fn geometry(&self) -> &Arc<Geometry> {
        &self.geo
    }

    fn n(&self) -> usize {
        self.geo.dim()
    }

    fn hyperbolic(&self) -> bool {
        self.geo.kind() == GeometryKind::Hyperbolic
    }

    /// e_mu^m as an exact Laurent table (diagonal by construction).
    fn vielbein_poly(&self, mu: usize, m: usize) -> LaurentPoly {
        let n = self.n();
        if mu != m {
            return LaurentPoly::zero(n);
        }
        if self.hyperbolic() {
            let mut e = vec![0i32; n];
            e[n - 1] = -1;
            LaurentPoly::monomial(n, e, rat_i(1))
        } else {
            LaurentPoly::constant(n, rat_i(1))
        }
    }

    /// omega_rho^m_n as an exact Laurent table.
    fn omega_poly(&self, rho: usize, m: usize, nn: usize) -> LaurentPoly {
        let n = self.n();
        if !self.hyperbolic() {
            return LaurentPoly::zero(n);
        }
        let last = n - 1;
        let mut c = 0i64;
        if m == last && rho == nn {
            c += 1;
        }
        if nn == last && rho == m {
            c -= 1;
        }
        if c == 0 {
            return LaurentPoly::zero(n);
        }
        let mut e = vec![0i32; n];
        e[n - 1] = -1;
        LaurentPoly::monomial(n, e, rat_i(c))
    }

    fn check_frame_constancy(&self) {
        let n = self.n();
        for rho in 0..n {
            for mu in 0..n {
                for m in 0..n {
                    let mut s = self.vielbein_poly(mu, m).derivative(rho);
                    for nu in 0..n {
                        let t = self.geo.christoffel(nu, rho, mu).mul(&self.vielbein_poly(nu, m));
                        s = s.sub(&t.unwrap()).unwrap();
                    }
                    for k in 0..n {
                        let t = self.omega_poly(rho, m, k).mul(&self.vielbein_poly(mu, k));
                        s = s.add(&t.unwrap()).unwrap();
                    }
                    assert!(s.is_zero(), "frame not covariantly constant at ({rho},{mu},{m})");
                }
            }
        }
    }

    fn check_frame_curvature(&self) {
        // R_{mu nu rho sig} = F_{mnrs} e_mu^m e_nu^n e_rho^r e_sig^s with F
        // the constant frame table used by the integrator
        let n = self.n();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let f = self.riemann_frame_lower(a, b, c, d);
                        let mut expect = LaurentPoly::constant(n, rat_i(f as i64));
                        for (mu, m) in [(a, a), (b, b), (c, c), (d, d)] {
                            expect = expect.mul(&self.vielbein_poly(mu, m)).unwrap();
                        }
                        let diff = self.geo.riemann_down(a, b, c, d).sub(&expect).unwrap();
                        assert!(diff.is_zero(), "frame curvature mismatch at ({a},{b},{c},{d})");
                    }
                }
            }
        }
    }

    fn riemann_frame_lower(&self, m: usize, n: usize, r: usize, s: usize) -> f64 {
        if !self.hyperbolic() {
            return 0.0;
        }
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        -(d(m, r) * d(n, s) - d(m, s) * d(n, r))
    }

    /// R^m_n^r_s in frame components; the frame metric is Euclidean on the
    /// hyperbolic side, so raising indices costs nothing.
    pub fn riemann_frame(&self, m: usize, n: usize, r: usize, s: usize) -> f64 {
        self.riemann_frame_lower(m, n, r, s)
    }

    fn height(&self, x: &[f64]) -> f64 {
        x[self.n() - 1]
    }

    fn check_interior(&self, x: &[f64]) -> Result<()> {
        if self.hyperbolic() && self.height(x) <= 0.0 {
            return Err(Error::BoundaryCrossing(self.height(x)));
        }
        Ok(())
    }

    /// diagonal of g^{mu nu} at x
    pub fn inv_metric_at(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        match self.geo.kind() {
            GeometryKind::Flat { p, .. } => {
                (0..n).map(|i| if (i as u32) < p { 1.0 } else { -1.0 }).collect()
            }
            GeometryKind::Hyperbolic => {
                let y2 = self.height(x) * self.height(x);
                vec![y2; n]
            }
        }
    }

    /// diagonal of d g^{rho rho} / d x^mu at x
    fn d_inv_metric_at(&self, x: &[f64], mu: usize) -> Vec<f64> {
        let n = self.n();
        if self.hyperbolic() && mu == n - 1 {
            vec![2.0 * self.height(x); n]
        } else {
            vec![0.0; n]
        }
    }

    fn omega_at(&self, x: &[f64], rho: usize, m: usize, nn: usize) -> f64 {
        if !self.hyperbolic() {
            return 0.0;
        }
        let last = self.n() - 1;
        let mut c = 0.0;
        if m == last && rho == nn {
            c += 1.0;
        }
        if nn == last && rho == m {
            c -= 1.0;
        }
        c / self.height(x)
    }

    /// d omega_rho^m_n / d x^mu
    fn d_omega_at(&self, x: &[f64], mu: usize, rho: usize, m: usize, nn: usize) -> f64 {
        if !self.hyperbolic() || mu != self.n() - 1 {
            return 0.0;
        }
        let y = self.height(x);
        -self.omega_at(x, rho, m, nn) / y
    }

    /// Gamma^l_{m n} at x, for coordinate-component transport.
    pub fn christoffel_at(&self, x: &[f64], l: usize, m: usize, nn: usize) -> f64 {
        if !self.hyperbolic() {
            return 0.0;
        }
        let last = self.n() - 1;
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        -(d(l, m) * d(nn, last) + d(l, nn) * d(m, last) - d(m, nn) * d(l, last))
            / self.height(x)
    }

    /// diagonal factor of the inverse vielbein e_m^mu (frame to coordinate)
    fn coord_factor(&self, x: &[f64]) -> f64 {
        if self.hyperbolic() {
            self.height(x)
        } else {
            1.0
        }
    }

    /// frame metric eta_mm (Euclidean for hyperbolic; the flat signature
    /// otherwise)
    fn eta(&self, m: usize) -> f64 {
        match self.geo.kind() {
            GeometryKind::Flat { p, .. } => {
                if (m as u32) < p {
                    1.0
                } else {
                    -1.0
                }
            }
            GeometryKind::Hyperbolic => 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Deriv {
    pub x: Vec<f64>,
    pub pi: Vec<f64>,
    pub z: Vec<Complex64>,
}

const I: Complex64 = Complex64::new(0.0, 1.0);

fn expect_real(w: Complex64) -> f64 {
    debug_assert!(
        w.im.abs() <= 1e-9 * (1.0 + w.re.abs()),
        "imaginary residue {} in a real slot",
        w.im
    );
    w.re
}

pub fn eval_rhs(state: &PhaseState, frame: &FrameData) -> Result<Deriv> {
    let n = frame.n();
    assert!(state.x.len() == n && state.pi.len() == n && state.z.len() == n);
    frame.check_interior(&state.x)?;
    let x = &state.x;
    let z = state.zc();
    let zb: Vec<Complex64> = z.iter().map(|w| w.conj()).collect();

    let ginv = frame.inv_metric_at(x);
    let xdot: Vec<f64> = (0..n).map(|mu| ginv[mu] * state.pi[mu]).collect();

    // zdot^m = -xdot^rho omega_rho^m_n z^n + i R^m_n^r_s z^n conj(z)_r z^s
    let mut zdot = vec![Complex64::new(0.0, 0.0); n];
    for m in 0..n {
        let mut s = Complex64::new(0.0, 0.0);
        for rho in 0..n {
            for nn in 0..n {
                let w = frame.omega_at(x, rho, m, nn);
                if w != 0.0 {
                    s -= xdot[rho] * w * z[nn];
                }
            }
        }
        for nn in 0..n {
            for r in 0..n {
                for ss in 0..n {
                    let rr = frame.riemann_frame(m, nn, r, ss);
                    if rr != 0.0 {
                        s += I * rr * z[nn] * zb[r] * z[ss];
                    }
                }
            }
        }
        zdot[m] = s;
    }

    // W_b = omega_b^m_n conj(z)_m z^n; dw(a, b) = d W_b / d x^a
    let dw = |a: usize, b: usize| -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for m in 0..n {
            for nn in 0..n {
                let w = frame.d_omega_at(x, a, b, m, nn);
                if w != 0.0 {
                    s += w * zb[m] * z[nn];
                }
            }
        }
        s
    };

    let mut pidot = vec![0.0; n];
    for mu in 0..n {
        let dg = frame.d_inv_metric_at(x, mu);
        let mut s = Complex64::new(0.0, 0.0);
        for rho in 0..n {
            s -= 0.5 * dg[rho] * state.pi[rho] * state.pi[rho];
        }
        for rho in 0..n {
            if xdot[rho] != 0.0 {
                s += I * xdot[rho] * (dw(mu, rho) - dw(rho, mu));
            }
        }
        for m in 0..n {
            for nn in 0..n {
                let w = frame.omega_at(x, mu, m, nn);
                if w != 0.0 {
                    s -= I * w * (zdot[m].conj() * z[nn] + zb[m] * zdot[nn]);
                }
            }
        }
        pidot[mu] = expect_real(s);
    }

    Ok(Deriv { x: xdot, pi: pidot, z: zdot })
}

fn advance(s: &PhaseState, k: &Deriv, h: f64) -> PhaseState {
    let n = s.x.len();
    PhaseState {
        x: (0..n).map(|i| s.x[i] + h * k.x[i]).collect(),
        pi: (0..n).map(|i| s.pi[i] + h * k.pi[i]).collect(),
        z: (0..n)
            .map(|i| [s.z[i][0] + h * k.z[i].re, s.z[i][1] + h * k.z[i].im])
            .collect(),
        time: s.time + h,
    }
}

/// Classic fixed-step fourth-order Runge-Kutta. The returned trajectory has
/// steps + 1 entries, starting at state0. Hyperbolic trajectories must keep
/// the height positive at every stage.
pub fn integrate_rk4(
    state0: PhaseState,
    dt: f64,
    steps: usize,
    frame: &FrameData,
) -> Result<Vec<PhaseState>> {
    assert!(dt > 0.0);
    frame.check_interior(&state0.x)?;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(state0);
    for _ in 0..steps {
        let s = out.last().unwrap();
        let k1 = eval_rhs(s, frame)?;
        let k2 = eval_rhs(&advance(s, &k1, dt / 2.0), frame)?;
        let k3 = eval_rhs(&advance(s, &k2, dt / 2.0), frame)?;
        let k4 = eval_rhs(&advance(s, &k3, dt), frame)?;
        let n = s.x.len();
        let comb = Deriv {
            x: (0..n)
                .map(|i| (k1.x[i] + 2.0 * k2.x[i] + 2.0 * k3.x[i] + k4.x[i]) / 6.0)
                .collect(),
            pi: (0..n)
                .map(|i| (k1.pi[i] + 2.0 * k2.pi[i] + 2.0 * k3.pi[i] + k4.pi[i]) / 6.0)
                .collect(),
            z: (0..n)
                .map(|i| (k1.z[i] + 2.0 * k2.z[i] + 2.0 * k3.z[i] + k4.z[i]) / 6.0)
                .collect(),
        };
        let next = advance(s, &comb, dt);
        frame.check_interior(&next.x)?;
        out.push(next);
    }
    Ok(out)
}

/// Conserved charges: the energy H, the symplectic triple f stored in the
/// order (z* z*, z* z, z z), and the doublet v = (i z*.pi, i z.pi) with the
/// contraction through the vielbein. Complex values are [re, im] pairs.
#[derive(Debug, Clone, Serialize)]
pub struct Charges {
    pub h: f64,
    pub f: [[f64; 2]; 3],
    pub v: [[f64; 2]; 2],
}

pub fn noether_charges(state: &PhaseState, frame: &FrameData) -> Charges {
    let n = frame.n();
    let x = &state.x;
    let z = state.zc();
    let zb: Vec<Complex64> = z.iter().map(|w| w.conj()).collect();
    let ginv = frame.inv_metric_at(x);

    let kinetic: f64 = (0..n).map(|mu| ginv[mu] * state.pi[mu] * state.pi[mu]).sum();
    let mut quartic = Complex64::new(0.0, 0.0);
    for m in 0..n {
        for nn in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let rr = frame.riemann_frame(m, nn, r, s);
                    if rr != 0.0 {
                        quartic += rr * zb[m] * z[nn] * zb[r] * z[s];
                    }
                }
            }
        }
    }
    let h = 0.5 * kinetic - 0.5 * expect_real(quartic);

    let mut fzz = Complex64::new(0.0, 0.0);
    let mut fmix = Complex64::new(0.0, 0.0);
    let mut fbb = Complex64::new(0.0, 0.0);
    for m in 0..n {
        let e = frame.eta(m);
        fbb += e * zb[m] * zb[m];
        fmix += e * zb[m] * z[m];
        fzz += e * z[m] * z[m];
    }

    let fac = frame.coord_factor(x);
    let mut v1 = Complex64::new(0.0, 0.0);
    let mut v2 = Complex64::new(0.0, 0.0);
    for m in 0..n {
        v1 += I * fac * zb[m] * state.pi[m];
        v2 += I * fac * z[m] * state.pi[m];
    }

    Charges {
        h,
        f: [[fbb.re, fbb.im], [fmix.re, fmix.im], [fzz.re, fzz.im]],
        v: [[v1.re, v1.im], [v2.re, v2.im]],
    }
}

/// Per-charge maximum over the trajectory of |Q(t) - Q(0)| / max(1, |Q(0)|).
#[derive(Debug, Clone, Serialize)]
pub struct DriftReport {
    pub h: f64,
    pub f: [f64; 3],
    pub v: [f64; 2],
    pub max: f64,
}

pub fn drift_report(trajectory: &[PhaseState], frame: &FrameData) -> DriftReport {
    assert!(!trajectory.is_empty());
    let c = |p: [f64; 2]| Complex64::new(p[0], p[1]);
    let q0 = noether_charges(&trajectory[0], frame);
    let mut dh: f64 = 0.0;
    let mut df = [0.0f64; 3];
    let mut dv = [0.0f64; 2];
    for st in trajectory {
        let q = noether_charges(st, frame);
        dh = dh.max((q.h - q0.h).abs() / 1.0f64.max(q0.h.abs()));
        for i in 0..3 {
            df[i] = df[i].max((c(q.f[i]) - c(q0.f[i])).norm() / 1.0f64.max(c(q0.f[i]).norm()));
        }
        for i in 0..2 {
            dv[i] = dv[i].max((c(q.v[i]) - c(q0.v[i])).norm() / 1.0f64.max(c(q0.v[i]).norm()));
        }
    }
    let max = dh.max(df[0]).max(df[1]).max(df[2]).max(dv[0]).max(dv[1]);
    DriftReport { h: dh, f: df, v: dv, max }
}
