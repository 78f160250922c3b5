use crate::error::{Error, Result};
use crate::exact::rational::{rat_i, Rational};
use crate::exact::LaurentPoly;

/// Background geometry: flat space of arbitrary signature, or the upper
/// half-space model of hyperbolic space with g_{uv} = y^-2 delta_{uv},
/// normalized so the scalar curvature is -n(n-1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryKind {
    Flat { p: u32, q: u32 },
    Hyperbolic,
}

#[derive(Debug, Clone)]
pub struct Geometry {
    dim: usize,
    kind: GeometryKind,
    metric: Vec<LaurentPoly>,     // diagonal g_{mm}
    inv_metric: Vec<LaurentPoly>, // diagonal g^{mm}
    gamma: Vec<LaurentPoly>,      // Gamma^l_{mn}, index l*n^2 + m*n + nn
    riemann: Vec<LaurentPoly>,    // R_{abcd} fully lowered
    riemann_mixed: Vec<LaurentPoly>, // R_a{}^b{}_c{}^d
}

impl PartialEq for Geometry {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.kind == other.kind
    }
}
impl Eq for Geometry {}

#[derive(Debug, Clone, serde::Serialize)]
pub struct GeometryCheck {
    pub name: &'static str,
    pub passed: bool,
}

impl Geometry {
    pub fn flat(p: u32, q: u32) -> Result<Geometry> {
        let n = (p + q) as usize;
        if n == 0 {
            return Err(Error::InvalidFlags("dimension must be positive".into()));
        }
        let mut metric = Vec::with_capacity(n);
        for i in 0..n {
            let sign = if (i as u32) < p { rat_i(1) } else { rat_i(-1) };
            metric.push(LaurentPoly::constant(n, sign));
        }
        let inv_metric = metric.clone(); // (+-1)^-1 = +-1
        let zero = LaurentPoly::zero(n);
        Ok(Geometry {
            dim: n,
            kind: GeometryKind::Flat { p, q },
            metric,
            inv_metric,
            gamma: vec![zero.clone(); n * n * n],
            riemann: vec![zero.clone(); n * n * n * n],
            riemann_mixed: vec![zero; n * n * n * n],
        })
    }

    pub fn hyperbolic(n: usize) -> Result<Geometry> {
        if n == 0 {
            return Err(Error::InvalidFlags("dimension must be positive".into()));
        }

        let metric: Vec<LaurentPoly> =
            (0..n).map(|_| LaurentPoly::monomial(n, y_exp(n, -2), rat_i(1))).collect();
        let inv_metric: Vec<LaurentPoly> =
            (0..n).map(|_| LaurentPoly::monomial(n, y_exp(n, 2), rat_i(1))).collect();

        // Levi-Civita from the diagonal metric:
        // Gamma^l_{mn} = 1/2 g^{ll} (d_m g_{ln} + d_n g_{lm} - d_l g_{mn})
        let mut gamma = vec![LaurentPoly::zero(n); n * n * n];
        for l in 0..n {
            for m in 0..n {
                for nn in 0..n {
                    let mut s = LaurentPoly::zero(n);
                    if l == nn {
                        s = s.add(&metric[l].derivative(m)).unwrap();
                    }
                    if l == m {
                        s = s.add(&metric[l].derivative(nn)).unwrap();
                    }
                    if m == nn {
                        s = s.sub(&metric[m].derivative(l)).unwrap();
                    }
                    let half = LaurentPoly::constant(n, Rational::new(1.into(), 2.into()));
                    gamma[(l * n + m) * n + nn] =
                        inv_metric[l].mul(&s).unwrap().mul(&half).unwrap();
                }
            }
        }

        // R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb}
        //           + Gamma^a_{cl} Gamma^l_{db} - Gamma^a_{dl} Gamma^l_{cb}
        let g = |l: usize, m: usize, nn: usize| &gamma[(l * n + m) * n + nn];
        let mut riemann = vec![LaurentPoly::zero(n); n * n * n * n];
        let mut riemann_mixed = vec![LaurentPoly::zero(n); n * n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut r = g(a, d, b).derivative(c);
                        r = r.sub(&g(a, c, b).derivative(d)).unwrap();
                        for l in 0..n {
                            r = r.add(&g(a, c, l).mul(g(l, d, b)).unwrap()).unwrap();
                            r = r.sub(&g(a, d, l).mul(g(l, c, b)).unwrap()).unwrap();
                        }
                        // lower the first index
                        riemann[((a * n + b) * n + c) * n + d] = metric[a].mul(&r).unwrap();
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        riemann_mixed[((a * n + b) * n + c) * n + d] = inv_metric[b]
                            .mul(&inv_metric[d])
                            .unwrap()
                            .mul(&riemann[((a * n + b) * n + c) * n + d])
                            .unwrap();
                    }
                }
            }
        }

        let geo = Geometry {
            dim: n,
            kind: GeometryKind::Hyperbolic,
            metric,
            inv_metric,
            gamma,
            riemann,
            riemann_mixed,
        };
        let checks = geo.self_check();
        for ch in &checks {
            assert!(ch.passed, "geometry self-check failed: {}", ch.name);
        }
        Ok(geo)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.kind, GeometryKind::Flat { .. })
    }

    pub fn signature(&self) -> (u32, u32) {
        match self.kind {
            GeometryKind::Flat { p, q } => (p, q),
            GeometryKind::Hyperbolic => (self.dim as u32, 0),
        }
    }

    pub fn metric_diag(&self, m: usize) -> &LaurentPoly {
        &self.metric[m]
    }

    pub fn inv_metric_diag(&self, m: usize) -> &LaurentPoly {
        &self.inv_metric[m]
    }

    pub fn christoffel(&self, l: usize, m: usize, nn: usize) -> &LaurentPoly {
        &self.gamma[(l * self.dim + m) * self.dim + nn]
    }

    pub fn riemann_down(&self, a: usize, b: usize, c: usize, d: usize) -> &LaurentPoly {
        let n = self.dim;
        &self.riemann[((a * n + b) * n + c) * n + d]
    }

    /// R_a{}^b{}_c{}^d with the second and fourth indices raised.
    pub fn riemann_mixed(&self, a: usize, b: usize, c: usize, d: usize) -> &LaurentPoly {
        let n = self.dim;
        &self.riemann_mixed[((a * n + b) * n + c) * n + d]
    }

    /// Coordinate display names; the height coordinate of hyperbolic space
    /// prints as `y`.
    pub fn coord_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (1..=self.dim).map(|i| format!("x{i}")).collect();
        if self.kind == GeometryKind::Hyperbolic {
            names[self.dim - 1] = "y".to_string();
        }
        names
    }

    /// Symbolic validation of the derived curvature data. Everything here is
    /// an exact polynomial identity; `passed` is never a tolerance call.
    pub fn self_check(&self) -> Vec<GeometryCheck> {
        let n = self.dim;
        let mut out = Vec::new();
        let zero = LaurentPoly::zero(n);

        // metricity: d_r g_{mn} - Gamma^l_{rm} g_{ln} - Gamma^l_{rn} g_{ml} = 0
        let mut ok = true;
        for r in 0..n {
            for m in 0..n {
                for nn in 0..n {
                    let mut s = if m == nn { self.metric[m].derivative(r) } else { zero.clone() };
                    s = s.sub(&self.christoffel(nn, r, m).mul(&self.metric[nn]).unwrap()).unwrap();
                    s = s.sub(&self.christoffel(m, r, nn).mul(&self.metric[m]).unwrap()).unwrap();
                    ok &= s.is_zero();
                }
            }
        }
        out.push(GeometryCheck { name: "metricity", passed: ok });

        let rd = |a, b, c, d| self.riemann_down(a, b, c, d);

        let mut ok = true;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        ok &= rd(a, b, c, d).add(rd(b, a, c, d)).unwrap().is_zero();
                        ok &= rd(a, b, c, d).add(rd(a, b, d, c)).unwrap().is_zero();
                        ok &= rd(a, b, c, d).sub(rd(c, d, a, b)).unwrap().is_zero();
                    }
                }
            }
        }
        out.push(GeometryCheck { name: "riemann_symmetries", passed: ok });

        let mut ok = true;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let s = rd(a, b, c, d)
                            .add(rd(a, c, d, b))
                            .unwrap()
                            .add(rd(a, d, b, c))
                            .unwrap();
                        ok &= s.is_zero();
                    }
                }
            }
        }
        out.push(GeometryCheck { name: "first_bianchi", passed: ok });

        // constant-curvature table: R_{abcd} = -(g_{ac} g_{bd} - g_{ad} g_{bc})
        let mut ok = true;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut expect = LaurentPoly::zero(n);
                        if a == c && b == d {
                            expect = expect.sub(&self.metric[a].mul(&self.metric[b]).unwrap()).unwrap();
                        }
                        if a == d && b == c {
                            expect = expect.add(&self.metric[a].mul(&self.metric[b]).unwrap()).unwrap();
                        }
                        if self.is_flat() {
                            expect = LaurentPoly::zero(n); // flat: table must vanish outright
                        }
                        ok &= rd(a, b, c, d).sub(&expect).unwrap().is_zero();
                    }
                }
            }
        }
        out.push(GeometryCheck { name: "constant_curvature_table", passed: ok });

        // nabla_k R_{abcd} = 0
        let mut ok = true;
        for k in 0..n {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let mut s = rd(a, b, c, d).derivative(k);
                            for l in 0..n {
                                s = s.sub(&self.christoffel(l, k, a).mul(rd(l, b, c, d)).unwrap()).unwrap();
                                s = s.sub(&self.christoffel(l, k, b).mul(rd(a, l, c, d)).unwrap()).unwrap();
                                s = s.sub(&self.christoffel(l, k, c).mul(rd(a, b, l, d)).unwrap()).unwrap();
                                s = s.sub(&self.christoffel(l, k, d).mul(rd(a, b, c, l)).unwrap()).unwrap();
                            }
                            ok &= s.is_zero();
                        }
                    }
                }
            }
        }
        out.push(GeometryCheck { name: "covariantly_constant_curvature", passed: ok });

        // scalar curvature g^{ac} g^{bd} R_{abcd} = -n(n-1) (0 when flat)
        let mut scal = LaurentPoly::zero(n);
        for a in 0..n {
            for b in 0..n {
                let t = self.inv_metric[a]
                    .mul(&self.inv_metric[b])
                    .unwrap()
                    .mul(rd(a, b, a, b))
                    .unwrap();
                scal = scal.add(&t).unwrap();
            }
        }
        let expect = if self.is_flat() {
            LaurentPoly::zero(n)
        } else {
            LaurentPoly::constant(n, rat_i(-(n as i64) * (n as i64 - 1)))
        };
        out.push(GeometryCheck {
            name: "scalar_curvature",
            passed: scal.sub(&expect).unwrap().is_zero(),
        });

        out
    }
}

fn y_exp(n: usize, k: i32) -> Vec<i32> {
    let mut e = vec![0; n];
    e[n - 1] = k;
    e
}
