//! Discrete energy `J_ε(u) = ½⟨Au, u⟩ − Σ w F(u)`, its gradient, and the
//! projection onto the Nehari manifold along rays.
//!
//! Energy and constraint share one quadrature, so identities that follow
//! from homogeneity (e.g. `J = ¼‖u‖²_ε` on the manifold for Kerr) hold to
//! round-off.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{inner_weighted, weighted_dot, weighted_sum, CylGrid, Field, SchrodingerOp};
use crate::model::{Nonlinearity, ProblemSpec};
use crate::par;

/// Relative Nehari residual below which a field counts as on the manifold.
pub const NEHARI_TOL: f64 = 1e-10;

const SCALE_FLOOR: f64 = 8.673_617_379_884_035e-19; // 2^-60
const SCALE_CEIL: f64 = 1.152_921_504_606_847e18; // 2^60

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    /// `½‖u‖²_ε`
    pub quad: f64,
    /// `Σ w F(u)`
    pub nl: f64,
    /// `quad − nl`
    pub total: f64,
    /// `‖u‖²_ε − Σ w f(u)u`
    pub nehari: f64,
}

impl EnergyBreakdown {
    /// `|nehari| / ‖u‖²_ε`, or 0 for the zero field.
    pub fn relative_nehari(&self) -> f64 {
        if self.quad == 0.0 {
            0.0
        } else {
            self.nehari.abs() / (2.0 * self.quad)
        }
    }
}

/// A problem instance with its operator assembled once.
#[derive(Debug, Clone)]
pub struct Functional {
    spec: ProblemSpec,
    op: SchrodingerOp,
}

impl Functional {
    pub fn new(spec: &ProblemSpec) -> Result<Self> {
        spec.validate()?;
        let op = SchrodingerOp::new(spec.grid(), &spec.potential, spec.epsilon);
        Ok(Self { spec: spec.clone(), op })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn op(&self) -> &SchrodingerOp {
        &self.op
    }

    pub fn grid(&self) -> &Arc<CylGrid> {
        self.op.grid()
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.spec.nonlinearity
    }

    fn check(&self, u: &Field) -> Result<()> {
        if **u.grid() != **self.grid() {
            Err(Error::GridMismatch)
        } else {
            Ok(())
        }
    }

    pub fn energy(&self, u: &Field) -> Result<EnergyBreakdown> {
        let au = self.op.apply(u)?;
        Ok(self.energy_with(u, &au))
    }

    fn energy_with(&self, u: &Field, au: &Field) -> EnergyBreakdown {
        let g = self.grid();
        let nl_fn = &self.spec.nonlinearity;
        let norm_sq = weighted_dot(g, au.values(), u.values());
        let (n_r, n_s) = (g.n_r, g.n_s);
        let vals = u.values();
        let nl = weighted_sum(g, |_, v| nl_fn.primitive(v), vals);
        let fu_u = par::sum_rows(n_r, |i| {
            let row = &vals[i * n_s..(i + 1) * n_s];
            g.weight(i) * row.iter().map(|&v| nl_fn.f(v) * v).sum::<f64>()
        });
        let quad = 0.5 * norm_sq;
        EnergyBreakdown { quad, nl, total: quad - nl, nehari: norm_sq - fu_u }
    }

    /// `J(v) − J(u)`, evaluated as `½⟨A(v − u), v + u⟩ − Σ w (F(v) − F(u))` so
    /// that small steps are resolved below the round-off of either energy.
    pub fn energy_change(&self, u: &Field, v: &Field) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        let delta = v.axpy(-1.0, u)?;
        let sum = v.axpy(1.0, u)?;
        let a_delta = self.op.apply(&delta)?;
        let quad = 0.5 * weighted_dot(self.grid(), a_delta.values(), sum.values());
        let nl = &self.spec.nonlinearity;
        let g = self.grid();
        let n_s = g.n_s;
        let (uv, vv) = (u.values(), v.values());
        let nl_change = par::sum_rows(g.n_r, |i| {
            let range = i * n_s..(i + 1) * n_s;
            g.weight(i)
                * uv[range.clone()]
                    .iter()
                    .zip(&vv[range])
                    .map(|(&a, &b)| nl.primitive_increment(a, b))
                    .sum::<f64>()
        });
        Ok(quad - nl_change)
    }

    /// `g = Au − f(u)`, the representative of `DJ(u)` in the weighted inner product.
    pub fn gradient(&self, u: &Field) -> Result<Field> {
        let au = self.op.apply(u)?;
        let nl = &self.spec.nonlinearity;
        let mut g = au;
        for (gv, &uv) in g.values_mut().iter_mut().zip(u.values()) {
            *gv -= nl.f(uv);
        }
        Ok(g)
    }

    /// `Σ w f(tu)u / t`, increasing in `t` under the monotonicity assumption on `f(u)/|u|`.
    fn fiber_term(&self, u: &Field, t: f64) -> f64 {
        let nl = &self.spec.nonlinearity;
        weighted_sum(self.grid(), |_, v| nl.f(t * v) * v, u.values()) / t
    }

    fn fiber_term_derivative(&self, u: &Field, t: f64) -> f64 {
        let nl = &self.spec.nonlinearity;
        let a = weighted_sum(self.grid(), |_, v| nl.df(t * v) * v * v, u.values());
        let b = weighted_sum(self.grid(), |_, v| nl.f(t * v) * v, u.values());
        (a * t - b) / (t * t)
    }

    /// The unique `t > 0` with `t²‖u‖²_ε = Σ w f(tu)tu`, i.e. the maximiser of
    /// `t ↦ J(tu)`.
    pub fn fiber_scale(&self, u: &Field) -> Result<f64> {
        self.check(u)?;
        if u.is_zero() {
            return Err(Error::ZeroField);
        }
        let norm_sq = self.op.quadratic_form(u)?;
        if !(norm_sq > 0.0) {
            return Err(Error::ZeroField);
        }
        let phi = |t: f64| self.fiber_term(u, t) - norm_sq;

        // bracket by doubling / halving from t = 1
        let (mut lo, mut hi);
        let at_one = phi(1.0);
        if at_one == 0.0 {
            return Ok(1.0);
        }
        if at_one < 0.0 {
            lo = 1.0;
            hi = 2.0;
            while phi(hi) < 0.0 {
                lo = hi;
                hi *= 2.0;
                if hi > SCALE_CEIL {
                    return Err(Error::DegenerateFiber { last_scale: hi });
                }
            }
        } else {
            hi = 1.0;
            lo = 0.5;
            while phi(lo) > 0.0 {
                hi = lo;
                lo *= 0.5;
                if lo < SCALE_FLOOR {
                    return Err(Error::DegenerateFiber { last_scale: lo });
                }
            }
        }

        while hi - lo > 1e-12 * hi {
            let mid = 0.5 * (lo + hi);
            let v = phi(mid);
            if v == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if v < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut t = 0.5 * (lo + hi);
        // Newton polish inside the final bracket
        for _ in 0..2 {
            let d = self.fiber_term_derivative(u, t);
            if !(d > 0.0) {
                break;
            }
            let next = t - phi(t) / d;
            if !(next >= lo && next <= hi) {
                break;
            }
            t = next;
        }

        debug_assert!(self.max_on_ray(u, t, norm_sq), "fibering maximum not attained at t = {t}");
        Ok(t)
    }

    /// Coarse check that `J(tu)` is maximal at `t` along the ray.
    fn max_on_ray(&self, u: &Field, t: f64, norm_sq: f64) -> bool {
        let nl = &self.spec.nonlinearity;
        let j = |s: f64| {
            0.5 * s * s * norm_sq - weighted_sum(self.grid(), |_, v| nl.primitive(s * v), u.values())
        };
        let peak = j(t);
        (-6..=6).filter(|&m| m != 0).all(|m| {
            let other = j(t * 2f64.powf(m as f64 / 4.0));
            other <= peak + 1e-9 * peak.abs().max(1e-300)
        })
    }

    /// `t(u)·u`.
    pub fn nehari_project(&self, u: &Field) -> Result<Field> {
        let t = self.fiber_scale(u)?;
        Ok(u.scaled(t))
    }

    /// Energy restricted to cells with `r ≤ r_lim` and `|s| ≤ s_lim`, using a
    /// cell-local split of the Dirichlet form whose sum over all cells is
    /// exactly `energy(u).total`.
    pub fn energy_in_region(&self, u: &Field, r_lim: f64, s_lim: f64) -> Result<f64> {
        self.check(u)?;
        let density = self.energy_density(u);
        let g = self.grid();
        let mut acc = 0.0;
        for (i, &r) in g.r_nodes().iter().enumerate() {
            if r > r_lim {
                continue;
            }
            for (j, &s) in g.s_nodes().iter().enumerate() {
                if s.abs() <= s_lim {
                    acc += density[g.index(i, j)];
                }
            }
        }
        Ok(acc)
    }

    /// Per-cell energy contributions (already multiplied by the weights).
    /// Each face term of the Dirichlet form is split evenly between the two
    /// cells sharing the face; faces against the zero ghost go to the inner cell.
    pub fn energy_density(&self, u: &Field) -> Vec<f64> {
        let g = &**self.grid();
        let nl = &self.spec.nonlinearity;
        let (n_r, n_s) = (g.n_r, g.n_s);
        let v = u.values();
        let z = self.op.zeroth_order();
        let h = g.h_r * g.h_s;
        let omega = crate::grid::sphere_measure(g.symmetry_rank);
        let km1 = (g.symmetry_rank - 1) as i32;
        let mut out = vec![0.0; v.len()];
        for i in 0..n_r {
            let w = g.weight(i);
            for j in 0..n_s {
                let k = i * n_s + j;
                out[k] += w * (0.5 * z[k] * v[k] * v[k] - nl.primitive(v[k]));
            }
        }
        // radial faces r_{i+½}, i = 0..n_r−1 (the last one faces the ghost)
        for i in 0..n_r {
            let face_w = omega * ((i + 1) as f64 * g.h_r).powi(km1) * h;
            for j in 0..n_s {
                let k = i * n_s + j;
                let outer = if i + 1 < n_r { v[k + n_s] } else { 0.0 };
                let d = (outer - v[k]) / g.h_r;
                let e = 0.5 * face_w * d * d;
                if i + 1 < n_r {
                    out[k] += 0.5 * e;
                    out[k + n_s] += 0.5 * e;
                } else {
                    out[k] += e;
                }
            }
        }
        // axial faces, including both ghost faces
        for i in 0..n_r {
            let w = g.weight(i);
            for j in 0..=n_s {
                let left = if j > 0 { v[i * n_s + j - 1] } else { 0.0 };
                let right = if j < n_s { v[i * n_s + j] } else { 0.0 };
                let d = (right - left) / g.h_s;
                let e = 0.5 * w * d * d;
                match (j > 0, j < n_s) {
                    (true, true) => {
                        out[i * n_s + j - 1] += 0.5 * e;
                        out[i * n_s + j] += 0.5 * e;
                    }
                    (false, _) => out[i * n_s + j] += e,
                    (_, false) => out[i * n_s + j - 1] += e,
                }
            }
        }
        out
    }
}

pub fn energy(u: &Field, spec: &ProblemSpec) -> Result<EnergyBreakdown> {
    Functional::new(spec)?.energy(u)
}

pub fn gradient(u: &Field, spec: &ProblemSpec) -> Result<Field> {
    Functional::new(spec)?.gradient(u)
}

pub fn fiber_scale(u: &Field, spec: &ProblemSpec) -> Result<f64> {
    Functional::new(spec)?.fiber_scale(u)
}

pub fn nehari_project(u: &Field, spec: &ProblemSpec) -> Result<Field> {
    Functional::new(spec)?.nehari_project(u)
}

/// Component of `g` orthogonal to `u` in the weighted inner product.
pub fn tangential(g: &Field, u: &Field) -> Result<Field> {
    let uu = inner_weighted(u, u)?;
    if uu == 0.0 {
        return Ok(g.clone());
    }
    let c = inner_weighted(g, u)? / uu;
    g.axpy(-c, u)
}
