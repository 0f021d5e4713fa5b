//! Potentials `V(r, s)` and nonlinearities `f(u)` with the metadata the
//! solvers and oracles rely on.

use crate::error::{Error, Result};
use crate::grid::CylGrid;
use std::sync::Arc;

/// Dimension of the Maxwell case.
pub const DEFAULT_DIMENSION: usize = 3;
/// Rank of the rotational symmetry in the Maxwell case.
pub const DEFAULT_SYMMETRY_RANK: usize = 2;

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {value}")))
    }
}

fn expect_params(family: &str, params: &[f64], count: usize) -> Result<()> {
    if params.len() == count {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "family `{family}` takes {count} parameter(s), got {}",
            params.len()
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialFamily {
    /// `V ≡ k`.
    Constant { k: f64 },
    /// Gaussian well: `plateau − (plateau − depth)·exp(−|x|²/width²)`.
    Well { depth: f64, plateau: f64, width: f64 },
    /// Smoothed step: `inner + (outer − inner)·½(1 + tanh((|x| − radius)/smoothing))`.
    RadialStep { inner: f64, outer: f64, radius: f64, smoothing: f64 },
    /// Two Gaussian wells centred on the axis at `s = ±separation/2`,
    /// combined with a pointwise maximum so the minimum stays `depth`.
    DoubleWellAxis { depth: f64, plateau: f64, width: f64, separation: f64 },
}

impl PotentialFamily {
    fn eval(&self, r: f64, s: f64) -> f64 {
        match *self {
            PotentialFamily::Constant { k } => k,
            PotentialFamily::Well { depth, plateau, width } => {
                let rho2 = (r * r + s * s) / (width * width);
                plateau - (plateau - depth) * (-rho2).exp()
            }
            PotentialFamily::RadialStep { inner, outer, radius, smoothing } => {
                let rho = (r * r + s * s).sqrt();
                inner + (outer - inner) * 0.5 * (1.0 + ((rho - radius) / smoothing).tanh())
            }
            PotentialFamily::DoubleWellAxis { depth, plateau, width, separation } => {
                let half = 0.5 * separation;
                let w2 = width * width;
                let g_up = (-(r * r + (s - half) * (s - half)) / w2).exp();
                let g_down = (-(r * r + (s + half) * (s + half)) / w2).exp();
                plateau - (plateau - depth) * g_up.max(g_down)
            }
        }
    }

    fn infimum(&self) -> f64 {
        match *self {
            PotentialFamily::Constant { k } => k,
            PotentialFamily::Well { depth, .. } => depth,
            PotentialFamily::RadialStep { .. } => self.eval(0.0, 0.0),
            PotentialFamily::DoubleWellAxis { depth, .. } => depth,
        }
    }

    fn limit_at_infinity(&self) -> f64 {
        match *self {
            PotentialFamily::Constant { k } => k,
            PotentialFamily::Well { plateau, .. } => plateau,
            PotentialFamily::RadialStep { outer, .. } => outer,
            PotentialFamily::DoubleWellAxis { plateau, .. } => plateau,
        }
    }
}

/// A cylindrically invariant potential `V(r, s)`, `r = |y|`, `s = z`.
///
/// The evaluation signature only admits `r`, so invariance under rotations
/// of `y` holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    family: PotentialFamily,
    shift: f64,
    dimension: usize,
    symmetry_rank: usize,
}

impl Potential {
    /// Named families: `constant [k]`, `well [depth, plateau, width]`,
    /// `radial-step [inner, outer, radius, smoothing]`,
    /// `double-well-axis [depth, plateau, width, separation]`.
    pub fn builtin(name: &str, params: &[f64]) -> Result<Self> {
        let family = match name {
            "constant" => {
                expect_params(name, params, 1)?;
                check_positive("k", params[0])?;
                PotentialFamily::Constant { k: params[0] }
            }
            "well" => {
                expect_params(name, params, 3)?;
                let (depth, plateau, width) = (params[0], params[1], params[2]);
                check_positive("depth", depth)?;
                check_positive("width", width)?;
                if !(plateau > depth) {
                    return Err(Error::InvalidParameter(format!(
                        "well needs plateau > depth (V(0) < V_inf), got depth {depth}, plateau {plateau}"
                    )));
                }
                PotentialFamily::Well { depth, plateau, width }
            }
            "radial-step" => {
                expect_params(name, params, 4)?;
                let (inner, outer, radius, smoothing) = (params[0], params[1], params[2], params[3]);
                check_positive("inner", inner)?;
                check_positive("radius", radius)?;
                check_positive("smoothing", smoothing)?;
                if !(outer > inner) {
                    return Err(Error::InvalidParameter(format!(
                        "radial-step needs outer > inner, got inner {inner}, outer {outer}"
                    )));
                }
                PotentialFamily::RadialStep { inner, outer, radius, smoothing }
            }
            "double-well-axis" => {
                expect_params(name, params, 4)?;
                let (depth, plateau, width, separation) = (params[0], params[1], params[2], params[3]);
                check_positive("depth", depth)?;
                check_positive("width", width)?;
                check_positive("separation", separation)?;
                if !(plateau > depth) {
                    return Err(Error::InvalidParameter(format!(
                        "double-well-axis needs plateau > depth, got depth {depth}, plateau {plateau}"
                    )));
                }
                PotentialFamily::DoubleWellAxis { depth, plateau, width, separation }
            }
            other => return Err(Error::UnknownFamily { kind: "potential", name: other.to_string() }),
        };
        Ok(Self { family, shift: 0.0, dimension: DEFAULT_DIMENSION, symmetry_rank: DEFAULT_SYMMETRY_RANK })
    }

    pub fn constant(k: f64) -> Result<Self> {
        Self::builtin("constant", &[k])
    }

    /// Same family in `ℝ^N` with `O(K)` symmetry in the first `K` variables.
    pub fn with_dimension(mut self, dimension: usize, symmetry_rank: usize) -> Result<Self> {
        if !(dimension > symmetry_rank && symmetry_rank >= 2) {
            return Err(Error::InvalidParameter(format!(
                "need N > K >= 2, got N = {dimension}, K = {symmetry_rank}"
            )));
        }
        self.dimension = dimension;
        self.symmetry_rank = symmetry_rank;
        Ok(self)
    }

    /// `V + h`. Fails if the shifted infimum is not positive.
    pub fn shifted(&self, h: f64) -> Result<Self> {
        let out = Self { shift: self.shift + h, ..self.clone() };
        if !(out.v0() > 0.0) {
            return Err(Error::Precondition(format!("shift {h} makes inf V = {} non-positive", out.v0())));
        }
        Ok(out)
    }

    #[inline]
    pub fn eval(&self, r: f64, s: f64) -> f64 {
        self.family.eval(r, s) + self.shift
    }

    /// `V_ε(r, s) = V(εr, εs)`.
    #[inline]
    pub fn eval_scaled(&self, epsilon: f64, r: f64, s: f64) -> f64 {
        self.eval(epsilon * r, epsilon * s)
    }

    pub fn v0(&self) -> f64 {
        self.family.infimum() + self.shift
    }

    pub fn v_infinity(&self) -> f64 {
        self.family.limit_at_infinity() + self.shift
    }

    /// All builtins are smooth, hence Lipschitz at the origin.
    pub fn holder_exponent_at_zero(&self) -> Option<f64> {
        Some(1.0)
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.family, PotentialFamily::Constant { .. })
    }

    pub fn family(&self) -> &PotentialFamily {
        &self.family
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn symmetry_rank(&self) -> usize {
        self.symmetry_rank
    }

    /// Sampled check of the standing assumptions on a `(r, s)` net of
    /// `n × n` points over `[0, extent] × [−extent, extent]` plus expanding
    /// shells out to `64·extent`.
    pub fn check_assumptions(&self, extent: f64, n: usize) -> Result<()> {
        let v0 = self.v0();
        if !(v0 > 0.0) {
            return Err(Error::InvalidParameter(format!("inf V = {v0} is not positive")));
        }
        let tol = 1e-12 * v0.abs().max(1.0);
        let step = 1.0 / (n.max(2) - 1) as f64;
        for a in 0..n {
            for b in 0..n {
                let r = extent * a as f64 * step;
                let s = extent * (2.0 * b as f64 * step - 1.0);
                let v = self.eval(r, s);
                if v < v0 - tol {
                    return Err(Error::InvalidParameter(format!(
                        "V({r}, {s}) = {v} lies below the declared infimum {v0}"
                    )));
                }
            }
        }
        if !self.is_constant() {
            let at_origin = self.eval(0.0, 0.0);
            let v_inf = self.v_infinity();
            if !(at_origin < v_inf) {
                return Err(Error::InvalidParameter(format!(
                    "V(0) = {at_origin} is not below V_inf = {v_inf}"
                )));
            }
            // The far shells must approach V_inf from below or at it.
            let mut radius = extent;
            for _ in 0..7 {
                for k in 0..=16 {
                    let theta = std::f64::consts::PI * k as f64 / 16.0;
                    let v = self.eval(radius * theta.sin(), radius * theta.cos());
                    if v > v_inf + 1e-9 * v_inf.abs().max(1.0) {
                        return Err(Error::InvalidParameter(format!(
                            "V exceeds V_inf = {v_inf} on the shell |x| = {radius}"
                        )));
                    }
                }
                radius *= 2.0;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NonlinearityKind {
    /// `f(u) = ½χ⁽³⁾|u|²u`.
    Kerr { chi3: f64 },
    /// `f(u) = |u|^{p−2}u`.
    PurePower { p: f64 },
    /// `f(u) = a|u|^{p1−2}u + b|u|^{p2−2}u`.
    MixedPower { a: f64, p1: f64, b: f64, p2: f64 },
}

/// An odd nonlinearity `f` together with its primitive `F(u) = ∫₀ᵘ f`.
#[derive(Debug, Clone, PartialEq)]
pub struct Nonlinearity {
    kind: NonlinearityKind,
    dimension: usize,
}

/// `2N/(N−2)`; infinite for `N ≤ 2`.
pub fn critical_exponent(dimension: usize) -> f64 {
    if dimension <= 2 {
        f64::INFINITY
    } else {
        2.0 * dimension as f64 / (dimension as f64 - 2.0)
    }
}

#[inline]
fn signed_power(u: f64, q: f64) -> f64 {
    // |u|^{q-1} sign(u), written as |u|^{q-2} u
    if u == 0.0 {
        0.0
    } else {
        u.abs().powf(q - 2.0) * u
    }
}

impl Nonlinearity {
    /// Named families in dimension 3: `kerr [chi3]`, `pure-power [p]`,
    /// `mixed-power [a, p1, b, p2]`.
    pub fn builtin(name: &str, params: &[f64]) -> Result<Self> {
        Self::builtin_in_dimension(name, params, DEFAULT_DIMENSION)
    }

    pub fn builtin_in_dimension(name: &str, params: &[f64], dimension: usize) -> Result<Self> {
        let critical = critical_exponent(dimension);
        let check_exponent = |label: &str, p: f64| -> Result<()> {
            if p > 2.0 && p < critical {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{label} = {p} must lie in (2, {critical})")))
            }
        };
        let kind = match name {
            "kerr" => {
                expect_params(name, params, 1)?;
                check_positive("chi3", params[0])?;
                check_exponent("kerr growth exponent", 4.0)?;
                NonlinearityKind::Kerr { chi3: params[0] }
            }
            "pure-power" => {
                expect_params(name, params, 1)?;
                check_exponent("p", params[0])?;
                NonlinearityKind::PurePower { p: params[0] }
            }
            "mixed-power" => {
                expect_params(name, params, 4)?;
                let (a, p1, b, p2) = (params[0], params[1], params[2], params[3]);
                check_positive("a", a)?;
                check_positive("b", b)?;
                check_exponent("p1", p1)?;
                check_exponent("p2", p2)?;
                NonlinearityKind::MixedPower { a, p1, b, p2 }
            }
            other => return Err(Error::UnknownFamily { kind: "nonlinearity", name: other.to_string() }),
        };
        Ok(Self { kind, dimension })
    }

    pub fn kerr(chi3: f64) -> Result<Self> {
        Self::builtin("kerr", &[chi3])
    }

    pub fn pure_power(p: f64) -> Result<Self> {
        Self::builtin("pure-power", &[p])
    }

    #[inline]
    pub fn f(&self, u: f64) -> f64 {
        match self.kind {
            NonlinearityKind::Kerr { chi3 } => 0.5 * chi3 * u * u * u,
            NonlinearityKind::PurePower { p } => signed_power(u, p),
            NonlinearityKind::MixedPower { a, p1, b, p2 } => {
                a * signed_power(u, p1) + b * signed_power(u, p2)
            }
        }
    }

    /// Primitive `F(u) = ∫₀ᵘ f`.
    #[inline]
    pub fn primitive(&self, u: f64) -> f64 {
        match self.kind {
            NonlinearityKind::Kerr { chi3 } => {
                let u2 = u * u;
                0.125 * chi3 * u2 * u2
            }
            NonlinearityKind::PurePower { p } => u.abs().powf(p) / p,
            NonlinearityKind::MixedPower { a, p1, b, p2 } => {
                let m = u.abs();
                a * m.powf(p1) / p1 + b * m.powf(p2) / p2
            }
        }
    }

    /// `F(v) − F(u)` without the cancellation of subtracting two primitives.
    #[inline]
    pub fn primitive_increment(&self, u: f64, v: f64) -> f64 {
        let d = v - u;
        match self.kind {
            NonlinearityKind::Kerr { chi3 } => 0.125 * chi3 * d * (v + u) * (v * v + u * u),
            _ => {
                let scale = u.abs().max(v.abs());
                if d.abs() <= 1e-2 * scale {
                    // Simpson on [u, v]
                    let m = 0.5 * (u + v);
                    d / 6.0 * (self.f(u) + 4.0 * self.f(m) + self.f(v))
                } else {
                    self.primitive(v) - self.primitive(u)
                }
            }
        }
    }

    /// `f'(u)`.
    #[inline]
    pub fn df(&self, u: f64) -> f64 {
        match self.kind {
            NonlinearityKind::Kerr { chi3 } => 1.5 * chi3 * u * u,
            NonlinearityKind::PurePower { p } => (p - 1.0) * u.abs().powf(p - 2.0),
            NonlinearityKind::MixedPower { a, p1, b, p2 } => {
                let m = u.abs();
                a * (p1 - 1.0) * m.powf(p1 - 2.0) + b * (p2 - 1.0) * m.powf(p2 - 2.0)
            }
        }
    }

    /// Growth exponent `p` in `|f(u)| ≲ 1 + |u|^{p−1}`.
    pub fn growth_exponent(&self) -> f64 {
        match self.kind {
            NonlinearityKind::Kerr { .. } => 4.0,
            NonlinearityKind::PurePower { p } => p,
            NonlinearityKind::MixedPower { p1, p2, .. } => p1.max(p2),
        }
    }

    /// Every builtin is odd.
    pub fn is_odd(&self) -> bool {
        true
    }

    pub fn kerr_chi3(&self) -> Option<f64> {
        match self.kind {
            NonlinearityKind::Kerr { chi3 } => Some(chi3),
            _ => None,
        }
    }

    /// `Some(p)` when `f(tu) = t^{p−1} f(u)` for all `t > 0`.
    pub fn homogeneity(&self) -> Option<f64> {
        match self.kind {
            NonlinearityKind::Kerr { .. } => Some(4.0),
            NonlinearityKind::PurePower { p } => Some(p),
            NonlinearityKind::MixedPower { .. } => None,
        }
    }

    pub fn kind(&self) -> &NonlinearityKind {
        &self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Sampled check of growth, `f(u) = o(u)`, monotonicity of `f(u)/|u|`
    /// and of `F` against quadrature, on `[−bound, bound]`.
    pub fn check_assumptions(&self, bound: f64, samples: usize) -> Result<()> {
        let p = self.growth_exponent();
        if !(p > 2.0 && p < critical_exponent(self.dimension)) {
            return Err(Error::InvalidParameter(format!("growth exponent {p} out of range")));
        }
        let n = samples.max(16);
        let grid: Vec<f64> = (1..=n).map(|k| bound * k as f64 / n as f64).collect();
        // growth: |f(u)| / (1 + |u|^{p-1}) bounded by its value range on the samples
        let ratio_max =
            grid.iter().map(|&u| self.f(u).abs() / (1.0 + u.powf(p - 1.0))).fold(0.0_f64, f64::max);
        if !ratio_max.is_finite() {
            return Err(Error::InvalidParameter("f is not finite on samples".into()));
        }
        // f(u)/u -> 0
        let small = [1e-2, 1e-4, 1e-6];
        let ratios: Vec<f64> = small.iter().map(|&u| (self.f(u) / u).abs()).collect();
        if !(ratios[2] < ratios[1] && ratios[1] < ratios[0] && ratios[2] < 1e-3) {
            return Err(Error::InvalidParameter("f(u)/u does not vanish at 0".into()));
        }
        // f(u)/|u| strictly increasing on (0, bound], and decreasing-in-magnitude symmetry for u < 0
        for pair in grid.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if !(self.f(b) / b > self.f(a) / a) || !(self.f(-b) / b < self.f(-a) / a) {
                return Err(Error::InvalidParameter(format!(
                    "f(u)/|u| is not increasing between {a} and {b}"
                )));
            }
        }
        // F against composite Simpson on [0, bound]
        let m = 2 * n;
        let h = bound / m as f64;
        let mut simpson = self.f(0.0) + self.f(bound);
        for k in 1..m {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            simpson += w * self.f(k as f64 * h);
        }
        simpson *= h / 3.0;
        let exact = self.primitive(bound);
        if (exact - simpson).abs() > 1e-6 * exact.abs().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "primitive mismatch: F({bound}) = {exact}, quadrature {simpson}"
            )));
        }
        Ok(())
    }
}

/// Domain `(0, r_max] × [−s_max, s_max]` and its resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub r_max: f64,
    pub s_max: f64,
    pub n_r: usize,
    pub n_s: usize,
}

impl Geometry {
    pub fn new(r_max: f64, s_max: f64, n_r: usize, n_s: usize) -> Self {
        Self { r_max, s_max, n_r, n_s }
    }

    /// 128×256 on `(0, 16] × [−32, 32]`.
    pub fn standard() -> Self {
        Self::new(16.0, 32.0, 128, 256)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("r_max", self.r_max)?;
        check_positive("s_max", self.s_max)?;
        if self.n_r < 8 || self.n_s < 8 {
            return Err(Error::InvalidParameter(format!(
                "resolution must be at least 8×8, got {}×{}",
                self.n_r, self.n_s
            )));
        }
        Ok(())
    }
}

/// Everything that defines one instance of the scalar problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub potential: Potential,
    pub nonlinearity: Nonlinearity,
    pub epsilon: f64,
    pub geometry: Geometry,
}

impl ProblemSpec {
    pub fn new(
        potential: Potential,
        nonlinearity: Nonlinearity,
        epsilon: f64,
        geometry: Geometry,
    ) -> Result<Self> {
        let spec = Self { potential, nonlinearity, epsilon, geometry };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("epsilon", self.epsilon)?;
        self.geometry.validate()?;
        let (n, k) = (self.potential.dimension(), self.potential.symmetry_rank());
        if n != k + 1 {
            return Err(Error::InvalidParameter(format!(
                "the cylindrical grid needs N − K = 1, got N = {n}, K = {k}"
            )));
        }
        if self.nonlinearity.dimension() != n {
            return Err(Error::InvalidParameter(format!(
                "nonlinearity set up for N = {}, potential for N = {n}",
                self.nonlinearity.dimension()
            )));
        }
        Ok(())
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.potential.clone(), self.nonlinearity.clone(), epsilon, self.geometry)
    }

    pub fn with_potential(&self, potential: Potential) -> Result<Self> {
        Self::new(potential, self.nonlinearity.clone(), self.epsilon, self.geometry)
    }

    pub fn grid(&self) -> Arc<CylGrid> {
        Arc::new(CylGrid::new(
            self.geometry.n_r,
            self.geometry.n_s,
            self.geometry.r_max,
            self.geometry.s_max,
            self.potential.symmetry_rank(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_potential_is_flat() {
        let v = Potential::builtin("constant", &[1.0]).unwrap();
        assert!(v.is_constant());
        assert_eq!(v.v0(), 1.0);
        assert_eq!(v.v_infinity(), 1.0);
        assert_eq!(v.eval(3.0, -7.0), 1.0);
    }

    #[test]
    fn well_samples_match_metadata() {
        let v = Potential::builtin("well", &[1.0, 2.0, 1.0]).unwrap();
        assert_eq!(v.eval(0.0, 0.0), 1.0);
        assert_eq!(v.v0(), 1.0);
        assert_eq!(v.v_infinity(), 2.0);
        // 101×101 net on [0, 10] × [−10, 10]
        let mut min = f64::INFINITY;
        let mut shell_dev: f64 = 0.0;
        for a in 0..=100 {
            for b in 0..=100 {
                let r = 10.0 * a as f64 / 100.0;
                let s = -10.0 + 20.0 * b as f64 / 100.0;
                let x = v.eval(r, s);
                min = min.min(x);
                if a == 100 || b == 0 || b == 100 {
                    shell_dev = shell_dev.max((x - 2.0).abs());
                }
            }
        }
        assert_eq!(min, 1.0);
        assert!(shell_dev <= 1e-6, "shell deviation {shell_dev}");
        v.check_assumptions(10.0, 101).unwrap();
    }

    #[test]
    fn invalid_potentials_are_rejected() {
        assert!(matches!(Potential::builtin("well", &[2.0, 1.0, 1.0]), Err(Error::InvalidParameter(_))));
        assert!(Potential::builtin("well", &[1.0, 1.0, 1.0]).is_err());
        assert!(Potential::builtin("constant", &[0.0]).is_err());
        assert!(Potential::builtin("constant", &[1.0, 2.0]).is_err());
        assert!(matches!(Potential::builtin("harmonic", &[1.0]), Err(Error::UnknownFamily { .. })));
        assert!(Potential::constant(1.0).unwrap().with_dimension(3, 3).is_err());
    }

    #[test]
    fn every_builtin_potential_is_bounded_below_by_v0() {
        let all = [
            Potential::builtin("constant", &[1.5]).unwrap(),
            Potential::builtin("well", &[1.0, 2.0, 1.5]).unwrap(),
            Potential::builtin("radial-step", &[1.0, 3.0, 2.0, 0.5]).unwrap(),
            Potential::builtin("double-well-axis", &[1.0, 2.0, 1.0, 4.0]).unwrap(),
        ];
        for v in &all {
            v.check_assumptions(12.0, 61).unwrap();
            if !v.is_constant() {
                assert!(v.eval(0.0, 0.0) < v.v_infinity());
            }
        }
        let dw = &all[3];
        assert_relative_eq!(dw.eval(0.0, 2.0), 1.0);
        assert_relative_eq!(dw.eval(0.0, -2.0), 1.0);
    }

    #[test]
    fn shifting_moves_all_metadata() {
        let v = Potential::builtin("well", &[1.0, 2.0, 1.0]).unwrap();
        let w = v.shifted(0.25).unwrap();
        assert_eq!(w.v0(), 1.25);
        assert_eq!(w.v_infinity(), 2.25);
        assert_eq!(w.eval(0.5, 0.5), v.eval(0.5, 0.5) + 0.25);
        assert!(v.shifted(-1.0).is_err());
    }

    #[test]
    fn kerr_and_pure_power_values() {
        let kerr = Nonlinearity::builtin("kerr", &[2.0]).unwrap();
        assert_eq!(kerr.f(1.0), 1.0);
        assert_eq!(kerr.primitive(1.0), 0.25);
        assert_eq!(kerr.growth_exponent(), 4.0);
        assert_eq!(kerr.kerr_chi3(), Some(2.0));
        let cubic = Nonlinearity::builtin("pure-power", &[3.0]).unwrap();
        assert_eq!(cubic.f(2.0), 4.0);
        assert_relative_eq!(cubic.primitive(2.0), 8.0 / 3.0, max_relative = 1e-15);
        assert_eq!(cubic.f(-2.0), -4.0);
    }

    #[test]
    fn kerr_primitive_matches_simpson() {
        let kerr = Nonlinearity::kerr(2.0).unwrap();
        // Simpson is exact for the quartic primitive's cubic integrand
        let m = 200;
        let h = 2.0 / m as f64;
        let mut acc = kerr.f(0.0) + kerr.f(2.0);
        for k in 1..m {
            acc += if k % 2 == 1 { 4.0 } else { 2.0 } * kerr.f(k as f64 * h);
        }
        acc *= h / 3.0;
        assert!((kerr.primitive(2.0) - acc).abs() <= 1e-10);
    }

    #[test]
    fn invalid_nonlinearities_are_rejected() {
        assert!(Nonlinearity::builtin("kerr", &[0.0]).is_err());
        assert!(Nonlinearity::builtin("kerr", &[-1.0]).is_err());
        assert!(Nonlinearity::builtin("pure-power", &[2.0]).is_err());
        assert!(Nonlinearity::builtin("pure-power", &[6.0]).is_err());
        assert!(Nonlinearity::builtin_in_dimension("pure-power", &[5.5], 4).is_err());
        assert!(Nonlinearity::builtin_in_dimension("pure-power", &[3.5], 4).is_ok());
        assert!(matches!(Nonlinearity::builtin("saturable", &[1.0]), Err(Error::UnknownFamily { .. })));
    }

    #[test]
    fn builtin_nonlinearities_satisfy_assumptions() {
        for nl in [
            Nonlinearity::kerr(1.0).unwrap(),
            Nonlinearity::pure_power(3.0).unwrap(),
            Nonlinearity::pure_power(5.5).unwrap(),
            Nonlinearity::builtin("mixed-power", &[1.0, 4.0, 0.5, 5.0]).unwrap(),
        ] {
            nl.check_assumptions(10.0, 400).unwrap();
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let nl = Nonlinearity::builtin("mixed-power", &[1.0, 3.0, 0.5, 5.0]).unwrap();
        for &u in &[-2.0, -0.3, 0.7, 1.9] {
            let d = 1e-6;
            let fd = (nl.f(u + d) - nl.f(u - d)) / (2.0 * d);
            assert_relative_eq!(nl.df(u), fd, max_relative = 1e-7);
        }
    }

    #[test]
    fn spec_validation() {
        let v = Potential::constant(1.0).unwrap();
        let f = Nonlinearity::kerr(1.0).unwrap();
        let g = Geometry::new(4.0, 4.0, 8, 8);
        assert!(ProblemSpec::new(v.clone(), f.clone(), 1.0, g).is_ok());
        assert!(ProblemSpec::new(v.clone(), f.clone(), 0.0, g).is_err());
        assert!(ProblemSpec::new(v.clone(), f.clone(), 1.0, Geometry::new(4.0, 4.0, 7, 8)).is_err());
        let v4 = v.with_dimension(4, 2).unwrap();
        assert!(ProblemSpec::new(v4, f, 1.0, g).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn builtins() -> Vec<Nonlinearity> {
            vec![
                Nonlinearity::kerr(1.3).unwrap(),
                Nonlinearity::pure_power(2.5).unwrap(),
                Nonlinearity::pure_power(4.5).unwrap(),
                Nonlinearity::builtin("mixed-power", &[1.0, 4.0, 1.0, 5.0]).unwrap(),
            ]
        }

        proptest! {
            // t ↦ f(tu)u/t strictly increasing for t > 0, u ≠ 0
            #[test]
            fn fiber_term_is_increasing(u in prop_oneof![-5.0..-1e-3f64, 1e-3..5.0f64]) {
                for nl in builtins() {
                    let mut prev = f64::NEG_INFINITY;
                    for k in 0..60 {
                        let t = 0.05 * 1.12f64.powi(k);
                        let val = nl.f(t * u) * u / t;
                        prop_assert!(val > prev, "{nl:?} at u={u}, t={t}");
                        prev = val;
                    }
                }
            }

            #[test]
            fn potentials_stay_above_infimum(r in 0.0..50.0f64, s in -50.0..50.0f64) {
                for v in [
                    Potential::builtin("well", &[0.5, 2.0, 2.0]).unwrap(),
                    Potential::builtin("radial-step", &[1.0, 3.0, 2.0, 0.5]).unwrap(),
                    Potential::builtin("double-well-axis", &[1.0, 2.0, 1.0, 4.0]).unwrap(),
                ] {
                    prop_assert!(v.eval(r, s) >= v.v0() - 1e-12);
                    prop_assert!(v.eval(r, s) <= v.v_infinity() + 1e-12);
                }
            }
        }
    }
}
