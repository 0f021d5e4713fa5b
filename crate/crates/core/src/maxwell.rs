//! Vector fields `U(x) = u(r, x₃)/r·(−x₂, x₁, 0)` on a cartesian box, with
//! central-difference divergence, curl and curl-curl checks.

use std::io::Write;

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::model::{Nonlinearity, Potential};
use crate::par;
use crate::spline::SplineField;

/// Cell-centred cartesian lattice, symmetric about the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianBox {
    pub n: [usize; 3],
    pub h: f64,
}

impl CartesianBox {
    /// `n³` nodes on `[−half_width, half_width]³`.
    pub fn cube(n: usize, half_width: f64) -> Self {
        Self::new([n, n, n], 2.0 * half_width / n as f64)
    }

    pub fn new(n: [usize; 3], h: f64) -> Self {
        assert!(n.iter().all(|&k| k >= 1) && h > 0.0, "empty cartesian box");
        Self { n, h }
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn half_widths(&self) -> [f64; 3] {
        self.n.map(|k| 0.5 * k as f64 * self.h)
    }

    /// First node along each axis.
    pub fn origin(&self) -> [f64; 3] {
        self.n.map(|k| -0.5 * (k as f64 - 1.0) * self.h)
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        (i as f64 - 0.5 * (self.n[axis] as f64 - 1.0)) * self.h
    }

    /// Linear index, `x` fastest.
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n[0] * (j + self.n[1] * k)
    }

    pub fn point(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [self.coord(0, i), self.coord(1, j), self.coord(2, k)]
    }

    fn slab(&self) -> usize {
        self.n[0] * self.n[1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField3 {
    pub grid: CartesianBox,
    pub components: [Vec<f64>; 3],
}

impl VectorField3 {
    pub fn zeros(grid: CartesianBox) -> Self {
        let n = grid.len();
        Self { grid, components: [vec![0.0; n], vec![0.0; n], vec![0.0; n]] }
    }

    pub fn from_fn(grid: CartesianBox, f: impl Fn([f64; 3]) -> [f64; 3] + Sync) -> Self {
        let mut out = Self::zeros(grid);
        for (c, comp) in out.components.iter_mut().enumerate() {
            par::for_each_row_mut(comp, grid.slab(), |k, slab| {
                for j in 0..grid.n[1] {
                    for i in 0..grid.n[0] {
                        slab[i + grid.n[0] * j] = f(grid.point(i, j, k))[c];
                    }
                }
            });
        }
        out
    }

    pub fn at(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        let idx = self.grid.index(i, j, k);
        [self.components[0][idx], self.components[1][idx], self.components[2][idx]]
    }

    pub fn magnitude(&self, idx: usize) -> f64 {
        let [a, b, c] = [&self.components[0], &self.components[1], &self.components[2]];
        (a[idx] * a[idx] + b[idx] * b[idx] + c[idx] * c[idx]).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|c| c.iter().all(|v| v.is_finite()))
    }
}

/// Unit tangent field; zero within half a cell of the axis.
fn ansatz(u: f64, p: [f64; 3], h: f64) -> [f64; 3] {
    let r = p[0].hypot(p[1]);
    if r < 0.5 * h {
        return [0.0; 3];
    }
    [-u * p[1] / r, u * p[0] / r, 0.0]
}

/// Samples the ansatz field from a smooth profile `u(r, z)`.
pub fn reconstruct_with(grid: CartesianBox, profile: impl Fn(f64, f64) -> f64 + Sync) -> VectorField3 {
    VectorField3::from_fn(grid, |p| ansatz(profile(p[0].hypot(p[1]), p[2]), p, grid.h))
}

/// How a grid profile is evaluated between cell centres.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    /// Bilinear in `(r, s)`; continuous only, so second differences of the
    /// sampled field see its kinks.
    Bilinear,
    /// Cubic B-spline through the cell values (`C²`).
    #[default]
    Spline,
}

/// Samples the ansatz field from a computed profile.
pub fn reconstruct(u: &Field, grid: CartesianBox, sampling: Sampling) -> Result<VectorField3> {
    let g = u.grid();
    if g.symmetry_rank != 2 {
        return Err(Error::Precondition(format!(
            "reconstruction needs K = 2, field has K = {}",
            g.symmetry_rank
        )));
    }
    let [hx, hy, hz] = grid.half_widths();
    let corner = hx.hypot(hy);
    if corner > g.r_max || hz > g.s_max {
        return Err(Error::OutsideGrid { r: corner, s: hz });
    }
    let field = match sampling {
        Sampling::Bilinear => reconstruct_with(grid, |r, z| u.interpolate(r, z).unwrap_or(f64::NAN)),
        Sampling::Spline => {
            let sp = SplineField::new(u);
            reconstruct_with(grid, |r, z| sp.eval(r, z).unwrap_or(f64::NAN))
        }
    };
    if !field.is_finite() {
        return Err(Error::OutsideGrid { r: corner, s: hz });
    }
    Ok(field)
}

/// Accuracy of the central differences used for curls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Differences {
    /// `(f₊₁ − f₋₁)/2h`.
    #[default]
    Second,
    /// `(−f₊₂ + 8f₊₁ − 8f₋₁ + f₋₂)/12h`.
    Fourth,
}

impl Differences {
    /// Nodes lost at each face per application.
    pub fn reach(self) -> usize {
        match self {
            Differences::Second => 1,
            Differences::Fourth => 2,
        }
    }
}

#[inline]
fn stride(grid: &CartesianBox, axis: usize) -> usize {
    match axis {
        0 => 1,
        1 => grid.n[0],
        _ => grid.slab(),
    }
}

/// Central difference of component `c` along `axis` at an interior node.
#[inline]
fn diff(comp: &[f64], grid: &CartesianBox, axis: usize, i: usize, j: usize, k: usize) -> f64 {
    let st = stride(grid, axis);
    let idx = grid.index(i, j, k);
    (comp[idx + st] - comp[idx - st]) / (2.0 * grid.h)
}

#[inline]
fn diff_with(
    order: Differences,
    comp: &[f64],
    grid: &CartesianBox,
    axis: usize,
    (i, j, k): (usize, usize, usize),
) -> f64 {
    match order {
        Differences::Second => diff(comp, grid, axis, i, j, k),
        Differences::Fourth => {
            let st = stride(grid, axis);
            let idx = grid.index(i, j, k);
            (8.0 * (comp[idx + st] - comp[idx - st]) - (comp[idx + 2 * st] - comp[idx - 2 * st]))
                / (12.0 * grid.h)
        }
    }
}

fn interior(grid: &CartesianBox, i: usize, j: usize, k: usize, margin: usize) -> bool {
    i >= margin
        && j >= margin
        && k >= margin
        && i + margin < grid.n[0]
        && j + margin < grid.n[1]
        && k + margin < grid.n[2]
}

/// Central-difference divergence; zero on the boundary layer.
pub fn divergence(field: &VectorField3) -> Vec<f64> {
    let g = field.grid;
    let [a, b, c] = [&field.components[0], &field.components[1], &field.components[2]];
    let mut out = vec![0.0; g.len()];
    par::for_each_row_mut(&mut out, g.slab(), |k, slab| {
        for j in 0..g.n[1] {
            for i in 0..g.n[0] {
                if interior(&g, i, j, k, 1) {
                    slab[i + g.n[0] * j] =
                        diff(a, &g, 0, i, j, k) + diff(b, &g, 1, i, j, k) + diff(c, &g, 2, i, j, k);
                }
            }
        }
    });
    out
}

/// Largest `|div U|` over the interior nodes.
pub fn max_divergence(field: &VectorField3) -> f64 {
    divergence(field).iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Central-difference curl; zero on the boundary layer.
pub fn curl(field: &VectorField3) -> VectorField3 {
    curl_with(field, Differences::Second)
}

pub fn curl_with(field: &VectorField3, order: Differences) -> VectorField3 {
    let g = field.grid;
    let m = order.reach();
    let [a, b, c] = [&field.components[0], &field.components[1], &field.components[2]];
    let mut out = VectorField3::zeros(g);
    for (comp, slot) in out.components.iter_mut().enumerate() {
        par::for_each_row_mut(slot, g.slab(), |k, slab| {
            for j in 0..g.n[1] {
                for i in 0..g.n[0] {
                    if !interior(&g, i, j, k, m) {
                        continue;
                    }
                    let d = |f: &[f64], axis| diff_with(order, f, &g, axis, (i, j, k));
                    slab[i + g.n[0] * j] = match comp {
                        0 => d(c, 1) - d(b, 2),
                        1 => d(a, 2) - d(c, 0),
                        _ => d(b, 0) - d(a, 1),
                    };
                }
            }
        });
    }
    out
}

/// `∇×(∇×U)` by nested central differences; valid `2·reach` nodes in
/// from the boundary.
pub fn curl_curl(field: &VectorField3, order: Differences) -> VectorField3 {
    curl_with(&curl_with(field, order), order)
}

/// `g(U) = f(|U|)·U/|U|`, zero where `U = 0`.
fn g_of(nl: &Nonlinearity, u: [f64; 3]) -> [f64; 3] {
    let m = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    if m == 0.0 {
        return [0.0; 3];
    }
    let s = nl.f(m) / m;
    [s * u[0], s * u[1], s * u[2]]
}

/// Sum over `z` slabs of per-slab partial sums, combined in order.
fn slab_sum(grid: &CartesianBox, term: impl Fn(usize, usize, usize) -> f64 + Sync) -> f64 {
    par::sum_rows(grid.n[2], |k| {
        let mut acc = 0.0;
        for j in 0..grid.n[1] {
            for i in 0..grid.n[0] {
                acc += term(i, j, k);
            }
        }
        acc
    })
}

/// `‖∇×∇×U + V_ε U − g(U)‖ / ‖U‖` over nodes two cells in from the boundary.
pub fn curlcurl_residual(
    field: &VectorField3,
    potential: &Potential,
    epsilon: f64,
    nl: &Nonlinearity,
    order: Differences,
) -> f64 {
    let g = field.grid;
    let cc = curl_curl(field, order);
    let m = 2 * order.reach();
    let num = slab_sum(&g, |i, j, k| {
        if !interior(&g, i, j, k, m) {
            return 0.0;
        }
        let p = g.point(i, j, k);
        let v = potential.eval_scaled(epsilon, p[0].hypot(p[1]), p[2]);
        let u = field.at(i, j, k);
        let rhs = g_of(nl, u);
        let lhs = cc.at(i, j, k);
        (0..3).map(|c| (lhs[c] + v * u[c] - rhs[c]).powi(2)).sum::<f64>()
    });
    let den = slab_sum(&g, |i, j, k| {
        if !interior(&g, i, j, k, m) {
            return 0.0;
        }
        let u = field.at(i, j, k);
        u.iter().map(|x| x * x).sum::<f64>()
    });
    if den == 0.0 {
        return 0.0;
    }
    (num / den).sqrt()
}

/// `½∫(|∇×U|² + V_ε|U|²) − ∫F(|U|)` over the interior nodes.
pub fn energy_curl(
    field: &VectorField3,
    potential: &Potential,
    epsilon: f64,
    nl: &Nonlinearity,
    order: Differences,
) -> f64 {
    energy_curl_in_cylinder(field, potential, epsilon, nl, order, f64::INFINITY, f64::INFINITY)
}

/// [`energy_curl`] restricted to nodes with `r ≤ r_lim` and `|x₃| ≤ z_lim`.
pub fn energy_curl_in_cylinder(
    field: &VectorField3,
    potential: &Potential,
    epsilon: f64,
    nl: &Nonlinearity,
    order: Differences,
    r_lim: f64,
    z_lim: f64,
) -> f64 {
    let g = field.grid;
    let cu = curl_with(field, order);
    let m = order.reach();
    let vol = g.h * g.h * g.h;
    slab_sum(&g, |i, j, k| {
        if !interior(&g, i, j, k, m) {
            return 0.0;
        }
        let p = g.point(i, j, k);
        let r = p[0].hypot(p[1]);
        if r > r_lim || p[2].abs() > z_lim {
            return 0.0;
        }
        let idx = g.index(i, j, k);
        let c2: f64 = cu.at(i, j, k).iter().map(|x| x * x).sum();
        let m = field.magnitude(idx);
        let v = potential.eval_scaled(epsilon, r, p[2]);
        vol * (0.5 * (c2 + v * m * m) - nl.primitive(m))
    })
}

/// Rotation by a quarter turn about `x₃`: `(RU)(x) = R·U(R⁻¹x)`.
/// Needs a square cross-section.
pub fn rotate_quarter(field: &VectorField3) -> Result<VectorField3> {
    let g = field.grid;
    if g.n[0] != g.n[1] {
        return Err(Error::Precondition("quarter turn needs n_x = n_y".into()));
    }
    let n = g.n[0];
    let mut out = VectorField3::zeros(g);
    for k in 0..g.n[2] {
        for j in 0..n {
            for i in 0..n {
                // R⁻¹(x, y) = (y, −x)
                let src = field.at(j, n - 1 - i, k);
                let idx = g.index(i, j, k);
                out.components[0][idx] = -src[1];
                out.components[1][idx] = src[0];
                out.components[2][idx] = src[2];
            }
        }
    }
    Ok(out)
}

/// Legacy structured-points text dump, three components per point, `x`
/// fastest.
pub fn write_vtk<W: Write>(mut out: W, field: &VectorField3, title: &str) -> Result<()> {
    let g = field.grid;
    let o = g.origin();
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{}", title.lines().next().unwrap_or(""))?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET STRUCTURED_POINTS")?;
    writeln!(out, "DIMENSIONS {} {} {}", g.n[0], g.n[1], g.n[2])?;
    writeln!(out, "ORIGIN {:.17e} {:.17e} {:.17e}", o[0], o[1], o[2])?;
    writeln!(out, "SPACING {:.17e} {:.17e} {:.17e}", g.h, g.h, g.h)?;
    writeln!(out, "POINT_DATA {}", g.len())?;
    writeln!(out, "VECTORS U double")?;
    for idx in 0..g.len() {
        writeln!(
            out,
            "{:.17e} {:.17e} {:.17e}",
            field.components[0][idx], field.components[1][idx], field.components[2][idx]
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Geometry, ProblemSpec};
    use approx::assert_relative_eq;

    fn kerr() -> Nonlinearity {
        Nonlinearity::kerr(1.0).unwrap()
    }

    fn smooth(r: f64, z: f64) -> f64 {
        r * (-(r * r + z * z)).exp()
    }

    #[test]
    fn box_layout() {
        let b = CartesianBox::cube(4, 2.0);
        assert_eq!(b.h, 1.0);
        assert_eq!(b.origin(), [-1.5; 3]);
        assert_eq!(b.coord(0, 3), 1.5);
        assert_eq!(b.index(1, 2, 3), 1 + 4 * (2 + 4 * 3));
        assert_eq!(b.half_widths(), [2.0; 3]);
    }

    #[test]
    fn ansatz_direct_substitution() {
        let u = ansatz(0.7, [1.0, 0.0, 0.0], 0.1);
        assert_eq!(u, [0.0, 0.7, 0.0]);
        assert_eq!(ansatz(0.7, [0.01, 0.0, 0.0], 0.1), [0.0; 3]);
    }

    #[test]
    fn magnitude_matches_profile() {
        let b = CartesianBox::cube(16, 3.0);
        let f = reconstruct_with(b, smooth);
        for k in 0..16 {
            for j in 0..16 {
                for i in 0..16 {
                    let p = b.point(i, j, k);
                    let r = p[0].hypot(p[1]);
                    let m = f.magnitude(b.index(i, j, k));
                    assert!((m - smooth(r, p[2]).abs()).abs() <= 4.0 * f64::EPSILON * m.max(1e-300));
                    assert_eq!(f.at(i, j, k)[2], 0.0);
                }
            }
        }
    }

    #[test]
    fn linear_field_divergence() {
        let b = CartesianBox::cube(8, 2.0);
        let f = VectorField3::from_fn(b, |p| p);
        let d = divergence(&f);
        for k in 1..7 {
            for j in 1..7 {
                for i in 1..7 {
                    assert_relative_eq!(d[b.index(i, j, k)], 3.0, max_relative = 1e-14);
                }
            }
        }
        assert_eq!(max_divergence(&VectorField3::zeros(b)), 0.0);
    }

    #[test]
    fn divergence_is_second_order() {
        let errs: Vec<f64> = [16usize, 32, 64]
            .iter()
            .map(|&n| max_divergence(&reconstruct_with(CartesianBox::cube(n, 3.0), smooth)))
            .collect();
        for w in errs.windows(2) {
            let slope = (w[0] / w[1]).log2();
            assert!((slope - 2.0).abs() <= 0.3, "{errs:?}");
        }
    }

    #[test]
    fn rigid_rotation_has_constant_curl() {
        let b = CartesianBox::cube(8, 2.0);
        let f = VectorField3::from_fn(b, |p| [-p[1], p[0], 0.0]);
        let c = curl(&f);
        assert_relative_eq!(c.at(3, 4, 4)[2], 2.0, max_relative = 1e-14);
        let cc = curl_curl(&f, Differences::Second);
        for k in 2..6 {
            for j in 2..6 {
                for i in 2..6 {
                    assert!(cc.at(i, j, k).iter().all(|v| v.abs() < 1e-12));
                }
            }
        }
    }

    fn worst_curl_curl_error(
        order: Differences,
        n: usize,
        phi: impl Fn(f64, f64) -> f64 + Sync,
        exact_factor: impl Fn(f64, f64) -> f64,
    ) -> f64 {
        let b = CartesianBox::cube(n, 1.5);
        let f = VectorField3::from_fn(b, |p| {
            let v = phi(p[0].hypot(p[1]), p[2]);
            [-v * p[1], v * p[0], 0.0]
        });
        let cc = curl_curl(&f, order);
        let m = 2 * order.reach();
        let mut worst: f64 = 0.0;
        for k in m..n - m {
            for j in m..n - m {
                for i in m..n - m {
                    let p = b.point(i, j, k);
                    let a = exact_factor(p[0].hypot(p[1]), p[2]);
                    let exact = [-a * p[1], a * p[0], 0.0];
                    let got = cc.at(i, j, k);
                    for c in 0..3 {
                        worst = worst.max((got[c] - exact[c]).abs());
                    }
                }
            }
        }
        worst
    }

    /// `φ = 1 + r² + z²` gives `∇×∇×(φ·(−y, x, 0)) = −10·(−y, x, 0)`,
    /// reproduced exactly by the nested differences.
    #[test]
    fn manufactured_curl_curl_polynomial() {
        for order in [Differences::Second, Differences::Fourth] {
            for n in [10, 14] {
                let err = worst_curl_curl_error(order, n, |r, z| 1.0 + r * r + z * z, |_, _| -10.0);
                assert!(err < 1e-10, "n = {n}: {err}");
            }
        }
    }

    /// `φ = e^{−ρ²}` gives the factor `e^{−ρ²}(10 − 4ρ²)`.
    #[test]
    fn manufactured_curl_curl_converges() {
        let phi = |r: f64, z: f64| (-(r * r + z * z)).exp();
        let exact = |r: f64, z: f64| {
            let rho2 = r * r + z * z;
            (-rho2).exp() * (10.0 - 4.0 * rho2)
        };
        for (order, expected) in [(Differences::Second, 2.0), (Differences::Fourth, 4.0)] {
            let errs: Vec<f64> =
                [16usize, 32, 64].iter().map(|&n| worst_curl_curl_error(order, n, phi, exact)).collect();
            for w in errs.windows(2) {
                let slope = (w[0] / w[1]).log2();
                assert!((slope - expected).abs() <= 0.3, "{order:?}: {errs:?}");
            }
        }
    }

    #[test]
    fn zero_field_diagnostics() {
        let b = CartesianBox::cube(8, 2.0);
        let z = VectorField3::zeros(b);
        let pot = Potential::constant(1.0).unwrap();
        for order in [Differences::Second, Differences::Fourth] {
            assert_eq!(curlcurl_residual(&z, &pot, 1.0, &kerr(), order), 0.0);
            assert_eq!(energy_curl(&z, &pot, 1.0, &kerr(), order), 0.0);
        }
    }

    #[test]
    fn g_is_compatible_with_f() {
        let nl = kerr();
        for k in 0..50 {
            let a = 0.1 * k as f64 - 2.0;
            let theta = 0.37 * k as f64;
            let w = [theta.cos(), theta.sin(), 0.0];
            let gw = g_of(&nl, [a * w[0], a * w[1], a * w[2]]);
            let proj: f64 = gw.iter().zip(&w).map(|(x, y)| x * y).sum();
            assert_relative_eq!(proj, nl.f(a), max_relative = 1e-13, epsilon = 1e-15);
        }
    }

    #[test]
    fn quarter_turn_equivariance() {
        let b = CartesianBox::cube(32, 3.0);
        let f = reconstruct_with(b, smooth);
        let rot = rotate_quarter(&f).unwrap();
        assert_eq!(rot, f);
        let pot = Potential::builtin("well", &[1.0, 2.0, 1.0]).unwrap();
        let e = energy_curl(&f, &pot, 0.5, &kerr(), Differences::Second);
        let e_rot = energy_curl(&rot, &pot, 0.5, &kerr(), Differences::Second);
        assert_relative_eq!(e_rot, e, max_relative = 1e-13);
        // a field without the symmetry is moved, not fixed
        let g = VectorField3::from_fn(b, |p| [p[0], 0.0, 0.0]);
        assert_ne!(rotate_quarter(&g).unwrap(), g);
        assert!(rotate_quarter(&VectorField3::zeros(CartesianBox::new([4, 6, 4], 1.0))).is_err());
    }

    #[test]
    fn reconstruct_checks_bounds() {
        let sp =
            ProblemSpec::new(Potential::constant(1.0).unwrap(), kerr(), 1.0, Geometry::new(4.0, 4.0, 16, 32))
                .unwrap();
        let u = Field::from_fn(sp.grid(), smooth);
        let far = CartesianBox::cube(8, 3.0);
        for sampling in [Sampling::Bilinear, Sampling::Spline] {
            assert!(matches!(reconstruct(&u, far, sampling), Err(Error::OutsideGrid { .. })));
        }
        let b = CartesianBox::cube(8, 2.0);
        let lin = reconstruct(&u, b, Sampling::Bilinear).unwrap();
        let cub = reconstruct(&u, b, Sampling::Spline).unwrap();
        let sp = SplineField::new(&u);
        for (i, j, k) in [(5, 3, 2), (4, 4, 4), (7, 0, 6)] {
            let p = b.point(i, j, k);
            let (r, z) = (p[0].hypot(p[1]), p[2]);
            let idx = b.index(i, j, k);
            assert!((lin.magnitude(idx) - u.interpolate(r, z).unwrap().abs()).abs() <= 1e-15);
            assert!((cub.magnitude(idx) - sp.eval(r, z).unwrap().abs()).abs() <= 1e-15);
        }
    }

    #[test]
    fn vtk_header() {
        let b = CartesianBox::new([2, 3, 1], 0.5);
        let f = VectorField3::from_fn(b, |p| [p[0], p[1], 1.0]);
        let mut buf = Vec::new();
        write_vtk(&mut buf, &f, "test field").unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# vtk DataFile Version 3.0");
        assert_eq!(lines[3], "DATASET STRUCTURED_POINTS");
        assert_eq!(lines[4], "DIMENSIONS 2 3 1");
        assert_eq!(lines[7], "POINT_DATA 6");
        assert_eq!(lines[8], "VECTORS U double");
        assert_eq!(lines.len(), 9 + 6);
        let first: Vec<f64> = lines[9].split(' ').map(|x| x.parse().unwrap()).collect();
        assert_eq!(first, vec![-0.25, -0.5, 1.0]);
    }
}
