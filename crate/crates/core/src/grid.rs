//! Cell-centred grid on `(0, R] × [−S, S]` for fields that depend on
//! `(r, s) = (|y|, z)` only, and the reduced operator `−Δ + r⁻² + V_ε`.
//!
//! Storage is row-major with the radial index outer: `u[i·n_s + j]`.
//! Values outside the rectangle are taken to be zero. The flux through the
//! axis face carries the weight `r^{K−1} = 0`, so the axis needs no ghost.

use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::Potential;
use crate::par;

/// Surface measure of the unit sphere `S^{K−1} ⊂ ℝ^K`.
pub fn sphere_measure(k: usize) -> f64 {
    use std::f64::consts::PI;
    match k {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 2.0) * sphere_measure(k - 2),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CylGrid {
    pub n_r: usize,
    pub n_s: usize,
    pub r_max: f64,
    pub s_max: f64,
    /// Symmetry rank `K`; enters through `r^{K−1}` only.
    pub symmetry_rank: usize,
    pub h_r: f64,
    pub h_s: f64,
    r: Vec<f64>,
    s: Vec<f64>,
    /// `ω_{K−1} r_i^{K−1} h_r h_s`
    cell_weight: Vec<f64>,
    /// `r_{i+½}^{K−1} / (r_i^{K−1} h_r²)`, outer face of cell `i`.
    radial_out: Vec<f64>,
    /// `r_{i−½}^{K−1} / (r_i^{K−1} h_r²)`, inner face of cell `i` (zero at the axis).
    radial_in: Vec<f64>,
}

impl CylGrid {
    pub fn new(n_r: usize, n_s: usize, r_max: f64, s_max: f64, symmetry_rank: usize) -> Self {
        let h_r = r_max / n_r as f64;
        let h_s = 2.0 * s_max / n_s as f64;
        let km1 = (symmetry_rank - 1) as i32;
        let omega = sphere_measure(symmetry_rank);
        let r: Vec<f64> = (0..n_r).map(|i| (i as f64 + 0.5) * h_r).collect();
        let s: Vec<f64> = (0..n_s).map(|j| -s_max + (j as f64 + 0.5) * h_s).collect();
        let cell_weight = r.iter().map(|&ri| omega * ri.powi(km1) * h_r * h_s).collect();
        let radial_out = r
            .iter()
            .enumerate()
            .map(|(i, &ri)| ((i + 1) as f64 * h_r).powi(km1) / (ri.powi(km1) * h_r * h_r))
            .collect();
        let radial_in = r
            .iter()
            .enumerate()
            .map(|(i, &ri)| (i as f64 * h_r).powi(km1) / (ri.powi(km1) * h_r * h_r))
            .collect();
        Self { n_r, n_s, r_max, s_max, symmetry_rank, h_r, h_s, r, s, cell_weight, radial_out, radial_in }
    }

    pub fn len(&self) -> usize {
        self.n_r * self.n_s
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_s + j
    }

    pub fn r_nodes(&self) -> &[f64] {
        &self.r
    }

    pub fn s_nodes(&self) -> &[f64] {
        &self.s
    }

    /// Quadrature weight of cell `(i, ·)`; independent of `j`.
    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        self.cell_weight[i]
    }

    /// `ω_{K−1} R^K / K · 2S`.
    pub fn total_measure(&self) -> f64 {
        let k = self.symmetry_rank as f64;
        sphere_measure(self.symmetry_rank) * self.r_max.powf(k) / k * 2.0 * self.s_max
    }

    /// Bilinear interpolation of cell values at `(r, s)`. The field is taken
    /// to vanish on the axis and on the ghost ring just outside the grid.
    pub fn interpolate(&self, values: &[f64], r: f64, s: f64) -> Result<f64> {
        if !(0.0..=self.r_max).contains(&r) || !(-self.s_max..=self.s_max).contains(&s) {
            return Err(Error::OutsideGrid { r, s });
        }
        let (ia, ib, tr) = bracket(r / self.h_r - 0.5, self.n_r, true);
        let (ja, jb, ts) = bracket((s + self.s_max) / self.h_s - 0.5, self.n_s, false);
        let at = |i: Option<usize>, j: Option<usize>| match (i, j) {
            (Some(i), Some(j)) => values[i * self.n_s + j],
            _ => 0.0,
        };
        let lo = (1.0 - ts) * at(ia, ja) + ts * at(ia, jb);
        let hi = (1.0 - ts) * at(ib, ja) + ts * at(ib, jb);
        Ok((1.0 - tr) * lo + tr * hi)
    }
}

/// Neighbouring node indices around fractional position `x` (in cell units);
/// `None` stands for a zero ghost. With `axis`, the lower ghost sits at
/// `r = 0` (half a cell below node 0) instead of a full cell.
fn bracket(x: f64, n: usize, axis: bool) -> (Option<usize>, Option<usize>, f64) {
    if x < 0.0 {
        // lower ghost: the axis at x = −½, or a zero cell at x = −1
        let lo = if axis { -0.5 } else { -1.0 };
        return (None, Some(0), ((x - lo) / -lo).clamp(0.0, 1.0));
    }
    let i = x.floor() as usize;
    if i + 1 >= n {
        return (Some(n - 1), None, (x - (n - 1) as f64).clamp(0.0, 1.0));
    }
    (Some(i), Some(i + 1), x - i as f64)
}

/// A scalar field on a [`CylGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Arc<CylGrid>,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: Arc<CylGrid>) -> Self {
        let n = grid.len();
        Self { grid, values: vec![0.0; n] }
    }

    pub fn from_values(grid: Arc<CylGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("field entries must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    /// Samples `profile(r, s)` at the cell centres.
    pub fn from_fn<F: FnMut(f64, f64) -> f64>(grid: Arc<CylGrid>, mut profile: F) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for &r in grid.r_nodes() {
            for &s in grid.s_nodes() {
                values.push(profile(r, s));
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<CylGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn same_grid(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scaled(&self, t: f64) -> Field {
        self.map(|v| t * v)
    }

    /// `self + alpha·other`.
    pub fn axpy(&self, alpha: f64, other: &Field) -> Result<Field> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + alpha * b).collect();
        Ok(Field { grid: self.grid.clone(), values })
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn norm(&self) -> f64 {
        weighted_sum(&self.grid, |_, v| v * v, &self.values).sqrt()
    }

    /// Bilinear interpolation at an arbitrary `(r, s)`.
    pub fn interpolate(&self, r: f64, s: f64) -> Result<f64> {
        self.grid.interpolate(&self.values, r, s)
    }
}

/// `Σ_i w_i Σ_j term(i, u_ij)` with a fixed reduction order.
pub(crate) fn weighted_sum<F>(grid: &CylGrid, term: F, values: &[f64]) -> f64
where
    F: Fn(usize, f64) -> f64 + Sync + Send,
{
    let n_s = grid.n_s;
    par::sum_rows(grid.n_r, |i| {
        let row = &values[i * n_s..(i + 1) * n_s];
        grid.weight(i) * row.iter().map(|&v| term(i, v)).sum::<f64>()
    })
}

pub(crate) fn weighted_dot(grid: &CylGrid, a: &[f64], b: &[f64]) -> f64 {
    let n_s = grid.n_s;
    par::sum_rows(grid.n_r, |i| {
        let (ra, rb) = (&a[i * n_s..(i + 1) * n_s], &b[i * n_s..(i + 1) * n_s]);
        grid.weight(i) * ra.iter().zip(rb).map(|(x, y)| x * y).sum::<f64>()
    })
}

/// `Σ w_ij a_ij b_ij`.
pub fn inner_weighted(a: &Field, b: &Field) -> Result<f64> {
    if !a.same_grid(b) {
        return Err(Error::GridMismatch);
    }
    Ok(weighted_dot(&a.grid, &a.values, &b.values))
}

/// The reduced operator `A = −Δ_h + r⁻² + V(εr, εs)` with `V` tabulated
/// on the grid. Symmetric and positive definite in the weighted inner
/// product.
#[derive(Debug, Clone)]
pub struct SchrodingerOp {
    grid: Arc<CylGrid>,
    /// `r⁻² + V_ε` per cell.
    zeroth_order: Vec<f64>,
    diagonal: Vec<f64>,
}

impl SchrodingerOp {
    pub fn new(grid: Arc<CylGrid>, potential: &Potential, epsilon: f64) -> Self {
        let mut zeroth_order = Vec::with_capacity(grid.len());
        let mut diagonal = Vec::with_capacity(grid.len());
        let inv_hs2 = 1.0 / (grid.h_s * grid.h_s);
        for (i, &r) in grid.r_nodes().iter().enumerate() {
            let stencil = grid.radial_in[i] + grid.radial_out[i] + 2.0 * inv_hs2;
            for &s in grid.s_nodes() {
                let c = 1.0 / (r * r) + potential.eval_scaled(epsilon, r, s);
                zeroth_order.push(c);
                diagonal.push(c + stencil);
            }
        }
        Self { grid, zeroth_order, diagonal }
    }

    pub fn grid(&self) -> &Arc<CylGrid> {
        &self.grid
    }

    /// `r⁻² + V_ε` at every cell.
    pub fn zeroth_order(&self) -> &[f64] {
        &self.zeroth_order
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn apply(&self, u: &Field) -> Result<Field> {
        if *u.grid != *self.grid {
            return Err(Error::GridMismatch);
        }
        let mut out = vec![0.0; u.values.len()];
        self.apply_into(&u.values, &mut out);
        Ok(Field { grid: self.grid.clone(), values: out })
    }

    pub(crate) fn apply_into(&self, u: &[f64], out: &mut [f64]) {
        let g = &*self.grid;
        let n_s = g.n_s;
        let n_r = g.n_r;
        let inv_hs2 = 1.0 / (g.h_s * g.h_s);
        par::for_each_row_mut(out, n_s, |i, row| {
            let cur = &u[i * n_s..(i + 1) * n_s];
            let up = if i + 1 < n_r { Some(&u[(i + 1) * n_s..(i + 2) * n_s]) } else { None };
            let down = if i > 0 { Some(&u[(i - 1) * n_s..i * n_s]) } else { None };
            let (c_out, c_in) = (g.radial_out[i], g.radial_in[i]);
            let z = &self.zeroth_order[i * n_s..(i + 1) * n_s];
            for j in 0..n_s {
                let uc = cur[j];
                let u_up = up.map_or(0.0, |x| x[j]);
                let u_down = down.map_or(0.0, |x| x[j]);
                let radial = c_out * (u_up - uc) - c_in * (uc - u_down);
                let s_prev = if j > 0 { cur[j - 1] } else { 0.0 };
                let s_next = if j + 1 < n_s { cur[j + 1] } else { 0.0 };
                let axial = (s_next - 2.0 * uc + s_prev) * inv_hs2;
                row[j] = -radial - axial + z[j] * uc;
            }
        });
    }

    /// `⟨Au, u⟩`, i.e. `‖u‖²_ε` in the discrete setting.
    pub fn quadratic_form(&self, u: &Field) -> Result<f64> {
        let au = self.apply(u)?;
        inner_weighted(&au, u)
    }

    /// Smallest eigenvalue and eigenvector by inverse iteration.
    pub fn lowest_eigenpair(&self, tol: f64, max_iters: usize) -> Result<(f64, Field)> {
        let g = self.grid.clone();
        let mut x = Field::from_fn(g, |r, s| r * (-(r * r + s * s) / 4.0).exp());
        let nx = x.norm();
        x = x.scaled(1.0 / nx);
        let mut lambda = self.quadratic_form(&x)?;
        for _ in 0..max_iters {
            let y = solve_linear(self, &x, 1e-13, 20 * self.grid.len())?;
            let ny = y.norm();
            x = y.scaled(1.0 / ny);
            let next = self.quadratic_form(&x)?;
            let done = (next - lambda).abs() <= tol * next.abs();
            lambda = next;
            if done {
                break;
            }
        }
        Ok((lambda, x))
    }
}

/// `A u` for `A = −Δ_h + r⁻² + V(εx)`.
pub fn apply_schrodinger_op(u: &Field, potential: &Potential, epsilon: f64) -> Result<Field> {
    SchrodingerOp::new(u.grid.clone(), potential, epsilon).apply(u)
}

/// Jacobi-preconditioned conjugate gradients in the weighted inner product.
/// Stops once `‖Ax − rhs‖_w ≤ tol·‖rhs‖_w`.
pub fn solve_linear(op: &SchrodingerOp, rhs: &Field, tol: f64, max_iters: usize) -> Result<Field> {
    solve_linear_from(op, rhs, None, tol, max_iters)
}

pub fn solve_linear_from(
    op: &SchrodingerOp,
    rhs: &Field,
    start: Option<&Field>,
    tol: f64,
    max_iters: usize,
) -> Result<Field> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    if *rhs.grid != *op.grid {
        return Err(Error::GridMismatch);
    }
    let g = &*op.grid;
    let n = g.len();
    let b = &rhs.values;
    let b_norm = weighted_dot(g, b, b).sqrt();
    if b_norm == 0.0 {
        return Ok(Field::zeros(op.grid.clone()));
    }
    let mut x = match start {
        Some(x0) if *x0.grid == *op.grid => x0.values.clone(),
        _ => vec![0.0; n],
    };
    let mut r = vec![0.0; n];
    op.apply_into(&x, &mut r);
    for k in 0..n {
        r[k] = b[k] - r[k];
    }
    let mut z: Vec<f64> = r.iter().zip(&op.diagonal).map(|(ri, d)| ri / d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = weighted_dot(g, &r, &z);
    let mut res = weighted_dot(g, &r, &r).sqrt();
    let target = tol * b_norm;
    let mut it = 0;
    while res > target {
        if it == max_iters {
            return Err(Error::LinearSolve { iterations: it, residual: res / b_norm });
        }
        op.apply_into(&p, &mut ap);
        let pap = weighted_dot(g, &p, &ap);
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        for k in 0..n {
            z[k] = r[k] / op.diagonal[k];
        }
        let rz_next = weighted_dot(g, &r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
        res = weighted_dot(g, &r, &r).sqrt();
        it += 1;
    }
    Ok(Field { grid: op.grid.clone(), values: x })
}

/// Writes `n_r n_s R_max S_max K` followed by the values, radial index outer.
pub fn write_field<W: Write>(mut out: W, field: &Field) -> Result<()> {
    let g = &*field.grid;
    writeln!(out, "{} {} {:.17e} {:.17e} {}", g.n_r, g.n_s, g.r_max, g.s_max, g.symmetry_rank)?;
    for i in 0..g.n_r {
        let row = &field.values[i * g.n_s..(i + 1) * g.n_s];
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn read_field<R: BufRead>(input: R) -> Result<Field> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::Format("missing header".into()))??;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 5 {
        return Err(Error::Format(format!("header needs 5 entries, got {}", parts.len())));
    }
    let bad = |what: &str| Error::Format(format!("cannot parse {what}"));
    let n_r: usize = parts[0].parse().map_err(|_| bad("n_r"))?;
    let n_s: usize = parts[1].parse().map_err(|_| bad("n_s"))?;
    let r_max: f64 = parts[2].parse().map_err(|_| bad("R_max"))?;
    let s_max: f64 = parts[3].parse().map_err(|_| bad("S_max"))?;
    let k: usize = parts[4].parse().map_err(|_| bad("K"))?;
    if n_r == 0 || n_s == 0 || k < 2 || !(r_max > 0.0) || !(s_max > 0.0) {
        return Err(Error::Format("header values out of range".into()));
    }
    let mut values = Vec::with_capacity(n_r * n_s);
    for line in lines {
        for tok in line?.split_whitespace() {
            values.push(tok.parse::<f64>().map_err(|_| bad(&format!("value `{tok}`")))?);
        }
    }
    if values.len() != n_r * n_s {
        return Err(Error::Format(format!("expected {} values, found {}", n_r * n_s, values.len())));
    }
    Field::from_values(Arc::new(CylGrid::new(n_r, n_s, r_max, s_max, k)), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid(n_r: usize, n_s: usize, r_max: f64, s_max: f64) -> Arc<CylGrid> {
        Arc::new(CylGrid::new(n_r, n_s, r_max, s_max, 2))
    }

    fn random_field(g: &Arc<CylGrid>, rng: &mut ChaCha8Rng) -> Field {
        Field::from_fn(g.clone(), |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn nodes_avoid_the_axis() {
        let g = grid(8, 8, 1.0, 1.0);
        assert!(g.r_nodes().iter().all(|&r| r > 0.0));
        assert_relative_eq!(g.r_nodes()[0], 1.0 / 16.0);
        assert_relative_eq!(g.s_nodes()[0], -1.0 + 1.0 / 8.0);
        assert!((0..8).all(|i| g.weight(i) > 0.0));
    }

    #[test]
    fn sphere_measures() {
        assert_relative_eq!(sphere_measure(2), 2.0 * PI);
        assert_relative_eq!(sphere_measure(3), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_measure(4), 2.0 * PI * PI, max_relative = 1e-15);
    }

    #[test]
    fn total_measure_is_exact() {
        for k in [2, 3] {
            let g = Arc::new(CylGrid::new(37, 20, 3.0, 1.5, k));
            let ones = Field::from_fn(g.clone(), |_, _| 1.0);
            let m = inner_weighted(&ones, &ones).unwrap();
            if k == 2 {
                assert_relative_eq!(m, g.total_measure(), max_relative = 1e-12);
            } else {
                // midpoint rule on r²: exact up to the h²/12 correction
                let h = g.h_r;
                let exact = 4.0 * PI * (27.0 / 3.0 - 3.0 * h * h / 12.0) * 3.0;
                assert_relative_eq!(m, exact, max_relative = 1e-12);
            }
        }
        let g = grid(8, 8, 1.0, 1.0);
        let ones = Field::from_fn(g, |_, _| 1.0);
        assert_relative_eq!(inner_weighted(&ones, &ones).unwrap(), 2.0 * PI, max_relative = 1e-14);
    }

    #[test]
    fn first_radial_moment() {
        // Σ r_i w_i = 2π·2S·(R³/3 − R h²/12): the midpoint rule on r² is
        // exact up to this correction, which vanishes at order h².
        let (r_max, s_max) = (2.0, 1.0);
        let mut errs = vec![];
        for n in [16, 32, 64] {
            let g = grid(n, 8, r_max, s_max);
            let radius = Field::from_fn(g.clone(), |r, _| r);
            let ones = Field::from_fn(g.clone(), |_, _| 1.0);
            let moment = inner_weighted(&radius, &ones).unwrap();
            let h = g.h_r;
            let discrete = 2.0 * PI * 2.0 * s_max * (r_max.powi(3) / 3.0 - r_max * h * h / 12.0);
            assert_relative_eq!(moment, discrete, max_relative = 1e-12);
            let closed = 2.0 * PI * 2.0 * s_max * r_max.powi(3) / 3.0;
            errs.push((moment - closed).abs() / closed);
        }
        assert_relative_eq!(errs[0] / errs[1], 4.0, max_relative = 1e-9);
        assert_relative_eq!(errs[1] / errs[2], 4.0, max_relative = 1e-9);
    }

    #[test]
    fn single_cell_mass() {
        let g = grid(8, 8, 1.0, 1.0);
        let mut e = Field::zeros(g.clone());
        e.values_mut()[g.index(3, 5)] = 1.0;
        assert_eq!(inner_weighted(&e, &e).unwrap(), g.weight(3));
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let a = Field::zeros(grid(8, 8, 1.0, 1.0));
        let b = Field::zeros(grid(8, 8, 2.0, 1.0));
        assert!(matches!(inner_weighted(&a, &b), Err(Error::GridMismatch)));
        let v = Potential::constant(1.0).unwrap();
        let op = SchrodingerOp::new(a.grid().clone(), &v, 1.0);
        assert!(matches!(op.apply(&b), Err(Error::GridMismatch)));
    }

    #[test]
    fn operator_is_linear_and_kills_zero() {
        let g = grid(8, 8, 2.0, 2.0);
        let v = Potential::builtin("well", &[1.0, 2.0, 1.0]).unwrap();
        let au = apply_schrodinger_op(&Field::zeros(g), &v, 0.5).unwrap();
        assert!(au.is_zero());
    }

    #[test]
    fn operator_is_symmetric_and_bounded_below() {
        let g = grid(8, 8, 2.0, 2.0);
        let v = Potential::builtin("well", &[1.0, 2.0, 1.0]).unwrap();
        let op = SchrodingerOp::new(g.clone(), &v, 0.7);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let a = random_field(&g, &mut rng);
            let b = random_field(&g, &mut rng);
            let lhs = inner_weighted(&op.apply(&a).unwrap(), &b).unwrap();
            let rhs = inner_weighted(&a, &op.apply(&b).unwrap()).unwrap();
            assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(rhs.abs()));
            let q = op.quadratic_form(&a).unwrap();
            assert!(q >= v.v0() * inner_weighted(&a, &a).unwrap());
        }
    }

    #[test]
    fn cg_recovers_manufactured_solution() {
        let g = grid(24, 32, 4.0, 4.0);
        let v = Potential::builtin("well", &[1.0, 2.0, 1.0]).unwrap();
        let op = SchrodingerOp::new(g.clone(), &v, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let exact = random_field(&g, &mut rng);
        let rhs = op.apply(&exact).unwrap();
        let x = solve_linear(&op, &rhs, 1e-12, 10_000).unwrap();
        let err = x.axpy(-1.0, &exact).unwrap().norm() / exact.norm();
        assert!(err < 1e-9, "error {err}");
    }

    #[test]
    fn cg_zero_rhs_and_bad_tolerance() {
        let g = grid(8, 8, 1.0, 1.0);
        let v = Potential::constant(1.0).unwrap();
        let op = SchrodingerOp::new(g.clone(), &v, 1.0);
        assert!(solve_linear(&op, &Field::zeros(g.clone()), 1e-8, 10).unwrap().is_zero());
        let rhs = Field::from_fn(g, |_, _| 1.0);
        assert!(solve_linear(&op, &rhs, 0.0, 10).is_err());
        assert!(matches!(solve_linear(&op, &rhs, 1e-14, 2), Err(Error::LinearSolve { .. })));
    }

    #[test]
    fn cg_residual_on_gaussian_rhs() {
        let g = grid(64, 64, 8.0, 8.0);
        let v = Potential::constant(1.0).unwrap();
        let op = SchrodingerOp::new(g.clone(), &v, 1.0);
        let rhs = Field::from_fn(g, |r, s| (-(r * r + s * s)).exp());
        let x = solve_linear(&op, &rhs, 1e-10, 10_000).unwrap();
        let res = op.apply(&x).unwrap().axpy(-1.0, &rhs).unwrap().norm();
        assert!(res <= 1e-10 * rhs.norm());
    }

    #[test]
    fn interpolation_reproduces_nodes_and_vanishes_on_axis() {
        let g = grid(8, 10, 2.0, 3.0);
        let f = Field::from_fn(g.clone(), |r, s| r * (1.0 + 0.1 * s));
        for i in 0..8 {
            for j in 0..10 {
                let (r, s) = (g.r_nodes()[i], g.s_nodes()[j]);
                assert_relative_eq!(f.interpolate(r, s).unwrap(), f.at(i, j), max_relative = 1e-14);
            }
        }
        assert_eq!(f.interpolate(0.0, 0.3).unwrap(), 0.0);
        // linear in r between the axis and the first node
        let r0 = g.r_nodes()[0];
        let s0 = g.s_nodes()[4];
        assert_relative_eq!(f.interpolate(0.5 * r0, s0).unwrap(), 0.5 * f.at(0, 4), max_relative = 1e-14);
        // the zero ghost sits one cell past the last node
        assert_relative_eq!(f.interpolate(2.0, s0).unwrap(), 0.5 * f.at(7, 4), max_relative = 1e-14);
        assert!(matches!(f.interpolate(2.1, 0.0), Err(Error::OutsideGrid { .. })));
        assert!(f.interpolate(1.0, -3.5).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let g = grid(8, 9, 2.0, 3.0);
        let f = Field::from_fn(g, |r, s| r.sin() * s.cos() * 1e-3);
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("8 9 "));
        let back = read_field(buf.as_slice()).unwrap();
        assert_eq!(back, f);
        assert!(read_field("8 9 2 3\n".as_bytes()).is_err());
        assert!(read_field("2 2 1 1 2\n1 2 3\n".as_bytes()).is_err());
    }
}
