//! Post-processing experiments on computed ground states: decay rates,
//! ordering and continuity of the level in the potential, the cutoff
//! comparison `ψ(R)`, and concentration diagnostics along an `ε` sweep.

use crate::error::{Error, Result};
use crate::functional::Functional;
use crate::grid::Field;
use crate::model::{Potential, ProblemSpec};
use crate::par;
use crate::solver::{solve_ground_state, Solution, SolverConfig};

/// `ν* = (N − 2 + √((N − 2)² + 4))/2`.
pub fn nu_star(dimension: usize) -> f64 {
    let a = dimension as f64 - 2.0;
    0.5 * (a + (a * a + 4.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// Minus the fitted slope of `log u` against `log |x|`.
    pub nu_est: f64,
    pub window: (f64, f64),
    /// Coefficient of determination of the power-law fit.
    pub r2: f64,
    /// Same, for a straight line in `(|x|, log u)` (exponential model).
    pub r2_exp: f64,
    pub nu_star: f64,
    pub samples: usize,
}

/// `(slope, intercept, r²)` of the least-squares line through the points.
fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, my - slope * mx, r2)
}

/// Decay fit of a converged solution along the axial line through its peak.
pub fn decay_fit(sol: &Solution, window: (f64, f64)) -> Result<DecayFit> {
    let mut fit = decay_fit_field(&sol.u, window)?;
    fit.nu_star = nu_star(sol.spec.nonlinearity.dimension());
    Ok(fit)
}

/// Fits `u ~ |x|^{−ν}` on the samples `(r_peak, s_j)` with `|x|` in the
/// window and `u` above ten times the round-off floor of `max u`.
pub fn decay_fit_field(u: &Field, window: (f64, f64)) -> Result<DecayFit> {
    let (lo, hi) = window;
    let g = u.grid();
    if !(lo > 0.0 && lo < hi) {
        return Err(Error::Precondition(format!("fit window [{lo}, {hi}] must satisfy 0 < lo < hi")));
    }
    if hi > 0.8 * g.s_max {
        return Err(Error::Precondition(format!(
            "fit window end {hi} exceeds 0.8·S_max = {}",
            0.8 * g.s_max
        )));
    }
    let vals = u.values();
    let peak = (0..vals.len()).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).ok_or(Error::EmptyWindow {
        lo,
        hi,
        count: 0,
    })?;
    let max = vals[peak];
    let i_peak = peak / g.n_s;
    let r_peak = g.r_nodes()[i_peak];
    let floor = 10.0 * f64::EPSILON * max.abs();
    let (mut xs, mut logx, mut logu) = (Vec::new(), Vec::new(), Vec::new());
    for (j, &s) in g.s_nodes().iter().enumerate() {
        let x = r_peak.hypot(s);
        let v = u.at(i_peak, j);
        if x >= lo && x <= hi && v > floor {
            xs.push(x);
            logx.push(x.ln());
            logu.push(v.ln());
        }
    }
    if xs.len() < 3 {
        return Err(Error::EmptyWindow { lo, hi, count: xs.len() });
    }
    let (slope, _, r2) = least_squares(&logx, &logu);
    let (_, _, r2_exp) = least_squares(&xs, &logu);
    Ok(DecayFit {
        nu_est: -slope,
        window,
        r2,
        r2_exp,
        nu_star: nu_star(g.symmetry_rank + 1),
        samples: xs.len(),
    })
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub c_hi: f64,
    pub c_lo: f64,
    /// `c_hi ≥ c_lo − tol_rel·|c_lo|`.
    pub ordered: bool,
    pub hi: Solution,
    pub lo: Solution,
}

/// Ground-state levels for two potentials with `V_hi ≥ V_lo` on the grid.
pub fn compare_potentials(
    v_hi: &Potential,
    v_lo: &Potential,
    template: &ProblemSpec,
    cfg: &SolverConfig,
    tol_rel: f64,
) -> Result<Comparison> {
    let g = template.grid();
    let eps = template.epsilon;
    for &r in g.r_nodes() {
        for &s in g.s_nodes() {
            let (a, b) = (v_hi.eval_scaled(eps, r, s), v_lo.eval_scaled(eps, r, s));
            if a < b {
                return Err(Error::Precondition(format!("V_hi < V_lo at (r, s) = ({r}, {s}): {a} < {b}")));
            }
        }
    }
    let specs = [template.with_potential(v_hi.clone())?, template.with_potential(v_lo.clone())?];
    let mut runs = par::map_jobs(&specs, |spec| solve_ground_state(spec, cfg)).into_iter();
    let hi = runs.next().expect("two jobs")?;
    let lo = runs.next().expect("two jobs")?;
    let (c_hi, c_lo) = (hi.level(), lo.level());
    Ok(Comparison { c_hi, c_lo, ordered: c_hi >= c_lo - tol_rel * c_lo.abs(), hi, lo })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityRow {
    pub h: f64,
    pub c: f64,
    /// `c(V + h) − c(V)`.
    pub diff: f64,
    pub iterations: usize,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityScan {
    pub baseline: f64,
    pub rows: Vec<ContinuityRow>,
    /// `max |diff|/|h|` over the nonzero shifts.
    pub lipschitz: f64,
    /// `|diff|` strictly shrinks as `|h|` shrinks.
    pub monotone: bool,
    /// `diff` has the sign of `h` (up to `1e-12` relative).
    pub sign_ok: bool,
}

/// Levels of the shifted potentials `V + h` against the baseline `V`.
pub fn continuity_scan(
    potential: &Potential,
    h_list: &[f64],
    template: &ProblemSpec,
    cfg: &SolverConfig,
) -> Result<ContinuityScan> {
    if h_list.is_empty() {
        return Err(Error::Precondition("empty shift list".into()));
    }
    let mut shifts = vec![0.0];
    shifts.extend(h_list.iter().copied().filter(|&h| h != 0.0));
    let specs =
        shifts.iter().map(|&h| template.with_potential(potential.shifted(h)?)).collect::<Result<Vec<_>>>()?;
    let sols = par::map_jobs(&specs, |spec| solve_ground_state(spec, cfg))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let baseline = sols[0].level();
    let tol = 1e-12 * baseline.abs();
    let rows: Vec<ContinuityRow> = h_list
        .iter()
        .map(|&h| {
            let sol = if h == 0.0 {
                &sols[0]
            } else {
                &sols[1 + shifts[1..].iter().position(|&x| x == h).expect("listed shift")]
            };
            ContinuityRow {
                h,
                c: sol.level(),
                diff: sol.level() - baseline,
                iterations: sol.iterations,
                grad_norm: sol.grad_norm,
            }
        })
        .collect();
    let nonzero: Vec<&ContinuityRow> = rows.iter().filter(|row| row.h != 0.0).collect();
    let monotone = nonzero
        .iter()
        .all(|a| nonzero.iter().all(|b| !(b.h.abs() < a.h.abs()) || b.diff.abs() < a.diff.abs()));
    let sign_ok = nonzero.iter().all(|row| row.diff * row.h.signum() >= -tol);
    let lipschitz = nonzero.iter().map(|row| row.diff.abs() / row.h.abs()).fold(0.0, f64::max);
    Ok(ContinuityScan { baseline, rows, lipschitz, monotone, sign_ok })
}

/// `C¹` cutoff: 1 on `[0, R]`, 0 on `[R + 2, ∞)`, cubic smoothstep between.
/// Its slope peaks at 3/4.
pub fn cutoff_profile(radius: f64, rho: f64) -> f64 {
    let t = ((rho - radius) / 2.0).clamp(0.0, 1.0);
    1.0 - t * t * (3.0 - 2.0 * t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffComparison {
    pub r_cut: f64,
    /// Maximum of the limiting energy on the ray through the truncated field.
    pub gamma: f64,
    /// `gamma − Φ_k(w)`.
    pub psi: f64,
    /// Fibering scale of the truncated field.
    pub scale: f64,
}

/// Truncates the limiting ground state `w` with the radial cutoff in `|x|`
/// and measures how far the best point on the new ray sits above `Φ_k(w)`.
pub fn cutoff_gamma(r_cut: f64, w: &Solution, k: f64) -> Result<CutoffComparison> {
    let pot = &w.spec.potential;
    if !pot.is_constant() || pot.v0() != k {
        return Err(Error::Precondition(format!("cutoff comparison needs a limiting solution at k = {k}")));
    }
    if !(r_cut > 0.0) {
        return Err(Error::Precondition(format!("cutoff radius must be positive, got {r_cut}")));
    }
    let g = w.u.grid();
    let diameter = g.r_max.hypot(g.s_max);
    if r_cut < diameter && r_cut + 2.0 > g.r_max.min(g.s_max) {
        return Err(Error::Precondition(format!(
            "cutoff band [{r_cut}, {}] leaves the grid (min extent {})",
            r_cut + 2.0,
            g.r_max.min(g.s_max)
        )));
    }
    let func = Functional::new(&w.spec)?;
    let mut v = w.u.clone();
    for (i, &r) in g.r_nodes().iter().enumerate() {
        for (j, &s) in g.s_nodes().iter().enumerate() {
            v.values_mut()[g.index(i, j)] *= cutoff_profile(r_cut, r.hypot(s));
        }
    }
    let scale = func.fiber_scale(&v)?;
    let top = v.scaled(scale);
    let psi = func.energy_change(&w.u, &top)?;
    Ok(CutoffComparison { r_cut, gamma: w.level() + psi, psi, scale })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationReport {
    pub eps: f64,
    /// Refined argmax of the axial mass profile.
    pub peak_s: f64,
    pub mass_center: f64,
    /// Standard deviation of the axial mass profile.
    pub width: f64,
    pub c_eps: f64,
    pub profile_count_est: usize,
    /// `m_{V∞}/m_{V0}`.
    pub ell_bound: f64,
    /// `profile_count_est ≤ ⌈ell_bound⌉`.
    pub within_bound: bool,
    /// Axial positions of the detected profiles, strongest first.
    pub profile_centers: Vec<f64>,
}

impl ConcentrationReport {
    pub fn rescaled_peak(&self) -> f64 {
        self.eps * self.peak_s
    }
}

/// `M_j = Σ_i w_i u_ij²`: mass carried by each axial slice.
pub fn axial_mass(u: &Field) -> Vec<f64> {
    let g = u.grid();
    let mut m = vec![0.0; g.n_s];
    for i in 0..g.n_r {
        let w = g.weight(i);
        for (j, mj) in m.iter_mut().enumerate() {
            let v = u.at(i, j);
            *mj += w * v * v;
        }
    }
    m
}

/// Vertex of the parabola through the three samples around `j`.
fn refine_peak(m: &[f64], s: &[f64], j: usize, h: f64) -> f64 {
    if j == 0 || j + 1 == m.len() {
        return s[j];
    }
    let (a, b, c) = (m[j - 1], m[j], m[j + 1]);
    let denom = a - 2.0 * b + c;
    if denom >= 0.0 {
        return s[j];
    }
    s[j] + 0.5 * h * (a - c) / denom
}

/// Distance from `j` to where `m` first falls below half of `m[j]`,
/// averaged over both sides, linearly interpolated.
fn half_width(m: &[f64], j: usize, h: f64) -> f64 {
    let half = 0.5 * m[j];
    let side = |step: isize| {
        let mut k = j as isize;
        loop {
            let next = k + step;
            if next < 0 || next as usize >= m.len() {
                return (k - j as isize).unsigned_abs() as f64 * h;
            }
            let (a, b) = (m[k as usize], m[next as usize]);
            if b < half {
                let frac = (a - half) / (a - b);
                return ((k - j as isize).unsigned_abs() as f64 + frac) * h;
            }
            k = next;
        }
    };
    (0.5 * (side(-1) + side(1))).max(h)
}

/// Local maxima of the axial mass profile above 10% of its maximum,
/// kept greedily from the strongest when at least three half-widths of the
/// dominant peak apart.
pub fn count_profiles(m: &[f64], s: &[f64], h: f64) -> Vec<f64> {
    let Some((top, &max)) = m.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)) else {
        return Vec::new();
    };
    if !(max > 0.0) {
        return Vec::new();
    }
    let unit = half_width(m, top, h);
    let mut candidates: Vec<usize> = (0..m.len())
        .filter(|&j| {
            let left = if j > 0 { m[j - 1] } else { 0.0 };
            let right = if j + 1 < m.len() { m[j + 1] } else { 0.0 };
            m[j] >= 0.1 * max && m[j] > left && m[j] >= right
        })
        .collect();
    candidates.sort_by(|&a, &b| m[b].total_cmp(&m[a]));
    let mut kept: Vec<f64> = Vec::new();
    for j in candidates {
        let c = refine_peak(m, s, j, h);
        if kept.iter().all(|&k| (k - c).abs() >= 3.0 * unit) {
            kept.push(c);
        }
    }
    kept
}

pub fn concentration_report(sol: &Solution, m_v0: f64, m_vinf: f64) -> ConcentrationReport {
    let g = sol.u.grid();
    let m = axial_mass(&sol.u);
    let s = g.s_nodes();
    let total: f64 = m.iter().sum();
    let mass_center = m.iter().zip(s).map(|(a, b)| a * b).sum::<f64>() / total;
    let var = m.iter().zip(s).map(|(a, b)| a * (b - mass_center).powi(2)).sum::<f64>() / total;
    let top = (0..m.len()).max_by(|&a, &b| m[a].total_cmp(&m[b])).unwrap_or(0);
    let profile_centers = count_profiles(&m, s, g.h_s);
    let ell_bound = m_vinf / m_v0;
    let count = profile_centers.len();
    ConcentrationReport {
        eps: sol.spec.epsilon,
        peak_s: refine_peak(&m, s, top, g.h_s),
        mass_center,
        width: var.sqrt(),
        c_eps: sol.level(),
        profile_count_est: count,
        ell_bound,
        within_bound: count as f64 <= ell_bound.ceil(),
        profile_centers,
    }
}

pub fn concentration_scan(sweep: &[Solution], m_v0: f64, m_vinf: f64) -> Result<Vec<ConcentrationReport>> {
    if sweep.is_empty() {
        return Err(Error::Precondition("empty sweep".into()));
    }
    Ok(par::map_jobs(sweep, |sol| concentration_report(sol, m_v0, m_vinf)))
}
