//! Ground states as minimisers of `J_ε` over the Nehari manifold.
//!
//! Each step moves along `d = −A⁻¹∇J(u)` (or `−∇J(u)` without
//! preconditioning), backtracks until the projected energy satisfies the
//! Armijo condition, and lands back on the manifold via the fibering scale.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::functional::{tangential, EnergyBreakdown, Functional};
use crate::grid::{inner_weighted, solve_linear, Field};
use crate::model::{Geometry, Nonlinearity, Potential, ProblemSpec};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearch {
    /// Sufficient-decrease constant.
    pub c1: f64,
    /// Step reduction factor per backtrack.
    pub shrink: f64,
    pub max_backtracks: usize,
    pub initial_step: f64,
}

impl Default for LineSearch {
    fn default() -> Self {
        Self { c1: 1e-4, shrink: 0.5, max_backtracks: 40, initial_step: 1.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop once `‖tangential gradient‖ ≤ grad_tol·‖u‖`.
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Use `A⁻¹` (conjugate gradients) as the metric for the descent direction.
    pub precondition: bool,
    pub line_search: LineSearch,
    /// Seed of the multiplicative noise applied to the initial guess.
    pub seed: u64,
    /// Relative amplitude of that noise; 0 disables it.
    pub init_noise: f64,
    /// Axial centre of the initial guess.
    pub center_s: f64,
    /// Width of the initial guess.
    pub width: f64,
    pub cg_tol: f64,
    pub cg_max_iters: usize,
    /// Keep the iterate nonnegative (meaningful for odd `f`).
    pub nonnegative: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grad_tol: 1e-8,
            max_iters: 5000,
            precondition: true,
            line_search: LineSearch::default(),
            seed: 0,
            init_noise: 0.0,
            center_s: 0.0,
            width: 2.0,
            cg_tol: 1e-6,
            cg_max_iters: 20_000,
            nonnegative: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let ls = &self.line_search;
        if !(self.grad_tol > 0.0) {
            return Err(Error::InvalidParameter("grad_tol must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        if !(self.width > 0.0) {
            return Err(Error::InvalidParameter("initial width must be positive".into()));
        }
        if !(self.cg_tol > 0.0) || self.cg_max_iters == 0 {
            return Err(Error::InvalidParameter("cg_tol and cg_max_iters must be positive".into()));
        }
        if !(ls.c1 > 0.0 && ls.c1 < 1.0 && ls.shrink > 0.0 && ls.shrink < 1.0 && ls.initial_step > 0.0) {
            return Err(Error::InvalidParameter("line-search parameters out of range".into()));
        }
        if !(self.init_noise >= 0.0 && self.init_noise < 1.0) {
            return Err(Error::InvalidParameter("init_noise must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub u: Field,
    pub energy: EnergyBreakdown,
    /// Weighted norm of the gradient component tangent to the manifold.
    pub grad_norm: f64,
    /// `‖Au − f(u)‖_w`.
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Whether the nonnegativity restart from `|u|` was used.
    pub restarted: bool,
    pub spec: ProblemSpec,
    pub wallclock: Duration,
    /// Energy after projection of the start and of every accepted step.
    pub history: Vec<f64>,
    /// Largest relative Nehari residual over the accepted iterates.
    pub max_nehari: f64,
}

impl Solution {
    /// Ground-state level estimate.
    pub fn level(&self) -> f64 {
        self.energy.total
    }

    /// `‖u‖_w`.
    pub fn u_norm(&self) -> f64 {
        self.u.norm()
    }

    /// Same outcome up to timing.
    pub fn same_result(&self, other: &Solution) -> bool {
        self.u == other.u
            && self.energy == other.energy
            && self.grad_norm.to_bits() == other.grad_norm.to_bits()
            && self.iterations == other.iterations
            && self.history == other.history
    }
}

/// `u₀(r, s) = r·exp(−(r² + (s − center_s)²)/width²)`.
pub fn initial_guess(spec: &ProblemSpec, center_s: f64, width: f64) -> Result<Field> {
    if !(width > 0.0) {
        return Err(Error::InvalidParameter(format!("width must be positive, got {width}")));
    }
    let w2 = width * width;
    Ok(Field::from_fn(spec.grid(), |r, s| {
        let ds = s - center_s;
        r * (-(r * r + ds * ds) / w2).exp()
    }))
}

/// Nearest axial cell centre to `s`. Starting on a node avoids the
/// face-symmetric saddle between two lattice-pinned ground states.
fn snap_to_node(spec: &ProblemSpec, s: f64) -> f64 {
    let g = spec.grid();
    let j = ((s + g.s_max) / g.h_s - 0.5).round().clamp(0.0, (g.n_s - 1) as f64);
    g.s_nodes()[j as usize]
}

fn seeded_guess(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<Field> {
    let mut u = initial_guess(spec, snap_to_node(spec, cfg.center_s), cfg.width)?;
    if cfg.init_noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for v in u.values_mut() {
            *v *= 1.0 + cfg.init_noise * rng.gen_range(-1.0..1.0);
        }
    }
    Ok(u)
}

pub fn solve_ground_state(spec: &ProblemSpec, cfg: &SolverConfig) -> Result<Solution> {
    let u0 = seeded_guess(spec, cfg)?;
    solve_from(spec, cfg, &u0)
}

/// Ground state with an explicit starting field (projected before use).
pub fn solve_from(spec: &ProblemSpec, cfg: &SolverConfig, start: &Field) -> Result<Solution> {
    cfg.validate()?;
    let clock = Instant::now();
    let func = Functional::new(spec)?;
    if **start.grid() != **func.grid() {
        return Err(Error::GridMismatch);
    }
    let odd = spec.nonlinearity.is_odd();
    let mut run = descend(&func, start, cfg, odd)?;
    let mut restarted = false;
    if cfg.nonnegative && odd && has_mixed_sign(&run.u) {
        let abs = run.u.map(f64::abs);
        let history = std::mem::take(&mut run.history);
        let max_nehari = run.max_nehari;
        let iterations = run.iterations;
        run = descend(&func, &abs, cfg, odd)?;
        run.iterations += iterations;
        run.history = history.into_iter().chain(run.history).collect();
        run.max_nehari = run.max_nehari.max(max_nehari);
        restarted = true;
    }
    let residual_norm = func.gradient(&run.u)?.norm();
    let sol = Solution {
        energy: func.energy(&run.u)?,
        u: run.u,
        grad_norm: run.grad_norm,
        residual_norm,
        iterations: run.iterations,
        converged: run.converged,
        restarted,
        spec: spec.clone(),
        wallclock: clock.elapsed(),
        history: run.history,
        max_nehari: run.max_nehari,
    };
    if sol.converged {
        Ok(sol)
    } else {
        Err(Error::NotConverged(Box::new(sol)))
    }
}

struct Descent {
    u: Field,
    grad_norm: f64,
    iterations: usize,
    converged: bool,
    history: Vec<f64>,
    max_nehari: f64,
}

fn has_mixed_sign(u: &Field) -> bool {
    let max = u.max();
    max > 0.0 && u.min() < -1e-12 * max
}

/// Flips the iterate if its negative part carries more mass.
fn orient(u: Field) -> Field {
    let g = u.grid().clone();
    let n_s = g.n_s;
    let vals = u.values();
    let signed = par::sum_rows(g.n_r, |i| {
        g.weight(i) * vals[i * n_s..(i + 1) * n_s].iter().map(|v| v * v.abs()).sum::<f64>()
    });
    if signed < 0.0 {
        u.scaled(-1.0)
    } else {
        u
    }
}

fn descend(func: &Functional, start: &Field, cfg: &SolverConfig, odd: bool) -> Result<Descent> {
    let ls = &cfg.line_search;
    let mut u = func.nehari_project(start)?;
    if cfg.nonnegative && odd {
        u = orient(u);
    }
    let first = func.energy(&u)?;
    let mut energy = first.total;
    let mut max_nehari = first.relative_nehari();
    let mut history = vec![energy];
    let mut step_hint = ls.initial_step;
    let mut iterations = 0;

    loop {
        let g = func.gradient(&u)?;
        let grad_norm = tangential(&g, &u)?.norm();
        if grad_norm <= cfg.grad_tol * u.norm() {
            return Ok(Descent { u, grad_norm, iterations, converged: true, history, max_nehari });
        }
        if iterations == cfg.max_iters {
            return Ok(Descent { u, grad_norm, iterations, converged: false, history, max_nehari });
        }

        let mut dir = if cfg.precondition {
            solve_linear(func.op(), &g, cfg.cg_tol, cfg.cg_max_iters)?.scaled(-1.0)
        } else {
            g.scaled(-1.0)
        };
        let mut slope = inner_weighted(&g, &dir)?;
        if !(slope < 0.0) {
            dir = g.scaled(-1.0);
            slope = -inner_weighted(&g, &g)?;
        }

        let mut step = if cfg.precondition { ls.initial_step } else { step_hint };
        let mut accepted = None;
        for _ in 0..ls.max_backtracks {
            let raw = u.axpy(step, &dir)?;
            match func.nehari_project(&raw) {
                Ok(trial) => {
                    let change = func.energy_change(&u, &trial)?;
                    if change <= ls.c1 * step * slope {
                        accepted = Some(trial);
                        break;
                    }
                }
                Err(Error::ZeroField) | Err(Error::DegenerateFiber { .. }) => {}
                Err(e) => return Err(e),
            }
            step *= ls.shrink;
        }
        let Some(mut next) = accepted else {
            // no admissible step: the iterate is as good as this metric allows
            return Ok(Descent { u, grad_norm, iterations, converged: false, history, max_nehari });
        };
        if cfg.nonnegative && odd {
            next = orient(next);
        }
        step_hint = (2.0 * step).min(ls.initial_step);
        u = next;
        let e = func.energy(&u)?;
        energy = e.total;
        max_nehari = max_nehari.max(e.relative_nehari());
        history.push(energy);
        iterations += 1;
    }
}

/// `m_k`: the ground-state level of the constant-potential problem.
pub fn solve_limiting(
    k: f64,
    geometry: Geometry,
    nonlinearity: &Nonlinearity,
    cfg: &SolverConfig,
) -> Result<Solution> {
    let n = nonlinearity.dimension();
    let potential = Potential::constant(k)?.with_dimension(n, n - 1)?;
    let spec = ProblemSpec::new(potential, nonlinearity.clone(), 1.0, geometry)?;
    solve_ground_state(&spec, cfg)
}

#[derive(Debug)]
pub struct SweepEntry {
    pub epsilon: f64,
    pub outcome: Result<Solution>,
}

impl SweepEntry {
    pub fn solution(&self) -> Option<&Solution> {
        self.outcome.as_ref().ok()
    }
}

/// Solves for each `ε` in `eps_list` (strictly decreasing). With
/// `warm_start`, every member starts from the previous member's field;
/// otherwise the members are independent and may run concurrently.
pub fn continuation_sweep(
    template: &ProblemSpec,
    eps_list: &[f64],
    cfg: &SolverConfig,
    warm_start: bool,
) -> Result<Vec<SweepEntry>> {
    if eps_list.is_empty() {
        return Err(Error::Precondition("empty epsilon list".into()));
    }
    if eps_list.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Precondition("epsilon values must be positive".into()));
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Precondition("epsilon list must be strictly decreasing".into()));
    }
    cfg.validate()?;
    if !warm_start {
        let entries = par::map_jobs(eps_list, |&epsilon| SweepEntry {
            epsilon,
            outcome: template.with_epsilon(epsilon).and_then(|spec| solve_ground_state(&spec, cfg)),
        });
        return Ok(entries);
    }
    let mut entries = Vec::with_capacity(eps_list.len());
    let mut previous: Option<Field> = None;
    for &epsilon in eps_list {
        let spec = template.with_epsilon(epsilon)?;
        let outcome = match &previous {
            None => solve_ground_state(&spec, cfg),
            Some(u) => solve_from(&spec, cfg, u),
        };
        match &outcome {
            Ok(sol) => previous = Some(sol.u.clone()),
            Err(Error::NotConverged(best)) => previous = Some(best.u.clone()),
            Err(_) => {}
        }
        entries.push(SweepEntry { epsilon, outcome });
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_spec(potential: Potential) -> ProblemSpec {
        ProblemSpec::new(potential, Nonlinearity::kerr(1.0).unwrap(), 1.0, Geometry::new(8.0, 12.0, 32, 48))
            .unwrap()
    }

    #[test]
    fn initial_guess_shape() {
        let sp = small_spec(Potential::constant(1.0).unwrap());
        let u = initial_guess(&sp, 0.0, 1.0).unwrap();
        assert!(u.min() >= 0.0);
        assert!(!u.is_zero());
        // u₀(1, 0) = e⁻¹ directly
        let g = Geometry::new(2.0, 2.0, 8, 8);
        let sp2 = ProblemSpec::new(sp.potential.clone(), sp.nonlinearity.clone(), 1.0, g).unwrap();
        let v = initial_guess(&sp2, 0.0, 1.0).unwrap();
        // node r = 1.25, s = 0.25 (cell centres), evaluate the closed form
        let (r, s) = (sp2.grid().r_nodes()[4], sp2.grid().s_nodes()[4]);
        assert_relative_eq!(v.at(4, 4), r * (-(r * r + s * s)).exp(), max_relative = 1e-15);
        assert!(initial_guess(&sp, 0.0, 0.0).is_err());
    }

    #[test]
    fn descent_is_monotone_and_lands_on_manifold() {
        let sp = small_spec(Potential::constant(1.0).unwrap());
        let cfg = SolverConfig { grad_tol: 1e-7, ..Default::default() };
        let sol = solve_ground_state(&sp, &cfg).unwrap();
        for w in sol.history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "energy rose: {} -> {}", w[0], w[1]);
        }
        assert!(sol.energy.relative_nehari() <= 1e-10);
        assert!(sol.max_nehari <= 1e-10);
        assert!(sol.energy.total > 0.0);
        assert!(sol.u.min() >= 0.0);
        assert!(sol.residual_norm <= 10.0 * cfg.grad_tol * sol.u.norm());
        assert_relative_eq!(sol.energy.total, 0.5 * sol.energy.quad, max_relative = 1e-8);
    }

    #[test]
    fn unpreconditioned_descent_agrees() {
        let sp = ProblemSpec::new(
            Potential::constant(1.0).unwrap(),
            Nonlinearity::kerr(1.0).unwrap(),
            1.0,
            Geometry::new(6.0, 6.0, 12, 16),
        )
        .unwrap();
        let pre = solve_ground_state(&sp, &SolverConfig { grad_tol: 1e-6, ..Default::default() }).unwrap();
        let plain = solve_ground_state(
            &sp,
            &SolverConfig { grad_tol: 1e-6, precondition: false, max_iters: 20_000, ..Default::default() },
        )
        .unwrap();
        assert_relative_eq!(pre.level(), plain.level(), max_relative = 1e-6);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let sp = small_spec(Potential::builtin("well", &[1.0, 2.0, 1.0]).unwrap());
        let cfg = SolverConfig { grad_tol: 1e-6, seed: 42, ..Default::default() };
        let a = solve_ground_state(&sp, &cfg).unwrap();
        let b = solve_ground_state(&sp, &cfg).unwrap();
        assert!(a.same_result(&b));
    }

    #[test]
    fn iteration_cap_reports_best_iterate() {
        let sp = small_spec(Potential::constant(1.0).unwrap());
        let cfg = SolverConfig { grad_tol: 1e-12, max_iters: 2, ..Default::default() };
        match solve_ground_state(&sp, &cfg) {
            Err(Error::NotConverged(best)) => {
                assert_eq!(best.iterations, 2);
                assert!(best.energy.relative_nehari() <= 1e-10);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn sweep_preconditions() {
        let sp = small_spec(Potential::constant(1.0).unwrap());
        let cfg = SolverConfig::default();
        assert!(continuation_sweep(&sp, &[], &cfg, true).is_err());
        assert!(continuation_sweep(&sp, &[0.5, 1.0], &cfg, true).is_err());
        assert!(continuation_sweep(&sp, &[1.0, -0.5], &cfg, true).is_err());
    }

    #[test]
    fn single_member_sweep_matches_direct_solve() {
        let sp = small_spec(Potential::builtin("well", &[1.0, 2.0, 1.0]).unwrap());
        let cfg = SolverConfig { grad_tol: 1e-6, ..Default::default() };
        let direct = solve_ground_state(&sp.with_epsilon(1.0).unwrap(), &cfg).unwrap();
        for warm in [true, false] {
            let sweep = continuation_sweep(&sp, &[1.0], &cfg, warm).unwrap();
            assert!(sweep[0].solution().unwrap().same_result(&direct));
        }
    }
}
