//! One runner per subcommand. Runners only compute; writing happens in
//! `main` once the whole report is assembled.

use curlcurl_core::analysis::{
    compare_potentials, concentration_report, continuity_scan, cutoff_gamma, decay_fit,
};
use curlcurl_core::grid::write_field;
use curlcurl_core::maxwell::{
    curlcurl_residual, energy_curl_in_cylinder, max_divergence, reconstruct, write_vtk, CartesianBox,
};
use curlcurl_core::solver::{continuation_sweep, solve_ground_state, solve_limiting};
use curlcurl_core::{par, Error, Functional, Solution};
use serde_json::{json, Value};

use crate::config::{Experiment, RunConfig};
use crate::error::CliError;
use crate::output::{Report, Table};

pub fn run(experiment: Experiment, cfg: &RunConfig) -> Result<Report, CliError> {
    match experiment {
        Experiment::Solve => solve(cfg),
        Experiment::Limit => limit(cfg),
        Experiment::Sweep => sweep(cfg),
        Experiment::Decay => decay(cfg),
        Experiment::Compare => compare(cfg),
        Experiment::Continuity => continuity(cfg),
        Experiment::Reconstruct => reconstruct_run(cfg),
        Experiment::Cutoff => cutoff(cfg),
    }
}

/// Keeps the best iterate of a solve that hit its iteration cap.
fn settle(outcome: curlcurl_core::Result<Solution>, stage: &'static str) -> Result<Solution, CliError> {
    match outcome {
        Ok(sol) => Ok(sol),
        Err(Error::NotConverged(best)) => Ok(*best),
        Err(e) => Err(CliError::run(stage)(e)),
    }
}

fn solution_summary(sol: &Solution) -> Value {
    json!({
        "level": sol.level(),
        "quad": sol.energy.quad,
        "nonlinear": sol.energy.nl,
        "nehari_residual": sol.energy.relative_nehari(),
        "max_nehari_residual": sol.max_nehari,
        "grad_norm": sol.grad_norm,
        "residual_norm": sol.residual_norm,
        "iterations": sol.iterations,
        "converged": sol.converged,
        "restarted": sol.restarted,
        "u_max": sol.u.max(),
        "solve_seconds": sol.wallclock.as_secs_f64(),
    })
}

fn history_table(sol: &Solution) -> Table {
    let mut t = Table::new("history", &["iter", "energy"]);
    for (k, e) in sol.history.iter().enumerate() {
        t.push(vec![k.into(), (*e).into()]);
    }
    t
}

fn field_dump(sol: &Solution) -> Vec<u8> {
    let mut buf = Vec::new();
    write_field(&mut buf, &sol.u).expect("in-memory write");
    buf
}

/// Flattens the solve scalars into the report under the given level key.
fn single_solve(report: &mut Report, sol: &Solution, level_key: &str) {
    report.converged &= sol.converged;
    report.set(level_key, sol.level());
    if let Value::Object(map) = solution_summary(sol) {
        for (k, v) in map {
            if k != "level" {
                report.results.insert(k, v);
            }
        }
    }
    report.tables.push(history_table(sol));
    report.fields.push(("field.txt".into(), field_dump(sol)));
}

fn solve(cfg: &RunConfig) -> Result<Report, CliError> {
    let spec = cfg.problem_spec()?;
    let sol = settle(solve_ground_state(&spec, &cfg.solver.to_config()), "solve")?;
    let mut report = Report::new();
    single_solve(&mut report, &sol, "c_eps");
    Ok(report)
}

fn limit(cfg: &RunConfig) -> Result<Report, CliError> {
    let k = cfg.experiment.k;
    let sol = settle(
        solve_limiting(k, cfg.geometry(), &cfg.nonlinearity()?, &cfg.solver.to_config()),
        "limiting solve",
    )?;
    let mut report = Report::new();
    report.set("k", k);
    single_solve(&mut report, &sol, "m_k");
    Ok(report)
}

fn sweep(cfg: &RunConfig) -> Result<Report, CliError> {
    let template = cfg.problem_spec()?;
    let solver = cfg.solver.to_config();
    let nl = cfg.nonlinearity()?;
    let pot = &template.potential;
    let ks = [pot.v0(), pot.v_infinity()];
    let limits = par::map_jobs(&ks, |&k| solve_limiting(k, cfg.geometry(), &nl, &solver));
    let mut limits = limits.into_iter();
    let lim_v0 = settle(limits.next().expect("two jobs"), "limiting solve at V0")?;
    let lim_vinf = settle(limits.next().expect("two jobs"), "limiting solve at V_inf")?;
    let (m_v0, m_vinf) = (lim_v0.level(), lim_vinf.level());

    let entries = continuation_sweep(&template, &cfg.experiment.eps, &solver, cfg.experiment.warm_start)
        .map_err(CliError::run("sweep"))?;
    let [lo, hi] = cfg.experiment.decay_window;
    let mut report = Report::new();
    report.converged = lim_v0.converged && lim_vinf.converged;
    let mut table = Table::new(
        "sweep",
        &[
            "eps",
            "c_eps",
            "m_V0",
            "m_Vinf",
            "peak_s",
            "eps_times_peak_s",
            "width",
            "profile_count",
            "nu_est",
            "grad_norm",
            "iters",
        ],
    );
    let mut members = Vec::new();
    for entry in entries {
        let sol = settle(entry.outcome, "sweep member")?;
        report.converged &= sol.converged;
        let conc = concentration_report(&sol, m_v0, m_vinf);
        let fit = decay_fit(&sol, (lo, hi));
        let nu_est = fit.as_ref().map(|f| f.nu_est).unwrap_or(f64::NAN);
        table.push(vec![
            entry.epsilon.into(),
            conc.c_eps.into(),
            m_v0.into(),
            m_vinf.into(),
            conc.peak_s.into(),
            conc.rescaled_peak().into(),
            conc.width.into(),
            conc.profile_count_est.into(),
            nu_est.into(),
            sol.grad_norm.into(),
            sol.iterations.into(),
        ]);
        members.push(json!({
            "eps": entry.epsilon,
            "c_eps": conc.c_eps,
            "mass_center": conc.mass_center,
            "profile_centers": conc.profile_centers,
            "within_bound": conc.within_bound,
            "decay_fit_error": fit.err().map(|e| e.to_string()),
            "solve": solution_summary(&sol),
        }));
        if cfg.run.emit_fields {
            report.fields.push((format!("field_eps_{}.txt", members.len() - 1), field_dump(&sol)));
        }
    }
    let sandwich = report_sandwich(&table, m_v0, m_vinf);
    report.set("m_V0", m_v0);
    report.set("m_Vinf", m_vinf);
    report.set("ell_bound", m_vinf / m_v0);
    report.set("sandwich_ok", sandwich);
    report.set("limiting", json!({"V0": solution_summary(&lim_v0), "Vinf": solution_summary(&lim_vinf)}));
    report.set("members", members);
    report.tables.push(table);
    Ok(report)
}

/// `m_V0 ≤ c_eps ≤ m_Vinf` up to `1e-9` relative on every row.
fn report_sandwich(table: &Table, m_v0: f64, m_vinf: f64) -> bool {
    let tol = 1e-9 * m_vinf.abs();
    table.rows.iter().all(|row| match row[1] {
        crate::output::Cell::Float(c) => c >= m_v0 - tol && c <= m_vinf + tol,
        _ => false,
    })
}

fn decay(cfg: &RunConfig) -> Result<Report, CliError> {
    let spec = cfg.problem_spec()?;
    let sol = settle(solve_ground_state(&spec, &cfg.solver.to_config()), "solve")?;
    let [lo, hi] = cfg.experiment.decay_window;
    let fit = decay_fit(&sol, (lo, hi)).map_err(CliError::run("decay fit"))?;
    let mut report = Report::new();
    report.converged = sol.converged;
    report.set("c_eps", sol.level());
    report.set("nu_est", fit.nu_est);
    report.set("nu_star", fit.nu_star);
    report.set("r2_power", fit.r2);
    report.set("r2_exponential", fit.r2_exp);
    report.set("fit_samples", fit.samples);
    report.set("window", vec![lo, hi]);
    report.set("solve", solution_summary(&sol));

    // the sampled ray itself
    let g = sol.u.grid();
    let values = sol.u.values();
    let peak = (0..values.len()).fold(0, |best, k| if values[k] > values[best] { k } else { best });
    let i_peak = peak / g.n_s;
    let r = g.r_nodes()[i_peak];
    let mut table = Table::new("decay", &["s", "abs_x", "u", "in_window"]);
    for (j, &s) in g.s_nodes().iter().enumerate() {
        let x = r.hypot(s);
        let inside = usize::from(x >= lo && x <= hi);
        table.push(vec![s.into(), x.into(), sol.u.at(i_peak, j).into(), inside.into()]);
    }
    report.set("r_peak", r);
    report.tables.push(table);
    report.fields.push(("field.txt".into(), field_dump(&sol)));
    Ok(report)
}

fn compare(cfg: &RunConfig) -> Result<Report, CliError> {
    let template = cfg.problem_spec()?;
    let upper = cfg.potential()?;
    let lower = cfg.lower_potential()?;
    let cmp =
        compare_potentials(&upper, &lower, &template, &cfg.solver.to_config(), cfg.experiment.compare_tol)
            .map_err(CliError::run("compare"))?;
    let mut report = Report::new();
    report.set("c_upper", cmp.c_hi);
    report.set("c_lower", cmp.c_lo);
    report.set("ordered", cmp.ordered);
    report.set("upper", solution_summary(&cmp.hi));
    report.set("lower", solution_summary(&cmp.lo));
    let mut table = Table::new("compare", &["member", "c", "iterations", "grad_norm", "nehari_residual"]);
    for (name, sol) in [("upper", &cmp.hi), ("lower", &cmp.lo)] {
        table.push(vec![
            name.into(),
            sol.level().into(),
            sol.iterations.into(),
            sol.grad_norm.into(),
            sol.energy.relative_nehari().into(),
        ]);
    }
    report.tables.push(table);
    Ok(report)
}

fn continuity(cfg: &RunConfig) -> Result<Report, CliError> {
    let template = cfg.problem_spec()?;
    let scan =
        continuity_scan(&template.potential, &cfg.experiment.shifts, &template, &cfg.solver.to_config())
            .map_err(CliError::run("continuity scan"))?;
    let mut report = Report::new();
    report.set("baseline", scan.baseline);
    report.set("lipschitz", scan.lipschitz);
    report.set("monotone", scan.monotone);
    report.set("sign_ok", scan.sign_ok);
    let mut table = Table::new("continuity", &["h", "c", "diff", "iterations", "grad_norm"]);
    for row in &scan.rows {
        table.push(vec![
            row.h.into(),
            row.c.into(),
            row.diff.into(),
            row.iterations.into(),
            row.grad_norm.into(),
        ]);
    }
    report.tables.push(table);
    Ok(report)
}

fn reconstruct_run(cfg: &RunConfig) -> Result<Report, CliError> {
    let spec = cfg.problem_spec()?;
    let sol = settle(solve_ground_state(&spec, &cfg.solver.to_config()), "solve")?;
    let e = &cfg.experiment;
    let cube = CartesianBox::cube(e.box_n, e.box_half_width);
    let order = e.differences();
    let field = reconstruct(&sol.u, cube, e.sampling()).map_err(CliError::run("reconstruct"))?;
    let (pot, nl, eps) = (&spec.potential, &spec.nonlinearity, spec.epsilon);
    let residual = curlcurl_residual(&field, pot, eps, nl, order);
    let max_div = max_divergence(&field);
    // both energies over the cylinder the cartesian differences fully cover
    let inner = e.box_half_width - order.reach() as f64 * cube.h;
    let e_curl = energy_curl_in_cylinder(&field, pot, eps, nl, order, inner, inner);
    let e_cyl = Functional::new(&spec)
        .and_then(|f| f.energy_in_region(&sol.u, inner, inner))
        .map_err(CliError::run("matched energy"))?;
    let mismatch = (e_curl - e_cyl).abs() / e_cyl.abs();

    let mut report = Report::new();
    report.converged = sol.converged;
    report.set("c_eps", sol.level());
    report.set("max_divergence", max_div);
    report.set("curlcurl_residual", residual);
    report.set("energy_curl", e_curl);
    report.set("energy_matched", e_cyl);
    report.set("energy_rel_mismatch", mismatch);
    report.set("matched_half_width", inner);
    report.set("box_spacing", cube.h);
    report.set("solve", solution_summary(&sol));
    let mut table = Table::new(
        "reconstruct",
        &[
            "box_n",
            "h",
            "max_div",
            "curlcurl_residual",
            "energy_curl",
            "energy_matched",
            "energy_rel_mismatch",
        ],
    );
    table.push(vec![
        e.box_n.into(),
        cube.h.into(),
        max_div.into(),
        residual.into(),
        e_curl.into(),
        e_cyl.into(),
        mismatch.into(),
    ]);
    report.tables.push(table);
    let mut vtk = Vec::new();
    write_vtk(&mut vtk, &field, "curlcurl ansatz field").map_err(CliError::run("vtk"))?;
    report.fields.push(("field.vtk".into(), vtk));
    report.fields.push(("field.txt".into(), field_dump(&sol)));
    Ok(report)
}

fn cutoff(cfg: &RunConfig) -> Result<Report, CliError> {
    let k = cfg.experiment.k;
    let w = settle(
        solve_limiting(k, cfg.geometry(), &cfg.nonlinearity()?, &cfg.solver.to_config()),
        "limiting solve",
    )?;
    let mut radii = cfg.experiment.radii.clone();
    radii.sort_by(f64::total_cmp);
    let mut table = Table::new("cutoff", &["r_cut", "gamma", "psi", "scale"]);
    let mut psis = Vec::new();
    for &r in &radii {
        let c = cutoff_gamma(r, &w, k).map_err(CliError::run("cutoff comparison"))?;
        psis.push(c.psi);
        table.push(vec![c.r_cut.into(), c.gamma.into(), c.psi.into(), c.scale.into()]);
    }
    let mut report = Report::new();
    report.converged = w.converged;
    report.set("k", k);
    report.set("m_k", w.level());
    report.set("psi_min", psis.iter().copied().fold(f64::INFINITY, f64::min));
    report.set("psi_nonincreasing", psis.windows(2).all(|p| p[1] <= p[0]));
    report.set("solve", solution_summary(&w));
    report.tables.push(table);
    Ok(report)
}
