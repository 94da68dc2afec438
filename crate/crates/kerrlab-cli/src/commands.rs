//! The five commands: simulate, sweep, verify-bound, analytic, check.
//!
//! Machine output (JSON reports, CSV tables) goes to `--out` or the paths in
//! the config's `output` block, falling back to stdout; human narration goes
//! to stderr and is silenced by `--quiet`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use kerrlab::analytic::{self, SecSolutionParams};
use kerrlab::glassey::{self, GlasseyData};
use kerrlab::integrate::integrate;
use kerrlab::profile::ProfileSpec;

use crate::config::{Mode, RunConfig};
use crate::report::{
    to_json, AnalyticSummary, CheckReport, ResultBlock, SimulateReport, VerifyBoundReport,
};
use crate::sweep;

/// Flags shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunArgs {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub trajectory: Option<PathBuf>,
    pub workers: Option<usize>,
    pub tol: Option<f64>,
    pub quiet: bool,
}

impl RunArgs {
    fn narrate(&self, text: &str) {
        if !self.quiet {
            eprintln!("{text}");
        }
    }

    /// Load, validate, and apply command-line overrides.
    fn resolve_config(&self, mode: Mode) -> Result<RunConfig> {
        let mut config = RunConfig::load(&self.config)?;
        if let Some(tol) = self.tol {
            config.integrator.rel_tol = tol;
        }
        config.validate(mode)?;
        Ok(config)
    }
}

fn write_output(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(path) => std::fs::write(path, contents)
            .with_context(|| format!("cannot write {}", path.display())),
        None => {
            std::io::stdout()
                .write_all(contents.as_bytes())
                .context("cannot write to stdout")
        }
    }
}

fn alpha_beta_if_defined(config: &RunConfig) -> (Option<f64>, Option<f64>) {
    match config
        .initial_conditions
        .as_ref()
        .map(glassey::alpha_beta)
    {
        Some(Ok((alpha, beta))) => (Some(alpha), Some(beta)),
        _ => (None, None),
    }
}

pub fn cmd_simulate(args: &RunArgs) -> Result<()> {
    let config = args.resolve_config(Mode::Simulate)?;
    let profile = config.build_profile()?;
    let ic = config.initial_conditions()?;

    let started = Instant::now();
    let run = integrate(&profile, &ic, &config.integrator)?;
    let wall = started.elapsed();

    let (alpha, beta) = alpha_beta_if_defined(&config);
    let report = SimulateReport {
        z_max: profile.z_max(),
        a: profile.a(),
        b: profile.b(),
        hypotheses: run.hypotheses,
        hypotheses_pass: run.hypotheses.all_pass(),
        alpha,
        beta,
        result: ResultBlock::from(&run),
        bound_gamma: run.bound_gamma,
        bound_closed_form: run.bound_closed_form,
        stats: run.stats,
        config: config.clone(),
    };

    let report_path = args.out.clone().or(config.output.report.clone());
    write_output(report_path.as_deref(), &to_json(&report))?;

    let trajectory_path = args.trajectory.clone().or(config.output.trajectory.clone());
    if let Some(path) = trajectory_path {
        let mut buf = Vec::new();
        run.trajectory.write_csv(&mut buf)?;
        std::fs::write(&path, buf)
            .with_context(|| format!("cannot write trajectory {}", path.display()))?;
    }

    args.narrate(&match run.z_star_estimate {
        Some(z_star) => format!(
            "blow-up at z = {z_star:.9} (reached {:.9}); {} accepted steps in {:.3} s",
            run.z_reached,
            run.stats.accepted_steps,
            wall.as_secs_f64()
        ),
        None => format!(
            "no blow-up up to z = {:.9} ({:?}); {} accepted steps in {:.3} s",
            run.z_reached,
            run.reason,
            run.stats.accepted_steps,
            wall.as_secs_f64()
        ),
    });
    Ok(())
}

pub fn cmd_check(args: &RunArgs) -> Result<()> {
    let config = args.resolve_config(Mode::Check)?;
    let profile = config.build_profile()?;
    let ic = config.initial_conditions()?;
    let hypotheses = glassey::check_hypotheses(&profile, &ic);
    let (alpha, beta) = alpha_beta_if_defined(&config);
    let report = CheckReport {
        z_max: profile.z_max(),
        a: profile.a(),
        b: profile.b(),
        hypotheses,
        hypotheses_pass: hypotheses.all_pass(),
        alpha,
        beta,
        config: config.clone(),
    };
    let report_path = args.out.clone().or(config.output.report.clone());
    write_output(report_path.as_deref(), &to_json(&report))?;
    args.narrate(&format!(
        "hypotheses {}: b = {:.6}, a = {:.6}",
        if report.hypotheses_pass { "pass" } else { "fail" },
        profile.b(),
        profile.a(),
    ));
    Ok(())
}

pub fn cmd_verify_bound(args: &RunArgs) -> Result<()> {
    let config = args.resolve_config(Mode::VerifyBound)?;
    let profile = config.build_profile()?;
    let ic = config.initial_conditions()?;

    let hypotheses = glassey::check_hypotheses(&profile, &ic);
    if !hypotheses.all_pass() {
        bail!(
            "blow-up hypotheses fail ({hypotheses:?}); \
             the comparison bound does not apply to this configuration"
        );
    }
    let data = GlasseyData::from_run(&profile, &ic)?;
    let bounds = glassey::gamma_quadrature(&data)?;

    let simulate = config.verify.clone().unwrap_or_default().simulate;
    let (z_star_estimate, stats) = if simulate {
        let run = integrate(&profile, &ic, &config.integrator)?;
        (run.z_star_estimate, Some(run.stats))
    } else {
        (None, None)
    };

    // Extrapolation slack on the estimate, quadrature slack on the rest.
    let estimate_below_gamma =
        z_star_estimate.map(|est| est <= bounds.gamma_quadrature * (1.0 + 1e-3));
    let gamma_below_closed_form =
        bounds.gamma_quadrature <= bounds.gamma_closed_q * (1.0 + 1e-6);
    let closed_form_below_literal = bounds.gamma_closed_q <= bounds.l_star_nondim * (1.0 + 1e-6);
    let ordering_pass = estimate_below_gamma.unwrap_or(true)
        && gamma_below_closed_form
        && closed_form_below_literal;

    let report = VerifyBoundReport {
        z_max: profile.z_max(),
        a: profile.a(),
        b: profile.b(),
        alpha: data.alpha,
        beta: data.beta,
        z_star_estimate,
        bounds,
        estimate_below_gamma,
        gamma_below_closed_form,
        closed_form_below_literal,
        ordering_pass,
        stats,
        config: config.clone(),
    };
    let report_path = args.out.clone().or(config.output.report.clone());
    write_output(report_path.as_deref(), &to_json(&report))?;

    args.narrate(&format!(
        "ordering {}: estimate {} <= gamma {:.6} <= closed form {:.6} <= literal form {:.6}",
        if ordering_pass { "pass" } else { "FAIL" },
        z_star_estimate
            .map(|z| format!("{z:.6}"))
            .unwrap_or_else(|| "(not simulated)".into()),
        bounds.gamma_quadrature,
        bounds.gamma_closed_q,
        bounds.l_star_nondim,
    ));
    Ok(())
}

pub fn cmd_analytic(args: &RunArgs) -> Result<()> {
    let config = args.resolve_config(Mode::Analytic)?;
    let physical = config.physical.as_ref().expect("validated");
    let options = config.analytic.clone().unwrap_or_default();

    let constant_real = |spec: &ProfileSpec, name: &str| -> Result<f64> {
        match spec {
            ProfileSpec::Constant { value } if value.im == 0.0 => Ok(value.re),
            ProfileSpec::Constant { .. } => {
                bail!("'analytic' needs a real {name}; drop the imaginary part")
            }
            _ => bail!("'analytic' needs a constant {name} profile"),
        }
    };
    let params = SecSolutionParams {
        eps_l: constant_real(&physical.eps_l, "linear permittivity")?,
        theta: physical.theta,
        sigma: constant_real(&physical.sigma, "Kerr coefficient")?,
        k: physical.k,
        phase: options.phase,
    };
    params.validate()?;

    let z_pole = analytic::z_star(&params)?;
    let amplitude = analytic::amplitude(&params)?;
    let (field0, derivative0) = analytic::sec_solution_with_derivative(&params, 0.0)?;
    let l_star = glassey::l_star_physical(params.k, params.sigma, field0, derivative0)?;

    let mut csv = String::from("z,re_field,im_field,re_derivative,im_derivative,abs_residual,rel_residual\n");
    let mut max_rel_residual = 0.0f64;
    let k2 = params.k * params.k;
    for i in 0..options.count {
        let z = options.fraction * z_pole * (i as f64) / ((options.count - 1) as f64);
        let (field, derivative) = analytic::sec_solution_with_derivative(&params, z)?;
        let residual = analytic::residual(&params, z)?.norm();
        let rel = residual / (k2 * field.norm().powi(3));
        max_rel_residual = max_rel_residual.max(rel);
        csv.push_str(&format!(
            "{z:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
            field.re, field.im, derivative.re, derivative.im, residual, rel
        ));
    }

    let table_path = args.out.clone().or(config.output.table.clone());
    write_output(table_path.as_deref(), &csv)?;

    let summary = AnalyticSummary {
        z_star: z_pole,
        amplitude,
        l_star,
        l_star_over_z_star: l_star / z_pole,
        max_relative_residual: max_rel_residual,
        samples: options.count,
    };
    if let Some(path) = &config.output.report {
        write_output(Some(path), &to_json(&summary))?;
    }
    args.narrate(&format!(
        "z_star = {:.6}, A = {:.6}, L_star = {:.6}, L_star / z_star = {:.6}",
        summary.z_star, summary.amplitude, summary.l_star, summary.l_star_over_z_star
    ));
    Ok(())
}

pub fn cmd_sweep(args: &RunArgs) -> Result<()> {
    let config = args.resolve_config(Mode::Sweep)?;
    let workers = args.workers.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    let started = Instant::now();
    let (params, rows) = sweep::run_sweep(&config, workers)?;
    let wall = started.elapsed();

    let csv = sweep::to_csv(&params, &rows);
    let table_path = args.out.clone().or(config.output.table.clone());
    write_output(table_path.as_deref(), &csv)?;

    let blew_up = rows.iter().filter(|r| r.blew_up).count();
    args.narrate(&format!(
        "{} grid points ({blew_up} blow-ups) on {workers} workers in {:.3} s",
        rows.len(),
        wall.as_secs_f64()
    ));
    Ok(())
}
