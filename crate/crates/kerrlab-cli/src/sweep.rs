//! Parameter sweeps: grid expansion, per-point config rewriting, and a
//! bounded worker pool with deterministic row order.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{bail, Result};
use kerrlab::glassey;
use kerrlab::integrate::integrate;
use kerrlab::profile::ProfileSpec;
use num_complex::Complex64;

use crate::config::{AxisParam, RunConfig};

/// One evaluated grid point.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub values: Vec<f64>,
    pub blew_up: bool,
    pub z_star_estimate: Option<f64>,
    pub gamma: Option<f64>,
    pub closed_form_bound: Option<f64>,
}

impl SweepRow {
    /// Bound slack before the estimated blow-up point.
    pub fn margin(&self) -> Option<f64> {
        Some(self.gamma? - self.z_star_estimate?)
    }
}

fn fmt_field(value: Option<f64>) -> String {
    value.map(|v| format!("{v:.12e}")).unwrap_or_default()
}

/// Render the CSV table: swept values, blow-up verdict, estimate, bounds,
/// and the bound margin.
pub fn to_csv(axes: &[AxisParam], rows: &[SweepRow]) -> String {
    let mut out = String::new();
    for axis in axes {
        out.push_str(axis.name());
        out.push(',');
    }
    out.push_str("blew_up,z_star_estimate,gamma,closed_form_bound,margin\n");
    for row in rows {
        for v in &row.values {
            out.push_str(&format!("{v:.12e},"));
        }
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.blew_up,
            fmt_field(row.z_star_estimate),
            fmt_field(row.gamma),
            fmt_field(row.closed_form_bound),
            fmt_field(row.margin()),
        ));
    }
    out
}

/// Rewrite a base config with one axis assignment.
fn apply_axis(config: &mut RunConfig, param: AxisParam, value: f64) -> Result<()> {
    let set_constant = |spec: &mut ProfileSpec, re: Option<f64>, im: Option<f64>| -> Result<()> {
        let ProfileSpec::Constant { value } = spec else {
            bail!("swept profile must be constant");
        };
        if let Some(re) = re {
            value.re = re;
        }
        if let Some(im) = im {
            value.im = im;
        }
        Ok(())
    };

    match param {
        AxisParam::K | AxisParam::Theta | AxisParam::Thickness => {
            let Some(physical) = config.physical.as_mut() else {
                bail!("axis '{}' requires a physical block", param.name());
            };
            match param {
                AxisParam::K => physical.k = value,
                AxisParam::Theta => physical.theta = value,
                _ => physical.thickness = value,
            }
        }
        AxisParam::ReR | AxisParam::ImR | AxisParam::ReS | AxisParam::ImS => {
            let Some(block) = config.nondimensional.as_mut() else {
                bail!("axis '{}' requires a nondimensional block", param.name());
            };
            match param {
                AxisParam::ReR => set_constant(&mut block.r, Some(value), None)?,
                AxisParam::ImR => set_constant(&mut block.r, None, Some(value))?,
                AxisParam::ReS => set_constant(&mut block.s, Some(value), None)?,
                _ => set_constant(&mut block.s, None, Some(value))?,
            }
        }
        AxisParam::AbsC0 => {
            let Some(ic) = config.initial_conditions.as_mut() else {
                bail!("abs_c0 axis requires initial conditions");
            };
            ic.c0 = if ic.c0.norm_sqr() == 0.0 {
                Complex64::new(value, 0.0)
            } else {
                Complex64::from_polar(value, ic.c0.arg())
            };
        }
        AxisParam::RelativePhase => {
            let Some(ic) = config.initial_conditions.as_mut() else {
                bail!("relative_phase axis requires initial conditions");
            };
            ic.c1 = Complex64::from_polar(ic.c1.norm(), ic.c0.arg() + value);
        }
    }
    Ok(())
}

/// The grid in row-major axis order.
pub fn grid_assignments(config: &RunConfig) -> (Vec<AxisParam>, Vec<Vec<f64>>) {
    let sweep = config.sweep.as_ref().expect("validated: sweep block present");
    let params: Vec<AxisParam> = sweep.axes.iter().map(|a| a.parameter).collect();
    let values: Vec<Vec<f64>> = sweep.axes.iter().map(|a| a.values()).collect();
    let mut points = Vec::new();
    match values.len() {
        1 => {
            for &v in &values[0] {
                points.push(vec![v]);
            }
        }
        _ => {
            for &outer in &values[0] {
                for &inner in &values[1] {
                    points.push(vec![outer, inner]);
                }
            }
        }
    }
    (params, points)
}

fn evaluate_point(base: &RunConfig, params: &[AxisParam], values: &[f64]) -> Result<SweepRow> {
    let mut config = base.clone();
    for (&param, &value) in params.iter().zip(values) {
        apply_axis(&mut config, param, value)?;
    }
    let profile = config.build_profile()?;
    let ic = config.initial_conditions()?;
    let report = integrate(&profile, &ic, &config.integrator)?;
    let closed_form = report.hypotheses.all_pass().then(|| {
        let (_, beta) = glassey::alpha_beta(&ic).expect("hypotheses imply nonzero data");
        glassey::l_star_nondim(beta, profile.b())
    });
    Ok(SweepRow {
        values: values.to_vec(),
        blew_up: report.blew_up,
        z_star_estimate: report.z_star_estimate,
        gamma: report.bound_gamma,
        closed_form_bound: closed_form,
    })
}

/// Evaluate the whole grid on up to `workers` threads. Rows come back in
/// grid order regardless of scheduling.
pub fn run_sweep(config: &RunConfig, workers: usize) -> Result<(Vec<AxisParam>, Vec<SweepRow>)> {
    let (params, points) = grid_assignments(config);
    let workers = workers.max(1).min(points.len().max(1));

    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<SweepRow>>>> =
        (0..points.len()).map(|_| Mutex::new(None)).collect();

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= points.len() {
                    break;
                }
                let row = evaluate_point(config, &params, &points[index]);
                *slots[index].lock().expect("sweep slot poisoned") = Some(row);
            });
        }
    });

    let mut rows = Vec::with_capacity(points.len());
    for slot in slots {
        rows.push(slot.into_inner().expect("sweep slot poisoned").expect("every point evaluated")?);
    }
    Ok((params, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Axis, NondimensionalBlock, Spacing, SweepBlock};
    use kerrlab::integrate::InitialConditions;

    fn base_config() -> RunConfig {
        RunConfig {
            nondimensional: Some(NondimensionalBlock {
                z_max: 2.0,
                r: ProfileSpec::constant(1.0, 0.0),
                s: ProfileSpec::constant(-1.0, 0.0),
            }),
            initial_conditions: Some(InitialConditions {
                c0: Complex64::new(2.0, 0.0),
                c1: Complex64::new(2.0, 0.0),
            }),
            ..Default::default()
        }
    }

    #[test]
    fn grid_is_row_major() {
        let mut config = base_config();
        config.sweep = Some(SweepBlock {
            axes: vec![
                Axis {
                    parameter: AxisParam::ReS,
                    start: -1.0,
                    stop: -0.5,
                    count: 2,
                    spacing: Spacing::Linear,
                },
                Axis {
                    parameter: AxisParam::ImS,
                    start: 0.0,
                    stop: 1.0,
                    count: 3,
                    spacing: Spacing::Linear,
                },
            ],
        });
        let (params, points) = grid_assignments(&config);
        assert_eq!(params, vec![AxisParam::ReS, AxisParam::ImS]);
        assert_eq!(points.len(), 6);
        assert_eq!(points[0], vec![-1.0, 0.0]);
        assert_eq!(points[1], vec![-1.0, 0.5]);
        assert_eq!(points[3], vec![-0.5, 0.0]);
    }

    #[test]
    fn axis_application_rewrites_config() {
        let mut config = base_config();
        apply_axis(&mut config, AxisParam::ImS, 0.25).unwrap();
        let block = config.nondimensional.as_ref().unwrap();
        assert_eq!(
            block.s,
            ProfileSpec::Constant {
                value: Complex64::new(-1.0, 0.25)
            }
        );

        apply_axis(&mut config, AxisParam::AbsC0, 3.0).unwrap();
        assert!((config.initial_conditions.unwrap().c0.norm() - 3.0).abs() < 1e-15);

        apply_axis(&mut config, AxisParam::RelativePhase, 0.5).unwrap();
        let ic = config.initial_conditions.unwrap();
        assert!((ic.c1.arg() - ic.c0.arg() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn worker_counts_agree() {
        let mut config = base_config();
        config.sweep = Some(SweepBlock {
            axes: vec![Axis {
                parameter: AxisParam::ImS,
                start: 0.0,
                stop: 0.4,
                count: 5,
                spacing: Spacing::Linear,
            }],
        });
        let (params, serial) = run_sweep(&config, 1).unwrap();
        let (_, parallel) = run_sweep(&config, 4).unwrap();
        assert_eq!(to_csv(&params, &serial), to_csv(&params, &parallel));
        assert!(serial.iter().all(|row| row.blew_up));
    }
}
