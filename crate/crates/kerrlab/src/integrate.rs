//! Adaptive integration of the nondimensional Kerr-slab oscillator.
//!
//! The second-order complex equation
//!
//! ```text
//! phi'' + [r(z) + s(z) |phi|^2] phi = 0
//! ```
//!
//! is reduced to a first-order system in `(phi, phi')` and advanced by an
//! embedded Dormand-Prince 5(4) pair with PI step-size control. Along the
//! way the comparison monitors `u = |phi|^2 / 2`, `u' = Re(phi* phi')` and
//! `u'' = |phi'|^2 - 2 [Re r + 2 Re s u] u` are recorded at every accepted
//! step. A run terminates on the slab end, on the step budget, or on
//! blow-up: the field magnitude crossing the configured threshold together
//! with the adaptive step size collapsing below its floor. On blow-up the
//! pole location is extrapolated from the linear vanishing of `1 / |phi|`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glassey::{self, HypothesisReport};
use crate::profile::SlabProfile;

/// Field sample: coordinate, complex amplitude and derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    pub z: f64,
    #[serde(with = "crate::serde_util::complex_pair")]
    pub phi: Complex64,
    #[serde(with = "crate::serde_util::complex_pair")]
    pub dphi: Complex64,
}

impl FieldState {
    /// Second derivative from the oscillator itself.
    pub fn second_derivative(&self, profile: &SlabProfile) -> Result<Complex64> {
        Ok(helmholtz_rhs(self.z, self.phi, self.dphi, profile)?.1)
    }
}

/// Initial data `phi(0) = c0`, `phi'(0) = c1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialConditions {
    #[serde(with = "crate::serde_util::complex_pair")]
    pub c0: Complex64,
    #[serde(with = "crate::serde_util::complex_pair")]
    pub c1: Complex64,
}

impl InitialConditions {
    pub fn validate(&self) -> Result<()> {
        for v in [self.c0, self.c1] {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::InvalidInput("initial conditions must be finite".into()));
            }
        }
        Ok(())
    }
}

/// Integrator knobs. `None` fields resolve to problem-dependent defaults:
/// `max_step = z_max / 50`, `blowup_threshold = 1e8 max(1, |c0|)`,
/// `min_step = 1e-13 z_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: Option<f64>,
    pub blowup_threshold: Option<f64>,
    pub min_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_step: None,
            blowup_threshold: None,
            min_step: None,
            max_steps: 1_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidConfig("rel_tol must be positive".into()));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidConfig("abs_tol must be positive".into()));
        }
        for (name, value) in [
            ("max_step", self.max_step),
            ("blowup_threshold", self.blowup_threshold),
            ("min_step", self.min_step),
        ] {
            if let Some(v) = value {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::InvalidConfig(format!("{name} must be positive")));
                }
            }
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be positive".into()));
        }
        Ok(())
    }

    fn resolve(&self, z_max: f64, c0_magnitude: f64) -> Result<ResolvedConfig> {
        self.validate()?;
        let max_step = self.max_step.unwrap_or(z_max / 50.0);
        let min_step = self.min_step.unwrap_or(1e-13 * z_max);
        let blowup_threshold = self
            .blowup_threshold
            .unwrap_or(1e8 * c0_magnitude.max(1.0));
        if min_step >= max_step {
            return Err(Error::InvalidConfig(format!(
                "min_step {min_step} must be below max_step {max_step}"
            )));
        }
        Ok(ResolvedConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step,
            min_step,
            blowup_threshold,
            max_steps: self.max_steps,
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct ResolvedConfig {
    rel_tol: f64,
    abs_tol: f64,
    max_step: f64,
    min_step: f64,
    blowup_threshold: f64,
    max_steps: usize,
}

/// One accepted step with the comparison monitors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub z: f64,
    #[serde(with = "crate::serde_util::complex_pair")]
    pub phi: Complex64,
    #[serde(with = "crate::serde_util::complex_pair")]
    pub dphi: Complex64,
    /// `|phi|^2 / 2`
    pub u: f64,
    /// `Re(phi* phi')`
    pub du: f64,
    /// `|phi'|^2 - 2 [Re r + 2 Re s u] u`
    pub ddu: f64,
}

/// Accepted-step records in strictly increasing coordinate order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    /// Assemble a trajectory from records, e.g. a thinned or sliced copy.
    pub fn from_points(points: Vec<TrajectoryPoint>) -> Result<Self> {
        if points.windows(2).any(|w| w[1].z <= w[0].z) {
            return Err(Error::InvalidInput(
                "trajectory coordinates must be strictly increasing".into(),
            ));
        }
        Ok(Trajectory { points })
    }

    pub fn points(&self) -> &[TrajectoryPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> Option<&TrajectoryPoint> {
        self.points.last()
    }

    fn push_state(&mut self, z: f64, phi: Complex64, dphi: Complex64, profile: &SlabProfile) {
        let r = profile.eval_r(z).map(|v| v.re).unwrap_or(f64::NAN);
        let s = profile.eval_s(z).map(|v| v.re).unwrap_or(f64::NAN);
        let u = 0.5 * phi.norm_sqr();
        let du = (phi.conj() * dphi).re;
        let ddu = dphi.norm_sqr() - 2.0 * (r + 2.0 * s * u) * u;
        debug_assert!(self.points.last().is_none_or(|p| z > p.z));
        self.points.push(TrajectoryPoint {
            z,
            phi,
            dphi,
            u,
            du,
            ddu,
        });
    }

    /// CSV export, one row per accepted step, 13 significant digits.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "z,re_phi,im_phi,re_dphi,im_dphi,u,u_prime,u_double_prime")?;
        for p in &self.points {
            writeln!(
                out,
                "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                p.z, p.phi.re, p.phi.im, p.dphi.re, p.dphi.im, p.u, p.du, p.ddu
            )?;
        }
        Ok(())
    }
}

/// Why the integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// Field magnitude crossed the blow-up threshold and the adaptive step
    /// collapsed below the floor.
    ThresholdAndStepCollapse,
    /// Reached `z_max` with a finite field.
    DomainEnd,
    /// Step budget exhausted; inconclusive.
    StepBudget,
}

/// Step counters of one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evaluations: usize,
}

/// Full outcome of one integration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub blew_up: bool,
    /// Extrapolated pole location; present iff `blew_up`.
    pub z_star_estimate: Option<f64>,
    /// Set when the pole extrapolation had to fall back to a degenerate fit.
    pub low_confidence: bool,
    /// Last accepted coordinate.
    pub z_reached: f64,
    pub reason: StopReason,
    pub trajectory: Trajectory,
    /// Comparison-integral bound; present when the hypotheses hold.
    pub bound_gamma: Option<f64>,
    /// The `2.023 / (beta |b|)^(1/3)` bound; present when the hypotheses hold.
    pub bound_closed_form: Option<f64>,
    pub hypotheses: HypothesisReport,
    pub stats: SolverStats,
}

/// First-order right-hand side of the oscillator:
/// `(phi, phi')' = (phi', -[r(z) + s(z) |phi|^2] phi)`.
pub fn helmholtz_rhs(
    z: f64,
    phi: Complex64,
    dphi: Complex64,
    profile: &SlabProfile,
) -> Result<(Complex64, Complex64)> {
    if !phi.re.is_finite() || !phi.im.is_finite() || !dphi.re.is_finite() || !dphi.im.is_finite() {
        return Err(Error::NonFinite { z });
    }
    let r = profile.eval_r(z)?;
    let s = profile.eval_s(z)?;
    let ddphi = -(r + s * phi.norm_sqr()) * phi;
    Ok((dphi, ddphi))
}

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Step controller constants (PI stabilization).
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const ERR_EXPONENT: f64 = 0.2;
const PI_BETA: f64 = 0.04;

type State = [Complex64; 2];

fn state_finite(y: &State) -> bool {
    y.iter()
        .all(|c| c.re.is_finite() && c.im.is_finite())
}

fn rhs_state(z: f64, y: &State, profile: &SlabProfile) -> Result<State> {
    let (dphi, ddphi) = helmholtz_rhs(z, y[0], y[1], profile)?;
    Ok([dphi, ddphi])
}

/// Weighted RMS over the four real components of the complex pair.
fn error_norm(err: &State, y_old: &State, y_new: &State, rel_tol: f64, abs_tol: f64) -> f64 {
    let mut acc = 0.0;
    let comps = |s: &State| [s[0].re, s[0].im, s[1].re, s[1].im];
    let e = comps(err);
    let a = comps(y_old);
    let b = comps(y_new);
    for i in 0..4 {
        let scale = abs_tol + rel_tol * a[i].abs().max(b[i].abs());
        acc += (e[i] / scale).powi(2);
    }
    (acc / 4.0).sqrt()
}

/// Starting step-size heuristic based on the local derivative scale.
fn initial_step(
    z0: f64,
    y0: &State,
    f0: &State,
    profile: &SlabProfile,
    cfg: &ResolvedConfig,
    z_end: f64,
) -> f64 {
    let norm_scaled = |v: &State, w: &State| {
        let comps = |s: &State| [s[0].re, s[0].im, s[1].re, s[1].im];
        let v = comps(v);
        let w = comps(w);
        let mut acc = 0.0;
        for i in 0..4 {
            let scale = cfg.abs_tol + cfg.rel_tol * w[i].abs();
            acc += (v[i] / scale).powi(2);
        }
        (acc / 4.0).sqrt()
    };
    let d0 = norm_scaled(y0, y0);
    let d1 = norm_scaled(f0, y0);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h0 = h0.min(cfg.max_step).min(z_end - z0);

    let y1 = [y0[0] + f0[0] * h0, y0[1] + f0[1] * h0];
    let h1 = match rhs_state(z0 + h0, &y1, profile) {
        Ok(f1) => {
            let diff = [f1[0] - f0[0], f1[1] - f0[1]];
            let d2 = norm_scaled(&diff, y0) / h0;
            if d1.max(d2) <= 1e-15 {
                (h0 * 1e-3).max(1e-6)
            } else {
                (0.01 / d1.max(d2)).powf(0.2)
            }
        }
        Err(_) => h0 * 1e-3,
    };
    (100.0 * h0).min(h1).min(cfg.max_step).min(z_end - z0).max(cfg.min_step)
}

/// Integrate the oscillator from `z = 0` to the slab end or to blow-up.
///
/// Termination:
/// 1. field magnitude above the blow-up threshold together with the adaptive
///    step collapsing below the floor: `blew_up = true`, the pole location is
///    extrapolated from the trailing records;
/// 2. `z >= z_max`: `blew_up = false`;
/// 3. step budget exhausted: inconclusive.
///
/// When the blow-up hypotheses hold, the comparison bound and its closed
/// form are attached to the report.
pub fn integrate(
    profile: &SlabProfile,
    ic: &InitialConditions,
    config: &IntegratorConfig,
) -> Result<BlowupReport> {
    ic.validate()?;
    let cfg = config.resolve(profile.z_max(), ic.c0.norm())?;
    let z_end = profile.z_max();

    let hypotheses = glassey::check_hypotheses(profile, ic);
    let (bound_gamma, bound_closed_form) = if hypotheses.all_pass() {
        match glassey::GlasseyData::from_run(profile, ic)
            .and_then(|data| glassey::gamma_quadrature(&data))
        {
            Ok(bounds) => (Some(bounds.gamma_quadrature), Some(bounds.l_star_nondim)),
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    };

    let mut stats = SolverStats::default();
    let mut trajectory = Trajectory::default();

    let mut z = 0.0f64;
    let mut y: State = [ic.c0, ic.c1];
    let mut f_current = rhs_state(z, &y, profile)?;
    stats.rhs_evaluations += 1;
    trajectory.push_state(z, y[0], y[1], profile);

    let mut h = initial_step(z, &y, &f_current, profile, &cfg, z_end);
    stats.rhs_evaluations += 1;

    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;
    let mut last_step = h;

    let reason = loop {
        if z >= z_end {
            break StopReason::DomainEnd;
        }
        if stats.accepted_steps + stats.rejected_steps >= cfg.max_steps {
            break StopReason::StepBudget;
        }

        let h_step = h.min(z_end - z);
        let step = attempt_step(z, &y, &f_current, h_step, profile);
        stats.rhs_evaluations += 6;

        let outcome = match step {
            Ok((y_new, f_new, err_vec)) => {
                let err = error_norm(&err_vec, &y, &y_new, cfg.rel_tol, cfg.abs_tol);
                if err.is_finite() && err <= 1.0 && state_finite(&y_new) {
                    Some((y_new, f_new, err))
                } else {
                    None
                }
            }
            Err(_) => None,
        };

        match outcome {
            Some((y_new, f_new, err)) => {
                z += h_step;
                y = y_new;
                f_current = f_new;
                last_step = h_step;
                stats.accepted_steps += 1;
                trajectory.push_state(z, y[0], y[1], profile);

                let fac11 = err.max(1e-30).powf(ERR_EXPONENT);
                let fac = (fac11 / fac_old.powf(PI_BETA) / SAFETY)
                    .clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                let mut h_next = h_step / fac;
                if last_rejected {
                    h_next = h_next.min(h_step);
                    last_rejected = false;
                }
                fac_old = err.max(1e-4);
                h_next = h_next.min(cfg.max_step);

                if z >= z_end {
                    break StopReason::DomainEnd;
                }
                if y[0].norm() >= cfg.blowup_threshold && h_next < cfg.min_step {
                    break StopReason::ThresholdAndStepCollapse;
                }
                h = h_next.max(cfg.min_step);
            }
            None => {
                stats.rejected_steps += 1;
                last_rejected = true;
                let h_next = h_step * 0.5;
                if y[0].norm() >= cfg.blowup_threshold && h_next < cfg.min_step {
                    break StopReason::ThresholdAndStepCollapse;
                }
                h = h_next.max(cfg.min_step);
            }
        }
    };

    let blew_up = reason == StopReason::ThresholdAndStepCollapse;
    let (z_star_estimate, low_confidence) = if blew_up {
        let estimate = estimate_blowup_point(&trajectory, cfg.blowup_threshold, last_step);
        (Some(estimate.z_star), estimate.low_confidence)
    } else {
        (None, false)
    };

    Ok(BlowupReport {
        blew_up,
        z_star_estimate,
        low_confidence,
        z_reached: z,
        reason,
        trajectory,
        bound_gamma,
        bound_closed_form,
        hypotheses,
        stats,
    })
}

/// One Dormand-Prince step: returns the 5th-order solution, the FSAL
/// derivative at the step end, and the embedded error vector.
fn attempt_step(
    z: f64,
    y: &State,
    k1: &State,
    h: f64,
    profile: &SlabProfile,
) -> Result<(State, State, State)> {
    let add = |y: &State, terms: &[(f64, &State)]| -> State {
        let mut out = *y;
        for (c, k) in terms {
            out[0] += k[0] * (*c * h);
            out[1] += k[1] * (*c * h);
        }
        out
    };

    let y2 = add(y, &[(A21, k1)]);
    let k2 = rhs_state(z + C2 * h, &y2, profile)?;
    let y3 = add(y, &[(A31, k1), (A32, &k2)]);
    let k3 = rhs_state(z + C3 * h, &y3, profile)?;
    let y4 = add(y, &[(A41, k1), (A42, &k2), (A43, &k3)]);
    let k4 = rhs_state(z + C4 * h, &y4, profile)?;
    let y5 = add(y, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
    let k5 = rhs_state(z + C5 * h, &y5, profile)?;
    let y6 = add(
        y,
        &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
    );
    let k6 = rhs_state(z + h, &y6, profile)?;
    let y_new = add(y, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = rhs_state(z + h, &y_new, profile)?;

    let mut err = [Complex64::new(0.0, 0.0); 2];
    for i in 0..2 {
        err[i] = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
    }
    Ok((y_new, k7, err))
}

/// Pole-extrapolation outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupEstimate {
    pub z_star: f64,
    pub low_confidence: bool,
}

/// Extrapolate the blow-up point from the trailing accepted steps.
///
/// Near a first-order pole `1/|phi|` vanishes linearly, so a least-squares
/// line through `w(z) = 1/|phi(z)|` on the qualifying tail (records with
/// `|phi| >= 0.01 * threshold`, at least 4 of them, else the last 8 records)
/// is fitted and its root returned. A root not ahead of the last accepted
/// coordinate, or a non-decreasing fit, falls back with `low_confidence`.
pub fn estimate_blowup_point(
    trajectory: &Trajectory,
    blowup_threshold: f64,
    last_step: f64,
) -> BlowupEstimate {
    let points = trajectory.points();
    let last_z = points.last().map(|p| p.z).unwrap_or(0.0);
    if points.is_empty() {
        return BlowupEstimate {
            z_star: last_z,
            low_confidence: true,
        };
    }

    let qualifying = points
        .iter()
        .rev()
        .take_while(|p| p.phi.norm() >= 0.01 * blowup_threshold)
        .count();
    let tail_len = if qualifying >= 4 {
        qualifying
    } else {
        points.len().min(8)
    };
    let tail = &points[points.len() - tail_len..];

    if tail.len() < 2 {
        return BlowupEstimate {
            z_star: last_z,
            low_confidence: true,
        };
    }

    // Least squares for w = w_mean + slope (z - z_mean).
    let n = tail.len() as f64;
    let z_mean = tail.iter().map(|p| p.z).sum::<f64>() / n;
    let w = |p: &TrajectoryPoint| p.phi.norm().recip();
    let w_mean = tail.iter().map(w).sum::<f64>() / n;
    let mut s_zz = 0.0;
    let mut s_zw = 0.0;
    for p in tail {
        let dz = p.z - z_mean;
        s_zz += dz * dz;
        s_zw += dz * (w(p) - w_mean);
    }
    if s_zz == 0.0 {
        return BlowupEstimate {
            z_star: last_z,
            low_confidence: true,
        };
    }
    let slope = s_zw / s_zz;
    if slope >= 0.0 {
        // w must decrease toward the pole; a flat or rising fit is degenerate.
        return BlowupEstimate {
            z_star: last_z,
            low_confidence: true,
        };
    }
    let root = z_mean - w_mean / slope;
    if root <= last_z {
        return BlowupEstimate {
            z_star: last_z + last_step,
            low_confidence: true,
        };
    }
    BlowupEstimate {
        z_star: root,
        low_confidence: false,
    }
}

/// Worst normalized finite-difference residuals of the monitor identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorResiduals {
    /// Central difference of `u` against the stored `u'`.
    pub du_residual: f64,
    /// Central difference of `u'` against the stored `u''`.
    pub ddu_residual: f64,
}

/// Certify the monitor identities on a trajectory by second-order central
/// differences at the interior points. Residuals are normalized by the local
/// magnitude of the difference quotients.
pub fn monitor_identities(trajectory: &Trajectory) -> Result<MonitorResiduals> {
    let points = trajectory.points();
    if points.len() < 3 {
        return Err(Error::InvalidInput(
            "monitor certification needs at least 3 trajectory points".into(),
        ));
    }

    let residual = |values: &dyn Fn(&TrajectoryPoint) -> f64,
                    derivs: &dyn Fn(&TrajectoryPoint) -> f64| {
        let mut worst = 0.0f64;
        for i in 1..points.len() - 1 {
            let (prev, here, next) = (&points[i - 1], &points[i], &points[i + 1]);
            let h1 = here.z - prev.z;
            let h2 = next.z - here.z;
            let (f0, f1, f2) = (values(prev), values(here), values(next));
            // Three-point nonuniform first derivative, exact for quadratics.
            let fd = (h1 * h1 * f2 - h2 * h2 * f0 + (h2 * h2 - h1 * h1) * f1)
                / (h1 * h2 * (h1 + h2));
            let scale =
                (f0.abs() + f1.abs() + f2.abs()) / (h1 + h2) + derivs(here).abs() + f64::MIN_POSITIVE;
            worst = worst.max((fd - derivs(here)).abs() / scale);
        }
        worst
    };

    Ok(MonitorResiduals {
        du_residual: residual(&|p| p.u, &|p| p.du),
        ddu_residual: residual(&|p| p.du, &|p| p.ddu),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::ProfileSpec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn constant_profile(r: Complex64, s: Complex64, z_max: f64) -> SlabProfile {
        SlabProfile::new(
            ProfileSpec::Constant { value: r },
            ProfileSpec::Constant { value: s },
            z_max,
        )
        .unwrap()
    }

    #[test]
    fn rhs_values() {
        let profile = constant_profile(c(1.0, 0.0), c(-1.0, 0.0), 2.0);
        let (d, dd) = helmholtz_rhs(0.5, c(0.0, 0.0), c(3.0, -1.0), &profile).unwrap();
        assert_eq!(d, c(3.0, -1.0));
        assert_eq!(dd, c(0.0, 0.0));

        // Nonlinearity cancels the linear term at |phi| = 1, r = 1, s = -1.
        let (_, dd) = helmholtz_rhs(0.0, c(1.0, 0.0), c(0.0, 0.0), &profile).unwrap();
        assert!(dd.norm() < 1e-15);

        let stiff = constant_profile(c(2.0, 0.0), c(-1.0, 0.0), 2.0);
        let (_, dd) = helmholtz_rhs(0.0, c(1.0, 0.0), c(0.0, 0.0), &stiff).unwrap();
        assert!((dd - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rhs_rejects_non_finite_input() {
        let profile = constant_profile(c(1.0, 0.0), c(-1.0, 0.0), 2.0);
        assert!(matches!(
            helmholtz_rhs(0.0, c(f64::INFINITY, 0.0), c(0.0, 0.0), &profile),
            Err(Error::NonFinite { .. })
        ));
        assert!(matches!(
            helmholtz_rhs(0.0, c(1.0, 0.0), c(f64::NAN, 0.0), &profile),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn linear_oscillator_stays_bounded() {
        let profile = constant_profile(c(1.0, 0.0), c(0.0, 0.0), 10.0);
        let ic = InitialConditions {
            c0: c(1.0, 0.0),
            c1: c(0.0, 0.0),
        };
        let report = integrate(&profile, &ic, &IntegratorConfig::default()).unwrap();
        assert!(!report.blew_up);
        assert_eq!(report.reason, StopReason::DomainEnd);
        assert!(report.z_star_estimate.is_none());
        assert!(report.bound_gamma.is_none(), "b = 0 fails the hypotheses");
        for p in report.trajectory.points() {
            let exact = p.z.cos();
            assert!(
                (p.phi.re - exact).abs() <= 1e-6 * exact.abs().max(1.0),
                "z = {}",
                p.z
            );
            assert!(p.phi.norm() <= 1.0 + 1e-9);
        }
        assert!((report.z_reached - 10.0).abs() < 1e-12);
    }

    #[test]
    fn secant_benchmark_blows_up_at_quarter_pi() {
        let profile = constant_profile(c(1.0, 0.0), c(-1.0, 0.0), 2.0);
        let ic = InitialConditions {
            c0: c(2.0, 0.0),
            c1: c(2.0, 0.0),
        };
        let report = integrate(&profile, &ic, &IntegratorConfig::default()).unwrap();
        assert!(report.blew_up);
        assert_eq!(report.reason, StopReason::ThresholdAndStepCollapse);
        let estimate = report.z_star_estimate.unwrap();
        assert!(
            (estimate - std::f64::consts::FRAC_PI_4).abs() < 1e-4,
            "estimate {estimate}"
        );
        assert!(!report.low_confidence);
        assert!(estimate >= report.z_reached);
        let gamma = report.bound_gamma.unwrap();
        assert!(estimate <= gamma);
        assert!(gamma <= report.bound_closed_form.unwrap() * (1.0 + 1e-6));
    }

    #[test]
    fn lossy_slab_blows_up_before_its_bound() {
        let profile = constant_profile(c(1.0, 0.1), c(-1.0, 0.2), 10.0);
        let ic = InitialConditions {
            c0: c(2.0, 0.0),
            c1: c(2.0, 0.0),
        };
        let report = integrate(&profile, &ic, &IntegratorConfig::default()).unwrap();
        assert!(report.blew_up);
        assert!(report.z_star_estimate.unwrap() <= report.bound_gamma.unwrap());
    }

    #[test]
    fn trajectory_monitors_recompute_from_state() {
        let profile = constant_profile(c(1.0, 0.0), c(-1.0, 0.0), 2.0);
        let ic = InitialConditions {
            c0: c(2.0, 0.0),
            c1: c(2.0, 0.0),
        };
        let report = integrate(&profile, &ic, &IntegratorConfig::default()).unwrap();
        let first = &report.trajectory.points()[0];
        assert_eq!(first.u, 2.0);
        assert_eq!(first.du, 4.0);
        // u'' = |phi'|^2 - 2 [Re r + 2 Re s u] u = 4 - 2 (1 - 4) 2 = 16
        assert_eq!(first.ddu, 16.0);
        for p in report.trajectory.points() {
            assert_eq!(p.u, 0.5 * p.phi.norm_sqr());
        }
        let zs: Vec<f64> = report.trajectory.points().iter().map(|p| p.z).collect();
        assert!(zs.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn monitor_point_identity_at_zero_field() {
        let profile = constant_profile(c(1.0, 0.0), c(-1.0, 0.0), 2.0);
        let mut traj = Trajectory::default();
        traj.push_state(0.0, c(0.0, 0.0), c(3.0, 4.0), &profile);
        let p = &traj.points()[0];
        assert_eq!(p.u, 0.0);
        assert_eq!(p.du, 0.0);
        assert_eq!(p.ddu, 25.0);
    }

    #[test]
    #[allow(clippy::approx_constant)] // synthetic root value, not a constant
    fn extrapolation_recovers_exact_linear_tail() {
        let profile = constant_profile(c(1.0, 0.0), c(-1.0, 0.0), 2.0);
        let mut traj = Trajectory::default();
        for &z in &[0.70, 0.72, 0.74, 0.76] {
            let w = 0.785398 - z;
            traj.push_state(z, c(1.0 / w, 0.0), c(0.0, 0.0), &profile);
        }
        let est = estimate_blowup_point(&traj, 100.0, 0.02);
        assert!(!est.low_confidence);
        assert!((est.z_star - 0.785398).abs() < 1e-9, "got {}", est.z_star);
    }

    #[test]
    fn extrapolation_flags_constant_magnitude() {
        let profile = constant_profile(c(1.0, 0.0), c(-1.0, 0.0), 2.0);
        let mut traj = Trajectory::default();
        for &z in &[0.1, 0.2, 0.3, 0.4] {
            traj.push_state(z, c(50.0, 0.0), c(0.0, 0.0), &profile);
        }
        let est = estimate_blowup_point(&traj, 100.0, 0.1);
        assert!(est.low_confidence);
        assert_eq!(est.z_star, 0.4);
    }

    #[test]
    fn extrapolation_falls_back_when_root_is_behind() {
        let profile = constant_profile(c(1.0, 0.0), c(-1.0, 0.0), 2.0);
        let mut traj = Trajectory::default();
        // Convex decay of 1/|phi|: the least-squares line crosses zero
        // before the last sample.
        for (&z, &w) in [0.1, 0.2, 0.3, 0.4].iter().zip(&[0.9, 0.5, 0.1, 0.05]) {
            traj.push_state(z, c(1.0 / w, 0.0), c(0.0, 0.0), &profile);
        }
        let est = estimate_blowup_point(&traj, 50.0, 0.1);
        assert!(est.low_confidence);
        assert!((est.z_star - 0.5).abs() < 1e-12, "last z plus last step");
    }

    #[test]
    fn monitor_residuals_small_on_analytic_samples() {
        // Sample the exact secant solution on a uniform fine grid and check
        // that the stored monitors match their finite differences.
        let params = crate::analytic::SecSolutionParams {
            eps_l: 1.0,
            theta: 0.0,
            sigma: -1.0,
            k: 1.0,
            phase: 0.3,
        };
        let profile = constant_profile(c(1.0, 0.0), c(-1.0, 0.0), 2.0);
        let mut traj = Trajectory::default();
        let mut z = 0.0;
        while z <= 0.6 {
            let (phi, dphi) = crate::analytic::sec_solution_with_derivative(&params, z).unwrap();
            traj.push_state(z, phi, dphi, &profile);
            z += 5e-4;
        }
        let res = monitor_identities(&traj).unwrap();
        assert!(res.du_residual < 1e-5, "du residual {}", res.du_residual);
        assert!(res.ddu_residual < 1e-5, "ddu residual {}", res.ddu_residual);
    }

    #[test]
    fn monitor_identities_needs_three_points() {
        let profile = constant_profile(c(1.0, 0.0), c(-1.0, 0.0), 2.0);
        let mut traj = Trajectory::default();
        traj.push_state(0.0, c(1.0, 0.0), c(0.0, 0.0), &profile);
        traj.push_state(0.1, c(1.0, 0.0), c(0.0, 0.0), &profile);
        assert!(monitor_identities(&traj).is_err());
    }

    #[test]
    fn config_validation() {
        let bad = IntegratorConfig {
            rel_tol: 0.0,
            ..IntegratorConfig::default()
        };
        assert!(bad.validate().is_err());
        let crossed = IntegratorConfig {
            min_step: Some(1.0),
            max_step: Some(0.5),
            ..IntegratorConfig::default()
        };
        let profile = constant_profile(c(1.0, 0.0), c(-1.0, 0.0), 2.0);
        let ic = InitialConditions {
            c0: c(1.0, 0.0),
            c1: c(1.0, 0.0),
        };
        assert!(integrate(&profile, &ic, &crossed).is_err());
        let non_finite_ic = InitialConditions {
            c0: c(f64::NAN, 0.0),
            c1: c(1.0, 0.0),
        };
        assert!(integrate(&profile, &non_finite_ic, &IntegratorConfig::default()).is_err());
    }

    #[test]
    fn csv_export_shape() {
        let profile = constant_profile(c(1.0, 0.0), c(0.0, 0.0), 1.0);
        let ic = InitialConditions {
            c0: c(1.0, 0.0),
            c1: c(0.0, 0.0),
        };
        let report = integrate(&profile, &ic, &IntegratorConfig::default()).unwrap();
        let mut buf = Vec::new();
        report.trajectory.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "z,re_phi,im_phi,re_dphi,im_dphi,u,u_prime,u_double_prime"
        );
        assert_eq!(text.lines().count(), report.trajectory.len() + 1);
        let first_row = text.lines().nth(1).unwrap();
        assert_eq!(first_row.split(',').count(), 8);
        for field in first_row.split(',') {
            assert!(field.contains('e'), "scientific notation expected: {field}");
        }
    }
}
