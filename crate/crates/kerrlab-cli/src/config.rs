//! Run configuration: a single JSON file describing the slab, the initial
//! data, integrator overrides, and per-command options. Complex numbers are
//! written as `[re, im]` pairs.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use kerrlab::integrate::{InitialConditions, IntegratorConfig};
use kerrlab::profile::{nondimensionalize, PhysicalParams, ProfileSpec, SlabProfile};
use serde::{Deserialize, Serialize};

/// What the configuration is meant to drive. Optional in the file; when
/// present it must match the invoked subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Simulate,
    Sweep,
    VerifyBound,
    Analytic,
    Check,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::Sweep => "sweep",
            Mode::VerifyBound => "verify-bound",
            Mode::Analytic => "analytic",
            Mode::Check => "check",
        }
    }
}

/// Direct nondimensional description of the oscillator coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NondimensionalBlock {
    pub z_max: f64,
    pub r: ProfileSpec,
    pub s: ProfileSpec,
}

/// Scalar parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisParam {
    K,
    Theta,
    Thickness,
    ReR,
    ImR,
    ReS,
    ImS,
    AbsC0,
    RelativePhase,
}

impl AxisParam {
    pub fn name(self) -> &'static str {
        match self {
            AxisParam::K => "k",
            AxisParam::Theta => "theta",
            AxisParam::Thickness => "thickness",
            AxisParam::ReR => "re_r",
            AxisParam::ImR => "im_r",
            AxisParam::ReS => "re_s",
            AxisParam::ImS => "im_s",
            AxisParam::AbsC0 => "abs_c0",
            AxisParam::RelativePhase => "relative_phase",
        }
    }

    fn needs_physical(self) -> bool {
        matches!(self, AxisParam::K | AxisParam::Theta | AxisParam::Thickness)
    }

    fn needs_nondimensional(self) -> bool {
        matches!(
            self,
            AxisParam::ReR | AxisParam::ImR | AxisParam::ReS | AxisParam::ImS
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// One sweep axis: `count` values from `start` to `stop` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub parameter: AxisParam,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let n = (self.count - 1) as f64;
        match self.spacing {
            Spacing::Linear => (0..self.count)
                .map(|i| self.start + (self.stop - self.start) * (i as f64) / n)
                .collect(),
            Spacing::Log => {
                let ratio = (self.stop / self.start).powf(1.0 / n);
                (0..self.count)
                    .map(|i| self.start * ratio.powi(i as i32))
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub axes: Vec<Axis>,
}

fn default_fraction() -> f64 {
    0.999
}

fn default_count() -> usize {
    100
}

/// Options of the `analytic` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalyticBlock {
    /// Global phase of the closed-form solution.
    pub phase: f64,
    /// Sampling range as a fraction of the pole coordinate.
    pub fraction: f64,
    /// Number of samples.
    pub count: usize,
}

impl Default for AnalyticBlock {
    fn default() -> Self {
        AnalyticBlock {
            phase: 0.0,
            fraction: default_fraction(),
            count: default_count(),
        }
    }
}

fn default_true() -> bool {
    true
}

/// Options of the `verify-bound` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyBlock {
    /// Also integrate and include the blow-up estimate in the ordering check.
    #[serde(default = "default_true")]
    pub simulate: bool,
}

impl Default for VerifyBlock {
    fn default() -> Self {
        VerifyBlock { simulate: true }
    }
}

/// Output destinations; command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub report: Option<PathBuf>,
    pub trajectory: Option<PathBuf>,
    pub table: Option<PathBuf>,
}

/// The whole run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[derive(Default)]
pub struct RunConfig {
    pub mode: Option<Mode>,
    pub physical: Option<PhysicalParams>,
    pub nondimensional: Option<NondimensionalBlock>,
    pub initial_conditions: Option<InitialConditions>,
    pub integrator: IntegratorConfig,
    pub sweep: Option<SweepBlock>,
    pub analytic: Option<AnalyticBlock>,
    pub verify: Option<VerifyBlock>,
    pub output: OutputBlock,
}


pub const MAX_SWEEP_POINTS: usize = 1_000_000;

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let config: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("cannot parse config {}", path.display()))?;
        Ok(config)
    }

    /// Structural validation shared by every command.
    pub fn validate(&self, invoked: Mode) -> Result<()> {
        if let Some(mode) = self.mode {
            if mode != invoked {
                bail!(
                    "config declares mode '{}' but the '{}' command was invoked",
                    mode.name(),
                    invoked.name()
                );
            }
        }
        match (&self.physical, &self.nondimensional) {
            (Some(_), Some(_)) => {
                bail!("config must contain exactly one of 'physical' and 'nondimensional', found both")
            }
            (None, None) => {
                bail!("config must contain exactly one of 'physical' and 'nondimensional', found neither")
            }
            _ => {}
        }
        if let Some(physical) = &self.physical {
            physical.validate().map_err(anyhow::Error::from)?;
        }
        self.integrator.validate().map_err(anyhow::Error::from)?;

        match invoked {
            Mode::Simulate | Mode::VerifyBound | Mode::Check => {
                if self.initial_conditions.is_none() {
                    bail!("'{}' needs an 'initial_conditions' block", invoked.name());
                }
            }
            Mode::Sweep => {
                if self.initial_conditions.is_none() {
                    bail!("'sweep' needs an 'initial_conditions' block");
                }
                self.validate_sweep()?;
            }
            Mode::Analytic => {
                if self.physical.is_none() {
                    bail!("'analytic' needs a 'physical' block with constant real profiles");
                }
                let block = self.analytic.clone().unwrap_or_default();
                if !(block.fraction > 0.0 && block.fraction < 1.0) {
                    bail!("analytic.fraction must lie in (0, 1)");
                }
                if block.count < 2 {
                    bail!("analytic.count must be at least 2");
                }
            }
        }
        Ok(())
    }

    fn validate_sweep(&self) -> Result<()> {
        let Some(sweep) = &self.sweep else {
            bail!("'sweep' needs a 'sweep' block with axes");
        };
        if sweep.axes.is_empty() || sweep.axes.len() > 2 {
            bail!("sweep supports 1 or 2 axes, found {}", sweep.axes.len());
        }
        let mut total = 1usize;
        for axis in &sweep.axes {
            if axis.count == 0 {
                bail!("sweep axis '{}' has zero points", axis.parameter.name());
            }
            if !(axis.start.is_finite() && axis.stop.is_finite()) {
                bail!("sweep axis '{}' has non-finite endpoints", axis.parameter.name());
            }
            if axis.spacing == Spacing::Log && (axis.start <= 0.0 || axis.stop <= 0.0) {
                bail!(
                    "log spacing on axis '{}' needs positive endpoints",
                    axis.parameter.name()
                );
            }
            if axis.parameter == AxisParam::AbsC0 && (axis.start < 0.0 || axis.stop < 0.0) {
                bail!("abs_c0 axis values must be nonnegative");
            }
            if axis.parameter.needs_physical() && self.physical.is_none() {
                bail!(
                    "axis '{}' requires a physical block",
                    axis.parameter.name()
                );
            }
            if axis.parameter.needs_nondimensional() {
                let Some(block) = &self.nondimensional else {
                    bail!(
                        "axis '{}' requires a nondimensional block",
                        axis.parameter.name()
                    );
                };
                let target = match axis.parameter {
                    AxisParam::ReR | AxisParam::ImR => &block.r,
                    _ => &block.s,
                };
                if !matches!(target, ProfileSpec::Constant { .. }) {
                    bail!(
                        "axis '{}' requires the swept profile to be constant",
                        axis.parameter.name()
                    );
                }
            }
            total = total
                .checked_mul(axis.count)
                .filter(|t| *t <= MAX_SWEEP_POINTS)
                .with_context(|| format!("sweep grid exceeds {MAX_SWEEP_POINTS} points"))?;
        }
        Ok(())
    }

    /// Build the nondimensional profile this config describes.
    pub fn build_profile(&self) -> Result<SlabProfile> {
        if let Some(physical) = &self.physical {
            return nondimensionalize(physical).map_err(anyhow::Error::from);
        }
        let block = self
            .nondimensional
            .as_ref()
            .expect("validated: one block present");
        SlabProfile::new(block.r.clone(), block.s.clone(), block.z_max).map_err(anyhow::Error::from)
    }

    pub fn initial_conditions(&self) -> Result<InitialConditions> {
        self.initial_conditions
            .context("config is missing the 'initial_conditions' block")
    }
}
