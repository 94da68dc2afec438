//! Slab parameters, coefficient profiles, and the nondimensional reduction.
//!
//! A slab of thickness `L` is described by two complex coefficient profiles
//! over the physical coordinate `z in [0, L]`: the relative linear
//! permittivity and the Kerr coefficient. [`nondimensionalize`] maps them to
//! the coefficients `r(z)` and `s(z)` of the reduced oscillator on
//! `z in [0, k L]` together with certified upper bounds `a >= Re r` and
//! `b >= Re s`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid resolution used to bound the real part of polynomial profiles.
const SUP_GRID_POINTS: usize = 10_000;

/// One node of a piecewise-linear profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    pub at: f64,
    #[serde(with = "crate::serde_util::complex_pair")]
    pub value: Complex64,
}

/// A complex-valued coefficient function of one real coordinate.
///
/// Outside the stated domain the profile continues with the constant
/// endpoint value, so evaluation succeeds for every coordinate `>= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProfileSpec {
    Constant {
        #[serde(with = "crate::serde_util::complex_pair")]
        value: Complex64,
    },
    /// Coefficients in ascending powers of the coordinate.
    Polynomial {
        #[serde(with = "crate::serde_util::complex_pair_vec")]
        coefficients: Vec<Complex64>,
    },
    PiecewiseLinear { breakpoints: Vec<Breakpoint> },
    SampledGrid {
        abscissae: Vec<f64>,
        #[serde(with = "crate::serde_util::complex_pair_vec")]
        values: Vec<Complex64>,
    },
}

impl ProfileSpec {
    pub fn constant(re: f64, im: f64) -> Self {
        ProfileSpec::Constant {
            value: Complex64::new(re, im),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check_nodes = |xs: &[f64]| -> Result<()> {
            if xs.len() < 2 {
                return Err(Error::InvalidInput(
                    "interpolated profiles need at least 2 nodes".into(),
                ));
            }
            if xs.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput("profile abscissae must be finite".into()));
            }
            if xs.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidInput(
                    "profile abscissae must be strictly increasing".into(),
                ));
            }
            Ok(())
        };
        let check_values = |vs: &[Complex64]| -> Result<()> {
            if vs.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::InvalidInput("profile values must be finite".into()));
            }
            Ok(())
        };
        match self {
            ProfileSpec::Constant { value } => check_values(&[*value]),
            ProfileSpec::Polynomial { coefficients } => {
                if coefficients.is_empty() {
                    return Err(Error::InvalidInput(
                        "polynomial profile needs at least one coefficient".into(),
                    ));
                }
                check_values(coefficients)
            }
            ProfileSpec::PiecewiseLinear { breakpoints } => {
                let xs: Vec<f64> = breakpoints.iter().map(|b| b.at).collect();
                check_nodes(&xs)?;
                check_values(&breakpoints.iter().map(|b| b.value).collect::<Vec<_>>())
            }
            ProfileSpec::SampledGrid { abscissae, values } => {
                check_nodes(abscissae)?;
                if abscissae.len() != values.len() {
                    return Err(Error::InvalidInput(
                        "sampled-grid abscissae and values must have equal length".into(),
                    ));
                }
                check_values(values)
            }
        }
    }

    /// Evaluate at `x >= 0`; negative coordinates are out of domain.
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        if x < 0.0 || x.is_nan() {
            return Err(Error::OutOfDomain { z: x });
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: f64) -> Complex64 {
        match self {
            ProfileSpec::Constant { value } => *value,
            ProfileSpec::Polynomial { coefficients } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in coefficients.iter().rev() {
                    acc = acc * x + c;
                }
                acc
            }
            ProfileSpec::PiecewiseLinear { breakpoints } => {
                interp_linear(x, breakpoints.len(), |i| {
                    (breakpoints[i].at, breakpoints[i].value)
                })
            }
            ProfileSpec::SampledGrid { abscissae, values } => {
                interp_linear(x, abscissae.len(), |i| (abscissae[i], values[i]))
            }
        }
    }

    /// Supremum of the real part over `[0, hi]`, exact for constant and
    /// interpolated kinds, grid-sampled with a safety margin for polynomials.
    fn max_real_on(&self, hi: f64) -> f64 {
        match self {
            ProfileSpec::Constant { value } => value.re,
            ProfileSpec::Polynomial { coefficients } => {
                let mut max = f64::NEG_INFINITY;
                for i in 0..SUP_GRID_POINTS {
                    let x = hi * (i as f64) / ((SUP_GRID_POINTS - 1) as f64);
                    max = max.max(self.eval_unchecked(x).re);
                }
                // Between-sample overshoot of a C^2 function is bounded by
                // M2 dx^2 / 8 with M2 >= |(Re p)''| on [0, hi]; adding it
                // keeps the returned value a true upper bound.
                let dx = hi / ((SUP_GRID_POINTS - 1) as f64);
                let m2: f64 = coefficients
                    .iter()
                    .enumerate()
                    .skip(2)
                    .map(|(j, c)| (j * (j - 1)) as f64 * c.re.abs() * hi.powi(j as i32 - 2))
                    .sum();
                max + 1e-9 * (1.0 + max.abs()) + 0.125 * m2 * dx * dx
            }
            ProfileSpec::PiecewiseLinear { .. } | ProfileSpec::SampledGrid { .. } => {
                // Linear in between nodes, so the sup over [0, hi] is attained
                // at a node inside the window or at a window edge.
                let nodes: Vec<f64> = match self {
                    ProfileSpec::PiecewiseLinear { breakpoints } => {
                        breakpoints.iter().map(|b| b.at).collect()
                    }
                    ProfileSpec::SampledGrid { abscissae, .. } => abscissae.clone(),
                    _ => unreachable!(),
                };
                let mut max = self.eval_unchecked(0.0).re.max(self.eval_unchecked(hi).re);
                for x in nodes {
                    if x > 0.0 && x < hi {
                        max = max.max(self.eval_unchecked(x).re);
                    }
                }
                max
            }
        }
    }

    /// Rescale the coordinate by `x -> x / k` and subtract `shift` from the
    /// value, i.e. build `x -> self(x / k) - shift`.
    fn scaled_shifted(&self, k: f64, shift: f64) -> ProfileSpec {
        let shift = Complex64::new(shift, 0.0);
        match self {
            ProfileSpec::Constant { value } => ProfileSpec::Constant {
                value: value - shift,
            },
            ProfileSpec::Polynomial { coefficients } => {
                let coefficients = coefficients
                    .iter()
                    .enumerate()
                    .map(|(j, c)| {
                        let scaled = c / k.powi(j as i32);
                        if j == 0 {
                            scaled - shift
                        } else {
                            scaled
                        }
                    })
                    .collect();
                ProfileSpec::Polynomial { coefficients }
            }
            ProfileSpec::PiecewiseLinear { breakpoints } => ProfileSpec::PiecewiseLinear {
                breakpoints: breakpoints
                    .iter()
                    .map(|b| Breakpoint {
                        at: b.at * k,
                        value: b.value - shift,
                    })
                    .collect(),
            },
            ProfileSpec::SampledGrid { abscissae, values } => ProfileSpec::SampledGrid {
                abscissae: abscissae.iter().map(|x| x * k).collect(),
                values: values.iter().map(|v| v - shift).collect(),
            },
        }
    }
}

fn interp_linear(x: f64, len: usize, node: impl Fn(usize) -> (f64, Complex64)) -> Complex64 {
    let (x_first, v_first) = node(0);
    if x <= x_first {
        return v_first;
    }
    let (x_last, v_last) = node(len - 1);
    if x >= x_last {
        return v_last;
    }
    let mut lo = 0;
    let mut hi = len - 1;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if node(mid).0 <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (x0, v0) = node(lo);
    let (x1, v1) = node(hi);
    let t = (x - x0) / (x1 - x0);
    v0 + (v1 - v0) * t
}

/// Physical description of the slab before nondimensionalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Wavenumber, 1/length, positive.
    pub k: f64,
    /// Incidence angle in radians, in `[0, pi/2)`.
    pub theta: f64,
    /// Slab thickness, positive.
    pub thickness: f64,
    /// Relative linear permittivity profile over `z in [0, thickness]`.
    pub eps_l: ProfileSpec,
    /// Kerr coefficient profile over `z in [0, thickness]`.
    pub sigma: ProfileSpec,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::InvalidInput("wavenumber k must be positive".into()));
        }
        if !(self.thickness > 0.0 && self.thickness.is_finite()) {
            return Err(Error::InvalidInput("slab thickness must be positive".into()));
        }
        if !(self.theta >= 0.0 && self.theta < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidInput(
                "incidence angle must lie in [0, pi/2)".into(),
            ));
        }
        self.eps_l.validate()?;
        self.sigma.validate()
    }
}

/// Nondimensional coefficient profiles with certified real-part bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlabProfile {
    r: ProfileSpec,
    s: ProfileSpec,
    z_max: f64,
    a: f64,
    b: f64,
}

impl SlabProfile {
    /// Build from nondimensional coefficient profiles directly.
    pub fn new(r: ProfileSpec, s: ProfileSpec, z_max: f64) -> Result<Self> {
        if !(z_max > 0.0 && z_max.is_finite()) {
            return Err(Error::InvalidInput("z_max must be positive".into()));
        }
        r.validate()?;
        s.validate()?;
        let (a, b) = sup_bounds(&r, &s, z_max);
        Ok(SlabProfile { r, s, z_max, a, b })
    }

    pub fn r_spec(&self) -> &ProfileSpec {
        &self.r
    }

    pub fn s_spec(&self) -> &ProfileSpec {
        &self.s
    }

    /// Nondimensional domain length `k L`.
    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    /// Upper bound for `Re r` on `[0, z_max]`.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Upper bound for `Re s` on `[0, z_max]`.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Linear coefficient at `z >= 0` (constant continuation past `z_max`).
    pub fn eval_r(&self, z: f64) -> Result<Complex64> {
        self.r.eval(z)
    }

    /// Kerr coefficient at `z >= 0` (constant continuation past `z_max`).
    pub fn eval_s(&self, z: f64) -> Result<Complex64> {
        self.s.eval(z)
    }
}

/// Real-part suprema of the two coefficient profiles over `[0, z_max]`.
pub fn sup_bounds(r: &ProfileSpec, s: &ProfileSpec, z_max: f64) -> (f64, f64) {
    (r.max_real_on(z_max), s.max_real_on(z_max))
}

/// Map physical slab parameters to the nondimensional oscillator:
/// `z := k z_phys`, `r(z) := eps_l(z / k) - sin^2 theta`, `s(z) := sigma(z / k)`.
pub fn nondimensionalize(params: &PhysicalParams) -> Result<SlabProfile> {
    params.validate()?;
    let sin2 = params.theta.sin().powi(2);
    let r = params.eps_l.scaled_shifted(params.k, sin2);
    let s = params.sigma.scaled_shifted(params.k, 0.0);
    SlabProfile::new(r, s, params.k * params.thickness)
}
