//! Exact secant blow-up solution of the homogeneous lossless defocusing slab.
//!
//! For constant real permittivity `eps_l`, constant real Kerr coefficient
//! `sigma < 0`, and `r := eps_l - sin^2 theta > 0`, the field
//!
//! ```text
//! E(z) = A exp(i phase) sec[(pi/4)(z / z_star + 1)]
//! ```
//!
//! with `A = sqrt(2 r / (-sigma))` and `z_star = pi / (4 k sqrt(r))` solves
//! the slab Helmholtz equation and diverges at `z = z_star`. It provides the
//! ground truth for the adaptive integrator and the blow-up extrapolator.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};

/// Parameters of the closed-form secant solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecSolutionParams {
    /// Real relative linear permittivity.
    pub eps_l: f64,
    /// Incidence angle in radians, in `[0, pi/2)`.
    pub theta: f64,
    /// Real Kerr coefficient, negative (defocusing).
    pub sigma: f64,
    /// Wavenumber, positive.
    pub k: f64,
    /// Free global phase of the solution.
    pub phase: f64,
}

impl SecSolutionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::InvalidParameters("wavenumber k must be positive".into()));
        }
        if !(self.theta >= 0.0 && self.theta < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidParameters(
                "incidence angle must lie in [0, pi/2)".into(),
            ));
        }
        if !(self.sigma < 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParameters(
                "Kerr coefficient sigma must be negative".into(),
            ));
        }
        let r = self.effective_r();
        if r.is_nan() || r <= 0.0 {
            return Err(Error::InvalidParameters(
                "eps_l - sin^2 theta must be positive".into(),
            ));
        }
        Ok(())
    }

    /// The reduced linear coefficient `eps_l - sin^2 theta`.
    pub fn effective_r(&self) -> f64 {
        self.eps_l - self.theta.sin().powi(2)
    }
}

/// Pole location `z_star = pi / (4 k sqrt(r))`.
pub fn z_star(params: &SecSolutionParams) -> Result<f64> {
    params.validate()?;
    Ok(PI / (4.0 * params.k * params.effective_r().sqrt()))
}

/// Peakless amplitude `A = sqrt(2 r / (-sigma))`.
pub fn amplitude(params: &SecSolutionParams) -> Result<f64> {
    params.validate()?;
    Ok((2.0 * params.effective_r() / (-params.sigma)).sqrt())
}

/// Secant angle bookkeeping: for `w = (pi/4)(z/z_star + 1)` the complement
/// `eps = pi/2 - w` stays well conditioned near the pole, with
/// `cos w = sin eps` and `sin w = cos eps`.
struct SecAngle {
    sec: f64,
    tan: f64,
}

fn sec_angle(params: &SecSolutionParams, z: f64) -> Result<SecAngle> {
    let zs = z_star(params)?;
    if z < 0.0 || z.is_nan() {
        return Err(Error::OutOfDomain { z });
    }
    if z >= zs {
        return Err(Error::PoleDomain { z, z_star: zs });
    }
    let eps = FRAC_PI_4 * (1.0 - z / zs);
    let sin_eps = eps.sin();
    Ok(SecAngle {
        sec: 1.0 / sin_eps,
        tan: eps.cos() / sin_eps,
    })
}

/// Field value of the secant solution at `0 <= z < z_star`.
pub fn sec_solution(params: &SecSolutionParams, z: f64) -> Result<Complex64> {
    Ok(sec_solution_with_derivative(params, z)?.0)
}

/// Field value and exact first derivative, for initial-condition generation.
pub fn sec_solution_with_derivative(
    params: &SecSolutionParams,
    z: f64,
) -> Result<(Complex64, Complex64)> {
    let angle = sec_angle(params, z)?;
    let amp = amplitude(params)?;
    let phase = Complex64::from_polar(1.0, params.phase);
    let value = phase * amp * angle.sec;
    // d/dz sec(w(z)) = (pi / (4 z_star)) sec(w) tan(w) = k sqrt(r) sec(w) tan(w)
    let rate = params.k * params.effective_r().sqrt();
    let derivative = value * rate * angle.tan;
    Ok((value, derivative))
}

/// Residual of the slab Helmholtz equation at the exact solution:
/// `E'' + k^2 [r + sigma |E|^2] E`, evaluated from closed forms.
///
/// Vanishes identically in exact arithmetic; the returned value measures
/// floating-point conditioning only.
pub fn residual(params: &SecSolutionParams, z: f64) -> Result<Complex64> {
    let angle = sec_angle(params, z)?;
    let (value, _) = sec_solution_with_derivative(params, z)?;
    let r = params.effective_r();
    let k2 = params.k * params.k;
    // E'' = k^2 r (tan^2 w + sec^2 w) E
    let second = value * k2 * r * (angle.tan * angle.tan + angle.sec * angle.sec);
    let magnitude2 = value.norm_sqr();
    Ok(second + value * k2 * (r + params.sigma * magnitude2))
}
