//! Comparison-function machinery for the blow-up bound.
//!
//! For a run with `Re r <= a`, `Re s <= b < 0` and initial data `c0, c1`,
//! the half-intensity `u = |phi|^2 / 2` satisfies `u'' >= h(u)` with the
//! comparison function `h(s) = -2 (a + 2 b s) s`. Integrating the resulting
//! differential inequality yields, for every coordinate `z` in the domain of
//! the solution,
//!
//! ```text
//! z <= int_alpha^{u(z)} ds / sqrt(beta^2 + 2 int_alpha^s h)     (comparison time)
//! gamma = int_alpha^inf ds / sqrt(beta^2 + 2 int_alpha^s h)     (finite!)
//! ```
//!
//! with `alpha = u(0)` and `beta = u'(0)`, so the solution cannot extend past
//! `z = gamma`. Dropping all but the cubic term of the radicand gives the
//! closed form `Gamma(1/3) Gamma(7/6) / sqrt(pi) * (3 / (beta |b|))^(1/3)`,
//! which is bounded by `2.023 / (beta |b|)^(1/3)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::InitialConditions;
use crate::profile::SlabProfile;
use crate::quadrature::adaptive_quadrature;
use crate::special::gamma;

/// Default relative tolerance for the bound quadratures.
pub const DEFAULT_QUAD_REL_TOL: f64 = 1e-8;

/// The literal constant of the slab-length bound.
const L_STAR_CONSTANT: f64 = 2.023;

/// Per-condition outcome of the blow-up hypothesis check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    /// `b < 0`: the Kerr real part is bounded above by a negative number.
    pub kerr_bound_negative: bool,
    /// `c0 != 0` and `c1 != 0`.
    pub initial_data_nonzero: bool,
    /// `cos(arg c1 - arg c0) > 0`.
    pub phase_alignment_positive: bool,
    /// `|c0| > sqrt(2 a / |b|)` when `a > 0`; vacuous when `a <= 0`.
    pub amplitude_sufficient: bool,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.kerr_bound_negative
            && self.initial_data_nonzero
            && self.phase_alignment_positive
            && self.amplitude_sufficient
    }
}

/// Check the blow-up hypotheses for a profile / initial-data pair.
///
/// This is a report, not a gate: integration proceeds either way, only the
/// bound attachments depend on the outcome.
pub fn check_hypotheses(profile: &SlabProfile, ic: &InitialConditions) -> HypothesisReport {
    let a = profile.a();
    let b = profile.b();
    let c0 = ic.c0;
    let c1 = ic.c1;

    let kerr_bound_negative = b < 0.0;
    let initial_data_nonzero = c0.norm_sqr() > 0.0 && c1.norm_sqr() > 0.0;
    // |c0||c1| cos(theta1 - theta0) = Re(conj(c0) c1)
    let phase_alignment_positive = initial_data_nonzero && (c0.conj() * c1).re > 0.0;
    let amplitude_sufficient = if a <= 0.0 {
        true
    } else if b < 0.0 {
        c0.norm_sqr() > 2.0 * a / b.abs()
    } else {
        false
    };

    HypothesisReport {
        kerr_bound_negative,
        initial_data_nonzero,
        phase_alignment_positive,
        amplitude_sufficient,
    }
}

/// Initial-data invariants of the comparison argument:
/// `alpha = |c0|^2 / 2` and `beta = |c0 c1| cos(theta1 - theta0)`.
pub fn alpha_beta(ic: &InitialConditions) -> Result<(f64, f64)> {
    if ic.c0.norm_sqr() == 0.0 || ic.c1.norm_sqr() == 0.0 {
        return Err(Error::DegenerateInitialData);
    }
    let alpha = 0.5 * ic.c0.norm_sqr();
    let beta = (ic.c0.conj() * ic.c1).re;
    Ok((alpha, beta))
}

/// Comparison function `h(s) = -2 (a + 2 b s) s`.
pub fn h_eval(s_val: f64, a: f64, b: f64) -> f64 {
    -2.0 * (a + 2.0 * b * s_val) * s_val
}

/// Closed-form antiderivative `int_alpha^{s_val} h`, equal to
/// `-a (s^2 - alpha^2) - (4 b / 3)(s^3 - alpha^3)`.
pub fn h_antiderivative(s_val: f64, alpha: f64, a: f64, b: f64) -> Result<f64> {
    if s_val < alpha {
        return Err(Error::DomainError(format!(
            "antiderivative evaluated below its base point: {s_val} < {alpha}"
        )));
    }
    Ok(-a * (s_val * s_val - alpha * alpha) - (4.0 * b / 3.0) * (s_val.powi(3) - alpha.powi(3)))
}

/// Validated inputs of the comparison integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlasseyData {
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
}

impl GlasseyData {
    pub fn new(alpha: f64, beta: f64, a: f64, b: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InapplicableBound("alpha must be positive".into()));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InapplicableBound("beta must be positive".into()));
        }
        if !(b < 0.0 && b.is_finite()) {
            return Err(Error::InapplicableBound("b must be negative".into()));
        }
        if a.is_nan() || alpha * b.abs() <= a {
            return Err(Error::InapplicableBound(
                "alpha |b| must exceed a (amplitude condition)".into(),
            ));
        }
        Ok(GlasseyData { alpha, beta, a, b })
    }

    /// Assemble from a profile's certified bounds and initial data.
    pub fn from_run(profile: &SlabProfile, ic: &InitialConditions) -> Result<Self> {
        let (alpha, beta) = alpha_beta(ic)?;
        GlasseyData::new(alpha, beta, profile.a(), profile.b())
    }

    /// Radicand of the comparison integrand at `s >= alpha`.
    fn radicand(&self, s: f64) -> f64 {
        let h_int = -self.a * (s * s - self.alpha * self.alpha)
            - (4.0 * self.b / 3.0) * (s.powi(3) - self.alpha.powi(3));
        self.beta * self.beta + 2.0 * h_int
    }

    /// Cubic coefficients of the radicand in the shifted variable
    /// `t = s - alpha`: `c3 t^3 + c2 t^2 + c1 t + c0`. All are nonnegative
    /// under the data invariants.
    fn shifted_coefficients(&self) -> [f64; 4] {
        let babs = self.b.abs();
        [
            self.beta * self.beta,
            8.0 * self.alpha * self.alpha * babs - 4.0 * self.a * self.alpha,
            8.0 * self.alpha * babs - 2.0 * self.a,
            8.0 * babs / 3.0,
        ]
    }
}

/// The comparison-time integral `int_alpha^{u_val} ds / sqrt(beta^2 + 2 H(s))`.
///
/// Every coordinate reached by a hypothesis-passing run is bounded by its
/// own comparison time.
pub fn comparison_time(u_val: f64, data: &GlasseyData) -> Result<f64> {
    if u_val < data.alpha {
        return Err(Error::DomainError(format!(
            "comparison time needs u >= alpha, got {u_val} < {}",
            data.alpha
        )));
    }
    if u_val == data.alpha {
        return Ok(0.0);
    }
    let f = |s: f64| 1.0 / data.radicand(s).sqrt();
    let result = adaptive_quadrature(&f, data.alpha, u_val, DEFAULT_QUAD_REL_TOL, 0.0);
    Ok(result.value)
}

/// Result of the improper-integral bound computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    /// The defining integral, evaluated numerically.
    pub gamma_quadrature: f64,
    /// Closed form of the cubic-only radicand via the Gamma function.
    pub gamma_closed_q: f64,
    /// The `2.023 / (beta |b|)^(1/3)` form.
    pub l_star_nondim: f64,
    /// Absolute error estimate for `gamma_quadrature`.
    pub quadrature_error_estimate: f64,
}

/// Evaluate the improper comparison integral at the default tolerance.
pub fn gamma_quadrature(data: &GlasseyData) -> Result<BoundResult> {
    gamma_quadrature_with_tol(data, DEFAULT_QUAD_REL_TOL)
}

/// Evaluate the improper comparison integral
/// `gamma = int_alpha^inf ds / sqrt(beta^2 + 2 H(s))`.
///
/// The range is split at a point `T` where the cubic term dominates the
/// radicand (radicand >= 100 beta^2 and the lower-order terms are small);
/// the finite part is handled by adaptive quadrature and the tail by the
/// leading asymptotic term with a first-order correction and an explicit
/// remainder bound.
pub fn gamma_quadrature_with_tol(data: &GlasseyData, rel_tol: f64) -> Result<BoundResult> {
    if !(rel_tol > 0.0 && rel_tol.is_finite()) {
        return Err(Error::InvalidInput("quadrature tolerance must be positive".into()));
    }
    let [c0, c1, c2, c3] = data.shifted_coefficients();
    debug_assert!(c3 > 0.0);

    // Dominance threshold: radicand >= 100 beta^2 at the split point.
    let mut t_split = (100.0 * c0 / c3).cbrt().max(1.0);
    // Relative size of the sub-cubic terms at t: the tail remainder scales
    // with its square, so push the split out until that square is negligible
    // against the requested tolerance.
    let sub_cubic_ratio = |t: f64| (c2 * t * t + c1 * t + c0) / (c3 * t * t * t);
    while 0.075 * sub_cubic_ratio(t_split).powi(2) > 0.1 * rel_tol {
        t_split *= 2.0;
    }

    let f = |s: f64| 1.0 / data.radicand(s).sqrt();
    let finite = adaptive_quadrature(&f, data.alpha, data.alpha + t_split, 0.5 * rel_tol, 0.0);

    // Tail beyond t_split in the shifted variable, with
    // radicand = c3 t^3 (1 + g(t)) and g as above:
    //   int (c3 t^3)^(-1/2) (1 + g)^(-1/2)
    // where 1 - g/2 <= (1 + g)^(-1/2) <= 1 - g/2 + (3/8) g^2.
    let t = t_split;
    let leading = 2.0 / (c3 * t).sqrt();
    let correction = 0.5
        * c3.powf(-1.5)
        * ((2.0 * c2 / 3.0) * t.powf(-1.5)
            + (2.0 * c1 / 5.0) * t.powf(-2.5)
            + (2.0 * c0 / 7.0) * t.powf(-3.5));
    // g(t) <= g(T) T / t for t >= T bounds the quadratic remainder term.
    let remainder_bound = 0.075 * sub_cubic_ratio(t).powi(2) * leading;
    let tail_lower = leading - correction;
    let tail = tail_lower + 0.5 * remainder_bound;
    let tail_error = 0.5 * remainder_bound;

    let value = finite.value + tail;
    let error = finite.error_estimate + tail_error;

    Ok(BoundResult {
        gamma_quadrature: value,
        gamma_closed_q: gamma_closed_q(data.beta, data.b)?,
        l_star_nondim: l_star_nondim(data.beta, data.b),
        quadrature_error_estimate: error,
    })
}

/// Closed form of the cubic-only comparison integral:
/// `Gamma(1/3) Gamma(7/6) / sqrt(pi) * (3 / (beta |b|))^(1/3)`.
pub fn gamma_closed_q(beta: f64, b: f64) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameters("beta must be positive".into()));
    }
    if !(b < 0.0 && b.is_finite()) {
        return Err(Error::InvalidParameters("b must be negative".into()));
    }
    let prefactor = gamma(1.0 / 3.0) * gamma(7.0 / 6.0) / std::f64::consts::PI.sqrt();
    Ok(prefactor * (3.0 / (beta * b.abs())).cbrt())
}

/// Nondimensional form of the slab-length bound, `2.023 / (beta |b|)^(1/3)`.
pub fn l_star_nondim(beta: f64, b: f64) -> f64 {
    L_STAR_CONSTANT / (beta * b.abs()).cbrt()
}

/// Minimal physical slab thickness guaranteeing an interior blow-up point:
/// `L_star = 2.023 / [k^2 |b E(0) E'(0)| cos(theta1 - theta0)]^(1/3)`.
pub fn l_star_physical(k: f64, b: f64, e0: Complex64, de0: Complex64) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameters("wavenumber k must be positive".into()));
    }
    if !(b < 0.0 && b.is_finite()) {
        return Err(Error::InvalidParameters("b must be negative".into()));
    }
    if e0.norm_sqr() == 0.0 || de0.norm_sqr() == 0.0 {
        return Err(Error::InapplicableBound(
            "boundary field and derivative must be nonzero".into(),
        ));
    }
    // |E(0) E'(0)| cos(theta1 - theta0) = Re(conj(E(0)) E'(0))
    let aligned = (e0.conj() * de0).re;
    if aligned <= 0.0 {
        return Err(Error::InapplicableBound(
            "phase condition cos(theta1 - theta0) > 0 violated".into(),
        ));
    }
    Ok(L_STAR_CONSTANT / (k * k * b.abs() * aligned).cbrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::ProfileSpec;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ic(c0: Complex64, c1: Complex64) -> InitialConditions {
        InitialConditions { c0, c1 }
    }

    fn constant_profile(r: Complex64, s: Complex64, z_max: f64) -> SlabProfile {
        SlabProfile::new(
            ProfileSpec::Constant { value: r },
            ProfileSpec::Constant { value: s },
            z_max,
        )
        .unwrap()
    }

    // Frozen 40-digit reference values.
    const GAMMA_CLOSED_UNIT: f64 = 2.022_296_538_898_374;
    const GAMMA_QUAD_DEGENERATE: f64 = 2.022_296_528_898_374;
    const GAMMA_QUAD_BENCHMARK: f64 = 0.919_833_173_253_200_4;
    const L_STAR_BENCHMARK: f64 = 1.274_410_141_968_664_2;

    #[test]
    fn hypotheses_pass_on_benchmark_data() {
        let profile = constant_profile(c(1.0, 0.0), c(-1.0, 0.0), 2.0);
        let report = check_hypotheses(&profile, &ic(c(2.0, 0.0), c(2.0, 0.0)));
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn orthogonal_phases_fail_alignment() {
        let profile = constant_profile(c(1.0, 0.0), c(-1.0, 0.0), 2.0);
        let report = check_hypotheses(&profile, &ic(c(1.0, 0.0), c(0.0, 1.0)));
        assert!(!report.phase_alignment_positive);
        assert!(!report.all_pass());
        assert!(report.kerr_bound_negative && report.initial_data_nonzero);
    }

    #[test]
    fn nonnegative_kerr_bound_fails() {
        let profile = constant_profile(c(1.0, 0.0), c(0.0, 0.5), 2.0);
        let report = check_hypotheses(&profile, &ic(c(2.0, 0.0), c(2.0, 0.0)));
        assert!(!report.kerr_bound_negative);
        assert!(!report.all_pass());
    }

    #[test]
    fn amplitude_condition_vacuous_for_nonpositive_a() {
        let profile = constant_profile(c(-0.5, 0.0), c(-1.0, 0.0), 2.0);
        let report = check_hypotheses(&profile, &ic(c(1e-6, 0.0), c(1e-6, 0.0)));
        assert!(report.amplitude_sufficient);
        assert!(report.all_pass());
    }

    #[test]
    fn alpha_beta_examples() {
        let (alpha, beta) = alpha_beta(&ic(c(2.0, 0.0), c(2.0, 0.0))).unwrap();
        assert_eq!((alpha, beta), (2.0, 4.0));

        let phase = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
        let (alpha, beta) =
            alpha_beta(&ic(phase * 2.0f64.sqrt(), phase)).unwrap();
        assert!((alpha - 1.0).abs() < 1e-15);
        assert!((beta - 2.0f64.sqrt()).abs() < 1e-15);

        let (_, beta) = alpha_beta(&ic(
            c(1.0, 0.0),
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::FRAC_PI_3),
        ))
        .unwrap();
        assert!((beta + 0.5).abs() < 1e-15, "negative beta is reported, not hidden");

        assert!(matches!(
            alpha_beta(&ic(c(0.0, 0.0), c(1.0, 0.0))),
            Err(Error::DegenerateInitialData)
        ));
    }

    #[test]
    fn comparison_function_values() {
        assert_eq!(h_eval(0.0, 3.0, -2.0), 0.0);
        assert_eq!(h_eval(1.0, 0.0, -1.0), 4.0);
        assert_eq!(h_eval(1.0, 1.0, -1.0), 2.0);
    }

    #[test]
    fn antiderivative_closed_form() {
        assert_eq!(h_antiderivative(1.5, 1.5, 2.0, -1.0).unwrap(), 0.0);
        assert!((h_antiderivative(1.0, 0.0, 0.0, -1.0).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!((h_antiderivative(2.0, 1.0, 1.0, -1.0).unwrap() - 19.0 / 3.0).abs() < 1e-14);
        assert!(h_antiderivative(0.5, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn antiderivative_matches_quadrature_of_h() {
        let (alpha, a, b) = (0.7, 0.4, -1.3);
        for s_val in [0.7, 1.0, 2.5, 10.0] {
            let closed = h_antiderivative(s_val, alpha, a, b).unwrap();
            let quad = adaptive_quadrature(&|s| h_eval(s, a, b), alpha, s_val, 1e-12, 0.0);
            assert!(
                (closed - quad.value).abs() <= 1e-10 * closed.abs().max(1.0),
                "s = {s_val}"
            );
        }
    }

    #[test]
    fn data_invariants_enforced() {
        assert!(GlasseyData::new(2.0, 4.0, 1.0, -1.0).is_ok());
        assert!(GlasseyData::new(0.0, 4.0, 1.0, -1.0).is_err());
        assert!(GlasseyData::new(2.0, -1.0, 1.0, -1.0).is_err());
        assert!(GlasseyData::new(2.0, 4.0, 1.0, 0.0).is_err());
        // alpha |b| = 0.4 < a = 1: amplitude condition violated
        assert!(GlasseyData::new(0.4, 4.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn shifted_expansion_matches_radicand() {
        let mut rng = StdRng::seed_from_u64(0x9a5);
        for _ in 0..50 {
            let alpha = rng.gen_range(0.05..5.0);
            let b: f64 = -rng.gen_range(0.05..3.0);
            let a = rng.gen_range(-2.0..alpha * b.abs() * 0.95);
            let beta = rng.gen_range(0.05..5.0);
            let data = GlasseyData::new(alpha, beta, a, b).unwrap();
            let [c0, c1, c2, c3] = data.shifted_coefficients();
            assert!(c0 >= 0.0 && c1 >= 0.0 && c2 >= 0.0 && c3 > 0.0, "{data:?}");
            for _ in 0..20 {
                let t = rng.gen_range(0.0..50.0);
                let direct = data.radicand(alpha + t);
                let expanded = ((c3 * t + c2) * t + c1) * t + c0;
                assert!(
                    (direct - expanded).abs() <= 1e-12 * direct.abs().max(1.0),
                    "t = {t}, {data:?}"
                );
                assert!(direct >= beta * beta * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn displayed_quadratic_lower_bounds_radicand_for_nonnegative_a() {
        // Documented cross-check: the alternative expansion with coefficients
        // 4 (2 alpha |b| - a) and 8 alpha (alpha |b| - a) never exceeds the
        // radicand when a >= 0, so bounding through it stays valid.
        let mut rng = StdRng::seed_from_u64(0x9a6);
        for _ in 0..200 {
            let alpha = rng.gen_range(0.05..5.0);
            let b: f64 = -rng.gen_range(0.05..3.0);
            let upper_a = alpha * b.abs() * 0.95;
            if upper_a <= 0.0 {
                continue;
            }
            let a = rng.gen_range(0.0..upper_a);
            let beta = rng.gen_range(0.05..5.0);
            let data = GlasseyData::new(alpha, beta, a, b).unwrap();
            let babs = b.abs();
            let t: f64 = rng.gen_range(0.0..50.0);
            let displayed = (8.0 / 3.0) * babs * t.powi(3)
                + 4.0 * (2.0 * alpha * babs - a) * t * t
                + 8.0 * alpha * (alpha * babs - a) * t
                + beta * beta;
            assert!(
                displayed <= data.radicand(alpha + t) * (1.0 + 1e-12),
                "t = {t}, {data:?}"
            );
        }
    }

    #[test]
    fn comparison_time_at_base_point_is_zero() {
        let data = GlasseyData::new(2.0, 4.0, 1.0, -1.0).unwrap();
        assert_eq!(comparison_time(2.0, &data).unwrap(), 0.0);
        assert!(comparison_time(1.0, &data).is_err());
    }

    #[test]
    fn comparison_time_increases_and_converges_to_gamma() {
        let data = GlasseyData::new(2.0, 4.0, 1.0, -1.0).unwrap();
        let mut prev = 0.0;
        for u in [2.5, 4.0, 10.0, 100.0, 1e4, 1e8] {
            let t = comparison_time(u, &data).unwrap();
            assert!(t > prev, "u = {u}");
            prev = t;
        }
        let gamma_bound = gamma_quadrature(&data).unwrap().gamma_quadrature;
        let nearly_all = comparison_time(2e12, &data).unwrap();
        assert!(nearly_all < gamma_bound);
        assert!(gamma_bound - nearly_all < 1e-5);
    }

    #[test]
    fn gamma_quadrature_degenerate_case() {
        let data = GlasseyData::new(1e-8, 1.0, 0.0, -1.0).unwrap();
        let result = gamma_quadrature(&data).unwrap();
        assert!(
            (result.gamma_quadrature - GAMMA_QUAD_DEGENERATE).abs() < 1e-6,
            "got {}",
            result.gamma_quadrature
        );
        // Nearly coincides with the cubic-only closed form.
        assert!(
            ((result.gamma_quadrature - result.gamma_closed_q) / result.gamma_closed_q).abs()
                < 1e-3
        );
    }

    #[test]
    fn gamma_quadrature_benchmark_regression() {
        let data = GlasseyData::new(2.0, 4.0, 1.0, -1.0).unwrap();
        let result = gamma_quadrature(&data).unwrap();
        assert!(
            (result.gamma_quadrature - GAMMA_QUAD_BENCHMARK).abs()
                <= 1e-6 * GAMMA_QUAD_BENCHMARK,
            "got {}",
            result.gamma_quadrature
        );
        assert!(std::f64::consts::FRAC_PI_4 <= result.gamma_quadrature);
        assert!(result.gamma_quadrature <= 1.2744);
        assert!(result.gamma_quadrature <= result.gamma_closed_q * (1.0 + 1e-9));
        assert!(result.gamma_closed_q <= result.l_star_nondim);
    }

    #[test]
    fn gamma_decreases_with_stronger_defocusing() {
        let mut prev = f64::INFINITY;
        for babs in [0.5, 1.0, 2.0, 8.0] {
            let data = GlasseyData::new(2.0, 4.0, 0.5, -babs).unwrap();
            let g = gamma_quadrature(&data).unwrap().gamma_quadrature;
            assert!(g < prev, "|b| = {babs}");
            prev = g;
        }
    }

    #[test]
    fn gamma_closed_q_reference_and_scaling() {
        let unit = gamma_closed_q(1.0, -1.0).unwrap();
        assert!((unit - GAMMA_CLOSED_UNIT).abs() < 1e-10);
        assert!(unit < 2.023);

        let eight = gamma_closed_q(8.0, -1.0).unwrap();
        assert!((eight - 0.5 * unit).abs() < 1e-12);

        assert!(gamma_closed_q(0.0, -1.0).is_err());
        assert!(gamma_closed_q(1.0, 0.5).is_err());
    }

    #[test]
    fn closed_q_always_below_literal_constant_form() {
        let mut rng = StdRng::seed_from_u64(0x715);
        for _ in 0..500 {
            let beta = rng.gen_range(1e-3..1e3);
            let b = -rng.gen_range(1e-3..1e3);
            let closed = gamma_closed_q(beta, b).unwrap();
            assert!(closed < l_star_nondim(beta, b), "beta = {beta}, b = {b}");
        }
    }

    #[test]
    fn l_star_physical_benchmark() {
        let value = l_star_physical(1.0, -1.0, c(2.0, 0.0), c(2.0, 0.0)).unwrap();
        assert!((value - L_STAR_BENCHMARK).abs() < 1e-12, "got {value}");

        // k scaling: k^(-2/3)
        let doubled = l_star_physical(2.0, -1.0, c(2.0, 0.0), c(2.0, 0.0)).unwrap();
        assert!((doubled / value - 2.0f64.powf(-2.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn l_star_physical_rejects_bad_phases() {
        assert!(matches!(
            l_star_physical(1.0, -1.0, c(1.0, 0.0), c(0.0, 1.0)),
            Err(Error::InapplicableBound(_))
        ));
        assert!(matches!(
            l_star_physical(1.0, -1.0, c(1.0, 0.0), c(-1.0, 0.1)),
            Err(Error::InapplicableBound(_))
        ));
        assert!(l_star_physical(1.0, -1.0, c(0.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(l_star_physical(1.0, 0.0, c(1.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn quadrature_error_estimate_tracks_tolerance() {
        let data = GlasseyData::new(2.0, 4.0, 1.0, -1.0).unwrap();
        let coarse = gamma_quadrature_with_tol(&data, 1e-6).unwrap();
        let fine = gamma_quadrature_with_tol(&data, 5e-7).unwrap();
        let change = (coarse.gamma_quadrature - fine.gamma_quadrature).abs();
        assert!(
            change <= 10.0 * coarse.quadrature_error_estimate.max(f64::EPSILON),
            "change {change}, estimate {}",
            coarse.quadrature_error_estimate
        );
    }
}
