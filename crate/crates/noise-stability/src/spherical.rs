//! Angular noise stability on the circle, conditioned on the radii.
//!
//! Two points of a correlated Gaussian plane with fixed radii r and s have
//! an angle difference distributed with density proportional to
//! `e^{a cos t}`, `a = rho r s/(1-rho^2)`.  This module exposes that kernel,
//! its eigenvalue sequence `lambda_d = I_d(a)/I_0(a)` with certified
//! envelope bounds, and the mean-subtracted stability `F(theta)` of an arc
//! of length theta together with its derivative and the three-arc deficit.

use crate::quadrature::adaptive_quad;
use crate::special::{bessel_i_scaled, bessel_ratio_chain, erfcx};
use crate::{require_correlation_open, require_radius, Error, Result};
use std::f64::consts::PI;

/// Default truncation depth of the arc-stability eigenseries.  The series
/// coefficients decay like lambda_d/d^2 with lambda_d <= 1, so thirty terms
/// already put the truncation below 1e-3/depth^1 of the leading envelope;
/// callers needing certified tails use [`lambda_bounds`].
pub const DEFAULT_SERIES_DEPTH: usize = 30;

/// Kernel scale a = rho r s / (1 - rho^2); carries the sign of rho.
pub(crate) fn kernel_scale(rho: f64, r: f64, s: f64) -> Result<f64> {
    require_correlation_open(rho, "(-1, 1)")?;
    require_radius(r)?;
    require_radius(s)?;
    Ok(rho * r * s / (1.0 - rho * rho))
}

/// Conditional angular kernel g(t) = e^{a t}/I_0(a) at cosine value
/// t = cos(angle difference), for two radius-r and radius-s points of a
/// rho-correlated plane.  `dim` must be 2: the closed Bessel form is
/// specific to the circle.
///
/// Averaging g(cos) over a uniform angle gives exactly 1.
pub fn kernel_g(dim: usize, rho: f64, r: f64, s: f64, t: f64) -> Result<f64> {
    if dim != 2 {
        return Err(Error::UnsupportedDimension { dim });
    }
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::AngleOutOfRange { theta: t });
    }
    let a = kernel_scale(rho, r, s)?;
    // e^{a t}/I_0(a) = e^{a t - |a|} / (e^{-|a|} I_0(|a|)): overflow-free
    Ok((a * t - a.abs()).exp() / bessel_i_scaled(0.0, a.abs())?)
}

/// d-th eigenvalue of the angular kernel on the circle:
/// lambda_d = I_d(a)/I_0(a), a = rho r s/(1-rho^2), with lambda_0 = 1.
/// For rho < 0 the value carries the sign (-1)^d.
pub fn lambda(d: usize, rho: f64, r: f64, s: f64) -> Result<f64> {
    Ok(lambda_sequence(d, rho, r, s)?[d])
}

/// Eigenvalues lambda_0..lambda_max_degree in one backward Bessel sweep.
pub fn lambda_sequence(max_degree: usize, rho: f64, r: f64, s: f64) -> Result<Vec<f64>> {
    let a = kernel_scale(rho, r, s)?;
    lambda_scale_sequence(max_degree, a)
}

/// Same sequence parameterised by the raw kernel scale `a` (sign-carrying).
pub(crate) fn lambda_scale_sequence(max_degree: usize, a: f64) -> Result<Vec<f64>> {
    let chain = bessel_ratio_chain(max_degree, a.abs())?;
    let mut out = Vec::with_capacity(max_degree + 1);
    out.push(1.0);
    let mut mag = 1.0_f64;
    for (j, q) in chain.iter().enumerate() {
        mag *= q;
        // odd degrees flip sign when the correlation is negative
        out.push(if a < 0.0 && j % 2 == 0 { -mag } else { mag });
    }
    Ok(out)
}

/// Two-sided envelope for a kernel eigenvalue, from the Amos ratio bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaBounds {
    pub lower: f64,
    pub upper: f64,
}

fn envelope_products(d: usize, a: f64) -> LambdaBounds {
    // Each ratio I_{j+1}/I_j is pinched between
    //   a/(j+1+sqrt((j+1)^2+a^2))     and  a/(j+sqrt(j^2+a^2))        (integer form)
    //   a/(j+1/2+sqrt((j+3/2)^2+a^2)) and  a/(j+1/2+sqrt((j+1/2)^2+a^2)) (half-integer form)
    // and the tighter product of the two families is kept on each side.
    let mut lo_a = 1.0_f64;
    let mut lo_b = 1.0_f64;
    let mut hi_a = 1.0_f64;
    let mut hi_b = 1.0_f64;
    for j in 0..d {
        let jf = j as f64;
        lo_a *= a / (jf + 1.0 + ((jf + 1.0) * (jf + 1.0) + a * a).sqrt());
        hi_a *= a / (jf + (jf * jf + a * a).sqrt());
        lo_b *= a / (jf + 0.5 + ((jf + 1.5) * (jf + 1.5) + a * a).sqrt());
        hi_b *= a / (jf + 0.5 + ((jf + 0.5) * (jf + 0.5) + a * a).sqrt());
    }
    LambdaBounds {
        lower: lo_a.max(lo_b),
        upper: hi_a.min(hi_b),
    }
}

/// Certified bounds on lambda_d, positive-correlation regime only.
pub fn lambda_bounds(d: usize, rho: f64, r: f64, s: f64) -> Result<LambdaBounds> {
    let a = kernel_scale(rho, r, s)?;
    if a <= 0.0 {
        return Err(Error::PositiveCorrelationRequired { rho });
    }
    Ok(envelope_products(d, a))
}

/// Upper envelope of lambda_d at raw kernel scale `a >= 0` (used for
/// truncation-tail budgets).
pub(crate) fn lambda_upper_envelope(d: usize, a: f64) -> f64 {
    if a <= 0.0 {
        return if d == 0 { 1.0 } else { 0.0 };
    }
    envelope_products(d, a).upper
}

fn check_angle(theta: f64) -> Result<()> {
    if theta.is_finite() && (0.0..=2.0 * PI).contains(&theta) {
        Ok(())
    } else {
        Err(Error::AngleOutOfRange { theta })
    }
}

pub(crate) fn arc_series(theta: f64, lambdas: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (d, &l) in lambdas.iter().enumerate().skip(1) {
        let df = d as f64;
        let sn = (0.5 * theta * df).sin();
        sum += l * sn * sn / (df * df);
    }
    2.0 / (PI * PI) * sum
}

/// Mean-subtracted stability of the arc [0, theta]: the probability that
/// both correlated angles fall in the arc, minus the independent value
/// (theta/2pi)^2, conditioned on radii r and s.
///
/// F(0) = F(2pi) = 0, F is symmetric about pi, and F(theta) =
/// (2/pi^2) sum_d lambda_d sin^2(d theta/2)/d^2 truncated at
/// [`DEFAULT_SERIES_DEPTH`].
pub fn arc_stability(theta: f64, rho: f64, r: f64, s: f64) -> Result<f64> {
    arc_stability_with_depth(theta, rho, r, s, DEFAULT_SERIES_DEPTH)
}

/// [`arc_stability`] with an explicit series depth.
pub fn arc_stability_with_depth(theta: f64, rho: f64, r: f64, s: f64, depth: usize) -> Result<f64> {
    check_angle(theta)?;
    let lambdas = lambda_sequence(depth, rho, r, s)?;
    Ok(arc_series(theta, &lambdas))
}

/// Quadrature route to F(theta), independent of the eigenseries:
///   F = [2 int_0^theta (theta-w) e^{a cos w - |a|} dw]
///       / (4 pi^2 e^{-|a|} I_0(|a|))  -  (theta/2pi)^2.
/// Adaptive Gauss-Kronrod; used to cross-validate the series.
pub fn arc_stability_quadrature(theta: f64, rho: f64, r: f64, s: f64) -> Result<f64> {
    check_angle(theta)?;
    let a = kernel_scale(rho, r, s)?;
    let aa = a.abs();
    let i0 = bessel_i_scaled(0.0, aa)?;
    let (num, _) = adaptive_quad(
        |w| (theta - w) * (a * w.cos() - aa).exp(),
        0.0,
        theta,
        1e-14,
    );
    Ok(2.0 * num / (4.0 * PI * PI * i0) - (theta / (2.0 * PI)).powi(2))
}

/// Derivative F'(theta) = (1/pi^2) sum_d lambda_d sin(d theta)/d, truncated
/// at [`DEFAULT_SERIES_DEPTH`].  Vanishes at 0, pi and 2pi.
pub fn arc_stability_derivative(theta: f64, rho: f64, r: f64, s: f64) -> Result<f64> {
    arc_stability_derivative_with_depth(theta, rho, r, s, DEFAULT_SERIES_DEPTH)
}

/// [`arc_stability_derivative`] with an explicit series depth.
pub fn arc_stability_derivative_with_depth(
    theta: f64,
    rho: f64,
    r: f64,
    s: f64,
    depth: usize,
) -> Result<f64> {
    check_angle(theta)?;
    let lambdas = lambda_sequence(depth, rho, r, s)?;
    let mut sum = 0.0;
    for (d, &l) in lambdas.iter().enumerate().skip(1) {
        let df = d as f64;
        sum += l * (df * theta).sin() / df;
    }
    Ok(sum / (PI * PI))
}

/// Stability deficit of a three-arc partition with arc lengths `thetas`
/// (which must sum to 2pi) relative to the balanced partition:
///   sum_i F(theta_i) - 3 F(2pi/3).
/// Negative means the partition is angularly worse than balanced arcs.
pub fn arc_deficit(thetas: [f64; 3], rho: f64, r: f64, s: f64) -> Result<f64> {
    for &t in &thetas {
        check_angle(t)?;
    }
    let total: f64 = thetas.iter().sum();
    if (total - 2.0 * PI).abs() > 1e-9 {
        return Err(Error::InvalidProfile(format!(
            "arc lengths sum to {total}, expected 2*pi"
        )));
    }
    let lambdas = lambda_sequence(DEFAULT_SERIES_DEPTH, rho, r, s)?;
    let balanced = arc_series(2.0 * PI / 3.0, &lambdas);
    Ok(thetas.iter().map(|&t| arc_series(t, &lambdas)).sum::<f64>() - 3.0 * balanced)
}

/// Closed-form lower bound for the smoothed distance transform
/// (T_rho phi)(x) at |x| = r, phi(y) = 1 - e^{-rho |y|/2}:
///   1 - (1/2) e^{-z^2/(2(1-rho^2))} (1 + erfcx(sqrt2 z/sqrt(1-rho^2))),
/// z = rho r.  Increasing in r, tends to 1.
pub fn tphi_lower_bound(rho: f64, r: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) || !rho.is_finite() {
        return Err(Error::PositiveCorrelationRequired { rho });
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::RadialArgument { value: r });
    }
    let z = rho * r;
    let s2 = 1.0 - rho * rho;
    Ok(1.0
        - 0.5
            * (-z * z / (2.0 * s2)).exp()
            * (1.0 + erfcx(std::f64::consts::SQRT_2 * z / s2.sqrt())))
}
