//! Scalar special functions.
//!
//! Modified Bessel functions of the first kind (plain, exponentially scaled,
//! and — most importantly for this crate — consecutive-order *ratios*
//! computed without cancellation), normalized probabilists' Hermite
//! polynomials, the scaled complementary error function, and Gaussian tail
//! probabilities.

use crate::{Error, Result};

/// Largest supported degree for [`hermite`].
///
/// Beyond this the normalized values underflow toward zero so fast that the
/// recurrence carries no usable precision, and no caller needs them.
pub const MAX_HERMITE_DEGREE: usize = 60;

pub(crate) const SQRT_PI: f64 = 1.772_453_850_905_516_f64;
const SQRT_2: f64 = std::f64::consts::SQRT_2;

fn bessel_args_ok(order: f64, x: f64) -> Result<()> {
    if order.is_finite() && x.is_finite() && order >= 0.0 && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::BesselDomain { order, arg: x })
    }
}

/// Ascending series for e^{-x} I_order(x).  All terms are positive, so the
/// only rounding cost is the term count; good to ~1e-14 relative for x
/// up to several hundred (the scaled sum stays representable).
fn bessel_i_series_scaled(order: f64, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = (order * (0.5 * x).ln() - libm::lgamma(order + 1.0) - x).exp();
    let mut sum = term;
    let mut m = 0.0_f64;
    while m < 600.0 {
        m += 1.0;
        term *= q / (m * (m + order));
        sum += term;
        if term <= f64::EPSILON * sum {
            break;
        }
    }
    sum
}

/// Large-argument asymptotic series for e^{-x} I_order(x):
///   (2 pi x)^{-1/2} [1 - (mu-1)/(8x) + (mu-1)(mu-9)/(2!(8x)^2) - ...],
/// mu = 4 order^2.  Returns None if the (divergent) tail starts growing
/// before the terms reach round-off, in which case the caller falls back to
/// the ascending series.
fn bessel_i_asymptotic_scaled(order: f64, x: f64) -> Option<f64> {
    let mu = 4.0 * order * order;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let f = 2.0 * kf - 1.0;
        term *= -(mu - f * f) / (8.0 * x * kf);
        if term.abs() >= prev {
            return None;
        }
        prev = term.abs();
        sum += term;
        if term.abs() <= f64::EPSILON * sum.abs() {
            return Some(sum / (2.0 * std::f64::consts::PI * x).sqrt());
        }
    }
    None
}

/// Exponentially scaled modified Bessel function e^{-x} I_order(x) for
/// `order >= 0`, `x >= 0`.
pub fn bessel_i_scaled(order: f64, x: f64) -> Result<f64> {
    bessel_args_ok(order, x)?;
    if x == 0.0 {
        return Ok(if order == 0.0 { 1.0 } else { 0.0 });
    }
    if x > 30.0 {
        if let Some(v) = bessel_i_asymptotic_scaled(order, x) {
            return Ok(v);
        }
    }
    Ok(bessel_i_series_scaled(order, x))
}

/// Modified Bessel function of the first kind I_order(x) for `order >= 0`,
/// `x >= 0`.  Overflows to +inf past x ~ 709; use [`bessel_i_scaled`] there.
pub fn bessel_i(order: f64, x: f64) -> Result<f64> {
    Ok(bessel_i_scaled(order, x)? * x.exp())
}

/// Ratio I_{order+1}(x)/I_order(x), computed by backward recurrence
///   q_{v-1} = 1/(2v/x + q_v)
/// seeded with the lower Amos envelope at a starting order high enough that
/// the seed error has fully contracted away.  No Bessel values are formed,
/// so there is no cancellation or overflow at any argument size.
pub fn bessel_ratio(order: f64, x: f64) -> Result<f64> {
    bessel_args_ok(order, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let steps = 30 + x.min(1.0e6).ceil() as usize;
    let vt = order + steps as f64;
    let mut q = x / (vt + 1.0 + ((vt + 1.0) * (vt + 1.0) + x * x).sqrt());
    // count down on an integer so the sweep ends at exactly order + 1
    for k in (1..=steps).rev() {
        q = 1.0 / (2.0 * (order + k as f64) / x + q);
    }
    Ok(q)
}

/// All integer-order ratios I_{j+1}(x)/I_j(x) for j = 0..max_order, from a
/// single backward sweep.  `out[j] = I_{j+1}/I_j`.
pub fn bessel_ratio_chain(max_order: usize, x: f64) -> Result<Vec<f64>> {
    bessel_args_ok(0.0, x)?;
    let mut out = vec![0.0_f64; max_order];
    if max_order == 0 || x == 0.0 {
        return Ok(out);
    }
    let top = max_order + 30 + x.min(1.0e6).ceil() as usize;
    let vt = top as f64;
    let mut q = x / (vt + 1.0 + ((vt + 1.0) * (vt + 1.0) + x * x).sqrt());
    for v in (1..=top).rev() {
        q = 1.0 / (2.0 * v as f64 / x + q);
        if v <= max_order {
            out[v - 1] = q;
        }
    }
    Ok(out)
}

/// Normalized probabilists' Hermite polynomial h_m(x) = He_m(x)/m!.
///
/// h_0 = 1, h_1 = x, (m+1) h_{m+1} = x h_m - h_{m-1}.  With this scaling
/// sqrt(m!) h_m is orthonormal for the standard Gaussian weight, and the
/// Mehler kernel expands as sum_m rho^m m! h_m(x) h_m(y) per coordinate.
pub fn hermite(degree: usize, x: f64) -> Result<f64> {
    if degree > MAX_HERMITE_DEGREE {
        return Err(Error::HermiteDegree {
            degree,
            max: MAX_HERMITE_DEGREE,
        });
    }
    if degree == 0 {
        return Ok(1.0);
    }
    let mut prev = 1.0_f64;
    let mut cur = x;
    for m in 1..degree {
        let next = (x * cur - prev) / (m as f64 + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Scaled complementary error function e^{x^2} erfc(x), finite for all
/// x >= 0 (and exact to ~1e-14 relative); for x < 0 it grows like
/// 2 e^{x^2} and is allowed to overflow.
pub fn erfcx(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x < 8.0 {
        // e^{x^2} is at most e^64 here and erfc loses nothing to cancellation
        (x * x).exp() * libm::erfc(x)
    } else {
        // asymptotic: (x sqrt(pi))^{-1} sum_k (-1)^k (2k-1)!!/(2x^2)^k
        let inv2x2 = 1.0 / (2.0 * x * x);
        let mut term = 1.0_f64;
        let mut sum = 1.0_f64;
        for k in 1..40_u32 {
            term *= -((2 * k - 1) as f64) * inv2x2;
            let next = sum + term;
            if next == sum {
                break;
            }
            sum = next;
        }
        sum / (x * SQRT_PI)
    }
}

/// Complementary error function, valid on the whole line including the deep
/// right tail (underflows to zero past x ~ 27).
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Standard Gaussian upper-tail probability P(Z > x).
///
/// The infinities are honored as limits: `-inf -> 1`, `+inf -> 0`.
pub fn gaussian_tail(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return 1.0;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    0.5 * erfc(x / SQRT_2)
}
