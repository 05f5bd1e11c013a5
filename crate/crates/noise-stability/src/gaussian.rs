//! Correlated Gaussian pairs in R^n: the Mehler kernel, the smoothing
//! (Ornstein-Uhlenbeck) operator on functions, and the exact stability of
//! the balanced three-cone partition of the plane.

use crate::quadrature::{gauss_hermite, pairwise_sum};
use crate::{Error, Result};
use std::f64::consts::PI;

/// Joint density of a rho-correlated standard Gaussian pair (X, Y) in R^n:
///   (2 pi)^{-n} (1-rho^2)^{-n/2}
///     exp[(-|x|^2 - |y|^2 + 2 rho <x, y>) / (2 (1-rho^2))].
/// At rho = 0 this is the product of the two standard densities.
pub fn mehler_kernel(rho: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    crate::require_correlation_open(rho, "(-1, 1)")?;
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    let n = x.len() as f64;
    let s2 = 1.0 - rho * rho;
    let mut quad = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        quad += -xi * xi - yi * yi + 2.0 * rho * xi * yi;
    }
    Ok((2.0 * PI).powf(-n) * s2.powf(-n / 2.0) * (quad / (2.0 * s2)).exp())
}

/// Default Gauss-Hermite order per axis for [`ou_apply`].
pub const DEFAULT_OU_ORDER: usize = 64;

/// Ceiling on the total tensor-grid size order^n of [`ou_apply_with_order`].
const OU_GRID_CAP: u128 = 1 << 24;

/// Smoothing operator (T_rho f)(x) = E[f(rho x + sqrt(1-rho^2) Z)],
/// Z standard Gaussian in R^n, via tensorised Gauss-Hermite quadrature of
/// order [`DEFAULT_OU_ORDER`] per axis.
///
/// Spectrally exact on polynomials of per-axis degree < 2*order; indicator
/// discontinuities converge only like O(order^{-1/2}) and need dedicated
/// closed forms (see [`cone`]).
pub fn ou_apply<F>(rho: f64, x: &[f64], f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    ou_apply_with_order(rho, x, f, DEFAULT_OU_ORDER)
}

/// [`ou_apply`] with an explicit per-axis quadrature order.
pub fn ou_apply_with_order<F>(rho: f64, x: &[f64], f: F, order: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    crate::require_correlation_open(rho, "(-1, 1)")?;
    if order == 0 {
        return Err(Error::ResolutionTooCoarse { points: 0, min: 1 });
    }
    let n = x.len();
    if n == 0 {
        return Err(Error::DimensionMismatch { x: 0, y: 0 });
    }
    let states = (order as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if states > OU_GRID_CAP {
        return Err(Error::EnumerationTooLarge {
            states,
            cap: OU_GRID_CAP,
        });
    }
    let rule = gauss_hermite(order);
    let sig = (1.0 - rho * rho).sqrt();
    let mut idx = vec![0usize; n];
    let mut arg = vec![0.0f64; n];
    let mut terms = Vec::with_capacity(states as usize);
    loop {
        let mut w = 1.0;
        for (k, &i) in idx.iter().enumerate() {
            arg[k] = rho * x[k] + sig * rule.nodes[i];
            w *= rule.weights[i];
        }
        terms.push(w * f(&arg));
        // odometer increment over the tensor grid
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < order {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == n {
                return Ok(pairwise_sum(&terms));
            }
        }
    }
}

/// Noise stability of the balanced three-cone partition of the plane
/// (three 120-degree sectors): the probability that a rho-correlated pair
/// lands in the same sector, in closed form,
///   3 [1/9 + (arccos(-rho)^2 - arccos(rho/2)^2) / (4 pi^2)].
/// Equals 1/3 at rho = 0 and tends to 1 as rho -> 1.
pub fn cone(rho: f64) -> Result<f64> {
    if !rho.is_finite() || !(-1.0..=1.0).contains(&rho) {
        return Err(Error::CorrelationOutOfRange {
            value: rho,
            expected: "[-1, 1]",
        });
    }
    let p = (-rho).acos();
    let q = (rho / 2.0).acos();
    Ok(3.0 * (1.0 / 9.0 + (p * p - q * q) / (4.0 * PI * PI)))
}
