//! Rounding/hardness constants obtained by minimising explicit
//! one-dimensional objectives in the correlation parameter.

use crate::gaussian::cone;
use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

/// A one-dimensional minimisation result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    /// The minimal objective value.
    pub value: f64,
    /// Where it is attained.
    pub argmin: f64,
}

/// Two-part cut ratio at correlation rho: (2/pi) arccos(rho) / (1 - rho).
/// Agreement probability of the halfspace rounding over the cut fraction.
pub fn max_cut_objective(rho: f64) -> Result<f64> {
    if !rho.is_finite() || !(-1.0..1.0).contains(&rho) {
        return Err(Error::CorrelationOutOfRange {
            value: rho,
            expected: "[-1, 1)",
        });
    }
    Ok((2.0 / PI) * rho.acos() / (1.0 - rho))
}

/// Three-part cut ratio at correlation rho:
/// (3/2) (1 - cone(rho)) / (1 - rho), the three-cone disagreement over the
/// cut fraction.
pub fn three_cut_objective(rho: f64) -> Result<f64> {
    if !rho.is_finite() || !(-1.0..1.0).contains(&rho) {
        return Err(Error::CorrelationOutOfRange {
            value: rho,
            expected: "[-1, 1)",
        });
    }
    Ok(1.5 * (1.0 - cone(rho)?) / (1.0 - rho))
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > 1e-12 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

fn minimize_on<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Extremum {
    // coarse scan to localise, golden-section to polish
    let n = 2001;
    let mut best = (f(lo), 0usize);
    for i in 1..n {
        let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let v = f(x);
        if v < best.0 {
            best = (v, i);
        }
    }
    let step = (hi - lo) / (n - 1) as f64;
    let a = lo + step * best.1.saturating_sub(1) as f64;
    let b = (lo + step * (best.1 + 1) as f64).min(hi);
    let (argmin, value) = golden_min(&f, a, b);
    Extremum { value, argmin }
}

/// Two-part cut constant: the infimum of [`max_cut_objective`] over
/// rho in [-1, 1).  About 0.8785672, attained near rho = -0.6891577.
pub fn alpha2() -> Extremum {
    minimize_on(
        |rho| max_cut_objective(rho).expect("domain covers the search interval"),
        -1.0,
        1.0 - 1e-6,
    )
}

/// Three-part cut constant: the infimum of [`three_cut_objective`] over
/// rho in [-1/2, 1).  About 0.8360081, attained at the endpoint
/// rho = -1/2 (the most negative correlation the three-part discrete model
/// admits).
pub fn alpha3() -> Extremum {
    minimize_on(
        |rho| three_cut_objective(rho).expect("domain covers the search interval"),
        -0.5,
        1.0 - 1e-6,
    )
}

/// Weak three-part cut constant: the infimum of [`three_cut_objective`]
/// over the certified negative-correlation window [-0.0234, 0].  About
/// 0.98937200, attained at the left endpoint.
pub fn beta3() -> Extremum {
    minimize_on(
        |rho| three_cut_objective(rho).expect("domain covers the search interval"),
        -0.0234,
        0.0,
    )
}

/// Large-electorate limit of majority agreement on rho-correlated ballots:
/// 1 - (2/pi) arccos(rho).
pub fn majority_agreement_limit(rho: f64) -> Result<f64> {
    if !rho.is_finite() || !(-1.0..=1.0).contains(&rho) {
        return Err(Error::CorrelationOutOfRange {
            value: rho,
            expected: "[-1, 1]",
        });
    }
    Ok(1.0 - (2.0 / PI) * rho.acos())
}

/// Large-electorate limit of three-way plurality agreement: the stability
/// of the balanced three-cone partition.  The discrete three-letter model
/// only admits rho > -1/2.
pub fn plurality_agreement_limit(rho: f64) -> Result<f64> {
    if !rho.is_finite() || !(rho > -0.5 && rho < 1.0) {
        return Err(Error::CorrelationOutOfRange {
            value: rho,
            expected: "(-1/2, 1)",
        });
    }
    cone(rho)
}
