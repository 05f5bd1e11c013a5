//! Radial three-cell partition profiles of the plane and their exact
//! quadratic (noise-stability) functionals.
//!
//! A profile assigns, to every radius r on a fixed Gauss-Legendre grid, a
//! split of the circle of radius r into three consecutive cells: cell
//! widths `theta[i] = [t0, t1, t2]` (summing to 2 pi) laid out
//! counter-clockwise starting at angle `offset[i]`.  Stability of a pair of
//! profiles under a rho-correlated Gaussian pair decomposes radially: the
//! joint radius density carries a Bessel kernel whose angular eigenvalues
//! `lambda_d(a)` weight a trigonometric pairing of the two partitions,
//! degree by degree.

use crate::quadrature::{gauss_legendre_on, pairwise_sum};
use crate::special::{bessel_i_scaled, bessel_ratio_chain};
use crate::spherical::lambda_upper_envelope;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Radial points used by the stock constructors.
pub const DEFAULT_RADIAL_POINTS: usize = 64;
/// Fewest radial points accepted; below this the radial quadrature is
/// meaningless for the weight r e^{-r^2/2} on [0, RADIAL_CUTOFF].
pub const MIN_RADIAL_POINTS: usize = 16;
/// Radial truncation: the Gaussian mass beyond radius 8 is ~1.3e-14.
pub const RADIAL_CUTOFF: f64 = 8.0;
/// Default angular series depth for profile stability.
pub const DEFAULT_SERIES_DEPTH: usize = 60;

// Low-discrepancy generators for the deterministic profile family
// (fractional parts of phi, sqrt2, sqrt3, sqrt5, sqrt2/10, sqrt3/10).
const C1: f64 = 0.618_033_988_749_894_9;
const C2: f64 = 0.414_213_562_373_095_1;
const C3: f64 = 0.732_050_807_568_877_2;
const C4: f64 = 0.236_067_977_499_789_6;
const C5: f64 = 0.141_421_356_237_309_5;
const C6: f64 = 0.173_205_080_756_887_7;

fn frac(x: f64) -> f64 {
    x - x.floor()
}

/// A three-cell radial partition profile of the plane.
///
/// Serialises to JSON as `{"radii": [...], "theta": [[t0,t1,t2], ...],
/// "offset": [...]}`; quadrature weights are implied by the grid size and
/// are regenerated on load.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    radii: Vec<f64>,
    weights: Vec<f64>,
    theta: Vec<[f64; 3]>,
    offset: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ProfileDto {
    radii: Vec<f64>,
    theta: Vec<[f64; 3]>,
    offset: Vec<f64>,
}

fn radial_rule(points: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if points < MIN_RADIAL_POINTS {
        return Err(Error::ResolutionTooCoarse {
            points,
            min: MIN_RADIAL_POINTS,
        });
    }
    let rule = gauss_legendre_on(points, 0.0, RADIAL_CUTOFF);
    Ok((rule.nodes, rule.weights))
}

impl RadialProfile {
    /// The balanced partition into three 120-degree sectors, constant in r.
    pub fn sectors(points: usize) -> Result<Self> {
        let (radii, weights) = radial_rule(points)?;
        let n = radii.len();
        Ok(RadialProfile {
            radii,
            weights,
            theta: vec![[2.0 * PI / 3.0; 3]; n],
            offset: vec![0.0; n],
        })
    }

    /// Member `index` of a deterministic family of balanced, genuinely
    /// radius-dependent profiles (cell fractions wobble around 1/3 with a
    /// weighted mean of exactly 1/3, and the whole partition rotates with
    /// r).  Pure f64 arithmetic: the same index always reproduces the same
    /// profile bit for bit.
    pub fn balanced_family(index: usize, points: usize) -> Result<Self> {
        let (radii, weights) = radial_rule(points)?;
        let k = index as f64;
        let a1 = 0.35 * (2.0 * frac(k * C1) - 1.0);
        let a2 = 0.35 * (2.0 * frac(k * C2) - 1.0);
        let a3 = -a1 - a2;
        let om_v = 0.5 + frac(k * C3);
        let ph_v = 2.0 * PI * frac(k * C4);
        let off0 = 2.0 * PI * frac(k * C5);
        let beta = 0.3 * frac(k * C6);

        // centre the wobble so each cell has Gaussian measure exactly 1/3
        let v: Vec<f64> = radii.iter().map(|&r| (om_v * r + ph_v).sin()).collect();
        let wray: Vec<f64> = radii
            .iter()
            .zip(&weights)
            .map(|(&r, &w)| w * r * (-r * r / 2.0).exp())
            .collect();
        let vbar = pairwise_sum(
            &wray
                .iter()
                .zip(&v)
                .map(|(&w, &vi)| w * vi)
                .collect::<Vec<_>>(),
        ) / pairwise_sum(&wray);

        let mut theta = Vec::with_capacity(radii.len());
        let mut offset = Vec::with_capacity(radii.len());
        for (i, &r) in radii.iter().enumerate() {
            let dv = v[i] - vbar;
            let row = [
                2.0 * PI / 3.0 + a1 * dv,
                2.0 * PI / 3.0 + a2 * dv,
                2.0 * PI / 3.0 + a3 * dv,
            ];
            for &t in &row {
                if !(0.05..=2.0 * PI - 0.05).contains(&t) {
                    return Err(Error::InvalidProfile(format!(
                        "family index {index} produces a degenerate cell width {t}"
                    )));
                }
            }
            theta.push(row);
            offset.push(off0 + beta * r.sin());
        }
        Ok(RadialProfile {
            radii,
            weights,
            theta,
            offset,
        })
    }

    /// The same partition rotated by pi at every radius (pointwise
    /// antipodal image).  Stability of a pair `(f, g.antipodal())` at
    /// correlation rho equals stability of `(f, g)` at `-rho`.
    pub fn antipodal(&self) -> Self {
        let mut out = self.clone();
        for o in &mut out.offset {
            *o += PI;
        }
        out
    }

    /// Build a profile from explicit parts.  `radii` must coincide (to
    /// 1e-9) with the Gauss-Legendre grid of the same size on
    /// [0, [`RADIAL_CUTOFF`]], all cell widths must be nonnegative and each
    /// row must sum to 2 pi (to 1e-9).
    pub fn from_parts(radii: Vec<f64>, theta: Vec<[f64; 3]>, offset: Vec<f64>) -> Result<Self> {
        let (grid, weights) = radial_rule(radii.len())?;
        for (&given, &expect) in radii.iter().zip(&grid) {
            if !given.is_finite() || (given - expect).abs() > 1e-9 {
                return Err(Error::InvalidProfile(format!(
                    "radius {given} does not lie on the Gauss-Legendre grid (expected {expect})"
                )));
            }
        }
        if theta.len() != radii.len() || offset.len() != radii.len() {
            return Err(Error::InvalidProfile(format!(
                "lengths disagree: {} radii, {} theta rows, {} offsets",
                radii.len(),
                theta.len(),
                offset.len()
            )));
        }
        for (i, row) in theta.iter().enumerate() {
            if row.iter().any(|&t| !t.is_finite() || t < 0.0) {
                return Err(Error::InvalidProfile(format!(
                    "negative or non-finite cell width at radius index {i}"
                )));
            }
            let total: f64 = row.iter().sum();
            if (total - 2.0 * PI).abs() > 1e-9 {
                return Err(Error::InvalidProfile(format!(
                    "cell widths at radius index {i} sum to {total}, expected 2*pi"
                )));
            }
        }
        if offset.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidProfile("non-finite offset".to_string()));
        }
        Ok(RadialProfile {
            radii: grid,
            weights,
            theta,
            offset,
        })
    }

    /// Parse a profile from its JSON form.
    pub fn from_json(json: &str) -> Result<Self> {
        let dto: ProfileDto = serde_json::from_str(json)
            .map_err(|e| Error::InvalidProfile(format!("JSON parse failure: {e}")))?;
        Self::from_parts(dto.radii, dto.theta, dto.offset)
    }

    /// Serialise to the documented JSON form.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ProfileDto {
            radii: self.radii.clone(),
            theta: self.theta.clone(),
            offset: self.offset.clone(),
        })
        .expect("profile serialisation cannot fail")
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn theta(&self) -> &[[f64; 3]] {
        &self.theta
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    /// Fraction of each circle occupied by the three cells: theta / 2 pi.
    pub fn cell_fractions(&self) -> Vec<[f64; 3]> {
        self.theta
            .iter()
            .map(|row| {
                [
                    row[0] / (2.0 * PI),
                    row[1] / (2.0 * PI),
                    row[2] / (2.0 * PI),
                ]
            })
            .collect()
    }

    /// Gaussian measure of the three cells (radial quadrature of the cell
    /// fractions against r e^{-r^2/2}).
    pub fn gaussian_measures(&self) -> [f64; 3] {
        let fractions = self.cell_fractions();
        let mut out = [0.0; 3];
        for k in 0..3 {
            let terms: Vec<f64> = self
                .radii
                .iter()
                .zip(&self.weights)
                .zip(&fractions)
                .map(|((&r, &w), c)| w * r * (-r * r / 2.0).exp() * c[k])
                .collect();
            out[k] = pairwise_sum(&terms);
        }
        out
    }

    /// Cell centres: the mid-angle of each cell, cumulative from `offset`.
    fn centres(&self) -> Vec<[f64; 3]> {
        self.theta
            .iter()
            .zip(&self.offset)
            .map(|(t, &o)| {
                [
                    o + t[0] / 2.0,
                    o + t[0] + t[1] / 2.0,
                    o + t[0] + t[1] + t[2] / 2.0,
                ]
            })
            .collect()
    }
}

/// Degree decomposition of a profile-pair stability value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BilinearStability {
    /// The stability: probability that a rho-correlated pair lands in
    /// cells of equal index.
    pub total: f64,
    /// Degree-0 part: the product-measure term sum_k <c_k^f, c_k^g>.
    pub constant_part: f64,
    /// Degree-1 angular harmonic contribution.
    pub degree_one: f64,
    /// All harmonics of degree >= 2.
    pub higher_degrees: f64,
    /// Budget for quadrature roundoff plus the truncated series tail.
    pub uncertainty: f64,
}

// sin(d theta/2)(cos(d kappa), sin(d kappa)) tables for one profile:
// table[d-1][i][k] = (u, v) at degree d, radius i, cell k.
fn harmonic_tables(p: &RadialProfile, depth: usize) -> Vec<Vec<[(f64, f64); 3]>> {
    let centres = p.centres();
    (1..=depth)
        .map(|d| {
            let df = d as f64;
            p.theta
                .iter()
                .zip(&centres)
                .map(|(t, c)| {
                    let mut row = [(0.0, 0.0); 3];
                    for k in 0..3 {
                        let sn = (df * t[k] / 2.0).sin();
                        row[k] = (sn * (df * c[k]).cos(), sn * (df * c[k]).sin());
                    }
                    row
                })
                .collect()
        })
        .collect()
}

fn signed_bilinear(
    rho: f64,
    f: &RadialProfile,
    g: &RadialProfile,
    depth: usize,
) -> Result<BilinearStability> {
    if f.len() != g.len()
        || f.radii
            .iter()
            .zip(&g.radii)
            .any(|(&a, &b)| (a - b).abs() > 1e-12)
    {
        return Err(Error::GridMismatch);
    }
    let s2 = 1.0 - rho * rho;
    let cf = f.cell_fractions();
    let cg = g.cell_fractions();
    let tf = harmonic_tables(f, depth);
    let tg = harmonic_tables(g, depth);

    // one row of the joint radius grid at a time; rows are independent and
    // recombined in index order, so the result is identical for any number
    // of worker threads
    let rows: Vec<Vec<f64>> = (0..f.len())
        .into_par_iter()
        .map(|i| {
            let ri = f.radii[i];
            let wi = f.weights[i];
            let mut terms: Vec<Vec<f64>> = vec![Vec::with_capacity(g.len()); depth + 1];
            for j in 0..g.len() {
                let rj = g.radii[j];
                let a = rho * ri * rj / s2;
                let aa = a.abs();
                let wp = wi * g.weights[j] * ri * rj / s2
                    * (-(ri * ri + rj * rj) / (2.0 * s2) + aa).exp()
                    * bessel_i_scaled(0.0, aa).expect("validated kernel scale");
                let chain = bessel_ratio_chain(depth, aa).expect("validated kernel scale");
                terms[0]
                    .push(wp * (cf[i][0] * cg[j][0] + cf[i][1] * cg[j][1] + cf[i][2] * cg[j][2]));
                let mut lam = 1.0;
                for (d, &q) in chain.iter().enumerate() {
                    lam *= q;
                    let l = if a < 0.0 && d % 2 == 0 { -lam } else { lam };
                    let fa = &tf[d][i];
                    let gb = &tg[d][j];
                    let pair = fa[0].0 * gb[0].0
                        + fa[0].1 * gb[0].1
                        + fa[1].0 * gb[1].0
                        + fa[1].1 * gb[1].1
                        + fa[2].0 * gb[2].0
                        + fa[2].1 * gb[2].1;
                    terms[d + 1].push(wp * l * pair);
                }
            }
            terms.iter().map(|t| pairwise_sum(t)).collect()
        })
        .collect();

    let mut by_degree = vec![0.0f64; depth + 1];
    for (d, slot) in by_degree.iter_mut().enumerate() {
        let col: Vec<f64> = rows.iter().map(|r| r[d]).collect();
        *slot = pairwise_sum(&col);
    }
    let constant_part = by_degree[0];
    let mut degree_one = 0.0;
    let mut higher = Vec::new();
    for (d, &val) in by_degree.iter().enumerate().skip(1) {
        let scaled = 2.0 / (PI * PI) / ((d * d) as f64) * val;
        if d == 1 {
            degree_one = scaled;
        } else {
            higher.push(scaled);
        }
    }
    let higher_degrees = pairwise_sum(&higher);
    let total = constant_part + degree_one + higher_degrees;

    // tail: |sum_{d>D}| <= (2/pi^2) * 3 * lambda_{D+1}(a_max) * sum 1/d^2
    let a_max = rho.abs() * RADIAL_CUTOFF * RADIAL_CUTOFF / s2;
    let tail = 2.0 / (PI * PI) * 3.0 * lambda_upper_envelope(depth + 1, a_max) / depth as f64;
    let uncertainty = 1e-12 * total.abs().max(1.0) + tail + 3e-14;

    Ok(BilinearStability {
        total,
        constant_part,
        degree_one,
        higher_degrees,
        uncertainty,
    })
}

/// Probability that a rho-correlated Gaussian pair (X, Y) of the plane
/// lands in same-index cells of `f` (at X) and `g` (at Y), with the
/// degree decomposition and an uncertainty budget.
///
/// Requires rho in (0, 1): for anti-correlation, keep rho positive and
/// pass `g.antipodal()` instead.
pub fn bilinear_stability(
    rho: f64,
    f: &RadialProfile,
    g: &RadialProfile,
) -> Result<BilinearStability> {
    bilinear_stability_with_depth(rho, f, g, DEFAULT_SERIES_DEPTH)
}

/// [`bilinear_stability`] with an explicit series depth.
pub fn bilinear_stability_with_depth(
    rho: f64,
    f: &RadialProfile,
    g: &RadialProfile,
    depth: usize,
) -> Result<BilinearStability> {
    if !rho.is_finite() || rho <= 0.0 || rho >= 1.0 {
        return Err(Error::CorrelationOutOfRange {
            value: rho,
            expected: "(0, 1); represent negative correlation by passing g.antipodal()",
        });
    }
    if depth == 0 {
        return Err(Error::ResolutionTooCoarse { points: 0, min: 1 });
    }
    signed_bilinear(rho, f, g, depth)
}

/// Noise stability of a single profile: the probability that a
/// rho-correlated pair lands in the same cell.  Defined for rho in (-1, 1);
/// at rho = 0 it degenerates to the sum of squared cell measures.
pub fn profile_stability(rho: f64, p: &RadialProfile) -> Result<BilinearStability> {
    profile_stability_with_depth(rho, p, DEFAULT_SERIES_DEPTH)
}

/// [`profile_stability`] with an explicit series depth.
pub fn profile_stability_with_depth(
    rho: f64,
    p: &RadialProfile,
    depth: usize,
) -> Result<BilinearStability> {
    crate::require_correlation_open(rho, "(-1, 1)")?;
    if depth == 0 {
        return Err(Error::ResolutionTooCoarse { points: 0, min: 1 });
    }
    signed_bilinear(rho, p, p, depth)
}

/// Imbalance penalty of a profile at positive correlation rho:
///   (3/2) int_0^inf r e^{-r^2/2} (1 - e^{-rho r/2})
///                    sum_k (c_k(r) - 1/3)^2 dr,
/// zero exactly for perfectly balanced (sector) profiles.
pub fn penalty_functional(rho: f64, p: &RadialProfile) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) || !rho.is_finite() {
        return Err(Error::PositiveCorrelationRequired { rho });
    }
    let fractions = p.cell_fractions();
    let terms: Vec<f64> = p
        .radii
        .iter()
        .zip(&p.weights)
        .zip(&fractions)
        .map(|((&r, &w), c)| {
            let dev2: f64 = c
                .iter()
                .map(|&ck| (ck - 1.0 / 3.0) * (ck - 1.0 / 3.0))
                .sum();
            w * r * (-r * r / 2.0).exp() * (1.0 - (-rho * r / 2.0).exp()) * dev2
        })
        .collect();
    Ok(1.5 * pairwise_sum(&terms))
}
