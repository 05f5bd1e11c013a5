//! Discrete voting rules on k-letter ballots: exact noise stability by
//! tensor enumeration, reproducible Monte Carlo estimation, influences,
//! and convergence scans towards the Gaussian limits.
//!
//! The correlated-ballot model: each of the n coordinates of Y
//! independently copies the corresponding coordinate of the uniform X with
//! probability rho + (1-rho)/k and otherwise resamples uniformly among the
//! other k-1 letters, so the stay probability is (1 + (k-1) rho)/k and rho
//! ranges over [-1/(k-1), 1].
//!
//! Vector-valued rules (plurality, dictator, lookup) take values in the
//! k-simplex: a strict winner j maps to the vertex e_j, anything else to
//! the centroid; stability is the expected inner product, i.e. the
//! agreement probability with ties scored 1/k.  Majority uses the
//! two-letter +-1 convention and its stability is E[f(X) f(Y)].

use crate::quadrature::pairwise_sum;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Enumeration cap for vector-valued rules (3^8 states).
pub const MAX_ENUMERATED_STATES: u128 = 6561;
/// Enumeration cap for two-letter rules.
pub const MAX_BOOLEAN_STATES: u128 = 1 << 20;
/// Fewest Monte Carlo samples accepted.
pub const MIN_MC_SAMPLES: u64 = 1000;

const MC_CHUNK: u64 = 65_536;

/// Result of one ballot profile: a strict winner or a deadlock.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Winner(u8),
    Deadlock,
}

/// A voting rule on `voters` ballots over `candidates` letters.
#[derive(Debug, Clone, PartialEq)]
pub enum VotingRule {
    /// Strict plurality; non-unique maxima are deadlocks.
    Plurality { candidates: usize, voters: usize },
    /// Two-letter majority, odd electorate (never deadlocks).
    Majority { voters: usize },
    /// The `coordinate`-th voter decides.
    Dictator {
        candidates: usize,
        voters: usize,
        coordinate: usize,
    },
    /// Arbitrary single-winner function given by a table over all ballot
    /// profiles, indexed row-major with the first voter most significant
    /// (profile x maps to index sum_i x_i k^(n-1-i)).
    Lookup {
        candidates: usize,
        voters: usize,
        table: Vec<u8>,
    },
}

#[derive(Serialize, Deserialize)]
struct LookupDto {
    k: usize,
    n: usize,
    table: Vec<u8>,
}

fn checked_states(k: usize, n: usize) -> u128 {
    (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX)
}

impl VotingRule {
    pub fn candidates(&self) -> usize {
        match self {
            VotingRule::Plurality { candidates, .. }
            | VotingRule::Dictator { candidates, .. }
            | VotingRule::Lookup { candidates, .. } => *candidates,
            VotingRule::Majority { .. } => 2,
        }
    }

    pub fn voters(&self) -> usize {
        match self {
            VotingRule::Plurality { voters, .. }
            | VotingRule::Dictator { voters, .. }
            | VotingRule::Lookup { voters, .. }
            | VotingRule::Majority { voters } => *voters,
        }
    }

    fn validate(&self) -> Result<()> {
        let k = self.candidates();
        let n = self.voters();
        if !(2..=255).contains(&k) {
            return Err(Error::InvalidRule(format!(
                "{k} candidates outside the supported range 2..=255"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidRule("no voters".to_string()));
        }
        match self {
            VotingRule::Majority { voters } => {
                if voters % 2 == 0 {
                    return Err(Error::InvalidRule(format!(
                        "majority needs an odd electorate, got {voters}"
                    )));
                }
            }
            VotingRule::Dictator { coordinate, .. } => {
                if *coordinate >= n {
                    return Err(Error::InvalidRule(format!(
                        "dictator coordinate {coordinate} out of range for {n} voters"
                    )));
                }
            }
            VotingRule::Lookup { table, .. } => {
                let states = checked_states(k, n);
                if states > MAX_ENUMERATED_STATES {
                    return Err(Error::EnumerationTooLarge {
                        states,
                        cap: MAX_ENUMERATED_STATES,
                    });
                }
                if table.len() as u128 != states {
                    return Err(Error::InvalidRule(format!(
                        "lookup table has {} entries, expected k^n = {states}",
                        table.len()
                    )));
                }
                if let Some(bad) = table.iter().find(|&&e| e as usize >= k) {
                    return Err(Error::InvalidRule(format!(
                        "lookup table entry {bad} is not a candidate index below {k}"
                    )));
                }
            }
            VotingRule::Plurality { .. } => {}
        }
        Ok(())
    }

    /// Apply the rule to one ballot profile.
    pub fn evaluate(&self, ballots: &[u8]) -> Result<Outcome> {
        let k = self.candidates();
        let n = self.voters();
        if ballots.len() != n {
            return Err(Error::DimensionMismatch {
                x: ballots.len(),
                y: n,
            });
        }
        if let Some(&bad) = ballots.iter().find(|&&b| b as usize >= k) {
            return Err(Error::InvalidRule(format!(
                "ballot letter {bad} is not a candidate index below {k}"
            )));
        }
        Ok(match self {
            VotingRule::Plurality { .. } => {
                let mut counts = vec![0u32; k];
                for &b in ballots {
                    counts[b as usize] += 1;
                }
                let top = *counts.iter().max().expect("k >= 2");
                let mut winners = counts.iter().enumerate().filter(|(_, &c)| c == top);
                let first = winners.next().expect("nonempty").0;
                if winners.next().is_some() {
                    Outcome::Deadlock
                } else {
                    Outcome::Winner(first as u8)
                }
            }
            VotingRule::Majority { voters } => {
                let ones = ballots.iter().filter(|&&b| b == 1).count();
                Outcome::Winner(u8::from(2 * ones > *voters))
            }
            VotingRule::Dictator { coordinate, .. } => Outcome::Winner(ballots[*coordinate]),
            VotingRule::Lookup { table, .. } => {
                let mut idx = 0usize;
                for &b in ballots {
                    idx = idx * k + b as usize;
                }
                Outcome::Winner(table[idx])
            }
        })
    }

    /// Score a pair of outcomes: +-1 product for majority, agreement
    /// probability (deadlocks scored 1/k) for vector-valued rules.
    pub fn pair_value(&self, a: Outcome, b: Outcome) -> f64 {
        match self {
            VotingRule::Majority { .. } => {
                let sign = |o: Outcome| match o {
                    Outcome::Winner(1) => 1.0,
                    Outcome::Winner(_) => -1.0,
                    Outcome::Deadlock => 0.0,
                };
                sign(a) * sign(b)
            }
            _ => match (a, b) {
                (Outcome::Winner(i), Outcome::Winner(j)) => f64::from(i == j),
                _ => 1.0 / self.candidates() as f64,
            },
        }
    }

    /// Parse a lookup rule from `{"k": .., "n": .., "table": [..]}`.
    pub fn lookup_from_json(json: &str) -> Result<Self> {
        let dto: LookupDto = serde_json::from_str(json)
            .map_err(|e| Error::InvalidRule(format!("JSON parse failure: {e}")))?;
        let rule = VotingRule::Lookup {
            candidates: dto.k,
            voters: dto.n,
            table: dto.table,
        };
        rule.validate()?;
        Ok(rule)
    }

    /// Serialise a lookup rule to its JSON form.
    pub fn lookup_to_json(&self) -> Result<String> {
        match self {
            VotingRule::Lookup {
                candidates,
                voters,
                table,
            } => Ok(serde_json::to_string(&LookupDto {
                k: *candidates,
                n: *voters,
                table: table.clone(),
            })
            .expect("lookup serialisation cannot fail")),
            _ => Err(Error::InvalidRule(
                "only lookup rules have a table serialisation".to_string(),
            )),
        }
    }
}

fn require_discrete_correlation(k: usize, rho: f64) -> Result<()> {
    let lo = -1.0 / (k as f64 - 1.0);
    if rho.is_finite() && rho >= lo && rho <= 1.0 {
        Ok(())
    } else {
        Err(Error::CorrelationOutOfRange {
            value: rho,
            expected: "[-1/(k-1), 1]",
        })
    }
}

fn enumeration_limit(rule: &VotingRule) -> Result<usize> {
    let k = rule.candidates();
    let states = checked_states(k, rule.voters());
    let cap = if k == 2 {
        MAX_BOOLEAN_STATES
    } else {
        MAX_ENUMERATED_STATES
    };
    if states > cap {
        return Err(Error::EnumerationTooLarge { states, cap });
    }
    Ok(states as usize)
}

// f as a flat (states x m) table; m = 1 scalar +-1 for majority, m = k
// simplex components otherwise
fn value_table(rule: &VotingRule, states: usize) -> Result<(usize, Vec<f64>)> {
    let k = rule.candidates();
    let n = rule.voters();
    let m = match rule {
        VotingRule::Majority { .. } => 1,
        _ => k,
    };
    let mut f = vec![0.0f64; states * m];
    let mut ballots = vec![0u8; n];
    for idx in 0..states {
        let mut rest = idx;
        for i in (0..n).rev() {
            ballots[i] = (rest % k) as u8;
            rest /= k;
        }
        match rule.evaluate(&ballots)? {
            Outcome::Winner(j) => {
                if m == 1 {
                    f[idx] = if j == 1 { 1.0 } else { -1.0 };
                } else {
                    f[idx * m + j as usize] = 1.0;
                }
            }
            Outcome::Deadlock => {
                for c in 0..m {
                    f[idx * m + c] = 1.0 / k as f64;
                }
            }
        }
    }
    Ok((m, f))
}

/// Exact noise stability of a rule at correlation rho by full enumeration
/// (states up to 3^8 for vector rules, 2^20 for two-letter rules): the
/// noise operator is applied coordinate by coordinate as a tensor of
/// two-state averages, then paired against the original table.
pub fn stability_exact(rule: &VotingRule, rho: f64) -> Result<f64> {
    rule.validate()?;
    let k = rule.candidates();
    let n = rule.voters();
    require_discrete_correlation(k, rho)?;
    let states = enumeration_limit(rule)?;
    let (m, f) = value_table(rule, states)?;
    let kf = k as f64;
    let off = (1.0 - rho) / kf;
    let keep_minus_off = rho; // (rho + (1-rho)/k) - (1-rho)/k

    let mut g = f.clone();
    let mut stride = states / k; // first coordinate is most significant
    for _ in 0..n {
        let block = stride * k;
        for base in (0..states).step_by(block) {
            for o in 0..stride {
                for c in 0..m {
                    let at = |t: usize| (base + o + t * stride) * m + c;
                    let mut s = 0.0;
                    for t in 0..k {
                        s += g[at(t)];
                    }
                    for t in 0..k {
                        let i = at(t);
                        g[i] = off * s + keep_minus_off * g[i];
                    }
                }
            }
        }
        stride /= k;
    }

    let dots: Vec<f64> = (0..states)
        .map(|idx| (0..m).map(|c| f[idx * m + c] * g[idx * m + c]).sum::<f64>())
        .collect();
    Ok(pairwise_sum(&dots) / states as f64)
}

/// Influence of every coordinate: the expected squared deviation of the
/// rule's (vector) value from its average over that coordinate alone.
pub fn influences(rule: &VotingRule) -> Result<Vec<f64>> {
    rule.validate()?;
    let k = rule.candidates();
    let n = rule.voters();
    let states = enumeration_limit(rule)?;
    let (m, f) = value_table(rule, states)?;
    let kf = k as f64;
    let mut out = Vec::with_capacity(n);
    let mut stride = states / k;
    for _ in 0..n {
        let block = stride * k;
        let mut acc = 0.0;
        for base in (0..states).step_by(block) {
            for o in 0..stride {
                for c in 0..m {
                    let at = |t: usize| (base + o + t * stride) * m + c;
                    let mean = (0..k).map(|t| f[at(t)]).sum::<f64>() / kf;
                    acc += (0..k).map(|t| (f[at(t)] - mean).powi(2)).sum::<f64>();
                }
            }
        }
        out.push(acc / states as f64);
        stride /= k;
    }
    Ok(out)
}

/// A seeded Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

fn mc_chunks(samples: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut lo = 0;
    while lo < samples {
        let hi = (lo + MC_CHUNK).min(samples);
        out.push((lo, hi));
        lo = hi;
    }
    out
}

fn estimate_from_moments(sum: f64, sumsq: f64, samples: u64, seed: u64) -> McEstimate {
    let nf = samples as f64;
    let value = sum / nf;
    let var = ((sumsq - nf * value * value) / (nf - 1.0)).max(0.0);
    McEstimate {
        value,
        std_error: (var / nf).sqrt(),
        samples,
        seed,
    }
}

/// Monte Carlo noise stability.  Sample i draws from an independent
/// counter-mode stream of one ChaCha generator keyed by `seed`, so the
/// estimate is reproducible bit for bit regardless of thread count, and
/// any prefix of the sample budget is a consistent sub-experiment.
pub fn stability_mc(rule: &VotingRule, rho: f64, samples: u64, seed: u64) -> Result<McEstimate> {
    rule.validate()?;
    let k = rule.candidates();
    let n = rule.voters();
    require_discrete_correlation(k, rho)?;
    if samples < MIN_MC_SAMPLES {
        return Err(Error::InsufficientSamples {
            samples,
            min: MIN_MC_SAMPLES,
        });
    }
    let keep = rho + (1.0 - rho) / k as f64;
    let parts: Vec<(f64, f64)> = mc_chunks(samples)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            let mut x = vec![0u8; n];
            let mut y = vec![0u8; n];
            for i in lo..hi {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i);
                for j in 0..n {
                    x[j] = rng.random_range(0..k) as u8;
                    let u: f64 = rng.random();
                    y[j] = if u < keep {
                        x[j]
                    } else {
                        let t = rng.random_range(0..k - 1) as u8;
                        if t >= x[j] {
                            t + 1
                        } else {
                            t
                        }
                    };
                }
                let v = rule.pair_value(
                    rule.evaluate(&x).expect("validated rule"),
                    rule.evaluate(&y).expect("validated rule"),
                );
                sum += v;
                sumsq += v * v;
            }
            (sum, sumsq)
        })
        .collect();
    let (sum, sumsq) = parts
        .iter()
        .fold((0.0, 0.0), |(a, b), &(s, q)| (a + s, b + q));
    Ok(estimate_from_moments(sum, sumsq, samples, seed))
}

/// Majority stability for a whole ladder of electorate sizes at once,
/// using common random numbers: each sample draws one +-1 path of the
/// largest electorate and scores every requested size on its prefix, so
/// the n-dependence is far smoother than independent runs would give.
/// `electorates` must be odd and strictly increasing, at most 1001.
pub fn majority_convergence_mc(
    rho: f64,
    electorates: &[usize],
    samples: u64,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    if electorates.is_empty() {
        return Err(Error::InvalidRule("no electorate sizes given".to_string()));
    }
    for w in electorates.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidRule(
                "electorate sizes must be strictly increasing".to_string(),
            ));
        }
    }
    for &n in electorates {
        if n % 2 == 0 || n == 0 || n > 1001 {
            return Err(Error::InvalidRule(format!(
                "electorate size {n} is not an odd number in 1..=1001"
            )));
        }
    }
    require_discrete_correlation(2, rho)?;
    if samples < MIN_MC_SAMPLES {
        return Err(Error::InsufficientSamples {
            samples,
            min: MIN_MC_SAMPLES,
        });
    }
    let keep = (1.0 + rho) / 2.0;
    let n_max = *electorates.last().expect("nonempty");
    let cp = electorates.len();
    let parts: Vec<Vec<f64>> = mc_chunks(samples)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut sums = vec![0.0f64; cp];
            for i in lo..hi {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i);
                let mut sx = 0i64;
                let mut sy = 0i64;
                let mut next = 0usize;
                for j in 0..n_max {
                    let xb = rng.random_range(0..2i64) * 2 - 1;
                    let u: f64 = rng.random();
                    let yb = if u < keep { xb } else { -xb };
                    sx += xb;
                    sy += yb;
                    if j + 1 == electorates[next] {
                        sums[next] += if (sx > 0) == (sy > 0) { 1.0 } else { -1.0 };
                        next += 1;
                        if next == cp {
                            break;
                        }
                    }
                }
            }
            sums
        })
        .collect();
    let mut out = Vec::with_capacity(cp);
    for (c, _) in electorates.iter().enumerate() {
        let sum: f64 = parts.iter().map(|p| p[c]).sum();
        // values are +-1: the second moment is exactly 1
        out.push(estimate_from_moments(sum, samples as f64, samples, seed));
    }
    Ok(out)
}

/// One electorate size of a plurality convergence scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub voters: usize,
    pub value: f64,
    /// Zero when the value is exact.
    pub std_error: f64,
    pub monte_carlo: bool,
    /// value minus the large-electorate limit (the balanced three-cone
    /// stability).
    pub gap_to_limit: f64,
}

/// Three-candidate plurality stability for a ladder of electorate sizes:
/// exact enumeration up to 8 voters, seeded Monte Carlo beyond (each size
/// gets its own derived seed).  Reports the gap to the large-electorate
/// limit; the gap need not be one-signed, plurality approaches its limit
/// non-monotonically.
pub fn plurality_convergence(
    rho: f64,
    electorates: &[usize],
    samples: u64,
    seed: u64,
) -> Result<Vec<ConvergenceRow>> {
    let limit = crate::constants::plurality_agreement_limit(rho)?;
    let mut out = Vec::with_capacity(electorates.len());
    for (i, &n) in electorates.iter().enumerate() {
        if n == 0 {
            return Err(Error::InvalidRule("no voters".to_string()));
        }
        let rule = VotingRule::Plurality {
            candidates: 3,
            voters: n,
        };
        let row = if checked_states(3, n) <= MAX_ENUMERATED_STATES {
            let value = stability_exact(&rule, rho)?;
            ConvergenceRow {
                voters: n,
                value,
                std_error: 0.0,
                monte_carlo: false,
                gap_to_limit: value - limit,
            }
        } else {
            let est = stability_mc(&rule, rho, samples, seed.wrapping_add(i as u64))?;
            ConvergenceRow {
                voters: n,
                value: est.value,
                std_error: est.std_error,
                monte_carlo: true,
                gap_to_limit: est.value - limit,
            }
        };
        out.push(row);
    }
    Ok(out)
}
