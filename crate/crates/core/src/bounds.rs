//! Closed-form bounds on the classical value `S_c`.
//!
//! When the message dimension does not exceed any input size, the optimal
//! classical strategy decodes the message as the dit value itself and encodes
//! the most frequent value of `x`. Counting input strings by how often each
//! value occurs gives `S_c` exactly.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::Scenario;
use crate::Rational;

/// `k[i - 1]` counts the inputs whose alphabet contains the value `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountingProfile {
    pub k: Vec<usize>,
    pub d_max: usize,
}

pub fn k_profile(sc: &Scenario) -> CountingProfile {
    let d_max = sc.max_outcomes();
    let k = (1..=d_max)
        .map(|i| sc.outcomes().iter().filter(|&&d| d >= i).count())
        .collect();
    CountingProfile { k, d_max }
}

/// One occupancy pattern: `occupancy[i - 1]` dits of `x` take value `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolutionTerm {
    pub occupancy: Vec<usize>,
    /// Number of input strings with this occupancy pattern.
    pub multiplicity: u128,
    /// Dits recovered by encoding the most frequent value among the first
    /// `dim` values.
    pub payoff: usize,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Enumerates occupancy patterns from the largest value downwards. Values
/// above `i` already claimed `taken` of the `k_i` positions able to hold `i`.
pub fn solution_terms(sc: &Scenario) -> Vec<SolutionTerm> {
    let profile = k_profile(sc);
    let dim = sc.dim();
    let mut out = Vec::new();
    let mut occupancy = vec![0usize; profile.d_max];

    fn rec(
        i: usize,
        remaining: usize,
        taken: usize,
        multiplicity: u128,
        k: &[usize],
        dim: usize,
        occupancy: &mut Vec<usize>,
        out: &mut Vec<SolutionTerm>,
    ) {
        if i == 0 {
            if remaining == 0 {
                let payoff = occupancy[..dim.min(occupancy.len())]
                    .iter()
                    .copied()
                    .max()
                    .unwrap_or(0);
                out.push(SolutionTerm {
                    occupancy: occupancy.clone(),
                    multiplicity,
                    payoff,
                });
            }
            return;
        }
        let alpha = k[i - 1] - taken;
        let upper = if i == 1 { remaining } else { remaining.min(alpha) };
        let lower = if i == 1 { remaining } else { 0 };
        for ni in (lower..=upper).rev() {
            let c = binomial(alpha, ni);
            if c == 0 {
                continue;
            }
            occupancy[i - 1] = ni;
            rec(i - 1, remaining - ni, taken + ni, multiplicity * c, k, dim, occupancy, out);
        }
        occupancy[i - 1] = 0;
    }

    rec(
        profile.d_max,
        sc.n(),
        0,
        1,
        &profile.k,
        dim,
        &mut occupancy,
        &mut out,
    );
    out
}

/// Exact `S_c` for scenarios with `dim <= min_y d_y`.
pub fn exact_sc(sc: &Scenario) -> Result<Rational> {
    if sc.dim() > sc.min_outcomes() {
        return Err(Error::NotApplicable {
            dim: sc.dim(),
            min_outcomes: sc.min_outcomes(),
        });
    }
    let total: u128 = solution_terms(sc)
        .iter()
        .map(|t| t.multiplicity * t.payoff as u128)
        .sum();
    let numer = i64::try_from(total).map_err(|_| Error::Overflow("S_c numerator".into()))?;
    Ok(Rational::new(numer, sc.normalizer() as i64))
}

/// Closed forms of `S_c` for two and three inputs of equal size `d_tilde`.
pub fn closed_form_sc(n: usize, d_tilde: usize, dim: usize) -> Result<Rational> {
    if dim > d_tilde {
        return Err(Error::NotApplicable {
            dim,
            min_outcomes: d_tilde,
        });
    }
    let d = dim as i64;
    let t = d_tilde as i64;
    match n {
        2 => Ok(Rational::new(d + 2 * d * t - d * d, 2 * t * t)),
        3 => Ok(Rational::new(
            d * (d * d - 1 + 3 * t * (t + 1 - d)),
            3 * t * t * t,
        )),
        other => Err(Error::UnsupportedN(other)),
    }
}

/// Upper bound on `S_c` valid for every dimension:
/// `(1/n) min{1 + sum_{i<j} d/(d_i d_j), n - 1 + d/prod d_y}`.
pub fn upper_bound_sc(sc: &Scenario) -> f64 {
    let n = sc.n() as f64;
    let d = sc.dim() as f64;
    let o = sc.outcomes();
    let mut pairs = 0.0;
    for i in 0..o.len() {
        for j in i + 1..o.len() {
            pairs += d / (o[i] as f64 * o[j] as f64);
        }
    }
    let product: f64 = o.iter().map(|&v| v as f64).product();
    (1.0 + pairs).min(n - 1.0 + d / product) / n
}

/// The upper bound when every input has `d_tilde` values.
pub fn upper_bound_equal(n: usize, d_tilde: usize, dim: usize) -> f64 {
    let nf = n as f64;
    let d = dim as f64;
    let t = d_tilde as f64;
    (1.0 + nf * (nf - 1.0) * d / (2.0 * t * t)).min(nf - 1.0 + d / t.powi(n as i32)) / nf
}
