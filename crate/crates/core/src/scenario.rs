//! Random access code scenarios, deterministic classical strategies and the
//! exhaustive classical optimizer.
//!
//! Input strings `x = x_1 .. x_n` are indexed in lexicographic order with
//! `x_1` most significant. Dits, messages and outcomes are 0-based.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Rational;

/// Largest number of input strings a scenario may have.
pub const MAX_INPUTS: usize = 10_000_000;
/// Largest number of canonical decodings `brute_force_sc` will enumerate.
pub const MAX_DECODINGS: u128 = 1_000_000;

/// A RAC: `n` input dits with `outcomes[y]` values each, and a message of
/// dimension `dim`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    n: usize,
    outcomes: Vec<usize>,
    dim: usize,
}

impl Scenario {
    pub fn new(outcomes: Vec<usize>, dim: usize) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidScenario("n must be at least 1".into()));
        }
        if let Some(&d) = outcomes.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidScenario(format!(
                "every outcome count must be >= 2, got {d}"
            )));
        }
        if dim < 2 {
            return Err(Error::InvalidScenario(format!("dim must be >= 2, got {dim}")));
        }
        let count = outcomes
            .iter()
            .try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
            .unwrap_or(u128::MAX);
        if count > MAX_INPUTS as u128 {
            return Err(Error::TooLarge {
                count,
                limit: MAX_INPUTS as u128,
            });
        }
        Ok(Self {
            n: outcomes.len(),
            outcomes,
            dim,
        })
    }

    /// Same as [`Scenario::new`] but also checks the stated `n`.
    pub fn with_n(n: usize, outcomes: Vec<usize>, dim: usize) -> Result<Self> {
        if outcomes.len() != n {
            return Err(Error::InvalidScenario(format!(
                "n = {n} but {} outcome counts given",
                outcomes.len()
            )));
        }
        Self::new(outcomes, dim)
    }

    /// `n` inputs with `d_tilde` values each.
    pub fn uniform(n: usize, d_tilde: usize, dim: usize) -> Result<Self> {
        Self::new(vec![d_tilde; n], dim)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn outcomes(&self) -> &[usize] {
        &self.outcomes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn input_count(&self) -> usize {
        self.outcomes.iter().product()
    }

    pub fn min_outcomes(&self) -> usize {
        *self.outcomes.iter().min().unwrap()
    }

    pub fn max_outcomes(&self) -> usize {
        *self.outcomes.iter().max().unwrap()
    }

    /// `n * prod_y d_y`, the denominator of the average success probability.
    pub fn normalizer(&self) -> usize {
        self.n * self.input_count()
    }

    /// The input string with lexicographic index `index`.
    pub fn input(&self, mut index: usize) -> Vec<usize> {
        let mut x = vec![0; self.n];
        for y in (0..self.n).rev() {
            x[y] = index % self.outcomes[y];
            index /= self.outcomes[y];
        }
        x
    }

    pub fn input_index(&self, x: &[usize]) -> usize {
        x.iter()
            .zip(&self.outcomes)
            .fold(0, |acc, (&xi, &d)| acc * d + xi)
    }

    /// All input strings in lexicographic order.
    pub fn inputs(&self) -> Vec<Vec<usize>> {
        (0..self.input_count()).map(|i| self.input(i)).collect()
    }
}

/// Figure of merit over a probability table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Objective {
    /// Average success probability over uniformly random `(x, y)`.
    Average,
    /// Minimum success probability over all `(x, y)`.
    Worst,
}

/// Deterministic encoder/decoder pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    /// Message for each input index.
    pub encode: Vec<usize>,
    /// `decode[y][m]` is the guess for dit `y` on message `m`.
    pub decode: Vec<Vec<usize>>,
}

impl DeterministicStrategy {
    pub fn new(sc: &Scenario, encode: Vec<usize>, decode: Vec<Vec<usize>>) -> Result<Self> {
        let s = Self { encode, decode };
        s.check(sc)?;
        Ok(s)
    }

    fn check(&self, sc: &Scenario) -> Result<()> {
        if self.encode.len() != sc.input_count() {
            return Err(Error::RangeViolation(format!(
                "encoding covers {} inputs, scenario has {}",
                self.encode.len(),
                sc.input_count()
            )));
        }
        if let Some(&m) = self.encode.iter().find(|&&m| m >= sc.dim()) {
            return Err(Error::RangeViolation(format!(
                "message {m} outside [0, {})",
                sc.dim()
            )));
        }
        if self.decode.len() != sc.n() {
            return Err(Error::RangeViolation(format!(
                "{} decoders for {} measurements",
                self.decode.len(),
                sc.n()
            )));
        }
        for (y, dy) in self.decode.iter().enumerate() {
            if dy.len() != sc.dim() {
                return Err(Error::RangeViolation(format!(
                    "decoder {y} defined on {} messages, expected {}",
                    dy.len(),
                    sc.dim()
                )));
            }
            if let Some(&b) = dy.iter().find(|&&b| b >= sc.outcomes()[y]) {
                return Err(Error::RangeViolation(format!(
                    "decoder {y} outputs {b}, outside [0, {})",
                    sc.outcomes()[y]
                )));
            }
        }
        Ok(())
    }

    /// Number of correctly guessed `(x, y)` cells.
    pub fn successes(&self, sc: &Scenario) -> usize {
        let mut count = 0;
        for xi in 0..sc.input_count() {
            let x = sc.input(xi);
            let m = self.encode[xi];
            count += (0..sc.n()).filter(|&y| self.decode[y][m] == x[y]).count();
        }
        count
    }
}

/// Conditional distributions `p(b | x, y)` for every input and measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityTable {
    scenario: Scenario,
    offsets: Vec<usize>,
    stride: usize,
    entries: Vec<f64>,
}

impl ProbabilityTable {
    /// `entries` is laid out as `[x][y][b]`.
    pub fn new(scenario: Scenario, entries: Vec<f64>) -> Result<Self> {
        let (offsets, stride) = layout(&scenario);
        if entries.len() != stride * scenario.input_count() {
            return Err(Error::ShapeMismatch(format!(
                "table has {} entries, expected {}",
                entries.len(),
                stride * scenario.input_count()
            )));
        }
        let t = Self {
            scenario,
            offsets,
            stride,
            entries,
        };
        t.check()?;
        Ok(t)
    }

    fn check(&self) -> Result<()> {
        let sc = &self.scenario;
        for xi in 0..sc.input_count() {
            for y in 0..sc.n() {
                let row = self.row(xi, y);
                if let Some(&p) = row.iter().find(|&&p| !(-1e-10..=1.0 + 1e-10).contains(&p)) {
                    return Err(Error::RangeViolation(format!(
                        "probability {p} outside [0, 1] at x = {xi}, y = {y}"
                    )));
                }
                let total: f64 = row.iter().sum();
                if (total - 1.0).abs() > 1e-10 {
                    return Err(Error::RangeViolation(format!(
                        "row x = {xi}, y = {y} sums to {total}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Distribution over outcomes of measurement `y` on input index `x`.
    pub fn row(&self, x: usize, y: usize) -> &[f64] {
        let start = x * self.stride + self.offsets[y];
        &self.entries[start..start + self.scenario.outcomes()[y]]
    }

    pub fn get(&self, x: usize, y: usize, b: usize) -> f64 {
        self.row(x, y)[b]
    }

    /// `p(b_y = x_y | x, y)` for every cell, in `[x][y]` order.
    pub fn success_cells(&self) -> Vec<f64> {
        let sc = &self.scenario;
        let mut out = Vec::with_capacity(sc.normalizer());
        for xi in 0..sc.input_count() {
            let x = sc.input(xi);
            for (y, &xy) in x.iter().enumerate() {
                out.push(self.get(xi, y, xy));
            }
        }
        out
    }
}

fn layout(sc: &Scenario) -> (Vec<usize>, usize) {
    let mut offsets = Vec::with_capacity(sc.n());
    let mut acc = 0;
    for &d in sc.outcomes() {
        offsets.push(acc);
        acc += d;
    }
    (offsets, acc)
}

/// Point-mass distributions produced by a deterministic strategy.
pub fn evaluate_strategy(s: &DeterministicStrategy, sc: &Scenario) -> Result<ProbabilityTable> {
    s.check(sc)?;
    let (offsets, stride) = layout(sc);
    let mut entries = vec![0.0; stride * sc.input_count()];
    for xi in 0..sc.input_count() {
        let m = s.encode[xi];
        for y in 0..sc.n() {
            entries[xi * stride + offsets[y] + s.decode[y][m]] = 1.0;
        }
    }
    ProbabilityTable::new(sc.clone(), entries)
}

pub fn score(t: &ProbabilityTable, objective: Objective) -> f64 {
    let cells = t.success_cells();
    match objective {
        Objective::Average => cells.iter().sum::<f64>() / cells.len() as f64,
        Objective::Worst => cells.iter().copied().fold(f64::INFINITY, f64::min),
    }
}

/// Best encoding for a fixed decoding: each input goes to the message that
/// decodes the most of its dits correctly, ties to the smallest message.
/// Returns the success count together with the encoding.
pub fn best_encoding(sc: &Scenario, decode: &[Vec<usize>]) -> (usize, Vec<usize>) {
    let mut total = 0;
    let mut encode = Vec::with_capacity(sc.input_count());
    let mut x = vec![0usize; sc.n()];
    for _ in 0..sc.input_count() {
        let (m, hits) = best_message(&x, decode, sc.dim());
        total += hits;
        encode.push(m);
        advance(&mut x, sc.outcomes());
    }
    (total, encode)
}

#[inline]
fn best_message(x: &[usize], decode: &[Vec<usize>], dim: usize) -> (usize, usize) {
    let mut best = (0, 0);
    for m in 0..dim {
        let hits = x
            .iter()
            .zip(decode)
            .filter(|(&xy, dy)| dy[m] == xy)
            .count();
        if hits > best.1 || m == 0 {
            best = (m, hits);
        }
    }
    best
}

fn best_count(sc: &Scenario, decode: &[Vec<usize>]) -> usize {
    let mut total = 0;
    let mut x = vec![0usize; sc.n()];
    for _ in 0..sc.input_count() {
        total += best_message(&x, decode, sc.dim()).1;
        advance(&mut x, sc.outcomes());
    }
    total
}

/// Odometer increment in lexicographic order.
fn advance(x: &mut [usize], radices: &[usize]) {
    for y in (0..x.len()).rev() {
        x[y] += 1;
        if x[y] < radices[y] {
            return;
        }
        x[y] = 0;
    }
}

/// Restricted growth strings of length `len` using at most `max_values` values:
/// one representative per decoding up to relabeling of outcomes.
fn restricted_growth_strings(len: usize, max_values: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, len: usize, max_values: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        let next = prefix.iter().max().map_or(0, |&m| m + 1);
        for v in 0..=next.min(max_values - 1) {
            prefix.push(v);
            rec(prefix, len, max_values, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(len), len, max_values, &mut out);
    out
}

/// Decodings `0..0 1..1 2..2` with non-increasing block sizes: one
/// representative up to relabeling of both messages and outcomes.
fn block_decodings(len: usize, max_parts: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, cap: usize, parts: &mut Vec<usize>, max_parts: usize, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            let dec = parts
                .iter()
                .enumerate()
                .flat_map(|(v, &size)| std::iter::repeat_n(v, size))
                .collect();
            out.push(dec);
            return;
        }
        if parts.len() == max_parts {
            return;
        }
        for size in (1..=cap.min(left)).rev() {
            parts.push(size);
            rec(left - size, size, parts, max_parts, out);
            parts.pop();
        }
    }
    let mut out = Vec::new();
    rec(len, len, &mut Vec::new(), max_parts, &mut out);
    out
}

/// Exact classical value `S_c` by exhaustive search over decodings, each paired
/// with its optimal (greedy) encoding.
///
/// Relabeling messages, or relabeling the values of any single dit, maps
/// strategies to strategies with the same score, so only one decoding per
/// orbit is visited: decoder 0 in block form and every other decoder as a
/// restricted growth string. Among optimal decodings the first in
/// enumeration order is returned.
pub fn brute_force_sc(sc: &Scenario) -> Result<(Rational, DeterministicStrategy)> {
    let dim = sc.dim();
    let candidates: Vec<Vec<Vec<usize>>> = sc
        .outcomes()
        .iter()
        .enumerate()
        .map(|(y, &d)| {
            if y == 0 {
                block_decodings(dim, d)
            } else {
                restricted_growth_strings(dim, d)
            }
        })
        .collect();
    let count = candidates
        .iter()
        .try_fold(1u128, |acc, c| acc.checked_mul(c.len() as u128))
        .unwrap_or(u128::MAX);
    if count > MAX_DECODINGS {
        return Err(Error::TooLarge {
            count,
            limit: MAX_DECODINGS,
        });
    }
    let decoding_at = |mut idx: usize| -> Vec<Vec<usize>> {
        let mut dec = vec![Vec::new(); sc.n()];
        for y in (0..sc.n()).rev() {
            let len = candidates[y].len();
            dec[y] = candidates[y][idx % len].clone();
            idx /= len;
        }
        dec
    };
    let (best_hits, best_idx) = (0..count as usize)
        .into_par_iter()
        .map(|idx| (best_count(sc, &decoding_at(idx)), idx))
        .reduce(
            || (0, usize::MAX),
            |a, b| {
                if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
                    a
                } else {
                    b
                }
            },
        );
    let decode = decoding_at(best_idx);
    let (hits, encode) = best_encoding(sc, &decode);
    debug_assert_eq!(hits, best_hits);
    let value = Rational::new(hits as i64, sc.normalizer() as i64);
    Ok((value, DeterministicStrategy { encode, decode }))
}

/// Value of the best strategy that uses identity decoding `decode(y, m) = m`.
/// Requires `dim <= min_y d_y`.
pub fn identity_decoding_value(sc: &Scenario) -> Result<Rational> {
    if sc.dim() > sc.min_outcomes() {
        return Err(Error::NotApplicable {
            dim: sc.dim(),
            min_outcomes: sc.min_outcomes(),
        });
    }
    let decode: Vec<Vec<usize>> = (0..sc.n()).map(|_| (0..sc.dim()).collect()).collect();
    let hits = best_count(sc, &decode);
    Ok(Rational::new(hits as i64, sc.normalizer() as i64))
}
