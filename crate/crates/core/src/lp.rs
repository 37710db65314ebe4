//! Exact zero-sum game solver and the worst-case classical value with shared
//! randomness.
//!
//! The game value is found with a two-phase revised simplex over exact
//! rationals. Pricing uses integers scaled by the common denominator of the
//! simplex multipliers, so every pivot decision is exact.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::{DeterministicStrategy, Scenario};
use crate::Rational;

/// Largest number of joint deterministic strategies `lp_worst_shared` accepts.
pub const MAX_STRATEGIES: u128 = 20_000;

/// Optimal mixed strategies of a finite two-player zero-sum game.
#[derive(Clone, Debug)]
pub struct GameSolution {
    pub value: BigRational,
    /// Mixture over rows (the maximizer).
    pub row_strategy: Vec<BigRational>,
    /// Mixture over columns (the minimizer).
    pub column_strategy: Vec<BigRational>,
    pub pivots: usize,
}

struct Simplex<'a> {
    // payoff shifted to be >= 1, one row per structural variable
    columns: &'a [Vec<i64>],
    m: usize,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    binv: Vec<Vec<BigRational>>,
    xb: Vec<BigRational>,
    pivots: usize,
}

#[derive(Clone, Copy, PartialEq)]
enum Phase {
    One,
    Two,
}

impl<'a> Simplex<'a> {
    fn new(columns: &'a [Vec<i64>], m: usize) -> Self {
        let n = columns.len();
        let total = n + 2 * m;
        let mut in_basis = vec![false; total];
        let basis: Vec<usize> = (0..m).map(|i| n + m + i).collect();
        for &b in &basis {
            in_basis[b] = true;
        }
        let binv = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                    .collect()
            })
            .collect();
        Self {
            columns,
            m,
            basis,
            in_basis,
            binv,
            xb: vec![BigRational::one(); m],
            pivots: 0,
        }
    }

    fn n(&self) -> usize {
        self.columns.len()
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n() + self.m
    }

    fn cost(&self, j: usize, phase: Phase) -> i64 {
        match phase {
            Phase::One => i64::from(self.is_artificial(j)),
            Phase::Two => i64::from(j < self.n()),
        }
    }

    /// Entry `c` of column `j` of the constraint matrix.
    fn entry(&self, j: usize, c: usize) -> i64 {
        let n = self.n();
        if j < n {
            self.columns[j][c]
        } else if j < n + self.m {
            -i64::from(j - n == c)
        } else {
            i64::from(j - n - self.m == c)
        }
    }

    fn multipliers(&self, phase: Phase) -> Vec<BigRational> {
        let mut y = vec![BigRational::zero(); self.m];
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = self.cost(b, phase);
            if cb == 0 {
                continue;
            }
            for c in 0..self.m {
                y[c] += &self.binv[i][c] * BigInt::from(cb);
            }
        }
        y
    }

    /// Scaled reduced costs `D * (c_j - y.a_j)` for every column, with `D > 0`.
    fn scaled_reduced_costs(&self, y: &[BigRational], phase: Phase) -> Vec<BigInt> {
        let denom = y
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let scaled: Vec<BigInt> = y
            .iter()
            .map(|v| v.numer() * (&denom / v.denom()))
            .collect();
        let total = self.n() + 2 * self.m;
        let small: Option<(Vec<i128>, i128)> = (|| {
            let d = denom.to_i128()?;
            let ys = scaled
                .iter()
                .map(|v| v.to_i128())
                .collect::<Option<Vec<_>>>()?;
            // entries are bounded by the payoff range; keep well clear of overflow
            let bound: i128 = ys.iter().map(|v| v.abs()).sum::<i128>().checked_mul(1 << 20)?;
            bound.checked_add(d)?;
            Some((ys, d))
        })();
        let mut out = Vec::with_capacity(total);
        if let Some((ys, d)) = small {
            for j in 0..total {
                let mut acc = i128::from(self.cost(j, phase)) * d;
                for (c, yc) in ys.iter().enumerate() {
                    let a = self.entry(j, c);
                    if a != 0 {
                        acc -= yc * i128::from(a);
                    }
                }
                out.push(BigInt::from(acc));
            }
        } else {
            for j in 0..total {
                let mut acc = BigInt::from(self.cost(j, phase)) * &denom;
                for (c, yc) in scaled.iter().enumerate() {
                    let a = self.entry(j, c);
                    if a != 0 {
                        acc -= yc * a;
                    }
                }
                out.push(acc);
            }
        }
        out
    }

    fn pivot(&mut self, r: usize, j: usize, col: &[BigRational]) {
        let piv = col[r].clone();
        for v in self.binv[r].iter_mut() {
            *v /= &piv;
        }
        self.xb[r] /= &piv;
        let row_r = self.binv[r].clone();
        let x_r = self.xb[r].clone();
        for i in 0..self.m {
            if i == r || col[i].is_zero() {
                continue;
            }
            let f = &col[i];
            for (v, w) in self.binv[i].iter_mut().zip(&row_r) {
                *v -= f * w;
            }
            self.xb[i] -= f * &x_r;
        }
        self.in_basis[self.basis[r]] = false;
        self.in_basis[j] = true;
        self.basis[r] = j;
        self.pivots += 1;
    }

    fn entering_column(&self, j: usize) -> Vec<BigRational> {
        (0..self.m)
            .map(|i| {
                let mut acc = BigRational::zero();
                for c in 0..self.m {
                    let a = self.entry(j, c);
                    if a != 0 && !self.binv[i][c].is_zero() {
                        acc += &self.binv[i][c] * BigInt::from(a);
                    }
                }
                acc
            })
            .collect()
    }

    fn run(&mut self, phase: Phase) -> Result<()> {
        let mut degenerate_streak = 0usize;
        loop {
            let y = self.multipliers(phase);
            let d = self.scaled_reduced_costs(&y, phase);
            let bland = degenerate_streak > 50;
            let mut entering: Option<usize> = None;
            for (j, dj) in d.iter().enumerate() {
                if self.in_basis[j] || (phase == Phase::Two && self.is_artificial(j)) {
                    continue;
                }
                if dj.is_negative() {
                    match entering {
                        None => entering = Some(j),
                        Some(k) if !bland && dj < &d[k] => entering = Some(j),
                        _ => {}
                    }
                    if bland {
                        break;
                    }
                }
            }
            let Some(j) = entering else {
                return Ok(());
            };
            let col = self.entering_column(j);
            let mut leave: Option<(usize, BigRational)> = None;
            for i in 0..self.m {
                if !col[i].is_positive() {
                    continue;
                }
                let ratio = &self.xb[i] / &col[i];
                let better = match &leave {
                    None => true,
                    Some((k, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leave else {
                return Err(Error::RangeViolation("linear program is unbounded".into()));
            };
            if ratio.is_zero() {
                degenerate_streak += 1;
            } else {
                degenerate_streak = 0;
            }
            self.pivot(r, j, &col);
        }
    }

    /// Pivots zero-level artificials out of the basis where possible.
    fn expel_artificials(&mut self) {
        for r in 0..self.m {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let limit = self.n() + self.m;
            let candidate = (0..limit).find(|&j| {
                !self.in_basis[j]
                    && (0..self.m).any(|c| {
                        let a = self.entry(j, c);
                        a != 0 && !self.binv[r][c].is_zero()
                    })
                    && !self.row_times_column(r, j).is_zero()
            });
            if let Some(j) = candidate {
                let col = self.entering_column(j);
                self.pivot(r, j, &col);
            }
        }
    }

    fn row_times_column(&self, r: usize, j: usize) -> BigRational {
        let mut acc = BigRational::zero();
        for c in 0..self.m {
            let a = self.entry(j, c);
            if a != 0 {
                acc += &self.binv[r][c] * BigInt::from(a);
            }
        }
        acc
    }
}

/// Solves `max_p min_c sum_s p_s payoff[s][c]` exactly.
///
/// The row player's problem is posed as `min 1.u` subject to
/// `payoff'^T u >= 1, u >= 0` on a payoff shifted to be positive; the game
/// value is then `1 / sum(u)` minus the shift and the column player's
/// strategy comes from the simplex multipliers.
pub fn solve_matrix_game(payoff: &[Vec<i64>]) -> Result<GameSolution> {
    let rows = payoff.len();
    let m = payoff.first().map_or(0, Vec::len);
    if rows == 0 || m == 0 || payoff.iter().any(|r| r.len() != m) {
        return Err(Error::ShapeMismatch("payoff matrix must be non-empty and rectangular".into()));
    }
    let min = payoff.iter().flatten().copied().min().unwrap();
    let shift = 1 - min;
    let columns: Vec<Vec<i64>> = payoff
        .iter()
        .map(|r| r.iter().map(|&v| v + shift).collect())
        .collect();
    let mut lp = Simplex::new(&columns, m);
    lp.run(Phase::One)?;
    let infeasibility: BigRational = lp
        .basis
        .iter()
        .zip(&lp.xb)
        .filter(|(&b, _)| lp.is_artificial(b))
        .map(|(_, x)| x.clone())
        .sum();
    if !infeasibility.is_zero() {
        return Err(Error::RangeViolation("game linear program is infeasible".into()));
    }
    lp.expel_artificials();
    lp.run(Phase::Two)?;

    let mut u = vec![BigRational::zero(); rows];
    for (&b, x) in lp.basis.iter().zip(&lp.xb) {
        if b < rows {
            u[b] = x.clone();
        }
    }
    let z: BigRational = u.iter().sum();
    let y = lp.multipliers(Phase::Two);
    let value = z.recip() - BigRational::from_integer(BigInt::from(shift));
    let row_strategy = u.iter().map(|v| v / &z).collect();
    let column_strategy = y.iter().map(|v| v / &z).collect();
    Ok(GameSolution {
        value,
        row_strategy,
        column_strategy,
        pivots: lp.pivots,
    })
}

/// Best worst-case success probability of classical strategies assisted by
/// shared randomness, i.e. mixtures of deterministic strategies.
#[derive(Clone, Debug, Serialize)]
pub struct MixedStrategyValue {
    pub value: f64,
    #[serde(with = "crate::io::rational_json")]
    pub exact: Rational,
    /// Strategies with nonzero weight.
    pub weights: Vec<(DeterministicStrategy, f64)>,
    /// Adversarial distribution over `(x, y)` cells certifying optimality.
    pub cell_weights: Vec<f64>,
    /// Max violation of the value constraints and of normalization.
    pub residual: f64,
}

fn joint_strategy_count(sc: &Scenario) -> u128 {
    let inputs = sc.input_count() as u32;
    let encodings = (sc.dim() as u128).checked_pow(inputs);
    let decodings = sc
        .outcomes()
        .iter()
        .try_fold(1u128, |acc, &d| acc.checked_mul((d as u128).checked_pow(sc.dim() as u32)?));
    match (encodings, decodings) {
        (Some(e), Some(d)) => e.saturating_mul(d),
        _ => u128::MAX,
    }
}

/// Enumerates every deterministic strategy and solves the resulting game
/// between the strategy mixture and an adversary choosing `(x, y)`.
pub fn lp_worst_shared(sc: &Scenario) -> Result<MixedStrategyValue> {
    let count = joint_strategy_count(sc);
    if count > MAX_STRATEGIES {
        return Err(Error::TooLarge {
            count,
            limit: MAX_STRATEGIES,
        });
    }
    let inputs = sc.input_count();
    let dim = sc.dim();
    let n = sc.n();
    let xs = sc.inputs();
    let decoders: Vec<Vec<Vec<usize>>> = sc
        .outcomes()
        .iter()
        .map(|&d| all_functions(dim, d))
        .collect();
    let decode_count: usize = decoders.iter().map(Vec::len).product();
    let encodings = all_functions(inputs, dim);

    // Success patterns as bitmasks over cells. Duplicate and dominated
    // patterns never help the maximizer, so only maximal ones enter the game.
    let mut first_with: HashMap<u128, DeterministicStrategy> = HashMap::new();
    for encode in &encodings {
        for mut k in 0..decode_count {
            let mut decode = vec![Vec::new(); n];
            for y in (0..n).rev() {
                let len = decoders[y].len();
                decode[y] = decoders[y][k % len].clone();
                k /= len;
            }
            let mut mask = 0u128;
            for (xi, x) in xs.iter().enumerate() {
                for y in 0..n {
                    if decode[y][encode[xi]] == x[y] {
                        mask |= 1 << (xi * n + y);
                    }
                }
            }
            first_with.entry(mask).or_insert_with(|| DeterministicStrategy {
                encode: encode.clone(),
                decode,
            });
        }
    }
    let mut masks: Vec<u128> = first_with.keys().copied().collect();
    masks.sort_by_key(|m| (std::cmp::Reverse(m.count_ones()), *m));
    let mut maximal: Vec<u128> = Vec::new();
    for m in masks {
        if maximal.iter().all(|k| m & !k != 0) {
            maximal.push(m);
        }
    }
    let cells = inputs * n;
    let payoff: Vec<Vec<i64>> = maximal
        .iter()
        .map(|m| (0..cells).map(|c| ((m >> c) & 1) as i64).collect())
        .collect();
    let strategies: Vec<DeterministicStrategy> = maximal
        .iter()
        .map(|m| first_with.remove(m).expect("mask was recorded"))
        .collect();
    let game = solve_matrix_game(&payoff)?;
    let exact = to_rational(&game.value)?;
    let weights_f: Vec<f64> = game
        .row_strategy
        .iter()
        .map(|w| w.to_f64().unwrap_or(f64::NAN))
        .collect();
    let value = exact.to_f64_lossy();

    let mut residual = (weights_f.iter().sum::<f64>() - 1.0).abs();
    for c in 0..cells {
        let achieved: f64 = payoff
            .iter()
            .zip(&weights_f)
            .map(|(row, w)| row[c] as f64 * w)
            .sum();
        residual = residual.max(value - achieved);
    }
    let weights = strategies
        .into_iter()
        .zip(weights_f)
        .filter(|(_, w)| *w > 0.0)
        .collect();
    let cell_weights = game
        .column_strategy
        .iter()
        .map(|w| w.to_f64().unwrap_or(f64::NAN))
        .collect();
    Ok(MixedStrategyValue {
        value,
        exact,
        weights,
        cell_weights,
        residual: residual.max(0.0),
    })
}

/// All functions `[len] -> [range]` in lexicographic order.
fn all_functions(len: usize, range: usize) -> Vec<Vec<usize>> {
    let total = range.pow(len as u32);
    (0..total)
        .map(|mut k| {
            let mut f = vec![0; len];
            for slot in f.iter_mut().rev() {
                *slot = k % range;
                k /= range;
            }
            f
        })
        .collect()
}

pub(crate) fn to_rational(v: &BigRational) -> Result<Rational> {
    match (v.numer().to_i64(), v.denom().to_i64()) {
        (Some(n), Some(d)) => Ok(Rational::new(n, d)),
        _ => Err(Error::Overflow(format!("{v} does not fit in 64-bit rational"))),
    }
}

pub(crate) trait RationalExt {
    fn to_f64_lossy(&self) -> f64;
}

impl RationalExt for Rational {
    fn to_f64_lossy(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}
