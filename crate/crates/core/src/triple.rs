//! Triples of projective qubit measurements and the three-bit binary RAC.
//!
//! Up to a common unitary, three rank-one projective qubit measurements have
//! Bloch axes
//!
//! ```text
//! s1 = (0, 0, 1)
//! s2 = (sqrt(1 - a^2), 0, a)
//! s3 = (g sqrt(1 - b^2), +-sqrt(1 - b^2) sqrt(1 - g^2), b)
//! ```
//!
//! with `a = s1.s2`, `b = s1.s3` and `g` fixing `s2.s3`. The RAC value of the
//! triple is `(12 + xi1 + xi2 + xi3 + xi4) / 24`, where the `xi_i` are the
//! lengths of `s1 +- s2 +- s3`. Since `sum xi_i^2 = 12`, the value exceeds the
//! classical `3/4` unless `sum xi_i = 6`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::neldermead::{minimize, NelderMeadSettings};
use crate::operator::{CMatrix, MeasurementSet, Povm};
use crate::tolerance::ToleranceConfig;

/// Parameters `(alpha, beta, gamma)` in `[-1, 1]` and the sign of the `y`
/// component of the third axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TripleParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub sign: i8,
}

impl TripleParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, sign: i8) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::RangeViolation(format!("{name} = {v} outside [-1, 1]")));
            }
        }
        if sign != 1 && sign != -1 {
            return Err(Error::RangeViolation(format!("sign must be +1 or -1, got {sign}")));
        }
        Ok(Self {
            alpha,
            beta,
            gamma,
            sign,
        })
    }

    /// Bloch axes in `(x, y, z)` order.
    pub fn axes(&self) -> [[f64; 3]; 3] {
        let ca = (1.0 - self.alpha * self.alpha).max(0.0).sqrt();
        let cb = (1.0 - self.beta * self.beta).max(0.0).sqrt();
        let cg = (1.0 - self.gamma * self.gamma).max(0.0).sqrt();
        [
            [0.0, 0.0, 1.0],
            [ca, 0.0, self.alpha],
            [self.gamma * cb, f64::from(self.sign) * cb * cg, self.beta],
        ]
    }
}

pub fn build_triple(p: &TripleParams) -> Result<MeasurementSet> {
    let p = TripleParams::new(p.alpha, p.beta, p.gamma, p.sign)?;
    MeasurementSet::new(p.axes().iter().map(|&a| Povm::qubit_projective(a)).collect())
}

/// The triple conjugated by a common unitary.
pub fn build_triple_conjugated(p: &TripleParams, u: &CMatrix, tol: &ToleranceConfig) -> Result<MeasurementSet> {
    build_triple(p)?.conjugate(u, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct XiVector {
    pub xi: [f64; 4],
}

impl XiVector {
    pub fn sum(&self) -> f64 {
        self.xi.iter().sum()
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.xi.iter().map(|v| v * v).sum()
    }
}

/// The four `xi` values, which do not depend on the sign.
pub fn xi(alpha: f64, beta: f64, gamma: f64) -> XiVector {
    let c = 2.0 * gamma * (1.0 - alpha * alpha).max(0.0).sqrt() * (1.0 - beta * beta).max(0.0).sqrt();
    let ab = 2.0 * alpha * beta;
    let root = |v: f64| v.max(0.0).sqrt();
    XiVector {
        xi: [
            root(3.0 + 2.0 * alpha - 2.0 * beta - ab - c),
            root(3.0 - 2.0 * alpha + 2.0 * beta - ab - c),
            root(3.0 - 2.0 * alpha - 2.0 * beta + ab + c),
            root(3.0 + 2.0 * alpha + 2.0 * beta + ab + c),
        ],
    }
}

pub fn xi_and_value(p: &TripleParams) -> (XiVector, f64) {
    let x = xi(p.alpha, p.beta, p.gamma);
    let s = (12.0 + x.sum()) / 24.0;
    (x, s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinSumXiSettings {
    /// Grid points per axis.
    pub resolution: usize,
    /// Number of grid points refined locally.
    pub seeds: usize,
    /// Seeds are kept at least this far apart in the `(alpha, beta)` plane.
    pub separation: f64,
    pub lower: [f64; 3],
    pub upper: [f64; 3],
    pub nelder_mead: NelderMeadSettings,
    /// Refined points within this of the minimum are reported.
    pub value_tol: f64,
    /// Reported points closer than this are merged.
    pub dedup: f64,
}

impl Default for MinSumXiSettings {
    fn default() -> Self {
        Self {
            resolution: 101,
            seeds: 20,
            separation: 0.25,
            lower: [-1.0; 3],
            upper: [1.0; 3],
            nelder_mead: NelderMeadSettings::default(),
            value_tol: 1e-6,
            dedup: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinSumXi {
    pub minimum: f64,
    /// Minimizers as `[alpha, beta, gamma]`.
    pub argmins: Vec<[f64; 3]>,
}

fn grid_value(lo: f64, hi: f64, k: usize, n: usize) -> f64 {
    if lo == -1.0 && hi == 1.0 {
        (2.0 * k as f64 - (n - 1) as f64) / (n - 1) as f64
    } else {
        lo + (hi - lo) * k as f64 / (n - 1) as f64
    }
}

/// Global minimum of `sum xi_i` over a box: grid search, then Nelder-Mead from
/// well-separated grid minima.
pub fn min_sum_xi(settings: &MinSumXiSettings) -> Result<MinSumXi> {
    let n = settings.resolution;
    if n < 21 {
        return Err(Error::RangeViolation(format!("resolution {n} below 21")));
    }
    let axis = |d: usize| -> Vec<f64> {
        (0..n)
            .map(|k| grid_value(settings.lower[d], settings.upper[d], k, n))
            .collect()
    };
    let (xs, ys, zs) = (axis(0), axis(1), axis(2));
    let mut grid: Vec<(f64, [f64; 3])> = (0..n * n * n)
        .into_par_iter()
        .map(|idx| {
            let p = [xs[idx / (n * n)], ys[(idx / n) % n], zs[idx % n]];
            (xi(p[0], p[1], p[2]).sum(), p)
        })
        .collect();
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut seeds: Vec<[f64; 3]> = Vec::new();
    for (_, p) in &grid {
        if seeds.len() == settings.seeds {
            break;
        }
        let far = seeds
            .iter()
            .all(|q| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt() >= settings.separation);
        if far {
            seeds.push(*p);
        }
    }

    let refined: Vec<([f64; 3], f64)> = seeds
        .par_iter()
        .map(|s| {
            let m = minimize(
                |p| xi(p[0], p[1], p[2]).sum(),
                s,
                &settings.lower,
                &settings.upper,
                &settings.nelder_mead,
            );
            ([m.point[0], m.point[1], m.point[2]], m.value)
        })
        .collect();

    let minimum = refined
        .iter()
        .map(|r| r.1)
        .chain(grid.first().map(|g| g.0))
        .fold(f64::INFINITY, f64::min);
    let mut argmins: Vec<[f64; 3]> = Vec::new();
    for (p, v) in &refined {
        if *v > minimum + settings.value_tol {
            continue;
        }
        let fresh = argmins.iter().all(|q| {
            let d: f64 = p.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum();
            d.sqrt() >= settings.dedup
        });
        if fresh {
            argmins.push(*p);
        }
    }
    Ok(MinSumXi { minimum, argmins })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TripleClass {
    CompatibleBoundary,
    Exceptional,
    Witnessed,
    NoWitness,
}

impl TripleClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::CompatibleBoundary => "COMPATIBLE_BOUNDARY",
            Self::Exceptional => "EXCEPTIONAL",
            Self::Witnessed => "WITNESSED",
            Self::NoWitness => "NO_WITNESS",
        }
    }
}

/// Incompatible triples on which the RAC value is exactly `3/4`.
pub const EXCEPTIONAL_POINTS: [[f64; 3]; 4] = [
    [0.5, 0.5, -1.0],
    [-0.5, -0.5, -1.0],
    [0.5, -0.5, 1.0],
    [-0.5, 0.5, 1.0],
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifyTolerance {
    /// Margin above `3/4` required to count as witnessed.
    pub value: f64,
    /// Parameter distance to the compatible boundary or exceptional points.
    pub parameter: f64,
}

impl Default for ClassifyTolerance {
    fn default() -> Self {
        Self {
            value: 1e-6,
            parameter: 1e-3,
        }
    }
}

/// Distance in parameter space to the set `|alpha| = |beta| = 1`.
pub fn distance_to_boundary(p: &TripleParams) -> f64 {
    let da = 1.0 - p.alpha.abs();
    let db = 1.0 - p.beta.abs();
    (da * da + db * db).sqrt()
}

pub fn distance_to_exceptional(p: &TripleParams) -> f64 {
    EXCEPTIONAL_POINTS
        .iter()
        .map(|e| {
            ((p.alpha - e[0]).powi(2) + (p.beta - e[1]).powi(2) + (p.gamma - e[2]).powi(2)).sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn classify(p: &TripleParams, value: f64, tol: &ClassifyTolerance) -> TripleClass {
    if (1.0 - p.alpha.abs()) <= tol.parameter && (1.0 - p.beta.abs()) <= tol.parameter {
        TripleClass::CompatibleBoundary
    } else if distance_to_exceptional(p) <= tol.parameter {
        TripleClass::Exceptional
    } else if value > 0.75 + tol.value {
        TripleClass::Witnessed
    } else {
        TripleClass::NoWitness
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRecord {
    pub params: TripleParams,
    pub xi: XiVector,
    pub value: f64,
    pub class: TripleClass,
}

/// Evaluates and classifies every point of an `N x N x N` grid on
/// `[-1, 1]^3`, for both signs. Records are ordered by
/// `(alpha, beta, gamma)` grid index, then `+1` before `-1`.
pub fn scan_and_classify(resolution: usize, tol: &ClassifyTolerance) -> Result<Vec<ScanRecord>> {
    let n = resolution;
    if n < 21 {
        return Err(Error::RangeViolation(format!("resolution {n} below 21")));
    }
    let v = |k: usize| grid_value(-1.0, 1.0, k, n);
    let records = (0..n * n * n * 2)
        .into_par_iter()
        .map(|idx| {
            let sign = if idx % 2 == 0 { 1 } else { -1 };
            let g = idx / 2;
            let params = TripleParams {
                alpha: v(g / (n * n)),
                beta: v((g / n) % n),
                gamma: v(g % n),
                sign,
            };
            let (xi, value) = xi_and_value(&params);
            ScanRecord {
                params,
                xi,
                value,
                class: classify(&params, value, tol),
            }
        })
        .collect();
    Ok(records)
}
