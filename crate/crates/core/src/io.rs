//! File formats: measurement sets as JSON, exact rationals, scan CSV.
//!
//! A measurement file looks like
//!
//! ```json
//! {"dim": 2, "measurements": [{"effects": [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]], ...]}]}
//! ```
//!
//! where each matrix is a list of rows and each entry an `[re, im]` pair.

use std::fmt::Write as _;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::operator::{CMatrix, MeasurementSet, C64};
use crate::tolerance::ToleranceConfig;
use crate::triple::ScanRecord;

pub const SCAN_CSV_HEADER: &str = "alpha,beta,gamma,sign,xi1,xi2,xi3,xi4,S,classification";

impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = self
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(|z| [z.re, z.im]).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .collect();
        CMatrix::from_rows(rows).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct EffectsFile {
    effects: Vec<CMatrix>,
}

#[derive(Serialize, Deserialize)]
struct MeasurementFile {
    dim: usize,
    measurements: Vec<EffectsFile>,
}

/// Parses and validates a measurement set.
pub fn parse_measurements(text: &str, tol: &ToleranceConfig) -> Result<MeasurementSet> {
    let file: MeasurementFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.measurements.is_empty() {
        return Err(Error::Parse("no measurements".into()));
    }
    for (y, m) in file.measurements.iter().enumerate() {
        if let Some(e) = m.effects.iter().find(|e| e.dim() != file.dim) {
            return Err(Error::ShapeMismatch(format!(
                "measurement {y} has a {0}x{0} effect, declared dim is {1}",
                e.dim(),
                file.dim
            )));
        }
    }
    MeasurementSet::from_effects(
        file.measurements.into_iter().map(|m| m.effects).collect(),
        tol,
    )
}

pub fn measurements_to_json(ms: &MeasurementSet) -> String {
    let file = MeasurementFile {
        dim: ms.dim(),
        measurements: ms
            .povms()
            .iter()
            .map(|p| EffectsFile {
                effects: (0..p.outcomes()).map(|b| p.effect(b).clone()).collect(),
            })
            .collect(),
    };
    serde_json::to_string(&file).expect("measurement sets serialize")
}

/// `{"num": .., "den": .., "float": ..}`.
pub mod rational_json {
    use super::*;
    use crate::Rational;

    #[derive(Serialize, Deserialize)]
    struct Repr {
        num: i64,
        den: i64,
        float: f64,
    }

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        Repr {
            num: *r.numer(),
            den: *r.denom(),
            float: *r.numer() as f64 / *r.denom() as f64,
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let r = Repr::deserialize(d)?;
        if r.den == 0 {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(Rational::new(r.num, r.den))
    }

    pub fn to_value(r: &Rational) -> serde_json::Value {
        serialize(r, serde_json::value::Serializer).expect("rationals serialize")
    }
}

pub fn scan_csv(records: &[ScanRecord]) -> String {
    let mut out = String::with_capacity(96 * (records.len() + 1));
    out.push_str(SCAN_CSV_HEADER);
    out.push('\n');
    for r in records {
        let p = &r.params;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            p.alpha,
            p.beta,
            p.gamma,
            p.sign,
            r.xi.xi[0],
            r.xi.xi[1],
            r.xi.xi[2],
            r.xi.xi[3],
            r.value,
            r.class.as_str()
        );
    }
    out
}
