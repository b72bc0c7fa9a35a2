//! Deterministic experiment reports: CSV rows plus a JSON summary.
//!
//! Row order, cell formats, and summary key order are all fixed so that a
//! given configuration reproduces its output byte for byte.

use crate::places::Place;
use crate::poly::Poly;
use crate::rat::Rat;
use num::rational::BigRational;
use serde_json::{json, Value};

/// One ratio cell: an exact rational, or a flag for rows excluded from the
/// ratio statistics (point equal to alpha, or the all-zero tuple).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RatioCell {
    Value(BigRational),
    Exceptional,
}

#[derive(Clone, Debug)]
pub struct ExperimentRow {
    pub tuple: Vec<Poly>,
    pub point: Rat,
    pub s_integral: bool,
    /// Aligned with the report's probe places.
    pub ratios: Vec<RatioCell>,
}

impl ExperimentRow {
    /// max over the tuple of deg P_i, with -1 when every entry is zero.
    pub fn max_deg(&self) -> i64 {
        self.tuple.iter().map(|p| p.degree_i64()).max().unwrap_or(-1)
    }

    pub(crate) fn sort_key(&self) -> (i64, Vec<u128>) {
        (self.max_deg(), self.tuple.iter().map(|p| p.enum_index()).collect())
    }
}

#[derive(Clone, Debug, Default)]
pub struct RatioStats {
    pub running_min: Option<BigRational>,
    pub running_max: Option<BigRational>,
    pub rows_used: u64,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub probe_places: Vec<Place>,
    /// Sorted by max tuple degree, then lexicographic tuple order.
    pub rows: Vec<ExperimentRow>,
    pub caps: Vec<u64>,
    /// Distinct S-integral point counts per cap (same order as `caps`).
    pub distinct_integral_points: Vec<u64>,
    /// S-integral row counts per cap.
    pub integral_rows: Vec<u64>,
    /// Whether the distinct count is equal on the final two caps.
    pub stabilized: bool,
    /// Rows whose point value coincides with an earlier row's.
    pub collisions: u64,
    pub exceptional_rows: u64,
    pub warnings: Vec<String>,
    /// Per probe place, over non-exceptional rows in row order.
    pub ratio_stats: Vec<RatioStats>,
}

pub(crate) fn rational_str(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tuple,point_num_deg,point_den_deg,s_integral");
        for v in &self.probe_places {
            out.push_str(&format!(",ratio@{v}"));
        }
        out.push('\n');
        for row in &self.rows {
            let tuple = row
                .tuple
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(";");
            out.push_str(&format!(
                "{},{},{},{}",
                tuple,
                row.point.num().degree_i64(),
                row.point.den().degree_i64(),
                row.s_integral
            ));
            for cell in &row.ratios {
                match cell {
                    RatioCell::Value(r) => out.push_str(&format!(",{}", rational_str(r))),
                    RatioCell::Exceptional => out.push_str(",exc"),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn summary_json(&self, command: &str) -> Value {
        let pairs = |counts: &[u64]| -> Value {
            Value::Array(
                self.caps
                    .iter()
                    .zip(counts)
                    .map(|(cap, n)| json!([cap, n]))
                    .collect(),
            )
        };
        let ratio_stats: Vec<Value> = self
            .probe_places
            .iter()
            .zip(&self.ratio_stats)
            .map(|(v, s)| {
                json!({
                    "place": v.to_string(),
                    "running_min": s.running_min.as_ref().map(|r| rational_str(r)),
                    "running_max": s.running_max.as_ref().map(|r| rational_str(r)),
                    "rows_used": s.rows_used,
                })
            })
            .collect();
        json!({
            "command": command,
            "rows": self.rows.len(),
            "caps": self.caps,
            "distinct_integral_points": pairs(&self.distinct_integral_points),
            "integral_rows": pairs(&self.integral_rows),
            "stabilized": self.stabilized,
            "collisions": self.collisions,
            "exceptional_rows": self.exceptional_rows,
            "warnings": self.warnings,
            "ratio_stats": ratio_stats,
        })
    }

    pub fn summary_json_string(&self, command: &str) -> String {
        serde_json::to_string_pretty(&self.summary_json(command)).expect("serializable summary")
    }
}
