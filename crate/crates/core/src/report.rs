//! Machine-readable result types: per-check records, suite configuration,
//! per-law summaries, and the aggregate run report with a canonical
//! serialization for byte-for-byte reproducibility.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::GeneratorSpec;

/// Report schema version, bumped on any breaking field change.
pub const REPORT_VERSION: &str = "1.0.0";

/// Acceptance tolerances for scalar and operator checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Scalar laws: relative to `max(|lhs|, |rhs|, 1)`.
    pub scalar: f64,
    /// Operator laws: relative to the operator scale `max(1, ‖·‖_∞)`.
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { scalar: 1e-9, psd: 1e-9 }
    }
}

/// Outcome of one inequality evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub law_id: String,
    /// Free-form parameter map (n, p, q, alpha, t, J, seed, …).
    pub params: BTreeMap<String, String>,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs` for scalar laws, minimum eigenvalue for operator laws.
    pub margin: f64,
    pub pass: bool,
    pub tolerance: f64,
    pub skipped: bool,
    pub notes: String,
}

impl CheckRecord {
    /// Scalar-law record asserting `lhs ≥ rhs` at relative tolerance.
    pub fn scalar(
        law_id: impl Into<String>,
        params: BTreeMap<String, String>,
        lhs: f64,
        rhs: f64,
        tolerances: &Tolerances,
        notes: impl Into<String>,
    ) -> Self {
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        let tolerance = tolerances.scalar * scale;
        let margin = lhs - rhs;
        Self {
            law_id: law_id.into(),
            params,
            lhs,
            rhs,
            margin,
            pass: margin >= -tolerance,
            tolerance,
            skipped: false,
            notes: notes.into(),
        }
    }

    /// Operator-law record: `margin` is the minimum eigenvalue of the
    /// difference and `scale` its natural size (`max(1, ‖·‖_∞)`).
    pub fn operator(
        law_id: impl Into<String>,
        params: BTreeMap<String, String>,
        margin: f64,
        scale: f64,
        tolerances: &Tolerances,
        notes: impl Into<String>,
    ) -> Self {
        let tolerance = tolerances.psd * scale.max(1.0);
        Self {
            law_id: law_id.into(),
            params,
            lhs: margin,
            rhs: 0.0,
            margin,
            pass: margin >= -tolerance,
            tolerance,
            skipped: false,
            notes: notes.into(),
        }
    }

    /// A hypothesis-violation record: counted separately, never a silent
    /// pass; the margin is neutral.
    pub fn skipped(
        law_id: impl Into<String>,
        params: BTreeMap<String, String>,
        notes: impl Into<String>,
    ) -> Self {
        Self {
            law_id: law_id.into(),
            params,
            lhs: 0.0,
            rhs: 0.0,
            margin: 0.0,
            pass: true,
            tolerance: 0.0,
            skipped: true,
            notes: notes.into(),
        }
    }
}

/// Convenience constructor for parameter maps.
pub fn params_from<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Suite configuration; serializable and file-round-trippable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    /// Law identifiers to run (e.g. `Q1`, `A3'`); empty means none.
    pub laws: Vec<String>,
    /// Inclusive qubit-count range.
    pub n_min: usize,
    pub n_max: usize,
    /// Trials per law per qubit count.
    pub trials: usize,
    pub seed: u64,
    pub grid_p: Vec<f64>,
    pub grid_q: Vec<f64>,
    pub grid_alpha: Vec<f64>,
    pub grid_t: Vec<f64>,
    /// Maximum coalition size for the `V_J` family of laws.
    pub k_max: usize,
    pub tolerances: Tolerances,
    /// Forces every quantum trial to one generator family
    /// (`bell`, `random_hermitian`, `random_quantum_boolean`, `low_degree`);
    /// `None` rotates through the random families.
    pub generator: Option<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            laws: Vec::new(),
            n_min: 1,
            n_max: 4,
            trials: 100,
            seed: 42,
            grid_p: vec![1.0, 1.25, 1.5, 1.75, 2.0],
            grid_q: vec![1.0, 1.5, 1.9],
            grid_alpha: vec![0.0, 0.25, 0.5, 1.0],
            grid_t: vec![0.1, 0.5, 1.0, 2.0],
            k_max: 3,
            tolerances: Tolerances::default(),
            generator: None,
        }
    }
}

impl SuiteConfig {
    /// Validates ranges and grids before any computation runs.
    pub fn validate(&self) -> Result<()> {
        if self.n_min == 0 || self.n_min > self.n_max {
            return Err(Error::InvalidConfig(format!(
                "qubit range {}..={} is empty or starts at 0",
                self.n_min, self.n_max
            )));
        }
        if self.n_max > crate::algebra::MAX_QUBITS {
            return Err(Error::InvalidConfig(format!(
                "qubit count {} exceeds the supported maximum {}",
                self.n_max,
                crate::algebra::MAX_QUBITS
            )));
        }
        if self.k_max == 0 {
            return Err(Error::InvalidConfig("k_max must be at least 1".into()));
        }
        for (name, grid, lo, hi) in [
            ("p", &self.grid_p, 1.0, 2.0),
            ("q", &self.grid_q, 1.0, 2.0),
            ("alpha", &self.grid_alpha, 0.0, 1.0),
            ("t", &self.grid_t, 0.0, f64::INFINITY),
        ] {
            if grid.is_empty() {
                return Err(Error::InvalidConfig(format!("empty {name} grid")));
            }
            for &v in grid {
                if !(lo..=hi).contains(&v) {
                    return Err(Error::InvalidConfig(format!(
                        "{name} grid value {v} outside [{lo}, {hi}]"
                    )));
                }
            }
        }
        if !(self.tolerances.scalar > 0.0 && self.tolerances.psd > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if let Some(name) = &self.generator {
            match name.as_str() {
                "bell" => {
                    if self.n_min != 2 || self.n_max != 2 {
                        return Err(Error::InvalidConfig(
                            "the bell generator requires n = 2".into(),
                        ));
                    }
                }
                "random_hermitian" | "random_quantum_boolean" | "low_degree" => {}
                other => {
                    return Err(Error::InvalidConfig(format!("unknown generator {other}")));
                }
            }
        }
        Ok(())
    }
}

/// Replayable pointer to the operator behind a recorded margin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub generator: GeneratorSpec,
    pub params: BTreeMap<String, String>,
    pub margin: f64,
}

/// Aggregate outcome of one law across all trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawSummary {
    pub law_id: String,
    pub checks: usize,
    pub passes: usize,
    pub failures: usize,
    pub skips: usize,
    pub worst_margin: f64,
    pub worst_witness: Option<Witness>,
    /// Worst row per grid key, plus every failing record.
    pub table: Vec<CheckRecord>,
}

/// Full run output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub report_version: String,
    pub config: SuiteConfig,
    pub laws: Vec<LawSummary>,
    pub total_checks: usize,
    pub total_failures: usize,
    pub wall_time_ms: u64,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.total_failures == 0
    }

    /// Deterministic serialization: identical configs yield byte-identical
    /// text regardless of scheduling, so `wall_time_ms` is zeroed.
    pub fn canonical_json(&self) -> Result<String> {
        let mut clone = self.clone();
        clone.wall_time_ms = 0;
        serde_json::to_string_pretty(&clone)
            .map_err(|e| Error::InvalidConfig(format!("report serialization failed: {e}")))
    }

    /// Flat CSV rows (law_id, params, lhs, rhs, margin, pass) for one law.
    pub fn law_csv(summary: &LawSummary) -> String {
        let mut out = String::from("law_id,params,lhs,rhs,margin,pass,skipped,notes\n");
        for rec in &summary.table {
            let params = rec
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(";");
            out.push_str(&format!(
                "{},{},{:.12e},{:.12e},{:.12e},{},{},{}\n",
                rec.law_id,
                params,
                rec.lhs,
                rec.rhs,
                rec.margin,
                rec.pass,
                rec.skipped,
                rec.notes.replace(',', ";"),
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::GeneratorKind;

    #[test]
    fn scalar_record_pass_semantics() {
        let tol = Tolerances::default();
        let ok = CheckRecord::scalar("Q1", BTreeMap::new(), 1.0, 0.5, &tol, "");
        assert!(ok.pass && (ok.margin - 0.5).abs() < 1e-15);
        let borderline = CheckRecord::scalar("Q1", BTreeMap::new(), 1.0, 1.0 + 1e-10, &tol, "");
        assert!(borderline.pass, "within relative tolerance");
        let bad = CheckRecord::scalar("Q1", BTreeMap::new(), 1.0, 1.1, &tol, "");
        assert!(!bad.pass);
    }

    #[test]
    fn operator_record_scales_tolerance() {
        let tol = Tolerances::default();
        let big = CheckRecord::operator("Q4", BTreeMap::new(), -5e-9, 100.0, &tol, "");
        assert!(big.pass, "margin within 1e-9 × scale 100");
        let small = CheckRecord::operator("Q4", BTreeMap::new(), -5e-9, 1.0, &tol, "");
        assert!(!small.pass);
    }

    #[test]
    fn skipped_record_is_flagged() {
        let rec = CheckRecord::skipped("Q9", BTreeMap::new(), "Var = 0");
        assert!(rec.pass && rec.skipped);
    }

    #[test]
    fn config_validation() {
        let mut config = SuiteConfig::default();
        assert!(config.validate().is_ok());
        config.grid_p = vec![2.5];
        assert!(config.validate().is_err());
        config = SuiteConfig { n_min: 3, n_max: 2, ..Default::default() };
        assert!(config.validate().is_err());
        config = SuiteConfig { n_max: 99, ..Default::default() };
        assert!(config.validate().is_err());
    }

    #[test]
    fn config_round_trips_through_json() {
        let config = SuiteConfig { laws: vec!["Q1".into(), "A3'".into()], ..Default::default() };
        let text = serde_json::to_string(&config).unwrap();
        let back: SuiteConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(config, back);
        // Partial files fill remaining fields from defaults.
        let partial: SuiteConfig = serde_json::from_str(r#"{"trials": 7}"#).unwrap();
        assert_eq!(partial.trials, 7);
        assert_eq!(partial.seed, 42);
    }

    #[test]
    fn canonical_json_ignores_wall_time() {
        let make = |ms| RunReport {
            report_version: REPORT_VERSION.into(),
            config: SuiteConfig::default(),
            laws: vec![LawSummary {
                law_id: "Q1".into(),
                checks: 1,
                passes: 1,
                failures: 0,
                skips: 0,
                worst_margin: 0.25,
                worst_witness: Some(Witness {
                    generator: GeneratorSpec::new(GeneratorKind::Bell, 2, 0),
                    params: BTreeMap::new(),
                    margin: 0.25,
                }),
                table: Vec::new(),
            }],
            total_checks: 1,
            total_failures: 0,
            wall_time_ms: ms,
        };
        assert_eq!(
            make(10).canonical_json().unwrap(),
            make(9999).canonical_json().unwrap()
        );
    }

    #[test]
    fn csv_has_expected_columns() {
        let tol = Tolerances::default();
        let summary = LawSummary {
            law_id: "Q1".into(),
            checks: 1,
            passes: 1,
            failures: 0,
            skips: 0,
            worst_margin: 0.5,
            worst_witness: None,
            table: vec![CheckRecord::scalar(
                "Q1",
                params_from([("t", "0.5".into()), ("n", "2".into())]),
                1.0,
                0.5,
                &tol,
                "",
            )],
        };
        let csv = RunReport::law_csv(&summary);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "law_id,params,lhs,rhs,margin,pass,skipped,notes");
        let row = lines.next().unwrap();
        assert!(row.starts_with("Q1,n=2;t=0.5,"));
        assert!(row.contains(",true,"));
    }
}
