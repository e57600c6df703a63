//! Structured, replayable outcomes of verification campaigns.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraElement;
use crate::forms::MultiForm;
use crate::module::{AModuleMap, CLinearMap, ModuleMap, ModuleVector, ToleranceConfig};
use crate::orthogonality::Relation;

/// A module map in serializable form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapFixture {
    ALinear(AModuleMap),
    Dense(CLinearMap),
}

impl MapFixture {
    pub fn as_map(&self) -> &dyn ModuleMap {
        match self {
            MapFixture::ALinear(m) => m,
            MapFixture::Dense(m) => m,
        }
    }
}

/// Everything needed to re-run one check from serialized inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum ReplayCase {
    /// Verdicts that should coincide but did not.
    VerdictMismatch {
        x: ModuleVector,
        y: ModuleVector,
        relations: Vec<Relation>,
    },
    /// A single verdict expected to come out `expected`.
    Verdict {
        relation: Relation,
        x: ModuleVector,
        y: ModuleVector,
        expected: bool,
    },
    /// A point `a` where a norm or modulus inequality between `x` and `y` is violated.
    ConditionPoint {
        relation: Relation,
        x: ModuleVector,
        y: ModuleVector,
        a: AlgebraElement,
    },
    /// `x ⊥_B y` with `‖x + y‖ < ‖y‖`.
    BjAsymmetry { x: ModuleVector, y: ModuleVector },
    /// A tuple where `F ≠ cE`.
    FormResidual {
        e: MultiForm,
        f: MultiForm,
        c: AlgebraElement,
        args: Vec<ModuleVector>,
    },
    /// A tuple in the kernel of `E` on which `F` does not vanish.
    KernelViolation {
        e: MultiForm,
        f: MultiForm,
        args: Vec<ModuleVector>,
    },
    /// A tuple with `E` invertible and `F` not.
    InvertibilityLoss {
        e: MultiForm,
        f: MultiForm,
        args: Vec<ModuleVector>,
    },
    /// A vector with `|Tx| ≠ γ|x|`.
    ModulusHypothesis {
        map: MapFixture,
        gamma: f64,
        x: ModuleVector,
    },
    /// A pair with `⟨Tx, Ty⟩ ≠ γ²⟨x, y⟩` along the polarization path.
    PolarizationMismatch {
        map: MapFixture,
        gamma: f64,
        x: ModuleVector,
        y: ModuleVector,
    },
    /// A comparable pair `|x| ≤ |y|` with `|Tx| ≰ |Ty|`.
    ModulusMonotonicity {
        map: AModuleMap,
        x: ModuleVector,
        y: ModuleVector,
    },
    /// A pair on which the minimizing and state-based Birkhoff–James procedures disagree, or
    /// where the reconstructed state misses its bounds.
    BjImplementations { x: ModuleVector, y: ModuleVector },
    /// One of the six classical characterizations of `⟨x,y⟩ = 0`, either violated at the given
    /// point for an orthogonal pair or never violated for a non-orthogonal one.
    ListItem {
        item: usize,
        x: ModuleVector,
        y: ModuleVector,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<Complex64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<AlgebraElement>,
    },
    /// `F = cE` by construction but the recovered constant is off.
    FactorizationRecovery {
        e: MultiForm,
        f: MultiForm,
        c: AlgebraElement,
    },
    /// Sampled preservation of `⊥` by `(T, S)` disagrees with the factorization verdict.
    PreservationMismatch {
        t: AModuleMap,
        s: AModuleMap,
        seed: u64,
    },
    /// Outcome that cannot be reduced to a single input, such as an exhausted search budget.
    Summary { description: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub trial: usize,
    pub label: String,
    pub margin: f64,
    pub case: ReplayCase,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub label: String,
    pub case: ReplayCase,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite_id: String,
    /// The statement being checked, in words.
    pub statement: String,
    pub shape: Vec<usize>,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub trials: usize,
    pub passed: bool,
    pub failures: Vec<FailureRecord>,
    pub witnesses: Vec<WitnessRecord>,
    pub metrics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub elapsed_seconds: f64,
    pub seed: u64,
    pub config: ToleranceConfig,
}

impl VerificationReport {
    pub fn new(
        suite_id: &str,
        statement: &str,
        shape: &[usize],
        k: usize,
        seed: u64,
        config: ToleranceConfig,
    ) -> Self {
        Self {
            suite_id: suite_id.to_string(),
            statement: statement.to_string(),
            shape: shape.to_vec(),
            k,
            n: None,
            trials: 0,
            passed: true,
            failures: Vec::new(),
            witnesses: Vec::new(),
            metrics: BTreeMap::new(),
            notes: Vec::new(),
            elapsed_seconds: 0.0,
            seed,
            config,
        }
    }

    pub fn fail(&mut self, trial: usize, label: impl Into<String>, margin: f64, case: ReplayCase) {
        self.failures.push(FailureRecord {
            trial,
            label: label.into(),
            margin: finite(margin),
            case,
        });
        self.passed = false;
    }

    pub fn witness(&mut self, label: impl Into<String>, case: ReplayCase) {
        self.witnesses.push(WitnessRecord {
            label: label.into(),
            case,
        });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn set_metric(&mut self, key: &str, value: f64) {
        self.metrics.insert(key.to_string(), finite(value));
    }

    /// Keep the running maximum of a metric.
    pub fn max_metric(&mut self, key: &str, value: f64) {
        let v = finite(value);
        let entry = self.metrics.entry(key.to_string()).or_insert(v);
        if v > *entry {
            *entry = v;
        }
    }

    /// Keep the running minimum of a metric.
    pub fn min_metric(&mut self, key: &str, value: f64) {
        let v = finite(value);
        let entry = self.metrics.entry(key.to_string()).or_insert(v);
        if v < *entry {
            *entry = v;
        }
    }

    pub fn count(&mut self, key: &str) {
        *self.metrics.entry(key.to_string()).or_insert(0.0) += 1.0;
    }

    pub fn metric(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }

    /// Absorb another report's failures, witnesses, notes and prefixed metrics.
    pub fn merge(&mut self, prefix: &str, other: VerificationReport) {
        for f in other.failures {
            self.fail(f.trial, format!("{prefix}{}", f.label), f.margin, f.case);
        }
        for w in other.witnesses {
            self.witness(format!("{prefix}{}", w.label), w.case);
        }
        for n in other.notes {
            self.note(format!("{prefix}{n}"));
        }
        for (key, v) in other.metrics {
            self.metrics.insert(format!("{prefix}{key}"), v);
        }
    }

    /// Copy with timing zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        Self {
            elapsed_seconds: 0.0,
            ..self.clone()
        }
    }
}

/// JSON cannot carry infinities or NaN; clamp to the largest finite value of the same sign.
fn finite(v: f64) -> f64 {
    if v.is_nan() {
        f64::MAX
    } else {
        v.clamp(f64::MIN, f64::MAX)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failures_clear_the_pass_flag() {
        let mut r =
            VerificationReport::new("demo", "statement", &[1], 1, 0, ToleranceConfig::default());
        assert!(r.passed);
        r.fail(
            0,
            "x",
            -1.0,
            ReplayCase::Summary {
                description: "d".into(),
            },
        );
        assert!(!r.passed);
        assert_eq!(r.failures.len(), 1);
    }

    #[test]
    fn metrics_stay_finite_and_round_trip() {
        let mut r =
            VerificationReport::new("demo", "statement", &[2], 2, 5, ToleranceConfig::default());
        r.set_metric("inf", f64::INFINITY);
        r.max_metric("m", 1.0);
        r.max_metric("m", 3.0);
        r.min_metric("lo", 2.0);
        r.min_metric("lo", -1.0);
        r.count("c");
        r.count("c");
        assert_eq!(r.metric("m"), Some(3.0));
        assert_eq!(r.metric("lo"), Some(-1.0));
        assert_eq!(r.metric("c"), Some(2.0));
        let back: VerificationReport =
            serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
