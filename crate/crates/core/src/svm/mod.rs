//! Kernel SVM: SMO training of binary machines, one-vs-one multiclass
//! voting, and a versioned JSON model format.

mod kernel;
pub mod smo;

use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::features::FeatureVector;

pub use kernel::{kernel_eval, KernelConfig};

/// Version written into every model file.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum SvmError {
    #[error("training data needs at least one example of each class")]
    SingleClassInput,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value in input row {row}")]
    NonFinite { row: usize },
    #[error("binary labels must be +1 or -1, got {0}")]
    InvalidLabel(f64),
    #[error("feature schema mismatch: expected `{expected}`, found `{found}`")]
    SchemaMismatch { expected: String, found: String },
    #[error("{x} feature vectors but {y} labels")]
    LengthMismatch { x: usize, y: usize },
    #[error("invalid svm configuration: {0}")]
    InvalidConfig(String),
    #[error("model i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported model format version {found} (expected {expected})")]
    VersionMismatch { expected: u32, found: u64 },
    #[error("corrupt model: {0}")]
    CorruptModel(String),
}

/// Training parameters for one binary machine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    /// Box constraint.
    pub c: f64,
    pub kernel: KernelConfig,
    /// Stop once the maximal KKT violation is below this.
    pub tol: f64,
    /// Iteration budget, in sweeps over the training set.
    pub max_passes: usize,
    /// Multipliers at or below this are not kept as support vectors.
    pub eps: f64,
}

impl SvmConfig {
    pub fn new(c: f64, kernel: KernelConfig) -> Self {
        SvmConfig {
            c,
            kernel,
            tol: 1e-3,
            max_passes: 1000,
            eps: 1e-8,
        }
    }

    pub fn validate(&self) -> Result<(), SvmError> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(SvmError::InvalidConfig(format!("C must be positive, got {}", self.c)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(SvmError::InvalidConfig(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_passes == 0 {
            return Err(SvmError::InvalidConfig("max_passes must be positive".into()));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(SvmError::InvalidConfig(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        self.kernel.validate()
    }
}

/// A trained two-class machine. `dual_coefs[i]` is `alpha_i * y_i` for
/// `support_vectors[i]`; a non-negative decision value means
/// `positive_label`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryModel {
    pub positive_label: String,
    pub negative_label: String,
    pub support_vectors: Vec<Vec<f64>>,
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
}

impl BinaryModel {
    /// `sum_i dual_coef_i * K(sv_i, x) + bias`.
    pub fn decision_value(&self, kernel: &KernelConfig, x: &[f64]) -> Result<f64, SvmError> {
        if let Some(sv) = self.support_vectors.first() {
            if sv.len() != x.len() {
                return Err(SvmError::DimensionMismatch {
                    expected: sv.len(),
                    found: x.len(),
                });
            }
        }
        Ok(self.decision_unchecked(kernel, x))
    }

    fn decision_unchecked(&self, kernel: &KernelConfig, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.dual_coefs)
            .map(|(sv, coef)| coef * kernel.eval_unchecked(sv, x))
            .sum::<f64>()
            + self.bias
    }

    /// Sum of the multipliers; zero at any feasible dual point.
    pub fn coef_sum(&self) -> f64 {
        self.dual_coefs.iter().sum()
    }

    /// Dual objective `sum |coef| - 1/2 coef' K coef` over the support vectors.
    pub fn dual_objective(&self, kernel: &KernelConfig) -> f64 {
        let mut quad = 0.0;
        for (a, ca) in self.support_vectors.iter().zip(&self.dual_coefs) {
            for (b, cb) in self.support_vectors.iter().zip(&self.dual_coefs) {
                quad += ca * cb * kernel.eval_unchecked(a, b);
            }
        }
        self.dual_coefs.iter().map(|c| c.abs()).sum::<f64>() - 0.5 * quad
    }
}

/// Decision value of a binary machine, free-function form.
pub fn decision_value(model: &BinaryModel, x: &FeatureVector, kernel: &KernelConfig) -> Result<f64, SvmError> {
    model.decision_value(kernel, &x.values)
}

fn check_rows(x: &[&[f64]]) -> Result<usize, SvmError> {
    let dims = x.first().map_or(0, |r| r.len());
    for (row, values) in x.iter().enumerate() {
        if values.len() != dims {
            return Err(SvmError::DimensionMismatch {
                expected: dims,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(SvmError::NonFinite { row });
        }
    }
    Ok(dims)
}

fn check_schema(x: &[FeatureVector]) -> Result<String, SvmError> {
    let schema = x.first().map(|v| v.schema_id.clone()).unwrap_or_default();
    if let Some(bad) = x.iter().find(|v| v.schema_id != schema) {
        return Err(SvmError::SchemaMismatch {
            expected: schema,
            found: bad.schema_id.clone(),
        });
    }
    Ok(schema)
}

/// Trains one machine on rows labelled `+1` / `-1`.
///
/// The seed fixes the order in which SMO scans candidates, and with it how
/// ties in working set selection are broken.
pub fn train_binary_rows(
    x: &[&[f64]],
    y: &[f64],
    cfg: &SvmConfig,
    seed: u64,
    positive_label: &str,
    negative_label: &str,
) -> Result<BinaryModel, SvmError> {
    cfg.validate()?;
    if x.len() != y.len() {
        return Err(SvmError::LengthMismatch { x: x.len(), y: y.len() });
    }
    if let Some(&bad) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
        return Err(SvmError::InvalidLabel(bad));
    }
    if !y.contains(&1.0) || !y.contains(&-1.0) {
        return Err(SvmError::SingleClassInput);
    }
    check_rows(x)?;

    let solution = solve_rows(x, y, cfg, seed);
    let mut model = BinaryModel {
        positive_label: positive_label.to_string(),
        negative_label: negative_label.to_string(),
        support_vectors: Vec::new(),
        dual_coefs: Vec::new(),
        bias: solution.bias,
    };
    for (i, &a) in solution.alpha.iter().enumerate() {
        if a > cfg.eps {
            model.support_vectors.push(x[i].to_vec());
            model.dual_coefs.push(a * y[i]);
        }
    }
    Ok(model)
}

/// Runs the solver without any input validation. Exposed so callers can
/// inspect the full multiplier vector.
pub fn solve_rows(x: &[&[f64]], y: &[f64], cfg: &SvmConfig, seed: u64) -> smo::DualSolution {
    let n = x.len();
    let gram = kernel::gram_matrix(&cfg.kernel, x);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let max_iter = cfg.max_passes.saturating_mul(n.max(1));
    smo::solve(&gram, y, cfg.c, cfg.tol, max_iter, &order)
}

/// Gram matrix for a set of rows, row-major.
pub fn gram(kernel: &KernelConfig, x: &[&[f64]]) -> Vec<f64> {
    kernel::gram_matrix(kernel, x)
}

/// Trains a binary machine on feature vectors with `+1` / `-1` labels.
pub fn train_binary(x: &[FeatureVector], y: &[f64], cfg: &SvmConfig, seed: u64) -> Result<BinaryModel, SvmError> {
    check_schema(x)?;
    let rows: Vec<&[f64]> = x.iter().map(|v| v.values.as_slice()).collect();
    train_binary_rows(&rows, y, cfg, seed, "+1", "-1")
}

/// One-vs-one ensemble. `machines` are stored pair by pair, `(0,1), (0,2),
/// ..., (1,2), ...` over the sorted `labels`; in each pair the earlier label
/// is the positive class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticlassModel {
    pub schema_id: String,
    pub dims: usize,
    pub labels: Vec<String>,
    pub kernel: KernelConfig,
    pub machines: Vec<BinaryModel>,
}

/// Trains one binary machine per label pair on that pair's rows.
pub fn train_multiclass<L: AsRef<str>>(
    x: &[FeatureVector],
    y: &[L],
    cfg: &SvmConfig,
    seed: u64,
) -> Result<MulticlassModel, SvmError> {
    cfg.validate()?;
    if x.len() != y.len() {
        return Err(SvmError::LengthMismatch { x: x.len(), y: y.len() });
    }
    let schema_id = check_schema(x)?;
    let rows: Vec<&[f64]> = x.iter().map(|v| v.values.as_slice()).collect();
    let dims = check_rows(&rows)?;

    let mut labels: Vec<String> = y.iter().map(|l| l.as_ref().to_string()).collect();
    labels.sort();
    labels.dedup();
    if labels.len() < 2 {
        return Err(SvmError::SingleClassInput);
    }

    let mut machines = Vec::with_capacity(labels.len() * (labels.len() - 1) / 2);
    for (a, pos) in labels.iter().enumerate() {
        for neg in &labels[a + 1..] {
            let mut pair_x = Vec::new();
            let mut pair_y = Vec::new();
            for (row, label) in rows.iter().zip(y) {
                let label = label.as_ref();
                if label == pos {
                    pair_x.push(*row);
                    pair_y.push(1.0);
                } else if label == neg {
                    pair_x.push(*row);
                    pair_y.push(-1.0);
                }
            }
            machines.push(train_binary_rows(&pair_x, &pair_y, cfg, seed, pos, neg)?);
        }
    }
    Ok(MulticlassModel {
        schema_id,
        dims,
        labels,
        kernel: cfg.kernel,
        machines,
    })
}

impl MulticlassModel {
    fn check_input(&self, x: &FeatureVector) -> Result<(), SvmError> {
        if x.schema_id != self.schema_id {
            return Err(SvmError::SchemaMismatch {
                expected: self.schema_id.clone(),
                found: x.schema_id.clone(),
            });
        }
        if x.dims() != self.dims {
            return Err(SvmError::DimensionMismatch {
                expected: self.dims,
                found: x.dims(),
            });
        }
        Ok(())
    }

    /// Decision value of every pairwise machine, in storage order.
    pub fn decision_values(&self, x: &FeatureVector) -> Result<Vec<f64>, SvmError> {
        self.check_input(x)?;
        Ok(self
            .machines
            .iter()
            .map(|m| m.decision_unchecked(&self.kernel, &x.values))
            .collect())
    }

    /// Majority vote over the pairwise machines.
    ///
    /// Ties go to the tied label with the largest summed |decision value|
    /// over the votes it won, then to the earliest label.
    pub fn predict(&self, x: &FeatureVector) -> Result<&str, SvmError> {
        let values = self.decision_values(x)?;
        Ok(self.vote(&values))
    }

    pub(crate) fn vote(&self, values: &[f64]) -> &str {
        let k = self.labels.len();
        let mut votes = vec![0usize; k];
        let mut margin = vec![0.0f64; k];
        let mut m = 0;
        for a in 0..k {
            for b in a + 1..k {
                let dv = values[m];
                let winner = if dv >= 0.0 { a } else { b };
                votes[winner] += 1;
                margin[winner] += dv.abs();
                m += 1;
            }
        }
        let mut best = 0;
        for c in 1..k {
            if votes[c] > votes[best] || (votes[c] == votes[best] && margin[c] > margin[best]) {
                best = c;
            }
        }
        &self.labels[best]
    }

    fn validate(&self) -> Result<(), SvmError> {
        let k = self.labels.len();
        let corrupt = |msg: String| Err(SvmError::CorruptModel(msg));
        if k < 2 {
            return corrupt(format!("{k} labels"));
        }
        if self.labels.windows(2).any(|w| w[0] >= w[1]) {
            return corrupt("labels not sorted and unique".into());
        }
        if self.machines.len() != k * (k - 1) / 2 {
            return corrupt(format!("{} machines for {k} labels", self.machines.len()));
        }
        for m in &self.machines {
            if m.support_vectors.len() != m.dual_coefs.len() {
                return corrupt("support vector / coefficient count mismatch".into());
            }
            if m.support_vectors.iter().any(|sv| sv.len() != self.dims) {
                return corrupt("support vector dimension mismatch".into());
            }
        }
        self.kernel.validate().or_else(|e| corrupt(e.to_string()))
    }

    /// Serializes as a compact versioned JSON document.
    pub fn write_json<W: Write>(&self, writer: W) -> Result<(), SvmError> {
        let doc = ModelDocument {
            format_version: FORMAT_VERSION,
            model: self.clone(),
        };
        serde_json::to_writer(writer, &doc).map_err(|e| SvmError::Io(e.into()))
    }

    pub fn read_json<R: Read>(mut reader: R) -> Result<Self, SvmError> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| SvmError::CorruptModel(e.to_string()))?;
        check_version(&value)?;
        let doc: ModelDocument = serde_json::from_value(value).map_err(|e| SvmError::CorruptModel(e.to_string()))?;
        doc.model.validate()?;
        Ok(doc.model)
    }
}

/// Checks the `format_version` field of a parsed model document.
pub fn check_version(value: &serde_json::Value) -> Result<(), SvmError> {
    match value.get("format_version").and_then(serde_json::Value::as_u64) {
        Some(v) if v == FORMAT_VERSION as u64 => Ok(()),
        Some(v) => Err(SvmError::VersionMismatch {
            expected: FORMAT_VERSION,
            found: v,
        }),
        None => Err(SvmError::CorruptModel("missing format_version".into())),
    }
}

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    format_version: u32,
    #[serde(flatten)]
    model: MulticlassModel,
}

pub fn save_model(model: &MulticlassModel, path: impl AsRef<Path>) -> Result<(), SvmError> {
    let file = std::fs::File::create(path)?;
    let mut writer = std::io::BufWriter::new(file);
    model.write_json(&mut writer)?;
    writer.flush()?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<MulticlassModel, SvmError> {
    MulticlassModel::read_json(std::fs::File::open(path)?)
}
