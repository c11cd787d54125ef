//! Soft-margin support vector machine with a Gaussian kernel.
//!
//! Training solves the usual dual problem
//!
//! ```text
//! maximize   sum(alpha) - 1/2 * sum_ij alpha_i alpha_j y_i y_j K(x_i, x_j)
//! subject to 0 <= alpha_i <= C,  sum_i alpha_i y_i = 0
//! ```
//!
//! by sequential minimal optimization: two multipliers are optimized jointly
//! in closed form per step, the partner chosen by the largest error
//! difference. The loop alternates full sweeps with sweeps over the unbounded
//! multipliers and stops when a full sweep finds no multiplier violating the
//! Karush-Kuhn-Tucker conditions beyond `kkt_tolerance`. The implementation
//! is deterministic: identical inputs produce identical models.

use crate::model_selection::Standardizer;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;
use thiserror::Error;

/// Version tag written into model files.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Errors raised by training, prediction, metrics, and model files.
#[derive(Debug, Error)]
pub enum SvmError {
    /// No training rows were supplied.
    #[error("training set is empty")]
    EmptyTrainingSet,
    /// Training needs at least one row of each class.
    #[error("training labels must include both classes")]
    SingleClass,
    /// Labels are restricted to +1 and -1.
    #[error("labels must be +1 or -1, got {0}")]
    InvalidLabel(i8),
    /// Rows (or a prediction input) disagree on dimension.
    #[error("expected feature vectors of dimension {expected}, got {got}")]
    DimensionMismatch {
        /// Dimension implied by the first row or the stored support vectors.
        expected: usize,
        /// Offending dimension.
        got: usize,
    },
    /// A feature value is NaN or infinite.
    #[error("non-finite feature value")]
    NonFinite,
    /// Hyperparameters must be positive and finite.
    #[error("invalid hyperparameters: {0}")]
    InvalidParams(String),
    /// Metrics over zero samples are undefined.
    #[error("confusion counts are empty")]
    EmptyCounts,
    /// The model file was written by an incompatible version.
    #[error("model file format version {0} is not supported")]
    UnsupportedVersion(u32),
    /// Reading or writing a model file failed.
    #[error("model file i/o failed: {0}")]
    Io(#[from] std::io::Error),
    /// The model file is not valid JSON of the expected shape.
    #[error("malformed model file: {0}")]
    Format(#[from] serde_json::Error),
}

/// Hyperparameters of the soft-margin machine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    /// Box constraint: the price of margin violations.
    pub c: f64,
    /// Width of the Gaussian kernel.
    pub gamma: f64,
    /// Tolerance on the Karush-Kuhn-Tucker conditions at termination.
    pub kkt_tolerance: f64,
    /// Cap on optimization sweeps; `None` means ten times the number of
    /// training rows.
    pub max_passes: Option<usize>,
}

impl SvmParams {
    /// Parameters with the default tolerance `1e-3` and automatic sweep cap.
    pub fn new(c: f64, gamma: f64) -> Self {
        Self {
            c,
            gamma,
            kkt_tolerance: 1e-3,
            max_passes: None,
        }
    }

    /// Same parameters with a different termination tolerance.
    pub fn with_tolerance(mut self, kkt_tolerance: f64) -> Self {
        self.kkt_tolerance = kkt_tolerance;
        self
    }

    fn validate(&self) -> Result<(), SvmError> {
        let ok = self.c.is_finite()
            && self.c > 0.0
            && self.gamma.is_finite()
            && self.gamma > 0.0
            && self.kkt_tolerance.is_finite()
            && self.kkt_tolerance > 0.0;
        if !ok {
            return Err(SvmError::InvalidParams(format!(
                "c = {}, gamma = {}, kkt_tolerance = {}",
                self.c, self.gamma, self.kkt_tolerance
            )));
        }
        if self.max_passes == Some(0) {
            return Err(SvmError::InvalidParams(
                "max_passes must be at least 1".to_string(),
            ));
        }
        Ok(())
    }
}

/// Outcomes of binary classification against known labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    /// Positive rows predicted positive.
    pub true_positives: u64,
    /// Negative rows predicted positive.
    pub false_positives: u64,
    /// Negative rows predicted negative.
    pub true_negatives: u64,
    /// Positive rows predicted negative.
    pub false_negatives: u64,
}

impl ConfusionCounts {
    /// Builds counts directly.
    pub fn new(tp: u64, fp: u64, tn: u64, fneg: u64) -> Self {
        Self {
            true_positives: tp,
            false_positives: fp,
            true_negatives: tn,
            false_negatives: fneg,
        }
    }

    /// Adds one observation.
    pub fn record(&mut self, actual: i8, predicted: i8) {
        match (actual > 0, predicted > 0) {
            (true, true) => self.true_positives += 1,
            (false, true) => self.false_positives += 1,
            (false, false) => self.true_negatives += 1,
            (true, false) => self.false_negatives += 1,
        }
    }

    /// Total number of observations.
    pub fn total(&self) -> u64 {
        self.true_positives + self.false_positives + self.true_negatives + self.false_negatives
    }
}

/// The Gaussian kernel `exp(-gamma * |a - b|^2)`.
///
/// # Panics
///
/// Panics if the slices have different lengths.
pub fn rbf_kernel(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    assert_eq!(a.len(), b.len(), "kernel arguments differ in dimension");
    let squared: f64 = a
        .iter()
        .zip(b)
        .map(|(ai, bi)| {
            let d = ai - bi;
            d * d
        })
        .sum();
    (-gamma * squared).exp()
}

/// Matthews correlation coefficient. When any marginal of the confusion
/// table is empty the usual formula divides by zero; the denominator is
/// then taken as 1. A zero marginal also forces a zero numerator, so every
/// such degenerate table scores 0, like a random classifier.
pub fn mcc(counts: &ConfusionCounts) -> f64 {
    let tp = counts.true_positives as f64;
    let fp = counts.false_positives as f64;
    let tn = counts.true_negatives as f64;
    let fneg = counts.false_negatives as f64;
    let numerator = tp * tn - fp * fneg;
    let denominator = (tp + fp) * (tp + fneg) * (tn + fp) * (tn + fneg);
    if denominator == 0.0 {
        return numerator;
    }
    numerator / denominator.sqrt()
}

/// Fraction of correct predictions.
pub fn accuracy(counts: &ConfusionCounts) -> Result<f64, SvmError> {
    let total = counts.total();
    if total == 0 {
        return Err(SvmError::EmptyCounts);
    }
    Ok((counts.true_positives + counts.true_negatives) as f64 / total as f64)
}

/// The class label for a decision value; ties at exactly zero go to `+1`.
pub fn label_from_decision(value: f64) -> i8 {
    if value >= 0.0 {
        1
    } else {
        -1
    }
}

/// A trained machine: the sparse dual solution plus everything needed to map
/// raw feature vectors into the space the machine was trained in.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvmModel {
    params: SvmParams,
    /// 1-based feature indices this model consumes, when trained on a subset.
    feature_indices: Vec<usize>,
    standardizer: Option<Standardizer>,
    support_vectors: Vec<Vec<f64>>,
    /// Row indices of the support vectors in the training set.
    support_indices: Vec<usize>,
    /// `alpha_i * y_i` per support vector.
    dual_coefs: Vec<f64>,
    bias: f64,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    model: SvmModel,
}

impl SvmModel {
    /// The hyperparameters the model was trained with.
    pub fn params(&self) -> &SvmParams {
        &self.params
    }

    /// 1-based indices of the consumed features; empty when unknown.
    pub fn feature_indices(&self) -> &[usize] {
        &self.feature_indices
    }

    /// The stored standardizer, when the pipeline attached one.
    pub fn standardizer(&self) -> Option<&Standardizer> {
        self.standardizer.as_ref()
    }

    /// Number of support vectors.
    pub fn support_vector_count(&self) -> usize {
        self.support_vectors.len()
    }

    /// Training-set row indices of the support vectors.
    pub fn support_indices(&self) -> &[usize] {
        &self.support_indices
    }

    /// `alpha_i * y_i` per support vector.
    pub fn dual_coefs(&self) -> &[f64] {
        &self.dual_coefs
    }

    /// The bias term.
    pub fn bias(&self) -> f64 {
        self.bias
    }

    /// Attaches the standardizer the pipeline fitted on the training data.
    pub fn with_standardizer(mut self, standardizer: Standardizer) -> Self {
        self.standardizer = Some(standardizer);
        self
    }

    /// Records which 1-based feature indices the model consumes.
    pub fn with_feature_indices(mut self, indices: Vec<usize>) -> Self {
        self.feature_indices = indices;
        self
    }

    /// The decision function: standardizes `x` when a standardizer is
    /// stored, then evaluates the kernel expansion plus bias. `x` must have
    /// the dimension the model was trained on.
    pub fn decision_value(&self, x: &[f64]) -> Result<f64, SvmError> {
        let dim = self
            .support_vectors
            .first()
            .map_or(x.len(), |sv| sv.len());
        if x.len() != dim {
            return Err(SvmError::DimensionMismatch {
                expected: dim,
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SvmError::NonFinite);
        }
        let standardized;
        let x = match &self.standardizer {
            Some(s) => {
                standardized = s.transform_row(x);
                standardized.as_slice()
            }
            None => x,
        };
        let mut value = self.bias;
        for (sv, coef) in self.support_vectors.iter().zip(&self.dual_coefs) {
            value += coef * rbf_kernel(sv, x, self.params.gamma);
        }
        Ok(value)
    }

    /// Predicts the class label of `x`; ties go to `+1`.
    pub fn predict(&self, x: &[f64]) -> Result<i8, SvmError> {
        Ok(label_from_decision(self.decision_value(x)?))
    }

    /// Writes the model as a versioned JSON document.
    pub fn save(&self, path: &Path) -> Result<(), SvmError> {
        let file = ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            model: self.clone(),
        };
        let text = serde_json::to_string_pretty(&file)?;
        fs::write(path, text + "\n")?;
        Ok(())
    }

    /// Reads a model written by [`SvmModel::save`].
    pub fn load(path: &Path) -> Result<Self, SvmError> {
        let text = fs::read_to_string(path)?;
        let file: ModelFile = serde_json::from_str(&text)?;
        if file.format_version != MODEL_FORMAT_VERSION {
            return Err(SvmError::UnsupportedVersion(file.format_version));
        }
        Ok(file.model)
    }
}

/// Trains a machine on rows `x` with labels `y` (`+1` or `-1`).
///
/// The input is used as-is; callers that standardize first can attach the
/// transformation with [`SvmModel::with_standardizer`] so prediction replays
/// it.
pub fn train(x: &[Vec<f64>], y: &[i8], params: &SvmParams) -> Result<SvmModel, SvmError> {
    params.validate()?;
    if x.is_empty() {
        return Err(SvmError::EmptyTrainingSet);
    }
    if x.len() != y.len() {
        return Err(SvmError::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let dim = x[0].len();
    for row in x {
        if row.len() != dim {
            return Err(SvmError::DimensionMismatch {
                expected: dim,
                got: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(SvmError::NonFinite);
        }
    }
    for &label in y {
        if label != 1 && label != -1 {
            return Err(SvmError::InvalidLabel(label));
        }
    }
    if y.iter().all(|&l| l == 1) || y.iter().all(|&l| l == -1) {
        return Err(SvmError::SingleClass);
    }

    let n = x.len();
    let labels: Vec<f64> = y.iter().map(|&l| f64::from(l)).collect();
    let kernel = KernelMatrix::new(x, params.gamma);
    let mut solver = Smo {
        kernel: &kernel,
        labels: &labels,
        c: params.c,
        tolerance: params.kkt_tolerance,
        alpha: vec![0.0; n],
        errors: labels.iter().map(|l| -l).collect(),
        bias: 0.0,
    };
    solver.run(params.max_passes.unwrap_or(10 * n));
    let bias = solver.final_bias();

    let mut support_vectors = Vec::new();
    let mut support_indices = Vec::new();
    let mut dual_coefs = Vec::new();
    for i in 0..n {
        if solver.alpha[i] > 0.0 {
            support_vectors.push(x[i].clone());
            support_indices.push(i);
            dual_coefs.push(solver.alpha[i] * labels[i]);
        }
    }
    Ok(SvmModel {
        params: params.clone(),
        feature_indices: Vec::new(),
        standardizer: None,
        support_vectors,
        support_indices,
        dual_coefs,
        bias,
    })
}

/// Largest violation of the Karush-Kuhn-Tucker conditions of `model` on its
/// training data: rows with `alpha = 0` must satisfy `y*f >= 1`, unbounded
/// rows `y*f = 1`, and rows at `alpha = C` must satisfy `y*f <= 1`, each
/// measured as a one-sided or absolute deviation.
pub fn max_kkt_violation(
    model: &SvmModel,
    x: &[Vec<f64>],
    y: &[i8],
) -> Result<f64, SvmError> {
    let mut alphas = vec![0.0; x.len()];
    for (&row, &coef) in model.support_indices.iter().zip(&model.dual_coefs) {
        alphas[row] = coef.abs();
    }
    let c = model.params.c;
    let band = 1e-10 * c;
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        let yf = f64::from(y[i]) * model.decision_value(&x[i])?;
        let violation = if alphas[i] <= band {
            (1.0 - yf).max(0.0)
        } else if alphas[i] < c - band {
            (yf - 1.0).abs()
        } else {
            (yf - 1.0).max(0.0)
        };
        worst = worst.max(violation);
    }
    Ok(worst)
}

/// Dual objective value of `model`'s multipliers on its training data.
pub fn dual_objective(model: &SvmModel, x: &[Vec<f64>], y: &[i8]) -> f64 {
    let mut alphas = vec![0.0; x.len()];
    for (&row, &coef) in model.support_indices.iter().zip(&model.dual_coefs) {
        alphas[row] = coef.abs();
    }
    let gamma = model.params.gamma;
    let mut objective: f64 = alphas.iter().sum();
    for i in 0..x.len() {
        if alphas[i] == 0.0 {
            continue;
        }
        for j in 0..x.len() {
            if alphas[j] == 0.0 {
                continue;
            }
            objective -= 0.5
                * alphas[i]
                * alphas[j]
                * f64::from(y[i])
                * f64::from(y[j])
                * rbf_kernel(&x[i], &x[j], gamma);
        }
    }
    objective
}

struct KernelMatrix {
    values: Vec<f64>,
    n: usize,
}

impl KernelMatrix {
    fn new(x: &[Vec<f64>], gamma: f64) -> Self {
        let n = x.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            values[i * n + i] = 1.0;
            for j in 0..i {
                let k = rbf_kernel(&x[i], &x[j], gamma);
                values[i * n + j] = k;
                values[j * n + i] = k;
            }
        }
        Self { values, n }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

struct Smo<'a> {
    kernel: &'a KernelMatrix,
    labels: &'a [f64],
    c: f64,
    tolerance: f64,
    alpha: Vec<f64>,
    /// `f(x_i) - y_i` for every training row, kept current.
    errors: Vec<f64>,
    bias: f64,
}

impl Smo<'_> {
    /// Returns the number of sweeps used; `max_passes` sweeps means the cap
    /// was reached before the KKT conditions were satisfied.
    fn run(&mut self, max_passes: usize) -> usize {
        let n = self.alpha.len();
        let mut examine_all = true;
        let mut passes = 0;
        loop {
            if passes >= max_passes {
                break;
            }
            passes += 1;
            let mut changed = 0usize;
            if examine_all {
                for i in 0..n {
                    changed += usize::from(self.examine(i));
                }
            } else {
                for i in 0..n {
                    if self.is_free(i) {
                        changed += usize::from(self.examine(i));
                    }
                }
            }
            if examine_all {
                if changed == 0 {
                    break;
                }
                examine_all = false;
            } else if changed == 0 {
                examine_all = true;
            }
        }
        passes
    }

    fn is_free(&self, i: usize) -> bool {
        self.alpha[i] > 0.0 && self.alpha[i] < self.c
    }

    fn snap(&self, a: f64) -> f64 {
        if a < 1e-11 * self.c {
            0.0
        } else if a > (1.0 - 1e-11) * self.c {
            self.c
        } else {
            a
        }
    }

    fn examine(&mut self, i2: usize) -> bool {
        let y2 = self.labels[i2];
        let alpha2 = self.alpha[i2];
        let e2 = self.errors[i2];
        let r2 = e2 * y2;
        let violates = (r2 < -self.tolerance && alpha2 < self.c)
            || (r2 > self.tolerance && alpha2 > 0.0);
        if !violates {
            return false;
        }
        // Second-choice heuristic: the free multiplier with the largest
        // error difference, ties to the lowest index.
        let mut best: Option<(f64, usize)> = None;
        for i in 0..self.alpha.len() {
            if i != i2 && self.is_free(i) {
                let gap = (self.errors[i] - e2).abs();
                if best.is_none_or(|(g, _)| gap > g) {
                    best = Some((gap, i));
                }
            }
        }
        if let Some((_, i1)) = best {
            if self.take_step(i1, i2) {
                return true;
            }
        }
        for i1 in 0..self.alpha.len() {
            if i1 != i2 && self.is_free(i1) && self.take_step(i1, i2) {
                return true;
            }
        }
        for i1 in 0..self.alpha.len() {
            if i1 != i2 && self.take_step(i1, i2) {
                return true;
            }
        }
        false
    }

    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let (y1, y2) = (self.labels[i1], self.labels[i2]);
        let (a1, a2) = (self.alpha[i1], self.alpha[i2]);
        let (e1, e2) = (self.errors[i1], self.errors[i2]);
        let s = y1 * y2;
        let (low, high) = if s < 0.0 {
            ((a2 - a1).max(0.0), (self.c + a2 - a1).min(self.c))
        } else {
            ((a1 + a2 - self.c).max(0.0), (a1 + a2).min(self.c))
        };
        if low >= high {
            return false;
        }
        let k11 = self.kernel.at(i1, i1);
        let k12 = self.kernel.at(i1, i2);
        let k22 = self.kernel.at(i2, i2);
        let eta = k11 + k22 - 2.0 * k12;
        let a2_new = if eta > 1e-15 {
            (a2 + y2 * (e1 - e2) / eta).clamp(low, high)
        } else {
            // Flat or degenerate direction: compare the objective at both
            // ends of the feasible segment.
            let f1 = y1 * (e1 - self.bias) - a1 * k11 - s * a2 * k12;
            let f2 = y2 * (e2 - self.bias) - s * a1 * k12 - a2 * k22;
            let l1 = a1 + s * (a2 - low);
            let h1 = a1 + s * (a2 - high);
            let obj_low = l1 * f1 + low * f2
                + 0.5 * l1 * l1 * k11
                + 0.5 * low * low * k22
                + s * low * l1 * k12;
            let obj_high = h1 * f1 + high * f2
                + 0.5 * h1 * h1 * k11
                + 0.5 * high * high * k22
                + s * high * h1 * k12;
            if obj_low < obj_high - 1e-12 {
                low
            } else if obj_low > obj_high + 1e-12 {
                high
            } else {
                return false;
            }
        };
        if (a2_new - a2).abs() < 1e-12 * (a2_new + a2 + 1e-12) {
            return false;
        }
        // Multipliers a hair away from a bound are rounding artifacts of the
        // update arithmetic, yet they would count as unbounded in the
        // termination test and in the bias reconstruction, pinning the bias
        // to a bogus equality. Snap them onto the bound.
        let a2_new = self.snap(a2_new);
        let a1_new = self.snap(a1 + s * (a2 - a2_new)).clamp(0.0, self.c);

        let d1 = y1 * (a1_new - a1);
        let d2 = y2 * (a2_new - a2);
        let b1 = self.bias - e1 - d1 * k11 - d2 * k12;
        let b2 = self.bias - e2 - d1 * k12 - d2 * k22;
        let new_bias = if a1_new > 0.0 && a1_new < self.c {
            b1
        } else if a2_new > 0.0 && a2_new < self.c {
            b2
        } else {
            (b1 + b2) / 2.0
        };
        let bias_delta = new_bias - self.bias;
        for k in 0..self.alpha.len() {
            self.errors[k] +=
                d1 * self.kernel.at(i1, k) + d2 * self.kernel.at(i2, k) + bias_delta;
        }
        self.alpha[i1] = a1_new;
        self.alpha[i2] = a2_new;
        self.bias = new_bias;
        true
    }

    /// Places the bias at the midpoint of the interval the box constraints
    /// leave for it, which minimizes the largest single-row violation.
    fn final_bias(&self) -> f64 {
        let n = self.alpha.len();
        let mut lower = f64::NEG_INFINITY;
        let mut upper = f64::INFINITY;
        for i in 0..n {
            // Margin without bias.
            let g = self.errors[i] + self.labels[i] - self.bias;
            let candidate = self.labels[i] - g;
            let at_lower_bound = self.alpha[i] <= 0.0;
            let at_upper_bound = self.alpha[i] >= self.c;
            if at_lower_bound {
                if self.labels[i] > 0.0 {
                    lower = lower.max(candidate);
                } else {
                    upper = upper.min(candidate);
                }
            } else if at_upper_bound {
                if self.labels[i] > 0.0 {
                    upper = upper.min(candidate);
                } else {
                    lower = lower.max(candidate);
                }
            } else {
                lower = lower.max(candidate);
                upper = upper.min(candidate);
            }
        }
        match (lower.is_finite(), upper.is_finite()) {
            (true, true) => (lower + upper) / 2.0,
            (true, false) => lower,
            (false, true) => upper,
            (false, false) => self.bias,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn separable_pair() -> (Vec<Vec<f64>>, Vec<i8>) {
        (vec![vec![0.0], vec![1.0]], vec![1, -1])
    }

    #[test]
    fn kernel_values() {
        assert_eq!(rbf_kernel(&[1.5, -2.0], &[1.5, -2.0], 0.7), 1.0);
        let e_inverse = rbf_kernel(&[0.0, 0.0], &[1.0, 0.0], 1.0);
        assert_relative_eq!(e_inverse, (-1.0f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(e_inverse, 0.367_879_441_171_442_33, epsilon = 1e-12);
        let a = [0.3, -1.2, 4.0];
        let b = [2.0, 0.5, -0.7];
        assert_eq!(rbf_kernel(&a, &b, 0.3), rbf_kernel(&b, &a, 0.3));
    }

    #[test]
    #[should_panic(expected = "differ in dimension")]
    fn kernel_rejects_ragged_input() {
        rbf_kernel(&[1.0], &[1.0, 2.0], 1.0);
    }

    /// Eigenvalues of a symmetric matrix by the cyclic Jacobi method; test
    /// helper for the positive-semidefiniteness check.
    fn symmetric_eigenvalues(mut m: Vec<Vec<f64>>) -> Vec<f64> {
        let n = m.len();
        for _ in 0..100 {
            let mut off = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        off += m[i][j] * m[i][j];
                    }
                }
            }
            if off < 1e-24 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    if m[p][q].abs() < 1e-18 {
                        continue;
                    }
                    let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let cos = 1.0 / (t * t + 1.0).sqrt();
                    let sin = t * cos;
                    for k in 0..n {
                        let mkp = m[k][p];
                        let mkq = m[k][q];
                        m[k][p] = cos * mkp - sin * mkq;
                        m[k][q] = sin * mkp + cos * mkq;
                    }
                    for k in 0..n {
                        let mpk = m[p][k];
                        let mqk = m[q][k];
                        m[p][k] = cos * mpk - sin * mqk;
                        m[q][k] = sin * mpk + cos * mqk;
                    }
                }
            }
        }
        (0..n).map(|i| m[i][i]).collect()
    }

    #[test]
    fn kernel_matrix_is_positive_semidefinite() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let points: Vec<Vec<f64>> = (0..10)
                .map(|_| (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect())
                .collect();
            let gram: Vec<Vec<f64>> = points
                .iter()
                .map(|a| points.iter().map(|b| rbf_kernel(a, b, 0.8)).collect())
                .collect();
            for eigenvalue in symmetric_eigenvalues(gram) {
                assert!(eigenvalue >= -1e-8, "negative eigenvalue {eigenvalue}");
            }
        }
    }

    #[test]
    fn mcc_reference_values() {
        assert_eq!(mcc(&ConfusionCounts::new(5, 0, 5, 0)), 1.0);
        assert_eq!(mcc(&ConfusionCounts::new(0, 5, 0, 5)), -1.0);
        assert_eq!(mcc(&ConfusionCounts::new(25, 25, 25, 25)), 0.0);
        assert_eq!(mcc(&ConfusionCounts::new(3, 0, 0, 0)), 0.0);
        assert_eq!(mcc(&ConfusionCounts::default()), 0.0);
        let table = ConfusionCounts::new(77, 13, 41, 81);
        assert_relative_eq!(mcc(&table), 0.2174, epsilon = 1e-4);
    }

    #[test]
    fn accuracy_reference_values() {
        let table = ConfusionCounts::new(77, 13, 41, 81);
        assert_relative_eq!(accuracy(&table).unwrap(), 118.0 / 212.0, epsilon = 1e-12);
        assert!(matches!(
            accuracy(&ConfusionCounts::default()),
            Err(SvmError::EmptyCounts)
        ));
    }

    #[test]
    fn ties_predict_positive() {
        assert_eq!(label_from_decision(0.0), 1);
        assert_eq!(label_from_decision(1e-300), 1);
        assert_eq!(label_from_decision(-1e-300), -1);
    }

    #[test]
    fn training_validates_input() {
        let params = SvmParams::new(1.0, 1.0);
        assert!(matches!(
            train(&[], &[], &params),
            Err(SvmError::EmptyTrainingSet)
        ));
        assert!(matches!(
            train(&[vec![0.0], vec![1.0]], &[1, 1], &params),
            Err(SvmError::SingleClass)
        ));
        assert!(matches!(
            train(&[vec![0.0], vec![1.0]], &[1, 0], &params),
            Err(SvmError::InvalidLabel(0))
        ));
        assert!(matches!(
            train(&[vec![0.0], vec![1.0, 2.0]], &[1, -1], &params),
            Err(SvmError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            train(&[vec![f64::NAN], vec![1.0]], &[1, -1], &params),
            Err(SvmError::NonFinite)
        ));
        assert!(matches!(
            train(&separable_pair().0, &[1, -1], &SvmParams::new(-1.0, 1.0)),
            Err(SvmError::InvalidParams(_))
        ));
        let mut zero_passes = SvmParams::new(1.0, 1.0);
        zero_passes.max_passes = Some(0);
        assert!(matches!(
            train(&separable_pair().0, &[1, -1], &zero_passes),
            Err(SvmError::InvalidParams(_))
        ));
    }

    #[test]
    fn two_point_problem_reaches_unit_margins() {
        let (x, y) = separable_pair();
        let params = SvmParams::new(100.0, 1.0).with_tolerance(1e-6);
        let model = train(&x, &y, &params).unwrap();
        assert_eq!(model.support_vector_count(), 2);
        let f0 = model.decision_value(&x[0]).unwrap();
        let f1 = model.decision_value(&x[1]).unwrap();
        assert_relative_eq!(f0, 1.0, epsilon = 1e-4);
        assert_relative_eq!(f1, -1.0, epsilon = 1e-4);
        assert_eq!(model.predict(&x[0]).unwrap(), 1);
        assert_eq!(model.predict(&x[1]).unwrap(), -1);
        assert!(max_kkt_violation(&model, &x, &y).unwrap() <= 1e-6);
    }

    #[test]
    fn xor_layout_is_learnable_with_rbf() {
        let x = vec![
            vec![0.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
        ];
        let y = vec![1, 1, -1, -1];
        let model = train(&x, &y, &SvmParams::new(100.0, 1.0)).unwrap();
        for (row, label) in x.iter().zip(&y) {
            assert_eq!(model.predict(row).unwrap(), *label);
        }
    }

    #[test]
    fn duplicated_training_set_yields_same_decision_function() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<Vec<f64>> = (0..12)
            .map(|i| {
                let center = if i % 2 == 0 { -1.5 } else { 1.5 };
                vec![
                    center + rng.gen_range(-0.8..0.8),
                    rng.gen_range(-1.0..1.0),
                ]
            })
            .collect();
        let y: Vec<i8> = (0..12).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
        let params = SvmParams::new(3.0, 0.5).with_tolerance(1e-8);
        let single = train(&x, &y, &params).unwrap();

        let mut x2 = x.clone();
        x2.extend(x.iter().cloned());
        let mut y2 = y.clone();
        y2.extend(y.iter().copied());
        let doubled = train(&x2, &y2, &params).unwrap();

        for i in -6..=6 {
            for j in -4..=4 {
                let probe = vec![f64::from(i) * 0.5, f64::from(j) * 0.5];
                let a = single.decision_value(&probe).unwrap();
                let b = doubled.decision_value(&probe).unwrap();
                assert!(
                    (a - b).abs() <= 1e-6,
                    "decision values diverge at {probe:?}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn kkt_conditions_hold_on_random_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let n = 60;
        let x: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let center = if i % 2 == 0 { -1.0 } else { 1.0 };
                (0..3)
                    .map(|_| center + rng.gen_range(-1.5..1.5))
                    .collect()
            })
            .collect();
        let y: Vec<i8> = (0..n).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
        for params in [
            SvmParams::new(1.0, 0.5),
            SvmParams::new(32.0, 0.03125),
            SvmParams::new(0.1, 2.0),
        ] {
            let model = train(&x, &y, &params).unwrap();
            let violation = max_kkt_violation(&model, &x, &y).unwrap();
            assert!(
                violation <= params.kkt_tolerance + 1e-9,
                "violation {violation} exceeds tolerance for {params:?}"
            );
        }
    }

    /// Exhaustive active-set oracle for the dual problem on tiny inputs:
    /// every multiplier is pinned to 0, pinned to C, or left free; each
    /// assignment yields an equality-constrained quadratic system solved
    /// exactly. The best feasible candidate is the global optimum.
    fn brute_force_dual_optimum(x: &[Vec<f64>], y: &[i8], params: &SvmParams) -> f64 {
        let n = x.len();
        assert!(n <= 6, "oracle is exponential in the number of points");
        let q: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        f64::from(y[i]) * f64::from(y[j]) * rbf_kernel(&x[i], &x[j], params.gamma)
                    })
                    .collect()
            })
            .collect();
        let objective = |alpha: &[f64]| -> f64 {
            let mut value: f64 = alpha.iter().sum();
            for i in 0..n {
                for j in 0..n {
                    value -= 0.5 * alpha[i] * alpha[j] * q[i][j];
                }
            }
            value
        };
        let mut best = f64::NEG_INFINITY;
        for mask in 0..3usize.pow(n as u32) {
            let mut assignment = Vec::with_capacity(n);
            let mut rest = mask;
            for _ in 0..n {
                assignment.push(rest % 3);
                rest /= 3;
            }
            let free: Vec<usize> = (0..n).filter(|&i| assignment[i] == 2).collect();
            let mut alpha: Vec<f64> = assignment
                .iter()
                .map(|&a| if a == 1 { params.c } else { 0.0 })
                .collect();
            let bound_balance: f64 = (0..n)
                .filter(|i| assignment[*i] != 2)
                .map(|i| f64::from(y[i]) * alpha[i])
                .sum();
            if free.is_empty() {
                if bound_balance.abs() < 1e-9 {
                    best = best.max(objective(&alpha));
                }
                continue;
            }
            // Stationarity on the free block with multiplier lambda:
            // Q_FF a_F + lambda y_F = 1 - Q_FB a_B,  y_F . a_F = -balance.
            let m = free.len() + 1;
            let mut system = vec![vec![0.0; m + 1]; m];
            for (r, &i) in free.iter().enumerate() {
                for (cidx, &j) in free.iter().enumerate() {
                    system[r][cidx] = q[i][j];
                }
                system[r][free.len()] = f64::from(y[i]);
                let fixed: f64 = (0..n)
                    .filter(|j| assignment[*j] != 2)
                    .map(|j| q[i][j] * alpha[j])
                    .sum();
                system[r][m] = 1.0 - fixed;
            }
            for (cidx, &j) in free.iter().enumerate() {
                system[free.len()][cidx] = f64::from(y[j]);
            }
            system[free.len()][m] = -bound_balance;
            let Some(solution) = solve_linear(system) else {
                continue;
            };
            let mut feasible = true;
            for (slot, &i) in free.iter().enumerate() {
                let a = solution[slot];
                if !(-1e-9..=params.c + 1e-9).contains(&a) {
                    feasible = false;
                    break;
                }
                alpha[i] = a.clamp(0.0, params.c);
            }
            if feasible {
                best = best.max(objective(&alpha));
            }
        }
        best
    }

    /// Gaussian elimination with partial pivoting on an augmented matrix.
    fn solve_linear(mut m: Vec<Vec<f64>>) -> Option<Vec<f64>> {
        let n = m.len();
        for col in 0..n {
            let pivot = (col..n).max_by(|&a, &b| {
                m[a][col]
                    .abs()
                    .partial_cmp(&m[b][col].abs())
                    .expect("finite entries")
            })?;
            if m[pivot][col].abs() < 1e-12 {
                return None;
            }
            m.swap(col, pivot);
            for row in 0..n {
                if row != col {
                    let factor = m[row][col] / m[col][col];
                    for k in col..=n {
                        m[row][k] -= factor * m[col][k];
                    }
                }
            }
        }
        Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
    }

    #[test]
    fn smo_matches_brute_force_dual_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for case in 0..8 {
            let n = 4 + case % 3;
            let x: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect();
            let mut y: Vec<i8> = (0..n).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
            if rng.gen_bool(0.5) {
                y.reverse();
            }
            let params = SvmParams::new(
                [0.5, 1.5, 10.0][case % 3],
                [0.3, 0.9][case % 2],
            )
            .with_tolerance(1e-8);
            let model = train(&x, &y, &params).unwrap();
            let smo_objective = dual_objective(&model, &x, &y);
            let oracle = brute_force_dual_optimum(&x, &y, &params);
            assert!(
                (smo_objective - oracle).abs() <= 1e-6,
                "case {case}: smo {smo_objective} vs oracle {oracle}"
            );
            assert!(
                max_kkt_violation(&model, &x, &y).unwrap() <= params.kkt_tolerance + 1e-9
            );
        }
    }

    #[test]
    fn model_round_trips_through_file() {
        let (x, y) = separable_pair();
        let model = train(&x, &y, &SvmParams::new(5.0, 1.0)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        model.save(&path).unwrap();
        let restored = SvmModel::load(&path).unwrap();
        for probe in [[-0.4], [0.2], [0.9]] {
            assert_eq!(
                model.decision_value(&probe).unwrap().to_bits(),
                restored.decision_value(&probe).unwrap().to_bits()
            );
        }
        let mut doc: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        doc["format_version"] = serde_json::json!(99);
        std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
        assert!(matches!(
            SvmModel::load(&path),
            Err(SvmError::UnsupportedVersion(99))
        ));
    }

    #[test]
    fn prediction_checks_dimensions() {
        let (x, y) = separable_pair();
        let model = train(&x, &y, &SvmParams::new(5.0, 1.0)).unwrap();
        assert!(matches!(
            model.decision_value(&[0.0, 1.0]),
            Err(SvmError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            model.decision_value(&[f64::NAN]),
            Err(SvmError::NonFinite)
        ));
    }
}
