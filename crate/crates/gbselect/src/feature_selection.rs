//! Filter and wrapper feature selection.
//!
//! The filter route is classifier-free: every feature is discretized by
//! recursive minimum-description-length partitioning, correlations between
//! discrete variables are measured by symmetric uncertainty, and a greedy
//! forward search maximizes a subset merit that rewards features correlated
//! with the class and penalizes features correlated with each other.
//!
//! The wrapper route scores candidate subsets directly by cross-validated
//! accuracy of the downstream support vector machine, once per cell of a
//! hyperparameter grid, and keeps the best combination of subset and cell.

use crate::model_selection::{
    cross_validate, fit_standardized, stratified_kfold, stratified_split, evaluate, Grid,
    GridPoint, ModelSelectionError,
};
use crate::svm::{self, SvmParams};
use crate::{FOLDS_STREAM, SPLIT_STREAM};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Errors from discretization and subset search.
#[derive(Debug, Error)]
pub enum FeatureSelectionError {
    /// No rows were supplied.
    #[error("input is empty")]
    EmptyInput,
    /// Values and labels disagree in length.
    #[error("got {values} values but {labels} labels")]
    LengthMismatch {
        /// Number of values.
        values: usize,
        /// Number of labels.
        labels: usize,
    },
    /// Feature rows disagree on dimension.
    #[error("feature rows disagree on dimension")]
    DimensionMismatch,
    /// A value is NaN or infinite.
    #[error("non-finite feature value")]
    NonFinite,
    /// One description per feature is required.
    #[error("got {descriptions} descriptions for {features} features")]
    DescriptionMismatch {
        /// Number of descriptions supplied.
        descriptions: usize,
        /// Number of feature columns.
        features: usize,
    },
    /// Exhaustive search is exponential and refuses large inputs.
    #[error("exhaustive search supports at most {limit} features, got {got}")]
    TooManyFeatures {
        /// Hard limit.
        limit: usize,
        /// Requested width.
        got: usize,
    },
    /// A feature index is outside the matrix or repeated.
    #[error("invalid feature index {0}")]
    InvalidFeatureIndex(usize),
    /// An underlying cross-validation error.
    #[error(transparent)]
    ModelSelection(#[from] ModelSelectionError),
}

/// Shannon entropy in bits of a discrete distribution given as counts.
/// Zero counts contribute nothing; an empty or all-zero histogram has
/// entropy 0.
pub fn entropy(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum()
}

/// Conditional entropy `H(X | Y)` in bits from a contingency table whose
/// rows are the groups of the conditioning variable `Y` and whose columns
/// are the values of `X`.
pub fn conditional_entropy(table: &[Vec<u64>]) -> f64 {
    let total: u64 = table.iter().flatten().sum();
    if total == 0 {
        return 0.0;
    }
    table
        .iter()
        .map(|row| {
            let weight: u64 = row.iter().sum();
            weight as f64 / total as f64 * entropy(row)
        })
        .sum()
}

/// Symmetric uncertainty `2 * IG(X, Y) / (H(X) + H(Y))` from a contingency
/// table (rows: values of `Y`, columns: values of `X`). Ranges over `[0, 1]`,
/// is symmetric in its arguments, and is defined as 0 when both variables
/// are constant.
pub fn symmetric_uncertainty(table: &[Vec<u64>]) -> f64 {
    let row_sums: Vec<u64> = table.iter().map(|row| row.iter().sum()).collect();
    let width = table.iter().map(Vec::len).max().unwrap_or(0);
    let mut column_sums = vec![0u64; width];
    for row in table {
        for (column, &count) in row.iter().enumerate() {
            column_sums[column] += count;
        }
    }
    let h_rows = entropy(&row_sums);
    let h_columns = entropy(&column_sums);
    if h_rows + h_columns == 0.0 {
        return 0.0;
    }
    let information_gain = h_columns - conditional_entropy(table);
    2.0 * information_gain / (h_rows + h_columns)
}

/// Builds the contingency table of two equally long discrete sequences;
/// rows index the values of `a`, columns the values of `b`. Values are
/// mapped to consecutive indices in ascending order.
pub fn contingency_table(a: &[usize], b: &[usize]) -> Vec<Vec<u64>> {
    assert_eq!(a.len(), b.len(), "sequences differ in length");
    let rows = a.iter().max().map_or(0, |&m| m + 1);
    let columns = b.iter().max().map_or(0, |&m| m + 1);
    let mut table = vec![vec![0u64; columns]; rows];
    for (&x, &y) in a.iter().zip(b) {
        table[x][y] += 1;
    }
    table
}

fn class_ids(labels: &[i8]) -> Vec<usize> {
    let distinct: BTreeMap<i8, usize> = labels
        .iter()
        .copied()
        .collect::<std::collections::BTreeSet<i8>>()
        .into_iter()
        .enumerate()
        .map(|(id, label)| (label, id))
        .collect();
    labels.iter().map(|l| distinct[l]).collect()
}

fn counts_of(ids: &[usize]) -> Vec<u64> {
    let width = ids.iter().max().map_or(0, |&m| m + 1);
    let mut counts = vec![0u64; width];
    for &id in ids {
        counts[id] += 1;
    }
    counts
}

/// Cut points for `values` chosen by recursive binary partitioning under
/// the minimum-description-length stopping rule: a cut minimizing the
/// class-entropy of the two halves is accepted only when its information
/// gain exceeds `(log2(n - 1) + delta) / n`, where `delta` accounts for the
/// classes appearing on each side. Returns the accepted cuts in ascending
/// order; an empty result means the feature carries too little class
/// information to discretize.
pub fn mdl_discretize(values: &[f64], labels: &[i8]) -> Result<Vec<f64>, FeatureSelectionError> {
    if values.len() != labels.len() {
        return Err(FeatureSelectionError::LengthMismatch {
            values: values.len(),
            labels: labels.len(),
        });
    }
    if values.is_empty() {
        return Err(FeatureSelectionError::EmptyInput);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(FeatureSelectionError::NonFinite);
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .expect("finite values")
            .then(a.cmp(&b))
    });
    let sorted_values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let sorted_ids: Vec<usize> = {
        let ids = class_ids(labels);
        order.iter().map(|&i| ids[i]).collect()
    };
    let mut cuts = Vec::new();
    split_range(&sorted_values, &sorted_ids, 0, values.len(), &mut cuts);
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite cuts"));
    Ok(cuts)
}

fn split_range(
    values: &[f64],
    class_ids: &[usize],
    lo: usize,
    hi: usize,
    cuts: &mut Vec<f64>,
) {
    let n = hi - lo;
    if n < 2 {
        return;
    }
    let total_counts = counts_of(&class_ids[lo..hi]);
    let h_all = entropy(&total_counts);
    if h_all == 0.0 {
        return;
    }
    let width = total_counts.len().max(
        class_ids[lo..hi]
            .iter()
            .max()
            .map_or(0, |&m| m + 1),
    );
    let mut left = vec![0u64; width];
    let mut best: Option<(f64, usize)> = None;
    for position in (lo + 1)..hi {
        left[class_ids[position - 1]] += 1;
        if values[position] <= values[position - 1] {
            continue;
        }
        let right: Vec<u64> = total_counts
            .iter()
            .enumerate()
            .map(|(class, &count)| count - left.get(class).copied().unwrap_or(0))
            .collect();
        let left_weight = (position - lo) as f64 / n as f64;
        let weighted =
            left_weight * entropy(&left) + (1.0 - left_weight) * entropy(&right);
        if best.is_none_or(|(w, _)| weighted < w) {
            best = Some((weighted, position));
        }
    }
    let Some((weighted, position)) = best else {
        return;
    };
    let left_counts = counts_of(&class_ids[lo..position]);
    let right_counts = counts_of(&class_ids[position..hi]);
    let classes = total_counts.iter().filter(|&&c| c > 0).count() as f64;
    let classes_left = left_counts.iter().filter(|&&c| c > 0).count() as f64;
    let classes_right = right_counts.iter().filter(|&&c| c > 0).count() as f64;
    let gain = h_all - weighted;
    let delta = (3f64.powf(classes) - 2.0).log2()
        - (classes * h_all
            - classes_left * entropy(&left_counts)
            - classes_right * entropy(&right_counts));
    let threshold = (((n - 1) as f64).log2() + delta) / n as f64;
    if gain <= threshold {
        return;
    }
    cuts.push((values[position - 1] + values[position]) / 2.0);
    split_range(values, class_ids, lo, position, cuts);
    split_range(values, class_ids, position, hi, cuts);
}

/// Maps each value to the index of its interval in the ascending `cuts`
/// list: values at or below a cut land on its left.
pub fn assign_bins(values: &[f64], cuts: &[f64]) -> Vec<usize> {
    values
        .iter()
        .map(|&v| cuts.iter().take_while(|&&cut| v > cut).count())
        .collect()
}

/// Subset merit: `k * r_cf / sqrt(k + k (k - 1) * r_ff)`, where `r_cf` is
/// the mean feature-class correlation and `r_ff` the mean feature-feature
/// correlation of the `k` chosen features. With one feature it reduces to
/// `r_cf`; an empty subset has merit 0.
pub fn merit(k: usize, r_cf: f64, r_ff: f64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let k = k as f64;
    k * r_cf / (k + k * (k - 1.0) * r_ff).sqrt()
}

/// Discretized feature columns plus the correlation matrices the filter
/// search runs on.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrices {
    /// Symmetric uncertainty of each feature with the class.
    pub with_class: Vec<f64>,
    /// Pairwise symmetric uncertainty between features.
    pub between: Vec<Vec<f64>>,
    /// Discretization cut points per feature.
    pub cuts: Vec<Vec<f64>>,
}

fn columns_of(x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, FeatureSelectionError> {
    if x.is_empty() {
        return Err(FeatureSelectionError::EmptyInput);
    }
    let width = x[0].len();
    if x.iter().any(|row| row.len() != width) {
        return Err(FeatureSelectionError::DimensionMismatch);
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(FeatureSelectionError::NonFinite);
    }
    Ok((0..width)
        .map(|column| x.iter().map(|row| row[column]).collect())
        .collect())
}

/// Discretizes every feature column against the labels and computes the
/// symmetric-uncertainty matrices used by [`filter_select`].
pub fn correlation_matrices(
    x: &[Vec<f64>],
    y: &[i8],
) -> Result<CorrelationMatrices, FeatureSelectionError> {
    let columns = columns_of(x)?;
    if x.len() != y.len() {
        return Err(FeatureSelectionError::LengthMismatch {
            values: x.len(),
            labels: y.len(),
        });
    }
    let labels = class_ids(y);
    let mut cuts = Vec::with_capacity(columns.len());
    let mut bins = Vec::with_capacity(columns.len());
    for column in &columns {
        let column_cuts = mdl_discretize(column, y)?;
        bins.push(assign_bins(column, &column_cuts));
        cuts.push(column_cuts);
    }
    let with_class: Vec<f64> = bins
        .iter()
        .map(|feature| symmetric_uncertainty(&contingency_table(&labels, feature)))
        .collect();
    let mut between = vec![vec![0.0; columns.len()]; columns.len()];
    for i in 0..columns.len() {
        between[i][i] = symmetric_uncertainty(&contingency_table(&bins[i], &bins[i]));
        for j in 0..i {
            let su = symmetric_uncertainty(&contingency_table(&bins[i], &bins[j]));
            between[i][j] = su;
            between[j][i] = su;
        }
    }
    Ok(CorrelationMatrices {
        with_class,
        between,
        cuts,
    })
}

/// Merit of a subset of 0-based feature indices under precomputed matrices.
pub fn subset_merit(subset: &[usize], matrices: &CorrelationMatrices) -> f64 {
    let k = subset.len();
    if k == 0 {
        return 0.0;
    }
    let r_cf = subset.iter().map(|&i| matrices.with_class[i]).sum::<f64>() / k as f64;
    let r_ff = if k < 2 {
        0.0
    } else {
        let mut sum = 0.0;
        for (slot, &i) in subset.iter().enumerate() {
            for &j in &subset[slot + 1..] {
                sum += matrices.between[i][j];
            }
        }
        sum / (k * (k - 1) / 2) as f64
    };
    merit(k, r_cf, r_ff)
}

/// One accepted step of a greedy subset search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionStep {
    /// Step number, starting at 1.
    pub step: usize,
    /// 1-based index of the feature added at this step.
    pub feature_index: usize,
    /// Human-readable description of the feature.
    pub description: String,
    /// Score of the subset after adding the feature: subset merit for the
    /// filter search, mean cross-validated accuracy for the wrapper search.
    pub score: f64,
}

/// The ordered outcome of a subset search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionOutcome {
    /// Accepted steps in order.
    pub steps: Vec<SelectionStep>,
}

impl SelectionOutcome {
    /// The selected 1-based feature indices in selection order.
    pub fn selected_indices(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.feature_index).collect()
    }

    /// Score after the final step, or `None` for an empty selection.
    pub fn final_score(&self) -> Option<f64> {
        self.steps.last().map(|s| s.score)
    }
}

/// Placeholder names `f1, f2, ...` for unnamed feature columns.
pub fn default_feature_names(width: usize) -> Vec<String> {
    (1..=width).map(|i| format!("f{i}")).collect()
}

fn check_descriptions(
    descriptions: &[String],
    features: usize,
) -> Result<(), FeatureSelectionError> {
    if descriptions.len() != features {
        return Err(FeatureSelectionError::DescriptionMismatch {
            descriptions: descriptions.len(),
            features,
        });
    }
    Ok(())
}

/// Greedy forward filter selection: starting from the empty subset, add the
/// feature that increases the subset merit most, lowest index on ties, and
/// stop when no addition strictly improves it.
pub fn filter_select(
    x: &[Vec<f64>],
    y: &[i8],
    descriptions: &[String],
) -> Result<SelectionOutcome, FeatureSelectionError> {
    let matrices = correlation_matrices(x, y)?;
    check_descriptions(descriptions, matrices.with_class.len())?;
    let width = matrices.with_class.len();
    let mut selected: Vec<usize> = Vec::new();
    let mut current = 0.0f64;
    let mut steps = Vec::new();
    loop {
        let mut best: Option<(f64, usize)> = None;
        for feature in 0..width {
            if selected.contains(&feature) {
                continue;
            }
            let mut candidate = selected.clone();
            candidate.push(feature);
            let score = subset_merit(&candidate, &matrices);
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, feature));
            }
        }
        let Some((score, feature)) = best else {
            break;
        };
        if score <= current {
            break;
        }
        selected.push(feature);
        current = score;
        steps.push(SelectionStep {
            step: steps.len() + 1,
            feature_index: feature + 1,
            description: descriptions[feature].clone(),
            score,
        });
    }
    Ok(SelectionOutcome { steps })
}

/// The best subset by exhaustive enumeration of all non-empty subsets.
/// Exponential; refuses more than 20 features. Ties prefer the subset found
/// first in mask order. Returns 1-based indices and the merit.
pub fn exhaustive_filter(
    x: &[Vec<f64>],
    y: &[i8],
) -> Result<(Vec<usize>, f64), FeatureSelectionError> {
    let matrices = correlation_matrices(x, y)?;
    let width = matrices.with_class.len();
    if width > 20 {
        return Err(FeatureSelectionError::TooManyFeatures {
            limit: 20,
            got: width,
        });
    }
    let mut best_subset = Vec::new();
    let mut best_merit = f64::NEG_INFINITY;
    for mask in 1u32..(1 << width) {
        let subset: Vec<usize> = (0..width).filter(|&f| mask & (1 << f) != 0).collect();
        let m = subset_merit(&subset, &matrices);
        if m > best_merit {
            best_merit = m;
            best_subset = subset;
        }
    }
    Ok((best_subset.iter().map(|&f| f + 1).collect(), best_merit))
}

fn project(x: &[Vec<f64>], subset: &[usize]) -> Vec<Vec<f64>> {
    x.iter()
        .map(|row| subset.iter().map(|&f| row[f]).collect())
        .collect()
}

/// The outcome of the wrapper search: the winning subset together with the
/// grid cell it was found under.
#[derive(Debug, Clone, PartialEq)]
pub struct WrapperOutcome {
    /// The winning subset search.
    pub selection: SelectionOutcome,
    /// Winning box constraint.
    pub c: f64,
    /// Winning kernel width.
    pub gamma: f64,
    /// Mean cross-validated accuracy of the winning subset.
    pub cv_accuracy: f64,
}

/// Wrapper selection: for every grid cell, grow a subset greedily by mean
/// `k`-fold cross-validated accuracy of the classifier trained on it (folds
/// are fixed once from `seed`, lowest feature index on ties, stop when no
/// addition strictly improves). The cell with the best final accuracy wins;
/// ties go to the earlier grid cell.
pub fn wrapper_select(
    x: &[Vec<f64>],
    y: &[i8],
    grid: &Grid,
    k: usize,
    seed: u64,
    descriptions: &[String],
) -> Result<WrapperOutcome, FeatureSelectionError> {
    let columns = columns_of(x)?;
    check_descriptions(descriptions, columns.len())?;
    if grid.is_empty() {
        return Err(ModelSelectionError::EmptyGrid.into());
    }
    let mut fold_rng = ChaCha8Rng::seed_from_u64(seed);
    fold_rng.set_stream(FOLDS_STREAM);
    let folds = stratified_kfold(y, k, &mut fold_rng).map_err(ModelSelectionError::from)?;
    let width = columns.len();
    let candidates: Vec<(SelectionOutcome, f64)> = grid
        .points()
        .par_iter()
        .map(|&point| greedy_wrapper_for_cell(x, y, point, &folds, width, descriptions))
        .collect::<Result<_, _>>()?;
    let mut best: Option<usize> = None;
    for (index, (_, score)) in candidates.iter().enumerate() {
        if best.is_none_or(|b| *score > candidates[b].1) {
            best = Some(index);
        }
    }
    let best = best.expect("grid is non-empty");
    let point = grid.points()[best];
    let (selection, cv_accuracy) = candidates.into_iter().nth(best).expect("index in range");
    Ok(WrapperOutcome {
        selection,
        c: point.c,
        gamma: point.gamma,
        cv_accuracy,
    })
}

fn greedy_wrapper_for_cell(
    x: &[Vec<f64>],
    y: &[i8],
    point: GridPoint,
    folds: &[Vec<usize>],
    width: usize,
    descriptions: &[String],
) -> Result<(SelectionOutcome, f64), FeatureSelectionError> {
    let mut selected: Vec<usize> = Vec::new();
    let mut current = f64::NEG_INFINITY;
    let mut steps = Vec::new();
    loop {
        let mut best: Option<(f64, usize)> = None;
        for feature in 0..width {
            if selected.contains(&feature) {
                continue;
            }
            let mut candidate = selected.clone();
            candidate.push(feature);
            let outcome = cross_validate(&project(x, &candidate), y, point, folds)?;
            let score = outcome.mean_accuracy();
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, feature));
            }
        }
        let Some((score, feature)) = best else {
            break;
        };
        if score <= current {
            break;
        }
        selected.push(feature);
        current = score;
        steps.push(SelectionStep {
            step: steps.len() + 1,
            feature_index: feature + 1,
            description: descriptions[feature].clone(),
            score,
        });
    }
    Ok((SelectionOutcome { steps }, current))
}

/// One prefix of the accuracy curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Number of leading features of the ordering used.
    pub prefix: usize,
    /// Mean cross-validated accuracy on the training part.
    pub cv_accuracy: f64,
    /// Accuracy on the held-out part.
    pub test_accuracy: f64,
}

/// Evaluates growing prefixes of a feature ordering: the data is split once
/// (streams of `seed`), and every prefix is scored by `k`-fold
/// cross-validated accuracy on the training part and by held-out accuracy
/// of a model refitted on the whole training part. `ordering` holds 1-based
/// feature indices.
#[allow(clippy::too_many_arguments)]
pub fn accuracy_curve(
    x: &[Vec<f64>],
    y: &[i8],
    ordering: &[usize],
    point: GridPoint,
    k: usize,
    train_fraction: f64,
    seed: u64,
) -> Result<Vec<CurvePoint>, FeatureSelectionError> {
    let columns = columns_of(x)?;
    let width = columns.len();
    if ordering.is_empty() {
        return Err(FeatureSelectionError::EmptyInput);
    }
    let mut seen = vec![false; width];
    for &index in ordering {
        if index == 0 || index > width || seen[index - 1] {
            return Err(FeatureSelectionError::InvalidFeatureIndex(index));
        }
        seen[index - 1] = true;
    }
    let mut split_rng = ChaCha8Rng::seed_from_u64(seed);
    split_rng.set_stream(SPLIT_STREAM);
    let (train_indices, test_indices) =
        stratified_split(y, train_fraction, &mut split_rng).map_err(ModelSelectionError::from)?;
    let train_x: Vec<Vec<f64>> = train_indices.iter().map(|&i| x[i].clone()).collect();
    let train_y: Vec<i8> = train_indices.iter().map(|&i| y[i]).collect();
    let test_x: Vec<Vec<f64>> = test_indices.iter().map(|&i| x[i].clone()).collect();
    let test_y: Vec<i8> = test_indices.iter().map(|&i| y[i]).collect();
    let mut fold_rng = ChaCha8Rng::seed_from_u64(seed);
    fold_rng.set_stream(FOLDS_STREAM);
    let folds = stratified_kfold(&train_y, k, &mut fold_rng).map_err(ModelSelectionError::from)?;
    let mut curve = Vec::with_capacity(ordering.len());
    for prefix in 1..=ordering.len() {
        let subset: Vec<usize> = ordering[..prefix].iter().map(|&i| i - 1).collect();
        let cv = cross_validate(&project(&train_x, &subset), &train_y, point, &folds)?;
        let model = fit_standardized(
            &project(&train_x, &subset),
            &train_y,
            &SvmParams::new(point.c, point.gamma),
        )?;
        let counts = evaluate(&model, &project(&test_x, &subset), &test_y)?;
        curve.push(CurvePoint {
            prefix,
            cv_accuracy: cv.mean_accuracy(),
            test_accuracy: svm::accuracy(&counts).map_err(ModelSelectionError::from)?,
        });
    }
    Ok(curve)
}
