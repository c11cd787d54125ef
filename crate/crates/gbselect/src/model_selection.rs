//! Data preparation and hyperparameter search for the classifier.
//!
//! The pieces compose into the evaluation protocol used throughout the
//! toolkit: split the data into stratified train and test parts, search a
//! grid of `(C, gamma)` pairs by stratified 5-fold cross-validation scored
//! with the Matthews correlation coefficient, refit the best pair on the
//! whole training part, and report metrics on the held-out part.
//!
//! Standardization is always fitted on training rows only and replayed on
//! anything evaluated against the resulting model.

use crate::svm::{self, ConfusionCounts, SvmError, SvmModel, SvmParams};
use crate::{FOLDS_STREAM, SPLIT_STREAM};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Errors from splitting, cross-validation, and grid search.
#[derive(Debug, Error)]
pub enum ModelSelectionError {
    /// No rows were supplied.
    #[error("input is empty")]
    EmptyInput,
    /// Features and labels disagree in length.
    #[error("got {features} feature rows but {labels} labels")]
    LengthMismatch {
        /// Number of feature rows.
        features: usize,
        /// Number of labels.
        labels: usize,
    },
    /// Feature rows disagree on dimension.
    #[error("feature rows disagree on dimension")]
    DimensionMismatch,
    /// The training fraction must lie strictly between 0 and 1.
    #[error("train fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    /// Cross-validation needs at least two folds.
    #[error("fold count must be at least 2, got {0}")]
    InvalidFoldCount(usize),
    /// Every class must be large enough for the requested stratification.
    #[error("class {label} has only {size} samples, needs at least {required}")]
    ClassTooSmall {
        /// The class label.
        label: i8,
        /// Number of samples with that label.
        size: usize,
        /// Minimum required.
        required: usize,
    },
    /// The grid holds no `(C, gamma)` pairs.
    #[error("hyperparameter grid is empty")]
    EmptyGrid,
    /// Training failed in every fold of every grid cell.
    #[error("no grid cell trained successfully")]
    AllCellsFailed,
    /// A fold index set points outside the data.
    #[error("fold refers to row {0}, beyond the {1} supplied rows")]
    FoldOutOfRange(usize, usize),
    /// An underlying classifier error.
    #[error(transparent)]
    Svm(#[from] SvmError),
}

/// Per-column affine map `(x - mean) / scale` fitted on training rows.
///
/// The scale is the population standard deviation; constant columns get
/// scale 1 so they map to exact zeros instead of amplified rounding noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    means: Vec<f64>,
    scales: Vec<f64>,
}

impl Standardizer {
    /// Fits means and scales on `rows`.
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self, ModelSelectionError> {
        if rows.is_empty() {
            return Err(ModelSelectionError::EmptyInput);
        }
        let dim = rows[0].len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(ModelSelectionError::DimensionMismatch);
        }
        let n = rows.len() as f64;
        let mut means = vec![0.0; dim];
        let mut scales = vec![0.0; dim];
        for column in 0..dim {
            let first = rows[0][column];
            if rows.iter().all(|r| r[column] == first) {
                means[column] = first;
                scales[column] = 1.0;
                continue;
            }
            let mean = rows.iter().map(|r| r[column]).sum::<f64>() / n;
            let variance = rows
                .iter()
                .map(|r| {
                    let d = r[column] - mean;
                    d * d
                })
                .sum::<f64>()
                / n;
            means[column] = mean;
            scales[column] = if variance > 0.0 { variance.sqrt() } else { 1.0 };
        }
        Ok(Self { means, scales })
    }

    /// Number of columns the standardizer was fitted on.
    pub fn dim(&self) -> usize {
        self.means.len()
    }

    /// Fitted column means.
    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// Fitted column scales.
    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    /// Standardizes one row.
    ///
    /// # Panics
    ///
    /// Panics if the row has the wrong dimension.
    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        assert_eq!(row.len(), self.dim(), "row dimension mismatch");
        row.iter()
            .zip(self.means.iter().zip(&self.scales))
            .map(|(x, (mean, scale))| (x - mean) / scale)
            .collect()
    }

    /// Standardizes a batch of rows.
    pub fn transform(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.transform_row(r)).collect()
    }
}

fn classes(labels: &[i8]) -> BTreeMap<i8, Vec<usize>> {
    let mut map: BTreeMap<i8, Vec<usize>> = BTreeMap::new();
    for (index, &label) in labels.iter().enumerate() {
        map.entry(label).or_default().push(index);
    }
    map
}

/// Splits row indices into train and test parts preserving class
/// proportions. The training part holds `floor(fraction * n)` rows overall;
/// per class the count starts at `round(fraction * class_size)` and is
/// nudged by one where needed, adjusting the class whose rounded count
/// deviates most from its exact share. Both returned index lists are sorted.
pub fn stratified_split(
    labels: &[i8],
    train_fraction: f64,
    rng: &mut impl Rng,
) -> Result<(Vec<usize>, Vec<usize>), ModelSelectionError> {
    if labels.is_empty() {
        return Err(ModelSelectionError::EmptyInput);
    }
    if !train_fraction.is_finite() || train_fraction <= 0.0 || train_fraction >= 1.0 {
        return Err(ModelSelectionError::InvalidFraction(train_fraction));
    }
    let by_class = classes(labels);
    let target_total = (train_fraction * labels.len() as f64).floor() as usize;
    let order: Vec<i8> = by_class.keys().copied().collect();
    let exact: BTreeMap<i8, f64> = by_class
        .iter()
        .map(|(&label, members)| (label, train_fraction * members.len() as f64))
        .collect();
    let mut take: BTreeMap<i8, usize> = exact
        .iter()
        .map(|(&label, &share)| (label, share.round() as usize))
        .collect();
    loop {
        let total: usize = take.values().sum();
        if total == target_total {
            break;
        }
        if total > target_total {
            let candidate = order
                .iter()
                .filter(|label| take[label] > 0)
                .max_by(|a, b| {
                    let excess_a = take[*a] as f64 - exact[*a];
                    let excess_b = take[*b] as f64 - exact[*b];
                    excess_a.partial_cmp(&excess_b).expect("finite shares")
                })
                .copied()
                .expect("a positive class count exists while total > 0");
            *take.get_mut(&candidate).expect("known class") -= 1;
        } else {
            let candidate = order
                .iter()
                .filter(|label| take[label] < by_class[label].len())
                .max_by(|a, b| {
                    let deficit_a = exact[*a] - take[*a] as f64;
                    let deficit_b = exact[*b] - take[*b] as f64;
                    deficit_a.partial_cmp(&deficit_b).expect("finite shares")
                })
                .copied()
                .expect("an incomplete class exists while total < n");
            *take.get_mut(&candidate).expect("known class") += 1;
        }
    }
    let mut train = Vec::with_capacity(target_total);
    let mut test = Vec::with_capacity(labels.len() - target_total);
    for (label, members) in &by_class {
        let mut shuffled = members.clone();
        shuffled.shuffle(rng);
        let cut = take[label];
        train.extend_from_slice(&shuffled[..cut]);
        test.extend_from_slice(&shuffled[cut..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Partitions row indices into `k` stratified folds. Within each class the
/// shuffled members are dealt out as evenly as possible; the folds that
/// receive one extra member rotate across classes, so fold sizes differ by
/// at most one overall. Every class must have at least `k` members. Each
/// returned fold is sorted.
pub fn stratified_kfold(
    labels: &[i8],
    k: usize,
    rng: &mut impl Rng,
) -> Result<Vec<Vec<usize>>, ModelSelectionError> {
    if labels.is_empty() {
        return Err(ModelSelectionError::EmptyInput);
    }
    if k < 2 {
        return Err(ModelSelectionError::InvalidFoldCount(k));
    }
    let by_class = classes(labels);
    for (&label, members) in &by_class {
        if members.len() < k {
            return Err(ModelSelectionError::ClassTooSmall {
                label,
                size: members.len(),
                required: k,
            });
        }
    }
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut cursor = 0usize;
    for members in by_class.values() {
        let mut shuffled = members.clone();
        shuffled.shuffle(rng);
        let base = shuffled.len() / k;
        let extras = shuffled.len() % k;
        let mut offset = 0;
        for fold_index in 0..k {
            let bonus = usize::from((fold_index + k - cursor) % k < extras);
            let size = base + bonus;
            folds[fold_index].extend_from_slice(&shuffled[offset..offset + size]);
            offset += size;
        }
        cursor = (cursor + extras) % k;
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

/// One `(C, gamma)` cell of a hyperparameter grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    /// Box constraint.
    pub c: f64,
    /// Kernel width.
    pub gamma: f64,
}

/// A finite set of `(C, gamma)` pairs to search.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<GridPoint>,
}

impl Grid {
    /// The full search grid: `gamma` over `2^-15 .. 2^3` and `C` over
    /// `2^-5 .. 2^15`, both in steps of one power of two (399 cells).
    pub fn full() -> Self {
        Self::from_exponents(-5..=15, -15..=3)
    }

    /// The reduced grid used when the full one is too expensive: `C` over
    /// `2^5 .. 2^10` and `gamma` over `2^-10 .. 2^-5` (36 cells).
    pub fn reduced() -> Self {
        Self::from_exponents(5..=10, -10..=-5)
    }

    /// Grid over all pairs of the given powers of two.
    pub fn from_exponents(
        c_exponents: std::ops::RangeInclusive<i32>,
        gamma_exponents: std::ops::RangeInclusive<i32>,
    ) -> Self {
        let cs: Vec<f64> = c_exponents.map(|e| (e as f64).exp2()).collect();
        let gammas: Vec<f64> = gamma_exponents.map(|e| (e as f64).exp2()).collect();
        Self::from_values(&cs, &gammas)
    }

    /// Grid over the given explicit cells.
    pub fn from_points(points: Vec<GridPoint>) -> Self {
        Self { points }
    }

    /// Grid over all pairs of the given explicit values.
    pub fn from_values(cs: &[f64], gammas: &[f64]) -> Self {
        let mut points = Vec::with_capacity(cs.len() * gammas.len());
        for &c in cs {
            for &gamma in gammas {
                points.push(GridPoint { c, gamma });
            }
        }
        Self { points }
    }

    /// The cells in iteration order.
    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    /// Number of cells.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Whether the grid has no cells.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Metrics of one successfully trained fold of one grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldOutcome {
    /// Fold index within the cross-validation.
    pub fold: usize,
    /// Confusion counts on the held-out fold.
    pub counts: ConfusionCounts,
    /// Matthews correlation coefficient on the held-out fold.
    pub mcc: f64,
    /// Accuracy on the held-out fold.
    pub accuracy: f64,
}

/// Cross-validation result of one grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellOutcome {
    /// Box constraint of the cell.
    pub c: f64,
    /// Kernel width of the cell.
    pub gamma: f64,
    /// Outcomes of the folds that trained successfully.
    pub folds: Vec<FoldOutcome>,
    /// Number of folds whose training failed.
    pub failed_folds: usize,
}

impl CellOutcome {
    /// Mean Matthews correlation coefficient over the successful folds, or
    /// negative infinity when every fold failed.
    pub fn mean_mcc(&self) -> f64 {
        if self.folds.is_empty() {
            return f64::NEG_INFINITY;
        }
        self.folds.iter().map(|f| f.mcc).sum::<f64>() / self.folds.len() as f64
    }

    /// Mean accuracy over the successful folds, or negative infinity when
    /// every fold failed.
    pub fn mean_accuracy(&self) -> f64 {
        if self.folds.is_empty() {
            return f64::NEG_INFINITY;
        }
        self.folds.iter().map(|f| f.accuracy).sum::<f64>() / self.folds.len() as f64
    }
}

/// All cell outcomes of a grid search plus the winning cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchOutcome {
    /// One outcome per grid cell, in grid order.
    pub cells: Vec<CellOutcome>,
    /// Index of the winning cell in `cells`.
    pub best_index: usize,
}

impl GridSearchOutcome {
    /// The winning cell.
    pub fn best(&self) -> &CellOutcome {
        &self.cells[self.best_index]
    }

    /// The winning hyperparameters.
    pub fn best_point(&self) -> GridPoint {
        GridPoint {
            c: self.best().c,
            gamma: self.best().gamma,
        }
    }
}

fn validate_rows(x: &[Vec<f64>], y: &[i8]) -> Result<(), ModelSelectionError> {
    if x.is_empty() {
        return Err(ModelSelectionError::EmptyInput);
    }
    if x.len() != y.len() {
        return Err(ModelSelectionError::LengthMismatch {
            features: x.len(),
            labels: y.len(),
        });
    }
    let dim = x[0].len();
    if x.iter().any(|r| r.len() != dim) {
        return Err(ModelSelectionError::DimensionMismatch);
    }
    Ok(())
}

fn gather<T: Clone>(rows: &[T], indices: &[usize]) -> Vec<T> {
    indices.iter().map(|&i| rows[i].clone()).collect()
}

/// Cross-validates one `(C, gamma)` pair over the given folds and returns
/// the per-fold metrics. Standardization is fitted on each fold's training
/// part. Folds whose training fails are counted, not fatal.
pub fn cross_validate(
    x: &[Vec<f64>],
    y: &[i8],
    point: GridPoint,
    folds: &[Vec<usize>],
) -> Result<CellOutcome, ModelSelectionError> {
    validate_rows(x, y)?;
    if folds.len() < 2 {
        return Err(ModelSelectionError::InvalidFoldCount(folds.len()));
    }
    for fold in folds {
        if let Some(&bad) = fold.iter().find(|&&i| i >= x.len()) {
            return Err(ModelSelectionError::FoldOutOfRange(bad, x.len()));
        }
    }
    let mut outcomes = Vec::with_capacity(folds.len());
    let mut failed = 0usize;
    for held_out in 0..folds.len() {
        let mut train_indices: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|(f, _)| *f != held_out)
            .flat_map(|(_, fold)| fold.iter().copied())
            .collect();
        train_indices.sort_unstable();
        let train_x = gather(x, &train_indices);
        let train_y = gather(y, &train_indices);
        let standardizer = Standardizer::fit(&train_x)?;
        let params = SvmParams::new(point.c, point.gamma);
        match svm::train(&standardizer.transform(&train_x), &train_y, &params) {
            Ok(model) => {
                let mut counts = ConfusionCounts::default();
                for &row in &folds[held_out] {
                    let features = standardizer.transform_row(&x[row]);
                    counts.record(y[row], model.predict(&features)?);
                }
                outcomes.push(FoldOutcome {
                    fold: held_out,
                    mcc: svm::mcc(&counts),
                    accuracy: svm::accuracy(&counts)?,
                    counts,
                });
            }
            Err(
                SvmError::SingleClass | SvmError::EmptyTrainingSet | SvmError::NonFinite,
            ) => failed += 1,
            Err(other) => return Err(other.into()),
        }
    }
    Ok(CellOutcome {
        c: point.c,
        gamma: point.gamma,
        folds: outcomes,
        failed_folds: failed,
    })
}

/// Scores every grid cell by mean cross-validated Matthews correlation over
/// the shared `folds` and picks the best. Ties go to the smallest `C`, then
/// the smallest `gamma`. Cells are independent, so they are evaluated in
/// parallel; the result does not depend on the number of threads.
pub fn grid_search(
    x: &[Vec<f64>],
    y: &[i8],
    grid: &Grid,
    folds: &[Vec<usize>],
) -> Result<GridSearchOutcome, ModelSelectionError> {
    if grid.is_empty() {
        return Err(ModelSelectionError::EmptyGrid);
    }
    validate_rows(x, y)?;
    let cells: Vec<CellOutcome> = grid
        .points()
        .par_iter()
        .map(|&point| cross_validate(x, y, point, folds))
        .collect::<Result<_, _>>()?;
    let mut best_index = None;
    for (index, cell) in cells.iter().enumerate() {
        if cell.folds.is_empty() {
            continue;
        }
        let better = match best_index {
            None => true,
            Some(current) => {
                let incumbent: &CellOutcome = &cells[current];
                let mean = cell.mean_mcc();
                let incumbent_mean = incumbent.mean_mcc();
                mean > incumbent_mean
                    || (mean == incumbent_mean
                        && (cell.c < incumbent.c
                            || (cell.c == incumbent.c && cell.gamma < incumbent.gamma)))
            }
        };
        if better {
            best_index = Some(index);
        }
    }
    let best_index = best_index.ok_or(ModelSelectionError::AllCellsFailed)?;
    Ok(GridSearchOutcome { cells, best_index })
}

/// Standardizes `x`, trains with `params`, and attaches the fitted
/// standardizer so the model consumes raw feature rows.
pub fn fit_standardized(
    x: &[Vec<f64>],
    y: &[i8],
    params: &SvmParams,
) -> Result<SvmModel, ModelSelectionError> {
    validate_rows(x, y)?;
    let standardizer = Standardizer::fit(x)?;
    let model = svm::train(&standardizer.transform(x), y, params)?;
    Ok(model.with_standardizer(standardizer))
}

/// Evaluates `model` on labeled rows and tallies the confusion counts.
pub fn evaluate(
    model: &SvmModel,
    x: &[Vec<f64>],
    y: &[i8],
) -> Result<ConfusionCounts, ModelSelectionError> {
    validate_rows(x, y)?;
    let mut counts = ConfusionCounts::default();
    for (row, &label) in x.iter().zip(y) {
        counts.record(label, model.predict(row)?);
    }
    Ok(counts)
}

/// Result of one run of the repeated evaluation protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatOutcome {
    /// Run number, starting at 0.
    pub run: usize,
    /// Seed the run was derived from.
    pub seed: u64,
    /// Winning box constraint.
    pub c: f64,
    /// Winning kernel width.
    pub gamma: f64,
    /// Accuracy on the run's held-out part.
    pub test_accuracy: f64,
    /// Matthews correlation on the run's held-out part.
    pub test_mcc: f64,
}

/// Runs the full protocol `repeats` times with seeds `base_seed + run`:
/// stratified split, grid search by `k`-fold cross-validation on the
/// training part, refit of the winner, metrics on the held-out part.
#[allow(clippy::too_many_arguments)]
pub fn repeated_runs(
    x: &[Vec<f64>],
    y: &[i8],
    grid: &Grid,
    k: usize,
    train_fraction: f64,
    repeats: usize,
    base_seed: u64,
) -> Result<Vec<RepeatOutcome>, ModelSelectionError> {
    validate_rows(x, y)?;
    let mut outcomes = Vec::with_capacity(repeats);
    for run in 0..repeats {
        let seed = base_seed.wrapping_add(run as u64);
        let mut split_rng = ChaCha8Rng::seed_from_u64(seed);
        split_rng.set_stream(SPLIT_STREAM);
        let (train_indices, test_indices) = stratified_split(y, train_fraction, &mut split_rng)?;
        let train_x = gather(x, &train_indices);
        let train_y = gather(y, &train_indices);
        let test_x = gather(x, &test_indices);
        let test_y = gather(y, &test_indices);
        let mut fold_rng = ChaCha8Rng::seed_from_u64(seed);
        fold_rng.set_stream(FOLDS_STREAM);
        let folds = stratified_kfold(&train_y, k, &mut fold_rng)?;
        let search = grid_search(&train_x, &train_y, grid, &folds)?;
        let best = search.best_point();
        let model = fit_standardized(&train_x, &train_y, &SvmParams::new(best.c, best.gamma))?;
        let counts = evaluate(&model, &test_x, &test_y)?;
        outcomes.push(RepeatOutcome {
            run,
            seed,
            c: best.c,
            gamma: best.gamma,
            test_accuracy: svm::accuracy(&counts)?,
            test_mcc: svm::mcc(&counts),
        });
    }
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn labels(positives: usize, negatives: usize) -> Vec<i8> {
        let mut v = vec![1i8; positives];
        v.extend(std::iter::repeat(-1).take(negatives));
        v
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn two_blobs(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<i8>) {
        let mut r = rng(seed);
        let x = (0..n)
            .map(|i| {
                let center = if i % 2 == 0 { -2.0 } else { 2.0 };
                vec![
                    center + r.gen_range(-1.0..1.0),
                    center + r.gen_range(-1.0..1.0),
                ]
            })
            .collect();
        let y = (0..n).map(|i| if i % 2 == 0 { 1 } else { -1 }).collect();
        (x, y)
    }

    #[test]
    fn standardizer_uses_population_statistics() {
        let rows = vec![vec![1.0, 5.0], vec![3.0, 5.0]];
        let s = Standardizer::fit(&rows).unwrap();
        assert_eq!(s.means(), &[2.0, 5.0]);
        assert_eq!(s.scales(), &[1.0, 1.0]);
        assert_eq!(s.transform_row(&[1.0, 5.0]), vec![-1.0, 0.0]);
        assert_eq!(s.transform_row(&[3.0, 7.0]), vec![1.0, 2.0]);
    }

    #[test]
    fn standardized_columns_have_zero_mean_unit_deviation() {
        let mut r = rng(3);
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|_| vec![r.gen_range(-10.0..10.0), r.gen_range(100.0..200.0)])
            .collect();
        let s = Standardizer::fit(&rows).unwrap();
        let transformed = s.transform(&rows);
        for column in 0..2 {
            let mean: f64 = transformed.iter().map(|r| r[column]).sum::<f64>() / 50.0;
            let var: f64 = transformed
                .iter()
                .map(|r| (r[column] - mean).powi(2))
                .sum::<f64>()
                / 50.0;
            assert_relative_eq!(mean, 0.0, epsilon = 1e-12);
            assert_relative_eq!(var, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn standardizer_rejects_bad_input() {
        assert!(matches!(
            Standardizer::fit(&[]),
            Err(ModelSelectionError::EmptyInput)
        ));
        assert!(matches!(
            Standardizer::fit(&[vec![1.0], vec![1.0, 2.0]]),
            Err(ModelSelectionError::DimensionMismatch)
        ));
    }

    #[test]
    fn split_preserves_class_shares() {
        let y = labels(5, 5);
        let (train, test) = stratified_split(&y, 0.8, &mut rng(1)).unwrap();
        assert_eq!(train.len(), 8);
        assert_eq!(test.len(), 2);
        let train_pos = train.iter().filter(|&&i| y[i] == 1).count();
        let test_pos = test.iter().filter(|&&i| y[i] == 1).count();
        assert_eq!(train_pos, 4);
        assert_eq!(test_pos, 1);
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        assert!(train.windows(2).all(|w| w[0] < w[1]));
        assert!(test.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn split_total_is_floor_of_fraction() {
        let y = labels(531, 531);
        let (train, test) = stratified_split(&y, 0.8, &mut rng(9)).unwrap();
        assert_eq!(train.len(), 849);
        assert_eq!(test.len(), 213);
        let y = labels(4, 3);
        let (train, _) = stratified_split(&y, 0.5, &mut rng(9)).unwrap();
        assert_eq!(train.len(), 3);
        let pos = train.iter().filter(|&&i| y[i] == 1).count();
        assert_eq!(pos, 2);
    }

    #[test]
    fn split_is_deterministic_per_seed() {
        let y = labels(20, 30);
        let a = stratified_split(&y, 0.7, &mut rng(5)).unwrap();
        let b = stratified_split(&y, 0.7, &mut rng(5)).unwrap();
        let c = stratified_split(&y, 0.7, &mut rng(6)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn split_validates_fraction() {
        for fraction in [0.0, 1.0, -0.5, f64::NAN] {
            assert!(matches!(
                stratified_split(&labels(3, 3), fraction, &mut rng(0)),
                Err(ModelSelectionError::InvalidFraction(_))
            ));
        }
        assert!(matches!(
            stratified_split(&[], 0.5, &mut rng(0)),
            Err(ModelSelectionError::EmptyInput)
        ));
    }

    #[test]
    fn kfold_sizes_differ_by_at_most_one() {
        let y = labels(425, 424);
        let folds = stratified_kfold(&y, 5, &mut rng(2)).unwrap();
        let mut sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![169, 170, 170, 170, 170]);
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..849).collect::<Vec<_>>());
        for fold in &folds {
            let pos = fold.iter().filter(|&&i| y[i] == 1).count();
            let neg = fold.len() - pos;
            assert!(pos.abs_diff(neg) <= 1, "unbalanced fold: {pos} vs {neg}");
        }
    }

    #[test]
    fn kfold_validates_input() {
        assert!(matches!(
            stratified_kfold(&labels(10, 10), 1, &mut rng(0)),
            Err(ModelSelectionError::InvalidFoldCount(1))
        ));
        assert!(matches!(
            stratified_kfold(&labels(3, 10), 5, &mut rng(0)),
            Err(ModelSelectionError::ClassTooSmall {
                label: 1,
                size: 3,
                required: 5
            })
        ));
        assert!(matches!(
            stratified_kfold(&[], 2, &mut rng(0)),
            Err(ModelSelectionError::EmptyInput)
        ));
    }

    #[test]
    fn grids_have_documented_shapes() {
        let full = Grid::full();
        assert_eq!(full.len(), 399);
        let gammas: Vec<f64> = full.points().iter().map(|p| p.gamma).collect();
        assert_relative_eq!(
            gammas.iter().copied().fold(f64::INFINITY, f64::min),
            (-15.0f64).exp2()
        );
        assert_relative_eq!(
            gammas.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            8.0
        );
        let cs: Vec<f64> = full.points().iter().map(|p| p.c).collect();
        assert_relative_eq!(cs.iter().copied().fold(f64::INFINITY, f64::min), 0.03125);
        assert_relative_eq!(
            cs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            32768.0
        );
        let reduced = Grid::reduced();
        assert_eq!(reduced.len(), 36);
        assert!(reduced
            .points()
            .iter()
            .all(|p| (32.0..=1024.0).contains(&p.c)));
        assert!(reduced
            .points()
            .iter()
            .all(|p| ((-10.0f64).exp2()..=(-5.0f64).exp2()).contains(&p.gamma)));
    }

    #[test]
    fn grid_search_finds_a_working_cell() {
        let (x, y) = two_blobs(40, 7);
        let folds = stratified_kfold(&y, 5, &mut rng(11)).unwrap();
        let grid = Grid::from_values(&[1.0, 10.0], &[0.1, 1.0]);
        let outcome = grid_search(&x, &y, &grid, &folds).unwrap();
        assert_eq!(outcome.cells.len(), 4);
        for cell in &outcome.cells {
            assert_eq!(cell.folds.len() + cell.failed_folds, 5);
        }
        assert!(outcome.best().mean_mcc() > 0.8);
    }

    #[test]
    fn grid_search_breaks_ties_toward_small_parameters() {
        let (x, y) = two_blobs(30, 13);
        let folds = stratified_kfold(&y, 3, &mut rng(17)).unwrap();
        let grid = Grid::from_values(&[8.0, 2.0], &[0.5]);
        let outcome = grid_search(&x, &y, &grid, &folds).unwrap();
        let a = outcome.cells[0].mean_mcc();
        let b = outcome.cells[1].mean_mcc();
        if a == b {
            assert_eq!(outcome.best().c, 2.0);
        } else {
            let expected = if a > b { 8.0 } else { 2.0 };
            assert_eq!(outcome.best().c, expected);
        }
    }

    #[test]
    fn grid_search_is_thread_count_invariant() {
        let (x, y) = two_blobs(24, 29);
        let folds = stratified_kfold(&y, 3, &mut rng(31)).unwrap();
        let grid = Grid::from_values(&[0.5, 4.0], &[0.25, 2.0]);
        let parallel = grid_search(&x, &y, &grid, &folds).unwrap();
        let serial_pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let serial = serial_pool
            .install(|| grid_search(&x, &y, &grid, &folds))
            .unwrap();
        assert_eq!(parallel, serial);
    }

    #[test]
    fn fit_standardized_predicts_raw_rows() {
        let (x, y) = two_blobs(30, 19);
        let model = fit_standardized(&x, &y, &SvmParams::new(10.0, 0.5)).unwrap();
        assert!(model.standardizer().is_some());
        let counts = evaluate(&model, &x, &y).unwrap();
        assert!(svm::accuracy(&counts).unwrap() > 0.9);
    }

    #[test]
    fn repeated_runs_use_consecutive_seeds() {
        let (x, y) = two_blobs(40, 23);
        let grid = Grid::from_values(&[10.0], &[0.5]);
        let runs = repeated_runs(&x, &y, &grid, 3, 0.8, 3, 100).unwrap();
        assert_eq!(runs.len(), 3);
        assert_eq!(
            runs.iter().map(|r| r.seed).collect::<Vec<_>>(),
            vec![100, 101, 102]
        );
        for run in &runs {
            assert!((0.0..=1.0).contains(&run.test_accuracy));
            assert_eq!(run.c, 10.0);
            assert_eq!(run.gamma, 0.5);
        }
        let again = repeated_runs(&x, &y, &grid, 3, 0.8, 3, 100).unwrap();
        assert_eq!(runs, again);
    }

    proptest! {
        #[test]
        fn split_partitions_indices(
            positives in 2usize..40,
            negatives in 2usize..40,
            fraction in 0.2f64..0.8,
            seed in 0u64..1000,
        ) {
            let y = labels(positives, negatives);
            let (train, test) = stratified_split(&y, fraction, &mut rng(seed)).unwrap();
            prop_assert_eq!(train.len(), (fraction * y.len() as f64).floor() as usize);
            let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..y.len()).collect::<Vec<_>>());
        }

        #[test]
        fn kfold_partitions_indices(
            positives in 5usize..40,
            negatives in 5usize..40,
            k in 2usize..5,
            seed in 0u64..1000,
        ) {
            let y = labels(positives, negatives);
            let folds = stratified_kfold(&y, k, &mut rng(seed)).unwrap();
            prop_assert_eq!(folds.len(), k);
            let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
            let smallest = *sizes.iter().min().unwrap();
            let largest = *sizes.iter().max().unwrap();
            prop_assert!(largest - smallest <= 1);
            let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..y.len()).collect::<Vec<_>>());
        }
    }
}
