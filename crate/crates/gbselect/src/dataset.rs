//! Random problem generation, dataset files, labeling, and feature export.
//!
//! Problems travel as line-oriented JSON (one record per line) so files can
//! be streamed, diffed, and concatenated. Feature matrices, cell-count
//! sidecars, and the various report tables are plain CSV. Generation is
//! sequential on a seeded stream, so a given `(count, profile, seed)` triple
//! always reproduces the same file byte for byte.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{
    after_features, after_width, before_features, before_width, full_features, full_width,
    tnoi_decision, Decision, FeatureError, Problem,
};
use crate::feature_selection::{CurvePoint, SelectionOutcome};
use crate::groebner::{buchberger, GroebnerBasis, GroebnerError};
use crate::model_selection::{GridPoint, GridSearchOutcome, RepeatOutcome};
use crate::polynomial::{Monomial, ParseError, Polynomial, VariableOrder};
use crate::GENERATION_STREAM;

/// Errors from generation, file I/O, and export.
#[derive(Debug, Error)]
pub enum DatasetError {
    /// The requested problem count cannot be split evenly across the degree
    /// classes.
    #[error("problem count {count} is not divisible by the {classes} degree classes")]
    UnevenCount { count: usize, classes: usize },
    /// A generation profile field is out of range.
    #[error("invalid generation profile: {0}")]
    InvalidProfile(String),
    /// A line of an input file failed to parse or validate.
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    /// The same problem id appeared twice.
    #[error("duplicate problem id {0}")]
    DuplicateId(u64),
    /// A cell-count entry referenced an id that is not in the dataset.
    #[error("unknown problem id {0}")]
    UnknownId(u64),
    /// Cell counts must be at least 1.
    #[error("problem {id}: cell counts must be positive")]
    NonPositiveCount { id: u64 },
    /// A record violates an invariant (bad label value, inconsistent label,
    /// lone cell count).
    #[error("problem {id}: {message}")]
    Invalid { id: u64, message: String },
    /// A stored polynomial string failed to parse.
    #[error("problem {id}: {source}")]
    BadPolynomial { id: u64, source: ParseError },
    /// A record could not be turned into a valid problem.
    #[error("problem {id}: {source}")]
    BadProblem { id: u64, source: FeatureError },
    /// Basis computation failed for a record.
    #[error("problem {id}: {source}")]
    Groebner { id: u64, source: GroebnerError },
    /// A row that must carry a label does not.
    #[error("line {0}: row has no label")]
    UnlabeledRow(usize),
    /// A record that must carry a label does not.
    #[error("problem {id} has no label")]
    Unlabeled { id: u64 },
    /// Underlying file I/O failed.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parameters of the random problem generator.
///
/// Each problem consists of two sets of polynomials, the equational set `E`
/// and the constraint set `F`, both drawn from the same distribution.
#[derive(Debug, Clone)]
pub struct GenerationProfile {
    /// Variables of every generated polynomial.
    pub order: VariableOrder,
    /// Upper bound on the number of terms per polynomial.
    pub max_terms: usize,
    /// Coefficients are integers in `[-bound, bound]` excluding 0.
    pub coefficient_bound: i64,
    /// Degree classes; each generated problem belongs to exactly one, which
    /// bounds the total degree of its monomials.
    pub degrees: Vec<u32>,
    /// Number of polynomials in each of the two sets.
    pub polynomials_per_set: usize,
}

impl Default for GenerationProfile {
    fn default() -> Self {
        Self {
            order: VariableOrder::xyz(),
            max_terms: 2,
            coefficient_bound: 20,
            degrees: vec![2, 3, 4],
            polynomials_per_set: 3,
        }
    }
}

impl GenerationProfile {
    /// Checks every field is in range.
    pub fn validate(&self) -> Result<(), DatasetError> {
        if self.order.is_empty() {
            return Err(DatasetError::InvalidProfile(
                "variable order is empty".into(),
            ));
        }
        if self.max_terms == 0 {
            return Err(DatasetError::InvalidProfile(
                "max terms must be at least 1".into(),
            ));
        }
        if self.coefficient_bound <= 0 {
            return Err(DatasetError::InvalidProfile(
                "coefficient bound must be positive".into(),
            ));
        }
        if self.degrees.is_empty() {
            return Err(DatasetError::InvalidProfile(
                "degree class list is empty".into(),
            ));
        }
        if self.degrees.iter().any(|&d| d == 0) {
            return Err(DatasetError::InvalidProfile(
                "degree classes must be at least 1".into(),
            ));
        }
        if self.polynomials_per_set == 0 {
            return Err(DatasetError::InvalidProfile(
                "polynomials per set must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// One problem of the dataset as stored on disk.
///
/// `E` and `F` hold the polynomials in the canonical printed form; the
/// optional fields are filled in by later pipeline stages (basis
/// computation, external cell counting, labeling).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemRecord {
    /// Unique identifier within a file.
    pub id: u64,
    /// Degree class the problem was generated in.
    pub degree: u32,
    /// Equational polynomials.
    #[serde(rename = "E")]
    pub equalities: Vec<String>,
    /// Constraint polynomials.
    #[serde(rename = "F")]
    pub constraints: Vec<String>,
    /// Reduced basis of `E`, once computed.
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    pub groebner: Option<Vec<String>>,
    /// Cell count of the plain problem, measured externally.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells_plain: Option<u64>,
    /// Cell count of the preconditioned problem, measured externally.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells_gb: Option<u64>,
    /// `+1` when preconditioning is beneficial, `-1` otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<i8>,
}

impl ProblemRecord {
    /// Checks the structural invariants that do not require parsing the
    /// polynomial strings.
    pub fn validate(&self) -> Result<(), DatasetError> {
        let invalid = |message: &str| DatasetError::Invalid {
            id: self.id,
            message: message.into(),
        };
        if let Some(label) = self.label {
            if label != 1 && label != -1 {
                return Err(invalid("label must be +1 or -1"));
            }
        }
        if self.cells_plain.is_some() != self.cells_gb.is_some() {
            return Err(invalid("cells_plain and cells_gb must appear together"));
        }
        if let (Some(plain), Some(gb)) = (self.cells_plain, self.cells_gb) {
            if plain == 0 || gb == 0 {
                return Err(DatasetError::NonPositiveCount { id: self.id });
            }
            if let Some(label) = self.label {
                let expected = if gb < plain { 1 } else { -1 };
                if label != expected {
                    return Err(invalid("label contradicts the stored cell counts"));
                }
            }
        }
        Ok(())
    }

    /// Parses the record into a [`Problem`] under `order`, attaching cell
    /// counts and label when present.
    pub fn to_problem(&self, order: &VariableOrder) -> Result<Problem, DatasetError> {
        let equalities = parse_polynomials(self.id, &self.equalities, order)?;
        let constraints = parse_polynomials(self.id, &self.constraints, order)?;
        let mut problem = Problem::new(equalities, constraints).map_err(|source| {
            DatasetError::BadProblem {
                id: self.id,
                source,
            }
        })?;
        if let (Some(plain), Some(gb)) = (self.cells_plain, self.cells_gb) {
            problem = problem
                .with_cell_counts(plain, gb)
                .map_err(|source| DatasetError::BadProblem {
                    id: self.id,
                    source,
                })?;
        }
        if let Some(label) = self.label {
            problem = problem
                .with_label(label)
                .map_err(|source| DatasetError::BadProblem {
                    id: self.id,
                    source,
                })?;
        }
        Ok(problem)
    }

    /// Parses the record and computes (or revalidates) its reduced basis.
    ///
    /// A stored `G` is parsed and run through the basis computation again;
    /// for a valid stored basis this terminates immediately and protects
    /// against hand-edited files.
    pub fn problem_and_basis(
        &self,
        order: &VariableOrder,
    ) -> Result<(Problem, GroebnerBasis), DatasetError> {
        let problem = self.to_problem(order)?;
        let generators = match &self.groebner {
            Some(strings) => parse_polynomials(self.id, strings, order)?,
            None => problem.equalities().to_vec(),
        };
        let basis = buchberger(&generators).map_err(|source| DatasetError::Groebner {
            id: self.id,
            source,
        })?;
        Ok((problem, basis))
    }
}

fn parse_polynomials(
    id: u64,
    strings: &[String],
    order: &VariableOrder,
) -> Result<Vec<Polynomial>, DatasetError> {
    strings
        .iter()
        .map(|s| {
            Polynomial::parse(s, order)
                .map_err(|source| DatasetError::BadPolynomial { id, source })
        })
        .collect()
}

/// Samples a monomial uniformly from all monomials over `profile.order`
/// with total degree between 1 and `degree`.
fn random_monomial(profile: &GenerationProfile, degree: u32, rng: &mut impl Rng) -> Monomial {
    loop {
        let exponents: Vec<u32> = (0..profile.order.len())
            .map(|_| rng.gen_range(0..=degree))
            .collect();
        let total: u32 = exponents.iter().sum();
        if total >= 1 && total <= degree {
            return Monomial::new(exponents);
        }
    }
}

/// Samples a random polynomial: term count uniform in `1..=max_terms`,
/// monomials uniform over total degree `1..=degree` with duplicates
/// resampled, coefficients uniform over the nonzero integers in range.
///
/// The result is always non-zero and non-constant.
pub fn random_polynomial(
    profile: &GenerationProfile,
    degree: u32,
    rng: &mut impl Rng,
) -> Polynomial {
    loop {
        let term_count = rng.gen_range(1..=profile.max_terms);
        let mut monomials: Vec<Monomial> = Vec::with_capacity(term_count);
        while monomials.len() < term_count {
            let monomial = random_monomial(profile, degree, rng);
            if !monomials.contains(&monomial) {
                monomials.push(monomial);
            }
        }
        let bound = profile.coefficient_bound;
        let terms: Vec<(Monomial, BigRational)> = monomials
            .into_iter()
            .map(|monomial| {
                let coeff = loop {
                    let c = rng.gen_range(-bound..=bound);
                    if c != 0 {
                        break c;
                    }
                };
                (monomial, BigRational::from_integer(BigInt::from(coeff)))
            })
            .collect();
        let poly = Polynomial::from_terms(&profile.order, terms);
        if !poly.is_zero() && !poly.is_constant() {
            return poly;
        }
    }
}

/// Generates one unlabeled problem of the given degree class.
pub fn generate_problem(
    profile: &GenerationProfile,
    degree: u32,
    id: u64,
    rng: &mut impl Rng,
) -> ProblemRecord {
    let set = |sample: &mut dyn FnMut() -> Polynomial| -> Vec<String> {
        (0..profile.polynomials_per_set)
            .map(|_| sample().to_string())
            .collect()
    };
    let mut sample = || random_polynomial(profile, degree, rng);
    let equalities = set(&mut sample);
    let constraints = set(&mut sample);
    ProblemRecord {
        id,
        degree,
        equalities,
        constraints,
        groebner: None,
        cells_plain: None,
        cells_gb: None,
        label: None,
    }
}

/// Generates `count` unlabeled problems, split evenly across the profile's
/// degree classes, with ids `1..=count`.
///
/// Generation is sequential on a dedicated stream of the seed, so the same
/// arguments always produce the same records.
pub fn generate_dataset(
    count: usize,
    profile: &GenerationProfile,
    seed: u64,
) -> Result<Vec<ProblemRecord>, DatasetError> {
    profile.validate()?;
    let classes = profile.degrees.len();
    if count % classes != 0 {
        return Err(DatasetError::UnevenCount { count, classes });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(GENERATION_STREAM);
    let per_class = count / classes;
    let mut records = Vec::with_capacity(count);
    let mut id = 0;
    for &degree in &profile.degrees {
        for _ in 0..per_class {
            id += 1;
            records.push(generate_problem(profile, degree, id, &mut rng));
        }
    }
    Ok(records)
}

/// Attaches externally measured cell counts and the labels they imply:
/// `+1` exactly when `cells_gb < cells_plain`, `-1` otherwise (ties count
/// against preconditioning).
pub fn attach_labels(
    records: &mut [ProblemRecord],
    counts: &BTreeMap<u64, (u64, u64)>,
) -> Result<(), DatasetError> {
    let mut by_id: BTreeMap<u64, usize> = BTreeMap::new();
    for (index, record) in records.iter().enumerate() {
        if by_id.insert(record.id, index).is_some() {
            return Err(DatasetError::DuplicateId(record.id));
        }
    }
    for (&id, &(plain, gb)) in counts {
        let &index = by_id.get(&id).ok_or(DatasetError::UnknownId(id))?;
        if plain == 0 || gb == 0 {
            return Err(DatasetError::NonPositiveCount { id });
        }
        let record = &mut records[index];
        record.cells_plain = Some(plain);
        record.cells_gb = Some(gb);
        record.label = Some(if gb < plain { 1 } else { -1 });
    }
    Ok(())
}

/// Labels every record with a deterministic oracle function of the parsed
/// problem and its reduced basis. Stands in for externally measured cell
/// counts when exercising the pipeline.
pub fn attach_labels_with<O>(
    records: &mut [ProblemRecord],
    order: &VariableOrder,
    mut oracle: O,
) -> Result<(), DatasetError>
where
    O: FnMut(&Problem, &GroebnerBasis) -> i8,
{
    for record in records.iter_mut() {
        let (problem, basis) = record.problem_and_basis(order)?;
        record.label = Some(oracle(&problem, &basis));
    }
    Ok(())
}

/// The built-in synthetic labeler: `+1` exactly when the total number of
/// indeterminates strictly decreases under preconditioning.
pub fn tnoi_oracle(problem: &Problem, basis: &GroebnerBasis) -> i8 {
    match tnoi_decision(problem, basis) {
        Decision::Precondition => 1,
        Decision::DoNot => -1,
    }
}

/// Writes records as line-oriented JSON, one record per line.
pub fn write_problems(records: &[ProblemRecord], path: &Path) -> Result<(), DatasetError> {
    let mut writer = BufWriter::new(File::create(path)?);
    for record in records {
        let line = serde_json::to_string(record).expect("problem record serializes");
        writeln!(writer, "{line}")?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a line-oriented problem file, validating every record and
/// rejecting duplicate ids. Blank lines are skipped.
pub fn read_problems(path: &Path) -> Result<Vec<ProblemRecord>, DatasetError> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    let mut seen = BTreeSet::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        let line_number = index + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: ProblemRecord =
            serde_json::from_str(&line).map_err(|e| DatasetError::Line {
                line: line_number,
                message: e.to_string(),
            })?;
        record.validate().map_err(|e| DatasetError::Line {
            line: line_number,
            message: e.to_string(),
        })?;
        if !seen.insert(record.id) {
            return Err(DatasetError::DuplicateId(record.id));
        }
        records.push(record);
    }
    Ok(records)
}

const CELL_COUNT_HEADER: &str = "id,cells_plain,cells_gb";

/// Reads a cell-count sidecar: CSV with columns `id,cells_plain,cells_gb`.
pub fn read_cell_counts(path: &Path) -> Result<BTreeMap<u64, (u64, u64)>, DatasetError> {
    let reader = BufReader::new(File::open(path)?);
    let mut counts = BTreeMap::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        let line_number = index + 1;
        if line_number == 1 {
            if line.trim() != CELL_COUNT_HEADER {
                return Err(DatasetError::Line {
                    line: 1,
                    message: format!("expected header {CELL_COUNT_HEADER:?}"),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(DatasetError::Line {
                line: line_number,
                message: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let parse = |field: &str, what: &str| -> Result<u64, DatasetError> {
            field.trim().parse().map_err(|e| DatasetError::Line {
                line: line_number,
                message: format!("bad {what}: {e}"),
            })
        };
        let id = parse(fields[0], "id")?;
        let plain = parse(fields[1], "cells_plain")?;
        let gb = parse(fields[2], "cells_gb")?;
        if counts.insert(id, (plain, gb)).is_some() {
            return Err(DatasetError::DuplicateId(id));
        }
    }
    Ok(counts)
}

/// Writes a cell-count sidecar in the format [`read_cell_counts`] expects.
pub fn write_cell_counts(
    counts: &BTreeMap<u64, (u64, u64)>,
    path: &Path,
) -> Result<(), DatasetError> {
    let mut writer = BufWriter::new(File::create(path)?);
    writeln!(writer, "{CELL_COUNT_HEADER}")?;
    for (id, (plain, gb)) in counts {
        writeln!(writer, "{id},{plain},{gb}")?;
    }
    writer.flush()?;
    Ok(())
}

/// The three exported feature sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureSet {
    /// Features of the plain problem.
    Before,
    /// Features of the preconditioned problem.
    After,
    /// Both blocks plus the log-ratio features.
    All,
}

impl FeatureSet {
    /// Parses the command-line spelling.
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "before" => Some(Self::Before),
            "after" => Some(Self::After),
            "all" => Some(Self::All),
            _ => None,
        }
    }

    /// 1-based indices of the columns this set exports, in export order.
    pub fn column_indices(self, order: &VariableOrder) -> Vec<usize> {
        let before = before_width(order);
        let after = after_width(order);
        match self {
            Self::Before => (1..=before).collect(),
            Self::After => (before + 1..=before + after).collect(),
            Self::All => (1..=full_width(order)).collect(),
        }
    }

    /// Number of feature columns this set exports.
    pub fn width(self, order: &VariableOrder) -> usize {
        self.column_indices(order).len()
    }

    /// Column names, `f<index>` per exported column.
    pub fn column_names(self, order: &VariableOrder) -> Vec<String> {
        self.column_indices(order)
            .into_iter()
            .map(|i| format!("f{i}"))
            .collect()
    }
}

/// An in-memory feature matrix with optional labels, mirroring the CSV
/// layout.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    /// Column names, excluding the final label column.
    pub names: Vec<String>,
    /// One row of feature values per problem.
    pub rows: Vec<Vec<f64>>,
    /// Per-row label, `None` for unlabeled rows.
    pub labels: Vec<Option<i8>>,
}

impl FeatureTable {
    /// Number of feature columns.
    pub fn width(&self) -> usize {
        self.names.len()
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    /// Whether the table has no rows.
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Splits into `(rows, labels)`, failing on the first unlabeled row.
    /// The reported line number accounts for the CSV header.
    pub fn labeled(&self) -> Result<(Vec<Vec<f64>>, Vec<i8>), DatasetError> {
        let mut labels = Vec::with_capacity(self.labels.len());
        for (index, label) in self.labels.iter().enumerate() {
            labels.push(label.ok_or(DatasetError::UnlabeledRow(index + 2))?);
        }
        Ok((self.rows.clone(), labels))
    }
}

/// Computes the selected feature set for every record, preserving record
/// order. Labels are carried over as-is; they may be absent.
pub fn featurize_records(
    records: &[ProblemRecord],
    set: FeatureSet,
    order: &VariableOrder,
) -> Result<FeatureTable, DatasetError> {
    let mut rows = Vec::with_capacity(records.len());
    let mut labels = Vec::with_capacity(records.len());
    for record in records {
        let (problem, basis) = record.problem_and_basis(order)?;
        let values = match set {
            FeatureSet::Before => before_features(&problem),
            FeatureSet::After => after_features(&problem, &basis),
            FeatureSet::All => full_features(&problem, &basis).map(|(v, _)| v.values().to_vec()),
        }
        .map_err(|source| DatasetError::BadProblem {
            id: record.id,
            source,
        })?;
        rows.push(values);
        labels.push(record.label);
    }
    Ok(FeatureTable {
        names: set.column_names(order),
        rows,
        labels,
    })
}

/// Featurizes `records` and writes the result as CSV.
///
/// With `require_labels`, an unlabeled record is an error; otherwise its
/// label cell is left empty.
pub fn export_features(
    records: &[ProblemRecord],
    set: FeatureSet,
    order: &VariableOrder,
    path: &Path,
    require_labels: bool,
) -> Result<(), DatasetError> {
    if require_labels {
        if let Some(record) = records.iter().find(|r| r.label.is_none()) {
            return Err(DatasetError::Unlabeled { id: record.id });
        }
    }
    let table = featurize_records(records, set, order)?;
    write_feature_csv(&table, path)
}

/// Writes a feature table as CSV: header `f...,label`, one row per problem,
/// empty label cell for unlabeled rows. Values print in shortest
/// round-tripping form, so reading the file back is bit-exact.
pub fn write_feature_csv(table: &FeatureTable, path: &Path) -> Result<(), DatasetError> {
    let mut writer = BufWriter::new(File::create(path)?);
    writeln!(writer, "{},label", table.names.join(","))?;
    for (row, label) in table.rows.iter().zip(&table.labels) {
        for value in row {
            write!(writer, "{value},")?;
        }
        match label {
            Some(label) => writeln!(writer, "{label}")?,
            None => writeln!(writer)?,
        }
    }
    writer.flush()?;
    Ok(())
}

/// Reads a feature CSV produced by [`write_feature_csv`].
pub fn read_feature_csv(path: &Path) -> Result<FeatureTable, DatasetError> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines();
    let header = lines.next().transpose()?.ok_or(DatasetError::Line {
        line: 1,
        message: "missing header".into(),
    })?;
    let mut names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    match names.pop() {
        Some(last) if last == "label" => {}
        _ => {
            return Err(DatasetError::Line {
                line: 1,
                message: "last header column must be \"label\"".into(),
            })
        }
    }
    if names.is_empty() {
        return Err(DatasetError::Line {
            line: 1,
            message: "no feature columns".into(),
        });
    }
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (index, line) in lines.enumerate() {
        let line = line?;
        let line_number = index + 2;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != names.len() + 1 {
            return Err(DatasetError::Line {
                line: line_number,
                message: format!(
                    "expected {} fields, found {}",
                    names.len() + 1,
                    fields.len()
                ),
            });
        }
        let mut row = Vec::with_capacity(names.len());
        for field in &fields[..names.len()] {
            let value: f64 = field.trim().parse().map_err(|e| DatasetError::Line {
                line: line_number,
                message: format!("bad feature value: {e}"),
            })?;
            row.push(value);
        }
        let label_field = fields[names.len()].trim();
        let label = if label_field.is_empty() {
            None
        } else {
            let label: i8 = label_field.parse().map_err(|e| DatasetError::Line {
                line: line_number,
                message: format!("bad label: {e}"),
            })?;
            if label != 1 && label != -1 {
                return Err(DatasetError::Line {
                    line: line_number,
                    message: "label must be +1 or -1".into(),
                });
            }
            Some(label)
        };
        rows.push(row);
        labels.push(label);
    }
    Ok(FeatureTable { names, rows, labels })
}

/// Reads a custom hyperparameter grid: CSV with header `c,gamma`, one cell
/// per row.
pub fn read_grid_csv(path: &Path) -> Result<Vec<GridPoint>, DatasetError> {
    let reader = BufReader::new(File::open(path)?);
    let mut points = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        let line_number = index + 1;
        if line_number == 1 {
            if line.trim() != "c,gamma" {
                return Err(DatasetError::Line {
                    line: 1,
                    message: "expected header \"c,gamma\"".into(),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 {
            return Err(DatasetError::Line {
                line: line_number,
                message: format!("expected 2 fields, found {}", fields.len()),
            });
        }
        let parse = |field: &str, what: &str| -> Result<f64, DatasetError> {
            let value: f64 = field.trim().parse().map_err(|e| DatasetError::Line {
                line: line_number,
                message: format!("bad {what}: {e}"),
            })?;
            if !value.is_finite() || value <= 0.0 {
                return Err(DatasetError::Line {
                    line: line_number,
                    message: format!("{what} must be positive and finite"),
                });
            }
            Ok(value)
        };
        points.push(GridPoint {
            c: parse(fields[0], "c")?,
            gamma: parse(fields[1], "gamma")?,
        });
    }
    Ok(points)
}

/// Reads the ordered `feature_index` column back out of a selection report
/// written by [`write_selection_report`].
pub fn read_selection_indices(path: &Path) -> Result<Vec<usize>, DatasetError> {
    let reader = BufReader::new(File::open(path)?);
    let mut indices = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        let line_number = index + 1;
        if line_number == 1 {
            if line.trim() != "step,feature_index,feature_description,score" {
                return Err(DatasetError::Line {
                    line: 1,
                    message: "expected a selection report header".into(),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 4 {
            return Err(DatasetError::Line {
                line: line_number,
                message: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let feature_index: usize = fields[1].trim().parse().map_err(|e| DatasetError::Line {
            line: line_number,
            message: format!("bad feature_index: {e}"),
        })?;
        indices.push(feature_index);
    }
    Ok(indices)
}

/// Writes every fold outcome of a grid search as CSV with columns
/// `gamma,c,fold,tp,fp,tn,fn,mcc,accuracy`.
pub fn write_cv_report(outcome: &GridSearchOutcome, path: &Path) -> Result<(), DatasetError> {
    let mut writer = BufWriter::new(File::create(path)?);
    writeln!(writer, "gamma,c,fold,tp,fp,tn,fn,mcc,accuracy")?;
    for cell in &outcome.cells {
        for fold in &cell.folds {
            let counts = &fold.counts;
            writeln!(
                writer,
                "{},{},{},{},{},{},{},{},{}",
                cell.gamma,
                cell.c,
                fold.fold,
                counts.true_positives,
                counts.false_positives,
                counts.true_negatives,
                counts.false_negatives,
                fold.mcc,
                fold.accuracy
            )?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Writes a selection run as CSV with columns
/// `step,feature_index,feature_description,score`.
pub fn write_selection_report(
    outcome: &SelectionOutcome,
    path: &Path,
) -> Result<(), DatasetError> {
    let mut writer = BufWriter::new(File::create(path)?);
    writeln!(writer, "step,feature_index,feature_description,score")?;
    for step in &outcome.steps {
        writeln!(
            writer,
            "{},{},{},{}",
            step.step, step.feature_index, step.description, step.score
        )?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes repeated-run outcomes as CSV with columns
/// `run,seed,c,gamma,test_accuracy,test_mcc`.
pub fn write_repeat_report(runs: &[RepeatOutcome], path: &Path) -> Result<(), DatasetError> {
    let mut writer = BufWriter::new(File::create(path)?);
    writeln!(writer, "run,seed,c,gamma,test_accuracy,test_mcc")?;
    for run in runs {
        writeln!(
            writer,
            "{},{},{},{},{},{}",
            run.run, run.seed, run.c, run.gamma, run.test_accuracy, run.test_mcc
        )?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes an accuracy curve as CSV with columns
/// `prefix,cv_accuracy,test_accuracy`.
pub fn write_accuracy_curve(points: &[CurvePoint], path: &Path) -> Result<(), DatasetError> {
    let mut writer = BufWriter::new(File::create(path)?);
    writeln!(writer, "prefix,cv_accuracy,test_accuracy")?;
    for point in points {
        writeln!(
            writer,
            "{},{},{}",
            point.prefix, point.cv_accuracy, point.test_accuracy
        )?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::full_width;
    use crate::groebner::is_groebner_basis;
    use num_traits::{Signed, Zero};
    use std::fs;
    use tempfile::tempdir;

    fn example_record() -> ProblemRecord {
        ProblemRecord {
            id: 1,
            degree: 2,
            equalities: vec![
                "-12*y*z - 3*z".into(),
                "17*x^2 - 6".into(),
                "-2*y*z + 5*x".into(),
            ],
            constraints: vec![
                "-2*y*z - 9*y".into(),
                "-15*x^2 - 19*y".into(),
                "6*x*z + 3".into(),
            ],
            groebner: None,
            cells_plain: None,
            cells_gb: None,
            label: None,
        }
    }

    #[test]
    fn example_record_round_trips_through_file() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("problems.jsonl");
        let record = example_record();
        write_problems(std::slice::from_ref(&record), &path).unwrap();
        let read = read_problems(&path).unwrap();
        assert_eq!(read, vec![record.clone()]);

        let order = VariableOrder::xyz();
        let problem = read[0].to_problem(&order).unwrap();
        let expected: Vec<Polynomial> = record
            .equalities
            .iter()
            .map(|s| Polynomial::parse(s, &order).unwrap())
            .collect();
        assert_eq!(problem.equalities(), expected.as_slice());
    }

    #[test]
    fn example_record_basis_matches_direct_computation() {
        let order = VariableOrder::xyz();
        let record = example_record();
        let (problem, basis) = record.problem_and_basis(&order).unwrap();
        let direct = buchberger(problem.equalities()).unwrap();
        assert_eq!(basis.generators(), direct.generators());
        let expected: Vec<Polynomial> = ["17*x^2 - 6", "4*y + 1", "z + 10*x"]
            .iter()
            .map(|s| Polynomial::parse(s, &order).unwrap())
            .collect();
        assert_eq!(basis.generators(), expected.as_slice());
    }

    #[test]
    fn stored_basis_is_reused_and_revalidated() {
        let order = VariableOrder::xyz();
        let mut record = example_record();
        record.groebner = Some(vec!["17*x^2 - 6".into(), "4*y + 1".into(), "z + 10*x".into()]);
        let (_, basis) = record.problem_and_basis(&order).unwrap();
        let expected: Vec<Polynomial> = ["17*x^2 - 6", "4*y + 1", "z + 10*x"]
            .iter()
            .map(|s| Polynomial::parse(s, &order).unwrap())
            .collect();
        assert_eq!(basis.generators(), expected.as_slice());
    }

    #[test]
    fn generation_is_deterministic_and_stratified() {
        let profile = GenerationProfile::default();
        let first = generate_dataset(12, &profile, 7).unwrap();
        let second = generate_dataset(12, &profile, 7).unwrap();
        assert_eq!(first, second);
        for &degree in &profile.degrees {
            assert_eq!(first.iter().filter(|r| r.degree == degree).count(), 4);
        }
        assert_eq!(
            first.iter().map(|r| r.id).collect::<Vec<_>>(),
            (1..=12).collect::<Vec<_>>()
        );

        let other = generate_dataset(12, &profile, 8).unwrap();
        assert_ne!(first, other);
    }

    #[test]
    fn generated_files_are_byte_identical() {
        let dir = tempdir().unwrap();
        let profile = GenerationProfile::default();
        let records = generate_dataset(6, &profile, 42).unwrap();
        let path_a = dir.path().join("a.jsonl");
        let path_b = dir.path().join("b.jsonl");
        write_problems(&records, &path_a).unwrap();
        write_problems(&generate_dataset(6, &profile, 42).unwrap(), &path_b).unwrap();
        assert_eq!(fs::read(&path_a).unwrap(), fs::read(&path_b).unwrap());
    }

    #[test]
    fn uneven_count_is_rejected() {
        let profile = GenerationProfile::default();
        match generate_dataset(100, &profile, 7) {
            Err(DatasetError::UnevenCount { count: 100, classes: 3 }) => {}
            other => panic!("expected UnevenCount, got {other:?}"),
        }
        assert!(generate_dataset(3, &profile, 7).unwrap().len() == 3);
    }

    #[test]
    fn sampled_polynomials_satisfy_the_profile_bounds() {
        let profile = GenerationProfile::default();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let bound = BigRational::from_integer(BigInt::from(profile.coefficient_bound));
        for i in 0..10_000 {
            let degree = profile.degrees[i % profile.degrees.len()];
            let poly = random_polynomial(&profile, degree, &mut rng);
            assert!(!poly.is_zero());
            assert!(!poly.is_constant());
            assert!(poly.monomial_count() >= 1 && poly.monomial_count() <= profile.max_terms);
            for (monomial, coeff) in poly.terms() {
                assert!(monomial.total_degree() >= 1);
                assert!(monomial.total_degree() <= degree);
                assert!(coeff.is_integer());
                assert!(!coeff.is_zero());
                assert!(coeff.abs() <= bound);
            }
        }
    }

    #[test]
    fn degree_two_profile_never_emits_higher_degree() {
        let profile = GenerationProfile::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2_000 {
            let poly = random_polynomial(&profile, 2, &mut rng);
            assert!(poly.total_degree().unwrap() <= 2);
        }
    }

    #[test]
    fn attach_labels_follows_the_tie_convention() {
        let profile = GenerationProfile::default();
        let mut records = generate_dataset(3, &profile, 5).unwrap();
        let counts: BTreeMap<u64, (u64, u64)> =
            [(1, (100, 60)), (2, (60, 100)), (3, (60, 60))].into();
        attach_labels(&mut records, &counts).unwrap();
        assert_eq!(records[0].label, Some(1));
        assert_eq!(records[1].label, Some(-1));
        assert_eq!(records[2].label, Some(-1));
        assert_eq!(records[0].cells_plain, Some(100));
        assert_eq!(records[0].cells_gb, Some(60));
    }

    #[test]
    fn attach_labels_rejects_bad_counts() {
        let profile = GenerationProfile::default();
        let mut records = generate_dataset(3, &profile, 5).unwrap();
        let unknown: BTreeMap<u64, (u64, u64)> = [(9, (10, 5))].into();
        match attach_labels(&mut records, &unknown) {
            Err(DatasetError::UnknownId(9)) => {}
            other => panic!("expected UnknownId, got {other:?}"),
        }
        let zero: BTreeMap<u64, (u64, u64)> = [(1, (0, 5))].into();
        match attach_labels(&mut records, &zero) {
            Err(DatasetError::NonPositiveCount { id: 1 }) => {}
            other => panic!("expected NonPositiveCount, got {other:?}"),
        }
    }

    #[test]
    fn synthetic_labels_match_the_baseline_decision() {
        let order = VariableOrder::xyz();
        let profile = GenerationProfile::default();
        let mut records = generate_dataset(9, &profile, 11).unwrap();
        attach_labels_with(&mut records, &order, tnoi_oracle).unwrap();
        for record in &records {
            let (problem, basis) = record.problem_and_basis(&order).unwrap();
            let expected = match tnoi_decision(&problem, &basis) {
                Decision::Precondition => 1,
                Decision::DoNot => -1,
            };
            assert_eq!(record.label, Some(expected));
        }
    }

    #[test]
    fn malformed_line_error_names_the_line() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("broken.jsonl");
        let record = serde_json::to_string(&example_record()).unwrap();
        fs::write(&path, format!("{record}\nnot json\n")).unwrap();
        match read_problems(&path) {
            Err(DatasetError::Line { line: 2, .. }) => {}
            other => panic!("expected line-2 error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_id_is_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("dup.jsonl");
        let record = serde_json::to_string(&example_record()).unwrap();
        fs::write(&path, format!("{record}\n{record}\n")).unwrap();
        match read_problems(&path) {
            Err(DatasetError::DuplicateId(1)) => {}
            other => panic!("expected DuplicateId, got {other:?}"),
        }
    }

    #[test]
    fn inconsistent_label_is_rejected_on_read() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        let mut record = example_record();
        record.cells_plain = Some(100);
        record.cells_gb = Some(60);
        record.label = Some(-1);
        fs::write(
            &path,
            format!("{}\n", serde_json::to_string(&record).unwrap()),
        )
        .unwrap();
        match read_problems(&path) {
            Err(DatasetError::Line { line: 1, message }) => {
                assert!(message.contains("contradicts"), "{message}");
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn cell_count_sidecar_round_trips() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("cells.csv");
        let counts: BTreeMap<u64, (u64, u64)> = [(1, (120, 80)), (2, (50, 50))].into();
        write_cell_counts(&counts, &path).unwrap();
        assert_eq!(read_cell_counts(&path).unwrap(), counts);

        fs::write(&path, "id,plain,gb\n1,2,3\n").unwrap();
        match read_cell_counts(&path) {
            Err(DatasetError::Line { line: 1, .. }) => {}
            other => panic!("expected header error, got {other:?}"),
        }
    }

    #[test]
    fn export_widths_match_the_three_sets() {
        let dir = tempdir().unwrap();
        let order = VariableOrder::xyz();
        let profile = GenerationProfile::default();
        let mut records = generate_dataset(6, &profile, 13).unwrap();
        attach_labels_with(&mut records, &order, tnoi_oracle).unwrap();

        for (set, first, width) in [
            (FeatureSet::Before, "f1", 12),
            (FeatureSet::After, "f13", 13),
            (FeatureSet::All, "f1", 28),
        ] {
            let path = dir.path().join(format!("{first}.csv"));
            export_features(&records, set, &order, &path, true).unwrap();
            let table = read_feature_csv(&path).unwrap();
            assert_eq!(table.width(), width);
            assert_eq!(table.names.first().map(String::as_str), Some(first));
            assert_eq!(table.len(), 6);
            assert!(table.labels.iter().all(Option::is_some));
        }
        assert_eq!(full_width(&order), 28);
    }

    #[test]
    fn feature_csv_round_trip_is_bit_exact() {
        let dir = tempdir().unwrap();
        let order = VariableOrder::xyz();
        let profile = GenerationProfile::default();
        let mut records = generate_dataset(6, &profile, 21).unwrap();
        attach_labels_with(&mut records, &order, tnoi_oracle).unwrap();
        let table = featurize_records(&records, FeatureSet::All, &order).unwrap();

        let path = dir.path().join("all.csv");
        write_feature_csv(&table, &path).unwrap();
        let read = read_feature_csv(&path).unwrap();
        assert_eq!(read.names, table.names);
        assert_eq!(read.labels, table.labels);
        for (a, b) in read.rows.iter().flatten().zip(table.rows.iter().flatten()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn unlabeled_export_is_controlled_by_the_flag() {
        let dir = tempdir().unwrap();
        let order = VariableOrder::xyz();
        let profile = GenerationProfile::default();
        let records = generate_dataset(3, &profile, 17).unwrap();

        let strict = dir.path().join("strict.csv");
        match export_features(&records, FeatureSet::Before, &order, &strict, true) {
            Err(DatasetError::Unlabeled { id: 1 }) => {}
            other => panic!("expected Unlabeled, got {other:?}"),
        }

        let lax = dir.path().join("lax.csv");
        export_features(&records, FeatureSet::Before, &order, &lax, false).unwrap();
        let table = read_feature_csv(&lax).unwrap();
        assert!(table.labels.iter().all(Option::is_none));
        match table.labeled() {
            Err(DatasetError::UnlabeledRow(2)) => {}
            other => panic!("expected UnlabeledRow, got {other:?}"),
        }
    }

    #[test]
    fn basis_computation_terminates_on_generated_problems() {
        let order = VariableOrder::xyz();
        let profile = GenerationProfile::default();
        let records = generate_dataset(999, &profile, 2024).unwrap();
        for record in &records {
            let (_, basis) = record.problem_and_basis(&order).unwrap();
            assert!(is_groebner_basis(basis.generators()));
        }
    }
}
