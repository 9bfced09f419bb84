//! Two-level designs, their model matrices and column-correlation criteria.
//!
//! A [`Design`] is an `n x k` matrix with entries in `{-1, +1}`. A
//! [`ModelMatrix`] expands it into main-effect and (optionally) two-factor
//! interaction columns, centered and scaled so that every column has
//! `x'x = n`.

mod criteria;
mod hadamard;

use std::collections::HashSet;
use std::fmt;
use std::io::Read;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use criteria::{criteria_report, es2, ue_s2, vars_plus, CriteriaReport};
pub use hadamard::{hadamard, half_fraction_ssd, plackett_burman};

/// A validated two-level design.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    id: String,
    factor_names: Vec<String>,
    levels: DMatrix<f64>,
}

impl Design {
    /// Builds a design from a `runs x factors` matrix of `+-1` entries.
    pub fn new(id: impl Into<String>, factor_names: Vec<String>, levels: DMatrix<f64>) -> Result<Self> {
        let (n, k) = levels.shape();
        if n < 2 {
            return Err(Error::InvalidDesign(format!("need at least 2 runs, got {n}")));
        }
        if k < 1 {
            return Err(Error::InvalidDesign("need at least 1 factor".into()));
        }
        if factor_names.len() != k {
            return Err(Error::InvalidDesign(format!(
                "{} factor names for {k} columns",
                factor_names.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &factor_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        if let Some(bad) = levels.iter().find(|&&v| v != 1.0 && v != -1.0) {
            return Err(Error::InvalidDesign(format!("entry {bad} is not +-1")));
        }
        Ok(Design {
            id: id.into(),
            factor_names,
            levels,
        })
    }

    /// Builds a design with default factor names `X1..Xk`.
    pub fn from_levels(id: impl Into<String>, levels: DMatrix<f64>) -> Result<Self> {
        let names = (1..=levels.ncols()).map(|j| format!("X{j}")).collect();
        Design::new(id, names, levels)
    }

    /// Parses a design from CSV: a header row of factor names and one run per
    /// row. Each column must take exactly two numeric values; the larger one is
    /// recoded to `+1` and the smaller to `-1`.
    pub fn from_csv_reader<R: Read>(id: impl Into<String>, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let names: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if names.is_empty() || names.iter().all(|s| s.is_empty()) {
            return Err(Error::Parse("missing header row".into()));
        }
        let k = names.len();
        let mut raw: Vec<f64> = Vec::new();
        let mut n = 0usize;
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != k {
                return Err(Error::Parse(format!(
                    "row {} has {} cells, expected {k}",
                    line + 2,
                    record.len()
                )));
            }
            for (j, cell) in record.iter().enumerate() {
                let v: f64 = cell.parse().map_err(|_| {
                    Error::Parse(format!("row {}, column `{}`: `{cell}` is not numeric", line + 2, names[j]))
                })?;
                raw.push(v);
            }
            n += 1;
        }
        let raw = DMatrix::from_row_slice(n, k, &raw);
        let mut levels = DMatrix::zeros(n, k);
        for j in 0..k {
            let mut distinct: Vec<f64> = Vec::new();
            for &v in raw.column(j).iter() {
                if !distinct.contains(&v) {
                    distinct.push(v);
                }
            }
            if distinct.len() != 2 {
                return Err(Error::NotTwoLevel(names[j].clone(), distinct.len()));
            }
            let high = distinct[0].max(distinct[1]);
            for i in 0..n {
                levels[(i, j)] = if raw[(i, j)] == high { 1.0 } else { -1.0 };
            }
        }
        Design::new(id, names, levels)
    }

    /// Loads a design CSV from disk; the id is the file stem.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "design".into());
        Design::from_csv_reader(id, file)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn runs(&self) -> usize {
        self.levels.nrows()
    }

    pub fn factors(&self) -> usize {
        self.levels.ncols()
    }

    pub fn factor_names(&self) -> &[String] {
        &self.factor_names
    }

    pub fn levels(&self) -> &DMatrix<f64> {
        &self.levels
    }

    /// Keeps the first `k` factors.
    pub fn truncate_factors(&self, k: usize) -> Result<Design> {
        if k == 0 || k > self.factors() {
            return Err(Error::InvalidArgument(format!(
                "cannot keep {k} of {} factors",
                self.factors()
            )));
        }
        Design::new(
            format!("{}_k{k}", self.id),
            self.factor_names[..k].to_vec(),
            self.levels.columns(0, k).into_owned(),
        )
    }

    pub fn is_balanced(&self) -> bool {
        self.levels.column_iter().all(|c| c.sum() == 0.0)
    }

    /// Writes the design as CSV with the factor names as header.
    pub fn to_csv(&self) -> String {
        let mut out = self.factor_names.join(",");
        out.push('\n');
        for row in self.levels.row_iter() {
            let cells: Vec<String> = row.iter().map(|v| format!("{}", *v as i32)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// A column of the model matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    MainEffect(usize),
    /// Product of factors `j < l`.
    Interaction(usize, usize),
}

impl Term {
    pub fn is_main_effect(&self) -> bool {
        matches!(self, Term::MainEffect(_))
    }

    pub fn label(&self, names: &[String]) -> String {
        match *self {
            Term::MainEffect(j) => names[j].clone(),
            Term::Interaction(j, l) => format!("{}:{}", names[j], names[l]),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::MainEffect(j) => write!(f, "ME({j})"),
            Term::Interaction(j, l) => write!(f, "2FI({j},{l})"),
        }
    }
}

/// Centered and scaled expansion of a design.
#[derive(Debug, Clone)]
pub struct ModelMatrix {
    design_id: String,
    columns: DMatrix<f64>,
    terms: Vec<Term>,
    term_labels: Vec<String>,
    centered: bool,
    scaled: bool,
    column_norm: f64,
}

/// Relative norm below which a centered column is treated as constant.
const ZERO_NORM_TOL: f64 = 1e-9;

impl ModelMatrix {
    /// Expands `design` into main effects and optionally all `k(k-1)/2`
    /// two-factor interactions. Interaction columns are raw products taken
    /// before centering; when `scale` is set each column is rescaled to
    /// `x'x = n`.
    pub fn build(design: &Design, include_2fi: bool, center: bool, scale: bool) -> Result<Self> {
        let n = design.runs();
        let k = design.factors();
        let x = design.levels();
        let mut terms: Vec<Term> = (0..k).map(Term::MainEffect).collect();
        if include_2fi {
            for j in 0..k {
                for l in (j + 1)..k {
                    terms.push(Term::Interaction(j, l));
                }
            }
        }
        let p = terms.len();
        let mut columns = DMatrix::zeros(n, p);
        for (t, term) in terms.iter().enumerate() {
            let mut col: DVector<f64> = match *term {
                Term::MainEffect(j) => x.column(j).into_owned(),
                Term::Interaction(j, l) => x.column(j).component_mul(&x.column(l)),
            };
            if center {
                let mean = col.mean();
                col.add_scalar_mut(-mean);
            }
            let ss = col.norm_squared();
            if ss <= ZERO_NORM_TOL * n as f64 {
                return Err(Error::ZeroNormColumn(term.label(design.factor_names())));
            }
            if scale {
                col *= (n as f64 / ss).sqrt();
            }
            columns.set_column(t, &col);
        }
        let term_labels = terms.iter().map(|t| t.label(design.factor_names())).collect();
        Ok(ModelMatrix {
            design_id: design.id().to_string(),
            columns,
            terms,
            term_labels,
            centered: center,
            scaled: scale,
            column_norm: n as f64,
        })
    }

    /// Wraps an arbitrary `n x p` matrix as main-effect columns; used for
    /// synthetic problems that do not come from a two-level design.
    pub fn from_columns(design_id: impl Into<String>, columns: DMatrix<f64>) -> Self {
        let p = columns.ncols();
        let n = columns.nrows();
        let terms = (0..p).map(Term::MainEffect).collect();
        let term_labels = (1..=p).map(|j| format!("X{j}")).collect();
        let centered = columns.column_iter().all(|c| c.sum().abs() <= 1e-12 * n as f64);
        let scaled = columns
            .column_iter()
            .all(|c| (c.norm_squared() - n as f64).abs() <= 1e-9);
        ModelMatrix {
            design_id: design_id.into(),
            columns,
            terms,
            term_labels,
            centered,
            scaled,
            column_norm: n as f64,
        }
    }

    pub fn design_id(&self) -> &str {
        &self.design_id
    }

    pub fn columns(&self) -> &DMatrix<f64> {
        &self.columns
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn term_labels(&self) -> &[String] {
        &self.term_labels
    }

    pub fn runs(&self) -> usize {
        self.columns.nrows()
    }

    pub fn p(&self) -> usize {
        self.columns.ncols()
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    pub fn is_scaled(&self) -> bool {
        self.scaled
    }

    pub fn column_norm(&self) -> f64 {
        self.column_norm
    }

    /// Indices of main-effect terms.
    pub fn main_effect_indices(&self) -> Vec<usize> {
        (0..self.p()).filter(|&t| self.terms[t].is_main_effect()).collect()
    }

    /// Indices of interaction terms.
    pub fn interaction_indices(&self) -> Vec<usize> {
        (0..self.p()).filter(|&t| !self.terms[t].is_main_effect()).collect()
    }

    /// `X'X`.
    pub fn gram(&self) -> DMatrix<f64> {
        self.columns.tr_mul(&self.columns)
    }

    /// `X'y`.
    pub fn xty(&self, y: &DVector<f64>) -> DVector<f64> {
        self.columns.tr_mul(y)
    }

    /// Sub-matrix of the given columns.
    pub fn select(&self, idx: &[usize]) -> DMatrix<f64> {
        self.columns.select_columns(idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dm(n: usize, k: usize, v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(n, k, v)
    }

    #[test]
    fn ingests_plus_minus_one_csv() {
        let csv = "A,B\n1,1\n1,-1\n-1,1\n-1,-1\n";
        let d = Design::from_csv_reader("d", csv.as_bytes()).unwrap();
        assert_eq!(d.runs(), 4);
        assert_eq!(d.factors(), 2);
        assert_eq!(d.levels()[(1, 1)], -1.0);
    }

    #[test]
    fn recodes_zero_one_columns() {
        let csv = "A,B\n0,1\n1,-1\n0,1\n1,-1\n";
        let d = Design::from_csv_reader("d", csv.as_bytes()).unwrap();
        assert_eq!(d.levels().column(0).as_slice(), &[-1.0, 1.0, -1.0, 1.0]);
        assert_eq!(d.levels().column(1).as_slice(), &[1.0, -1.0, 1.0, -1.0]);
    }

    #[test]
    fn rejects_three_level_column() {
        let csv = "A,B\n0,1\n1,-1\n2,1\n1,-1\n";
        let err = Design::from_csv_reader("d", csv.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::NotTwoLevel(ref name, 3) if name == "A"));
        assert!(err.to_string().contains("not two-level"));
    }

    #[test]
    fn rejects_duplicate_names_and_bad_cells() {
        let csv = "A,A\n1,1\n-1,-1\n";
        assert!(matches!(
            Design::from_csv_reader("d", csv.as_bytes()),
            Err(Error::DuplicateName(_))
        ));
        let csv = "A,B\n1,x\n-1,-1\n";
        assert!(matches!(Design::from_csv_reader("d", csv.as_bytes()), Err(Error::Parse(_))));
    }

    #[test]
    fn missing_file_names_path() {
        let err = Design::load("/nonexistent/design.csv").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/design.csv"));
    }

    #[test]
    fn interaction_count() {
        let d = plackett_burman(8).unwrap();
        let m = ModelMatrix::build(&d, true, true, true).unwrap();
        assert_eq!(d.factors(), 7);
        assert_eq!(m.p(), 28);
        assert_eq!(m.main_effect_indices().len(), 7);
        assert_eq!(m.interaction_indices().len(), 21);
        assert!(m.terms()[..7].iter().all(Term::is_main_effect));
    }

    #[test]
    fn balanced_design_unchanged_by_centering() {
        let d = plackett_burman(12).unwrap();
        let m = ModelMatrix::build(&d, false, true, true).unwrap();
        assert_eq!(m.columns(), d.levels());
    }

    #[test]
    fn centered_scaled_columns() {
        // unbalanced columns
        let d = Design::from_levels(
            "u",
            dm(5, 2, &[1., 1., 1., -1., 1., 1., -1., 1., -1., -1.]),
        )
        .unwrap();
        let m = ModelMatrix::build(&d, true, true, true).unwrap();
        for c in m.columns().column_iter() {
            assert!(c.sum().abs() < 1e-12);
            assert!((c.norm_squared() - 5.0).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_interaction_is_zero_norm_error() {
        // col3 = col1 * col2, and col4 duplicates col1 so (X1, X4) is constant
        let lv = dm(
            4,
            4,
            &[
                1., 1., 1., 1., //
                1., -1., -1., 1., //
                -1., 1., -1., -1., //
                -1., -1., 1., -1.,
            ],
        );
        let d = Design::from_levels("alias", lv).unwrap();
        let err = ModelMatrix::build(&d, true, true, true).unwrap_err();
        assert!(matches!(err, Error::ZeroNormColumn(ref t) if t == "X1:X4"), "{err}");
        // main effects alone are fine
        assert!(ModelMatrix::build(&d, false, true, true).is_ok());
    }
}
