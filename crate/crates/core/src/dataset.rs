//! Observational study data: binary treatment, real outcome and a covariate
//! design matrix whose first column is an intercept.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const INTERCEPT: &str = "(intercept)";

/// Complete-case observational data. Immutable once constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    treatment: Vec<u8>,
    outcome: Vec<f64>,
    /// Row-major n x p design, column 0 all ones.
    design: Vec<f64>,
    p: usize,
    covariate_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset from raw covariate rows, prepending the intercept.
    pub fn from_covariates(
        treatment: Vec<u8>,
        outcome: Vec<f64>,
        covariates: &[Vec<f64>],
        names: Vec<String>,
    ) -> Result<Self> {
        let k = names.len();
        let mut design = Vec::with_capacity(covariates.len() * (k + 1));
        for (i, row) in covariates.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidInput(format!(
                    "covariate row {i} has {} entries, expected {k}",
                    row.len()
                )));
            }
            design.push(1.0);
            design.extend_from_slice(row);
        }
        let mut covariate_names = Vec::with_capacity(k + 1);
        covariate_names.push(INTERCEPT.to_string());
        covariate_names.extend(names);
        Self::from_design(treatment, outcome, design, covariate_names)
    }

    /// Builds a dataset from a full row-major design matrix. The caller is
    /// responsible for including an intercept column if one is wanted; the
    /// column count is taken from `names`.
    pub fn from_design(
        treatment: Vec<u8>,
        outcome: Vec<f64>,
        design: Vec<f64>,
        names: Vec<String>,
    ) -> Result<Self> {
        let n = treatment.len();
        let p = names.len();
        if p == 0 {
            return Err(Error::InvalidInput("design needs at least one column".into()));
        }
        if outcome.len() != n || design.len() != n * p {
            return Err(Error::InvalidInput(format!(
                "length mismatch: {n} treatments, {} outcomes, {} design entries for {p} columns",
                outcome.len(),
                design.len()
            )));
        }
        if let Some(i) = treatment.iter().position(|&a| a > 1) {
            return Err(Error::InvalidInput(format!("treatment at row {i} is not 0/1")));
        }
        if outcome.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("outcome"));
        }
        if design.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("covariates"));
        }
        let treated = treatment.iter().filter(|&&a| a == 1).count();
        if treated == 0 || treated == n {
            return Err(Error::DegenerateArm { treated, control: n - treated });
        }
        Ok(Self { treatment, outcome, design, p, covariate_names: names })
    }

    pub fn n(&self) -> usize {
        self.treatment.len()
    }

    /// Number of design columns, intercept included.
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn treatment(&self) -> &[u8] {
        &self.treatment
    }

    pub fn outcome(&self) -> &[f64] {
        &self.outcome
    }

    pub fn design(&self) -> &[f64] {
        &self.design
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.design[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.design.chunks_exact(self.p)
    }

    pub fn covariate_names(&self) -> &[String] {
        &self.covariate_names
    }

    pub fn n_treated(&self) -> usize {
        self.treatment.iter().filter(|&&a| a == 1).count()
    }

    /// Returns a new dataset made of the given rows (repeats allowed).
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut treatment = Vec::with_capacity(indices.len());
        let mut outcome = Vec::with_capacity(indices.len());
        let mut design = Vec::with_capacity(indices.len() * self.p);
        for &i in indices {
            treatment.push(self.treatment[i]);
            outcome.push(self.outcome[i]);
            design.extend_from_slice(self.row(i));
        }
        let treated = treatment.iter().filter(|&&a| a == 1).count();
        if treated == 0 || treated == indices.len() {
            return Err(Error::DegenerateArm { treated, control: indices.len() - treated });
        }
        Ok(Self {
            treatment,
            outcome,
            design,
            p: self.p,
            covariate_names: self.covariate_names.clone(),
        })
    }

    /// Same covariates and treatment with a replaced outcome vector.
    pub fn with_outcome(&self, outcome: Vec<f64>) -> Result<Self> {
        Self::from_design(
            self.treatment.clone(),
            outcome,
            self.design.clone(),
            self.covariate_names.clone(),
        )
    }

    /// Writes the dataset back out as CSV (intercept omitted). Values use the
    /// shortest representation that parses back to the same `f64`.
    pub fn write_csv<W: Write>(&self, writer: W, treatment_col: &str, outcome_col: &str) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let has_intercept = self.covariate_names.first().map(String::as_str) == Some(INTERCEPT);
        let skip = usize::from(has_intercept);
        let mut header = vec![treatment_col.to_string(), outcome_col.to_string()];
        header.extend(self.covariate_names[skip..].iter().cloned());
        w.write_record(&header)?;
        for i in 0..self.n() {
            let mut rec = vec![self.treatment[i].to_string(), self.outcome[i].to_string()];
            rec.extend(self.row(i)[skip..].iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Loads a CSV file with a header row. Every column other than the treatment
/// and outcome becomes a covariate; an intercept is prepended.
pub fn load_csv(path: impl AsRef<Path>, treatment_col: &str, outcome_col: &str) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    read_csv(file, treatment_col, Some(outcome_col))
}

/// Like [`load_csv`] but the outcome column is optional. Without one, all
/// non-treatment columns are covariates and the outcome is filled with zeros.
pub fn load_csv_with(
    path: impl AsRef<Path>,
    treatment_col: &str,
    outcome_col: Option<&str>,
) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    read_csv(file, treatment_col, outcome_col)
}

pub fn read_csv<R: Read>(reader: R, treatment_col: &str, outcome_col: Option<&str>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let t_idx = find(treatment_col)?;
    let y_idx = outcome_col.map(find).transpose()?;
    let cov_idx: Vec<usize> = (0..headers.len()).filter(|&j| j != t_idx && Some(j) != y_idx).collect();

    let mut treatment = Vec::new();
    let mut outcome = Vec::new();
    let mut design = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let row = r + 1;
        let cell = |j: usize| -> Result<f64> {
            let raw = record.get(j).unwrap_or("");
            let parse_err = |reason: &str| Error::Parse {
                row,
                column: headers[j].clone(),
                value: raw.to_string(),
                reason: reason.to_string(),
            };
            if raw.is_empty() {
                return Err(parse_err("missing value"));
            }
            let v: f64 = raw.parse().map_err(|_| parse_err("not a number"))?;
            if !v.is_finite() {
                return Err(parse_err("non-finite value"));
            }
            Ok(v)
        };
        let a = cell(t_idx)?;
        if a != 0.0 && a != 1.0 {
            return Err(Error::Parse {
                row,
                column: headers[t_idx].clone(),
                value: record.get(t_idx).unwrap_or("").to_string(),
                reason: "treatment must be 0 or 1".into(),
            });
        }
        treatment.push(a as u8);
        outcome.push(match y_idx {
            Some(j) => cell(j)?,
            None => 0.0,
        });
        design.push(1.0);
        for &j in &cov_idx {
            design.push(cell(j)?);
        }
    }
    let mut names = vec![INTERCEPT.to_string()];
    names.extend(cov_idx.iter().map(|&j| headers[j].clone()));
    Dataset::from_design(treatment, outcome, design, names)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Dataset> {
        read_csv(text.as_bytes(), "a", Some("y"))
    }

    #[test]
    fn two_row_csv() {
        let d = parse("a,y,x1\n1,2.0,0.3\n0,1.0,-0.3\n").unwrap();
        assert_eq!(d.n(), 2);
        assert_eq!(d.p(), 2);
        assert_eq!(d.row(0), &[1.0, 0.3]);
        assert_eq!(d.row(1), &[1.0, -0.3]);
        assert_eq!(d.outcome(), &[2.0, 1.0]);
        assert_eq!(d.covariate_names(), &[INTERCEPT.to_string(), "x1".to_string()]);
    }

    #[test]
    fn all_treated_is_degenerate() {
        let err = parse("a,y,x1\n1,2.0,0.3\n1,1.0,-0.3\n").unwrap_err();
        assert!(matches!(err, Error::DegenerateArm { treated: 2, control: 0 }));
    }

    #[test]
    fn bad_treatment_names_row() {
        let err = parse("a,y,x1\n1,2.0,0.3\n2,1.0,-0.3\n0,1.0,0.1\n").unwrap_err();
        match err {
            Error::Parse { row, ref column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, "a");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("row 2"));
    }

    #[test]
    fn missing_cell_and_column() {
        let err = parse("a,y,x1\n1,,0.3\n0,1.0,-0.3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { row: 1, .. }));
        let err = parse("a,y,x1\n1,2.0,abc\n0,1.0,-0.3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { row: 1, .. }));
        let err = read_csv("a,y\n1,2\n0,1\n".as_bytes(), "treat", Some("y")).unwrap_err();
        assert!(matches!(err, Error::MissingColumn(ref c) if c == "treat"));
    }

    #[test]
    fn covariate_count() {
        let d = parse("x0,a,x1,y,x2\n0.5,1,2,3,4\n0.1,0,2,3,5\n").unwrap();
        assert_eq!(d.p(), (5 - 2) + 1);
        assert_eq!(d.row(0), &[1.0, 0.5, 2.0, 4.0]);
    }

    #[test]
    fn optional_outcome() {
        let d = read_csv("a,x1,x2\n1,0.5,2\n0,0.1,3\n".as_bytes(), "a", None).unwrap();
        assert_eq!(d.p(), 3);
        assert_eq!(d.outcome(), &[0.0, 0.0]);
    }

    #[test]
    fn select_rejects_single_arm() {
        let d = parse("a,y,x1\n1,2.0,0.3\n0,1.0,-0.3\n").unwrap();
        assert!(d.select(&[0, 0]).is_err());
        let s = d.select(&[1, 0, 1]).unwrap();
        assert_eq!(s.treatment(), &[0, 1, 0]);
    }
}
