use std::path::Path;

use nalgebra::DMatrix;

use super::{Label, LabeledSet};
use crate::error::{Error, Result};

/// Which column holds the binary label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    /// Header name; the file must then start with a header row.
    Name(String),
    /// Zero-based column index. A header row is detected when any field of
    /// the first row is not a number.
    Index(usize),
}

impl From<&str> for LabelColumn {
    fn from(s: &str) -> Self {
        match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        }
    }
}

/// Read a comma-separated file of numeric features plus one binary label
/// column. Labels in `{-1, +1}` are kept; `{0, 1}` maps `0 → -1`.
pub fn ingest_csv_dataset(
    path: impl AsRef<Path>,
    label_column: &LabelColumn,
) -> Result<LabeledSet> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_dataset(file, label_column)
}

pub(crate) fn read_dataset<R: std::io::Read>(
    reader: R,
    label_column: &LabelColumn,
) -> Result<LabeledSet> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut records = rdr.records();
    let first = match records.next() {
        Some(r) => r?,
        None => return Err(Error::invalid("path", "file contains no rows")),
    };
    let width = first.len();
    let looks_like_header = first.iter().any(|f| f.parse::<f64>().is_err());

    let label_idx = match label_column {
        LabelColumn::Name(name) => {
            if !looks_like_header {
                return Err(Error::MissingColumn(name.clone()));
            }
            first
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingColumn(name.clone()))?
        }
        LabelColumn::Index(i) => {
            if *i >= width {
                return Err(Error::MissingColumn(i.to_string()));
            }
            *i
        }
    };

    let mut values: Vec<f64> = Vec::new();
    let mut raw_labels: Vec<(usize, f64)> = Vec::new();
    let mut push_row = |row: usize, rec: &csv::StringRecord| -> Result<()> {
        if rec.len() != width {
            return Err(Error::RaggedRow {
                row,
                expected: width,
                found: rec.len(),
            });
        }
        for (col, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::ParseField {
                row,
                column: col,
                value: field.to_string(),
            })?;
            if col == label_idx {
                raw_labels.push((row, v));
            } else {
                values.push(v);
            }
        }
        Ok(())
    };

    // Rows are numbered from 1 as they appear in the file.
    if !looks_like_header {
        push_row(1, &first)?;
    }
    for (k, rec) in records.enumerate() {
        push_row(k + 2, &rec?)?;
    }

    if raw_labels.is_empty() {
        return Err(Error::invalid(
            "path",
            "file contains a header but no data rows",
        ));
    }
    let zero_one = raw_labels.iter().all(|(_, v)| *v == 0.0 || *v == 1.0);
    let mut labels = Vec::with_capacity(raw_labels.len());
    for (row, v) in raw_labels {
        let label = match v {
            1.0 => Label::Positive,
            -1.0 => Label::Negative,
            0.0 if zero_one => Label::Negative,
            _ => return Err(Error::NonBinaryLabel { row, value: v }),
        };
        labels.push(label);
    }

    let n = labels.len();
    let d = width - 1;
    LabeledSet::new(DMatrix::from_row_slice(n, d, &values), labels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str, col: LabelColumn) -> Result<LabeledSet> {
        read_dataset(text.as_bytes(), &col)
    }

    #[test]
    fn reads_three_rows_with_header() {
        let set = read(
            "x1,x2,y\n1.0,2.0,1\n-1,0.5,-1\n3,4,1\n",
            LabelColumn::Name("y".into()),
        )
        .unwrap();
        assert_eq!(set.len(), 3);
        assert_eq!(set.dim(), 2);
        assert_eq!(
            set.labels(),
            &[Label::Positive, Label::Negative, Label::Positive]
        );
        assert_eq!(set.features()[(1, 1)], 0.5);
    }

    #[test]
    fn headerless_index_selection() {
        let set = read("1,0.1,0.2\n-1,0.3,0.4\n", LabelColumn::Index(0)).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.features()[(1, 0)], 0.3);
    }

    #[test]
    fn zero_one_labels_are_remapped() {
        let set = read(
            "a,b,label\n1,2,0\n3,4,1\n",
            LabelColumn::Name("label".into()),
        )
        .unwrap();
        assert_eq!(set.labels(), &[Label::Negative, Label::Positive]);
    }

    #[test]
    fn label_two_is_rejected() {
        let err = read("1,2,1\n3,4,2\n", LabelColumn::Index(2)).unwrap_err();
        assert!(matches!(err, Error::NonBinaryLabel { row: 2, .. }), "{err}");
    }

    #[test]
    fn mixed_zero_and_minus_one_is_rejected() {
        let err = read("1,0\n2,-1\n3,1\n", LabelColumn::Index(1)).unwrap_err();
        assert!(matches!(err, Error::NonBinaryLabel { .. }), "{err}");
    }

    #[test]
    fn ragged_and_unparseable_rows() {
        let err = read("1,2,1\n3,1\n", LabelColumn::Index(2)).unwrap_err();
        assert!(
            matches!(
                err,
                Error::RaggedRow {
                    row: 2,
                    expected: 3,
                    found: 2
                }
            ),
            "{err}"
        );
        let err = read("x,y\n1,1\nabc,1\n", LabelColumn::Index(1)).unwrap_err();
        assert!(
            matches!(
                err,
                Error::ParseField {
                    row: 3,
                    column: 0,
                    ..
                }
            ),
            "{err}"
        );
        let err = read("x,y\n1,1\n", LabelColumn::Name("z".into())).unwrap_err();
        assert!(matches!(err, Error::MissingColumn(_)));
    }

    #[test]
    fn missing_file_reports_path() {
        let err = ingest_csv_dataset("/nonexistent/data.csv", &LabelColumn::Index(0)).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/data.csv"));
    }
}
