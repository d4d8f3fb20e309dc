//! Labeled datasets read from delimited text.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// A column addressed by zero-based position, by header name, or as the last column.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "RawColumnRef", into = "RawColumnRef")]
pub enum ColumnRef {
    Index(usize),
    Last,
    Name(String),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawColumnRef {
    Index(usize),
    Name(String),
}

impl From<RawColumnRef> for ColumnRef {
    fn from(raw: RawColumnRef) -> Self {
        match raw {
            RawColumnRef::Index(i) => ColumnRef::Index(i),
            RawColumnRef::Name(s) if s == "last" => ColumnRef::Last,
            RawColumnRef::Name(s) => ColumnRef::Name(s),
        }
    }
}

impl From<ColumnRef> for RawColumnRef {
    fn from(c: ColumnRef) -> Self {
        match c {
            ColumnRef::Index(i) => RawColumnRef::Index(i),
            ColumnRef::Last => RawColumnRef::Name("last".into()),
            ColumnRef::Name(s) => RawColumnRef::Name(s),
        }
    }
}

impl FromStr for ColumnRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Config("empty column reference".into()));
        }
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnRef::Index(i),
            Err(_) if s == "last" => ColumnRef::Last,
            Err(_) => ColumnRef::Name(s.to_string()),
        })
    }
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnRef::Index(i) => write!(f, "{i}"),
            ColumnRef::Last => f.write_str("last"),
            ColumnRef::Name(n) => f.write_str(n),
        }
    }
}

impl ColumnRef {
    fn resolve(&self, headers: Option<&[String]>, n_cols: usize) -> Result<usize> {
        match self {
            ColumnRef::Index(i) if *i < n_cols => Ok(*i),
            ColumnRef::Index(i) => Err(Error::Config(format!(
                "column {i} out of range for {n_cols} columns"
            ))),
            ColumnRef::Last => Ok(n_cols - 1),
            ColumnRef::Name(name) => {
                let headers = headers.ok_or_else(|| {
                    Error::Config(format!(
                        "column '{name}' given by name but the file has no header"
                    ))
                })?;
                headers
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| Error::Config(format!("no column named '{name}'")))
            }
        }
    }
}

/// How to read a delimited dataset file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSchema {
    pub delimiter: char,
    /// Split on runs of spaces/tabs instead of `delimiter`.
    pub whitespace: bool,
    pub header: bool,
    /// `None` reads an unlabeled file; every row then gets the class `"?"`.
    pub label_column: Option<ColumnRef>,
    /// `None` means every column except the label.
    pub feature_columns: Option<Vec<ColumnRef>>,
    /// Tokens replaced by numbers before parsing (ordinal codes, e.g. `P = 1`).
    pub value_map: BTreeMap<String, f64>,
}

impl Default for DatasetSchema {
    fn default() -> Self {
        Self {
            delimiter: ',',
            whitespace: false,
            header: false,
            label_column: Some(ColumnRef::Last),
            feature_columns: None,
            value_map: BTreeMap::new(),
        }
    }
}

pub const UNLABELED_CLASS: &str = "?";

/// Features, class labels and provenance of one dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    name: String,
    task_prefix: String,
    features: Matrix,
    labels: Vec<usize>,
    class_names: Vec<String>,
    source: Option<PathBuf>,
}

impl Dataset {
    /// `labels[i]` indexes into `class_names`.
    pub fn new(
        name: impl Into<String>,
        features: Matrix,
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let name = name.into();
        if features.rows() == 0 {
            return Err(Error::Dataset(format!("dataset '{name}' has no rows")));
        }
        if features.cols() == 0 {
            return Err(Error::Dataset(format!(
                "dataset '{name}' has no feature columns"
            )));
        }
        if labels.len() != features.rows() {
            return Err(Error::Dataset(format!(
                "dataset '{name}': {} labels for {} rows",
                labels.len(),
                features.rows()
            )));
        }
        if labels.iter().any(|&l| l >= class_names.len()) {
            return Err(Error::Dataset(format!(
                "dataset '{name}': label index out of range"
            )));
        }
        if !features.is_finite() {
            return Err(Error::Dataset(format!(
                "dataset '{name}' has non-finite features"
            )));
        }
        Ok(Self {
            task_prefix: name.clone(),
            name,
            features,
            labels,
            class_names,
            source: None,
        })
    }

    pub fn with_task_prefix(mut self, prefix: impl Into<String>) -> Self {
        self.task_prefix = prefix.into();
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn task_prefix(&self) -> &str {
        &self.task_prefix
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn source(&self) -> Option<&Path> {
        self.source.as_deref()
    }

    pub fn n_samples(&self) -> usize {
        self.features.rows()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_index(&self, class: &str) -> Option<usize> {
        self.class_names.iter().position(|c| c == class)
    }

    /// Feature rows whose label is `label`.
    pub fn rows_of_class(&self, label: usize) -> Matrix {
        let idx: Vec<usize> = (0..self.n_samples())
            .filter(|&i| self.labels[i] == label)
            .collect();
        self.features.select_rows(&idx)
    }
}

/// Reads a delimited text file. Class names are kept in order of first appearance.
///
/// UTF-8 (with or without BOM) and BOM-marked UTF-16 files are accepted.
/// Number parsing is locale independent; cells listed in the schema's
/// `value_map` are substituted first.
pub fn load_dataset(path: impl AsRef<Path>, schema: &DatasetSchema) -> Result<Dataset> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = decode_text(&bytes).map_err(|message| Error::Parse {
        path: path.to_path_buf(),
        row: 0,
        column: 0,
        message,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    let text = if schema.whitespace {
        text.lines()
            .map(|l| l.split_whitespace().collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join("\n")
    } else {
        text
    };
    let schema = &DatasetSchema {
        delimiter: if schema.whitespace {
            ','
        } else {
            schema.delimiter
        },
        ..schema.clone()
    };
    let mut ds = parse_dataset(&text, schema, path)?.with_name(name.clone());
    ds.task_prefix = name;
    ds.source = Some(path.to_path_buf());
    Ok(ds)
}

fn decode_text(bytes: &[u8]) -> std::result::Result<String, String> {
    let utf16 = |chunks: Vec<u16>| String::from_utf16(&chunks).map_err(|e| e.to_string());
    match bytes {
        [0xFF, 0xFE, rest @ ..] => utf16(
            rest.chunks_exact(2)
                .map(|c| u16::from_le_bytes([c[0], c[1]]))
                .collect(),
        ),
        [0xFE, 0xFF, rest @ ..] => utf16(
            rest.chunks_exact(2)
                .map(|c| u16::from_be_bytes([c[0], c[1]]))
                .collect(),
        ),
        [0xEF, 0xBB, 0xBF, rest @ ..] => {
            String::from_utf8(rest.to_vec()).map_err(|e| e.to_string())
        }
        _ => String::from_utf8(bytes.to_vec()).map_err(|e| e.to_string()),
    }
}

fn parse_dataset(text: &str, schema: &DatasetSchema, path: &Path) -> Result<Dataset> {
    if !schema.delimiter.is_ascii() {
        return Err(Error::Config(format!(
            "delimiter {:?} is not a single ASCII character",
            schema.delimiter
        )));
    }
    let parse_err = |row: u64, column: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        row,
        column,
        message,
    };

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter as u8)
        .has_headers(schema.header)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());

    let headers: Option<Vec<String>> = if schema.header {
        let h = reader
            .headers()
            .map_err(|e| parse_err(1, 0, e.to_string()))?;
        Some(h.iter().map(str::to_string).collect())
    } else {
        None
    };

    let mut layout: Option<(usize, Option<usize>, Vec<usize>)> = None;
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut class_names: Vec<String> = Vec::new();
    let mut n_rows = 0usize;

    for record in reader.records() {
        let record = record.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line());
            parse_err(row, 0, e.to_string())
        })?;
        let row = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let (n_cols, label_col, feature_cols) = match &layout {
            Some(l) => l,
            None => {
                let n_cols = headers.as_ref().map_or(record.len(), Vec::len);
                layout = Some(resolve_layout(schema, headers.as_deref(), n_cols)?);
                layout.as_ref().unwrap()
            }
        };
        if record.len() != *n_cols {
            return Err(parse_err(
                row,
                record.len().min(*n_cols),
                format!("expected {n_cols} fields, found {}", record.len()),
            ));
        }
        for &c in feature_cols {
            let cell = &record[c];
            let v = match schema.value_map.get(cell) {
                Some(&v) => v,
                None => cell.parse::<f64>().map_err(|_| {
                    parse_err(row, c, format!("non-numeric feature value '{cell}'"))
                })?,
            };
            if !v.is_finite() {
                return Err(parse_err(
                    row,
                    c,
                    format!("non-finite feature value '{cell}'"),
                ));
            }
            values.push(v);
        }
        let class = label_col.map_or(UNLABELED_CLASS, |c| &record[c]);
        let label = match class_names.iter().position(|n| n == class) {
            Some(k) => k,
            None => {
                class_names.push(class.to_string());
                class_names.len() - 1
            }
        };
        labels.push(label);
        n_rows += 1;
    }

    let Some((_, _, feature_cols)) = layout else {
        return Err(Error::Dataset(format!("{}: no data rows", path.display())));
    };
    let features = Matrix::new(n_rows, feature_cols.len(), values)?;
    Dataset::new("dataset", features, labels, class_names)
}

fn resolve_layout(
    schema: &DatasetSchema,
    headers: Option<&[String]>,
    n_cols: usize,
) -> Result<(usize, Option<usize>, Vec<usize>)> {
    if n_cols == 0 {
        return Err(Error::Dataset("rows have no fields".into()));
    }
    let label = schema
        .label_column
        .as_ref()
        .map(|c| c.resolve(headers, n_cols))
        .transpose()?;
    let features: Vec<usize> = match &schema.feature_columns {
        Some(cols) => cols
            .iter()
            .map(|c| c.resolve(headers, n_cols))
            .collect::<Result<_>>()?,
        None => (0..n_cols).filter(|&c| Some(c) != label).collect(),
    };
    if features.is_empty() {
        return Err(Error::Config("schema selects no feature columns".into()));
    }
    if label.is_some_and(|l| features.contains(&l)) {
        return Err(Error::Config(
            "label column is also listed as a feature column".into(),
        ));
    }
    let mut sorted = features.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != features.len() {
        return Err(Error::Config(
            "feature columns listed more than once".into(),
        ));
    }
    Ok((n_cols, label, features))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(contents: &[u8]) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(".csv").tempfile().unwrap();
        f.write_all(contents).unwrap();
        f
    }

    #[test]
    fn iris_like_file() {
        let f = write(b"5.1,3.5,1.4,0.2,Iris-setosa\n7.0,3.2,4.7,1.4,Iris-versicolor\n4.9,3.0,1.4,0.2,Iris-setosa\n6.3,3.3,6.0,2.5,Iris-virginica\n\n");
        let ds = load_dataset(f.path(), &DatasetSchema::default()).unwrap();
        assert_eq!((ds.n_samples(), ds.dim(), ds.n_classes()), (4, 4, 3));
        assert_eq!(
            ds.class_names(),
            ["Iris-setosa", "Iris-versicolor", "Iris-virginica"]
        );
        assert_eq!(ds.labels(), [0, 1, 0, 2]);
        assert_eq!(ds.features().row(1), [7.0, 3.2, 4.7, 1.4]);
    }

    #[test]
    fn non_numeric_cell_names_row_and_column() {
        let f = write(b"1,2,a\n3,x,b\n");
        let err = load_dataset(f.path(), &DatasetSchema::default()).unwrap_err();
        match err {
            Error::Parse {
                row,
                column,
                message,
                ..
            } => {
                assert_eq!((row, column), (2, 1));
                assert!(message.contains("'x'"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_row_rejected() {
        let f = write(b"1,2,a\n3,b\n");
        assert!(matches!(
            load_dataset(f.path(), &DatasetSchema::default()),
            Err(Error::Parse { row: 2, .. })
        ));
    }

    #[test]
    fn missing_file_and_empty_file() {
        assert!(matches!(
            load_dataset("/nonexistent/file.csv", &DatasetSchema::default()),
            Err(Error::Io { .. })
        ));
        let f = write(b"\n\n");
        assert!(matches!(
            load_dataset(f.path(), &DatasetSchema::default()),
            Err(Error::Dataset(_))
        ));
    }

    #[test]
    fn non_finite_cell_rejected() {
        let f = write(b"1,NaN,a\n");
        assert!(matches!(
            load_dataset(f.path(), &DatasetSchema::default()),
            Err(Error::Parse { column: 1, .. })
        ));
    }

    #[test]
    fn header_names_and_feature_subset() {
        let f = write(b"D;X1;X2;X3\n0;3;4;5\n1;5;3;2\n");
        let schema = DatasetSchema {
            delimiter: ';',
            header: true,
            label_column: Some(ColumnRef::Name("D".into())),
            feature_columns: Some(vec![ColumnRef::Index(3), ColumnRef::Name("X1".into())]),
            ..DatasetSchema::default()
        };
        let ds = load_dataset(f.path(), &schema).unwrap();
        assert_eq!(ds.features().row(0), [5.0, 3.0]);
        assert_eq!(ds.class_names(), ["0", "1"]);
    }

    #[test]
    fn decimal_comma_is_not_a_number() {
        let f = write(b"1;2,5;a\n");
        let schema = DatasetSchema {
            delimiter: ';',
            ..DatasetSchema::default()
        };
        assert!(matches!(
            load_dataset(f.path(), &schema),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn value_map_and_utf16() {
        let text = "P,A,N,B\nN,N,A,NB\n";
        let mut bytes = vec![0xFF, 0xFE];
        for u in text.encode_utf16() {
            bytes.extend_from_slice(&u.to_le_bytes());
        }
        let f = write(&bytes);
        let schema = DatasetSchema {
            value_map: [
                ("P".to_string(), 1.0),
                ("A".to_string(), 0.0),
                ("N".to_string(), -1.0),
            ]
            .into_iter()
            .collect(),
            ..DatasetSchema::default()
        };
        let ds = load_dataset(f.path(), &schema).unwrap();
        assert_eq!(ds.features().as_slice(), [1.0, 0.0, -1.0, -1.0, -1.0, 0.0]);
        assert_eq!(ds.class_names(), ["B", "NB"]);
    }

    #[test]
    fn irregular_whitespace() {
        let f = write(b"15.26\t14.84\t\t0.871\t1\n14.88 14.57\t0.8811\t\t1\n");
        let schema = DatasetSchema {
            whitespace: true,
            ..DatasetSchema::default()
        };
        let ds = load_dataset(f.path(), &schema).unwrap();
        assert_eq!(ds.features().row(1), [14.88, 14.57, 0.8811]);
    }

    #[test]
    fn label_overlapping_features_rejected() {
        let f = write(b"1,2,a\n");
        let schema = DatasetSchema {
            feature_columns: Some(vec![ColumnRef::Index(0), ColumnRef::Index(2)]),
            ..DatasetSchema::default()
        };
        assert!(matches!(
            load_dataset(f.path(), &schema),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn unlabeled_file() {
        let f = write(b"1,2\n3,4\n");
        let schema = DatasetSchema {
            label_column: None,
            ..DatasetSchema::default()
        };
        let ds = load_dataset(f.path(), &schema).unwrap();
        assert_eq!(ds.dim(), 2);
        assert_eq!(ds.class_names(), [UNLABELED_CLASS]);
    }

    #[test]
    fn column_ref_parsing() {
        assert_eq!("3".parse::<ColumnRef>().unwrap(), ColumnRef::Index(3));
        assert_eq!("last".parse::<ColumnRef>().unwrap(), ColumnRef::Last);
        assert_eq!(
            "class".parse::<ColumnRef>().unwrap(),
            ColumnRef::Name("class".into())
        );
    }
}
