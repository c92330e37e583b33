use std::collections::BTreeSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::dataset::RichDataset;
use crate::belief::{FocalSet, Frame, MassFunction};
use crate::classifiers::FeatureMatrix;
use crate::error::{Error, Result};

/// Total-mass slack tolerated (and renormalized away) when reading rich labels.
pub const RICH_LABEL_TOLERANCE: f64 = 0.01;

/// Digits after the decimal point used when writing masses.
pub const MASS_DECIMALS: usize = 9;

/// Column layout of a dataset CSV file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CsvSchema {
    pub label_column: String,
    /// Optional column holding rich labels; ignored when absent from the header.
    pub rich_label_column: Option<String>,
    /// Class order of the frame. Defaults to the sorted distinct labels
    /// (numerically when every label is a number).
    pub classes: Option<Vec<String>>,
    /// Feature columns, in order. Defaults to every other column.
    pub feature_columns: Option<Vec<String>>,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            label_column: "label".into(),
            rich_label_column: Some("rich_label".into()),
            classes: None,
            feature_columns: None,
        }
    }
}

pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<RichDataset> {
    let path = path.as_ref();
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    let name = path
        .file_stem()
        .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    parse_csv(&name, &path.display().to_string(), &text, schema)
}

/// Parses dataset CSV text. `origin` names the source in error messages.
pub fn parse_csv(name: &str, origin: &str, text: &str, schema: &CsvSchema) -> Result<RichDataset> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_string(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let column = |name: &str| header.iter().position(|h| h == name);
    let label_col = column(&schema.label_column)
        .ok_or_else(|| parse_err(1, format!("missing label column `{}`", schema.label_column)))?;
    let rich_col = schema.rich_label_column.as_deref().and_then(column);
    let feature_cols: Vec<usize> = match &schema.feature_columns {
        Some(names) => names
            .iter()
            .map(|n| column(n).ok_or_else(|| parse_err(1, format!("missing feature column `{n}`"))))
            .collect::<Result<_>>()?,
        None => (0..header.len())
            .filter(|&i| i != label_col && Some(i) != rich_col)
            .collect(),
    };
    let feature_names: Vec<String> = feature_cols.iter().map(|&i| header[i].clone()).collect();

    struct Row {
        line: usize,
        label: String,
        rich: Option<String>,
    }
    let mut values = Vec::new();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        if record.len() != header.len() {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        for &c in &feature_cols {
            let cell = record[c].trim();
            let v: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| {
                    parse_err(
                        line,
                        format!("column `{}`: `{cell}` is not a number", header[c]),
                    )
                })?;
            values.push(v);
        }
        rows.push(Row {
            line,
            label: record[label_col].trim().to_string(),
            rich: rich_col.map(|c| record[c].trim().to_string()),
        });
    }
    if rows.is_empty() {
        return Err(parse_err(2, "no data rows".into()));
    }

    let classes = match &schema.classes {
        Some(c) => c.clone(),
        None => sorted_classes(rows.iter().map(|r| r.label.as_str())),
    };
    let frame = Frame::new(classes)?;
    let mut true_labels = Vec::with_capacity(rows.len());
    for row in &rows {
        let class = frame
            .index_of(&row.label)
            .ok_or_else(|| Error::UnknownClass {
                line: row.line,
                class: row.label.clone(),
            })?;
        true_labels.push(class);
    }
    let rich_labels = match rich_col {
        None => None,
        Some(_) => Some(
            rows.iter()
                .map(|row| {
                    let text = row.rich.as_deref().unwrap_or("");
                    parse_rich_label(&frame, text).map_err(|e| parse_err(row.line, e.to_string()))
                })
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    let features = FeatureMatrix::new(rows.len(), feature_cols.len(), values)?;
    RichDataset::new(
        name,
        frame,
        feature_names,
        features,
        true_labels,
        rich_labels,
    )
}

fn sorted_classes<'a>(labels: impl Iterator<Item = &'a str>) -> Vec<String> {
    let distinct: BTreeSet<&str> = labels.collect();
    let mut classes: Vec<String> = distinct.into_iter().map(String::from).collect();
    let numeric: Option<Vec<f64>> = classes.iter().map(|c| c.parse::<f64>().ok()).collect();
    if let Some(keys) = numeric {
        let mut paired: Vec<(f64, String)> = keys.into_iter().zip(classes).collect();
        paired.sort_by(|a, b| a.0.total_cmp(&b.0));
        classes = paired.into_iter().map(|p| p.1).collect();
    }
    classes
}

/// Writes a dataset in the format read by [`load_csv`] with the default schema.
pub fn write_csv(dataset: &RichDataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = to_csv_string(dataset)?;
    File::create(path)
        .and_then(|mut f| f.write_all(text.as_bytes()))
        .map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn to_csv_string(dataset: &RichDataset) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = dataset.feature_names().iter().map(String::as_str).collect();
    header.push("label");
    if dataset.has_rich_labels() {
        header.push("rich_label");
    }
    writer
        .write_record(&header)
        .map_err(|e| Error::io("csv", e))?;
    let rich = dataset.rich_labels();
    for (i, row) in dataset.features().rows().enumerate() {
        let mut record: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        record.push(dataset.frame().labels()[dataset.true_labels()[i]].clone());
        if let Some(rich) = rich {
            record.push(format_rich_label(&rich[i]));
        }
        writer
            .write_record(&record)
            .map_err(|e| Error::io("csv", e))?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::io("csv", e))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Parses `subset:mass(;subset:mass)*` where a subset is class indices joined by `|`,
/// e.g. `0:0.5;0|1:0.5`. A total within [`RICH_LABEL_TOLERANCE`] of 1 is renormalized.
pub fn parse_rich_label(frame: &Frame, text: &str) -> Result<MassFunction> {
    let syntax = |message: &str| Error::RichLabelSyntax {
        text: text.to_string(),
        message: message.to_string(),
    };
    if text.trim().is_empty() {
        return Err(syntax("empty label"));
    }
    let mut entries = Vec::new();
    for part in text.split(';') {
        let (subset, mass) = part
            .split_once(':')
            .ok_or_else(|| syntax("expected `subset:mass`"))?;
        let mut indices = Vec::new();
        for idx in subset.split('|') {
            let i: usize = idx
                .trim()
                .parse()
                .map_err(|_| syntax("class indices must be integers"))?;
            indices.push(i);
        }
        let mass: f64 = mass
            .trim()
            .parse()
            .map_err(|_| syntax("mass is not a number"))?;
        entries.push((frame.subset(&indices)?, mass));
    }
    MassFunction::new_renormalized(frame.clone(), entries, RICH_LABEL_TOLERANCE)
}

/// Inverse of [`parse_rich_label`]; masses carry [`MASS_DECIMALS`] decimals.
pub fn format_rich_label(m: &MassFunction) -> String {
    m.focal_elements()
        .iter()
        .map(|&(set, mass)| format!("{}:{:.*}", format_subset(set), MASS_DECIMALS, mass))
        .collect::<Vec<_>>()
        .join(";")
}

fn format_subset(set: FocalSet) -> String {
    set.indices()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join("|")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame2() -> Frame {
        Frame::indexed(2).unwrap()
    }

    #[test]
    fn rich_label_grammar() {
        let f = frame2();
        let m = parse_rich_label(&f, "0:1").unwrap();
        assert_eq!(m.mass(FocalSet::singleton(0)), 1.0);
        let m = parse_rich_label(&f, "0:0.5;0|1:0.5").unwrap();
        assert_eq!(m.mass(FocalSet::singleton(0)), 0.5);
        assert_eq!(m.mass(FocalSet::full(2)), 0.5);
        assert!(matches!(
            parse_rich_label(&f, "0:0.6;1:0.6"),
            Err(Error::SumNotOne { .. })
        ));
        assert!(matches!(
            parse_rich_label(&f, "0-0.6"),
            Err(Error::RichLabelSyntax { .. })
        ));
        assert!(matches!(
            parse_rich_label(&f, "2:1"),
            Err(Error::BadSubset { .. })
        ));
        let noisy = parse_rich_label(&f, "0:0.333;1:0.665").unwrap();
        assert!(
            (noisy.mass(FocalSet::singleton(0)) + noisy.mass(FocalSet::singleton(1)) - 1.0).abs()
                < 1e-15
        );
    }

    #[test]
    fn format_round_trip() {
        let f = frame2();
        let m = parse_rich_label(&f, "0:0.25;0|1:0.75").unwrap();
        assert_eq!(format_rich_label(&m), "0:0.250000000;0|1:0.750000000");
        assert_eq!(parse_rich_label(&f, &format_rich_label(&m)).unwrap(), m);
    }

    #[test]
    fn small_file_parses() {
        let text = "x,y,label\n1,2,a\n3,4,b\n5,6,a\n";
        let ds = parse_csv("t", "t.csv", text, &CsvSchema::default()).unwrap();
        assert_eq!((ds.len(), ds.n_features(), ds.n_classes()), (3, 2, 2));
        assert_eq!(ds.true_labels(), &[0, 1, 0]);
        assert!(!ds.has_rich_labels());
    }

    #[test]
    fn bad_cell_reports_line() {
        let text = "x,y,label\n1,2,a\n3,oops,b\n";
        match parse_csv("t", "t.csv", text, &CsvSchema::default()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_class_with_explicit_frame() {
        let text = "x,label\n1,a\n2,c\n";
        let schema = CsvSchema {
            classes: Some(vec!["a".into(), "b".into()]),
            ..Default::default()
        };
        assert_eq!(
            parse_csv("t", "t.csv", text, &schema).unwrap_err(),
            Error::UnknownClass {
                line: 3,
                class: "c".into()
            }
        );
    }

    #[test]
    fn numeric_classes_sort_numerically() {
        let text = "x,label\n1,10\n2,9\n3,2\n";
        let ds = parse_csv("t", "t.csv", text, &CsvSchema::default()).unwrap();
        assert_eq!(ds.frame().labels(), &["2", "9", "10"]);
    }

    #[test]
    fn rich_column_round_trip() {
        let text = "x,label,rich_label\n0.5,a,0:0.7;0|1:0.3\n-1.25,b,1:1\n";
        let ds = parse_csv("t", "t.csv", text, &CsvSchema::default()).unwrap();
        let written = to_csv_string(&ds).unwrap();
        assert_eq!(
            written,
            "x,label,rich_label\n0.5,a,0:0.700000000;0|1:0.300000000\n-1.25,b,1:1.000000000\n"
        );
        let again = parse_csv("t", "t.csv", &written, &CsvSchema::default()).unwrap();
        assert_eq!(again, ds);
    }
}
