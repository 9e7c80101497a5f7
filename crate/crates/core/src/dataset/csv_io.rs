use std::collections::HashSet;
use std::io::{Read, Write};

use crate::dataset::{Dataset, SurvivalRecord};
use crate::error::{Error, Result};

pub const DEFAULT_LABEL_COLUMN: &str = "label";
pub const MONTHS_COLUMN: &str = "months";
pub const EVENT_COLUMN: &str = "event";
pub const TNM_COLUMN: &str = "tnm_stage";

/// Which CSV columns carry metadata instead of attributes.
#[derive(Debug, Clone, Default)]
pub struct CsvOptions {
    pub label_column: Option<String>,
    /// (months, event) column names.
    pub survival_columns: Option<(String, String)>,
    pub tnm_column: Option<String>,
}

impl CsvOptions {
    pub fn labeled(label: &str) -> Self {
        Self {
            label_column: Some(label.to_string()),
            ..Self::default()
        }
    }

    /// Uses each default metadata column name that appears in `header`.
    pub fn detect<S: AsRef<str>>(header: &[S]) -> Self {
        let has = |name: &str| header.iter().any(|h| h.as_ref().trim() == name);
        Self {
            label_column: has(DEFAULT_LABEL_COLUMN).then(|| DEFAULT_LABEL_COLUMN.to_string()),
            survival_columns: (has(MONTHS_COLUMN) && has(EVENT_COLUMN))
                .then(|| (MONTHS_COLUMN.to_string(), EVENT_COLUMN.to_string())),
            tnm_column: has(TNM_COLUMN).then(|| TNM_COLUMN.to_string()),
        }
    }

    /// Options matching the columns [`write_csv`] emits for `d`.
    pub fn written_by(d: &Dataset) -> Self {
        Self {
            label_column: d.labels().map(|_| DEFAULT_LABEL_COLUMN.to_string()),
            survival_columns: d
                .survival()
                .map(|_| (MONTHS_COLUMN.to_string(), EVENT_COLUMN.to_string())),
            tnm_column: d.tnm_stage().map(|_| TNM_COLUMN.to_string()),
        }
    }
}

fn is_missing(field: &str) -> bool {
    field.is_empty() || field == "?"
}

enum Role {
    Attribute,
    Label,
    Months,
    Event,
    Tnm,
}

/// Reads a UTF-8 CSV with a header row. Empty fields and `?` mark missing
/// attribute values. Row numbers in errors count data rows from 1.
pub fn load_csv<R: Read>(source: R, options: &CsvOptions) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();

    let mut seen = HashSet::new();
    for h in &header {
        if !seen.insert(h.as_str()) {
            return Err(Error::Schema(format!("duplicate column name '{h}'")));
        }
    }
    let find = |name: &str| -> Result<usize> {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("column '{name}' not found in header")))
    };
    let mut roles: Vec<Role> = header.iter().map(|_| Role::Attribute).collect();
    if let Some(name) = &options.label_column {
        roles[find(name)?] = Role::Label;
    }
    if let Some((months, event)) = &options.survival_columns {
        roles[find(months)?] = Role::Months;
        roles[find(event)?] = Role::Event;
    }
    if let Some(name) = &options.tnm_column {
        roles[find(name)?] = Role::Tnm;
    }

    let attributes: Vec<String> = header
        .iter()
        .zip(&roles)
        .filter(|(_, r)| matches!(r, Role::Attribute))
        .map(|(h, _)| h.clone())
        .collect();

    let mut rows = Vec::new();
    let mut masks = Vec::new();
    let mut labels = Vec::new();
    let mut months = Vec::new();
    let mut events = Vec::new();
    let mut stages = Vec::new();

    for (idx, record) in reader.records().enumerate() {
        let row_no = idx + 1;
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::Parse {
                row: row_no,
                column: String::new(),
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        let parse_err = |col: usize, message: String| Error::Parse {
            row: row_no,
            column: header[col].clone(),
            message,
        };
        let mut row = Vec::with_capacity(attributes.len());
        let mut mask = Vec::with_capacity(attributes.len());
        for (col, (field, role)) in record.iter().zip(&roles).enumerate() {
            let numeric = || -> Result<f64> {
                if is_missing(field) {
                    return Err(parse_err(col, "required value is missing".into()));
                }
                field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(col, format!("'{field}' is not a finite number")))
            };
            match role {
                Role::Attribute => {
                    if is_missing(field) {
                        row.push(f64::NAN);
                        mask.push(true);
                    } else {
                        row.push(numeric()?);
                        mask.push(false);
                    }
                }
                Role::Label => {
                    let v = numeric()?;
                    if v != 0.0 && v != 1.0 {
                        return Err(parse_err(col, format!("label '{field}' is not 0 or 1")));
                    }
                    labels.push(v as u8);
                }
                Role::Months => {
                    let v = numeric()?;
                    if v < 0.0 {
                        return Err(parse_err(col, format!("months '{field}' is negative")));
                    }
                    months.push(v);
                }
                Role::Event => {
                    let ev = match field {
                        "1" | "true" | "TRUE" | "True" => true,
                        "0" | "false" | "FALSE" | "False" => false,
                        _ => return Err(parse_err(col, format!("event '{field}' is not 0/1"))),
                    };
                    events.push(ev);
                }
                Role::Tnm => {
                    let v = numeric()?;
                    if v.fract() != 0.0 || !(1.0..=4.0).contains(&v) {
                        return Err(parse_err(col, format!("TNM stage '{field}' is not 1..4")));
                    }
                    stages.push(v as u8);
                }
            }
        }
        rows.push(row);
        masks.push(mask);
    }

    let mut d = Dataset::with_missing(attributes, &rows, &masks)?;
    if options.label_column.is_some() {
        d = d.with_labels(labels)?;
    }
    if options.survival_columns.is_some() {
        let recs = months
            .into_iter()
            .zip(events)
            .map(|(m, e)| SurvivalRecord { months: m, event: e })
            .collect();
        d = d.with_survival(recs)?;
    }
    if options.tnm_column.is_some() {
        d = d.with_tnm_stage(stages)?;
    }
    Ok(d)
}

/// Writes the dataset with the same conventions `load_csv` reads: missing
/// cells become empty fields; metadata columns are appended as `label`,
/// `months`, `event` and `tnm_stage` when present.
pub fn write_csv<W: Write>(d: &Dataset, sink: W) -> Result<()> {
    let mut header: Vec<String> = d.attributes().to_vec();
    if d.labels().is_some() {
        header.push(DEFAULT_LABEL_COLUMN.into());
    }
    if d.survival().is_some() {
        header.push(MONTHS_COLUMN.into());
        header.push(EVENT_COLUMN.into());
    }
    if d.tnm_stage().is_some() {
        header.push(TNM_COLUMN.into());
    }
    let mut seen = HashSet::new();
    if let Some(dup) = header.iter().find(|h| !seen.insert(h.as_str())) {
        return Err(Error::Schema(format!(
            "attribute name '{dup}' collides with a metadata column"
        )));
    }

    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(&header)?;
    let mut fields = Vec::with_capacity(header.len());
    for i in 0..d.n_samples() {
        fields.clear();
        for j in 0..d.n_attributes() {
            if d.is_missing(i, j) {
                fields.push(String::new());
            } else {
                fields.push(format!("{}", d.value(i, j)));
            }
        }
        if let Some(l) = d.labels() {
            fields.push(l[i].to_string());
        }
        if let Some(s) = d.survival() {
            fields.push(format!("{}", s[i].months));
            fields.push(if s[i].event { "1" } else { "0" }.to_string());
        }
        if let Some(t) = d.tnm_stage() {
            fields.push(t[i].to_string());
        }
        writer.write_record(&fields)?;
    }
    writer.flush()?;
    Ok(())
}
