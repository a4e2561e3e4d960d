//! CSV ingestion: one record per line, either `value`, `label,value` or
//! `label,value,order`, with an optional header line.

use std::path::Path;

use ci_overlap::SupportBounds;

use crate::failure::input;

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    /// 1-based line number in the source.
    pub line: usize,
    pub label: Option<String>,
    pub value: f64,
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataFile {
    pub name: String,
    pub columns: usize,
    pub rows: Vec<Row>,
}

fn parse_number(field: &str) -> Option<f64> {
    field.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

impl DataFile {
    pub fn parse(name: &str, text: &str) -> anyhow::Result<DataFile> {
        let mut columns = None;
        let mut rows = Vec::new();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let record = raw.trim();
            if record.is_empty() {
                continue;
            }
            let fields: Vec<&str> = record.split(',').map(str::trim).collect();
            if fields.len() > 3 {
                return Err(input(format!("{name}:{line}: expected at most 3 columns, found {}", fields.len())));
            }
            let value_field = if fields.len() == 1 { fields[0] } else { fields[1] };
            let value = parse_number(value_field);
            match columns {
                None if value.is_none() => {
                    // The first record is a header when its value does not parse.
                    columns = Some(fields.len());
                    continue;
                }
                None => columns = Some(fields.len()),
                Some(expected) if expected != fields.len() => {
                    return Err(input(format!(
                        "{name}:{line}: expected {expected} columns, found {}",
                        fields.len()
                    )));
                }
                Some(_) => {}
            }
            let Some(value) = value else {
                return Err(input(format!("{name}:{line}: cannot parse `{value_field}` as a finite number")));
            };
            let order = match fields.get(2) {
                Some(field) => Some(parse_number(field).ok_or_else(|| {
                    input(format!("{name}:{line}: cannot parse order `{field}` as a finite number"))
                })?),
                None => None,
            };
            rows.push(Row {
                line,
                label: (fields.len() > 1).then(|| fields[0].to_string()),
                value,
                order,
            });
        }
        Ok(DataFile {
            name: name.to_string(),
            columns: columns.unwrap_or(1),
            rows,
        })
    }

    pub fn read(path: &Path) -> anyhow::Result<DataFile> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| input(format!("{name}: {e}")))?;
        DataFile::parse(&name, &text)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn has_order(&self) -> bool {
        self.columns == 3
    }

    /// Rejects the first value outside `bounds`, naming its line.
    pub fn check_bounds(&self, bounds: SupportBounds) -> anyhow::Result<()> {
        match self.rows.iter().find(|r| !bounds.contains(r.value)) {
            Some(r) => Err(input(format!(
                "{}:{}: value {} is outside the declared bounds {bounds}",
                self.name, r.line, r.value
            ))),
            None => Ok(()),
        }
    }

    /// Named series in order of first appearance. Unlabeled files form a
    /// single series called `default_label`.
    pub fn series(&self, default_label: &str) -> Vec<(String, Vec<f64>)> {
        let mut out: Vec<(String, Vec<f64>)> = Vec::new();
        for row in &self.rows {
            let label = row.label.as_deref().unwrap_or(default_label);
            match out.iter_mut().find(|(l, _)| l == label) {
                Some((_, values)) => values.push(row.value),
                None => out.push((label.to_string(), vec![row.value])),
            }
        }
        out
    }

    /// All values, requiring at most one label.
    pub fn single_series(&self) -> anyhow::Result<Vec<f64>> {
        let series = self.series("");
        if series.len() > 1 {
            return Err(input(format!(
                "{}: expected one series, found labels {}",
                self.name,
                series.iter().map(|(l, _)| l.as_str()).collect::<Vec<_>>().join(", ")
            )));
        }
        Ok(self.rows.iter().map(|r| r.value).collect())
    }
}

/// Parses `a,b` into support bounds.
pub fn parse_bounds(text: &str) -> Result<SupportBounds, String> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| format!("expected `a,b`, got `{text}`"))?;
    let a: f64 = a.trim().parse().map_err(|_| format!("cannot parse `{a}`"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("cannot parse `{b}`"))?;
    SupportBounds::new(a, b).map_err(|e| e.to_string())
}
