//! Thin CSV table layer with strict column checking and row-located errors.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};

pub(crate) struct Table {
    file: String,
    columns: HashMap<String, usize>,
    rows: Vec<(u64, Vec<String>)>,
}

pub(crate) struct Row<'a> {
    table: &'a Table,
    line: u64,
    fields: &'a [String],
}

impl Table {
    /// Reads `path` if it exists. Unknown columns and missing required columns
    /// are schema errors.
    pub fn read(path: &Path, allowed: &[&str], required: &[&str]) -> Result<Option<Table>> {
        if !path.exists() {
            return Ok(None);
        }
        let file = path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| Error::schema(&file, None, e.to_string()))?;
        let headers = reader
            .headers()
            .map_err(|e| Error::schema(&file, Some(1), e.to_string()))?
            .clone();
        let mut columns = HashMap::new();
        for (i, h) in headers.iter().enumerate() {
            if !allowed.contains(&h) {
                return Err(Error::schema(&file, Some(1), format!("unknown column `{h}`")));
            }
            if columns.insert(h.to_string(), i).is_some() {
                return Err(Error::schema(&file, Some(1), format!("duplicate column `{h}`")));
            }
        }
        for r in required {
            if !columns.contains_key(*r) {
                return Err(Error::schema(&file, Some(1), format!("missing column `{r}`")));
            }
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map(|p| p.line());
                Error::schema(&file, line, e.to_string())
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            rows.push((line, record.iter().map(str::to_string).collect()));
        }
        Ok(Some(Table { file, columns, rows }))
    }

    pub fn rows(&self) -> impl Iterator<Item = Row<'_>> {
        self.rows.iter().map(move |(line, fields)| Row {
            table: self,
            line: *line,
            fields,
        })
    }

    pub fn file(&self) -> &str {
        &self.file
    }
}

impl<'a> Row<'a> {
    pub fn error(&self, message: impl Into<String>) -> Error {
        Error::schema(&self.table.file, Some(self.line), message)
    }

    fn raw(&self, column: &str) -> Option<&'a str> {
        let idx = *self.table.columns.get(column)?;
        self.fields.get(idx).map(String::as_str).filter(|s| !s.is_empty())
    }

    pub fn opt_str(&self, column: &str) -> Option<&'a str> {
        self.raw(column)
    }

    pub fn str(&self, column: &str) -> Result<&'a str> {
        self.raw(column)
            .ok_or_else(|| self.error(format!("empty value in column `{column}`")))
    }

    pub fn opt_f64(&self, column: &str) -> Result<Option<f64>> {
        match self.raw(column) {
            None => Ok(None),
            Some(s) => s
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(Some)
                .ok_or_else(|| self.error(format!("`{s}` in column `{column}` is not a finite number"))),
        }
    }

    pub fn f64(&self, column: &str) -> Result<f64> {
        self.opt_f64(column)?
            .ok_or_else(|| self.error(format!("empty value in column `{column}`")))
    }

    pub fn usize(&self, column: &str) -> Result<usize> {
        let s = self.str(column)?;
        s.parse::<usize>()
            .map_err(|_| self.error(format!("`{s}` in column `{column}` is not a non-negative integer")))
    }

    pub fn opt_bool(&self, column: &str) -> Result<Option<bool>> {
        match self.raw(column) {
            None => Ok(None),
            Some(s) => match s.to_ascii_lowercase().as_str() {
                "1" | "true" | "yes" => Ok(Some(true)),
                "0" | "false" | "no" => Ok(Some(false)),
                _ => Err(self.error(format!("`{s}` in column `{column}` is not a boolean"))),
            },
        }
    }
}

/// Shortest decimal representation that parses back to the same bits.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub(crate) fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::io(path, e.into()))?;
    w.write_record(header).map_err(|e| Error::io(path, e.into()))?;
    for row in rows {
        w.write_record(row).map_err(|e| Error::io(path, e.into()))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
