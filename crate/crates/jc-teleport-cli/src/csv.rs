use std::path::Path;

use crate::error::CliError;
use crate::sweep::SweepResult;

/// Renders a sweep as CSV: "# " comment lines, a header row, then one row
/// per tau with every value at 17 significant digits (enough to round-trip
/// an f64 bit-exactly), LF line endings, no trailing delimiter.
pub fn format_csv(result: &SweepResult) -> String {
    let mut out = String::new();
    for c in &result.comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str(&result.columns.join(","));
    out.push('\n');
    for row in &result.rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            first = false;
            out.push_str(&format!("{v:.16e}"));
        }
        out.push('\n');
    }
    out
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<(), CliError> {
    std::fs::write(path, format_csv(result)).map_err(|e| CliError::from_io(e, path))
}

/// Parses CSV produced by `format_csv` back into a sweep table.
pub fn parse_csv(text: &str) -> Result<SweepResult, String> {
    let mut comments = Vec::new();
    let mut columns: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if let Some(rest) = line.strip_prefix('#') {
            comments.push(rest.strip_prefix(' ').unwrap_or(rest).to_string());
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        match &columns {
            None => {
                columns = Some(line.split(',').map(|s| s.to_string()).collect());
            }
            Some(cols) => {
                let row = line
                    .split(',')
                    .map(|cell| {
                        cell.trim()
                            .parse::<f64>()
                            .map_err(|e| format!("line {}: bad number {cell:?}: {e}", lineno + 1))
                    })
                    .collect::<Result<Vec<f64>, String>>()?;
                if row.len() != cols.len() {
                    return Err(format!(
                        "line {}: {} cells, expected {}",
                        lineno + 1,
                        row.len(),
                        cols.len()
                    ));
                }
                rows.push(row);
            }
        }
    }
    Ok(SweepResult {
        comments,
        columns: columns.ok_or("missing header row")?,
        rows,
    })
}
