use std::path::Path;

use crate::error::CliError;
use crate::presets::{SeriesStyle, SERIES_COLORS};
use crate::sweep::SweepResult;

/// Builds a gnuplot script for a sweep already written to `csv_name`
/// (referenced relatively, so the pair stays portable as a directory).
/// Fidelity tables plot the normalized column of each series; QFI tables
/// plot the single value column. Series are told apart by dash pattern or
/// by the fixed color set, per `style`.
pub fn plot_script(
    result: &SweepResult,
    csv_name: &str,
    style: SeriesStyle,
) -> Result<String, CliError> {
    if result.rows.is_empty() {
        return Err(CliError::Validation(
            "cannot emit a plot script for an empty sweep".into(),
        ));
    }
    // 1-based gnuplot column index of each curve, with its legend label
    let curves: Vec<(usize, String)> = result
        .columns
        .iter()
        .enumerate()
        .filter_map(|(i, col)| {
            let label = col
                .strip_suffix("_norm")
                .or_else(|| col.strip_suffix("_qfi"))?;
            Some((i + 1, label.to_string()))
        })
        .collect();
    if curves.is_empty() {
        return Err(CliError::Validation(
            "no plottable columns (expected *_norm or *_qfi)".into(),
        ));
    }
    let ylabel = if result.columns.iter().any(|c| c.ends_with("_qfi")) {
        "qfi_theta"
    } else {
        "fidelity"
    };

    let mut out = String::new();
    out.push_str(&format!("# gnuplot script for {csv_name}\n"));
    for c in &result.comments {
        out.push_str(&format!("# {c}\n"));
    }
    out.push_str("set datafile separator ','\n");
    out.push_str("set xlabel 'tau'\n");
    out.push_str(&format!("set ylabel '{ylabel}'\n"));
    out.push_str("set key outside right\n");
    out.push_str("plot \\\n");
    for (k, (col, label)) in curves.iter().enumerate() {
        let attr = match style {
            SeriesStyle::Dashes => format!("dashtype {}", k + 1),
            SeriesStyle::Colors => format!(
                "lc rgb '{}'",
                SERIES_COLORS[k.min(SERIES_COLORS.len() - 1)]
            ),
        };
        let sep = if k + 1 == curves.len() { "\n" } else { ", \\\n" };
        out.push_str(&format!(
            "  '{csv_name}' using 1:{col} with lines {attr} title '{label}'{sep}"
        ));
    }
    Ok(out)
}

pub fn emit_plot_script(
    result: &SweepResult,
    csv_name: &str,
    style: SeriesStyle,
    path: &Path,
) -> Result<(), CliError> {
    let script = plot_script(result, csv_name, style)?;
    std::fs::write(path, script).map_err(|e| CliError::from_io(e, path))
}
