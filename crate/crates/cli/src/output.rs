use std::fs;
use std::path::Path;

use csv::Writer;
use layerscat::verify::CheckReport;
use layerscat::{DensitySolution, FarField, C64};

use crate::error::CliError;

/// 17 significant digits, independent of locale.
pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    let kind = match e.into_kind() {
        csv::ErrorKind::Io(io) => io,
        other => std::io::Error::other(format!("{other:?}")),
    };
    CliError::io(path, kind)
}

fn write_rows(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), CliError> {
    let mut w = Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_far_field(path: &Path, ff: &FarField) -> Result<(), CliError> {
    let rows = ff
        .angles
        .iter()
        .zip(&ff.values)
        .map(|(t, v)| vec![number(*t), number(v.re), number(v.im)]);
    write_rows(path, &["theta_rad", "re_uinf", "im_uinf"], rows)
}

pub fn write_densities(path: &Path, sol: &DensitySolution) -> Result<(), CliError> {
    let blocks: [(&str, &[C64]); 5] = [
        ("psi0", &sol.psi0),
        ("phi0", &sol.phi0),
        ("psi1", &sol.psi1),
        ("phi1", &sol.phi1),
        ("w", &sol.w_grid),
    ];
    let rows = blocks.into_iter().flat_map(|(name, values)| {
        values
            .iter()
            .enumerate()
            .map(move |(i, v)| vec![name.to_string(), i.to_string(), number(v.re), number(v.im)])
    });
    write_rows(path, &["component", "index", "re", "im"], rows)
}

pub fn write_checks(path: &Path, reports: &[CheckReport]) -> Result<(), CliError> {
    let rows = reports.iter().map(|r| {
        vec![
            r.name.clone(),
            number(r.discrepancy),
            number(r.tolerance),
            r.pass.to_string(),
        ]
    });
    write_rows(path, &["check", "discrepancy", "tolerance", "pass"], rows)
}

pub fn write_table(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), CliError> {
    write_rows(path, header, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_carry_seventeen_digits() {
        assert_eq!(number(0.1), "1.0000000000000001e-1");
        assert_eq!(number(-2.0), "-2.0000000000000000e0");
        let x = std::f64::consts::PI;
        assert_eq!(number(x).parse::<f64>().unwrap(), x);
    }
}
