//! CSV tables and plain-text reports. Floats are written with 17
//! significant digits in exponent form so output is byte-stable.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::closed_form::ConsistencyReport;
use crate::sweep::SweepTable;

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

fn render(header: &[String], records: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in records {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
}

pub fn sweep_header(table: &SweepTable) -> Vec<String> {
    let mut header = vec![table.axis.column_name().to_string()];
    header.extend(table.outputs.iter().map(|c| c.name().to_string()));
    header.push("warnings".into());
    header.push("error".into());
    header
}

pub fn sweep_csv(table: &SweepTable) -> String {
    let records: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|row| {
            let mut rec = vec![format_float(row.axis_value)];
            match &row.evaluation {
                Some(e) => {
                    rec.extend(table.outputs.iter().map(|c| format_float(c.value(e))));
                    rec.push(
                        e.warnings
                            .iter()
                            .map(|w| w.tag())
                            .collect::<Vec<_>>()
                            .join(";"),
                    );
                }
                None => {
                    rec.extend(table.outputs.iter().map(|_| String::new()));
                    rec.push(String::new());
                }
            }
            rec.push(row.error.clone().unwrap_or_default());
            rec
        })
        .collect();
    render(&sweep_header(table), &records)
}

pub const ORACLE_HEADER: [&str; 18] = [
    "alpha",
    "R_nm",
    "g_eV",
    "delta_e_paper_eV",
    "e2_oracle_eV",
    "exact_shift_eV",
    "diff_paper_oracle_eV",
    "rel_diff_paper_oracle",
    "residual_oracle_exact_eV",
    "beta1_paper",
    "beta1_oracle",
    "beta2_paper",
    "beta2_oracle",
    "paper_exponent",
    "oracle_exponent",
    "exact_exponent",
    "exponent_discrepancy",
    "error",
];

pub fn oracle_csv(report: &ConsistencyReport) -> String {
    let records: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            let fit = report.fit_for(r.alpha);
            vec![
                format_float(r.alpha),
                format_float(r.r_nm),
                format_float(r.g),
                format_float(r.delta_e_paper),
                format_float(r.e2_oracle),
                format_float(r.exact_shift),
                format_float(r.diff_paper_oracle),
                format_float(r.rel_diff_paper_oracle),
                format_float(r.residual_oracle_exact),
                format_float(r.beta1_paper),
                format_float(r.beta1_oracle),
                format_float(r.beta2_paper),
                format_float(r.beta2_oracle),
                format_opt(fit.and_then(|f| f.paper_exponent)),
                format_opt(fit.and_then(|f| f.oracle_exponent)),
                format_opt(fit.and_then(|f| f.exact_exponent)),
                fit.is_some_and(|f| f.discrepant).to_string(),
                r.error.clone().unwrap_or_default(),
            ]
        })
        .collect();
    let header: Vec<String> = ORACLE_HEADER.iter().map(|s| s.to_string()).collect();
    render(&header, &records)
}

/// `results.csv` -> `results.meta`
pub fn meta_path(out: &Path) -> PathBuf {
    out.with_extension("meta")
}

pub fn write_with_meta(out: &Path, body: &str, meta: &str) -> io::Result<()> {
    fs::write(out, body)?;
    fs::write(meta_path(out), meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(format_float(-0.2), "-2.0000000000000001e-1");
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(0.0), "0.0000000000000000e0");
    }

    #[test]
    fn meta_sidecar_path() {
        assert_eq!(
            meta_path(Path::new("a/run.csv")),
            PathBuf::from("a/run.meta")
        );
        assert_eq!(meta_path(Path::new("run")), PathBuf::from("run.meta"));
    }
}
