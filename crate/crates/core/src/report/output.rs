//! Table, CSV and JSON-lines renderers. Nothing time-dependent is written,
//! so repeated runs produce identical bytes.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{RowOutcome, RunReport, SweepReport};
use crate::ansatz::{Family, ProfilePoint};
use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Jsonl,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(Self::Table),
            "csv" => Ok(Self::Csv),
            "jsonl" | "json" => Ok(Self::Jsonl),
            other => Err(Error::Config(format!("unknown output format '{other}'"))),
        }
    }
}

pub const CSV_HEADER: [&str; 10] =
    ["bundle", "family", "m", "eps", "constant_name", "constant_value", "nu", "significand", "exponent", "pass"];

/// One machine-readable report row. Numeric fields are empty when the row
/// failed to solve; `pass` is empty when there was no reference value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRecord {
    pub bundle: String,
    pub family: String,
    pub m: Option<f64>,
    pub eps: Option<String>,
    pub constant_name: String,
    pub constant_value: Option<f64>,
    pub nu: Option<f64>,
    pub significand: Option<f64>,
    pub exponent: Option<i32>,
    pub pass: Option<bool>,
}

impl CsvRecord {
    fn from_outcome(row: &RowOutcome) -> Self {
        let solved = row.solved.as_ref().ok();
        Self {
            bundle: row.bundle.clone(),
            family: row.spec.family.as_str().to_string(),
            m: row.spec.m,
            eps: row.spec.eps.as_ref().map(ToString::to_string),
            constant_name: row.spec.family.constant_name().to_string(),
            constant_value: solved.map(|s| s.constant_value()),
            nu: solved.map(|s| s.entropy.nu),
            significand: solved.map(|s| s.entropy.significand),
            exponent: solved.map(|s| s.entropy.exponent),
            pass: row.pass(),
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
fn machine(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt<T>(v: Option<T>, f: impl FnOnce(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

/// `x` to `digits` significant digits, in fixed notation where reasonable.
pub fn format_significant(x: f64, digits: usize) -> String {
    if !x.is_finite() || x == 0.0 {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..7).contains(&mag) {
        let decimals = (digits as i32 - 1 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.*e}", digits.saturating_sub(1))
    }
}

fn metric_label(row: &RowOutcome) -> String {
    let eps = row.spec.eps.as_ref().map(|e| format!(" eps=({e})")).unwrap_or_default();
    match row.spec.family {
        Family::QuasiEinstein => format!("QE m={}{eps}", opt(row.spec.m, |m| m.to_string())),
        Family::Krs => "KRS".to_string(),
        Family::EinsteinZ2 => "Einstein (Z2)".to_string(),
        Family::EinsteinWw => format!("Einstein{eps}"),
    }
}

fn write_table(report: &RunReport, w: &mut dyn Write) -> io::Result<()> {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<16} {:<22} {:<7} {:>14} {:>14} {:>11} {:>5} {:>10} {:>10}  status",
        "bundle", "metric", "const", "value", "nu", "significand", "exp", "d_const", "d_sig"
    );
    for row in &report.rows {
        let label = metric_label(row);
        let name = row.spec.family.constant_name();
        match &row.solved {
            Ok(s) => {
                let (dc, ds) = row.comparison.as_ref().map_or((String::new(), String::new()), |c| {
                    (format!("{:.2e}", c.constant_deviation), format!("{:.2e}", c.significand_deviation))
                });
                let status = match row.pass() {
                    Some(true) => "PASS",
                    Some(false) => "FAIL",
                    None => "-",
                };
                let _ = writeln!(
                    out,
                    "{:<16} {:<22} {:<7} {:>14} {:>14} {:>11} {:>5} {:>10} {:>10}  {}",
                    row.bundle,
                    label,
                    name,
                    format_significant(s.constant_value(), 7),
                    format_significant(s.entropy.nu, 7),
                    format_significant(s.entropy.significand, 7),
                    format!("e^-{}", s.entropy.exponent),
                    dc,
                    ds,
                    status
                );
            }
            Err(e) => {
                let _ = writeln!(out, "{:<16} {:<22} {:<7} error: {e}", row.bundle, label, name);
            }
        }
    }
    let passed = report.rows.iter().filter(|r| r.pass() == Some(true)).count();
    let compared = report.rows.iter().filter(|r| r.pass().is_some()).count();
    if compared > 0 {
        let _ = writeln!(out, "{passed}/{compared} rows within tolerance");
    }
    w.write_all(out.as_bytes())
}

fn write_csv(report: &RunReport, w: &mut dyn Write) -> io::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(CSV_HEADER)?;
    for row in &report.rows {
        let r = CsvRecord::from_outcome(row);
        wtr.write_record([
            r.bundle,
            r.family,
            opt(r.m, |m| m.to_string()),
            r.eps.unwrap_or_default(),
            r.constant_name,
            opt(r.constant_value, machine),
            opt(r.nu, machine),
            opt(r.significand, machine),
            opt(r.exponent, |e| e.to_string()),
            opt(r.pass, |p| p.to_string()),
        ])?;
    }
    wtr.flush()
}

fn write_jsonl(report: &RunReport, w: &mut dyn Write) -> io::Result<()> {
    for row in &report.rows {
        let mut value = serde_json::to_value(CsvRecord::from_outcome(row)).map_err(io::Error::other)?;
        if let Err(e) = &row.solved {
            value["error"] = json!(e.to_string());
        }
        if let Some(c) = &row.comparison {
            value["constant_deviation"] = json!(c.constant_deviation);
            value["significand_deviation"] = json!(c.significand_deviation);
        }
        serde_json::to_writer(&mut *w, &value).map_err(io::Error::other)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_report(report: &RunReport, format: OutputFormat, w: &mut dyn Write) -> io::Result<()> {
    match format {
        OutputFormat::Table => write_table(report, w),
        OutputFormat::Csv => write_csv(report, w),
        OutputFormat::Jsonl => write_jsonl(report, w),
    }
}

/// Reads back what [`write_report`] produced in CSV form.
pub fn parse_csv_report<R: io::Read>(r: R) -> csv::Result<Vec<CsvRecord>> {
    csv::Reader::from_reader(r).deserialize().collect()
}

pub fn write_samples(points: &[ProfilePoint], format: OutputFormat, w: &mut dyn Write) -> io::Result<()> {
    let n = points.first().map_or(0, |p| p.betas.len());
    let beta_names: Vec<String> = (1..=n).map(|i| format!("beta{i}")).collect();
    match format {
        OutputFormat::Csv | OutputFormat::Table => {
            let sep = if format == OutputFormat::Csv { "," } else { "  " };
            let fmt = |x: f64| {
                if format == OutputFormat::Csv {
                    machine(x)
                } else {
                    format!("{:>14}", format_significant(x, 7))
                }
            };
            let mut header = vec!["s".to_string(), "alpha".to_string()];
            header.extend(beta_names);
            header.push("f".to_string());
            if format == OutputFormat::Table {
                header = header.iter().map(|h| format!("{h:>14}")).collect();
            }
            writeln!(w, "{}", header.join(sep))?;
            for p in points {
                let mut cells = vec![fmt(p.s), fmt(p.alpha)];
                cells.extend(p.betas.iter().map(|&b| fmt(b)));
                cells.push(fmt(p.f));
                writeln!(w, "{}", cells.join(sep))?;
            }
            Ok(())
        }
        OutputFormat::Jsonl => {
            for p in points {
                let v = json!({ "s": p.s, "alpha": p.alpha, "betas": p.betas, "f": p.f });
                serde_json::to_writer(&mut *w, &v).map_err(io::Error::other)?;
                w.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

pub fn write_sweep(sweep: &SweepReport, format: OutputFormat, w: &mut dyn Write) -> io::Result<()> {
    type Line = (String, Result<(f64, f64), String>);
    let mut rows: Vec<Line> = sweep
        .rows
        .iter()
        .map(|r| {
            let v = r.solved.as_ref().map(|s| (s.constant_value(), s.entropy.nu)).map_err(ToString::to_string);
            (r.m.to_string(), v)
        })
        .collect();
    rows.push((
        "krs".to_string(),
        sweep.krs.as_ref().map(|s| (s.constant_value(), s.entropy.nu)).map_err(ToString::to_string),
    ));
    match format {
        OutputFormat::Table => {
            writeln!(w, "{} eps=({})", sweep.bundle, sweep.eps)?;
            writeln!(w, "{:>6} {:>14} {:>14}", "m", "constant", "nu")?;
            for (m, v) in &rows {
                match v {
                    Ok((c, nu)) => {
                        writeln!(w, "{m:>6} {:>14} {:>14}", format_significant(*c, 7), format_significant(*nu, 7))?
                    }
                    Err(e) => writeln!(w, "{m:>6} error: {e}")?,
                }
            }
            writeln!(w, "trend in m: {}", sweep.trend.as_str())
        }
        OutputFormat::Csv => {
            writeln!(w, "m,constant_value,nu,error")?;
            for (m, v) in &rows {
                match v {
                    Ok((c, nu)) => writeln!(w, "{m},{},{},", machine(*c), machine(*nu))?,
                    Err(e) => writeln!(w, "{m},,,\"{}\"", e.replace('"', "\"\""))?,
                }
            }
            Ok(())
        }
        OutputFormat::Jsonl => {
            for (m, v) in &rows {
                let value = match v {
                    Ok((c, nu)) => json!({ "m": m, "constant_value": c, "nu": nu }),
                    Err(e) => json!({ "m": m, "error": e }),
                };
                serde_json::to_writer(&mut *w, &value).map_err(io::Error::other)?;
                w.write_all(b"\n")?;
            }
            serde_json::to_writer(&mut *w, &json!({ "trend": sweep.trend })).map_err(io::Error::other)?;
            w.write_all(b"\n")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(3.8265521, 7), "3.826552");
        assert_eq!(format_significant(-0.6591305, 7), "-0.6591305");
        assert_eq!(format_significant(101.0473989, 7), "101.0474");
        assert_eq!(format_significant(1.5e-9, 3), "1.50e-9");
    }

    #[test]
    fn machine_format_round_trips() {
        let x = 0.1 + 0.2;
        assert_eq!(machine(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn formats_parse() {
        assert_eq!("CSV".parse::<OutputFormat>().unwrap(), OutputFormat::Csv);
        assert!("xml".parse::<OutputFormat>().is_err());
    }
}
