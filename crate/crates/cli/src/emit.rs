//! Result records and their CSV/JSON serialization.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which
//! round-trips every finite f64 exactly; non-finite values appear as
//! `inf`/`-inf`/`nan` in CSV and as the same strings (quoted) in JSON, since
//! bare JSON has no literal for them.

use std::io::{Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};

use crate::config::{MethodTag, OutputFormat};

/// One benchmark result: the metrics of one method at one regularity index
/// in one repetition.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub function: String,
    pub method: MethodTag,
    /// Matérn regularity index of the fitted model.
    pub p: usize,
    /// Repetition index (0-based).
    pub repetition: usize,
    /// Seed of this repetition (`base_seed + repetition`).
    pub seed: u64,
    /// Empirical coverage of the nominal-level intervals on the test set.
    pub coverage: f64,
    /// Mean interval width at the nominal level.
    pub mean_width: f64,
    /// Integrated absolute calibration error over the level grid.
    pub iae: f64,
    /// RMSE of the method's point predictions on the test set.
    pub rmse: f64,
    /// Wall-clock seconds spent on this method's intervals, or 0 when timing
    /// is disabled (the default, keeping outputs byte-deterministic).
    pub wall_time_s: f64,
}

pub const CSV_HEADER: &str =
    "function,method,p,repetition,seed,coverage,mean_width,iae,rmse,wall_time_s";

/// One row of the Pareto scatter: a hyperparameter draw (or the REML /
/// J+GP-corrected point) with its LOO-side and test-side accuracy and
/// calibration.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoRow {
    /// `"sample"`, `"reml"`, or `"jplus_gp"`.
    pub kind: String,
    /// Variance of the draw.
    pub sigma2: f64,
    /// Lengthscales of the draw.
    pub lengthscales: Vec<f64>,
    pub rmse_loo: f64,
    pub iae_loo: f64,
    pub rmse_test: f64,
    pub iae_test: f64,
}

pub const PARETO_CSV_HEADER: &str = "kind,sigma2,lengthscales,rmse_loo,iae_loo,rmse_test,iae_test";

/// 17-significant-digit decimal form of `v`; parses back to the same bits
/// for every finite f64.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn parse_float(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .with_context(|| format!("parsing float field '{s}'"))
}

/// Write records as CSV with the exact schema in [`CSV_HEADER`].
pub fn emit_csv<W: Write>(records: &[RunRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER.split(','))?;
    for r in records {
        w.write_record([
            r.function.as_str(),
            r.method.as_str(),
            &r.p.to_string(),
            &r.repetition.to_string(),
            &r.seed.to_string(),
            &format_float(r.coverage),
            &format_float(r.mean_width),
            &format_float(r.iae),
            &format_float(r.rmse),
            &format_float(r.wall_time_s),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Write records as a JSON array with the same field names and float
/// precision as the CSV schema.
pub fn emit_json<W: Write>(records: &[RunRecord], mut writer: W) -> Result<()> {
    writeln!(writer, "[")?;
    for (i, r) in records.iter().enumerate() {
        let comma = if i + 1 < records.len() { "," } else { "" };
        writeln!(
            writer,
            "  {{\"function\":{},\"method\":\"{}\",\"p\":{},\"repetition\":{},\"seed\":{},\
             \"coverage\":{},\"mean_width\":{},\"iae\":{},\"rmse\":{},\"wall_time_s\":{}}}{}",
            serde_json::to_string(&r.function)?,
            r.method.as_str(),
            r.p,
            r.repetition,
            r.seed,
            json_float(r.coverage),
            json_float(r.mean_width),
            json_float(r.iae),
            json_float(r.rmse),
            json_float(r.wall_time_s),
            comma,
        )?;
    }
    writeln!(writer, "]")?;
    Ok(())
}

/// JSON token for a float: bare number when finite, quoted string otherwise.
fn json_float(v: f64) -> String {
    if v.is_finite() {
        format_float(v)
    } else {
        format!("\"{}\"", format_float(v))
    }
}

/// Write records to `path` in the requested format.
pub fn emit_results(records: &[RunRecord], format: OutputFormat, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)
        .with_context(|| format!("creating output file {}", path.display()))?;
    let buf = std::io::BufWriter::new(file);
    match format {
        OutputFormat::Csv => emit_csv(records, buf),
        OutputFormat::Json => emit_json(records, buf),
    }
    .with_context(|| format!("writing {}", path.display()))
}

/// Parse records from CSV produced by [`emit_csv`].
pub fn parse_csv<R: Read>(reader: R) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_reader(reader);
    {
        let header: Vec<&str> = r.headers()?.iter().collect();
        let expected: Vec<&str> = CSV_HEADER.split(',').collect();
        if header != expected {
            bail!("unexpected CSV header {header:?}");
        }
    }
    let mut out = Vec::new();
    for row in r.records() {
        let row = row?;
        if row.len() != 10 {
            bail!("expected 10 CSV fields, got {}", row.len());
        }
        out.push(RunRecord {
            function: row[0].to_string(),
            method: row[1].parse()?,
            p: row[2].parse().context("parsing p")?,
            repetition: row[3].parse().context("parsing repetition")?,
            seed: row[4].parse().context("parsing seed")?,
            coverage: parse_float(&row[5])?,
            mean_width: parse_float(&row[6])?,
            iae: parse_float(&row[7])?,
            rmse: parse_float(&row[8])?,
            wall_time_s: parse_float(&row[9])?,
        });
    }
    Ok(out)
}

/// Parse records from JSON produced by [`emit_json`].
pub fn parse_json<R: Read>(reader: R) -> Result<Vec<RunRecord>> {
    let value: serde_json::Value = serde_json::from_reader(reader)?;
    let Some(items) = value.as_array() else {
        bail!("expected a JSON array of records");
    };
    items
        .iter()
        .map(|item| {
            let get = |key: &str| {
                item.get(key)
                    .with_context(|| format!("record missing field '{key}'"))
            };
            let float = |key: &str| -> Result<f64> {
                let v = get(key)?;
                match v {
                    serde_json::Value::Number(n) => n
                        .as_f64()
                        .with_context(|| format!("field '{key}' overflows f64")),
                    serde_json::Value::String(s) => parse_float(s),
                    other => bail!("field '{key}' has unexpected type: {other}"),
                }
            };
            let uint = |key: &str| -> Result<u64> {
                get(key)?
                    .as_u64()
                    .with_context(|| format!("field '{key}' is not a non-negative integer"))
            };
            Ok(RunRecord {
                function: get("function")?
                    .as_str()
                    .context("field 'function' is not a string")?
                    .to_string(),
                method: get("method")?
                    .as_str()
                    .context("field 'method' is not a string")?
                    .parse()?,
                p: uint("p")? as usize,
                repetition: uint("repetition")? as usize,
                seed: uint("seed")?,
                coverage: float("coverage")?,
                mean_width: float("mean_width")?,
                iae: float("iae")?,
                rmse: float("rmse")?,
                wall_time_s: float("wall_time_s")?,
            })
        })
        .collect()
}

/// Write Pareto rows as CSV; lengthscales are `;`-joined inside one field.
pub fn emit_pareto_csv<W: Write>(rows: &[ParetoRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(PARETO_CSV_HEADER.split(','))?;
    for r in rows {
        let rho = r
            .lengthscales
            .iter()
            .map(|&v| format_float(v))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            r.kind.as_str(),
            &format_float(r.sigma2),
            &rho,
            &format_float(r.rmse_loo),
            &format_float(r.iae_loo),
            &format_float(r.rmse_test),
            &format_float(r.iae_test),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parse rows from CSV produced by [`emit_pareto_csv`].
pub fn parse_pareto_csv<R: Read>(reader: R) -> Result<Vec<ParetoRow>> {
    let mut r = csv::Reader::from_reader(reader);
    {
        let header: Vec<&str> = r.headers()?.iter().collect();
        let expected: Vec<&str> = PARETO_CSV_HEADER.split(',').collect();
        if header != expected {
            bail!("unexpected Pareto CSV header {header:?}");
        }
    }
    let mut out = Vec::new();
    for row in r.records() {
        let row = row?;
        if row.len() != 7 {
            bail!("expected 7 CSV fields, got {}", row.len());
        }
        let lengthscales = if row[2].is_empty() {
            Vec::new()
        } else {
            row[2]
                .split(';')
                .map(parse_float)
                .collect::<Result<Vec<f64>>>()?
        };
        out.push(ParetoRow {
            kind: row[0].to_string(),
            sigma2: parse_float(&row[1])?,
            lengthscales,
            rmse_loo: parse_float(&row[3])?,
            iae_loo: parse_float(&row[4])?,
            rmse_test: parse_float(&row[5])?,
            iae_test: parse_float(&row[6])?,
        });
    }
    Ok(out)
}
