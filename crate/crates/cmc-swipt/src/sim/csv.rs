//! Result rows and their CSV encoding.
//!
//! Floats are written with nine significant digits in scientific notation;
//! writing, parsing and re-writing a file is byte-stable at that precision.

use std::io::{BufRead, Write};

use crate::baselines::BaselineKind;
use crate::energy::EnergyBreakdown;
use crate::error::{Error, Result};

/// One (scheme, sweep value, trial) outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub scheme: BaselineKind,
    pub sweep_value: f64,
    pub trial: usize,
    pub seed: u64,
    /// False when the trial was infeasible for this scheme; all decision and
    /// energy fields are then empty.
    pub feasible: bool,
    pub imt: Option<usize>,
    pub lr_subchannel: Option<usize>,
    pub sr_subchannel: Option<usize>,
    pub lr_power: Option<f64>,
    pub sr_power: Option<f64>,
    pub e_bs_tx: Option<f64>,
    pub e_imt_lr_rx: Option<f64>,
    pub e_imt_sr_tx: Option<f64>,
    pub e_emt_sr_rx_total: Option<f64>,
    pub q_harvest_total: Option<f64>,
    pub net: Option<f64>,
    pub ec_mt: Option<f64>,
    pub ec_system: Option<f64>,
}

impl ResultRecord {
    pub fn infeasible(scheme: BaselineKind, sweep_value: f64, trial: usize, seed: u64) -> Self {
        Self {
            scheme,
            sweep_value,
            trial,
            seed,
            feasible: false,
            imt: None,
            lr_subchannel: None,
            sr_subchannel: None,
            lr_power: None,
            sr_power: None,
            e_bs_tx: None,
            e_imt_lr_rx: None,
            e_imt_sr_tx: None,
            e_emt_sr_rx_total: None,
            q_harvest_total: None,
            net: None,
            ec_mt: None,
            ec_system: None,
        }
    }

    pub fn set_breakdown(&mut self, b: &EnergyBreakdown) {
        self.e_bs_tx = Some(b.e_bs_tx);
        self.e_imt_lr_rx = Some(b.e_imt_lr_rx);
        self.e_imt_sr_tx = Some(b.e_imt_sr_tx);
        self.e_emt_sr_rx_total = Some(b.e_emt_sr_rx_total);
        self.q_harvest_total = Some(b.q_harvest_total);
        self.net = Some(b.net);
    }
}

/// Fixed column order of `results.csv`.
pub const RESULT_COLUMNS: &[&str] = &[
    "scheme",
    "sweep_value",
    "trial",
    "seed",
    "feasible",
    "imt",
    "lr_subchannel",
    "sr_subchannel",
    "lr_power",
    "sr_power",
    "e_bs_tx",
    "e_imt_lr_rx",
    "e_imt_sr_tx",
    "e_emt_sr_rx_total",
    "q_harvest_total",
    "net",
    "ec_mt",
    "ec_system",
];

/// Nine significant digits, scientific notation.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.8e}")
}

fn fmt_opt_float(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

fn fmt_opt_usize(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Quote a field if it holds a comma, quote or line break.
fn quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') || field.contains('\r') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn emit_results_csv(records: &[ResultRecord], out: &mut impl Write) -> Result<()> {
    writeln!(out, "{}", RESULT_COLUMNS.join(","))?;
    for r in records {
        let fields = [
            quote(r.scheme.label()),
            fmt_float(r.sweep_value),
            r.trial.to_string(),
            r.seed.to_string(),
            r.feasible.to_string(),
            fmt_opt_usize(r.imt),
            fmt_opt_usize(r.lr_subchannel),
            fmt_opt_usize(r.sr_subchannel),
            fmt_opt_float(r.lr_power),
            fmt_opt_float(r.sr_power),
            fmt_opt_float(r.e_bs_tx),
            fmt_opt_float(r.e_imt_lr_rx),
            fmt_opt_float(r.e_imt_sr_tx),
            fmt_opt_float(r.e_emt_sr_rx_total),
            fmt_opt_float(r.q_harvest_total),
            fmt_opt_float(r.net),
            fmt_opt_float(r.ec_mt),
            fmt_opt_float(r.ec_system),
        ];
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

fn parse_opt_usize(s: &str) -> Result<Option<usize>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|e| Error::Parse(format!("{s}: {e}")))
}

fn parse_opt_float(s: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|e| Error::Parse(format!("{s}: {e}")))
}

fn parse_float(s: &str) -> Result<f64> {
    s.parse().map_err(|e| Error::Parse(format!("{s}: {e}")))
}

/// Split one CSV line honoring quoted fields.
fn split_line(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut field = String::new();
    let mut chars = line.chars().peekable();
    let mut quoted = false;
    while let Some(c) = chars.next() {
        match c {
            '"' if quoted => {
                if chars.peek() == Some(&'"') {
                    chars.next();
                    field.push('"');
                } else {
                    quoted = false;
                }
            }
            '"' if field.is_empty() => quoted = true,
            ',' if !quoted => fields.push(std::mem::take(&mut field)),
            c => field.push(c),
        }
    }
    fields.push(field);
    fields
}

pub fn parse_results_csv(reader: impl BufRead) -> Result<Vec<ResultRecord>> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty results file".into()))??;
    if header != RESULT_COLUMNS.join(",") {
        return Err(Error::Parse(format!("unexpected header: {header}")));
    }
    let mut records = Vec::new();
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let f = split_line(&line);
        if f.len() != RESULT_COLUMNS.len() {
            return Err(Error::Parse(format!(
                "expected {} fields, got {}: {line}",
                RESULT_COLUMNS.len(),
                f.len()
            )));
        }
        records.push(ResultRecord {
            scheme: f[0].parse()?,
            sweep_value: parse_float(&f[1])?,
            trial: f[2]
                .parse()
                .map_err(|e| Error::Parse(format!("trial: {e}")))?,
            seed: f[3]
                .parse()
                .map_err(|e| Error::Parse(format!("seed: {e}")))?,
            feasible: f[4]
                .parse()
                .map_err(|e| Error::Parse(format!("feasible: {e}")))?,
            imt: parse_opt_usize(&f[5])?,
            lr_subchannel: parse_opt_usize(&f[6])?,
            sr_subchannel: parse_opt_usize(&f[7])?,
            lr_power: parse_opt_float(&f[8])?,
            sr_power: parse_opt_float(&f[9])?,
            e_bs_tx: parse_opt_float(&f[10])?,
            e_imt_lr_rx: parse_opt_float(&f[11])?,
            e_imt_sr_tx: parse_opt_float(&f[12])?,
            e_emt_sr_rx_total: parse_opt_float(&f[13])?,
            q_harvest_total: parse_opt_float(&f[14])?,
            net: parse_opt_float(&f[15])?,
            ec_mt: parse_opt_float(&f[16])?,
            ec_system: parse_opt_float(&f[17])?,
        });
    }
    Ok(records)
}

/// Per-(scheme, sweep value) aggregate of the feasible rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scheme: BaselineKind,
    pub sweep_value: f64,
    pub trials: usize,
    pub feasible_trials: usize,
    pub mean_ec_mt: Option<f64>,
    pub stderr_ec_mt: Option<f64>,
    pub mean_ec_system: Option<f64>,
    pub stderr_ec_system: Option<f64>,
    pub mean_net: Option<f64>,
    pub stderr_net: Option<f64>,
}

fn mean_stderr(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (Some(mean), Some(0.0));
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (Some(mean), Some((var / n).sqrt()))
}

/// Aggregate records into one row per (scheme, sweep value), ordered by
/// scheme label then sweep value.
pub fn summarize(records: &[ResultRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(BaselineKind, f64)> = Vec::new();
    for r in records {
        if !keys
            .iter()
            .any(|(s, v)| *s == r.scheme && *v == r.sweep_value)
        {
            keys.push((r.scheme, r.sweep_value));
        }
    }
    keys.sort_by(|a, b| {
        a.0.label()
            .cmp(b.0.label())
            .then(a.1.partial_cmp(&b.1).unwrap())
    });

    keys.into_iter()
        .map(|(scheme, sweep_value)| {
            let rows: Vec<&ResultRecord> = records
                .iter()
                .filter(|r| r.scheme == scheme && r.sweep_value == sweep_value)
                .collect();
            let feasible: Vec<&&ResultRecord> = rows.iter().filter(|r| r.feasible).collect();
            let collect = |f: fn(&ResultRecord) -> Option<f64>| -> Vec<f64> {
                feasible.iter().filter_map(|r| f(r)).collect()
            };
            let (mean_ec_mt, stderr_ec_mt) = mean_stderr(&collect(|r| r.ec_mt));
            let (mean_ec_system, stderr_ec_system) = mean_stderr(&collect(|r| r.ec_system));
            let (mean_net, stderr_net) = mean_stderr(&collect(|r| r.net));
            SummaryRow {
                scheme,
                sweep_value,
                trials: rows.len(),
                feasible_trials: feasible.len(),
                mean_ec_mt,
                stderr_ec_mt,
                mean_ec_system,
                stderr_ec_system,
                mean_net,
                stderr_net,
            }
        })
        .collect()
}

pub const SUMMARY_COLUMNS: &[&str] = &[
    "scheme",
    "sweep_value",
    "trials",
    "feasible_trials",
    "mean_ec_mt",
    "stderr_ec_mt",
    "mean_ec_system",
    "stderr_ec_system",
    "mean_net",
    "stderr_net",
];

pub fn emit_summary_csv(rows: &[SummaryRow], out: &mut impl Write) -> Result<()> {
    writeln!(out, "{}", SUMMARY_COLUMNS.join(","))?;
    for r in rows {
        let fields = [
            quote(r.scheme.label()),
            fmt_float(r.sweep_value),
            r.trials.to_string(),
            r.feasible_trials.to_string(),
            fmt_opt_float(r.mean_ec_mt),
            fmt_opt_float(r.stderr_ec_mt),
            fmt_opt_float(r.mean_ec_system),
            fmt_opt_float(r.stderr_ec_system),
            fmt_opt_float(r.mean_net),
            fmt_opt_float(r.stderr_net),
        ];
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Gain matrices as CSV: one row per terminal, one column per subchannel.
pub fn emit_gain_matrix_csv(matrix: &[Vec<f64>], out: &mut impl Write) -> Result<()> {
    for row in matrix {
        let fields: Vec<String> = row.iter().map(|g| fmt_float(*g)).collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_records() -> Vec<ResultRecord> {
        let mut a = ResultRecord::infeasible(BaselineKind::ProposedPs, 2.0, 0, 99);
        a.feasible = true;
        a.imt = Some(3);
        a.lr_subchannel = Some(1);
        a.sr_subchannel = Some(0);
        a.lr_power = Some(12.345678901234);
        a.sr_power = Some(0.5);
        a.set_breakdown(&EnergyBreakdown {
            e_bs_tx: 1.0,
            e_imt_lr_rx: 0.25,
            e_imt_sr_tx: 0.5,
            e_emt_sr_rx_total: 0.75,
            q_harvest_total: 0.1,
            net: 2.4,
        });
        a.ec_mt = Some(70.0);
        a.ec_system = Some(85.0);
        let b = ResultRecord::infeasible(BaselineKind::Rsa, 2.0, 1, 100);
        vec![a, b]
    }

    #[test]
    fn header_only_for_empty_records() {
        let mut buf = Vec::new();
        emit_results_csv(&[], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("scheme,sweep_value"));
        let parsed = parse_results_csv(text.as_bytes()).unwrap();
        assert!(parsed.is_empty());
    }

    /// Emit → parse → emit is byte-stable; the parsed records carry the
    /// nine-digit values exactly.
    #[test]
    fn round_trip_is_byte_stable() {
        let records = sample_records();
        let mut once = Vec::new();
        emit_results_csv(&records, &mut once).unwrap();
        let parsed = parse_results_csv(once.as_slice()).unwrap();
        assert_eq!(parsed.len(), records.len());
        assert_eq!(parsed[1], records[1]);
        let mut twice = Vec::new();
        emit_results_csv(&parsed, &mut twice).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn float_format_is_nine_significant_digits() {
        assert_eq!(fmt_float(1.0), "1.00000000e0");
        assert_eq!(fmt_float(-0.0012345678949), "-1.23456789e-3");
        let v = 123.456789012345;
        let round_tripped: f64 = fmt_float(v).parse().unwrap();
        assert_eq!(fmt_float(round_tripped), fmt_float(v));
    }

    #[test]
    fn summary_means_are_arithmetic_means() {
        let mut records = Vec::new();
        for (trial, ec) in [(0usize, 10.0), (1, 20.0), (2, 60.0)] {
            let mut r =
                ResultRecord::infeasible(BaselineKind::ProposedPs, 1.0, trial, trial as u64);
            r.feasible = true;
            r.ec_mt = Some(ec);
            r.ec_system = Some(ec + 5.0);
            r.net = Some(ec / 10.0);
            records.push(r);
        }
        let rows = summarize(&records);
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert_eq!(row.trials, 3);
        assert_eq!(row.feasible_trials, 3);
        assert!((row.mean_ec_mt.unwrap() - 30.0).abs() < 1e-12);
        assert!((row.mean_net.unwrap() - 3.0).abs() < 1e-12);
        assert!(row.stderr_ec_mt.unwrap() > 0.0);
    }

    #[test]
    fn quoting_handles_awkward_fields() {
        assert_eq!(quote("plain"), "plain");
        assert_eq!(quote("a,b"), "\"a,b\"");
        assert_eq!(quote("say \"hi\""), "\"say \"\"hi\"\"\"");
        assert_eq!(
            split_line("\"a,b\",c"),
            vec!["a,b".to_string(), "c".to_string()]
        );
    }
}
