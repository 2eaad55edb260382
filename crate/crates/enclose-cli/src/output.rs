//! CSV trajectory output and the flat `key = value` metrics format.
//!
//! Floats are written with 17 significant digits so a parse of the emitted
//! text reproduces the in-memory values exactly; repeated runs of the same
//! scenario therefore produce byte-identical files on one platform.

use enclose_core::simulator::{LogRecord, RunMetrics, TrajectoryLog};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// Column names (with units) of the trajectory CSV, in emission order.
pub const CSV_COLUMNS: [&str; 22] = [
    "t_s",
    "pursuer_x_m",
    "pursuer_y_m",
    "pursuer_heading_rad",
    "target_x_m",
    "target_y_m",
    "target_heading_rad",
    "r_m",
    "theta_rad",
    "sigma_p_rad",
    "rho_m",
    "rho_dot_mps",
    "r_d_m",
    "s_mps",
    "w_mps2",
    "a_p_nominal_mps2",
    "a_p_disturbance_mps2",
    "a_p_applied_mps2",
    "a_t_mps2",
    "care_residual",
    "guard",
    "saturated",
];

fn record_values(rec: &LogRecord) -> [f64; 20] {
    [
        rec.t,
        rec.pursuer_x,
        rec.pursuer_y,
        rec.pursuer_gamma,
        rec.target_x,
        rec.target_y,
        rec.target_gamma,
        rec.r,
        rec.theta,
        rec.sigma_p,
        rec.rho,
        rec.rho_dot,
        rec.r_d,
        rec.s,
        rec.w,
        rec.a_p_nominal,
        rec.a_p_disturbance,
        rec.a_p_applied,
        rec.a_t,
        rec.care_residual,
    ]
}

pub fn write_csv(log: &TrajectoryLog, path: &Path) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", CSV_COLUMNS.join(","))?;
    for rec in &log.records {
        let mut line = String::with_capacity(24 * CSV_COLUMNS.len());
        for v in record_values(rec) {
            line.push_str(&format!("{v:.16e}"));
            line.push(',');
        }
        line.push_str(if rec.guard { "1," } else { "0," });
        line.push_str(if rec.saturated { "1" } else { "0" });
        writeln!(out, "{line}")?;
    }
    out.flush()
}

/// Parse a CSV produced by [`write_csv`] back into records.
pub fn read_csv(path: &Path) -> anyhow::Result<Vec<LogRecord>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| anyhow::anyhow!("empty CSV"))?;
    anyhow::ensure!(
        header == CSV_COLUMNS.join(","),
        "unexpected CSV header: {header}"
    );
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        anyhow::ensure!(
            fields.len() == CSV_COLUMNS.len(),
            "line {}: expected {} fields, got {}",
            lineno + 2,
            CSV_COLUMNS.len(),
            fields.len()
        );
        let f = |i: usize| -> anyhow::Result<f64> {
            fields[i]
                .parse::<f64>()
                .map_err(|e| anyhow::anyhow!("line {}: field {i}: {e}", lineno + 2))
        };
        records.push(LogRecord {
            t: f(0)?,
            pursuer_x: f(1)?,
            pursuer_y: f(2)?,
            pursuer_gamma: f(3)?,
            target_x: f(4)?,
            target_y: f(5)?,
            target_gamma: f(6)?,
            r: f(7)?,
            theta: f(8)?,
            sigma_p: f(9)?,
            rho: f(10)?,
            rho_dot: f(11)?,
            r_d: f(12)?,
            s: f(13)?,
            w: f(14)?,
            a_p_nominal: f(15)?,
            a_p_disturbance: f(16)?,
            a_p_applied: f(17)?,
            a_t: f(18)?,
            care_residual: f(19)?,
            guard: fields[20] == "1",
            saturated: fields[21] == "1",
        });
    }
    Ok(records)
}

/// Extra scalar entries emitted alongside the run metrics.
pub type ExtraEntries<'a> = &'a [(&'a str, String)];

pub fn write_metrics(
    metrics: &RunMetrics,
    extra: ExtraEntries,
    path: &Path,
) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for (key, value) in extra {
        writeln!(out, "{key} = {value}")?;
    }
    let fl = |v: f64| format!("{v:.9e}");
    writeln!(
        out,
        "convergence_time_s = {}",
        metrics.convergence_time.map_or("nan".into(), fl)
    )?;
    writeln!(out, "max_abs_a_p_mps2 = {}", fl(metrics.max_abs_a_p))?;
    writeln!(
        out,
        "terminal_mean_abs_rho_m = {}",
        fl(metrics.terminal_mean_abs_rho)
    )?;
    writeln!(
        out,
        "terminal_mean_sigma_p_rad = {}",
        fl(metrics.terminal_mean_sigma_p)
    )?;
    writeln!(out, "terminal_mean_a_p_mps2 = {}", fl(metrics.terminal_mean_a_p))?;
    writeln!(out, "saturation_duty = {}", fl(metrics.saturation_duty))?;
    writeln!(out, "guard_duty = {}", fl(metrics.guard_duty))?;
    writeln!(out, "max_care_residual = {}", fl(metrics.max_care_residual))?;
    writeln!(
        out,
        "max_closed_loop_abscissa = {}",
        fl(metrics.max_closed_loop_abscissa)
    )?;
    writeln!(out, "max_abs_s_mps = {}", fl(metrics.max_abs_s))?;
    writeln!(out, "steps = {}", metrics.steps)?;
    out.flush()
}

/// Parse a metrics file back into key-value pairs (used by tests and sweep).
pub fn read_metrics(path: &Path) -> anyhow::Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)?;
    let mut entries = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once(" = ")
            .ok_or_else(|| anyhow::anyhow!("malformed metrics line: {line}"))?;
        entries.push((key.to_string(), value.to_string()));
    }
    Ok(entries)
}
