//! Parameter sweeps behind the three standard figures, with CSV output and
//! a generated gnuplot script.
//!
//! Three sweep families:
//! * `thresholds` — the jam threshold of each proactive policy against the
//!   power budget (dB). The no-combining threshold is flat at `g_bar`; the
//!   combining-aware one rises with the budget.
//! * `vs_qave` — successful-eavesdropping probability against the power
//!   budget (dB) for all four schemes.
//! * `vs_rate` — the same probabilities against the communication rate at a
//!   fixed budget of [`VS_RATE_QAVE_DB`] dB.
//!
//! Budgets are carried in dB on the x axis and converted to linear watts
//! internally. Every row can optionally carry a Monte Carlo estimate of the
//! same quantity as an independent check.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::closed_form::expected_success;
use crate::error::{Error, Result};
use crate::model::{db_to_linear, SystemParams};
use crate::policy::{passive_policy, solve_p1, solve_p2};
use crate::sim::run_simulation;

/// Fixed power budget for the rate sweep, in dB.
pub const VS_RATE_QAVE_DB: f64 = 20.0;

/// Relative budget tolerance used by sweeps when solving the
/// combining-aware program.
const SWEEP_SOLVER_TOL: f64 = 1e-8;

/// Which figure a sweep (or row) belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Jam thresholds vs power budget (dB).
    Thresholds,
    /// Success probability vs power budget (dB).
    VsQave,
    /// Success probability vs communication rate (bits/s/Hz).
    VsRate,
}

impl Figure {
    pub fn as_str(&self) -> &'static str {
        match self {
            Figure::Thresholds => "thresholds",
            Figure::VsQave => "vs_qave",
            Figure::VsRate => "vs_rate",
        }
    }

    pub fn parse(s: &str) -> Option<Figure> {
        match s {
            "thresholds" => Some(Figure::Thresholds),
            "vs_qave" => Some(Figure::VsQave),
            "vs_rate" => Some(Figure::VsRate),
            _ => None,
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One of the four monitoring schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    PassiveNc,
    PassiveCc,
    ProactiveNc,
    ProactiveCc,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::PassiveNc,
        Scheme::PassiveCc,
        Scheme::ProactiveNc,
        Scheme::ProactiveCc,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::PassiveNc => "passive_nc",
            Scheme::PassiveCc => "passive_cc",
            Scheme::ProactiveNc => "proactive_nc",
            Scheme::ProactiveCc => "proactive_cc",
        }
    }

    pub fn parse(s: &str) -> Option<Scheme> {
        match s {
            "passive_nc" => Some(Scheme::PassiveNc),
            "passive_cc" => Some(Scheme::PassiveCc),
            "proactive_nc" => Some(Scheme::ProactiveNc),
            "proactive_cc" => Some(Scheme::ProactiveCc),
            _ => None,
        }
    }

    /// Whether the monitor chase-combines its two copies.
    pub fn combining(&self) -> bool {
        matches!(self, Scheme::PassiveCc | Scheme::ProactiveCc)
    }

    /// Whether the monitor jams at all.
    pub fn proactive(&self) -> bool {
        matches!(self, Scheme::ProactiveNc | Scheme::ProactiveCc)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A sweep to run: which figure, at which x values, for which schemes.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub figure: Figure,
    /// Power budget in dB for `thresholds`/`vs_qave`; rate in bits/s/Hz for
    /// `vs_rate`. Must be strictly increasing and nonempty.
    pub x_values: Vec<f64>,
    pub schemes: Vec<Scheme>,
    /// Packets for the Monte Carlo column; 0 disables it.
    pub mc_packets: u64,
    pub seed: u64,
}

impl SweepSpec {
    /// The default grid for each figure: budgets 0..30 dB in 2 dB steps,
    /// rates 0.25..4 in 0.25 steps.
    pub fn defaults_for(figure: Figure) -> SweepSpec {
        let x_values: Vec<f64> = match figure {
            Figure::Thresholds | Figure::VsQave => (0..=15).map(|i| 2.0 * i as f64).collect(),
            Figure::VsRate => (1..=16).map(|i| 0.25 * i as f64).collect(),
        };
        let schemes = match figure {
            // Passive schemes have no jam threshold to plot.
            Figure::Thresholds => vec![Scheme::ProactiveNc, Scheme::ProactiveCc],
            _ => Scheme::ALL.to_vec(),
        };
        SweepSpec {
            figure,
            x_values,
            schemes,
            mc_packets: 0,
            seed: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.x_values.is_empty() {
            return Err(Error::invalid("x_values", "must be nonempty"));
        }
        if !self.x_values.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid(
                "x_values",
                "must be strictly increasing",
            ));
        }
        if self.schemes.is_empty() {
            return Err(Error::invalid("schemes", "must be nonempty"));
        }
        Ok(())
    }
}

/// One data point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentRow {
    pub figure: Figure,
    pub x: f64,
    pub scheme: Scheme,
    /// Closed-form value: success probability, or the jam threshold for the
    /// `thresholds` figure.
    pub analytic: f64,
    pub mc: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub threshold: f64,
    pub jam_power: f64,
    /// Dual multiplier; present only for the combining-aware solver.
    pub mu_star: Option<f64>,
}

impl ExperimentRow {
    /// Whether the Monte Carlo estimate (if any) sits within four standard
    /// errors of the closed form.
    pub fn mc_consistent(&self) -> bool {
        match (self.mc, self.mc_stderr) {
            (Some(mc), Some(se)) => (self.analytic - mc).abs() <= 4.0 * se,
            _ => true,
        }
    }
}

fn solve_point(
    params: &SystemParams,
    scheme: Scheme,
    q_ave: f64,
) -> Result<(crate::policy::JammingPolicy, Option<f64>)> {
    match scheme {
        Scheme::PassiveNc | Scheme::PassiveCc => Ok((passive_policy(), None)),
        Scheme::ProactiveNc => Ok((solve_p1(params, q_ave)?, None)),
        Scheme::ProactiveCc => {
            let sol = solve_p2(params, q_ave, SWEEP_SOLVER_TOL)?;
            Ok((sol.policy, Some(sol.mu_star)))
        }
    }
}

/// Runs a sweep: for each x (major) and scheme (minor, in spec order),
/// solves the policy and evaluates the analytic value, plus a Monte Carlo
/// estimate when `mc_packets > 0` (never for the `thresholds` figure, whose
/// y value is not a simulation observable).
///
/// Each Monte Carlo row gets its own seed, `spec.seed + row_index`, so rows
/// use independent streams but the whole sweep stays reproducible.
pub fn run_sweep(spec: &SweepSpec, params: &SystemParams) -> Result<Vec<ExperimentRow>> {
    spec.validate()?;
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut rows = Vec::with_capacity(spec.x_values.len() * spec.schemes.len());
    for &x in &spec.x_values {
        for &scheme in &spec.schemes {
            let wrap = |e: Error| Error::SweepPoint {
                x,
                scheme: scheme.as_str(),
                source: Box::new(e),
            };
            let (point_params, q_ave) = match spec.figure {
                Figure::Thresholds | Figure::VsQave => (*params, db_to_linear(x)),
                Figure::VsRate => (
                    params.with_rate(x).map_err(wrap)?,
                    db_to_linear(VS_RATE_QAVE_DB),
                ),
            };
            let (policy, mu_star) = solve_point(&point_params, scheme, q_ave).map_err(wrap)?;
            let analytic = match spec.figure {
                Figure::Thresholds => policy.threshold,
                _ => expected_success(&point_params, &policy, scheme.combining())
                    .map_err(wrap)?,
            };
            let (mc, mc_stderr) = if spec.mc_packets > 0 && spec.figure != Figure::Thresholds {
                let seed = spec.seed.wrapping_add(rows.len() as u64);
                let report = run_simulation(
                    &point_params,
                    &policy,
                    scheme.combining(),
                    spec.mc_packets,
                    seed,
                    workers,
                );
                (Some(report.success_rate), Some(report.success_stderr))
            } else {
                (None, None)
            };
            rows.push(ExperimentRow {
                figure: spec.figure,
                x,
                scheme,
                analytic,
                mc,
                mc_stderr,
                threshold: policy.threshold,
                jam_power: policy.jam_power,
                mu_star,
            });
        }
    }
    Ok(rows)
}

/// Formats with 10 significant digits, trailing zeros trimmed (plain
/// decimal notation, no exponent).
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let decimals = (9 - x.abs().log10().floor() as i32).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

const CSV_HEADER: &str = "figure,x,scheme,analytic,mc,mc_stderr,threshold,jam_power,mu_star";

fn opt_sig(v: Option<f64>) -> String {
    v.map(format_sig).unwrap_or_default()
}

/// Renders rows to CSV text: fixed header, one line per row, empty fields
/// where a column does not apply, LF newlines.
pub fn csv_string(rows: &[ExperimentRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.figure,
            format_sig(row.x),
            row.scheme,
            format_sig(row.analytic),
            opt_sig(row.mc),
            opt_sig(row.mc_stderr),
            format_sig(row.threshold),
            format_sig(row.jam_power),
            opt_sig(row.mu_star),
        ));
    }
    out
}

/// Writes [`csv_string`] to a file.
pub fn write_csv(rows: &[ExperimentRow], path: &Path) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(csv_string(rows).as_bytes())
        .map_err(|e| Error::io(path, e))
}

fn parse_field(path: &Path, line_no: usize, name: &str, raw: &str) -> Result<f64> {
    raw.parse::<f64>().map_err(|_| Error::CsvParse {
        path: path.to_path_buf(),
        line: line_no,
        reason: format!("bad {name} value {raw:?}"),
    })
}

fn parse_opt_field(path: &Path, line_no: usize, name: &str, raw: &str) -> Result<Option<f64>> {
    if raw.is_empty() {
        Ok(None)
    } else {
        parse_field(path, line_no, name, raw).map(Some)
    }
}

/// Parses a CSV produced by [`write_csv`].
pub fn parse_csv(path: &Path) -> Result<Vec<ExperimentRow>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |line: usize, reason: String| Error::CsvParse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        other => {
            return Err(bad(
                1,
                format!("expected header {CSV_HEADER:?}, got {:?}", other.map(|(_, h)| h)),
            ))
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(bad(line_no, format!("expected 9 fields, got {}", fields.len())));
        }
        let figure = Figure::parse(fields[0])
            .ok_or_else(|| bad(line_no, format!("unknown figure {:?}", fields[0])))?;
        let scheme = Scheme::parse(fields[2])
            .ok_or_else(|| bad(line_no, format!("unknown scheme {:?}", fields[2])))?;
        rows.push(ExperimentRow {
            figure,
            x: parse_field(path, line_no, "x", fields[1])?,
            scheme,
            analytic: parse_field(path, line_no, "analytic", fields[3])?,
            mc: parse_opt_field(path, line_no, "mc", fields[4])?,
            mc_stderr: parse_opt_field(path, line_no, "mc_stderr", fields[5])?,
            threshold: parse_field(path, line_no, "threshold", fields[6])?,
            jam_power: parse_field(path, line_no, "jam_power", fields[7])?,
            mu_star: parse_opt_field(path, line_no, "mu_star", fields[8])?,
        });
    }
    Ok(rows)
}

fn scheme_title(scheme: Scheme) -> &'static str {
    match scheme {
        Scheme::PassiveNc => "passive, no combining",
        Scheme::PassiveCc => "passive, with combining",
        Scheme::ProactiveNc => "proactive, no combining",
        Scheme::ProactiveCc => "proactive, with combining",
    }
}

/// Renders the gnuplot script for a set of rows (all from one figure).
///
/// `csv_name` is the data file the script will read, resolved relative to
/// the directory gnuplot runs in.
pub fn plot_script_string(rows: &[ExperimentRow], csv_name: &str) -> Result<String> {
    let first = rows
        .first()
        .ok_or_else(|| Error::invalid("rows", "plot script needs at least one row"))?;
    let figure = first.figure;

    // Schemes in first-appearance order, deduplicated.
    let mut schemes: Vec<Scheme> = Vec::new();
    for row in rows {
        if !schemes.contains(&row.scheme) {
            schemes.push(row.scheme);
        }
    }
    let has_mc = rows.iter().any(|r| r.mc.is_some());

    let (xlabel, ylabel) = match figure {
        Figure::Thresholds => ("average jamming power budget (dB)", "jam threshold on g1"),
        Figure::VsQave => (
            "average jamming power budget (dB)",
            "successful eavesdropping probability",
        ),
        Figure::VsRate => (
            "communication rate (bits/s/Hz)",
            "successful eavesdropping probability",
        ),
    };

    let mut s = String::new();
    s.push_str("# generated jamming-policy figure; render with: gnuplot -persist <this file>\n");
    s.push_str(&format!("csv = \"{csv_name}\"\n"));
    s.push_str("set datafile separator ','\n");
    s.push_str(&format!("set xlabel \"{xlabel}\"\n"));
    s.push_str(&format!("set ylabel \"{ylabel}\"\n"));
    s.push_str("set key bottom right\n");
    s.push_str("set grid\n");

    // Select rows of one scheme with a strcol filter; everything else
    // (including the header line) collapses to an undefined point.
    let pick = |scheme: Scheme, col: u32| {
        format!("(strcol(3) eq '{}' ? column({col}) : 1/0)", scheme.as_str())
    };

    let mut clauses: Vec<String> = Vec::new();
    match figure {
        Figure::Thresholds => {
            for &scheme in &schemes {
                let title = if scheme.combining() {
                    "with combining"
                } else {
                    "without combining"
                };
                clauses.push(format!(
                    "csv using 2:{} title \"{title}\" with linespoints",
                    pick(scheme, 7)
                ));
            }
        }
        Figure::VsQave | Figure::VsRate => {
            for &scheme in &schemes {
                clauses.push(format!(
                    "csv using 2:{} title \"{}\" with linespoints",
                    pick(scheme, 4),
                    scheme_title(scheme)
                ));
                if has_mc {
                    clauses.push(format!(
                        "csv using 2:{} title \"{} (MC)\" with points pointtype 6",
                        pick(scheme, 5),
                        scheme_title(scheme)
                    ));
                }
            }
        }
    }
    s.push_str("plot \\\n    ");
    s.push_str(&clauses.join(", \\\n    "));
    s.push('\n');
    Ok(s)
}

/// Writes the gnuplot script next to its CSV: the data file name is this
/// script's own file name with the extension replaced by `.csv`.
pub fn write_plot_script(rows: &[ExperimentRow], path: &Path) -> Result<()> {
    let csv_name = path
        .with_extension("csv")
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "data.csv".to_string());
    let script = plot_script_string(rows, &csv_name)?;
    fs::write(path, script).map_err(|e| Error::io(path, e))
}
