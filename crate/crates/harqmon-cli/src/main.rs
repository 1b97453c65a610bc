//! `harqmon` — compute and validate optimal jamming-power policies for a
//! monitor eavesdropping a two-round HARQ link over Rayleigh fading.
//!
//! Subcommands:
//! * `analyze`  — derived quantities and passive baselines for a setup;
//! * `solve`    — optimal policy under an average-power budget;
//! * `simulate` — packet-level Monte Carlo check of a scheme;
//! * `sweep`    — figure data (CSV + gnuplot script) over a parameter grid.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use harqmon::{
    db_to_linear, expected_success, format_sig, mu_max, p2_suc, passive_policy, phi,
    run_simulation, run_sweep, solve_p1, solve_p2, write_csv, write_plot_script, Figure,
    JammingPolicy, Scheme, SweepSpec, SystemParams,
};

#[derive(Parser)]
#[command(
    name = "harqmon",
    version,
    about = "Optimal jamming policies for eavesdropping a two-round HARQ link"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print derived quantities and passive baselines for a parameter set.
    Analyze(AnalyzeArgs),
    /// Solve for the optimal jamming policy under an average-power budget.
    Solve(SolveArgs),
    /// Estimate a scheme's performance with the packet-level simulator.
    Simulate(SimulateArgs),
    /// Produce figure data: CSV plus a gnuplot script.
    Sweep(SweepArgs),
}

/// Physical parameters, in linear units unless the `-db` variant is used.
#[derive(Args)]
struct ParamArgs {
    /// Transmit power of the suspicious link (linear; default 10).
    #[arg(long, conflicts_with = "p0_db")]
    p0: Option<f64>,
    /// Transmit power of the suspicious link, in dB.
    #[arg(long)]
    p0_db: Option<f64>,
    /// Communication rate R in bits/s/Hz.
    #[arg(long, default_value_t = 2.0)]
    rate: f64,
    /// Noise power at the receiver and at the monitor.
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    /// Rate parameter of the transmitter-to-receiver gain (mean 1/lambda0).
    #[arg(long, default_value_t = 1.0)]
    lambda0: f64,
    /// Rate parameter of the transmitter-to-monitor gain.
    #[arg(long, default_value_t = 5.0)]
    lambda1: f64,
    /// Rate parameter of the monitor-to-receiver jamming gain.
    #[arg(long, default_value_t = 5.0)]
    lambda2: f64,
}

impl ParamArgs {
    fn build(&self) -> Result<SystemParams> {
        let p0 = match (self.p0, self.p0_db) {
            (Some(v), None) => v,
            (None, Some(db)) => db_to_linear(db),
            (None, None) => 10.0,
            (Some(_), Some(_)) => unreachable!("clap rejects conflicting flags"),
        };
        Ok(SystemParams::new(
            p0,
            self.rate,
            self.sigma2,
            self.lambda0,
            self.lambda1,
            self.lambda2,
        )?)
    }
}

/// Average jamming power budget, linear or in dB.
#[derive(Args)]
struct BudgetArgs {
    /// Average jamming power budget (linear).
    #[arg(long, conflicts_with = "qave_db")]
    qave: Option<f64>,
    /// Average jamming power budget, in dB.
    #[arg(long)]
    qave_db: Option<f64>,
}

impl BudgetArgs {
    fn get(&self) -> Option<f64> {
        match (self.qave, self.qave_db) {
            (Some(v), None) => Some(v),
            (None, Some(db)) => Some(db_to_linear(db)),
            (None, None) => None,
            (Some(_), Some(_)) => unreachable!("clap rejects conflicting flags"),
        }
    }

    fn require(&self) -> Result<f64> {
        self.get()
            .ok_or_else(|| anyhow::anyhow!("an average power budget is required: pass --qave or --qave-db"))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Monitor decodes each round on its own (no combining).
    Nc,
    /// Monitor chase-combines its two copies.
    Cc,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliScheme {
    PassiveNc,
    PassiveCc,
    ProactiveNc,
    ProactiveCc,
}

impl From<CliScheme> for Scheme {
    fn from(s: CliScheme) -> Scheme {
        match s {
            CliScheme::PassiveNc => Scheme::PassiveNc,
            CliScheme::PassiveCc => Scheme::PassiveCc,
            CliScheme::ProactiveNc => Scheme::ProactiveNc,
            CliScheme::ProactiveCc => Scheme::ProactiveCc,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CliFigure {
    Thresholds,
    VsQave,
    VsRate,
}

impl From<CliFigure> for Figure {
    fn from(f: CliFigure) -> Figure {
        match f {
            CliFigure::Thresholds => Figure::Thresholds,
            CliFigure::VsQave => Figure::VsQave,
            CliFigure::VsRate => Figure::VsRate,
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Which combining mode to solve for.
    #[arg(long, value_enum)]
    mode: Mode,
    /// Relative budget tolerance of the dual bisection (cc mode).
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Also write the solution as a one-row CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Monitoring scheme to simulate.
    #[arg(long, value_enum)]
    scheme: CliScheme,
    /// Number of packets.
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    packets: u64,
    /// RNG seed; fixed seed means bit-identical output.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads (default: all cores). Does not affect the result.
    #[arg(long)]
    workers: Option<usize>,
    /// Relative budget tolerance of the dual bisection (proactive-cc).
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Which figure's data to produce.
    #[arg(long, value_enum)]
    figure: CliFigure,
    /// Packets for the Monte Carlo column; 0 disables it.
    #[arg(long, default_value_t = 0)]
    packets: u64,
    /// Base RNG seed for the Monte Carlo column.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output prefix; writes <prefix>.csv and <prefix>.gp
    /// (default: the figure name).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn kv(out: &mut impl Write, key: &str, value: f64) -> io::Result<()> {
    writeln!(out, "{key} = {}", format_sig(value))
}

fn cmd_analyze(out: &mut impl Write, args: &AnalyzeArgs) -> Result<()> {
    let params = args.params.build()?;
    let passive = passive_policy();
    kv(out, "gamma_bar", params.gamma_bar())?;
    kv(out, "g_bar", params.g_bar())?;
    kv(out, "phi_zero", phi(&params, 0.0))?;
    kv(out, "p2_suc", p2_suc(&params))?;
    kv(out, "mu_max", mu_max(&params))?;
    kv(out, "passive_nc", expected_success(&params, &passive, false)?)?;
    kv(out, "passive_cc", expected_success(&params, &passive, true)?)?;
    Ok(())
}

fn cmd_solve(out: &mut impl Write, args: &SolveArgs) -> Result<()> {
    let params = args.params.build()?;
    let q_ave = args.budget.require()?;
    let (policy, mu_star, avg_power, objective) = match args.mode {
        Mode::Nc => {
            let policy = solve_p1(&params, q_ave)?;
            let objective = expected_success(&params, &policy, false)?;
            writeln!(out, "mode = nc")?;
            (policy, None, policy.average_power(&params), objective)
        }
        Mode::Cc => {
            let sol = solve_p2(&params, q_ave, args.tol)?;
            writeln!(out, "mode = cc")?;
            (sol.policy, Some(sol.mu_star), sol.avg_power, sol.objective)
        }
    };
    kv(out, "threshold", policy.threshold)?;
    kv(out, "jam_power", policy.jam_power)?;
    if let Some(mu) = mu_star {
        kv(out, "mu_star", mu)?;
    }
    kv(out, "avg_power", avg_power)?;
    kv(out, "objective", objective)?;

    if let Some(path) = &args.out {
        let mode = match args.mode {
            Mode::Nc => "nc",
            Mode::Cc => "cc",
        };
        let text = format!(
            "mode,threshold,jam_power,mu_star,avg_power,objective\n{},{},{},{},{},{}\n",
            mode,
            format_sig(policy.threshold),
            format_sig(policy.jam_power),
            mu_star.map(format_sig).unwrap_or_default(),
            format_sig(avg_power),
            format_sig(objective),
        );
        std::fs::write(path, text)?;
    }
    Ok(())
}

fn cmd_simulate(out: &mut impl Write, args: &SimulateArgs) -> Result<()> {
    let params = args.params.build()?;
    let scheme: Scheme = args.scheme.into();
    let policy: JammingPolicy = match scheme {
        Scheme::PassiveNc | Scheme::PassiveCc => passive_policy(),
        Scheme::ProactiveNc => solve_p1(&params, args.budget.require()?)?,
        Scheme::ProactiveCc => solve_p2(&params, args.budget.require()?, args.tol)?.policy,
    };
    let analytic = expected_success(&params, &policy, scheme.combining())?;
    let workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let report = run_simulation(
        &params,
        &policy,
        scheme.combining(),
        args.packets,
        args.seed,
        workers,
    );

    writeln!(out, "scheme = {scheme}")?;
    writeln!(out, "packets = {}", report.packets)?;
    kv(out, "success_rate", report.success_rate)?;
    kv(out, "success_stderr", report.success_stderr)?;
    kv(out, "avg_jam_power", report.avg_jam_power)?;
    kv(out, "retransmission_rate", report.retransmission_rate)?;
    kv(out, "analytic", analytic)?;
    let diff = report.success_rate - analytic;
    let z = if diff == 0.0 { 0.0 } else { diff / report.success_stderr };
    kv(out, "z_score", z)?;
    Ok(())
}

fn cmd_sweep(out: &mut impl Write, args: &SweepArgs) -> Result<()> {
    let params = args.params.build()?;
    let figure: Figure = args.figure.into();
    let mut spec = SweepSpec::defaults_for(figure);
    spec.mc_packets = args.packets;
    spec.seed = args.seed;
    let rows = run_sweep(&spec, &params)?;

    let prefix = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(figure.as_str()));
    let csv_path = prefix.with_extension("csv");
    let gp_path = prefix.with_extension("gp");
    write_csv(&rows, &csv_path)?;
    write_plot_script(&rows, &gp_path)?;
    writeln!(out, "wrote {} ({} rows)", csv_path.display(), rows.len())?;
    writeln!(out, "wrote {}", gp_path.display())?;
    Ok(())
}

fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    match &cli.command {
        Command::Analyze(args) => cmd_analyze(out, args),
        Command::Solve(args) => cmd_solve(out, args),
        Command::Simulate(args) => cmd_simulate(out, args),
        Command::Sweep(args) => cmd_sweep(out, args),
    }
}

fn main() -> ExitCode {
    let stdout = io::stdout();
    match run(Cli::parse(), &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // A closed stdout (e.g. `harqmon analyze | head -1`) is not a
            // failure of ours; exit quietly like other line-oriented tools.
            if let Some(ioe) = e.root_cause().downcast_ref::<io::Error>() {
                if ioe.kind() == io::ErrorKind::BrokenPipe {
                    return ExitCode::SUCCESS;
                }
            }
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
