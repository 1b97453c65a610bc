//! Browser bindings for the jamming-policy library.
//!
//! Three operations back the demo page in `www/`:
//!
//! * [`analyze_and_solve`] — derived quantities, passive baselines, and the
//!   optimal policy for both combining modes at one budget;
//! * [`budget_curves`] — success probabilities and jamming thresholds over
//!   the 0–30 dB budget grid, ready for plotting;
//! * [`simulate_check`] — a single-threaded Monte Carlo run that scores the
//!   closed forms in the browser.
//!
//! Every function returns a JSON string (`Err` carries a plain message, which
//! wasm-bindgen raises as a JS exception). JSON keeps the boundary to one
//! string-valued call per operation, so the page needs no framework or glue
//! beyond the generated module. Build with `wasm-pack build --target web`.

use harqmon::{
    db_to_linear, expected_success, mu_max, p2_suc, passive_policy, phi, run_simulation,
    run_sweep, solve_p1, solve_p2, Figure, JammingPolicy, Scheme, SweepSpec, SystemParams,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Solver tolerance used throughout the demo.
const DEMO_TOL: f64 = 1e-8;

fn params_from(
    p0_db: f64,
    rate: f64,
    sigma2: f64,
    lambda0: f64,
    lambda1: f64,
    lambda2: f64,
) -> Result<SystemParams, String> {
    SystemParams::new(db_to_linear(p0_db), rate, sigma2, lambda0, lambda1, lambda2)
        .map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct PolicyOut {
    threshold: f64,
    jam_power: f64,
    mu_star: Option<f64>,
    avg_power: f64,
    objective: f64,
}

#[derive(Serialize)]
struct AnalyzeOut {
    gamma_bar: f64,
    g_bar: f64,
    phi_zero: f64,
    p2_suc: f64,
    mu_max: f64,
    passive_nc: f64,
    passive_cc: f64,
    no_combining: PolicyOut,
    combining: PolicyOut,
}

/// Derived quantities, passive baselines, and both optimal policies at one
/// average-power budget (all powers in dB).
#[wasm_bindgen]
pub fn analyze_and_solve(
    p0_db: f64,
    rate: f64,
    sigma2: f64,
    lambda0: f64,
    lambda1: f64,
    lambda2: f64,
    qave_db: f64,
) -> Result<String, String> {
    let params = params_from(p0_db, rate, sigma2, lambda0, lambda1, lambda2)?;
    let q_ave = db_to_linear(qave_db);
    let passive = passive_policy();

    let nc = solve_p1(&params, q_ave).map_err(|e| e.to_string())?;
    let nc_out = PolicyOut {
        threshold: nc.threshold,
        jam_power: nc.jam_power,
        mu_star: None,
        avg_power: nc.average_power(&params),
        objective: expected_success(&params, &nc, false).map_err(|e| e.to_string())?,
    };
    let cc = solve_p2(&params, q_ave, DEMO_TOL).map_err(|e| e.to_string())?;
    let cc_out = PolicyOut {
        threshold: cc.policy.threshold,
        jam_power: cc.policy.jam_power,
        mu_star: Some(cc.mu_star),
        avg_power: cc.avg_power,
        objective: cc.objective,
    };

    to_json(&AnalyzeOut {
        gamma_bar: params.gamma_bar(),
        g_bar: params.g_bar(),
        phi_zero: phi(&params, 0.0),
        p2_suc: p2_suc(&params),
        mu_max: mu_max(&params),
        passive_nc: expected_success(&params, &passive, false).map_err(|e| e.to_string())?,
        passive_cc: expected_success(&params, &passive, true).map_err(|e| e.to_string())?,
        no_combining: nc_out,
        combining: cc_out,
    })
}

#[derive(Default, Serialize)]
struct CurvesOut {
    budget_db: Vec<f64>,
    passive_nc: Vec<f64>,
    passive_cc: Vec<f64>,
    proactive_nc: Vec<f64>,
    proactive_cc: Vec<f64>,
    threshold_nc: Vec<f64>,
    threshold_cc: Vec<f64>,
    g_bar: f64,
}

/// Success probabilities of all four schemes and the proactive jamming
/// thresholds, over the default 0–30 dB budget grid.
#[wasm_bindgen]
pub fn budget_curves(
    p0_db: f64,
    rate: f64,
    sigma2: f64,
    lambda0: f64,
    lambda1: f64,
    lambda2: f64,
) -> Result<String, String> {
    let params = params_from(p0_db, rate, sigma2, lambda0, lambda1, lambda2)?;
    let mut out = CurvesOut {
        g_bar: params.g_bar(),
        ..CurvesOut::default()
    };

    let success = run_sweep(&SweepSpec::defaults_for(Figure::VsQave), &params)
        .map_err(|e| e.to_string())?;
    for row in &success {
        match row.scheme {
            Scheme::PassiveNc => {
                out.budget_db.push(row.x);
                out.passive_nc.push(row.analytic);
            }
            Scheme::PassiveCc => out.passive_cc.push(row.analytic),
            Scheme::ProactiveNc => out.proactive_nc.push(row.analytic),
            Scheme::ProactiveCc => out.proactive_cc.push(row.analytic),
        }
    }

    let thresholds = run_sweep(&SweepSpec::defaults_for(Figure::Thresholds), &params)
        .map_err(|e| e.to_string())?;
    for row in &thresholds {
        match row.scheme {
            Scheme::ProactiveNc => out.threshold_nc.push(row.analytic),
            Scheme::ProactiveCc => out.threshold_cc.push(row.analytic),
            _ => {}
        }
    }

    to_json(&out)
}

#[derive(Serialize)]
struct SimOut {
    scheme: &'static str,
    packets: u64,
    success_rate: f64,
    success_stderr: f64,
    avg_jam_power: f64,
    retransmission_rate: f64,
    analytic: f64,
    z_score: f64,
}

/// Packet-level Monte Carlo check of one scheme, single-threaded so it runs
/// on the browser's main thread. `scheme` is one of `passive_nc`,
/// `passive_cc`, `proactive_nc`, `proactive_cc`.
// A flat argument list keeps the JS call site free of helper objects.
#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn simulate_check(
    p0_db: f64,
    rate: f64,
    sigma2: f64,
    lambda0: f64,
    lambda1: f64,
    lambda2: f64,
    scheme: &str,
    qave_db: f64,
    packets: u32,
    seed: u32,
) -> Result<String, String> {
    let params = params_from(p0_db, rate, sigma2, lambda0, lambda1, lambda2)?;
    let scheme = Scheme::parse(scheme)
        .ok_or_else(|| format!("unknown scheme `{scheme}`"))?;
    if packets == 0 {
        return Err("packets must be at least 1".to_string());
    }

    let policy: JammingPolicy = match scheme {
        Scheme::PassiveNc | Scheme::PassiveCc => passive_policy(),
        Scheme::ProactiveNc => {
            solve_p1(&params, db_to_linear(qave_db)).map_err(|e| e.to_string())?
        }
        Scheme::ProactiveCc => {
            solve_p2(&params, db_to_linear(qave_db), DEMO_TOL)
                .map_err(|e| e.to_string())?
                .policy
        }
    };
    let analytic =
        expected_success(&params, &policy, scheme.combining()).map_err(|e| e.to_string())?;
    let report = run_simulation(
        &params,
        &policy,
        scheme.combining(),
        u64::from(packets),
        u64::from(seed),
        1,
    );
    let diff = report.success_rate - analytic;
    let z_score = if diff == 0.0 {
        0.0
    } else {
        diff / report.success_stderr
    };

    to_json(&SimOut {
        scheme: scheme.as_str(),
        packets: report.packets,
        success_rate: report.success_rate,
        success_stderr: report.success_stderr,
        avg_jam_power: report.avg_jam_power,
        retransmission_rate: report.retransmission_rate,
        analytic,
        z_score,
    })
}
