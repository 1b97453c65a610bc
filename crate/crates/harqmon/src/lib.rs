//! Optimal jamming-power policies for a legitimate monitor eavesdropping a
//! two-round HARQ link over Rayleigh fading.
//!
//! A suspicious transmitter sends fixed-rate packets to its receiver with at
//! most one retransmission (HARQ with chase combining at the receiver). A
//! half-duplex legitimate monitor overhears the link and may instead spend
//! round-I jamming power to *force* a retransmission — trading its round-I
//! copy for a second, cleaner chance — under an average-power budget.
//!
//! The crate provides:
//!
//! * closed-form success and outage probabilities for any threshold jamming
//!   policy, with and without chase combining at the monitor
//!   ([`closed_form`]);
//! * exact solvers for the optimal policy in both combining modes: a
//!   closed-form budget split when the monitor does not combine, and a dual
//!   bisection when it does ([`policy`]);
//! * a deterministic, parallel packet-level Monte Carlo simulator that
//!   validates every closed form by playing the protocol ([`sim`]);
//! * parameter sweeps with CSV output and generated gnuplot scripts
//!   ([`sweep`]).
//!
//! ```
//! use harqmon::{expected_success, passive_policy, solve_p1, SystemParams};
//!
//! let params = SystemParams::default();
//! let passive = expected_success(&params, &passive_policy(), false).unwrap();
//! let policy = solve_p1(&params, 100.0).unwrap();
//! let proactive = expected_success(&params, &policy, false).unwrap();
//! assert!(proactive > passive);
//! ```

pub mod closed_form;
pub mod error;
pub mod model;
pub mod policy;
pub mod rng;
pub mod sim;
pub mod sweep;

pub use closed_form::{
    expected_success, expected_success_quadrature, outage_prob_round1, p2_suc, phi,
    SuccessPieces,
};
pub use error::{Error, Result};
pub use model::{db_to_linear, linear_to_db, sample_packet, ChannelDraw, SystemParams};
pub use policy::{
    expected_jam_power_cc, jam_threshold_cc, mu_max, passive_policy, solve_p1, solve_p2,
    subproblem_qbar, subproblem_value, DualSolution, JammingPolicy, PolicyMode,
};
pub use rng::chunk_rng;
pub use sim::{run_simulation, simulate_packet, PacketTrace, SimReport, CHUNK_PACKETS};
pub use sweep::{
    csv_string, format_sig, parse_csv, plot_script_string, run_sweep, write_csv,
    write_plot_script, ExperimentRow, Figure, Scheme, SweepSpec, VS_RATE_QAVE_DB,
};
