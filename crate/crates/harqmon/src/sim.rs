//! Packet-level Monte Carlo simulator of the two-round HARQ protocol.
//!
//! This is the independent oracle for every closed form in the crate: it
//! never evaluates an analytic probability, it just plays the protocol.
//!
//! Per packet: the transmitter sends at power `p0`; the monitor observes its
//! own round-I gain `g1` and either listens or jams per the policy (it is
//! half duplex, so jamming forfeits the round-I copy). The receiver decodes
//! round I iff its SINR — degraded by the jammer through the `g2` channel —
//! reaches `gamma_bar`; otherwise exactly one retransmission occurs on
//! freshly drawn channels. The monitor wins if it decodes in round I, or in
//! round II from the retransmission alone, or (with combining enabled) from
//! the maximum-ratio sum of its stored round-I copy and the retransmission.
//!
//! Determinism: packets are partitioned into fixed chunks of
//! [`CHUNK_PACKETS`]; chunk `i` consumes its own counter-based RNG stream
//! derived from `(seed, i)`, and per-chunk tallies are folded in chunk-index
//! order. The result is bit-identical for any worker count.

use crate::model::{sample_packet, ChannelDraw, SystemParams};
use crate::policy::JammingPolicy;
use crate::rng::chunk_rng;

/// Fixed chunk size for parallel determinism.
pub const CHUNK_PACKETS: u64 = 1 << 16;

/// Everything that happened to one packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketTrace {
    pub draw: ChannelDraw,
    /// Jamming power the monitor applied in round I.
    pub jam_power: f64,
    /// Receiver passed its round-I SINR test.
    pub sr_decoded_r1: bool,
    /// Exactly one retransmission happens, iff the receiver failed round I.
    pub retransmitted: bool,
    /// Monitor decoded the round-I copy (only possible while listening).
    pub monitor_decoded_r1: bool,
    /// Overall eavesdropping success by the end of round II.
    pub monitor_decoded_final: bool,
    /// Round-II decode used the stored copy (combining, listened, failed
    /// round I, and a retransmission happened).
    pub mrc_used: bool,
}

/// Aggregate statistics over a simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimReport {
    pub packets: u64,
    /// Fraction of packets the monitor decoded.
    pub success_rate: f64,
    /// Binomial standard error `sqrt(p (1-p) / n)` of `success_rate`.
    pub success_stderr: f64,
    /// Mean jamming power actually applied per packet.
    pub avg_jam_power: f64,
    /// Fraction of packets the receiver failed to decode in round I.
    pub retransmission_rate: f64,
}

/// Plays the two-round protocol for one packet. Pure: all randomness is in
/// `draw`.
///
/// Decode tests compare SNR (or SINR) against `gamma_bar` with `>=`; the
/// boundary has measure zero but the convention is fixed for determinism.
pub fn simulate_packet(
    params: &SystemParams,
    policy: &JammingPolicy,
    combining: bool,
    draw: ChannelDraw,
) -> PacketTrace {
    let p0 = params.p0();
    let sigma2 = params.sigma2();
    let gamma_bar = params.gamma_bar();

    // Round I. The monitor decides from its own observed gain; the jamming
    // power reaches the receiver through the jammer->receiver channel g2.
    let q = policy.applied_power(draw.g1_r1);
    let jammed = q > 0.0;
    let sr_sinr_r1 = draw.g0_r1 * p0 / (draw.g2_r1 * q + sigma2);
    let sr_decoded_r1 = sr_sinr_r1 >= gamma_bar;
    let retransmitted = !sr_decoded_r1;
    let monitor_decoded_r1 = !jammed && draw.g1_r1 * p0 / sigma2 >= gamma_bar;

    // Round II: only a failed receiver triggers a retransmission, and only
    // the retransmission gives the monitor a second chance. A stored copy
    // exists only if the monitor listened (half duplex).
    let mut monitor_decoded_final = monitor_decoded_r1;
    let mut mrc_used = false;
    if !monitor_decoded_final && retransmitted {
        if combining && !jammed {
            mrc_used = true;
            monitor_decoded_final = (draw.g1_r1 + draw.g1_r2) * p0 / sigma2 >= gamma_bar;
        } else {
            monitor_decoded_final = draw.g1_r2 * p0 / sigma2 >= gamma_bar;
        }
    }

    PacketTrace {
        draw,
        jam_power: q,
        sr_decoded_r1,
        retransmitted,
        monitor_decoded_r1,
        monitor_decoded_final,
        mrc_used,
    }
}

/// Per-chunk tallies; merging is pure addition, so the fold is exact and
/// order-independent for the counts and reproducible for the float sum
/// because we always fold in chunk-index order.
#[derive(Debug, Clone, Copy, Default)]
struct ChunkStats {
    successes: u64,
    retransmissions: u64,
    jam_sum: f64,
}

fn run_chunk(
    params: &SystemParams,
    policy: &JammingPolicy,
    combining: bool,
    seed: u64,
    chunk_index: u64,
    count: u64,
) -> ChunkStats {
    let mut rng = chunk_rng(seed, chunk_index);
    let mut stats = ChunkStats::default();
    for _ in 0..count {
        let draw = sample_packet(params, &mut rng);
        let trace = simulate_packet(params, policy, combining, draw);
        stats.successes += trace.monitor_decoded_final as u64;
        stats.retransmissions += trace.retransmitted as u64;
        stats.jam_sum += trace.jam_power;
    }
    stats
}

/// Simulates `n` packets and aggregates. Deterministic given
/// `(seed, n, workers)` and, by construction, independent of `workers`.
///
/// `n` must be at least 1; `workers` is clamped to at least 1.
pub fn run_simulation(
    params: &SystemParams,
    policy: &JammingPolicy,
    combining: bool,
    n: u64,
    seed: u64,
    workers: usize,
) -> SimReport {
    assert!(n >= 1, "run_simulation requires at least one packet");
    let n_chunks = n.div_ceil(CHUNK_PACKETS) as usize;
    let chunk_count = |chunk: u64| -> u64 { CHUNK_PACKETS.min(n - chunk * CHUNK_PACKETS) };

    let mut stats = vec![ChunkStats::default(); n_chunks];
    let workers = workers.max(1).min(n_chunks);
    if workers <= 1 {
        for (i, slot) in stats.iter_mut().enumerate() {
            *slot = run_chunk(params, policy, combining, seed, i as u64, chunk_count(i as u64));
        }
    } else {
        // Contiguous chunk ranges per worker; each chunk still derives its
        // stream from its global index, so the partition does not matter.
        let per_worker = n_chunks.div_ceil(workers);
        std::thread::scope(|scope| {
            for (w, slice) in stats.chunks_mut(per_worker).enumerate() {
                let base = w * per_worker;
                scope.spawn(move || {
                    for (offset, slot) in slice.iter_mut().enumerate() {
                        let chunk = (base + offset) as u64;
                        *slot =
                            run_chunk(params, policy, combining, seed, chunk, chunk_count(chunk));
                    }
                });
            }
        });
    }

    let mut successes = 0u64;
    let mut retransmissions = 0u64;
    let mut jam_sum = 0.0f64;
    for chunk in &stats {
        successes += chunk.successes;
        retransmissions += chunk.retransmissions;
        jam_sum += chunk.jam_sum;
    }

    let nf = n as f64;
    let p = successes as f64 / nf;
    SimReport {
        packets: n,
        success_rate: p,
        success_stderr: (p * (1.0 - p) / nf).sqrt(),
        avg_jam_power: jam_sum / nf,
        retransmission_rate: retransmissions as f64 / nf,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::{passive_policy, JammingPolicy, PolicyMode};
    use proptest::prelude::*;

    fn base() -> SystemParams {
        SystemParams::default()
    }

    fn draw(g0_r1: f64, g1_r1: f64, g2_r1: f64, g0_r2: f64, g1_r2: f64) -> ChannelDraw {
        ChannelDraw {
            g0_r1,
            g1_r1,
            g2_r1,
            g0_r2,
            g1_r2,
        }
    }

    fn jam_policy(threshold: f64, jam_power: f64) -> JammingPolicy {
        JammingPolicy {
            mode: PolicyMode::ThresholdCc,
            threshold,
            jam_power,
        }
    }

    #[test]
    fn boundary_gain_decodes_round_one() {
        // g1 exactly at the decode threshold: >= comparison decodes, no
        // matter what round II holds.
        let params = base();
        let trace = simulate_packet(
            &params,
            &passive_policy(),
            false,
            draw(1e-9, params.g_bar(), 0.1, 1e-9, 0.0),
        );
        assert!(trace.monitor_decoded_r1);
        assert!(trace.monitor_decoded_final);
        assert!(!trace.mrc_used);
    }

    #[test]
    fn jam_with_receiver_success_means_no_second_chance() {
        // Jamming forfeits round I, and a decoding receiver never
        // retransmits: the monitor ends with nothing.
        let params = base();
        let trace = simulate_packet(
            &params,
            &jam_policy(0.3, 5.0),
            true,
            draw(100.0, 0.1, 0.01, 5.0, 5.0),
        );
        assert_eq!(trace.jam_power, 5.0);
        assert!(trace.sr_decoded_r1);
        assert!(!trace.retransmitted);
        assert!(!trace.monitor_decoded_r1);
        assert!(!trace.monitor_decoded_final);
        assert!(!trace.mrc_used);
    }

    #[test]
    fn combining_adds_stored_copy() {
        // g1 copies 0.2 and 0.15 against g_bar = 0.3: each alone fails, the
        // sum 0.35 decodes — but only if the receiver actually retransmits.
        let params = base();
        let retransmit = draw(1e-9, 0.2, 0.1, 1.0, 0.15);
        let no_retransmit = draw(100.0, 0.2, 0.1, 1.0, 0.15);

        let t = simulate_packet(&params, &passive_policy(), true, retransmit);
        assert!(t.retransmitted && t.mrc_used && t.monitor_decoded_final);

        let t = simulate_packet(&params, &passive_policy(), true, no_retransmit);
        assert!(!t.retransmitted && !t.mrc_used && !t.monitor_decoded_final);

        // Without combining the same retransmission is useless: 0.15 < 0.3.
        let t = simulate_packet(&params, &passive_policy(), false, retransmit);
        assert!(t.retransmitted && !t.mrc_used && !t.monitor_decoded_final);
    }

    #[test]
    fn jamming_discards_the_stored_copy() {
        // Same gains as the combining case, but the monitor jams: round II
        // must stand alone and 0.15 < 0.3 fails.
        let params = base();
        let trace = simulate_packet(
            &params,
            &jam_policy(0.3, 128.0),
            true,
            draw(1e-9, 0.2, 0.1, 1.0, 0.15),
        );
        assert!(trace.retransmitted);
        assert!(!trace.mrc_used);
        assert!(!trace.monitor_decoded_final);
    }

    proptest! {
        #[test]
        fn trace_invariants_hold(
            g0_r1 in 0.0f64..5.0,
            g1_r1 in 0.0f64..5.0,
            g2_r1 in 0.0f64..5.0,
            g0_r2 in 0.0f64..5.0,
            g1_r2 in 0.0f64..5.0,
            threshold in 0.0f64..1.0,
            jam_power in 0.0f64..200.0,
            combining: bool,
        ) {
            let params = base();
            let policy = jam_policy(threshold, jam_power);
            let t = simulate_packet(
                &params,
                &policy,
                combining,
                draw(g0_r1, g1_r1, g2_r1, g0_r2, g1_r2),
            );
            // Half duplex: jamming forfeits the round-I copy.
            prop_assert!(!(t.jam_power > 0.0 && t.monitor_decoded_r1));
            prop_assert_eq!(t.retransmitted, !t.sr_decoded_r1);
            prop_assert!(!t.monitor_decoded_final || t.monitor_decoded_r1 || t.retransmitted);
            prop_assert!(
                !t.mrc_used
                    || (combining
                        && t.jam_power == 0.0
                        && !t.monitor_decoded_r1
                        && t.retransmitted)
            );
            prop_assert_eq!(t.jam_power, policy.applied_power(g1_r1));
        }
    }

    #[test]
    fn report_is_deterministic_and_worker_independent() {
        let params = base();
        let policy = jam_policy(0.3, 128.72169167888683);
        // 200_000 packets spans four chunks, unevenly split across workers.
        let a = run_simulation(&params, &policy, true, 200_000, 42, 1);
        let b = run_simulation(&params, &policy, true, 200_000, 42, 1);
        let c = run_simulation(&params, &policy, true, 200_000, 42, 3);
        let d = run_simulation(&params, &policy, true, 200_000, 42, 64);
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a, d);
        // A different seed must actually change the outcome.
        let e = run_simulation(&params, &policy, true, 200_000, 43, 1);
        assert_ne!(a, e);
    }

    #[test]
    fn report_fields_are_consistent() {
        let params = base();
        let n = CHUNK_PACKETS + 1; // exercise the ragged final chunk
        let report = run_simulation(&params, &passive_policy(), false, n, 7, 8);
        assert_eq!(report.packets, n);
        assert!(report.success_rate >= 0.0 && report.success_rate <= 1.0);
        assert!(report.retransmission_rate >= 0.0 && report.retransmission_rate <= 1.0);
        assert_eq!(report.avg_jam_power, 0.0);
        let p = report.success_rate;
        assert_eq!(
            report.success_stderr,
            (p * (1.0 - p) / n as f64).sqrt()
        );
    }

    #[test]
    fn tiny_runs_work() {
        let params = base();
        let report = run_simulation(&params, &passive_policy(), true, 1, 0, 16);
        assert_eq!(report.packets, 1);
        assert!(report.success_rate == 0.0 || report.success_rate == 1.0);
    }
}
