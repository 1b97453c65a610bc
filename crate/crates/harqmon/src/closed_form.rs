//! Closed-form success and outage probabilities.
//!
//! Everything here is a pure function of [`SystemParams`] plus scalars, and
//! every formula is independently validated against the packet simulator in
//! the integration suite. Notation used in the doc comments:
//!
//! * `gamma_bar = 2^R - 1` — SINR needed to decode,
//! * `g_bar = gamma_bar sigma2 / p0` — monitor decode threshold on `g1`,
//! * `q` — jamming power spent in round I for the packet at hand.

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::policy::JammingPolicy;

/// Probability the monitor decodes a clean (unjammed, single-copy) round:
/// `exp(-lambda1 sigma2 gamma_bar / p0)`.
pub fn p2_suc(params: &SystemParams) -> f64 {
    (-params.lambda1() * params.sigma2() * params.gamma_bar() / params.p0()).exp()
}

/// Probability the SR survives round I with no jamming, times the round-II
/// monitor decode probability: `exp(-(lambda0 + lambda1) sigma2 gamma_bar / p0)`.
pub(crate) fn clean_decode_joint(params: &SystemParams) -> f64 {
    (-(params.lambda0() + params.lambda1()) * params.sigma2() * params.gamma_bar() / params.p0())
        .exp()
}

/// Scale on which jamming power moves the outage odds:
/// `lambda2 p0 / (lambda0 gamma_bar)`. The round-I outage probability is
/// `1 - s/(s+q) * exp(-lambda0 sigma2 gamma_bar / p0)` with `s` this scale.
pub(crate) fn jam_power_scale(params: &SystemParams) -> f64 {
    params.lambda2() * params.p0() / (params.lambda0() * params.gamma_bar())
}

/// Round-I outage probability at the SR when the monitor jams with power `q`.
///
/// Averaged over `g0 ~ Exp(lambda0)` and `g2 ~ Exp(lambda2)`:
///
/// ```text
/// 1 - [lambda2 p0 / (lambda0 gamma_bar q + lambda2 p0)] exp(-lambda0 sigma2 gamma_bar / p0)
/// ```
///
/// This form is finite at `q = 0` (where it reduces to the passive outage
/// `1 - exp(-lambda0 sigma2 gamma_bar / p0)`) and tends to 1 as `q -> inf`.
pub fn outage_prob_round1(params: &SystemParams, q: f64) -> f64 {
    debug_assert!(q >= 0.0);
    let num = params.lambda2() * params.p0();
    let den = params.lambda0() * params.gamma_bar() * q + num;
    let survive =
        (-params.lambda0() * params.sigma2() * params.gamma_bar() / params.p0()).exp();
    1.0 - (num / den) * survive
}

/// Probability that jamming with power `q` in round I leads to a successful
/// round-II intercept: outage first, then a clean round-II decode.
///
/// Factorizes exactly as `p2_suc * outage_prob_round1(q)`; implemented in its
/// expanded form so the factorization stays an independent cross-check:
///
/// ```text
/// exp(-lambda1 sigma2 gamma_bar / p0)
///   - [lambda2 p0 / (lambda0 gamma_bar q + lambda2 p0)]
///     exp(-(lambda0 + lambda1) sigma2 gamma_bar / p0)
/// ```
pub fn phi(params: &SystemParams, q: f64) -> f64 {
    debug_assert!(q >= 0.0);
    let num = params.lambda2() * params.p0();
    let den = params.lambda0() * params.gamma_bar() * q + num;
    p2_suc(params) - (num / den) * clean_decode_joint(params)
}

/// The reusable pieces of the piecewise success functions, bundled with the
/// parameter set they were derived from.
#[derive(Debug, Clone, Copy)]
pub struct SuccessPieces<'a> {
    params: &'a SystemParams,
    /// Passive round-I outage probability, `outage_prob_round1(0)`.
    pub p_out_zero: f64,
    /// Clean-round monitor decode probability.
    pub p2_suc: f64,
}

impl<'a> SuccessPieces<'a> {
    pub fn new(params: &'a SystemParams) -> Self {
        SuccessPieces {
            params,
            p_out_zero: outage_prob_round1(params, 0.0),
            p2_suc: p2_suc(params),
        }
    }

    /// Jam-then-intercept success probability at jamming power `q`.
    pub fn phi_at(&self, q: f64) -> f64 {
        phi(self.params, q)
    }
}

/// Eavesdropping success probability for one packet without HARQ combining,
/// given the observed round-I eavesdropping gain `g1` and the jamming power
/// `q` the policy applies:
///
/// * `q > 0` — the monitor jams (and cannot listen): success requires outage
///   plus a round-II decode, probability `phi(q)`;
/// * `q = 0`, `g1 >= g_bar` — round I decodes immediately: 1;
/// * `q = 0`, `g1 < g_bar` — round I fails; round II is a fresh attempt:
///   `phi(0)`.
pub fn p_eav_no_combining(params: &SystemParams, g1: f64, q: f64) -> f64 {
    debug_assert!(g1 >= 0.0 && q >= 0.0);
    if q > 0.0 {
        phi(params, q)
    } else if g1 >= params.g_bar() {
        1.0
    } else {
        phi(params, 0.0)
    }
}

/// Eavesdropping success probability with HARQ chase combining at the
/// monitor. Identical to [`p_eav_no_combining`] except in the listen-and-fail
/// branch, where the stored round-I copy is MRC-combined with round II:
/// conditional on a retransmission, the decode succeeds iff
/// `g1 + g1_round2 >= g_bar`, which lifts `phi(0)` by `exp(g1 lambda1)`.
///
/// Jamming forfeits the stored copy (`q > 0` keeps the plain `phi(q)`).
pub fn p_eav_combining(params: &SystemParams, g1: f64, q: f64) -> f64 {
    debug_assert!(g1 >= 0.0 && q >= 0.0);
    if q > 0.0 {
        phi(params, q)
    } else if g1 >= params.g_bar() {
        1.0
    } else {
        (g1 * params.lambda1()).exp() * phi(params, 0.0)
    }
}

fn validate_threshold_policy(policy: &JammingPolicy) -> Result<()> {
    if policy.threshold.is_nan() || policy.threshold < 0.0 {
        return Err(Error::invalid(
            "threshold",
            format!("must be >= 0, got {}", policy.threshold),
        ));
    }
    if policy.jam_power.is_nan() || policy.jam_power < 0.0 {
        return Err(Error::invalid(
            "jam_power",
            format!("must be >= 0, got {}", policy.jam_power),
        ));
    }
    Ok(())
}

/// Expected eavesdropping success of a threshold policy over
/// `g1 ~ Exp(lambda1)`, evaluated in closed form.
///
/// With `tau` the policy threshold, `qh` its constant power and
/// `m(a,b) = exp(-lambda1 a) - exp(-lambda1 b)` the exponential mass of
/// `[a,b)`, the density splits at `x1 = min(tau, g_bar)` and
/// `x2 = max(tau, g_bar)` into three regions of constant behaviour:
///
/// * `[0, x1)` — jammed (when `qh > 0`): `phi(qh) m(0, x1)`; with `qh = 0`
///   the region is effectively passive and contributes the listen-and-fail
///   value instead;
/// * `[x1, x2)` — when `tau <= g_bar` this is listen-and-fail:
///   `phi(0) m(x1, x2)` without combining, and with combining
///   `integral of exp(g lambda1) phi(0) lambda1 exp(-g lambda1) dg`
///   `= lambda1 phi(0) (x2 - x1)` (the exponentials cancel); when
///   `tau > g_bar` the region is jammed-above-decode-threshold:
///   `phi(qh) m(x1, x2)` for `qh > 0`, or an immediate decode (mass itself)
///   for `qh = 0`;
/// * `[x2, inf)` — listen and decode: `exp(-lambda1 x2)`.
///
/// Rejects negative or NaN `threshold`/`jam_power`.
pub fn expected_success(
    params: &SystemParams,
    policy: &JammingPolicy,
    combining: bool,
) -> Result<f64> {
    validate_threshold_policy(policy)?;
    let lambda1 = params.lambda1();
    let g_bar = params.g_bar();
    let tau = policy.threshold;
    let qh = policy.jam_power;
    let mass = |a: f64, b: f64| (-lambda1 * a).exp() - (-lambda1 * b).exp();
    // Listen-and-fail contribution on [a, b), b <= g_bar.
    let listen_fail = |a: f64, b: f64| {
        if combining {
            lambda1 * phi(params, 0.0) * (b - a)
        } else {
            phi(params, 0.0) * mass(a, b)
        }
    };

    let x1 = tau.min(g_bar);
    let x2 = tau.max(g_bar);
    let mut total = 0.0;
    // [0, x1): below both the policy threshold and the decode threshold.
    total += if qh > 0.0 && tau > 0.0 {
        phi(params, qh) * mass(0.0, x1)
    } else {
        listen_fail(0.0, x1)
    };
    // [x1, x2): between the two thresholds.
    total += if tau <= g_bar {
        listen_fail(x1, x2)
    } else if qh > 0.0 {
        phi(params, qh) * mass(x1, x2)
    } else {
        mass(x1, x2)
    };
    // [x2, inf): listen and decode immediately.
    total += (-lambda1 * x2).exp();
    Ok(total)
}

/// Expected success of an arbitrary measurable policy `g1 -> q`, by adaptive
/// Simpson quadrature over the `g1` density.
///
/// This is the fallback for policies that are not threshold-form, and the
/// independent numerical route the tests compare [`expected_success`]
/// against. `breakpoints` lists the policy's discontinuities so each smooth
/// piece is integrated separately (the decode threshold `g_bar` is always
/// added). Relative tolerance is 1e-9; the exponential tail is truncated
/// where the `g1` CDF exceeds `1 - 1e-12`, which biases the result by less
/// than 1e-12.
pub fn expected_success_quadrature(
    params: &SystemParams,
    jam_power_of: impl Fn(f64) -> f64,
    combining: bool,
    breakpoints: &[f64],
) -> f64 {
    let lambda1 = params.lambda1();
    let density_success = |g: f64| {
        let q = jam_power_of(g);
        let p = if combining {
            p_eav_combining(params, g, q)
        } else {
            p_eav_no_combining(params, g, q)
        };
        p * lambda1 * (-lambda1 * g).exp()
    };
    let tail_start = -(1e-12f64).ln() / lambda1;
    let mut cuts = vec![0.0, params.g_bar(), tail_start];
    cuts.extend(breakpoints.iter().copied());
    cuts.retain(|x| x.is_finite() && *x >= 0.0 && *x <= tail_start);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();

    let mut total = 0.0;
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b - a > 0.0 {
            total += adaptive_simpson(&density_success, a, b, 1e-9 * 0.5f64.max(b - a) / 30.0);
        }
    }
    total
}

/// Recursive adaptive Simpson rule with Richardson extrapolation.
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 48)
}
