//! System parameters and fading-channel sampling.
//!
//! The suspicious transmitter (ST) sends a fixed-rate, fixed-power packet to
//! the suspicious receiver (SR) with at most one retransmission. A
//! half-duplex monitor overhears the link and may spend jamming power in
//! round I to force that retransmission. Three Rayleigh-faded links matter:
//!
//! * `g0` — ST to SR (rate parameter `lambda0`),
//! * `g1` — ST to monitor (`lambda1`),
//! * `g2` — monitor to SR, carrying the jamming signal (`lambda2`).
//!
//! Power gains of Rayleigh channels are exponential variates; gains are
//! constant within a round and redrawn independently between rounds. All
//! arithmetic is in linear units; dB conversion happens at the CLI boundary.

use crate::error::{Error, Result};
use crate::rng::sample_exp;
use rand_chacha::rand_core::RngCore;

/// Converts a dB quantity to linear scale: `10^(x/10)`.
pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

/// Converts a linear quantity to dB: `10 log10(x)`.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Immutable physical and protocol constants of one scenario.
///
/// Constructed through [`SystemParams::new`], which enforces positivity of
/// every field, so downstream formulas never re-validate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    p0: f64,
    rate: f64,
    sigma2: f64,
    lambda0: f64,
    lambda1: f64,
    lambda2: f64,
}

impl SystemParams {
    /// Builds a parameter set, rejecting non-positive or non-finite values.
    pub fn new(
        p0: f64,
        rate: f64,
        sigma2: f64,
        lambda0: f64,
        lambda1: f64,
        lambda2: f64,
    ) -> Result<Self> {
        fn check(field: &'static str, value: f64) -> Result<f64> {
            if value.is_finite() && value > 0.0 {
                Ok(value)
            } else {
                Err(Error::invalid(field, format!("must be a positive finite number, got {value}")))
            }
        }
        Ok(SystemParams {
            p0: check("p0", p0)?,
            rate: check("rate", rate)?,
            sigma2: check("sigma2", sigma2)?,
            lambda0: check("lambda0", lambda0)?,
            lambda1: check("lambda1", lambda1)?,
            lambda2: check("lambda2", lambda2)?,
        })
    }

    /// Returns a copy with a different link rate.
    pub fn with_rate(&self, rate: f64) -> Result<Self> {
        SystemParams::new(self.p0, rate, self.sigma2, self.lambda0, self.lambda1, self.lambda2)
    }

    /// ST transmit power (linear).
    pub fn p0(&self) -> f64 {
        self.p0
    }

    /// Link rate R in bits/s/Hz.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Noise power at both the SR and the monitor.
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Rate parameter of the ST-to-SR gain (mean gain is `1/lambda0`).
    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    /// Rate parameter of the ST-to-monitor gain.
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    /// Rate parameter of the monitor-to-SR jamming gain.
    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    /// Minimum SINR needed to decode a rate-R packet: `2^R - 1`.
    pub fn gamma_bar(&self) -> f64 {
        (2f64).powf(self.rate) - 1.0
    }

    /// Monitor decode threshold on the eavesdropping gain:
    /// `gamma_bar * sigma2 / p0`. The monitor decodes a clean round iff
    /// `g1 >= g_bar()`.
    pub fn g_bar(&self) -> f64 {
        self.gamma_bar() * self.sigma2 / self.p0
    }
}

impl Default for SystemParams {
    /// The baseline numerical setup: `P0 = 10` (10 dB), `R = 2`,
    /// `sigma2 = 1`, mean gains `1/lambda0 = 1`, `1/lambda1 = 1/lambda2 = 0.2`.
    fn default() -> Self {
        SystemParams::new(10.0, 2.0, 1.0, 1.0, 5.0, 5.0).expect("baseline constants are valid")
    }
}

/// All channel gains one packet can consume.
///
/// Round-II jamming gain is absent by design: the monitor always listens in
/// round II, so `g2` is never used there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    /// ST-to-SR gain, round I.
    pub g0_r1: f64,
    /// ST-to-monitor gain, round I.
    pub g1_r1: f64,
    /// Monitor-to-SR jamming gain, round I.
    pub g2_r1: f64,
    /// ST-to-SR gain, round II.
    pub g0_r2: f64,
    /// ST-to-monitor gain, round II.
    pub g1_r2: f64,
}

/// Samples the five independent exponential gains of one packet.
///
/// Consumes exactly five draws from `rng`, in a fixed field order, so a
/// stream position identifies a packet deterministically.
pub fn sample_packet(params: &SystemParams, rng: &mut impl RngCore) -> ChannelDraw {
    ChannelDraw {
        g0_r1: sample_exp(rng, params.lambda0),
        g1_r1: sample_exp(rng, params.lambda1),
        g2_r1: sample_exp(rng, params.lambda2),
        g0_r2: sample_exp(rng, params.lambda0),
        g1_r2: sample_exp(rng, params.lambda1),
    }
}
