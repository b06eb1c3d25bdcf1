//! Wavepackets `Ψ(x,t) = Σ a_n Ψ_n(x) e^{-iω_n t}` in the well's eigenbasis.
//!
//! Momentum, its rate of change and the force all reduce to double sums
//! over mode pairs `n ≠ m` weighted by the parity factor
//! `β_nm = 1 − (−1)^{n+m}`:
//!
//! ```text
//! ⟨P⟩       = −iħ (2/L) Σ a_n* a_m k_n k_m / (k_n² − k_m²) β_nm e^{i(ω_n−ω_m)t}
//! d⟨P⟩/dt   =  (ħ²/mL)  Σ a_n* a_m k_n k_m β_nm e^{i(ω_n−ω_m)t}
//! ⟨dV/dx⟩   = −(ħ²/mL)  Σ a_n* a_m k_n k_m β_nm e^{i(ω_n−ω_m)t}
//! ```
//!
//! The rate and force coefficients are negatives of each other pair by
//! pair, so Ehrenfest's relation holds term by term. Sums run in ascending
//! `(n, m)` order.

mod grid;

pub use grid::{grid_momentum, GridState};

pub use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::isw::WellConfig;
use crate::par::{self, Execution};

/// Relative bound on the imaginary part left over by a series that must be
/// real.
pub const REALITY_TOLERANCE: f64 = 1e-12;

/// Number of time samples in a default report.
pub const DEFAULT_SAMPLES: usize = 201;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PacketError {
    #[error("packet coefficients are all zero")]
    ZeroPacket,
    #[error("packet coefficients must be finite")]
    NonFinite,
    #[error("series should be real but has imaginary part {imag:e} (scale {scale:e})")]
    NotReal { imag: f64, scale: f64 },
    #[error("grid spacing {h} must be positive and at most L/100 = {max}")]
    GridTooCoarse { h: f64, max: f64 },
}

/// `1 − (−1)^{n+m}`: 2 for odd `n + m`, 0 for even.
pub fn parity_factor(n: usize, m: usize) -> f64 {
    if (n + m) % 2 == 1 {
        2.0
    } else {
        0.0
    }
}

fn mode_wavenumber(cfg: &WellConfig, n: usize) -> f64 {
    cfg.wavenumber(u32::try_from(n).expect("mode index out of range"))
}

/// `(ħ²/mL) k_n k_m β_nm`, the shared magnitude of the rate and force terms.
fn coupling(cfg: &WellConfig, n: usize, m: usize) -> f64 {
    if n == m {
        return 0.0;
    }
    let scale = cfg.hbar() * cfg.hbar() / (cfg.mass() * cfg.length());
    scale * mode_wavenumber(cfg, n) * mode_wavenumber(cfg, m) * parity_factor(n, m)
}

/// `⟨n| dV/dx |m⟩ = −(ħ²/mL) k_n k_m β_nm` for `n ≠ m`, zero on the diagonal.
pub fn force_matrix_element(cfg: &WellConfig, n: usize, m: usize) -> f64 {
    assert!(n >= 1 && m >= 1, "mode indices start at 1");
    -coupling(cfg, n, m)
}

/// `⟨n|P|m⟩ = −iħ (2/L) k_n k_m β_nm / (k_n² − k_m²)`, purely imaginary.
pub fn momentum_matrix_element(cfg: &WellConfig, n: usize, m: usize) -> Complex64 {
    assert!(n >= 1 && m >= 1, "mode indices start at 1");
    if n == m {
        return Complex64::new(0.0, 0.0);
    }
    let (kn, km) = (mode_wavenumber(cfg, n), mode_wavenumber(cfg, m));
    let re = cfg.hbar() * 2.0 / cfg.length() * kn * km / (kn * kn - km * km) * parity_factor(n, m);
    Complex64::new(0.0, -re)
}

/// One beat of the two lowest modes: `2π / (ω_2 − ω_1)`.
pub fn beat_period(cfg: &WellConfig) -> f64 {
    let (w1, w2) = (cfg.energy(1) / cfg.hbar(), cfg.energy(2) / cfg.hbar());
    2.0 * std::f64::consts::PI / (w2 - w1)
}

/// `samples` uniform times over `[start, end]`, inclusive.
pub fn uniform_times(start: f64, end: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (samples - 1) as f64;
            (0..samples).map(|i| start + step * i as f64).collect()
        }
    }
}

pub fn default_times(cfg: &WellConfig) -> Vec<f64> {
    uniform_times(0.0, beat_period(cfg), DEFAULT_SAMPLES)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavePacket {
    config: WellConfig,
    coeffs: Vec<Complex64>,
    omegas: Vec<f64>,
}

/// Normalize `raw` so that `Σ|a_n|² = 1`; mode `n` is `raw[n - 1]`.
pub fn make_packet(cfg: &WellConfig, raw: &[Complex64]) -> Result<WavePacket, PacketError> {
    if raw.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(PacketError::NonFinite);
    }
    let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(PacketError::ZeroPacket);
    }
    let coeffs = raw.iter().map(|c| c / norm).collect();
    let omegas = (1..=raw.len())
        .map(|n| cfg.energy(n as u32) / cfg.hbar())
        .collect();
    Ok(WavePacket {
        config: *cfg,
        coeffs,
        omegas,
    })
}

/// A packet with `1..=max_modes` modes and standard complex normal
/// coefficients.
pub fn random_packet<R: Rng + ?Sized>(
    cfg: &WellConfig,
    rng: &mut R,
    max_modes: usize,
) -> WavePacket {
    let modes = rng.random_range(1..=max_modes.max(1));
    let raw: Vec<Complex64> = (0..modes)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    make_packet(cfg, &raw).expect("gaussian draws are nonzero almost surely")
}

/// `count` random packets from a ChaCha stream seeded with `seed`.
pub fn random_packets(
    cfg: &WellConfig,
    seed: u64,
    count: usize,
    max_modes: usize,
) -> Vec<WavePacket> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_packet(cfg, &mut rng, max_modes))
        .collect()
}

impl WavePacket {
    pub fn config(&self) -> &WellConfig {
        &self.config
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// Truncation `N`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// The packet with every coefficient conjugated (time reversal).
    pub fn conjugated(&self) -> WavePacket {
        WavePacket {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
            ..self.clone()
        }
    }

    /// `Ψ(x, t)`; exactly zero outside `[0, L]`.
    pub fn amplitude(&self, x: f64, t: f64) -> Complex64 {
        let l = self.config.length();
        if !(0.0..=l).contains(&x) {
            return Complex64::new(0.0, 0.0);
        }
        let norm = (2.0 / l).sqrt();
        self.coeffs
            .iter()
            .zip(&self.omegas)
            .enumerate()
            .map(|(i, (a, w))| {
                let (s, _) = crate::distcalc::sin_cos_pi((i + 1) as f64 * (x / l));
                a * (norm * s) * Complex64::cis(-w * t)
            })
            .sum()
    }

    /// `a_n* a_m e^{i(ω_n − ω_m)t}` for 1-based `n`, `m`.
    fn pair_weight(&self, n: usize, m: usize, t: f64) -> Complex64 {
        let phase = (self.omegas[n - 1] - self.omegas[m - 1]) * t;
        self.coeffs[n - 1].conj() * self.coeffs[m - 1] * Complex64::cis(phase)
    }

    /// Summand `(n, m)` of the force series.
    pub fn force_summand(&self, n: usize, m: usize, t: f64) -> Complex64 {
        self.pair_weight(n, m, t) * force_matrix_element(&self.config, n, m)
    }

    /// Summand `(n, m)` of the momentum series.
    pub fn momentum_summand(&self, n: usize, m: usize, t: f64) -> Complex64 {
        self.pair_weight(n, m, t) * momentum_matrix_element(&self.config, n, m)
    }

    /// Summand `(n, m)` of the momentum-rate series.
    pub fn rate_summand(&self, n: usize, m: usize, t: f64) -> Complex64 {
        self.pair_weight(n, m, t) * coupling(&self.config, n, m)
    }

    fn real_sum(&self, summand: impl Fn(usize, usize) -> Complex64) -> Result<f64, PacketError> {
        let mut total = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for n in 1..=self.len() {
            for m in (1..=self.len()).filter(|&m| m != n) {
                let z = summand(n, m);
                scale += z.norm();
                total += z;
            }
        }
        if total.im.abs() > REALITY_TOLERANCE * scale.max(1.0) {
            return Err(PacketError::NotReal {
                imag: total.im,
                scale,
            });
        }
        Ok(total.re)
    }

    pub fn momentum_expectation(&self, t: f64) -> Result<f64, PacketError> {
        self.real_sum(|n, m| self.momentum_summand(n, m, t))
    }

    pub fn momentum_rate(&self, t: f64) -> Result<f64, PacketError> {
        self.real_sum(|n, m| self.rate_summand(n, m, t))
    }

    /// `⟨dV/dx⟩`; the force is its negative.
    pub fn force_expectation(&self, t: f64) -> Result<f64, PacketError> {
        self.real_sum(|n, m| self.force_summand(n, m, t))
    }

    /// `d⟨P⟩/dt + ⟨dV/dx⟩`.
    pub fn ehrenfest_residual(&self, t: f64) -> Result<f64, PacketError> {
        Ok(self.momentum_rate(t)? + self.force_expectation(t)?)
    }

    pub fn grid_momentum(&self, t: f64, h: f64) -> Result<f64, PacketError> {
        grid_momentum(self, t, h)
    }
}

/// Time series of the Ehrenfest quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct EhrenfestReport {
    pub times: Vec<f64>,
    pub momentum: Vec<f64>,
    pub momentum_rate: Vec<f64>,
    /// `⟨dV/dx⟩`, the negative of the force.
    pub force: Vec<f64>,
    pub residual: Vec<f64>,
    /// Grid-quadrature momentum, when an oracle spacing was requested.
    pub momentum_grid: Option<Vec<f64>>,
}

impl EhrenfestReport {
    pub fn max_abs_residual(&self) -> f64 {
        self.residual.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn max_oracle_deviation(&self) -> Option<f64> {
        self.momentum_grid.as_ref().map(|g| {
            g.iter()
                .zip(&self.momentum)
                .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
        })
    }
}

struct Sample {
    momentum: f64,
    rate: f64,
    force: f64,
    grid: Option<f64>,
}

/// Evaluate every series at each time. Samples are independent; the result
/// does not depend on `exec`.
pub fn ehrenfest_report(
    packet: &WavePacket,
    times: &[f64],
    oracle_spacing: Option<f64>,
    exec: Execution,
) -> Result<EhrenfestReport, PacketError> {
    let samples = par::try_map(times, exec, |&t| -> Result<Sample, PacketError> {
        Ok(Sample {
            momentum: packet.momentum_expectation(t)?,
            rate: packet.momentum_rate(t)?,
            force: packet.force_expectation(t)?,
            grid: oracle_spacing
                .map(|h| packet.grid_momentum(t, h))
                .transpose()?,
        })
    })?;
    Ok(EhrenfestReport {
        times: times.to_vec(),
        momentum: samples.iter().map(|s| s.momentum).collect(),
        momentum_rate: samples.iter().map(|s| s.rate).collect(),
        force: samples.iter().map(|s| s.force).collect(),
        residual: samples.iter().map(|s| s.rate + s.force).collect(),
        momentum_grid: oracle_spacing.map(|_| samples.iter().map(|s| s.grid.unwrap()).collect()),
    })
}
