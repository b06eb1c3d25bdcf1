use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::isw::WellConfig;
use crate::packets::{self, WavePacket};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("malformed config: {0}")]
    Syntax(String),
    #[error("invalid config value for {key}: {reason}")]
    Invalid { key: &'static str, reason: String },
}

fn invalid(key: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WellParams {
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "m")]
    pub mass: f64,
    pub hbar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeWindow {
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridParams {
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub symbolic: f64,
    pub oracle: f64,
}

/// A fully resolved run configuration; every default is explicit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub well: WellParams,
    /// Raw (unnormalized) coefficients as `[re, im]` pairs.
    pub packet: Vec<[f64; 2]>,
    pub times: TimeWindow,
    pub grid: GridParams,
    pub tolerances: Tolerances,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    well: RawWell,
    packet: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    times: RawTimes,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    tolerances: RawTolerances,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWell {
    #[serde(rename = "L")]
    length: Option<f64>,
    #[serde(rename = "m")]
    mass: Option<f64>,
    hbar: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTimes {
    t_start: Option<f64>,
    t_end: Option<f64>,
    samples: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    h: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    symbolic: Option<f64>,
    oracle: Option<f64>,
}

fn positive(key: &'static str, value: f64) -> Result<f64, ConfigError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(invalid(
            key,
            format!("must be positive and finite, got {value}"),
        ))
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig =
        serde_json::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;

    let well = WellParams {
        length: positive("well.L", raw.well.length.unwrap_or(1.0))?,
        mass: positive("well.m", raw.well.mass.unwrap_or(1.0))?,
        hbar: positive("well.hbar", raw.well.hbar.unwrap_or(1.0))?,
    };
    let cfg = WellConfig::new(well.length, well.mass, well.hbar).expect("validated above");

    let packet = raw.packet.unwrap_or_else(|| vec![[1.0, 0.0], [1.0, 0.0]]);
    if packet.is_empty() {
        return Err(invalid("packet", "must list at least one coefficient"));
    }
    if packet.iter().flatten().any(|v| !v.is_finite()) {
        return Err(invalid("packet", "coefficients must be finite"));
    }
    if packet.iter().all(|[re, im]| *re == 0.0 && *im == 0.0) {
        return Err(invalid("packet", "coefficients are all zero"));
    }

    let t_start = raw.times.t_start.unwrap_or(0.0);
    if !t_start.is_finite() {
        return Err(invalid(
            "times.t_start",
            format!("must be finite, got {t_start}"),
        ));
    }
    let t_end = raw
        .times
        .t_end
        .unwrap_or(t_start + packets::beat_period(&cfg));
    if !(t_end.is_finite() && t_end >= t_start) {
        return Err(invalid(
            "times.t_end",
            format!("must be finite and >= t_start, got {t_end}"),
        ));
    }
    let samples = raw.times.samples.unwrap_or(packets::DEFAULT_SAMPLES);
    if samples == 0 {
        return Err(invalid("times.samples", "must be at least 1"));
    }

    let h = positive("grid.h", raw.grid.h.unwrap_or(well.length / 2000.0))?;
    if h > well.length / 100.0 {
        return Err(invalid("grid.h", format!("must be at most L/100, got {h}")));
    }

    let tolerances = Tolerances {
        symbolic: positive(
            "tolerances.symbolic",
            raw.tolerances.symbolic.unwrap_or(1e-12),
        )?,
        oracle: positive("tolerances.oracle", raw.tolerances.oracle.unwrap_or(1e-4))?,
    };

    Ok(RunConfig {
        well,
        packet,
        times: TimeWindow {
            t_start,
            t_end,
            samples,
        },
        grid: GridParams { h },
        tolerances,
    })
}

impl Default for RunConfig {
    fn default() -> Self {
        parse_config("{}").expect("defaults are valid")
    }
}

impl RunConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn well_config(&self) -> WellConfig {
        WellConfig::new(self.well.length, self.well.mass, self.well.hbar)
            .expect("validated at parse")
    }

    pub fn coefficients(&self) -> Vec<Complex64> {
        self.packet
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect()
    }

    pub fn wave_packet(&self) -> WavePacket {
        packets::make_packet(&self.well_config(), &self.coefficients()).expect("validated at parse")
    }

    pub fn times(&self) -> Vec<f64> {
        packets::uniform_times(self.times.t_start, self.times.t_end, self.times.samples)
    }
}
