//! Grid quadrature for packet expectation values.
//!
//! Used only as an oracle against the closed-form series: the momentum
//! integral is done with the trapezoid rule and a centred difference for
//! `∂_x`. The walls get second-order one-sided stencils since `Ψ'` jumps
//! there.

use num_complex::Complex64;

use super::{PacketError, WavePacket};

/// `Ψ(x_j, t)` on a uniform grid over `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub points: Vec<f64>,
    pub values: Vec<Complex64>,
    pub spacing: f64,
}

impl GridState {
    /// Sample on the finest uniform grid whose spacing does not exceed `h`.
    pub fn sample(packet: &WavePacket, t: f64, h: f64) -> Result<Self, PacketError> {
        let l = packet.config().length();
        let max = l / 100.0;
        if !(h > 0.0 && h <= max) {
            return Err(PacketError::GridTooCoarse { h, max });
        }
        let ratio = l / h;
        let cells = if (ratio - ratio.round()).abs() < 1e-9 * ratio {
            ratio.round() as usize
        } else {
            ratio.ceil() as usize
        };
        let spacing = l / cells as f64;
        let points: Vec<f64> = (0..=cells)
            .map(|j| if j == cells { l } else { j as f64 * spacing })
            .collect();
        let values = points.iter().map(|&x| packet.amplitude(x, t)).collect();
        Ok(Self {
            points,
            values,
            spacing,
        })
    }

    fn trapezoid(&self, f: impl Fn(usize) -> Complex64) -> Complex64 {
        let last = self.values.len() - 1;
        let interior: Complex64 = (1..last).map(&f).sum();
        (interior + (f(0) + f(last)) * 0.5) * self.spacing
    }

    /// `∂_x Ψ` at grid point `j`.
    pub fn derivative(&self, j: usize) -> Complex64 {
        let v = &self.values;
        let last = v.len() - 1;
        let h2 = 2.0 * self.spacing;
        if j == 0 {
            (-3.0 * v[0] + 4.0 * v[1] - v[2]) / h2
        } else if j == last {
            (3.0 * v[last] - 4.0 * v[last - 1] + v[last - 2]) / h2
        } else {
            (v[j + 1] - v[j - 1]) / h2
        }
    }

    pub fn norm(&self) -> f64 {
        self.trapezoid(|j| Complex64::new(self.values[j].norm_sqr(), 0.0))
            .re
    }

    /// `∫ Ψ* (−iħ ∂_x) Ψ dx`, real part.
    pub fn momentum(&self, hbar: f64) -> f64 {
        let minus_i_hbar = Complex64::new(0.0, -hbar);
        self.trapezoid(|j| self.values[j].conj() * minus_i_hbar * self.derivative(j))
            .re
    }
}

pub fn grid_momentum(packet: &WavePacket, t: f64, h: f64) -> Result<f64, PacketError> {
    Ok(GridState::sample(packet, t, h)?.momentum(packet.config().hbar()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isw::WellConfig;
    use crate::packets::make_packet;

    #[test]
    fn spacing_limits() {
        let p = make_packet(&WellConfig::natural(), &[Complex64::new(1.0, 0.0)]).unwrap();
        assert!(matches!(
            grid_momentum(&p, 0.0, 0.02),
            Err(PacketError::GridTooCoarse { .. })
        ));
        assert!(grid_momentum(&p, 0.0, 0.0).is_err());
        assert!(grid_momentum(&p, 0.0, -1e-3).is_err());
        let g = GridState::sample(&p, 0.0, 0.003).unwrap();
        assert!(g.spacing <= 0.003);
        assert_eq!(*g.points.last().unwrap(), 1.0);
        assert_eq!(GridState::sample(&p, 0.0, 1e-3).unwrap().points.len(), 1001);
    }

    #[test]
    fn eigenstate_momentum_vanishes() {
        let p = make_packet(&WellConfig::natural(), &[Complex64::new(1.0, 0.0)]).unwrap();
        assert!(grid_momentum(&p, 0.4, 1e-3).unwrap().abs() < 1e-6);
    }

    #[test]
    fn grid_norm_close_to_one() {
        let cfg = WellConfig::new(2.0, 1.0, 1.0).unwrap();
        let p = make_packet(&cfg, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]).unwrap();
        let g = GridState::sample(&p, 1.3, 2e-3).unwrap();
        assert!((g.norm() - 1.0).abs() < 1e-5);
    }
}
