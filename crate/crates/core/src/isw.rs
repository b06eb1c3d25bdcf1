//! The infinite square well on `[0, L]`.
//!
//! The confining potential is represented by [`BoundaryPotential`], a formal
//! operator rather than an expression: its quotient form has steps in the
//! denominator, which no product algebra can hold. The only thing it ever
//! does is act on a wave function that vanishes at both walls, where the
//! `δ(x)/(x θ(x))` factor cancels against the vanishing function and leaves
//!
//! ```text
//! V ψ = (ħ²/2m) [ ψ'(0⁺) δ(x) − ψ'(L⁻) δ(x − L) ]
//! ```
//!
//! The result has no regular part, so `V ψ = 0` away from the walls falls
//! out of the computation instead of being imposed.

use thiserror::Error;

use crate::distcalc::{wavenumber, DistError, DistExpr, DistTerm, Side, SmoothFn, StepFactor};

/// Relative size below which a wall value counts as vanishing.
pub const WALL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WellError {
    #[error("{name} must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("quantum number must be at least 1, got {0}")]
    InvalidQuantumNumber(i64),
    #[error(
        "wave function is {value:e} at the wall x = {wall}; the well potential only \
         admits functions vanishing at both walls (anything else forces the trivial solution)"
    )]
    NotInDomain { wall: f64, value: f64 },
    #[error("wave function carries delta terms and lies outside the potential's domain")]
    SingularInput,
    #[error("integration window around x = {x0} reaches the other singular point x = {other}")]
    WindowTouchesWall { x0: f64, other: f64 },
    #[error(transparent)]
    Dist(#[from] DistError),
}

/// Physical parameters: well width `L`, mass `m`, and `ħ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellConfig {
    length: f64,
    mass: f64,
    hbar: f64,
}

impl WellConfig {
    pub fn new(length: f64, mass: f64, hbar: f64) -> Result<Self, WellError> {
        for (name, value) in [("L", length), ("m", mass), ("hbar", hbar)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(WellError::InvalidParameter { name, value });
            }
        }
        Ok(Self { length, mass, hbar })
    }

    /// `ħ = m = L = 1`.
    pub fn natural() -> Self {
        Self {
            length: 1.0,
            mass: 1.0,
            hbar: 1.0,
        }
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `ħ²/2m`.
    pub fn kinetic_prefactor(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass)
    }

    /// `k_n = nπ/L`.
    pub fn wavenumber(&self, n: u32) -> f64 {
        wavenumber(i64::from(n), self.length)
    }

    /// `E_n = ħ² k_n² / 2m`, without the `n ≥ 1` check.
    pub fn energy(&self, n: u32) -> f64 {
        let k = self.wavenumber(n);
        self.hbar * self.hbar * k * k / (2.0 * self.mass)
    }

    /// Half-width of the window used for jump integrals.
    pub fn jump_window(&self) -> f64 {
        (self.length / 4.0).min(0.1 * self.length)
    }

    /// `θ(x) θ(L − x)`.
    pub fn walls(&self) -> [StepFactor; 2] {
        [StepFactor::rising(0.0), StepFactor::falling(self.length)]
    }
}

impl Default for WellConfig {
    fn default() -> Self {
        Self::natural()
    }
}

fn check_quantum_number(n: i64) -> Result<u32, WellError> {
    u32::try_from(n)
        .ok()
        .filter(|&n| n >= 1)
        .ok_or(WellError::InvalidQuantumNumber(n))
}

/// A stationary state `Ψ_n = √(2/L) sin(k_n x) θ(x) θ(L − x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenstate {
    pub config: WellConfig,
    pub n: u32,
    pub k: f64,
    pub energy: f64,
    pub expr: DistExpr,
}

impl Eigenstate {
    /// `√(2/L) sin(k_n x)`, the smooth factor `G`.
    pub fn profile(&self) -> SmoothFn {
        profile(&self.config, self.n)
    }
}

fn profile(cfg: &WellConfig, n: u32) -> SmoothFn {
    let l = cfg.length;
    SmoothFn::sin((2.0 / l).sqrt(), i64::from(n), l)
}

pub fn eigenstate(cfg: &WellConfig, n: i64) -> Result<Eigenstate, WellError> {
    let n = check_quantum_number(n)?;
    let expr = DistExpr::from_terms([DistTerm::regular(profile(cfg, n), cfg.walls())]).normalize();
    Ok(Eigenstate {
        config: *cfg,
        n,
        k: cfg.wavenumber(n),
        energy: cfg.energy(n),
        expr,
    })
}

pub fn eigenenergy(cfg: &WellConfig, n: i64) -> Result<f64, WellError> {
    Ok(cfg.energy(check_quantum_number(n)?))
}

/// The well's confining potential, acting through the cancelled wall rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPotential {
    pub config: WellConfig,
}

impl BoundaryPotential {
    pub fn new(config: WellConfig) -> Self {
        Self { config }
    }

    /// Largest magnitude of the regular part on a fixed interior grid.
    fn interior_amplitude(&self, psi: &DistExpr) -> f64 {
        const SAMPLES: usize = 257;
        let l = self.config.length;
        (1..SAMPLES)
            .map(|i| l * i as f64 / SAMPLES as f64)
            .map(|x| psi.regular_limit(x, Side::Right).abs())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, psi: &DistExpr) -> Result<DistExpr, WellError> {
        let psi = psi.normalize();
        if psi.has_deltas() {
            return Err(WellError::SingularInput);
        }
        let l = self.config.length;
        let at_left = psi.regular_limit(0.0, Side::Right);
        let at_right = psi.regular_limit(l, Side::Left);
        let scale = self
            .interior_amplitude(&psi)
            .max(at_left.abs())
            .max(at_right.abs());
        for (wall, value) in [(0.0, at_left), (l, at_right)] {
            if value.abs() > WALL_TOLERANCE * scale {
                return Err(WellError::NotInDomain { wall, value });
            }
        }
        let c = self.config.kinetic_prefactor();
        let slope_left = psi.regular_derivative_limit(0.0, Side::Right);
        let slope_right = psi.regular_derivative_limit(l, Side::Left);
        Ok(
            (DistExpr::delta(c * slope_left, 0.0, 0) + DistExpr::delta(-c * slope_right, l, 0))
                .normalize(),
        )
    }
}

pub fn apply_well_potential(v: &BoundaryPotential, psi: &DistExpr) -> Result<DistExpr, WellError> {
    v.apply(psi)
}

/// `−(ħ²/2m) ψ'' + V ψ − E ψ`, normalized. Zero exactly when `(ψ, E)`
/// solves the stationary equation.
pub fn tise_residual(cfg: &WellConfig, psi: &DistExpr, energy: f64) -> Result<DistExpr, WellError> {
    let potential = BoundaryPotential::new(*cfg).apply(psi)?;
    let kinetic = psi.nth_derivative(2).scaled(-cfg.kinetic_prefactor());
    Ok((kinetic + potential - psi.scaled(energy)).normalize())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpMethod {
    /// `(2m/ħ²) ∫ V ψ` over a window around the point.
    Integral,
    /// `ψ'(x0⁺) − ψ'(x0⁻)` read off the regular derivative.
    OneSided,
}

/// Jump of `ψ'` at `x0` for an arbitrary function in the potential's domain.
pub fn derivative_jump_of(
    cfg: &WellConfig,
    psi: &DistExpr,
    x0: f64,
    method: JumpMethod,
) -> Result<f64, WellError> {
    match method {
        JumpMethod::OneSided => {
            let psi = psi.normalize();
            Ok(psi.regular_derivative_limit(x0, Side::Right)
                - psi.regular_derivative_limit(x0, Side::Left))
        }
        JumpMethod::Integral => {
            let eps = cfg.jump_window();
            let (lo, hi) = (x0 - eps, x0 + eps);
            if let Some(&other) = [0.0, cfg.length]
                .iter()
                .find(|&&w| w != x0 && lo <= w && w <= hi)
            {
                return Err(WellError::WindowTouchesWall { x0, other });
            }
            let v_psi = BoundaryPotential::new(*cfg).apply(psi)?;
            Ok(v_psi.integrate(lo, hi)? / cfg.kinetic_prefactor())
        }
    }
}

pub fn derivative_jump(state: &Eigenstate, x0: f64, method: JumpMethod) -> Result<f64, WellError> {
    derivative_jump_of(&state.config, &state.expr, x0, method)
}

/// `G [θ(x) + θ(L − x) − 2 θ(x) θ(L − x)]`: the product of `G θ θ` with the
/// naive potential `1/θ(x) + 1/θ(L − x) − 2`. It equals `G` everywhere
/// outside the well, so asking it to vanish there forces `G ≡ 0`.
pub fn naive_potential_residual(cfg: &WellConfig, g: &SmoothFn) -> DistExpr {
    let [left, right] = cfg.walls();
    DistExpr::from_terms([
        DistTerm::regular(g.clone(), [left]),
        DistTerm::regular(g.clone(), [right]),
        DistTerm::regular(g.scaled(-2.0), [left, right]),
    ])
    .normalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn config_validation() {
        assert!(WellConfig::new(1.0, 1.0, 1.0).is_ok());
        assert_eq!(
            WellConfig::new(-1.0, 1.0, 1.0).unwrap_err(),
            WellError::InvalidParameter {
                name: "L",
                value: -1.0
            }
        );
        assert!(WellConfig::new(1.0, 0.0, 1.0).is_err());
        assert!(WellConfig::new(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn quantum_number_must_be_positive() {
        let cfg = WellConfig::natural();
        assert_eq!(
            eigenstate(&cfg, 0).unwrap_err(),
            WellError::InvalidQuantumNumber(0)
        );
        assert!(eigenenergy(&cfg, -3).is_err());
    }

    #[test]
    fn energies() {
        let cfg = WellConfig::natural();
        assert!((eigenenergy(&cfg, 1).unwrap() - PI * PI / 2.0).abs() < 1e-14);
        let e1 = eigenenergy(&cfg, 1).unwrap();
        for n in 1..=20 {
            let ratio = eigenenergy(&cfg, n).unwrap() / e1;
            assert!((ratio - (n * n) as f64).abs() < 1e-12 * ratio);
        }
        let wide = WellConfig::new(2.0, 1.0, 1.0).unwrap();
        assert!(
            (eigenenergy(&wide, 3).unwrap() * 4.0 - eigenenergy(&cfg, 3).unwrap()).abs() < 1e-12
        );
    }

    #[test]
    fn ground_state_shape() {
        let s = eigenstate(&WellConfig::natural(), 1).unwrap();
        assert_eq!(s.expr.to_string(), "1.4142*sin(1*pi*x/L) * H(x)*H(L-x)");
        assert_eq!(s.expr.evaluate_regular(-0.5).unwrap(), 0.0);
        assert_eq!(s.expr.evaluate_regular(1.5).unwrap(), 0.0);
    }

    #[test]
    fn potential_on_eigenstate() {
        let cfg = WellConfig::new(2.3, 0.5, 1.0).unwrap();
        let s = eigenstate(&cfg, 3).unwrap();
        let v_psi = BoundaryPotential::new(cfg).apply(&s.expr).unwrap();
        let pre = (2.0 / cfg.length()).sqrt() * cfg.kinetic_prefactor();
        assert_eq!(v_psi.terms().len(), 2);
        assert!((v_psi.delta_coefficient(0.0, 0) - pre * s.k).abs() < 1e-12);
        assert!((v_psi.delta_coefficient(cfg.length(), 0) - pre * s.k).abs() < 1e-12); // cos(3π) = -1
        assert!(v_psi.regular_part().terms().is_empty());
    }

    #[test]
    fn potential_rejects_nonvanishing_input() {
        let cfg = WellConfig::natural();
        let bad =
            DistExpr::from_terms([DistTerm::regular(SmoothFn::cos(1.0, 1, 1.0), cfg.walls())]);
        let err = BoundaryPotential::new(cfg).apply(&bad).unwrap_err();
        assert!(matches!(err, WellError::NotInDomain { wall, .. } if wall == 0.0));
        assert!(err.to_string().contains("trivial solution"));
        let singular = DistExpr::delta(1.0, 0.5, 0);
        assert_eq!(
            BoundaryPotential::new(cfg).apply(&singular).unwrap_err(),
            WellError::SingularInput
        );
    }

    #[test]
    fn residual_of_wrong_energy() {
        let cfg = WellConfig::natural();
        let s1 = eigenstate(&cfg, 1).unwrap();
        let e2 = eigenenergy(&cfg, 2).unwrap();
        let r = tise_residual(&cfg, &s1.expr, e2).unwrap();
        assert!(r.equivalent(&s1.expr.scaled(s1.energy - e2), 1e-12));
    }

    #[test]
    fn superposition_residual() {
        let cfg = WellConfig::natural();
        let (s1, s2) = (eigenstate(&cfg, 1).unwrap(), eigenstate(&cfg, 2).unwrap());
        let mix = (s1.expr.clone() + s2.expr.clone()).scaled(1.0 / 2f64.sqrt());
        let r = tise_residual(&cfg, &mix, s1.energy).unwrap();
        let expected = s2.expr.scaled((s2.energy - s1.energy) / 2f64.sqrt());
        assert!(r.equivalent(&expected, 1e-12));
    }

    #[test]
    fn interior_jump_is_zero() {
        let cfg = WellConfig::natural();
        let s = eigenstate(&cfg, 4).unwrap();
        assert_eq!(derivative_jump(&s, 0.5, JumpMethod::Integral).unwrap(), 0.0);
        assert!(
            derivative_jump(&s, 0.5, JumpMethod::OneSided)
                .unwrap()
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn window_reaching_a_wall_is_rejected() {
        let cfg = WellConfig::natural();
        let s = eigenstate(&cfg, 1).unwrap();
        assert_eq!(
            derivative_jump(&s, 0.05, JumpMethod::Integral).unwrap_err(),
            WellError::WindowTouchesWall {
                x0: 0.05,
                other: 0.0
            }
        );
    }

    #[test]
    fn naive_potential_vanishing_profile() {
        let cfg = WellConfig::natural();
        assert!(naive_potential_residual(&cfg, &SmoothFn::zero())
            .terms()
            .is_empty());
    }
}
