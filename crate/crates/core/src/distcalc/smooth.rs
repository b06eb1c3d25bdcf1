//! Smooth factors: finite sums of `c * x^p * trig(q*pi*x/L)`.
//!
//! Wavenumbers are kept as exact integers `q` against a shared length
//! scale `L`, so boundary values such as `sin(q*pi) = 0` and
//! `cos(q*pi) = (-1)^q` come out exact instead of approximately zero.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

/// Relative threshold under which the sum of two like atoms is treated as
/// an exact cancellation.
const CANCELLATION_TOL: f64 = 1e-14;

/// The trigonometric kind of an atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Trig {
    Const,
    Sin,
    Cos,
}

/// Key of one monomial-times-trig atom, ordered by `(power, wave, trig)`.
///
/// `wave` is the integer `q` in `q*pi*x/L`. Constant atoms always carry
/// `wave == 0`; sine and cosine atoms always carry `wave > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub power: u32,
    pub wave: u32,
    pub trig: Trig,
}

/// Wavenumber `q*pi/L`. Every wavenumber in the crate goes through here so
/// that independently computed `k_n` agree bit for bit.
pub fn wavenumber(q: i64, length: f64) -> f64 {
    q as f64 * PI / length
}

/// `(sin(pi*r), cos(pi*r))`, exact when `r` is an integer or half-integer.
pub fn sin_cos_pi(r: f64) -> (f64, f64) {
    let reduced = r.rem_euclid(2.0);
    if reduced.fract() == 0.0 {
        let cos = if reduced == 0.0 { 1.0 } else { -1.0 };
        (0.0, cos)
    } else if (2.0 * reduced).fract() == 0.0 {
        let sin = if reduced == 0.5 { 1.0 } else { -1.0 };
        (sin, 0.0)
    } else {
        (PI * reduced).sin_cos()
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// A smooth function from the closed polynomial-times-trigonometric class.
///
/// `scale` is the length `L` the wavenumbers refer to. Pure polynomials
/// have no scale; combining two functions with different scales panics.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SmoothFn {
    scale: Option<f64>,
    atoms: BTreeMap<Atom, f64>,
}

impl SmoothFn {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(c, 0)
    }

    /// `c * x^p`.
    pub fn monomial(c: f64, power: u32) -> Self {
        let mut f = Self::zero();
        f.push(c, power, Trig::Const, 0);
        f
    }

    /// `c * sin(q*pi*x/L)`.
    pub fn sin(c: f64, q: i64, length: f64) -> Self {
        Self::trig_atom(c, 0, Trig::Sin, q, length)
    }

    /// `c * cos(q*pi*x/L)`.
    pub fn cos(c: f64, q: i64, length: f64) -> Self {
        Self::trig_atom(c, 0, Trig::Cos, q, length)
    }

    /// `c * x^p * trig(q*pi*x/L)`.
    pub fn trig_atom(c: f64, power: u32, trig: Trig, q: i64, length: f64) -> Self {
        assert!(
            length.is_finite() && length > 0.0,
            "length scale must be positive and finite"
        );
        let mut f = Self {
            scale: Some(length),
            atoms: BTreeMap::new(),
        };
        f.push(c, power, trig, q);
        f.drop_unused_scale();
        f
    }

    pub fn scale(&self) -> Option<f64> {
        self.scale
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    /// True when the function has no `x` dependence.
    pub fn is_constant(&self) -> bool {
        self.atoms
            .keys()
            .all(|a| a.power == 0 && a.trig == Trig::Const)
    }

    pub fn atoms(&self) -> impl Iterator<Item = (Atom, f64)> + '_ {
        self.atoms.iter().map(|(a, c)| (*a, *c))
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.atoms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    fn wave(&self, q: u32) -> f64 {
        match self.scale {
            Some(l) => wavenumber(i64::from(q), l),
            None => 0.0,
        }
    }

    fn unify_scale(&mut self, other: Option<f64>) {
        match (self.scale, other) {
            (Some(a), Some(b)) => assert!(
                a == b,
                "cannot combine smooth functions with length scales {a} and {b}"
            ),
            (None, Some(b)) => self.scale = Some(b),
            _ => {}
        }
    }

    fn drop_unused_scale(&mut self) {
        if self.atoms.keys().all(|a| a.trig == Trig::Const) {
            self.scale = None;
        }
    }

    /// Accumulate a raw atom, canonicalising signed wave numbers.
    fn push(&mut self, c: f64, power: u32, trig: Trig, q: i64) {
        let (c, trig, q) = match trig {
            Trig::Const => (c, Trig::Const, 0),
            Trig::Sin if q == 0 => return,
            Trig::Sin if q < 0 => (-c, Trig::Sin, -q),
            Trig::Cos if q == 0 => (c, Trig::Const, 0),
            Trig::Cos => (c, Trig::Cos, q.abs()),
            Trig::Sin => (c, Trig::Sin, q),
        };
        if c == 0.0 {
            return;
        }
        let wave = u32::try_from(q).expect("wave number out of range");
        let key = Atom { power, wave, trig };
        match self.atoms.get_mut(&key) {
            Some(existing) => {
                let sum = *existing + c;
                if sum.abs() <= CANCELLATION_TOL * existing.abs().max(c.abs()) {
                    self.atoms.remove(&key);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.atoms.insert(key, c);
            }
        }
    }

    pub fn add(&self, other: &SmoothFn) -> SmoothFn {
        let mut out = self.clone();
        out.unify_scale(other.scale);
        for (a, c) in other.atoms() {
            out.push(c, a.power, a.trig, i64::from(a.wave));
        }
        out.drop_unused_scale();
        out
    }

    pub fn sub(&self, other: &SmoothFn) -> SmoothFn {
        self.add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, s: f64) -> SmoothFn {
        if s == 0.0 {
            return SmoothFn::zero();
        }
        SmoothFn {
            scale: self.scale,
            atoms: self.atoms.iter().map(|(a, c)| (*a, c * s)).collect(),
        }
    }

    /// Pointwise product via the product-to-sum identities.
    pub fn mul(&self, other: &SmoothFn) -> SmoothFn {
        let mut out = SmoothFn::zero();
        out.scale = self.scale;
        out.unify_scale(other.scale);
        for (a, ca) in self.atoms() {
            for (b, cb) in other.atoms() {
                let c = ca * cb;
                let p = a.power + b.power;
                let (qa, qb) = (i64::from(a.wave), i64::from(b.wave));
                match (a.trig, b.trig) {
                    (Trig::Const, t) => out.push(c, p, t, qb),
                    (t, Trig::Const) => out.push(c, p, t, qa),
                    (Trig::Sin, Trig::Sin) => {
                        out.push(0.5 * c, p, Trig::Cos, qa - qb);
                        out.push(-0.5 * c, p, Trig::Cos, qa + qb);
                    }
                    (Trig::Sin, Trig::Cos) => {
                        out.push(0.5 * c, p, Trig::Sin, qa + qb);
                        out.push(0.5 * c, p, Trig::Sin, qa - qb);
                    }
                    (Trig::Cos, Trig::Sin) => {
                        out.push(0.5 * c, p, Trig::Sin, qa + qb);
                        out.push(-0.5 * c, p, Trig::Sin, qa - qb);
                    }
                    (Trig::Cos, Trig::Cos) => {
                        out.push(0.5 * c, p, Trig::Cos, qa - qb);
                        out.push(0.5 * c, p, Trig::Cos, qa + qb);
                    }
                }
            }
        }
        out.drop_unused_scale();
        out
    }

    pub fn derivative(&self) -> SmoothFn {
        let mut out = SmoothFn {
            scale: self.scale,
            atoms: BTreeMap::new(),
        };
        for (a, c) in self.atoms() {
            let q = i64::from(a.wave);
            if a.power > 0 {
                out.push(c * f64::from(a.power), a.power - 1, a.trig, q);
            }
            let w = self.wave(a.wave);
            match a.trig {
                Trig::Const => {}
                Trig::Sin => out.push(c * w, a.power, Trig::Cos, q),
                Trig::Cos => out.push(-c * w, a.power, Trig::Sin, q),
            }
        }
        out.drop_unused_scale();
        out
    }

    pub fn nth_derivative(&self, order: u32) -> SmoothFn {
        (0..order).fold(self.clone(), |f, _| f.derivative())
    }

    /// An exact antiderivative (integration constant zero).
    pub fn antiderivative(&self) -> SmoothFn {
        let mut out = SmoothFn {
            scale: self.scale,
            atoms: BTreeMap::new(),
        };
        for (a, c) in self.atoms() {
            out.integrate_atom(c, a.power, a.trig, a.wave);
        }
        out.drop_unused_scale();
        out
    }

    // Integration by parts, lowering the power one step at a time.
    fn integrate_atom(&mut self, c: f64, power: u32, trig: Trig, wave: u32) {
        let q = i64::from(wave);
        let w = self.wave(wave);
        match trig {
            Trig::Const => self.push(c / f64::from(power + 1), power + 1, Trig::Const, 0),
            Trig::Sin => {
                self.push(-c / w, power, Trig::Cos, q);
                if power > 0 {
                    self.integrate_atom(c * f64::from(power) / w, power - 1, Trig::Cos, wave);
                }
            }
            Trig::Cos => {
                self.push(c / w, power, Trig::Sin, q);
                if power > 0 {
                    self.integrate_atom(-c * f64::from(power) / w, power - 1, Trig::Sin, wave);
                }
            }
        }
    }

    /// The shifted function `x -> f(x - a)`.
    pub fn shift(&self, a: f64) -> SmoothFn {
        let mut out = SmoothFn {
            scale: self.scale,
            atoms: BTreeMap::new(),
        };
        for (atom, c) in self.atoms() {
            let q = i64::from(atom.wave);
            let (s, co) = match self.scale {
                Some(l) if atom.trig != Trig::Const => sin_cos_pi(f64::from(atom.wave) * (a / l)),
                _ => (0.0, 1.0),
            };
            for i in 0..=atom.power {
                let poly = c * binomial(atom.power, i) * (-a).powi((atom.power - i) as i32);
                match atom.trig {
                    Trig::Const => out.push(poly, i, Trig::Const, 0),
                    Trig::Sin => {
                        out.push(poly * co, i, Trig::Sin, q);
                        out.push(-poly * s, i, Trig::Cos, q);
                    }
                    Trig::Cos => {
                        out.push(poly * co, i, Trig::Cos, q);
                        out.push(poly * s, i, Trig::Sin, q);
                    }
                }
            }
        }
        out.drop_unused_scale();
        out
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.atoms()
            .map(|(a, c)| {
                let trig = match (a.trig, self.scale) {
                    (Trig::Const, _) | (_, None) => 1.0,
                    (Trig::Sin, Some(l)) => sin_cos_pi(f64::from(a.wave) * (x / l)).0,
                    (Trig::Cos, Some(l)) => sin_cos_pi(f64::from(a.wave) * (x / l)).1,
                };
                c * x.powi(a.power as i32) * trig
            })
            .sum()
    }
}

impl fmt::Display for SmoothFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .atoms()
            .map(|(a, c)| {
                let mut s = format!("{c:.4}");
                match a.power {
                    0 => {}
                    1 => s.push_str("*x"),
                    p => s.push_str(&format!("*x^{p}")),
                }
                match a.trig {
                    Trig::Const => {}
                    Trig::Sin => s.push_str(&format!("*sin({}*pi*x/L)", a.wave)),
                    Trig::Cos => s.push_str(&format!("*cos({}*pi*x/L)", a.wave)),
                }
                s
            })
            .collect();
        if parts.len() == 1 {
            write!(f, "{}", parts[0])
        } else {
            write!(f, "({})", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_trig_values_are_exact() {
        for q in 1..=40_i64 {
            let (s, c) = sin_cos_pi(q as f64);
            assert_eq!(s, 0.0);
            assert_eq!(c, if q % 2 == 0 { 1.0 } else { -1.0 });
        }
        assert_eq!(sin_cos_pi(0.5), (1.0, 0.0));
        assert_eq!(sin_cos_pi(-0.5), (-1.0, 0.0));
    }

    #[test]
    fn sine_vanishes_at_both_walls() {
        let l = 2.3;
        for q in 1..=20 {
            let f = SmoothFn::sin(1.7, q, l);
            assert_eq!(f.eval(0.0), 0.0);
            assert_eq!(f.eval(l), 0.0);
        }
    }

    #[test]
    fn signed_wavenumbers_canonicalise() {
        let l = 1.0;
        assert_eq!(SmoothFn::sin(1.0, -3, l), SmoothFn::sin(-1.0, 3, l));
        assert_eq!(SmoothFn::cos(2.0, -3, l), SmoothFn::cos(2.0, 3, l));
        assert_eq!(SmoothFn::cos(2.0, 0, l), SmoothFn::constant(2.0));
        assert!(SmoothFn::sin(1.0, 0, l).is_zero());
    }

    #[test]
    fn derivative_of_sine() {
        let l = 1.0;
        let f = SmoothFn::sin(2.0, 3, l);
        let expected = SmoothFn::cos(2.0 * wavenumber(3, l), 3, l);
        assert_eq!(f.derivative(), expected);
        assert!(SmoothFn::constant(4.0).derivative().is_zero());
    }

    #[test]
    fn sine_squared_product() {
        let l = 1.0;
        let f = SmoothFn::sin(1.0, 2, l);
        let sq = f.mul(&f);
        let expected = SmoothFn::constant(0.5).add(&SmoothFn::cos(-0.5, 4, l));
        assert_eq!(sq, expected);
    }

    #[test]
    fn antiderivative_differentiates_back() {
        let l = 1.5;
        let f = SmoothFn::trig_atom(1.3, 3, Trig::Sin, 2, l)
            .add(&SmoothFn::trig_atom(-0.4, 2, Trig::Cos, 5, l))
            .add(&SmoothFn::monomial(2.0, 4));
        let back = f.antiderivative().derivative();
        for i in 0..20 {
            let x = -1.0 + 0.17 * i as f64;
            assert!((back.eval(x) - f.eval(x)).abs() < 1e-11 * (1.0 + f.eval(x).abs()));
        }
    }

    #[test]
    fn shift_by_arbitrary_amount() {
        let l = 1.0;
        let f = SmoothFn::trig_atom(1.0, 2, Trig::Sin, 3, l).add(&SmoothFn::monomial(0.5, 1));
        let g = f.shift(0.37);
        for i in 0..15 {
            let x = 0.11 * i as f64;
            assert!((g.eval(x) - f.eval(x - 0.37)).abs() < 1e-12);
        }
    }

    #[test]
    fn shift_by_one_period_is_exact_sign_flip() {
        let l = 2.3;
        for q in 1..=20 {
            let f = SmoothFn::sin(1.0, q, l);
            let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(f.shift(l), f.scaled(sign));
        }
    }

    #[test]
    #[should_panic(expected = "length scales")]
    fn mixed_scales_panic() {
        let _ = SmoothFn::sin(1.0, 1, 1.0).add(&SmoothFn::sin(1.0, 1, 2.0));
    }

    #[test]
    fn display_atoms() {
        let f = SmoothFn::sin(2f64.sqrt(), 1, 1.0);
        assert_eq!(f.to_string(), "1.4142*sin(1*pi*x/L)");
        let g = SmoothFn::monomial(1.0, 2).add(&SmoothFn::constant(-3.0));
        assert_eq!(g.to_string(), "(-3.0000 + 1.0000*x^2)");
    }
}
