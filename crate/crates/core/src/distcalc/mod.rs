//! Exact calculus on one-dimensional distributional expressions.
//!
//! An expression is a finite sum of terms `f(x) * Π θ * [δ^(k)(x - c)]`
//! where `f` is a [`SmoothFn`]. Differentiation follows the product rule
//! with `θ(x - a)' = δ(x - a)` and `θ(a - x)' = -δ(x - a)`; normalization
//! reduces every `f·δ^(k)` to constant multiples of `δ^(j)` through the
//! Leibniz identity, so `sin(kx)·δ'(x)` becomes `-k·δ(x)`.
//!
//! Products that have no meaning as distributions (two deltas at one
//! point, a delta on a step's jump) are rejected when a term is built,
//! so no operation downstream can produce one.

mod expr;
mod smooth;

pub use expr::{DeltaFactor, DistExpr, DistTerm, Orientation, Side, StepFactor};
pub use smooth::{sin_cos_pi, wavenumber, Atom, SmoothFn, Trig};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("product of two deltas at x = {location} is undefined")]
    DeltaProduct { location: f64 },
    #[error("delta at x = {location} multiplies a step that jumps there")]
    DeltaAtStepJump { location: f64 },
    #[error("delta at integration endpoint x = {location}; widen the window")]
    DeltaAtEndpoint { location: f64 },
    #[error("invalid integration window ({lo}, {hi})")]
    InvalidWindow { lo: f64, hi: f64 },
    #[error("regular part evaluated at singular point x = {location}")]
    SingularEvaluation { location: f64 },
}

pub fn differentiate(e: &DistExpr) -> DistExpr {
    e.differentiate()
}

pub fn normalize(e: &DistExpr) -> DistExpr {
    e.normalize()
}

pub fn integrate(e: &DistExpr, lo: f64, hi: f64) -> Result<f64, DistError> {
    e.integrate(lo, hi)
}

pub fn delta_coefficient(e: &DistExpr, c: f64, k: u32) -> f64 {
    e.delta_coefficient(c, k)
}

pub fn evaluate_regular(e: &DistExpr, x: f64) -> Result<f64, DistError> {
    e.evaluate_regular(x)
}

pub fn equivalent(a: &DistExpr, b: &DistExpr, tol: f64) -> bool {
    a.equivalent(b, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    const L: f64 = 1.0;

    fn window() -> (StepFactor, StepFactor) {
        (StepFactor::rising(0.0), StepFactor::falling(L))
    }

    fn psi(n: i64, l: f64) -> DistExpr {
        let g = SmoothFn::sin((2.0 / l).sqrt(), n, l);
        DistExpr::from_terms([DistTerm::regular(
            g,
            [StepFactor::rising(0.0), StepFactor::falling(l)],
        )])
    }

    #[test]
    fn heaviside_derivative_is_delta() {
        let theta = DistExpr::from_terms([DistTerm::regular(
            SmoothFn::constant(1.0),
            [StepFactor::rising(0.0)],
        )]);
        assert_eq!(theta.differentiate(), DistExpr::delta(1.0, 0.0, 0));
        let falling = DistExpr::from_terms([DistTerm::regular(
            SmoothFn::constant(1.0),
            [StepFactor::falling(2.0)],
        )]);
        assert_eq!(falling.differentiate(), DistExpr::delta(-1.0, 2.0, 0));
    }

    #[test]
    fn constant_differentiates_to_zero() {
        assert!(DistExpr::smooth(SmoothFn::constant(1.0))
            .differentiate()
            .terms()
            .is_empty());
    }

    #[test]
    fn eigenfunction_first_derivative_has_no_deltas() {
        // G(0) = G(L) = 0, so the Gδ terms of the product rule drop out.
        let d = psi(3, L).differentiate();
        assert_eq!(d.terms().len(), 1);
        assert!(!d.has_deltas());
        let (a, b) = window();
        let g = SmoothFn::sin(2f64.sqrt(), 3, L);
        assert_eq!(
            d,
            DistExpr::from_terms([DistTerm::regular(g.derivative(), [a, b])])
        );
    }

    #[test]
    fn leibniz_examples() {
        let k = wavenumber(2, L);
        let at0 = |f: SmoothFn, order| {
            DistExpr::from_terms(
                [DistTerm::new(f, [], Some(DeltaFactor::new(0.0, order))).unwrap()],
            )
            .normalize()
        };
        assert!(at0(SmoothFn::sin(1.0, 2, L), 0).terms().is_empty());
        assert_eq!(
            at0(SmoothFn::cos(1.0, 2, L), 0),
            DistExpr::delta(1.0, 0.0, 0)
        );
        assert_eq!(
            at0(SmoothFn::sin(1.0, 2, L), 1),
            DistExpr::delta(-k, 0.0, 0)
        );
        // the full identity keeps f(a)δ' when f(a) != 0
        let e = at0(SmoothFn::cos(1.0, 2, L).add(&SmoothFn::monomial(1.0, 1)), 1);
        assert_eq!(e.delta_coefficient(0.0, 1), 1.0);
        assert_eq!(e.delta_coefficient(0.0, 0), -1.0);
    }

    #[test]
    fn step_collapses_against_distant_delta() {
        let e = DistExpr::from_terms([DistTerm::new(
            SmoothFn::constant(1.0),
            [StepFactor::falling(L)],
            Some(DeltaFactor::new(0.0, 0)),
        )
        .unwrap()]);
        assert_eq!(e.normalize(), DistExpr::delta(1.0, 0.0, 0));
        let off = DistExpr::from_terms([DistTerm::new(
            SmoothFn::constant(1.0),
            [StepFactor::rising(L)],
            Some(DeltaFactor::new(0.0, 0)),
        )
        .unwrap()]);
        assert!(off.normalize().terms().is_empty());
    }

    #[test]
    fn ill_defined_products_are_rejected() {
        let err = DistTerm::new(
            SmoothFn::constant(1.0),
            [StepFactor::rising(0.5)],
            Some(DeltaFactor::new(0.5, 0)),
        );
        assert_eq!(
            err.unwrap_err(),
            DistError::DeltaAtStepJump { location: 0.5 }
        );
        let d = DistExpr::delta(1.0, 0.25, 0);
        assert_eq!(
            d.mul(&d).unwrap_err(),
            DistError::DeltaProduct { location: 0.25 }
        );
        assert!(d
            .mul(&DistExpr::delta(1.0, 0.75, 1))
            .unwrap()
            .terms()
            .is_empty());
        let theta = DistExpr::from_terms([DistTerm::regular(
            SmoothFn::constant(1.0),
            [StepFactor::rising(0.25)],
        )]);
        assert!(d.mul(&theta).is_err());
    }

    #[test]
    fn integrals() {
        let eps = 0.1;
        assert_eq!(
            DistExpr::delta(1.0, 0.0, 0).integrate(-eps, eps).unwrap(),
            1.0
        );
        assert_eq!(
            DistExpr::delta(3.0, L, 0).integrate(-eps, eps).unwrap(),
            0.0
        );
        assert_eq!(
            DistExpr::delta(3.0, 0.0, 2).integrate(-eps, eps).unwrap(),
            0.0
        );
        let p = psi(1, L);
        let density = p.mul(&p).unwrap();
        assert!((density.integrate(0.0, L).unwrap() - 1.0).abs() < 1e-14);
        assert!((density.integrate(-1.0, 2.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn integration_window_errors() {
        let d = DistExpr::delta(1.0, 0.0, 0);
        assert_eq!(
            d.integrate(0.0, 1.0).unwrap_err(),
            DistError::DeltaAtEndpoint { location: 0.0 }
        );
        assert!(matches!(
            d.integrate(1.0, -1.0),
            Err(DistError::InvalidWindow { .. })
        ));
    }

    #[test]
    fn regular_evaluation() {
        let p = psi(1, L);
        assert!((p.evaluate_regular(0.5).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(p.evaluate_regular(-0.5).unwrap(), 0.0);
        assert_eq!(
            DistExpr::delta(1.0, 0.0, 0).evaluate_regular(1.0).unwrap(),
            0.0
        );
        assert!(p.evaluate_regular(0.0).is_err());
        assert!(DistExpr::delta(1.0, 0.0, 0).evaluate_regular(0.0).is_err());
    }

    #[test]
    fn one_sided_limits() {
        let p = psi(1, L);
        let k = wavenumber(1, L);
        assert_eq!(p.regular_limit(0.0, Side::Right), 0.0);
        assert!((p.regular_derivative_limit(0.0, Side::Right) - 2f64.sqrt() * k).abs() < 1e-14);
        assert_eq!(p.regular_derivative_limit(0.0, Side::Left), 0.0);
    }

    #[test]
    fn delta_coefficient_absent_is_zero() {
        assert_eq!(psi(2, L).delta_coefficient(0.0, 0), 0.0);
    }

    #[test]
    fn equivalence_basics() {
        let p = psi(2, L);
        assert!(p.equivalent(&p, 1e-12));
        assert!(!DistExpr::delta(1.0, 0.0, 0).equivalent(&DistExpr::delta(2.0, 0.0, 0), 1e-12));
        assert!(!psi(1, L).equivalent(&psi(2, L), 1e-12));
    }

    #[test]
    fn second_derivative_matches_closed_form() {
        for n in 1..=6 {
            for l in [1.0_f64, 2.3] {
                let g = SmoothFn::sin((2.0 / l).sqrt(), n, l);
                let g1 = g.derivative();
                let (a, b) = (StepFactor::rising(0.0), StepFactor::falling(l));
                let closed = DistExpr::from_terms([
                    DistTerm::regular(g.nth_derivative(2), [a, b]),
                    DistTerm::new(g1.clone(), [b], Some(DeltaFactor::new(0.0, 0))).unwrap(),
                    DistTerm::new(g1.scaled(-1.0), [a], Some(DeltaFactor::new(l, 0))).unwrap(),
                ])
                .normalize();
                let twice = psi(n, l).differentiate().differentiate();
                assert!(twice.equivalent(&closed, 1e-12), "n={n} L={l}");
            }
        }
    }

    #[test]
    fn step_interval_reduction() {
        let e = DistExpr::from_terms([DistTerm::regular(
            SmoothFn::constant(1.0),
            [
                StepFactor::rising(0.0),
                StepFactor::rising(0.3),
                StepFactor::falling(1.0),
                StepFactor::falling(0.8),
            ],
        )]);
        let n = e.normalize();
        assert_eq!(
            n.terms()[0].steps(),
            &[StepFactor::rising(0.3), StepFactor::falling(0.8)]
        );
        let empty = DistExpr::from_terms([DistTerm::regular(
            SmoothFn::constant(1.0),
            [StepFactor::rising(1.0), StepFactor::falling(1.0)],
        )]);
        assert!(empty.normalize().terms().is_empty());
    }

    #[test]
    fn pretty_printer() {
        assert_eq!(psi(1, L).to_string(), "1.4142*sin(1*pi*x/L) * H(x)*H(L-x)");
        let mixed = psi(1, L) + DistExpr::delta(2f64.sqrt(), 0.0, 0) + DistExpr::delta(-1.0, L, 1);
        assert_eq!(
            mixed.normalize().to_string(),
            "1.4142 * d0(x-0)\n-1.0000 * d1(x-L)\n1.4142*sin(1*pi*x/L) * H(x)*H(L-x)"
        );
        assert_eq!(DistExpr::zero().to_string(), "0");
    }
}
