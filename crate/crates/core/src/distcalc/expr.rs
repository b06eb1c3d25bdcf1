use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::smooth::SmoothFn;
use super::DistError;

fn canonical_location(a: f64) -> f64 {
    assert!(a.is_finite(), "singular locations must be finite, got {a}");
    // folds -0.0 into +0.0
    a + 0.0
}

/// Which side of its jump a Heaviside factor is switched on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orientation {
    /// `θ(x - a)`
    Rising,
    /// `θ(a - x)`
    Falling,
}

/// One-sided limit direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A Heaviside factor `θ(x - a)` or `θ(a - x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepFactor {
    orientation: Orientation,
    location: f64,
}

impl StepFactor {
    pub fn rising(a: f64) -> Self {
        Self {
            orientation: Orientation::Rising,
            location: canonical_location(a),
        }
    }

    pub fn falling(a: f64) -> Self {
        Self {
            orientation: Orientation::Falling,
            location: canonical_location(a),
        }
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn location(&self) -> f64 {
        self.location
    }

    /// Value away from the jump. Panics if `x` is the jump point.
    pub fn value(&self, x: f64) -> f64 {
        assert!(x != self.location, "step evaluated at its jump");
        let on = match self.orientation {
            Orientation::Rising => x > self.location,
            Orientation::Falling => x < self.location,
        };
        if on {
            1.0
        } else {
            0.0
        }
    }

    pub fn limit(&self, x: f64, side: Side) -> f64 {
        if x != self.location {
            return self.value(x);
        }
        match (self.orientation, side) {
            (Orientation::Rising, Side::Right) | (Orientation::Falling, Side::Left) => 1.0,
            _ => 0.0,
        }
    }

    /// Distributional derivative as `(sign, delta location)`.
    fn derivative(&self) -> (f64, f64) {
        match self.orientation {
            Orientation::Rising => (1.0, self.location),
            Orientation::Falling => (-1.0, self.location),
        }
    }
}

impl Eq for StepFactor {}

impl Ord for StepFactor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.orientation
            .cmp(&other.orientation)
            .then(self.location.total_cmp(&other.location))
    }
}

impl PartialOrd for StepFactor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `δ^(order)(x - location)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaFactor {
    location: f64,
    order: u32,
}

impl DeltaFactor {
    pub fn new(location: f64, order: u32) -> Self {
        Self {
            location: canonical_location(location),
            order,
        }
    }

    pub fn location(&self) -> f64 {
        self.location
    }

    pub fn order(&self) -> u32 {
        self.order
    }
}

impl Eq for DeltaFactor {}

impl Ord for DeltaFactor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.location
            .total_cmp(&other.location)
            .then(self.order.cmp(&other.order))
    }
}

impl PartialOrd for DeltaFactor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `smooth * Π steps * [delta]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistTerm {
    smooth: SmoothFn,
    steps: Vec<StepFactor>,
    delta: Option<DeltaFactor>,
}

type SingularKey = (Vec<StepFactor>, Option<DeltaFactor>);

impl DistTerm {
    /// Build a term, rejecting a delta sitting on a step's jump.
    /// Repeated step factors collapse (`θ² = θ`).
    pub fn new(
        smooth: SmoothFn,
        steps: impl IntoIterator<Item = StepFactor>,
        delta: Option<DeltaFactor>,
    ) -> Result<Self, DistError> {
        let mut steps: Vec<StepFactor> = steps.into_iter().collect();
        steps.sort();
        steps.dedup();
        if let Some(d) = delta {
            if steps.iter().any(|s| s.location == d.location) {
                return Err(DistError::DeltaAtStepJump {
                    location: d.location,
                });
            }
        }
        Ok(Self {
            smooth,
            steps,
            delta,
        })
    }

    pub fn regular(smooth: SmoothFn, steps: impl IntoIterator<Item = StepFactor>) -> Self {
        Self::new(smooth, steps, None).expect("delta-free terms are always well formed")
    }

    pub fn smooth(&self) -> &SmoothFn {
        &self.smooth
    }

    pub fn steps(&self) -> &[StepFactor] {
        &self.steps
    }

    pub fn delta(&self) -> Option<DeltaFactor> {
        self.delta
    }

    fn key(&self) -> SingularKey {
        (self.steps.clone(), self.delta)
    }

    fn steps_limit(&self, x: f64, side: Side) -> f64 {
        self.steps.iter().map(|s| s.limit(x, side)).product()
    }

    /// Product of two terms. Deltas at distinct points annihilate; at the
    /// same point, or on a step jump, the product is rejected.
    pub fn mul(&self, other: &DistTerm) -> Result<Option<DistTerm>, DistError> {
        let delta = match (self.delta, other.delta) {
            (Some(a), Some(b)) if a.location == b.location => {
                return Err(DistError::DeltaProduct {
                    location: a.location,
                })
            }
            (Some(_), Some(_)) => return Ok(None),
            (d, None) | (None, d) => d,
        };
        let steps = self.steps.iter().chain(other.steps.iter()).copied();
        DistTerm::new(self.smooth.mul(&other.smooth), steps, delta).map(Some)
    }

    /// Apply the rewrite rules to a single term; an identically zero term
    /// reduces to nothing.
    fn reduced(&self) -> Vec<DistTerm> {
        if self.smooth.is_zero() {
            return Vec::new();
        }
        match self.delta {
            Some(d) => {
                // steps away from the delta collapse to their constant values
                if self.steps.iter().any(|s| s.value(d.location) == 0.0) {
                    return Vec::new();
                }
                // f δ^(k)(x-a) = Σ_j (-1)^j C(k,j) f^(j)(a) δ^(k-j)(x-a)
                let k = d.order;
                let mut out = Vec::new();
                let mut deriv = self.smooth.clone();
                let mut binom = 1.0;
                for j in 0..=k {
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    let c = sign * binom * deriv.eval(d.location);
                    if c != 0.0 {
                        out.push(DistTerm {
                            smooth: SmoothFn::constant(c),
                            steps: Vec::new(),
                            delta: Some(DeltaFactor::new(d.location, k - j)),
                        });
                    }
                    deriv = deriv.derivative();
                    binom = binom * f64::from(k - j) / f64::from(j + 1);
                }
                out
            }
            None => {
                let rise = self
                    .steps
                    .iter()
                    .filter(|s| s.orientation == Orientation::Rising)
                    .map(|s| s.location)
                    .reduce(f64::max);
                let fall = self
                    .steps
                    .iter()
                    .filter(|s| s.orientation == Orientation::Falling)
                    .map(|s| s.location)
                    .reduce(f64::min);
                if let (Some(r), Some(f)) = (rise, fall) {
                    if r >= f {
                        return Vec::new();
                    }
                }
                let steps = rise
                    .map(StepFactor::rising)
                    .into_iter()
                    .chain(fall.map(StepFactor::falling))
                    .collect();
                vec![DistTerm {
                    smooth: self.smooth.clone(),
                    steps,
                    delta: None,
                }]
            }
        }
    }

    /// Derivative of a reduced term (delta terms carry no steps).
    fn derivative(&self) -> Vec<DistTerm> {
        let mut out = Vec::new();
        if let Some(d) = self.delta {
            debug_assert!(self.steps.is_empty());
            out.push(DistTerm {
                smooth: self.smooth.clone(),
                steps: Vec::new(),
                delta: Some(DeltaFactor::new(d.location, d.order + 1)),
            });
            let ds = self.smooth.derivative();
            if !ds.is_zero() {
                out.push(DistTerm {
                    smooth: ds,
                    steps: Vec::new(),
                    delta: Some(d),
                });
            }
            return out;
        }
        out.push(DistTerm {
            smooth: self.smooth.derivative(),
            steps: self.steps.clone(),
            delta: None,
        });
        for (i, step) in self.steps.iter().enumerate() {
            let (sign, at) = step.derivative();
            let others = self
                .steps
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, s)| *s);
            out.push(
                DistTerm::new(
                    self.smooth.scaled(sign),
                    others,
                    Some(DeltaFactor::new(at, 0)),
                )
                .expect("reduced terms have distinct step locations"),
            );
        }
        out
    }
}

/// A finite sum of distributional terms.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DistExpr {
    terms: Vec<DistTerm>,
}

impl DistExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = DistTerm>) -> Self {
        Self {
            terms: terms.into_iter().collect(),
        }
    }

    pub fn smooth(f: SmoothFn) -> Self {
        Self::from_terms([DistTerm::regular(f, [])])
    }

    /// `c * δ^(order)(x - location)`.
    pub fn delta(c: f64, location: f64, order: u32) -> Self {
        Self::from_terms([DistTerm {
            smooth: SmoothFn::constant(c),
            steps: Vec::new(),
            delta: Some(DeltaFactor::new(location, order)),
        }])
    }

    pub fn terms(&self) -> &[DistTerm] {
        &self.terms
    }

    /// True when no term survives normalization.
    pub fn is_zero(&self) -> bool {
        self.normalize().terms.is_empty()
    }

    /// The length scale shared by the smooth factors, if any.
    pub fn length_scale(&self) -> Option<f64> {
        self.terms.iter().find_map(|t| t.smooth.scale())
    }

    pub fn scaled(&self, s: f64) -> DistExpr {
        DistExpr {
            terms: self
                .terms
                .iter()
                .map(|t| DistTerm {
                    smooth: t.smooth.scaled(s),
                    ..t.clone()
                })
                .collect(),
        }
    }

    pub fn mul(&self, other: &DistExpr) -> Result<DistExpr, DistError> {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                if let Some(t) = a.mul(b)? {
                    terms.push(t);
                }
            }
        }
        Ok(DistExpr { terms })
    }

    pub fn mul_smooth(&self, f: &SmoothFn) -> DistExpr {
        DistExpr {
            terms: self
                .terms
                .iter()
                .map(|t| DistTerm {
                    smooth: t.smooth.mul(f),
                    ..t.clone()
                })
                .collect(),
        }
    }

    /// Rewrite to normal form: Leibniz reduction of `f·δ^(k)`, collapse of
    /// steps against deltas, step-interval reduction, merging of like
    /// terms and removal of zero terms. Terms come out in a fixed order.
    pub fn normalize(&self) -> DistExpr {
        let mut merged: BTreeMap<SingularKey, SmoothFn> = BTreeMap::new();
        for term in self.terms.iter().flat_map(DistTerm::reduced) {
            let slot = merged.entry(term.key()).or_default();
            *slot = slot.add(&term.smooth);
        }
        DistExpr {
            terms: merged
                .into_iter()
                .filter(|(_, f)| !f.is_zero())
                .map(|((steps, delta), smooth)| DistTerm {
                    smooth,
                    steps,
                    delta,
                })
                .collect(),
        }
    }

    /// Distributional derivative, normalized.
    pub fn differentiate(&self) -> DistExpr {
        let reduced = self.normalize();
        DistExpr {
            terms: reduced
                .terms
                .iter()
                .flat_map(DistTerm::derivative)
                .collect(),
        }
        .normalize()
    }

    pub fn nth_derivative(&self, order: u32) -> DistExpr {
        (0..order).fold(self.normalize(), |e, _| e.differentiate())
    }

    /// Locations of every step jump and delta, sorted and deduplicated.
    pub fn singular_points(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .terms
            .iter()
            .flat_map(|t| {
                t.steps
                    .iter()
                    .map(|s| s.location)
                    .chain(t.delta.map(|d| d.location))
            })
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    fn delta_points(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .terms
            .iter()
            .filter_map(|t| t.delta.map(|d| d.location))
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// The delta-free part of the expression.
    pub fn regular_part(&self) -> DistExpr {
        DistExpr {
            terms: self
                .terms
                .iter()
                .filter(|t| t.delta.is_none())
                .cloned()
                .collect(),
        }
    }

    pub fn has_deltas(&self) -> bool {
        self.terms.iter().any(|t| t.delta.is_some())
    }

    /// Definite integral over `(lo, hi)`. Deltas must not sit on an endpoint.
    pub fn integrate(&self, lo: f64, hi: f64) -> Result<f64, DistError> {
        if lo >= hi || !lo.is_finite() || !hi.is_finite() {
            return Err(DistError::InvalidWindow { lo, hi });
        }
        if let Some(&at) = self.delta_points().iter().find(|&&c| c == lo || c == hi) {
            return Err(DistError::DeltaAtEndpoint { location: at });
        }
        let mut total = 0.0;
        for term in &self.normalize().terms {
            match term.delta {
                Some(d) => {
                    if d.order == 0 && lo < d.location && d.location < hi {
                        total += term.smooth.eval(d.location);
                    }
                }
                None => {
                    let mut a = lo;
                    let mut b = hi;
                    for s in &term.steps {
                        match s.orientation {
                            Orientation::Rising => a = a.max(s.location),
                            Orientation::Falling => b = b.min(s.location),
                        }
                    }
                    if a < b {
                        let anti = term.smooth.antiderivative();
                        total += anti.eval(b) - anti.eval(a);
                    }
                }
            }
        }
        Ok(total)
    }

    /// Coefficient of `δ^(order)(x - location)` in a normalized expression.
    pub fn delta_coefficient(&self, location: f64, order: u32) -> f64 {
        let location = canonical_location(location);
        self.terms
            .iter()
            .filter(|t| t.steps.is_empty())
            .filter(|t| {
                t.delta
                    .is_some_and(|d| d.location == location && d.order == order)
            })
            .map(|t| t.smooth.eval(location))
            .sum()
    }

    /// Value of the regular part at a non-singular point.
    pub fn evaluate_regular(&self, x: f64) -> Result<f64, DistError> {
        if self.singular_points().contains(&canonical_location(x)) {
            return Err(DistError::SingularEvaluation { location: x });
        }
        Ok(self
            .terms
            .iter()
            .filter(|t| t.delta.is_none())
            .map(|t| t.smooth.eval(x) * t.steps.iter().map(|s| s.value(x)).product::<f64>())
            .sum())
    }

    /// One-sided limit of the regular part at `x`.
    pub fn regular_limit(&self, x: f64, side: Side) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.delta.is_none())
            .map(|t| t.smooth.eval(x) * t.steps_limit(x, side))
            .sum()
    }

    /// One-sided limit of the derivative of the regular part at `x`.
    pub fn regular_derivative_limit(&self, x: f64, side: Side) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.delta.is_none())
            .map(|t| t.smooth.derivative().eval(x) * t.steps_limit(x, side))
            .sum()
    }

    /// Largest absolute coefficient over all terms.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .fold(0.0, |m, t| m.max(t.smooth.max_abs_coefficient()))
    }

    /// Deterministic sample points avoiding every singular location.
    pub fn sample_grid(&self, other: &DistExpr) -> Vec<f64> {
        let mut pts = self.singular_points();
        pts.extend(other.singular_points());
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let (lo, hi) = match (pts.first(), pts.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => (-1.0, 1.0),
        };
        let pad = 0.25 * (hi - lo).max(1.0);
        let (lo, hi) = (lo - pad, hi + pad);
        const SAMPLES: usize = 97;
        // irrational offset keeps samples off round numbers
        const OFFSET: f64 = 0.414_213_562_373_095_1;
        let step = (hi - lo) / SAMPLES as f64;
        (0..SAMPLES)
            .map(|i| lo + (i as f64 + OFFSET) * step)
            .filter(|x| pts.iter().all(|p| (x - p).abs() > 1e-9 * (1.0 + p.abs())))
            .collect()
    }

    /// Structural and pointwise equivalence within a relative tolerance.
    pub fn equivalent(&self, other: &DistExpr, tol: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs());
        let (a, b) = (self.normalize(), other.normalize());
        let deltas = |e: &DistExpr| -> BTreeMap<DeltaFactor, f64> {
            let mut m = BTreeMap::new();
            for t in e.terms.iter().filter(|t| t.delta.is_some()) {
                let d = t.delta.unwrap();
                *m.entry(d).or_insert(0.0) += t.smooth.eval(d.location);
            }
            m
        };
        let (da, db) = (deltas(&a), deltas(&b));
        let delta_match = da.keys().chain(db.keys()).all(|k| {
            close(
                da.get(k).copied().unwrap_or(0.0),
                db.get(k).copied().unwrap_or(0.0),
            )
        });
        delta_match
            && a.sample_grid(&b).into_iter().all(|x| {
                match (a.evaluate_regular(x), b.evaluate_regular(x)) {
                    (Ok(u), Ok(v)) => close(u, v),
                    _ => false,
                }
            })
    }
}

impl Add for DistExpr {
    type Output = DistExpr;

    fn add(mut self, rhs: DistExpr) -> DistExpr {
        self.terms.extend(rhs.terms);
        self
    }
}

impl Sub for DistExpr {
    type Output = DistExpr;

    fn sub(self, rhs: DistExpr) -> DistExpr {
        self + rhs.scaled(-1.0)
    }
}

impl Neg for DistExpr {
    type Output = DistExpr;

    fn neg(self) -> DistExpr {
        self.scaled(-1.0)
    }
}

impl Mul<DistExpr> for f64 {
    type Output = DistExpr;

    fn mul(self, rhs: DistExpr) -> DistExpr {
        rhs.scaled(self)
    }
}

fn format_location(a: f64, length: Option<f64>) -> String {
    if Some(a) == length {
        "L".to_string()
    } else {
        a.to_string()
    }
}

fn format_step(s: &StepFactor, length: Option<f64>) -> String {
    let loc = format_location(s.location, length);
    match s.orientation {
        Orientation::Rising if s.location == 0.0 => "H(x)".to_string(),
        Orientation::Rising if s.location < 0.0 && Some(s.location) != length => {
            format!("H(x+{})", -s.location)
        }
        Orientation::Rising => format!("H(x-{loc})"),
        Orientation::Falling if s.location == 0.0 => "H(-x)".to_string(),
        Orientation::Falling => format!("H({loc}-x)"),
    }
}

fn format_delta(d: &DeltaFactor, length: Option<f64>) -> String {
    if d.location < 0.0 && Some(d.location) != length {
        format!("d{}(x+{})", d.order, -d.location)
    } else {
        format!("d{}(x-{})", d.order, format_location(d.location, length))
    }
}

/// One term per line, e.g. `1.4142*sin(1*pi*x/L) * H(x)*H(L-x)`.
impl fmt::Display for DistExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let length = self.length_scale();
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", t.smooth)?;
            if !t.steps.is_empty() {
                let steps: Vec<String> = t.steps.iter().map(|s| format_step(s, length)).collect();
                write!(f, " * {}", steps.join("*"))?;
            }
            if let Some(d) = &t.delta {
                write!(f, " * {}", format_delta(d, length))?;
            }
        }
        Ok(())
    }
}
