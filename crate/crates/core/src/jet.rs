//! Points of the 1-jet space `J1(R, M4)` and the temporal Riemannian metric
//! `h11(t)` on the time axis.

use std::fmt;

use crate::error::{GeometryError, Result};

/// Number of spatial dimensions of the base manifold.
pub const DIM: usize = 4;

/// A point `(t, x^1..x^4, y_1^1..y_1^4)` of the jet space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JetPoint {
    pub t: f64,
    pub x: [f64; DIM],
    pub y: [f64; DIM],
}

impl JetPoint {
    pub fn new(t: f64, x: [f64; DIM], y: [f64; DIM]) -> Result<Self> {
        let p = JetPoint { t, x, y };
        if p.is_finite() {
            Ok(p)
        } else {
            Err(GeometryError::Domain(format!("non-finite jet coordinates {p}")))
        }
    }

    /// Point at the origin of `t` and `x` with the given fiber velocities.
    pub fn from_velocity(y: [f64; DIM]) -> Self {
        JetPoint { t: 0.0, x: [0.0; DIM], y }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite()
            && self.x.iter().all(|v| v.is_finite())
            && self.y.iter().all(|v| v.is_finite())
    }

    /// Same point with every fiber coordinate multiplied by `lambda`.
    pub fn scale_velocity(&self, lambda: f64) -> Self {
        let mut q = *self;
        q.y.iter_mut().for_each(|v| *v *= lambda);
        q
    }
}

impl fmt::Display for JetPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(t={}, x=[{}, {}, {}, {}], y=[{}, {}, {}, {}])",
            self.t, self.x[0], self.x[1], self.x[2], self.x[3], self.y[0], self.y[1], self.y[2],
            self.y[3]
        )
    }
}

/// Closed-form families for the Riemannian metric `h11(t)` of the time axis.
///
/// Only families with exact first and second derivatives are offered, so the
/// Christoffel scalar and its time derivative are available without
/// numerical differentiation.
#[derive(Debug, Clone, PartialEq)]
pub enum TemporalMetric {
    /// `h11 = c`, `c > 0`.
    Constant(f64),
    /// `h11 = exp(2 a t)`.
    Exponential(f64),
    /// `h11 = c0 + c1 t + c2 t^2 + ...`; must be positive where evaluated.
    Polynomial(Vec<f64>),
}

impl TemporalMetric {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(GeometryError::Domain(format!(
                "constant temporal metric needs c > 0, got {c}"
            )));
        }
        Ok(TemporalMetric::Constant(c))
    }

    pub fn exponential(a: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(GeometryError::Domain(format!("non-finite rate {a}")));
        }
        Ok(TemporalMetric::Exponential(a))
    }

    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(GeometryError::Domain(
                "polynomial temporal metric needs finite coefficients".into(),
            ));
        }
        Ok(TemporalMetric::Polynomial(coefficients))
    }

    /// `(h11, dh11/dt, d2h11/dt2)` at `t`, without the positivity check.
    fn jet(&self, t: f64) -> (f64, f64, f64) {
        match self {
            TemporalMetric::Constant(c) => (*c, 0.0, 0.0),
            TemporalMetric::Exponential(a) => {
                let h = (2.0 * a * t).exp();
                (h, 2.0 * a * h, 4.0 * a * a * h)
            }
            TemporalMetric::Polynomial(c) => {
                // Horner for the value and both derivatives.
                let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
                for &coef in c.iter().rev() {
                    ddp = ddp * t + 2.0 * dp;
                    dp = dp * t + p;
                    p = p * t + coef;
                }
                (p, dp, ddp)
            }
        }
    }

    /// `h11(t)`, failing with a domain error when it is not positive.
    pub fn h_lower(&self, t: f64) -> Result<f64> {
        let (h, _, _) = self.jet(t);
        if h.is_finite() && h > 0.0 {
            Ok(h)
        } else {
            Err(GeometryError::Domain(format!(
                "temporal metric h11({t}) = {h} is not positive"
            )))
        }
    }

    /// `h^11 = 1 / h11`.
    pub fn h_upper(&self, t: f64) -> Result<f64> {
        Ok(1.0 / self.h_lower(t)?)
    }

    /// `dh11/dt`.
    pub fn dh_lower(&self, t: f64) -> Result<f64> {
        self.h_lower(t)?;
        Ok(self.jet(t).1)
    }

    /// `d h^11 / dt = -h11' / h11^2`.
    pub fn dh_upper(&self, t: f64) -> Result<f64> {
        let h = self.h_lower(t)?;
        Ok(-self.jet(t).1 / (h * h))
    }

    /// Christoffel scalar `kappa = (h^11 / 2) dh11/dt` and its time derivative.
    pub fn kappa(&self, t: f64) -> Result<(f64, f64)> {
        temporal_kappa(self, t)
    }

    /// Checks positivity of `h11` on a uniform grid over `[lo, hi]`.
    pub fn check_positive_on(&self, lo: f64, hi: f64, points: usize) -> Result<()> {
        let n = points.max(2);
        (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .try_for_each(|t| self.h_lower(t).map(|_| ()))
    }
}

/// Christoffel scalar `kappa^1_11` of `h11` at `t` and its exact derivative.
pub fn temporal_kappa(h: &TemporalMetric, t: f64) -> Result<(f64, f64)> {
    let h11 = h.h_lower(t)?;
    match h {
        TemporalMetric::Constant(_) => Ok((0.0, 0.0)),
        TemporalMetric::Exponential(a) => Ok((*a, 0.0)),
        TemporalMetric::Polynomial(_) => {
            let (_, dh, ddh) = h.jet(t);
            let kappa = dh / (2.0 * h11);
            let dkappa = (ddh * h11 - dh * dh) / (2.0 * h11 * h11);
            Ok((kappa, dkappa))
        }
    }
}
