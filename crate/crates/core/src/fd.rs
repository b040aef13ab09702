//! Central finite-difference oracles over jet coordinates.
//!
//! First derivatives use the step `eps^(1/3) * max(1, |v|)`, second
//! derivatives `eps^(1/4) * max(1, |v|)`; both are the error-balancing
//! choices for the corresponding central stencils.

use nalgebra::Matrix4;

use crate::error::{GeometryError, Result};
use crate::jet::{JetPoint, DIM};

/// Coordinate direction on the jet space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    T,
    X(usize),
    Y(usize),
}

impl Axis {
    pub fn coordinate(self, p: &JetPoint) -> f64 {
        match self {
            Axis::T => p.t,
            Axis::X(i) => p.x[i],
            Axis::Y(i) => p.y[i],
        }
    }

    pub fn with_coordinate(self, p: &JetPoint, v: f64) -> JetPoint {
        let mut q = *p;
        match self {
            Axis::T => q.t = v,
            Axis::X(i) => q.x[i] = v,
            Axis::Y(i) => q.y[i] = v,
        }
        q
    }
}

pub fn first_order_step(v: f64) -> f64 {
    f64::EPSILON.cbrt() * v.abs().max(1.0)
}

pub fn second_order_step(v: f64) -> f64 {
    f64::EPSILON.powf(0.25) * v.abs().max(1.0)
}

/// Offsets `v + k h` are rounded to representable numbers; the returned
/// effective step is what the stencil actually spans.
fn stencil(v: f64, h: f64) -> (f64, f64, f64) {
    let plus = v + h;
    let minus = v - h;
    (plus, minus, (plus - minus) / 2.0)
}

fn at_stencil<T>(f: &impl Fn(&JetPoint) -> Result<T>, q: &JetPoint) -> Result<T> {
    f(q).map_err(|e| match e {
        GeometryError::Oracle(_) => e,
        other => GeometryError::Oracle(format!("stencil point {q}: {other}")),
    })
}

/// Central first difference of a vector-valued field along `axis`.
pub fn central_diff_vec<F>(f: F, p: &JetPoint, axis: Axis) -> Result<Vec<f64>>
where
    F: Fn(&JetPoint) -> Result<Vec<f64>>,
{
    let v = axis.coordinate(p);
    let (plus, minus, h) = stencil(v, first_order_step(v));
    let fp = at_stencil(&f, &axis.with_coordinate(p, plus))?;
    let fm = at_stencil(&f, &axis.with_coordinate(p, minus))?;
    debug_assert_eq!(fp.len(), fm.len());
    Ok(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
}

/// `d f / d axis` (order 1) or `d2 f / d axis2` (order 2) by central differences.
pub fn fd_partial<F>(f: F, p: &JetPoint, axis: Axis, order: u8) -> Result<f64>
where
    F: Fn(&JetPoint) -> Result<f64>,
{
    match order {
        1 => central_diff_vec(|q| f(q).map(|v| vec![v]), p, axis).map(|v| v[0]),
        2 => {
            let v = axis.coordinate(p);
            let (plus, minus, h) = stencil(v, second_order_step(v));
            let center = f(p)?;
            let fp = at_stencil(&f, &axis.with_coordinate(p, plus))?;
            let fm = at_stencil(&f, &axis.with_coordinate(p, minus))?;
            Ok((fp - 2.0 * center + fm) / (h * h))
        }
        _ => Err(GeometryError::Parameter(format!(
            "finite-difference order must be 1 or 2, got {order}"
        ))),
    }
}

/// Mixed second derivative from the 4-point stencil
/// `[f(++) - f(+-) - f(-+) + f(--)] / (4 ha hb)`.
pub fn fd_mixed<F>(f: F, p: &JetPoint, a: Axis, b: Axis) -> Result<f64>
where
    F: Fn(&JetPoint) -> Result<f64>,
{
    if a == b {
        return fd_partial(f, p, a, 2);
    }
    let ha = second_order_step(a.coordinate(p));
    let hb = second_order_step(b.coordinate(p));
    mixed_with_steps(&f, p, a, b, ha, hb)
}

fn mixed_with_steps<F>(f: &F, p: &JetPoint, a: Axis, b: Axis, ha: f64, hb: f64) -> Result<f64>
where
    F: Fn(&JetPoint) -> Result<f64>,
{
    let (ap, am, ha) = stencil(a.coordinate(p), ha);
    if a == b {
        let center = f(p)?;
        let fp = at_stencil(f, &a.with_coordinate(p, ap))?;
        let fm = at_stencil(f, &a.with_coordinate(p, am))?;
        return Ok((fp - 2.0 * center + fm) / (ha * ha));
    }
    let (bp, bm, hb) = stencil(b.coordinate(p), hb);
    let eval = |x: f64, y: f64| at_stencil(f, &b.with_coordinate(&a.with_coordinate(p, x), y));
    let pp = eval(ap, bp)?;
    let pm = eval(ap, bm)?;
    let mp = eval(am, bp)?;
    let mm = eval(am, bm)?;
    Ok((pp - pm - mp + mm) / (4.0 * ha * hb))
}

fn hessian_with_steps<F>(f: &F, p: &JetPoint, steps: &[f64; DIM]) -> Result<Matrix4<f64>>
where
    F: Fn(&JetPoint) -> Result<f64>,
{
    let mut hess = Matrix4::zeros();
    for i in 0..DIM {
        for j in i..DIM {
            let v = mixed_with_steps(f, p, Axis::Y(i), Axis::Y(j), steps[i], steps[j])?;
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok(hess)
}

/// Hessian of a scalar field in the fiber coordinates.
///
/// Steps are `eps^(1/4) max(1, |y^i|)`. When the field bends on a shorter
/// scale `|grad f| / |hess f|` (near a zero of a root metric), the steps are
/// shrunk to that scale and the Hessian is re-evaluated.
pub fn fd_hessian_y<F>(f: F, p: &JetPoint) -> Result<Matrix4<f64>>
where
    F: Fn(&JetPoint) -> Result<f64>,
{
    let wide: [f64; DIM] = std::array::from_fn(|i| p.y[i].abs().max(1.0));
    let pilot = hessian_with_steps(&f, p, &wide.map(|w| f64::EPSILON.powf(0.25) * w))?;
    let mut grad2 = 0.0;
    for i in 0..DIM {
        grad2 += fd_partial(&f, p, Axis::Y(i), 1)?.powi(2);
    }
    let bend = pilot.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let scale = grad2.sqrt() / bend;
    if !(scale.is_finite() && scale > 0.0) || wide.iter().all(|w| *w <= scale) {
        return Ok(pilot);
    }
    hessian_with_steps(&f, p, &wide.map(|w| f64::EPSILON.powf(0.25) * w.min(scale)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_field_second_derivative_vanishes() {
        let p = JetPoint::from_velocity([0.3, -1.2, 1.7, 0.9]);
        for i in 0..DIM {
            let d2 = fd_partial(|q: &JetPoint| Ok(q.y[i]), &p, Axis::Y(i), 2).unwrap();
            assert!(d2.abs() < 1e-8);
            let d1 = fd_partial(|q: &JetPoint| Ok(q.y[i]), &p, Axis::Y(i), 1).unwrap();
            assert!((d1 - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn polynomial_mixed_derivative() {
        // f = t^2 x1 y3^3: d2f/dx1 dy3 = 3 t^2 y3^2
        let f = |q: &JetPoint| Ok(q.t * q.t * q.x[0] * q.y[2].powi(3));
        let p = JetPoint::new(0.5, [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.5, 0.0]).unwrap();
        let m = fd_mixed(f, &p, Axis::X(0), Axis::Y(2)).unwrap();
        assert!((m - 3.0 * 0.25 * 2.25).abs() < 1e-6);
        let dt = fd_partial(f, &p, Axis::T, 1).unwrap();
        assert!((dt - 2.0 * 0.5 * 1.5f64.powi(3)).abs() < 1e-9);
    }

    #[test]
    fn stencil_failure_becomes_oracle_error() {
        let f = |q: &JetPoint| {
            if q.y[0] > 1.0 {
                Err(GeometryError::Domain("outside".into()))
            } else {
                Ok(q.y[0])
            }
        };
        let p = JetPoint::from_velocity([1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            fd_partial(f, &p, Axis::Y(0), 1),
            Err(GeometryError::Oracle(_))
        ));
        assert!(fd_partial(f, &p, Axis::Y(0), 3).is_err());
    }
}
