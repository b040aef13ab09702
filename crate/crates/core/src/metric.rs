//! The Finsler function `F = sqrt(h^11) * S_111^(1/3)` and its fundamental
//! metric tensor `g_ij = (h11 / 2) d2(F^2) / dy^i dy^j`.
//!
//! Fractional powers of `S_111` are taken through the real cube root
//! `c = cbrt(S_111)`, so `S^(k/3) = c^k` on both sheets `S_111 > 0` and
//! `S_111 < 0`.

use nalgebra::Matrix4;

use crate::algebra::{contract_cubic, cubic_point, CubicContractions, CubicPoint};
use crate::error::{GeometryError, Result};
use crate::fd::fd_hessian_y;
use crate::jet::{JetPoint, TemporalMetric, DIM};
use crate::structure::MRootStructure;
use crate::tensor::{Array3, Array4};

#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalMetric {
    pub g_low: Matrix4<f64>,
    pub g_up: Matrix4<f64>,
    /// `F`; for the quadratic preset the signed root of `F_squared`.
    pub f_value: f64,
    /// `F^2`; for the quadratic preset the Lagrangian `h^11 Q(y)`.
    pub f_squared: f64,
}

/// `Q(y) = sum_{i<j} y^i y^j`, the quadratic form of the `F_[2]` preset.
pub fn quadratic_form(y: &[f64; DIM]) -> f64 {
    let mut q = 0.0;
    for i in 0..DIM {
        for j in i + 1..DIM {
            q += y[i] * y[j];
        }
    }
    q
}

/// `(F, F^2)` at `p`.
pub fn finsler_value(
    metric: &MRootStructure,
    h: &TemporalMetric,
    p: &JetPoint,
) -> Result<(f64, f64)> {
    let h_up = h.h_upper(p.t)?;
    if metric.is_cubic() {
        let s = contract_cubic(metric, p)?.s111;
        if !(s.abs() > metric.floor()) {
            return Err(GeometryError::Degenerate {
                quantity: "S_111",
                value: s,
                floor: metric.floor(),
                point: *p,
            });
        }
        let f = h_up.sqrt() * s.cbrt();
        Ok((f, f * f))
    } else {
        let l = h_up * quadratic_form(&p.y);
        Ok((l.signum() * l.abs().sqrt(), l))
    }
}

/// `g_ij = (c^-1 / 3) [S_ij1 - S_i11 S_j11 / (3 S_111)]`.
pub fn metric_general(c: &CubicContractions) -> Matrix4<f64> {
    let cr = c.s111.cbrt();
    let mut g = Matrix4::zeros();
    for i in 0..DIM {
        for j in i..DIM {
            let v = (c.sij1[(i, j)] - c.si11[i] * c.si11[j] / (3.0 * c.s111)) / (3.0 * cr);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// `g^jk = 3 c [S^{jk1} + S_1^j S_1^k / (3 (S_111 - bold S_111))]`.
pub fn inverse_general(cp: &CubicPoint, floor: f64, p: &JetPoint) -> Result<Matrix4<f64>> {
    let c = &cp.contractions;
    let d = &cp.duals;
    let gap = c.s111 - d.bold_s111;
    if !(gap.abs() > floor) {
        return Err(GeometryError::SingularMetric {
            point: *p,
            reason: format!("S_111 - bold S_111 = {gap:e}"),
        });
    }
    let cr = c.s111.cbrt();
    let mut g_up = Matrix4::zeros();
    for j in 0..DIM {
        for k in j..DIM {
            let v = 3.0 * cr * (d.sjk1_up[(j, k)] + d.s1_up[j] * d.s1_up[k] / (3.0 * gap));
            g_up[(j, k)] = v;
            g_up[(k, j)] = v;
        }
    }
    if g_up.iter().any(|v| !v.is_finite()) {
        return Err(GeometryError::SingularMetric {
            point: *p,
            reason: "non-finite inverse".into(),
        });
    }
    Ok(g_up)
}

/// Piecewise Chernov form of `g_ij`.
pub fn chernov_metric_closed(c: &CubicContractions, y: &[f64; DIM]) -> Matrix4<f64> {
    let cr = c.s111.cbrt();
    let mut g = Matrix4::zeros();
    for i in 0..DIM {
        for j in 0..DIM {
            g[(i, j)] = if i == j {
                -c.si11[i] * c.si11[i] / (9.0 * cr.powi(4))
            } else {
                (2.0 * (c.s1_1 - y[i] - y[j])
                    - c.s4_1111 * c.s4_1111 / (c.s111 * y[i] * y[i] * y[j] * y[j]))
                    / (9.0 * cr)
            };
        }
    }
    g
}

/// Chernov form of `g^jk = 3 c [S^{jk1} + y^j y^k / (6 S_111)]`.
pub fn chernov_inverse_closed(cp: &CubicPoint, y: &[f64; DIM]) -> Matrix4<f64> {
    let s = cp.contractions.s111;
    let cr = s.cbrt();
    Matrix4::from_fn(|j, k| 3.0 * cr * (cp.duals.sjk1_up[(j, k)] + y[j] * y[k] / (6.0 * s)))
}

/// Constant metric of the quadratic preset and its inverse:
/// `g = (1 - delta) / 2`, `g^-1 = (2/3)(1 - 3 delta)`.
pub fn f2_metric() -> (Matrix4<f64>, Matrix4<f64>) {
    let g = Matrix4::from_fn(|i, j| if i == j { 0.0 } else { 0.5 });
    let g_up = Matrix4::from_fn(|i, j| if i == j { -4.0 / 3.0 } else { 2.0 / 3.0 });
    (g, g_up)
}

/// `dg_jk / dy^m` from the closed expansion, stored as `out[j][k][m]`.
pub fn metric_y_derivative(cp: &CubicPoint) -> Array3 {
    let c = &cp.contractions;
    let s = &cp.coeffs;
    let cr = c.s111.cbrt();
    let m1 = 1.0 / cr;
    let m4 = m1.powi(4);
    let m7 = m1.powi(7);
    let u = &c.si11;
    let a = &c.sij1;
    let mut out = [[[0.0; DIM]; DIM]; DIM];
    for j in 0..DIM {
        for k in 0..DIM {
            for m in 0..DIM {
                out[j][k][m] = 2.0 * m1 * s[j][k][m]
                    - m4 / 9.0 * (a[(j, k)] * u[m] + a[(k, m)] * u[j] + a[(m, j)] * u[k])
                    + 4.0 / 27.0 * m7 * u[j] * u[k] * u[m];
            }
        }
    }
    out
}

/// `d2 g_jk / dy^m dy^l`, stored as `out[j][k][m][l]`; totally symmetric.
pub fn metric_y_second_derivative(cp: &CubicPoint) -> Array4 {
    let c = &cp.contractions;
    let s = &cp.coeffs;
    let m1 = 1.0 / c.s111.cbrt();
    let m4 = m1.powi(4);
    let m7 = m1.powi(7);
    let m10 = m1.powi(10);
    let u = &c.si11;
    let a = &c.sij1;
    let mut out = [[[[0.0; DIM]; DIM]; DIM]; DIM];
    for j in 0..DIM {
        for k in 0..DIM {
            for m in 0..DIM {
                for l in 0..DIM {
                    let us = u[l] * s[j][k][m] + u[m] * s[j][k][l] + u[j] * s[k][m][l] + u[k] * s[m][j][l];
                    let aa = a[(j, k)] * a[(m, l)] + a[(k, m)] * a[(j, l)] + a[(m, j)] * a[(k, l)];
                    let auu = a[(j, k)] * u[m] * u[l]
                        + a[(k, m)] * u[j] * u[l]
                        + a[(m, j)] * u[k] * u[l]
                        + a[(j, l)] * u[k] * u[m]
                        + a[(k, l)] * u[j] * u[m]
                        + a[(m, l)] * u[j] * u[k];
                    out[j][k][m][l] = -2.0 / 3.0 * m4 * us - m4 / 9.0 * aa + 4.0 / 27.0 * m7 * auu
                        - 28.0 / 81.0 * m10 * u[j] * u[k] * u[m] * u[l];
                }
            }
        }
    }
    out
}

pub(crate) fn cubic_metric(
    metric: &MRootStructure,
    p: &JetPoint,
) -> Result<(CubicPoint, Matrix4<f64>, Matrix4<f64>)> {
    let cp = cubic_point(metric, p)?;
    let g = metric_general(&cp.contractions);
    let g_up = inverse_general(&cp, metric.floor(), p)?;
    Ok((cp, g, g_up))
}

/// Fundamental metric tensor, its inverse and the Finsler value at `p`.
pub fn fundamental_metric(
    metric: &MRootStructure,
    h: &TemporalMetric,
    p: &JetPoint,
) -> Result<FundamentalMetric> {
    let (f_value, f_squared) = finsler_value(metric, h, p)?;
    let (g_low, g_up) = if metric.is_cubic() {
        let (_, g, g_up) = cubic_metric(metric, p)?;
        (g, g_up)
    } else {
        f2_metric()
    };
    Ok(FundamentalMetric {
        g_low,
        g_up,
        f_value,
        f_squared,
    })
}

/// `(h11 / 2)` times the central finite-difference Hessian of `F^2` in `y`.
pub fn definitional_metric_oracle(
    metric: &MRootStructure,
    h: &TemporalMetric,
    p: &JetPoint,
) -> Result<Matrix4<f64>> {
    let h11 = h.h_lower(p.t)?;
    let hess = fd_hessian_y(|q| finsler_value(metric, h, q).map(|(_, f2)| f2), p)?;
    Ok(hess * (h11 / 2.0))
}
