//! Canonical spray, canonical nonlinear connection, adapted derivatives and
//! the Cartan canonical connection.
//!
//! Index conventions: `n[(i, j)] = N^(i)_(1)j`, `gk_j1[(k, j)] = G^k_j1`,
//! `l.at3(i, j, k) = L^i_jk` and `c.at3(i, j, k) = C^i(1)_j(k)`.

use nalgebra::Matrix4;

use crate::algebra::{cubic_point, CubicPoint};
use crate::error::{GeometryError, Result};
use crate::fd::{central_diff_vec, fd_mixed, Axis};
use crate::jet::{temporal_kappa, JetPoint, TemporalMetric, DIM};
use crate::metric::{
    cubic_metric, inverse_general, metric_general, metric_y_derivative, metric_y_second_derivative,
};
use crate::structure::{MRootStructure, MetricKind};
use crate::tensor::{Array3, DTensor, Slot, Symmetry};

#[derive(Debug, Clone, PartialEq)]
pub struct SprayPair {
    /// `H^(i)_(1)1`.
    pub h: [f64; DIM],
    /// `G^(i)_(1)1`.
    pub g: [f64; DIM],
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearConnection {
    /// `M^(i)_(1)1`.
    pub m: [f64; DIM],
    /// `N^(i)_(1)j`, row `i`, column `j`.
    pub n: Matrix4<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CartanConnection {
    pub kappa: f64,
    /// `G^k_j1`, row `k`, column `j`.
    pub gk_j1: Matrix4<f64>,
    /// `L^i_jk`.
    pub l: DTensor,
    /// `C^i(1)_j(k)`, symmetric in `j, k`.
    pub c: DTensor,
}

/// Empty `C^i(1)_j(k)` container with the lower-index symmetry declared.
pub fn c_container() -> DTensor {
    DTensor::zeros(vec![Slot::SpatialUpper, Slot::SpatialLower, Slot::VerticalLower])
        .with_symmetry(1, 2, Symmetry::Symmetric)
}

fn l_container() -> DTensor {
    DTensor::zeros(vec![Slot::SpatialUpper, Slot::SpatialLower, Slot::SpatialLower])
}

fn reduction_gap(metric: &MRootStructure, cp: &CubicPoint, p: &JetPoint) -> Result<f64> {
    let gap = cp.contractions.s111 - cp.duals.bold_s111;
    if !(gap.abs() > metric.floor()) {
        return Err(GeometryError::Degenerate {
            quantity: "S_111 - bold S_111",
            value: gap,
            floor: metric.floor(),
            point: *p,
        });
    }
    Ok(gap)
}

/// Locally-Minkowski spray `G^i = -kappa S_111 S_1^i / (2 (S_111 - bold S_111))`.
pub fn spray_minkowski(
    metric: &MRootStructure,
    h: &TemporalMetric,
    p: &JetPoint,
) -> Result<[f64; DIM]> {
    let (kappa, _) = temporal_kappa(h, p.t)?;
    let cp = cubic_point(metric, p)?;
    let gap = reduction_gap(metric, &cp, p)?;
    let factor = -kappa * cp.contractions.s111 / (2.0 * gap);
    Ok(cp.duals.s1_up.map(|v| factor * v))
}

/// Spray from the general x-dependent expression, including the literal
/// `(1 - kappa)` factor in front of `dS_111/dx^m`.
pub fn spray_full_formula(
    metric: &MRootStructure,
    h: &TemporalMetric,
    p: &JetPoint,
) -> Result<[f64; DIM]> {
    let (kappa, _) = temporal_kappa(h, p.t)?;
    let (cp, _, g_up) = cubic_metric(metric, p)?;
    let gap = reduction_gap(metric, &cp, p)?;
    let y = &p.y;
    // dS_m11/dx^a and dS_111/dx^a from the coefficient derivatives.
    let mut ds_m11 = [[0.0; DIM]; DIM];
    let mut ds_111 = [0.0; DIM];
    for a in 0..DIM {
        let ds = metric
            .coefficients_dx(&p.x, a)
            .ok_or_else(crate::algebra::quadratic_unsupported)?;
        for m in 0..DIM {
            let mut acc = 0.0;
            for q in 0..DIM {
                for r in 0..DIM {
                    acc += ds[m][q][r] * y[q] * y[r];
                }
            }
            ds_m11[m][a] = 3.0 * acc;
        }
        ds_111[a] = (0..DIM).map(|m| ds_m11[m][a] * y[m]).sum::<f64>() / 3.0;
    }
    let s = cp.contractions.s111;
    let cr = s.cbrt();
    let transport: f64 = (0..DIM).map(|a| ds_111[a] * y[a]).sum();
    let mut g = [0.0; DIM];
    for (i, gi) in g.iter_mut().enumerate() {
        let first: f64 = (0..DIM)
            .map(|m| {
                let bracket = (0..DIM).map(|a| ds_m11[m][a] * y[a]).sum::<f64>()
                    - (1.0 - kappa) * ds_111[m];
                g_up[(i, m)] * bracket
            })
            .sum::<f64>()
            / (6.0 * cr);
        let second = cp.duals.s1_up[i] / (6.0 * gap) * (transport + 3.0 * kappa * s);
        *gi = first - second;
    }
    Ok(g)
}

/// Canonical time-dependent spray `(H, G)` at `p`.
pub fn canonical_spray(
    metric: &MRootStructure,
    h: &TemporalMetric,
    p: &JetPoint,
) -> Result<SprayPair> {
    let (kappa, _) = temporal_kappa(h, p.t)?;
    let half = p.y.map(|v| -0.5 * kappa * v);
    let g = match metric.kind() {
        MetricKind::QuadraticF2 => half,
        _ if metric.is_x_dependent() => spray_full_formula(metric, h, p)?,
        _ => spray_minkowski(metric, h, p)?,
    };
    Ok(SprayPair { h: half, g })
}

/// Canonical nonlinear connection `M = 2H`, `N^i_j = dG^i / dy^j`.
pub fn nonlinear_connection(
    metric: &MRootStructure,
    h: &TemporalMetric,
    p: &JetPoint,
) -> Result<NonlinearConnection> {
    let (kappa, _) = temporal_kappa(h, p.t)?;
    let m = p.y.map(|v| -kappa * v);
    let n = match metric.kind() {
        MetricKind::Chernov | MetricKind::QuadraticF2 => Matrix4::identity() * (-0.5 * kappa),
        MetricKind::CustomCubic(_) => {
            let mut n = Matrix4::zeros();
            for j in 0..DIM {
                let col = central_diff_vec(
                    |q| canonical_spray(metric, h, q).map(|s| s.g.to_vec()),
                    p,
                    Axis::Y(j),
                )?;
                for i in 0..DIM {
                    n[(i, j)] = col[i];
                }
            }
            n
        }
    };
    Ok(NonlinearConnection { m, n })
}

/// Direction of an adapted derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `d/dt - M^p d/dy^p`.
    DeltaT,
    /// `d/dx^i - N^p_i d/dy^p`.
    DeltaX(usize),
    /// `d/dy^i`.
    Vertical(usize),
}

/// Adapted derivative of a vector-valued field. Vertical corrections with a
/// zero coefficient are skipped so no stencil is evaluated for them.
pub fn adapted_derivative_vec<F>(
    field: F,
    p: &JetPoint,
    direction: Direction,
    nc: &NonlinearConnection,
) -> Result<Vec<f64>>
where
    F: Fn(&JetPoint) -> Result<Vec<f64>>,
{
    let (base, coeffs) = match direction {
        Direction::Vertical(i) => return central_diff_vec(&field, p, Axis::Y(i)),
        Direction::DeltaT => (Axis::T, nc.m.map(|v| -v)),
        Direction::DeltaX(i) => (Axis::X(i), std::array::from_fn(|q| -nc.n[(q, i)])),
    };
    let mut out = central_diff_vec(&field, p, base)?;
    for (q, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let dy = central_diff_vec(&field, p, Axis::Y(q))?;
        out.iter_mut().zip(&dy).for_each(|(o, d)| *o += c * d);
    }
    Ok(out)
}

/// Adapted derivative of a scalar field along one element of the adapted basis.
pub fn adapted_derivative<F>(
    field: F,
    p: &JetPoint,
    direction: Direction,
    nc: &NonlinearConnection,
) -> Result<f64>
where
    F: Fn(&JetPoint) -> Result<f64>,
{
    adapted_derivative_vec(|q| field(q).map(|v| vec![v]), p, direction, nc).map(|v| v[0])
}

/// `C^i_j(k)` from the closed expression in the cubic contractions.
pub fn cartan_c_closed(cp: &CubicPoint, y: &[f64; DIM]) -> DTensor {
    let c = &cp.contractions;
    let inv = &cp.duals.sjk1_up;
    let s = c.s111;
    let mut out = c_container();
    for i in 0..DIM {
        for j in 0..DIM {
            for k in j..DIM {
                let contraction: f64 = (0..DIM).map(|m| inv[(i, m)] * cp.coeffs[j][k][m]).sum();
                let delta_ij = if i == j { 1.0 } else { 0.0 };
                let delta_ik = if i == k { 1.0 } else { 0.0 };
                let v = 3.0 * contraction
                    - (c.sij1[(j, k)] * y[i] / 2.0 + delta_ij * c.si11[k] + delta_ik * c.si11[j])
                        / (6.0 * s)
                    + c.si11[j] * c.si11[k] * y[i] / (9.0 * s * s);
                out.set(&[i, j, k], v);
            }
        }
    }
    out
}

/// `C^i_j(k) = (g^im / 2) dg_jk / dy^m` with the closed `dg/dy` expansion.
pub fn cartan_c_general(cp: &CubicPoint, g_up: &Matrix4<f64>) -> DTensor {
    let dg = metric_y_derivative(cp);
    let mut out = c_container();
    for i in 0..DIM {
        for j in 0..DIM {
            for k in j..DIM {
                let v: f64 = (0..DIM).map(|m| g_up[(i, m)] * dg[j][k][m]).sum::<f64>() / 2.0;
                out.set(&[i, j, k], v);
            }
        }
    }
    out
}

/// `L^i_jk = (g^im / 2)(dg_jm/dx^k + dg_km/dx^j - dg_jk/dx^m)` with adapted
/// derivatives `d/dx^k - N^p_k d/dy^p`.
fn l_general(
    metric: &MRootStructure,
    p: &JetPoint,
    g_up: &Matrix4<f64>,
    dg_dy: &Array3,
    nc: &NonlinearConnection,
) -> Result<DTensor> {
    // delta_g[k][j][m] = delta g_jm / delta x^k
    let mut delta_g = [[[0.0; DIM]; DIM]; DIM];
    for (k, dk) in delta_g.iter_mut().enumerate() {
        let dx = if metric.is_x_dependent() {
            central_diff_vec(
                |q| {
                    let cp = cubic_point(metric, q)?;
                    Ok(metric_general(&cp.contractions).as_slice().to_vec())
                },
                p,
                Axis::X(k),
            )?
        } else {
            vec![0.0; DIM * DIM]
        };
        for j in 0..DIM {
            for m in 0..DIM {
                // nalgebra storage is column-major; g is symmetric.
                let vertical: f64 = (0..DIM).map(|q| nc.n[(q, k)] * dg_dy[j][m][q]).sum();
                dk[j][m] = dx[j * DIM + m] - vertical;
            }
        }
    }
    let mut l = l_container();
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                let v: f64 = (0..DIM)
                    .map(|m| g_up[(i, m)] * (delta_g[k][j][m] + delta_g[j][k][m] - delta_g[m][j][k]))
                    .sum::<f64>()
                    / 2.0;
                l.set(&[i, j, k], v);
            }
        }
    }
    Ok(l)
}

/// `G^k_j1 = (g^km / 2) dg_mj / dt` with `d/dt - M^p d/dy^p`; the metric of
/// a cubic structure carries no explicit `t`.
fn g_temporal_general(g_up: &Matrix4<f64>, dg_dy: &Array3, nc: &NonlinearConnection) -> Matrix4<f64> {
    let mut delta_t = Matrix4::zeros();
    for m in 0..DIM {
        for j in 0..DIM {
            delta_t[(m, j)] = -(0..DIM).map(|q| nc.m[q] * dg_dy[m][j][q]).sum::<f64>();
        }
    }
    (g_up * delta_t) * 0.5
}

/// Cartan canonical connection `(kappa, G^k_j1, L^i_jk, C^i_j(k))`.
pub fn cartan_connection(
    metric: &MRootStructure,
    h: &TemporalMetric,
    p: &JetPoint,
) -> Result<CartanConnection> {
    let (kappa, _) = temporal_kappa(h, p.t)?;
    match metric.kind() {
        MetricKind::QuadraticF2 => Ok(CartanConnection {
            kappa,
            gk_j1: Matrix4::zeros(),
            l: l_container(),
            c: c_container(),
        }),
        MetricKind::Chernov => {
            let cp = cubic_point(metric, p)?;
            let c = cartan_c_closed(&cp, &p.y);
            let l = c.scaled(kappa / 2.0).relabeled(vec![
                Slot::SpatialUpper,
                Slot::SpatialLower,
                Slot::SpatialLower,
            ]);
            Ok(CartanConnection {
                kappa,
                gk_j1: Matrix4::zeros(),
                l,
                c,
            })
        }
        MetricKind::CustomCubic(_) => {
            let cp = cubic_point(metric, p)?;
            let g_up = inverse_general(&cp, metric.floor(), p)?;
            let dg_dy = metric_y_derivative(&cp);
            let nc = nonlinear_connection(metric, h, p)?;
            Ok(CartanConnection {
                kappa,
                gk_j1: g_temporal_general(&g_up, &dg_dy, &nc),
                l: l_general(metric, p, &g_up, &dg_dy, &nc)?,
                c: cartan_c_general(&cp, &g_up),
            })
        }
    }
}

/// Both evaluation routes of `C` at `p`: `(closed form, general formula)`.
pub fn cartan_c_routes(metric: &MRootStructure, p: &JetPoint) -> Result<(DTensor, DTensor)> {
    let (cp, _, g_up) = cubic_metric(metric, p)?;
    Ok((cartan_c_closed(&cp, &p.y), cartan_c_general(&cp, &g_up)))
}

/// `dN^i_j / dy^l`, stored as `out[l][(i, j)]`. The analytic connections of
/// the presets are constant in `y`; custom structures use second differences
/// of the spray.
pub fn nonlinear_connection_y_derivatives(
    metric: &MRootStructure,
    h: &TemporalMetric,
    p: &JetPoint,
) -> Result<[Matrix4<f64>; DIM]> {
    let mut out = [Matrix4::zeros(); DIM];
    if !matches!(metric.kind(), MetricKind::CustomCubic(_)) {
        return Ok(out);
    }
    for i in 0..DIM {
        for j in 0..DIM {
            for l in j..DIM {
                let v = fd_mixed(
                    |q| canonical_spray(metric, h, q).map(|s| s.g[i]),
                    p,
                    Axis::Y(j),
                    Axis::Y(l),
                )?;
                out[l][(i, j)] = v;
                out[j][(i, l)] = v;
            }
        }
    }
    Ok(out)
}

/// Vertical derivatives of the Cartan connection coefficients: `g[l][(k, j)]
/// = dG^k_j1/dy^l`, `l[m][i][j][k] = dL^i_jk/dy^m`, `c[m][i][j][k] = dC^i_j(k)/dy^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionYDerivatives {
    pub g: [Matrix4<f64>; DIM],
    pub l: [Array3; DIM],
    pub c: [Array3; DIM],
}

impl ConnectionYDerivatives {
    fn zero() -> Self {
        ConnectionYDerivatives {
            g: [Matrix4::zeros(); DIM],
            l: [[[[0.0; DIM]; DIM]; DIM]; DIM],
            c: [[[[0.0; DIM]; DIM]; DIM]; DIM],
        }
    }
}

/// Exact vertical derivatives of `(G, L, C)` by the product rule on
/// `(g^im / 2) * (...)`, using the closed first and second `y`-derivatives
/// of `g`. `dn_dy` are the vertical derivatives of `N`; the only finite
/// differences involved are the `x`-partials of `dg/dy` for `x`-dependent
/// structures.
pub fn connection_y_derivatives(
    metric: &MRootStructure,
    p: &JetPoint,
    cc: &CartanConnection,
    nc: &NonlinearConnection,
    dn_dy: &[Matrix4<f64>; DIM],
) -> Result<ConnectionYDerivatives> {
    if !metric.is_cubic() {
        return Ok(ConnectionYDerivatives::zero());
    }
    let (cp, _, g_up) = cubic_metric(metric, p)?;
    let a = metric_y_derivative(&cp);
    let b = metric_y_second_derivative(&cp);
    // da_dx[k][j][m][l] = d/dx^k (dg_jm/dy^l)
    let mut da_dx = [[[[0.0; DIM]; DIM]; DIM]; DIM];
    if metric.is_x_dependent() {
        for (k, slot) in da_dx.iter_mut().enumerate() {
            let d = central_diff_vec(
                |q| {
                    let cq = cubic_point(metric, q)?;
                    Ok(metric_y_derivative(&cq).iter().flatten().flatten().copied().collect())
                },
                p,
                Axis::X(k),
            )?;
            for j in 0..DIM {
                for m in 0..DIM {
                    for l in 0..DIM {
                        slot[j][m][l] = d[(j * DIM + m) * DIM + l];
                    }
                }
            }
        }
    }
    // d/dy^l of delta g_jm / delta x^k
    let d_delta_x = |k: usize, j: usize, m: usize, l: usize| {
        let mut v = da_dx[k][j][m][l];
        for q in 0..DIM {
            v -= dn_dy[l][(q, k)] * a[j][m][q] + nc.n[(q, k)] * b[j][m][q][l];
        }
        v
    };
    let mut out = ConnectionYDerivatives::zero();
    for l in 0..DIM {
        // (d g^iq / dy^l) g_qm = -g^ip A_pql
        let rot = Matrix4::from_fn(|i, q| -(0..DIM).map(|pp| g_up[(i, pp)] * a[pp][q][l]).sum::<f64>());
        for i in 0..DIM {
            for j in 0..DIM {
                let mut dg = 0.0;
                for q in 0..DIM {
                    dg += rot[(i, q)] * cc.gk_j1[(q, j)];
                }
                for m in 0..DIM {
                    // d/dy^l of delta g_mj / delta t, with dM^q/dy^l = -kappa delta^q_l
                    let dh = cc.kappa * a[m][j][l]
                        - (0..DIM).map(|q| nc.m[q] * b[m][j][q][l]).sum::<f64>();
                    dg += g_up[(i, m)] * dh / 2.0;
                }
                out.g[l][(i, j)] = dg;
                for k in 0..DIM {
                    let mut dl = 0.0;
                    let mut dc = 0.0;
                    for q in 0..DIM {
                        dl += rot[(i, q)] * cc.l.at3(q, j, k);
                        dc += rot[(i, q)] * cc.c.at3(q, j, k);
                    }
                    for m in 0..DIM {
                        let de = d_delta_x(k, j, m, l) + d_delta_x(j, k, m, l) - d_delta_x(m, j, k, l);
                        dl += g_up[(i, m)] * de / 2.0;
                        dc += g_up[(i, m)] * b[j][k][m][l] / 2.0;
                    }
                    out.l[l][i][j][k] = dl;
                    out.c[l][i][j][k] = dc;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones() -> JetPoint {
        JetPoint::from_velocity([1.0; 4])
    }

    #[test]
    fn chernov_spray_vanishes_for_constant_h() {
        let s = canonical_spray(
            &MRootStructure::chernov(),
            &TemporalMetric::constant(2.0).unwrap(),
            &JetPoint::from_velocity([1.0, 2.0, 3.0, 4.0]),
        )
        .unwrap();
        assert!(s.h.iter().chain(&s.g).all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn chernov_spray_exponential() {
        let s = canonical_spray(
            &MRootStructure::chernov(),
            &TemporalMetric::exponential(1.0).unwrap(),
            &JetPoint::from_velocity([1.0, 2.0, 3.0, 4.0]),
        )
        .unwrap();
        for (v, e) in s.g.iter().zip([-0.5, -1.0, -1.5, -2.0]) {
            assert!((v - e).abs() < 1e-12);
        }
        assert_eq!(s.h, [-0.5, -1.0, -1.5, -2.0]);
    }

    #[test]
    fn chernov_nonlinear_connection() {
        let nc = nonlinear_connection(
            &MRootStructure::chernov(),
            &TemporalMetric::exponential(1.0).unwrap(),
            &ones(),
        )
        .unwrap();
        assert_eq!(nc.n, Matrix4::identity() * -0.5);
        assert_eq!(nc.m, [-1.0; 4]);
        let nc0 = nonlinear_connection(
            &MRootStructure::chernov(),
            &TemporalMetric::constant(1.0).unwrap(),
            &ones(),
        )
        .unwrap();
        assert!(nc0.n.iter().all(|v| *v == 0.0) && nc0.m.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn adapted_derivative_examples() {
        let m = MRootStructure::chernov();
        let h = TemporalMetric::exponential(1.0).unwrap();
        let nc = nonlinear_connection(&m, &h, &ones()).unwrap();
        let s111 = |q: &JetPoint| crate::algebra::contract_cubic(&m, q).map(|c| c.s111);
        let v = adapted_derivative(s111, &ones(), Direction::DeltaX(0), &nc).unwrap();
        assert!((v - 1.5).abs() < 1e-9);

        // A field of t alone only sees d/dt.
        let p = JetPoint::new(1.0, [0.0; 4], [1.0; 4]).unwrap();
        let v = adapted_derivative(|q: &JetPoint| Ok(q.t * q.t), &p, Direction::DeltaT, &nc).unwrap();
        assert!((v - 2.0).abs() < 1e-9);

        let hc = TemporalMetric::constant(1.0).unwrap();
        let nc0 = nonlinear_connection(&m, &hc, &ones()).unwrap();
        let f2 = |q: &JetPoint| crate::metric::finsler_value(&m, &hc, q).map(|(_, f2)| f2);
        let v = adapted_derivative(f2, &ones(), Direction::DeltaT, &nc0).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn cartan_table_at_ones() {
        let cc = cartan_connection(
            &MRootStructure::chernov(),
            &TemporalMetric::constant(1.0).unwrap(),
            &ones(),
        )
        .unwrap();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let expect = if i == j && j == k {
                        -3.0 / 16.0
                    } else if i != j && j != k && i != k {
                        -1.0 / 16.0
                    } else {
                        1.0 / 16.0
                    };
                    assert!((cc.c.at3(i, j, k) - expect).abs() < 1e-12, "{i}{j}{k}");
                }
            }
        }
    }

    #[test]
    fn quadratic_preset_connection_is_zero() {
        let cc = cartan_connection(
            &MRootStructure::quadratic_f2(),
            &TemporalMetric::exponential(0.5).unwrap(),
            &ones(),
        )
        .unwrap();
        assert_eq!(cc.c.max_abs(), 0.0);
        assert_eq!(cc.l.max_abs(), 0.0);
        assert_eq!(cc.gk_j1, Matrix4::zeros());
    }

    #[test]
    fn degenerate_point_errors() {
        let err = cartan_connection(
            &MRootStructure::chernov(),
            &TemporalMetric::constant(1.0).unwrap(),
            &JetPoint::from_velocity([1.0, 1.0, 1.0, -1.0]),
        )
        .unwrap_err();
        assert!(err.is_degeneracy());
    }
}
