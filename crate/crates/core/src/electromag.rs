//! The electromagnetic distinguished 2-form, its auxiliary tensors and
//! covariant derivatives, and residuals of the geometrical Maxwell equations.
//!
//! `t`- and `x`-partials of the fields are central differences of the fields
//! themselves; `y`-partials use the product rule on the closed metric and
//! connection derivatives held by [`ConnectionJet`].

use nalgebra::Matrix4;

use crate::curvature::{torsion_from_jet, ConnectionJet, TorsionSet};
use crate::error::Result;
use crate::fd::{central_diff_vec, Axis};
use crate::jet::{JetPoint, TemporalMetric, DIM};
use crate::metric::fundamental_metric;
use crate::structure::MRootStructure;
use crate::tensor::{max_abs_mat, Array3};

use crate::connections::{cartan_connection, nonlinear_connection};

#[derive(Debug, Clone, PartialEq)]
pub struct EMField {
    /// `F_(i)j`, antisymmetric.
    pub f_2form: Matrix4<f64>,
    /// `Dbar_(i)1`.
    pub dbar: [f64; DIM],
    /// `D_(i)j`.
    pub d: Matrix4<f64>,
    /// `d_(i)(j)`.
    pub d_small: Matrix4<f64>,
    /// `F_(i)j/1`.
    pub f_slash: Matrix4<f64>,
    /// `F_(i)j|k` as `[i][j][k]`.
    pub f_bar: Array3,
    /// Vertical covariant derivative `F_(i)j` along `(k)`, as `[i][j][k]`.
    pub f_vert: Array3,
}

fn two_form(h_up: f64, g: &Matrix4<f64>, n: &Matrix4<f64>, l: impl Fn(usize, usize, usize) -> f64, y: &[f64; DIM]) -> Matrix4<f64> {
    let mut f = Matrix4::zeros();
    for i in 0..DIM {
        for j in 0..DIM {
            let mut v = 0.0;
            for m in 0..DIM {
                v += g[(j, m)] * n[(m, i)] - g[(i, m)] * n[(m, j)];
                let mut ly = 0.0;
                for r in 0..DIM {
                    ly += (g[(i, r)] * l(r, j, m) - g[(j, r)] * l(r, i, m)) * y[m];
                }
                v += ly;
            }
            f[(i, j)] = h_up / 2.0 * v;
        }
    }
    f
}

/// `F_(i)j = (h^11/2) [g_jm N^m_i - g_im N^m_j + (g_ir L^r_jm - g_jr L^r_im) y^m]`.
pub fn em_two_form(metric: &MRootStructure, h: &TemporalMetric, p: &JetPoint) -> Result<Matrix4<f64>> {
    let h_up = h.h_upper(p.t)?;
    let fm = fundamental_metric(metric, h, p)?;
    let nc = nonlinear_connection(metric, h, p)?;
    let cc = cartan_connection(metric, h, p)?;
    Ok(two_form(h_up, &fm.g_low, &nc.n, |r, j, m| cc.l.at3(r, j, m), &p.y))
}

fn flatten(m: &Matrix4<f64>) -> Vec<f64> {
    (0..DIM).flat_map(|i| (0..DIM).map(move |j| m[(i, j)])).collect()
}

/// `Dbar_(i)1 = (h^11/2) (dg_ip/dt) y^p` with `d/dt - M^q d/dy^q`; the
/// metric of every supported structure carries no explicit `t`.
fn dbar_at(h_up: f64, m: &[f64; DIM], dg_dy: &Array3, y: &[f64; DIM]) -> [f64; DIM] {
    std::array::from_fn(|i| {
        let mut v = 0.0;
        for pp in 0..DIM {
            let hip: f64 = -(0..DIM).map(|q| m[q] * dg_dy[i][pp][q]).sum::<f64>();
            v += hip * y[pp];
        }
        h_up / 2.0 * v
    })
}

fn dbar_field(metric: &MRootStructure, h: &TemporalMetric, q: &JetPoint) -> Result<Vec<f64>> {
    let h_up = h.h_upper(q.t)?;
    let nc = nonlinear_connection(metric, h, q)?;
    let dg = if metric.is_cubic() {
        let cp = crate::algebra::cubic_point(metric, q)?;
        crate::metric::metric_y_derivative(&cp)
    } else {
        [[[0.0; DIM]; DIM]; DIM]
    };
    Ok(dbar_at(h_up, &nc.m, &dg, &q.y).to_vec())
}

/// `y`-partials of `F_(i)j`, as `[k][(i, j)]`.
fn f_y_partials(jet: &ConnectionJet, h_up: f64) -> [Matrix4<f64>; DIM] {
    let y = &jet.point.y;
    let a = &jet.dg_dy;
    let g = &jet.g;
    let dl = |k: usize, r: usize, j: usize, m: usize| {
        ConnectionJet::vertical(&jet.d_conn, k, crate::curvature::L_OFFSET + crate::curvature::i3(r, j, m))
    };
    std::array::from_fn(|k| {
        Matrix4::from_fn(|i, j| {
            let mut v = 0.0;
            for m in 0..DIM {
                v += a[j][m][k] * jet.n(m, i) + g[(j, m)] * jet.dn_dy[k][(m, i)]
                    - a[i][m][k] * jet.n(m, j)
                    - g[(i, m)] * jet.dn_dy[k][(m, j)];
                for r in 0..DIM {
                    v += (a[i][r][k] * jet.l(r, j, m) + g[(i, r)] * dl(k, r, j, m)
                        - a[j][r][k] * jet.l(r, i, m)
                        - g[(j, r)] * dl(k, r, i, m))
                        * y[m];
                }
            }
            for r in 0..DIM {
                v += g[(i, r)] * jet.l(r, j, k) - g[(j, r)] * jet.l(r, i, k);
            }
            h_up / 2.0 * v
        })
    })
}

/// `y`-partials of `Dbar_(i)1`, as `[l][i]`.
fn dbar_y_partials(jet: &ConnectionJet, h_up: f64) -> [[f64; DIM]; DIM] {
    let y = &jet.point.y;
    let a = &jet.dg_dy;
    let b = &jet.d2g_dy;
    std::array::from_fn(|l| {
        std::array::from_fn(|i| {
            let mut v = 0.0;
            for pp in 0..DIM {
                let dh = jet.kappa * a[i][pp][l] - (0..DIM).map(|q| jet.m(q) * b[i][pp][q][l]).sum::<f64>();
                v += dh * y[pp];
            }
            v -= (0..DIM).map(|q| jet.m(q) * a[i][l][q]).sum::<f64>();
            h_up / 2.0 * v
        })
    })
}

/// Everything the Maxwell equations need at one point.
#[derive(Debug, Clone)]
pub struct MaxwellData {
    pub field: EMField,
    /// `Dbar_(i)1|j` as `[(i, j)]`.
    pub dbar_bar: Matrix4<f64>,
    /// `G^k_i1|j` as `[k][(i, j)]`.
    pub g_bar: [Matrix4<f64>; DIM],
    pub residuals: [f64; 3],
}

/// Auxiliary tensors, covariant derivatives of `F` and the three Maxwell
/// residuals from an evaluated connection jet.
pub fn maxwell_from_jet(
    metric: &MRootStructure,
    h: &TemporalMetric,
    jet: &ConnectionJet,
    torsion: &TorsionSet,
) -> Result<MaxwellData> {
    let p = &jet.point;
    let y = &p.y;
    let h_up = 1.0 / jet.h11;
    let g = &jet.g;
    let kappa = jet.kappa;

    let f = two_form(h_up, g, &jet.nc.n, |r, j, m| jet.l(r, j, m), y);
    let f_y = f_y_partials(jet, h_up);
    let f_dt = central_diff_vec(|q| em_two_form(metric, h, q).map(|m| flatten(&m)), p, Axis::T)?;
    let f_dx: Vec<Vec<f64>> = (0..DIM)
        .map(|k| central_diff_vec(|q| em_two_form(metric, h, q).map(|m| flatten(&m)), p, Axis::X(k)))
        .collect::<Result<_>>()?;
    let delta_t_f = Matrix4::from_fn(|i, j| {
        f_dt[i * DIM + j] - (0..DIM).map(|pp| jet.m(pp) * f_y[pp][(i, j)]).sum::<f64>()
    });
    let delta_x_f = |k: usize, i: usize, j: usize| {
        f_dx[k][i * DIM + j] - (0..DIM).map(|pp| jet.n(pp, k) * f_y[pp][(i, j)]).sum::<f64>()
    };

    let dbar = dbar_at(h_up, &jet.nc.m, &jet.dg_dy, y);
    let dbar_y = dbar_y_partials(jet, h_up);
    let dbar_dx: Vec<Vec<f64>> = (0..DIM)
        .map(|k| central_diff_vec(|q| dbar_field(metric, h, q), p, Axis::X(k)))
        .collect::<Result<_>>()?;
    let d = Matrix4::from_fn(|i, j| {
        h_up * (0..DIM)
            .map(|pp| g[(i, pp)] * (-jet.n(pp, j) + (0..DIM).map(|m| jet.l(pp, j, m) * y[m]).sum::<f64>()))
            .sum::<f64>()
    });
    let d_small = Matrix4::from_fn(|i, j| {
        let mut v = g[(i, j)];
        for pp in 0..DIM {
            for m in 0..DIM {
                v += g[(i, pp)] * jet.c(pp, m, j) * y[m];
            }
        }
        h_up * v
    });

    let f_slash = Matrix4::from_fn(|i, j| {
        let mut v = delta_t_f[(i, j)] + f[(i, j)] * kappa;
        for m in 0..DIM {
            v -= f[(m, j)] * jet.g(m, i) + f[(i, m)] * jet.g(m, j);
        }
        v
    });
    let mut f_bar = [[[0.0; DIM]; DIM]; DIM];
    let mut f_vert = [[[0.0; DIM]; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                let mut bar = delta_x_f(k, i, j);
                let mut vert = f_y[k][(i, j)];
                for m in 0..DIM {
                    bar -= f[(m, j)] * jet.l(m, i, k) + f[(i, m)] * jet.l(m, j, k);
                    vert -= f[(m, j)] * jet.c(m, i, k) + f[(i, m)] * jet.c(m, j, k);
                }
                f_bar[i][j][k] = bar;
                f_vert[i][j][k] = vert;
            }
        }
    }

    let dbar_bar = Matrix4::from_fn(|i, j| {
        let delta = dbar_dx[j][i] - (0..DIM).map(|pp| jet.n(pp, j) * dbar_y[pp][i]).sum::<f64>();
        delta - (0..DIM).map(|m| dbar[m] * jet.l(m, i, j)).sum::<f64>()
    });
    let g_idx = |k: usize, i: usize| crate::curvature::G_OFFSET + crate::curvature::i2(k, i);
    let g_bar: [Matrix4<f64>; DIM] = std::array::from_fn(|k| {
        Matrix4::from_fn(|i, j| {
            let mut v = jet.delta_x(&jet.d_conn, j, g_idx(k, i));
            for m in 0..DIM {
                v += jet.g(m, i) * jet.l(k, m, j) - jet.g(k, m) * jet.l(m, i, j);
            }
            v
        })
    });

    let r_t = &torsion.r_temporal;
    let gy: [f64; DIM] = std::array::from_fn(|pp| h_up * (0..DIM).map(|q| g[(pp, q)] * y[q]).sum::<f64>());
    let x = Matrix4::from_fn(|i, j| {
        let mut v = dbar_bar[(i, j)];
        for m in 0..DIM {
            v += -d[(i, m)] * jet.g(m, j) + d_small[(i, m)] * r_t[(m, j)];
        }
        for pp in 0..DIM {
            let bracket = (0..DIM).map(|m| jet.c(pp, j, m) * r_t[(m, i)]).sum::<f64>() - g_bar[pp][(i, j)];
            v -= bracket * gy[pp];
        }
        v
    });
    let first = max_abs_mat(&(f_slash - (x - x.transpose()) * 0.5));

    // d3(F^2)/dy^i dy^p dy^m = (2/h11) dg_ip/dy^m, with dg/dy by central differences.
    let dg_fd: Vec<Vec<f64>> = (0..DIM)
        .map(|m| {
            central_diff_vec(
                |q| fundamental_metric(metric, h, q).map(|fm| flatten(&fm.g_low)),
                p,
                Axis::Y(m),
            )
        })
        .collect::<Result<_>>()?;
    let n_idx = |m: usize, j: usize| 4 + crate::curvature::i2(m, j);
    let bracket = |m: usize, j: usize, k: usize| {
        jet.delta_x(&jet.d_nl, k, n_idx(m, j)) - jet.delta_x(&jet.d_nl, j, n_idx(m, k))
    };
    let term = |i: usize, j: usize, k: usize| {
        let mut v = 0.0;
        for pp in 0..DIM {
            for m in 0..DIM {
                v += 2.0 * jet.h11.recip() * dg_fd[m][i * DIM + pp] * bracket(m, j, k) * y[pp];
            }
        }
        v
    };
    let mut second = 0.0f64;
    let mut third = 0.0f64;
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                let lhs = f_bar[i][j][k] + f_bar[j][k][i] + f_bar[k][i][j];
                let rhs = -(term(i, j, k) + term(j, k, i) + term(k, i, j)) / 8.0;
                second = second.max((lhs - rhs).abs());
                third = third.max((f_vert[i][j][k] + f_vert[j][k][i] + f_vert[k][i][j]).abs());
            }
        }
    }

    Ok(MaxwellData {
        field: EMField {
            f_2form: f,
            dbar,
            d,
            d_small,
            f_slash,
            f_bar,
            f_vert,
        },
        dbar_bar,
        g_bar,
        residuals: [first, second, third],
    })
}

/// Auxiliary tensors and covariant derivatives of `F` at `p`.
pub fn maxwell_auxiliaries(metric: &MRootStructure, h: &TemporalMetric, p: &JetPoint) -> Result<EMField> {
    let jet = ConnectionJet::new(metric, h, p)?;
    let torsion = torsion_from_jet(&jet);
    Ok(maxwell_from_jet(metric, h, &jet, &torsion)?.field)
}

/// `max |LHS - RHS|` for each of the three Maxwell equations at `p`.
pub fn maxwell_residuals(metric: &MRootStructure, h: &TemporalMetric, p: &JetPoint) -> Result<[f64; 3]> {
    let jet = ConnectionJet::new(metric, h, p)?;
    let torsion = torsion_from_jet(&jet);
    Ok(maxwell_from_jet(metric, h, &jet, &torsion)?.residuals)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp1() -> TemporalMetric {
        TemporalMetric::exponential(1.0).unwrap()
    }

    #[test]
    fn chernov_two_form_vanishes() {
        let p = JetPoint::new(0.2, [0.0; 4], [1.2, -0.3, 0.8, 1.9]).unwrap();
        let f = em_two_form(&MRootStructure::chernov(), &exp1(), &p).unwrap();
        assert!(max_abs_mat(&f) < 1e-10);
        assert!(max_abs_mat(&(f + f.transpose())) < 1e-12);
    }

    #[test]
    fn chernov_auxiliaries_at_ones() {
        let m = MRootStructure::chernov();
        let p = JetPoint::from_velocity([1.0; 4]);
        let em = maxwell_auxiliaries(&m, &exp1(), &p).unwrap();
        let g = fundamental_metric(&m, &exp1(), &p).unwrap().g_low;
        assert!(max_abs_mat(&(em.d_small - g)) < 1e-12);
        assert!(max_abs_mat(&(em.d - g * 0.5)) < 1e-12);
        assert!(em.dbar.iter().all(|v| v.abs() < 1e-12));
        assert!(max_abs_mat(&em.f_slash) < 1e-10);
    }

    #[test]
    fn chernov_constant_h_auxiliaries() {
        let m = MRootStructure::chernov();
        let h = TemporalMetric::constant(2.0).unwrap();
        let p = JetPoint::new(0.5, [0.0; 4], [0.4, 1.1, -1.3, 0.6]).unwrap();
        let em = maxwell_auxiliaries(&m, &h, &p).unwrap();
        let g = fundamental_metric(&m, &h, &p).unwrap().g_low;
        assert!(max_abs_mat(&em.d) < 1e-15);
        assert!(max_abs_mat(&(em.d_small - g * 0.5)) < 1e-12);
    }

    #[test]
    fn maxwell_residuals_vanish() {
        let p = JetPoint::new(-0.4, [0.3, 0.1, -0.2, 0.5], [1.2, -0.3, 0.8, 1.9]).unwrap();
        let r = maxwell_residuals(&MRootStructure::chernov(), &exp1(), &p).unwrap();
        assert!(r.iter().all(|v| *v < 1e-8), "{r:?}");
        let r = maxwell_residuals(&MRootStructure::quadratic_f2(), &exp1(), &p).unwrap();
        assert_eq!(r, [0.0; 3]);
        let f = em_two_form(&MRootStructure::quadratic_f2(), &exp1(), &p).unwrap();
        assert_eq!(f, Matrix4::zeros());
    }
}
