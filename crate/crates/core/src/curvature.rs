//! Torsion and curvature d-tensors of the Cartan canonical connection, the
//! Ricci tensors, the scalar curvature and the Einstein system.
//!
//! Every quantity is computed from the general `h`-normal formulas with
//! finite-difference partials of the connection coefficients. Closed
//! reductions valid for `x`-independent cubic structures are exposed next to
//! them so the two routes can be compared.
//!
//! Index conventions (all row-major):
//! - `s_vert[l, i, j, k] = S^l_i(j)(k)`, `r_horiz[l, i, j, k] = R^l_ijk`,
//!   `p_curv[l, i, j, k] = P^l_ij(k)`;
//! - `r_temporal_curv[l, i, 0, k] = R^l_i1k`, `p_temporal_curv[l, i, 0, k] = P^l_i1(k)`;
//! - `p_mixed[k, i, j] = P^(k)_(1)i(j)`, `r_temporal[(k, j)] = R^(k)_(1)1j`.

use nalgebra::Matrix4;

use crate::algebra::cubic_point;
use crate::connections::{
    cartan_connection, connection_y_derivatives, nonlinear_connection,
    nonlinear_connection_y_derivatives, CartanConnection, NonlinearConnection,
};
use crate::error::{GeometryError, Result};
use crate::fd::{central_diff_vec, Axis};
use crate::jet::{temporal_kappa, JetPoint, TemporalMetric, DIM};
use crate::metric::{cubic_metric, f2_metric, metric_y_derivative, metric_y_second_derivative};
use crate::structure::MRootStructure;
use crate::tensor::{max_abs_mat, Array3, Array4, DTensor, Slot, Symmetry};

pub(crate) const G_OFFSET: usize = 0;
pub(crate) const L_OFFSET: usize = 16;
pub(crate) const C_OFFSET: usize = 80;
const CONN_LEN: usize = 144;

pub(crate) fn i2(i: usize, j: usize) -> usize {
    i * DIM + j
}

pub(crate) fn i3(i: usize, j: usize, k: usize) -> usize {
    (i * DIM + j) * DIM + k
}

fn conn_vec(cc: &CartanConnection) -> Vec<f64> {
    let mut v = Vec::with_capacity(CONN_LEN);
    for k in 0..DIM {
        for j in 0..DIM {
            v.push(cc.gk_j1[(k, j)]);
        }
    }
    v.extend_from_slice(cc.l.values());
    v.extend_from_slice(cc.c.values());
    v
}

fn nl_vec(nc: &NonlinearConnection) -> Vec<f64> {
    let mut v = nc.m.to_vec();
    for i in 0..DIM {
        for j in 0..DIM {
            v.push(nc.n[(i, j)]);
        }
    }
    v
}

fn axis_slot(axis: Axis) -> usize {
    match axis {
        Axis::T => 0,
        Axis::X(i) => 1 + i,
        Axis::Y(i) => 5 + i,
    }
}

/// The connection at a point together with the partial derivatives of its
/// coefficients along every jet coordinate: central differences in `t` and
/// `x`, closed product-rule expressions in `y`.
#[derive(Debug, Clone)]
pub struct ConnectionJet {
    pub point: JetPoint,
    pub h11: f64,
    pub kappa: f64,
    pub dkappa_dt: f64,
    pub cc: CartanConnection,
    pub nc: NonlinearConnection,
    pub g: Matrix4<f64>,
    pub g_up: Matrix4<f64>,
    /// `dg_jk/dy^m` as `[j][k][m]`.
    pub dg_dy: Array3,
    /// `d2 g_jk / dy^m dy^l` as `[j][k][m][l]`.
    pub d2g_dy: Array4,
    /// `dN^i_j/dy^l` as `[l][(i, j)]`.
    pub dn_dy: [Matrix4<f64>; DIM],
    conn: Vec<f64>,
    pub(crate) d_conn: Vec<Vec<f64>>,
    pub(crate) d_nl: Vec<Vec<f64>>,
}

impl ConnectionJet {
    pub fn new(metric: &MRootStructure, h: &TemporalMetric, p: &JetPoint) -> Result<Self> {
        let (kappa, dkappa_dt) = temporal_kappa(h, p.t)?;
        let h11 = h.h_lower(p.t)?;
        let cc = cartan_connection(metric, h, p)?;
        let nc = nonlinear_connection(metric, h, p)?;
        let mut d_conn = Vec::with_capacity(9);
        let mut d_nl = Vec::with_capacity(9);
        for axis in [Axis::T, Axis::X(0), Axis::X(1), Axis::X(2), Axis::X(3)] {
            d_conn.push(central_diff_vec(
                |q| cartan_connection(metric, h, q).map(|c| conn_vec(&c)),
                p,
                axis,
            )?);
            d_nl.push(central_diff_vec(
                |q| nonlinear_connection(metric, h, q).map(|n| nl_vec(&n)),
                p,
                axis,
            )?);
        }
        let dn_dy = nonlinear_connection_y_derivatives(metric, h, p)?;
        let dy = connection_y_derivatives(metric, p, &cc, &nc, &dn_dy)?;
        for l in 0..DIM {
            let mut v = Vec::with_capacity(CONN_LEN);
            for k in 0..DIM {
                for j in 0..DIM {
                    v.push(dy.g[l][(k, j)]);
                }
            }
            v.extend(dy.l[l].iter().flatten().flatten());
            v.extend(dy.c[l].iter().flatten().flatten());
            d_conn.push(v);
            let mut w: Vec<f64> = (0..DIM).map(|q| if q == l { -kappa } else { 0.0 }).collect();
            for i in 0..DIM {
                for j in 0..DIM {
                    w.push(dn_dy[l][(i, j)]);
                }
            }
            d_nl.push(w);
        }
        let (g, g_up, dg_dy, d2g_dy) = if metric.is_cubic() {
            let (cp, g, g_up) = cubic_metric(metric, p)?;
            (g, g_up, metric_y_derivative(&cp), metric_y_second_derivative(&cp))
        } else {
            let (g, g_up) = f2_metric();
            (g, g_up, [[[0.0; DIM]; DIM]; DIM], [[[[0.0; DIM]; DIM]; DIM]; DIM])
        };
        Ok(ConnectionJet {
            point: *p,
            h11,
            kappa,
            dkappa_dt,
            conn: conn_vec(&cc),
            cc,
            nc,
            g,
            g_up,
            dg_dy,
            d2g_dy,
            dn_dy,
            d_conn,
            d_nl,
        })
    }

    pub(crate) fn g(&self, k: usize, j: usize) -> f64 {
        self.conn[G_OFFSET + i2(k, j)]
    }

    pub(crate) fn l(&self, i: usize, j: usize, k: usize) -> f64 {
        self.conn[L_OFFSET + i3(i, j, k)]
    }

    pub(crate) fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        self.conn[C_OFFSET + i3(i, j, k)]
    }

    pub(crate) fn m(&self, p: usize) -> f64 {
        self.nc.m[p]
    }

    pub(crate) fn n(&self, i: usize, j: usize) -> f64 {
        self.nc.n[(i, j)]
    }

    pub(crate) fn partial(table: &[Vec<f64>], axis: Axis, q: usize) -> f64 {
        table[axis_slot(axis)][q]
    }

    /// `d/dt - M^p d/dy^p` of entry `q` of a differentiated table.
    pub(crate) fn delta_t(&self, table: &[Vec<f64>], q: usize) -> f64 {
        let mut v = Self::partial(table, Axis::T, q);
        for p in 0..DIM {
            v -= self.m(p) * Self::partial(table, Axis::Y(p), q);
        }
        v
    }

    /// `d/dx^k - N^p_k d/dy^p` of entry `q` of a differentiated table.
    pub(crate) fn delta_x(&self, table: &[Vec<f64>], k: usize, q: usize) -> f64 {
        let mut v = Self::partial(table, Axis::X(k), q);
        for p in 0..DIM {
            v -= self.n(p, k) * Self::partial(table, Axis::Y(p), q);
        }
        v
    }

    pub(crate) fn vertical(table: &[Vec<f64>], k: usize, q: usize) -> f64 {
        Self::partial(table, Axis::Y(k), q)
    }
}

/// Torsion d-tensors: the three effective families and the five families
/// that vanish for the Cartan canonical connection.
#[derive(Debug, Clone)]
pub struct TorsionSet {
    /// `P^(k)_(1)i(j) = dN^k_i/dy^j - L^k_ji`.
    pub p_mixed: DTensor,
    /// `P^k_i(j) = C^k_i(j)`.
    pub p_vert: DTensor,
    /// `R^(k)_(1)1j = dM^k/dx^j - dN^k_j/dt` (adapted derivatives).
    pub r_temporal: Matrix4<f64>,
    pub zero: TorsionZeroFamilies,
}

#[derive(Debug, Clone)]
pub struct TorsionZeroFamilies {
    /// `T^m_1j = -G^m_j1`.
    pub t_1j: Matrix4<f64>,
    /// `T^m_ij = L^m_ij - L^m_ji`.
    pub t_ij: DTensor,
    /// `P^(m)_(1)1(j) = dM^m/dy^j + kappa delta^m_j - G^m_j1`.
    pub p_1j: Matrix4<f64>,
    /// `R^(m)_(1)ij = dN^m_i/dx^j - dN^m_j/dx^i` (adapted derivatives).
    pub r_ij: DTensor,
    /// `S^(m)_(1)(i)(j) = C^m_i(j) - C^m_j(i)`.
    pub s_ij: DTensor,
}

impl TorsionZeroFamilies {
    /// `(name, max |entry|)` for each family.
    pub fn magnitudes(&self) -> [(&'static str, f64); 5] {
        [
            ("T^m_1j", max_abs_mat(&self.t_1j)),
            ("T^m_ij", self.t_ij.max_abs()),
            ("P^(m)_(1)1(j)", max_abs_mat(&self.p_1j)),
            ("R^(m)_(1)ij", self.r_ij.max_abs()),
            ("S^(m)_(1)(i)(j)", self.s_ij.max_abs()),
        ]
    }

    pub fn max_abs(&self) -> f64 {
        self.magnitudes().iter().fold(0.0, |m, (_, v)| m.max(*v))
    }
}

fn rank3(slots: [Slot; 3], f: impl Fn(usize, usize, usize) -> f64) -> DTensor {
    let mut values = Vec::with_capacity(DIM * DIM * DIM);
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                values.push(f(i, j, k));
            }
        }
    }
    DTensor::from_values(slots.to_vec(), values)
}

fn rank4(slots: [Slot; 4], f: impl Fn(usize, usize, usize, usize) -> f64) -> DTensor {
    let shape: Vec<usize> = slots.iter().map(|s| s.extent()).collect();
    let mut values = Vec::with_capacity(shape.iter().product());
    for a in 0..shape[0] {
        for b in 0..shape[1] {
            for c in 0..shape[2] {
                for d in 0..shape[3] {
                    values.push(f(a, b, c, d));
                }
            }
        }
    }
    DTensor::from_values(slots.to_vec(), values)
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

/// Torsion from the general formulas, using the differentiated connection.
pub fn torsion_from_jet(jet: &ConnectionJet) -> TorsionSet {
    use Slot::*;
    let d_nl = &jet.d_nl;
    let n_idx = |i: usize, j: usize| 4 + i2(i, j);
    let p_mixed = rank3([VerticalUpper, SpatialLower, VerticalLower], |k, i, j| {
        ConnectionJet::vertical(d_nl, j, n_idx(k, i)) - jet.l(k, j, i)
    });
    let r_temporal = Matrix4::from_fn(|k, j| jet.delta_x(d_nl, j, k) - jet.delta_t(d_nl, n_idx(k, j)));
    let zero = TorsionZeroFamilies {
        t_1j: Matrix4::from_fn(|m, j| -jet.g(m, j)),
        t_ij: rank3([SpatialUpper, SpatialLower, SpatialLower], |m, i, j| {
            jet.l(m, i, j) - jet.l(m, j, i)
        })
        .with_symmetry(1, 2, Symmetry::Antisymmetric),
        p_1j: Matrix4::from_fn(|m, j| {
            ConnectionJet::vertical(d_nl, j, m) + jet.kappa * delta(m, j) - jet.g(m, j)
        }),
        r_ij: rank3([VerticalUpper, SpatialLower, SpatialLower], |m, i, j| {
            jet.delta_x(d_nl, j, n_idx(m, i)) - jet.delta_x(d_nl, i, n_idx(m, j))
        })
        .with_symmetry(1, 2, Symmetry::Antisymmetric),
        s_ij: rank3([VerticalUpper, VerticalLower, VerticalLower], |m, i, j| {
            jet.c(m, i, j) - jet.c(m, j, i)
        })
        .with_symmetry(1, 2, Symmetry::Antisymmetric),
    };
    TorsionSet {
        p_mixed,
        p_vert: jet.cc.c.clone(),
        r_temporal,
        zero,
    }
}

/// Torsion d-tensors at `p` by the general formulas.
pub fn torsion_tensors(metric: &MRootStructure, h: &TemporalMetric, p: &JetPoint) -> Result<TorsionSet> {
    Ok(torsion_from_jet(&ConnectionJet::new(metric, h, p)?))
}

/// Torsion of an `x`-independent structure in reduced form:
/// `P_mixed = -(kappa/2) C`, `P_vert = C`, `R_temporal = (dkappa/dt - kappa^2)/2 delta`.
pub fn torsion_closed(cc: &CartanConnection, h: &TemporalMetric, t: f64) -> Result<TorsionSet> {
    use Slot::*;
    let (kappa, dkappa) = temporal_kappa(h, t)?;
    let vanishing = |slots: [Slot; 3]| {
        DTensor::zeros(slots.to_vec()).with_symmetry(1, 2, Symmetry::Antisymmetric)
    };
    Ok(TorsionSet {
        p_mixed: cc
            .c
            .scaled(-kappa / 2.0)
            .relabeled(vec![VerticalUpper, SpatialLower, VerticalLower]),
        p_vert: cc.c.clone(),
        r_temporal: Matrix4::identity() * (0.5 * (dkappa - kappa * kappa)),
        zero: TorsionZeroFamilies {
            t_1j: Matrix4::zeros(),
            t_ij: vanishing([SpatialUpper, SpatialLower, SpatialLower]),
            p_1j: Matrix4::zeros(),
            r_ij: vanishing([VerticalUpper, SpatialLower, SpatialLower]),
            s_ij: vanishing([VerticalUpper, VerticalLower, VerticalLower]),
        },
    })
}

/// Curvature d-tensors: the three effective families, their reduced forms
/// and the two families that vanish for the Cartan canonical connection.
#[derive(Debug, Clone)]
pub struct CurvatureSet {
    pub s_vert: DTensor,
    pub r_horiz: DTensor,
    pub p_curv: DTensor,
    /// `(kappa^2 / 4) S_vert`.
    pub r_horiz_reduced: DTensor,
    /// `(kappa / 2) S_vert`.
    pub p_curv_reduced: DTensor,
    /// `R^l_i1k`.
    pub r_temporal_curv: DTensor,
    /// `P^l_i1(k)`.
    pub p_temporal_curv: DTensor,
}

impl CurvatureSet {
    pub fn zero_family_max(&self) -> f64 {
        self.r_temporal_curv.max_abs().max(self.p_temporal_curv.max_abs())
    }
}

/// Curvature from the general formulas, using the differentiated connection
/// and the torsion computed from the same data.
pub fn curvature_from_jet(jet: &ConnectionJet, torsion: &TorsionSet) -> CurvatureSet {
    use Slot::*;
    let dc = &jet.d_conn;
    let kappa = jet.kappa;
    let c_idx = |i, j, k| C_OFFSET + i3(i, j, k);
    let l_idx = |i, j, k| L_OFFSET + i3(i, j, k);
    let g_idx = |k, j| G_OFFSET + i2(k, j);
    let p_mixed = |m: usize, j: usize, k: usize| torsion.p_mixed.at3(m, j, k);

    let s_vert = rank4([SpatialUpper, SpatialLower, VerticalLower, VerticalLower], |l, i, j, k| {
        let mut v = ConnectionJet::vertical(dc, k, c_idx(l, i, j))
            - ConnectionJet::vertical(dc, j, c_idx(l, i, k));
        for m in 0..DIM {
            v += jet.c(m, i, j) * jet.c(l, m, k) - jet.c(m, i, k) * jet.c(l, m, j);
        }
        v
    })
    .with_symmetry(2, 3, Symmetry::Antisymmetric);

    let r_horiz = rank4([SpatialUpper, SpatialLower, SpatialLower, SpatialLower], |l, i, j, k| {
        let mut v = jet.delta_x(dc, k, l_idx(l, i, j)) - jet.delta_x(dc, j, l_idx(l, i, k));
        for m in 0..DIM {
            v += jet.l(m, i, j) * jet.l(l, m, k) - jet.l(m, i, k) * jet.l(l, m, j);
            v += jet.c(l, i, m) * torsion.zero.r_ij.at3(m, j, k);
        }
        v
    })
    .with_symmetry(2, 3, Symmetry::Antisymmetric);

    // C^l_i(k)|j
    let c_bar = |l: usize, i: usize, k: usize, j: usize| {
        let mut v = jet.delta_x(dc, j, c_idx(l, i, k));
        for m in 0..DIM {
            v += jet.c(m, i, k) * jet.l(l, m, j)
                - jet.c(l, m, k) * jet.l(m, i, j)
                - jet.c(l, i, m) * jet.l(m, k, j);
        }
        v
    };
    let p_curv = rank4([SpatialUpper, SpatialLower, SpatialLower, VerticalLower], |l, i, j, k| {
        let mut v = ConnectionJet::vertical(dc, k, l_idx(l, i, j)) - c_bar(l, i, k, j);
        for m in 0..DIM {
            v += jet.c(l, i, m) * p_mixed(m, j, k);
        }
        v
    });

    let r_temporal_curv = rank4([SpatialUpper, SpatialLower, TemporalLower, SpatialLower], |l, i, _, k| {
        let mut v = jet.delta_x(dc, k, g_idx(l, i)) - jet.delta_t(dc, l_idx(l, i, k));
        for m in 0..DIM {
            v += jet.g(m, i) * jet.l(l, m, k) - jet.l(m, i, k) * jet.g(l, m);
            v += jet.c(l, i, m) * torsion.r_temporal[(m, k)];
        }
        v
    });

    // C^l_i(k)/1
    let c_slash = |l: usize, i: usize, k: usize| {
        let mut v = jet.delta_t(dc, c_idx(l, i, k)) + kappa * jet.c(l, i, k);
        for m in 0..DIM {
            v += jet.c(m, i, k) * jet.g(l, m) - jet.c(l, m, k) * jet.g(m, i) - jet.c(l, i, m) * jet.g(m, k);
        }
        v
    };
    let p_temporal_curv = rank4([SpatialUpper, SpatialLower, TemporalLower, VerticalLower], |l, i, _, k| {
        let mut v = ConnectionJet::vertical(dc, k, g_idx(l, i)) - c_slash(l, i, k);
        for m in 0..DIM {
            v += jet.c(l, i, m) * torsion.zero.p_1j[(m, k)];
        }
        v
    });

    let r_horiz_reduced = s_vert
        .scaled(kappa * kappa / 4.0)
        .relabeled(vec![SpatialUpper, SpatialLower, SpatialLower, SpatialLower]);
    let p_curv_reduced = DTensor::from_values(
        vec![SpatialUpper, SpatialLower, SpatialLower, VerticalLower],
        s_vert.scaled(kappa / 2.0).values().to_vec(),
    );
    CurvatureSet {
        s_vert,
        r_horiz,
        p_curv,
        r_horiz_reduced,
        p_curv_reduced,
        r_temporal_curv,
        p_temporal_curv,
    }
}

/// Curvature d-tensors at `p` by the general formulas.
pub fn curvature_tensors(
    metric: &MRootStructure,
    h: &TemporalMetric,
    p: &JetPoint,
) -> Result<CurvatureSet> {
    let jet = ConnectionJet::new(metric, h, p)?;
    let torsion = torsion_from_jet(&jet);
    Ok(curvature_from_jet(&jet, &torsion))
}

/// Ricci tensors and scalar curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct RicciScalarSet {
    /// `R_ij = R^r_ijr`.
    pub r_ij: Matrix4<f64>,
    /// `P_i(j) = P^r_ij(r)`.
    pub p_ij: Matrix4<f64>,
    /// Vertical Ricci tensor `S_(i)(j) = S^r_i(j)(r)` by contraction.
    pub s_vert_ricci: Matrix4<f64>,
    /// Vertical Ricci tensor from the closed expression in the cubic contractions.
    pub s_vert_ricci_closed: Matrix4<f64>,
    /// `S^11 = g^pq S_(p)(q)` from the closed vertical Ricci tensor.
    pub s11: f64,
    /// `g^pq R_pq + h11 g^pq S_(p)(q)` from the contracted tensors.
    pub sc: f64,
    /// `(4 h11 + kappa^2) / 4 * S^11`.
    pub sc_factored: f64,
    /// `R^r_i1r`.
    pub r_i1: [f64; DIM],
    /// `P^r_i1(r)`.
    pub p_i1: [f64; DIM],
}

fn contract_last(t: &DTensor) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| (0..DIM).map(|r| t.at4(r, i, j, r)).sum())
}

fn contract_temporal(t: &DTensor) -> [f64; DIM] {
    std::array::from_fn(|i| (0..DIM).map(|r| t.get(&[r, i, 0, r])).sum())
}

/// Closed vertical Ricci tensor
/// `-9 S^pq1 S^rm1 (S_ijp S_qrm - S_ipr S_jqm) + S_ij1 / (12 S_111) - S_i11 S_j11 / (18 S_111^2)`;
/// zero for the quadratic preset.
pub fn vertical_ricci_closed(metric: &MRootStructure, p: &JetPoint) -> Result<Matrix4<f64>> {
    if !metric.is_cubic() {
        return Ok(Matrix4::zeros());
    }
    let cp = cubic_point(metric, p)?;
    let s = &cp.coeffs;
    let inv = &cp.duals.sjk1_up;
    let c = &cp.contractions;
    // t1[q][r][a] = sum_m S^am S_qrm
    let mut t1 = [[[0.0; DIM]; DIM]; DIM];
    for q in 0..DIM {
        for r in 0..DIM {
            for x in 0..DIM {
                t1[q][r][x] = (0..DIM).map(|m| inv[(x, m)] * s[q][r][m]).sum();
            }
        }
    }
    let trace_q: [f64; DIM] = std::array::from_fn(|q| (0..DIM).map(|r| t1[q][r][r]).sum());
    let mut out = Matrix4::zeros();
    for i in 0..DIM {
        for j in 0..DIM {
            let mut first = 0.0;
            let mut second = 0.0;
            for pp in 0..DIM {
                for q in 0..DIM {
                    first += inv[(pp, q)] * s[i][j][pp] * trace_q[q];
                }
            }
            // sum_{p,q,r,m} S^pq S^rm S_ipr S_jqm = sum_{p,r} S_ipr sum_q S^pq (sum_m S^rm S_jqm)
            for pp in 0..DIM {
                for r in 0..DIM {
                    let inner: f64 = (0..DIM).map(|q| inv[(pp, q)] * t1[j][q][r]).sum();
                    second += s[i][pp][r] * inner;
                }
            }
            out[(i, j)] = -9.0 * (first - second) + c.sij1[(i, j)] / (12.0 * c.s111)
                - c.si11[i] * c.si11[j] / (18.0 * c.s111 * c.s111);
        }
    }
    Ok(out)
}

fn metric_pair(metric: &MRootStructure, p: &JetPoint) -> Result<(Matrix4<f64>, Matrix4<f64>)> {
    if metric.is_cubic() {
        let (_, g, g_up) = cubic_metric(metric, p)?;
        Ok((g, g_up))
    } else {
        Ok(f2_metric())
    }
}

fn trace_with(g_up: &Matrix4<f64>, m: &Matrix4<f64>) -> f64 {
    g_up.component_mul(m).sum()
}

/// Ricci tensors and scalar curvature from an evaluated curvature set.
pub fn ricci_from_curvature(
    metric: &MRootStructure,
    jet: &ConnectionJet,
    curv: &CurvatureSet,
) -> Result<RicciScalarSet> {
    let p = &jet.point;
    let (_, g_up) = metric_pair(metric, p)?;
    let r_ij = contract_last(&curv.r_horiz);
    let p_ij = contract_last(&curv.p_curv);
    let s_vert_ricci = contract_last(&curv.s_vert);
    let s_vert_ricci_closed = vertical_ricci_closed(metric, p)?;
    let s11 = trace_with(&g_up, &s_vert_ricci_closed);
    let sc = trace_with(&g_up, &r_ij) + jet.h11 * trace_with(&g_up, &s_vert_ricci);
    let sc_factored = (4.0 * jet.h11 + jet.kappa * jet.kappa) / 4.0 * s11;
    Ok(RicciScalarSet {
        r_ij,
        p_ij,
        s_vert_ricci,
        s_vert_ricci_closed,
        s11,
        sc,
        sc_factored,
        r_i1: contract_temporal(&curv.r_temporal_curv),
        p_i1: contract_temporal(&curv.p_temporal_curv),
    })
}

/// Ricci tensors and scalar curvature at `p`.
pub fn ricci_and_scalar(
    metric: &MRootStructure,
    h: &TemporalMetric,
    p: &JetPoint,
) -> Result<RicciScalarSet> {
    let jet = ConnectionJet::new(metric, h, p)?;
    let torsion = torsion_from_jet(&jet);
    let curv = curvature_from_jet(&jet, &torsion);
    ricci_from_curvature(metric, &jet, &curv)
}

/// Ricci d-tensor in blocks over the adapted basis `{d/dt, d/dx^i, d/dy^i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RicciBlocks {
    pub r_11: f64,
    pub r_1i: [f64; DIM],
    pub r_i1: [f64; DIM],
    pub r_1vi: [f64; DIM],
    pub r_vi1: [f64; DIM],
    pub r_ij: Matrix4<f64>,
    pub r_ivj: Matrix4<f64>,
    pub r_vij: Matrix4<f64>,
    pub r_vivj: Matrix4<f64>,
    pub sc: f64,
}

impl RicciBlocks {
    /// Blocks of an `x`-independent structure from the closed vertical Ricci
    /// tensor; the temporal-mixed blocks are contractions of the vanishing
    /// curvature families.
    pub fn reduced(ricci: &RicciScalarSet, kappa: f64, h11: f64, g_up: &Matrix4<f64>) -> Self {
        let s = &ricci.s_vert_ricci_closed;
        let r_ij = s * (kappa * kappa / 4.0);
        let mixed = s * (kappa / 2.0);
        let sc = trace_with(g_up, &r_ij) + h11 * trace_with(g_up, s);
        RicciBlocks {
            r_11: 0.0,
            r_1i: [0.0; DIM],
            r_i1: ricci.r_i1,
            r_1vi: [0.0; DIM],
            r_vi1: ricci.p_i1,
            r_ij,
            r_ivj: mixed,
            r_vij: mixed,
            r_vivj: *s,
            sc,
        }
    }

    /// Blocks from the contracted curvature tensors.
    pub fn contracted(ricci: &RicciScalarSet) -> Self {
        RicciBlocks {
            r_11: 0.0,
            r_1i: [0.0; DIM],
            r_i1: ricci.r_i1,
            r_1vi: [0.0; DIM],
            r_vi1: ricci.p_i1,
            r_ij: ricci.r_ij,
            r_ivj: ricci.p_ij,
            r_vij: ricci.p_ij,
            r_vivj: ricci.s_vert_ricci,
            sc: ricci.sc,
        }
    }
}

/// Stress-energy blocks induced by the geometry for a given Einstein constant.
#[derive(Debug, Clone, PartialEq)]
pub struct EinsteinSystem {
    pub k: f64,
    pub xi11: f64,
    pub t11: f64,
    /// `-(Sc / 2K) h11`, the direct form of `T_11`.
    pub t11_direct: f64,
    pub tij: Matrix4<f64>,
    pub tvert: Matrix4<f64>,
    /// `T_i(j)`.
    pub t_mixed: Matrix4<f64>,
    /// `T_(i)j`.
    pub t_mixed_dual: Matrix4<f64>,
    pub t_1i: [f64; DIM],
    pub t_i1: [f64; DIM],
    pub t_vi1: [f64; DIM],
    pub t_1vi: [f64; DIM],
    /// `max |Ric - (Sc/2) G - K T|` over all blocks.
    pub residual: f64,
}

impl EinsteinSystem {
    pub fn zero_blocks(&self) -> [(&'static str, f64); 4] {
        let m = |v: &[f64; DIM]| v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        [
            ("T_1i", m(&self.t_1i)),
            ("T_i1", m(&self.t_i1)),
            ("T_(i)1", m(&self.t_vi1)),
            ("T_1(i)", m(&self.t_1vi)),
        ]
    }

    pub fn max_abs(&self) -> f64 {
        [
            self.t11.abs(),
            max_abs_mat(&self.tij),
            max_abs_mat(&self.tvert),
            max_abs_mat(&self.t_mixed),
            max_abs_mat(&self.t_mixed_dual),
        ]
        .into_iter()
        .chain(self.zero_blocks().map(|(_, v)| v))
        .fold(0.0, f64::max)
    }
}

fn check_einstein_constant(k: f64) -> Result<()> {
    if k == 0.0 || !k.is_finite() {
        return Err(GeometryError::Parameter(format!(
            "Einstein constant must be finite and nonzero, got {k}"
        )));
    }
    Ok(())
}

fn vec_residual(a: &[f64; DIM], b: &[f64; DIM], k: f64) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - k * y).abs()))
}

/// `max |Ric - (Sc/2) G - K T|` blockwise, with `G = diag(h11, g, h^11 g)`.
pub fn einstein_residual(
    ric: &RicciBlocks,
    sys: &EinsteinSystem,
    h11: f64,
    g: &Matrix4<f64>,
) -> f64 {
    let k = sys.k;
    let half = ric.sc / 2.0;
    let zero = [0.0; DIM];
    [
        (ric.r_11 - half * h11 - k * sys.t11).abs(),
        max_abs_mat(&(ric.r_ij - g * half - sys.tij * k)),
        max_abs_mat(&(ric.r_vivj - g * (half / h11) - sys.tvert * k)),
        max_abs_mat(&(ric.r_ivj - sys.t_mixed * k)),
        max_abs_mat(&(ric.r_vij - sys.t_mixed_dual * k)),
        vec_residual(&ric.r_1i, &sys.t_1i, k),
        vec_residual(&ric.r_i1, &sys.t_i1, k),
        vec_residual(&ric.r_1vi, &sys.t_1vi, k),
        vec_residual(&ric.r_vi1, &sys.t_vi1, k),
        vec_residual(&zero, &zero, k),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Stress-energy blocks of an `x`-independent structure from the displayed
/// solution in terms of the vertical Ricci tensor.
pub fn einstein_reduced(
    s: &Matrix4<f64>,
    g: &Matrix4<f64>,
    g_up: &Matrix4<f64>,
    h11: f64,
    kappa: f64,
    k: f64,
) -> Result<EinsteinSystem> {
    check_einstein_constant(k)?;
    let s11 = trace_with(g_up, s);
    let xi11 = -(4.0 * h11 + kappa * kappa) / (8.0 * k);
    let sc = (4.0 * h11 + kappa * kappa) / 4.0 * s11;
    let mixed = s * (kappa / (2.0 * k));
    Ok(EinsteinSystem {
        k,
        xi11,
        t11: xi11 * s11 * h11,
        t11_direct: -sc / (2.0 * k) * h11,
        tij: s * (kappa * kappa / (4.0 * k)) + g * (xi11 * s11),
        tvert: s / k + g * (xi11 * s11 / h11),
        t_mixed: mixed,
        t_mixed_dual: mixed,
        t_1i: [0.0; DIM],
        t_i1: [0.0; DIM],
        t_vi1: [0.0; DIM],
        t_1vi: [0.0; DIM],
        residual: f64::NAN,
    })
}

/// Stress-energy blocks solved from arbitrary Ricci blocks.
pub fn einstein_from_blocks(ric: &RicciBlocks, g: &Matrix4<f64>, h11: f64, k: f64) -> Result<EinsteinSystem> {
    check_einstein_constant(k)?;
    let half = ric.sc / 2.0;
    let scale = |v: &[f64; DIM]| v.map(|x| x / k);
    Ok(EinsteinSystem {
        k,
        xi11: f64::NAN,
        t11: (ric.r_11 - half * h11) / k,
        t11_direct: -half * h11 / k,
        tij: (ric.r_ij - g * half) / k,
        tvert: (ric.r_vivj - g * (half / h11)) / k,
        t_mixed: ric.r_ivj / k,
        t_mixed_dual: ric.r_vij / k,
        t_1i: scale(&ric.r_1i),
        t_i1: scale(&ric.r_i1),
        t_vi1: scale(&ric.r_vi1),
        t_1vi: scale(&ric.r_1vi),
        residual: f64::NAN,
    })
}

/// Einstein system at `p` from already evaluated Ricci data.
pub fn einstein_from_ricci(
    metric: &MRootStructure,
    jet: &ConnectionJet,
    ricci: &RicciScalarSet,
    k: f64,
) -> Result<EinsteinSystem> {
    check_einstein_constant(k)?;
    let (g, g_up) = metric_pair(metric, &jet.point)?;
    let (blocks, mut sys) = if metric.is_x_dependent() {
        let blocks = RicciBlocks::contracted(ricci);
        let sys = einstein_from_blocks(&blocks, &g, jet.h11, k)?;
        (blocks, sys)
    } else {
        let blocks = RicciBlocks::reduced(ricci, jet.kappa, jet.h11, &g_up);
        let sys = einstein_reduced(&ricci.s_vert_ricci_closed, &g, &g_up, jet.h11, jet.kappa, k)?;
        (blocks, sys)
    };
    sys.residual = einstein_residual(&blocks, &sys, jet.h11, &g);
    Ok(sys)
}

/// Einstein system at `p` for the Einstein constant `k`.
pub fn einstein_system(
    metric: &MRootStructure,
    h: &TemporalMetric,
    p: &JetPoint,
    k: f64,
) -> Result<EinsteinSystem> {
    check_einstein_constant(k)?;
    let jet = ConnectionJet::new(metric, h, p)?;
    let torsion = torsion_from_jet(&jet);
    let curv = curvature_from_jet(&jet, &torsion);
    let ricci = ricci_from_curvature(metric, &jet, &curv)?;
    einstein_from_ricci(metric, &jet, &ricci, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> JetPoint {
        JetPoint::new(0.3, [0.1, -0.2, 0.4, 0.0], [1.1, 0.7, -0.4, 1.6]).unwrap()
    }

    #[test]
    fn torsion_temporal_values() {
        let m = MRootStructure::chernov();
        let p = sample();
        for (h, expect) in [
            (TemporalMetric::exponential(1.0).unwrap(), -0.5),
            (TemporalMetric::constant(3.0).unwrap(), 0.0),
        ] {
            let t = torsion_tensors(&m, &h, &p).unwrap();
            assert!(max_abs_mat(&(t.r_temporal - Matrix4::identity() * expect)) < 1e-9);
            assert!(t.zero.max_abs() < 1e-9);
        }
        let poly = TemporalMetric::polynomial(vec![1.0, 0.0, 1.0]).unwrap();
        let q = JetPoint::new(1.0, p.x, p.y).unwrap();
        let t = torsion_tensors(&m, &poly, &q).unwrap();
        assert!(max_abs_mat(&(t.r_temporal - Matrix4::identity() * -0.125)) < 1e-9);
    }

    #[test]
    fn constant_h_kills_mixed_torsion() {
        let m = MRootStructure::chernov();
        let h = TemporalMetric::constant(1.0).unwrap();
        let t = torsion_tensors(&m, &h, &sample()).unwrap();
        assert!(t.p_mixed.max_abs() < 1e-12);
        assert_eq!(t.r_temporal, Matrix4::zeros());
    }

    #[test]
    fn curvature_proportional_for_chernov() {
        let m = MRootStructure::chernov();
        let h = TemporalMetric::exponential(1.0).unwrap();
        let c = curvature_tensors(&m, &h, &sample()).unwrap();
        assert!(c.s_vert.max_abs() > 1e-3);
        assert!(c.r_horiz.max_abs_diff(&c.r_horiz_reduced) < 1e-6);
        assert!(c.p_curv.max_abs_diff(&c.p_curv_reduced) < 1e-6);
        assert!(c.zero_family_max() < 1e-9);
    }

    #[test]
    fn vertical_ricci_routes_agree() {
        let m = MRootStructure::chernov();
        let h = TemporalMetric::exponential(0.5).unwrap();
        let r = ricci_and_scalar(&m, &h, &sample()).unwrap();
        assert!(max_abs_mat(&(r.s_vert_ricci - r.s_vert_ricci_closed)) < 1e-6);
        assert!(max_abs_mat(&(r.s_vert_ricci_closed - r.s_vert_ricci_closed.transpose())) < 1e-9);
        assert!((r.sc - r.sc_factored).abs() < 1e-6);
    }

    #[test]
    fn scalar_curvature_factor_reduces_to_one() {
        let m = MRootStructure::chernov();
        let h = TemporalMetric::constant(1.0).unwrap();
        let r = ricci_and_scalar(&m, &h, &sample()).unwrap();
        assert!((r.sc_factored - r.s11).abs() < 1e-15);
    }

    #[test]
    fn einstein_blocks() {
        let m = MRootStructure::chernov();
        let h = TemporalMetric::exponential(1.0).unwrap();
        let e = einstein_system(&m, &h, &sample(), 2.0).unwrap();
        assert!(e.residual < 1e-8);
        assert_eq!(e.t_mixed, e.t_mixed_dual);
        assert!((e.t11 - e.t11_direct).abs() < 1e-12 * e.t11.abs().max(1.0));
        let p = JetPoint::new(0.0, [0.0; 4], sample().y).unwrap();
        let e0 = einstein_system(&m, &TemporalMetric::constant(2.0).unwrap(), &p, 1.0).unwrap();
        assert!((e0.xi11 + 1.0).abs() < 1e-15);
        assert_eq!(max_abs_mat(&e0.t_mixed), 0.0);
    }

    #[test]
    fn einstein_constant_must_be_nonzero() {
        let m = MRootStructure::chernov();
        let h = TemporalMetric::constant(1.0).unwrap();
        assert!(matches!(
            einstein_system(&m, &h, &sample(), 0.0),
            Err(GeometryError::Parameter(_))
        ));
    }

    #[test]
    fn quadratic_preset_is_flat() {
        let m = MRootStructure::quadratic_f2();
        let h = TemporalMetric::exponential(0.7).unwrap();
        let p = sample();
        let c = curvature_tensors(&m, &h, &p).unwrap();
        assert_eq!(c.s_vert.max_abs(), 0.0);
        assert_eq!(c.r_horiz.max_abs(), 0.0);
        assert_eq!(c.p_curv.max_abs(), 0.0);
        let r = ricci_and_scalar(&m, &h, &p).unwrap();
        assert_eq!(r.sc, 0.0);
        let e = einstein_system(&m, &h, &p, 1.0).unwrap();
        assert_eq!(e.max_abs(), 0.0);
    }
}
