//! The check registry: every identity the suite asserts, as data.
//!
//! Each check maps an evaluated point to a residual and a magnitude. A check
//! passes when `residual / max(1, magnitude)` stays within its tolerance;
//! `magnitude` is the size of the largest terms entering the identity, zero
//! for golden values that are compared absolutely.

use nalgebra::Matrix4;
use rheojet_core::algebra::{euler_residuals, CubicPoint};
use rheojet_core::connections::{cartan_c_routes, spray_full_formula, spray_minkowski, SprayPair};
use rheojet_core::curvature::{
    curvature_from_jet, einstein_from_ricci, ricci_from_curvature, torsion_from_jet, ConnectionJet,
    CurvatureSet, EinsteinSystem, RicciScalarSet, TorsionSet,
};
use rheojet_core::electromag::{maxwell_from_jet, MaxwellData};
use rheojet_core::metric::{chernov_metric_closed, definitional_metric_oracle, fundamental_metric, FundamentalMetric};
use rheojet_core::{algebra, connections, JetPoint, MRootStructure, Result, TemporalMetric, DIM};

/// Residual of one identity at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub abs: f64,
    pub magnitude: f64,
}

impl Residual {
    pub fn exact(abs: f64) -> Self {
        Residual { abs, magnitude: 0.0 }
    }

    pub fn scaled(abs: f64, magnitude: f64) -> Self {
        Residual { abs, magnitude }
    }

    pub fn relative(&self) -> f64 {
        self.abs / self.magnitude.max(1.0)
    }
}

/// Every object the registered checks read, evaluated once per point.
pub struct PointEval<'a> {
    pub metric: &'a MRootStructure,
    pub h: &'a TemporalMetric,
    pub point: JetPoint,
    pub fm: FundamentalMetric,
    pub cubic: Option<CubicPoint>,
    pub spray: SprayPair,
    pub jet: ConnectionJet,
    pub torsion: TorsionSet,
    pub curvature: CurvatureSet,
    pub ricci: RicciScalarSet,
    pub einstein: EinsteinSystem,
    pub maxwell: MaxwellData,
}

impl<'a> PointEval<'a> {
    pub fn new(metric: &'a MRootStructure, h: &'a TemporalMetric, point: JetPoint, k: f64) -> Result<Self> {
        let fm = fundamental_metric(metric, h, &point)?;
        let cubic = if metric.is_cubic() {
            Some(algebra::cubic_point(metric, &point)?)
        } else {
            None
        };
        let spray = connections::canonical_spray(metric, h, &point)?;
        let jet = ConnectionJet::new(metric, h, &point)?;
        let torsion = torsion_from_jet(&jet);
        let curvature = curvature_from_jet(&jet, &torsion);
        let ricci = ricci_from_curvature(metric, &jet, &curvature)?;
        let einstein = einstein_from_ricci(metric, &jet, &ricci, k)?;
        let maxwell = maxwell_from_jet(metric, h, &jet, &torsion)?;
        Ok(PointEval {
            metric,
            h,
            point,
            fm,
            cubic,
            spray,
            jet,
            torsion,
            curvature,
            ricci,
            einstein,
            maxwell,
        })
    }

    fn c_max(&self) -> f64 {
        self.jet.cc.c.max_abs()
    }

    /// Size of quadratic connection terms, the scale of every curvature-level identity.
    fn c_squared(&self) -> f64 {
        let c = self.c_max().max(1.0);
        c * c
    }
}

/// Which structures a check applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    All,
    Cubic,
    Chernov,
    QuadraticF2,
    /// Structures without `x`-dependence.
    LocallyMinkowski,
    CustomLocallyMinkowski,
}

impl Scope {
    pub fn admits(self, m: &MRootStructure) -> bool {
        match self {
            Scope::All => true,
            Scope::Cubic => m.is_cubic(),
            Scope::Chernov => m.is_chernov(),
            Scope::QuadraticF2 => !m.is_cubic(),
            Scope::LocallyMinkowski => !m.is_x_dependent(),
            Scope::CustomLocallyMinkowski => m.is_cubic() && !m.is_chernov() && !m.is_x_dependent(),
        }
    }
}

pub struct Check {
    pub name: &'static str,
    pub description: &'static str,
    pub tolerance: f64,
    /// Tolerance for custom structures, whose nonlinear connection is a
    /// finite difference of the spray.
    pub fd_route_tolerance: f64,
    pub scope: Scope,
    pub eval: fn(&PointEval) -> Result<Residual>,
}

impl Check {
    pub fn default_tolerance(&self, metric: &MRootStructure) -> f64 {
        if metric.is_cubic() && !metric.is_chernov() {
            self.fd_route_tolerance
        } else {
            self.tolerance
        }
    }

    fn fd_route(mut self, tol: f64) -> Self {
        self.fd_route_tolerance = tol;
        self
    }
}

fn mat_max(m: &Matrix4<f64>) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

fn vec_max(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn metric_inverse(e: &PointEval) -> Result<Residual> {
    let r = mat_max(&(e.fm.g_low * e.fm.g_up - Matrix4::identity()));
    Ok(Residual::scaled(r, mat_max(&e.fm.g_low) * mat_max(&e.fm.g_up)))
}

fn metric_definitional(e: &PointEval) -> Result<Residual> {
    let oracle = definitional_metric_oracle(e.metric, e.h, &e.point)?;
    let mut r = mat_max(&(e.fm.g_low - oracle));
    if let (true, Some(cp)) = (e.metric.is_chernov(), &e.cubic) {
        let closed = chernov_metric_closed(&cp.contractions, &e.point.y);
        r = r.max(mat_max(&(closed - oracle)));
    }
    Ok(Residual::scaled(r, mat_max(&e.fm.g_low)))
}

fn metric_homogeneity(e: &PointEval) -> Result<Residual> {
    let mut r: f64 = 0.0;
    for lambda in [1.7, -0.6] {
        let q = e.point.scale_velocity(lambda);
        let g = fundamental_metric(e.metric, e.h, &q)?.g_low;
        r = r.max(mat_max(&(g - e.fm.g_low)));
    }
    Ok(Residual::scaled(r, mat_max(&e.fm.g_low)))
}

fn f2_metric_golden(e: &PointEval) -> Result<Residual> {
    let g = Matrix4::from_fn(|i, j| if i == j { 0.0 } else { 0.5 });
    let g_up = Matrix4::from_fn(|i, j| if i == j { -4.0 / 3.0 } else { 2.0 / 3.0 });
    Ok(Residual::exact(mat_max(&(e.fm.g_low - g)).max(mat_max(&(e.fm.g_up - g_up)))))
}

fn cubic<'e>(e: &'e PointEval) -> &'e CubicPoint {
    e.cubic.as_ref().expect("scope admits cubic structures only")
}

fn euler_identities(e: &PointEval) -> Result<Residual> {
    let c = &cubic(e).contractions;
    let r = vec_max(&euler_residuals(c, &e.point));
    let y = vec_max(&e.point.y).max(1.0);
    Ok(Residual::scaled(r, mat_max(&c.sij1) * y * y))
}

fn half_identities(e: &PointEval) -> Result<Residual> {
    let cp = cubic(e);
    let y = &e.point.y;
    let d = &cp.duals;
    let mut r = (d.bold_s111 - cp.contractions.s111 / 2.0).abs();
    for j in 0..DIM {
        r = r.max((d.s1_up[j] - y[j] / 2.0).abs());
    }
    Ok(Residual::exact(r))
}

fn spray_chernov(e: &PointEval) -> Result<Residual> {
    let k = e.jet.kappa;
    let r = (0..DIM).fold(0.0f64, |a, i| a.max((e.spray.g[i] + k / 2.0 * e.point.y[i]).abs()));
    Ok(Residual::exact(r))
}

fn nonlinear_reduction(e: &PointEval) -> Result<Residual> {
    let k = e.jet.kappa;
    let n = mat_max(&(e.jet.nc.n + Matrix4::identity() * (k / 2.0)));
    let m = (0..DIM).fold(0.0f64, |a, i| a.max((e.jet.nc.m[i] + k * e.point.y[i]).abs()));
    Ok(Residual::exact(n.max(m)))
}

fn spray_routes(e: &PointEval) -> Result<Residual> {
    let full = spray_full_formula(e.metric, e.h, &e.point)?;
    let reduced = spray_minkowski(e.metric, e.h, &e.point)?;
    let r = (0..DIM).fold(0.0f64, |a, i| a.max((full[i] - reduced[i]).abs()));
    Ok(Residual::scaled(r, vec_max(&reduced)))
}

fn cartan_symmetry(e: &PointEval) -> Result<Residual> {
    let c = &e.jet.cc.c;
    let mut r: f64 = 0.0;
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                r = r.max((c.at3(i, j, k) - c.at3(i, k, j)).abs());
            }
        }
    }
    Ok(Residual::exact(r))
}

fn cartan_trace(e: &PointEval) -> Result<Residual> {
    let c = &e.jet.cc.c;
    let y = &e.point.y;
    let mut r: f64 = 0.0;
    for i in 0..DIM {
        for j in 0..DIM {
            r = r.max((0..DIM).map(|m| c.at3(i, j, m) * y[m]).sum::<f64>().abs());
        }
    }
    Ok(Residual::scaled(r, e.c_max() * vec_max(y)))
}

fn cartan_reduction(e: &PointEval) -> Result<Residual> {
    let cc = &e.jet.cc;
    Ok(Residual::scaled(cc.l.max_abs_diff(&cc.c.scaled(e.jet.kappa / 2.0)), e.c_max()))
}

fn cartan_routes(e: &PointEval) -> Result<Residual> {
    let (closed, general) = cartan_c_routes(e.metric, &e.point)?;
    Ok(Residual::scaled(closed.max_abs_diff(&general), closed.max_abs()))
}

fn connection_flat(e: &PointEval) -> Result<Residual> {
    let cc = &e.jet.cc;
    Ok(Residual::exact(cc.l.max_abs().max(cc.c.max_abs()).max(mat_max(&cc.gk_j1))))
}

fn torsion_zero(e: &PointEval) -> Result<Residual> {
    Ok(Residual::scaled(e.torsion.zero.max_abs(), e.c_max() * vec_max(&e.point.y)))
}

fn torsion_temporal(e: &PointEval) -> Result<Residual> {
    let k = e.jet.kappa;
    let expected = Matrix4::identity() * ((e.jet.dkappa_dt - k * k) / 2.0);
    Ok(Residual::exact(mat_max(&(e.torsion.r_temporal - expected))))
}

fn curvature_proportional(e: &PointEval) -> Result<Residual> {
    let c = &e.curvature;
    let r = c.r_horiz.max_abs_diff(&c.r_horiz_reduced).max(c.p_curv.max_abs_diff(&c.p_curv_reduced));
    Ok(Residual::scaled(r, e.c_squared()))
}

fn curvature_zero(e: &PointEval) -> Result<Residual> {
    let c = &e.curvature;
    let mut r = c.zero_family_max();
    if !e.metric.is_cubic() {
        r = r.max(c.s_vert.max_abs()).max(c.r_horiz.max_abs()).max(c.p_curv.max_abs());
    }
    Ok(Residual::scaled(r, e.c_squared()))
}

fn curvature_antisymmetry(e: &PointEval) -> Result<Residual> {
    let s = &e.curvature.s_vert;
    let mut r: f64 = 0.0;
    for l in 0..DIM {
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    r = r.max((s.at4(l, i, j, k) + s.at4(l, i, k, j)).abs());
                }
            }
        }
    }
    Ok(Residual::scaled(r, e.c_squared()))
}

fn ricci_closed(e: &PointEval) -> Result<Residual> {
    let r = mat_max(&(e.ricci.s_vert_ricci - e.ricci.s_vert_ricci_closed));
    Ok(Residual::scaled(r, e.c_squared()))
}

fn ricci_symmetry(e: &PointEval) -> Result<Residual> {
    let s = &e.ricci.s_vert_ricci;
    Ok(Residual::scaled(mat_max(&(s - s.transpose())), e.c_squared()))
}

fn scalar_routes(e: &PointEval) -> Result<Residual> {
    let r = (e.ricci.sc - e.ricci.sc_factored).abs();
    Ok(Residual::scaled(r, e.c_squared() * mat_max(&e.fm.g_up) * e.jet.h11.max(1.0)))
}

fn einstein_residual(e: &PointEval) -> Result<Residual> {
    let scale = e.c_squared() * mat_max(&e.fm.g_up).max(1.0) * mat_max(&e.fm.g_low).max(1.0);
    Ok(Residual::scaled(e.einstein.residual, scale * e.jet.h11.max(1.0 / e.jet.h11)))
}

fn einstein_zero_blocks(e: &PointEval) -> Result<Residual> {
    Ok(Residual::exact(e.einstein.zero_blocks().iter().fold(0.0, |a, (_, v)| a.max(*v))))
}

fn einstein_mixed_symmetry(e: &PointEval) -> Result<Residual> {
    Ok(Residual::exact(mat_max(&(e.einstein.t_mixed - e.einstein.t_mixed_dual))))
}

fn einstein_trivial(e: &PointEval) -> Result<Residual> {
    let s = &e.einstein;
    Ok(Residual::exact(s.max_abs().max(e.ricci.sc.abs())))
}

fn em_zero(e: &PointEval) -> Result<Residual> {
    let f = &e.maxwell.field.f_2form;
    let scale = mat_max(&e.fm.g_low) * (mat_max(&e.jet.nc.n) + e.jet.cc.l.max_abs() * vec_max(&e.point.y));
    Ok(Residual::scaled(mat_max(f), scale / e.jet.h11))
}

fn em_antisymmetry(e: &PointEval) -> Result<Residual> {
    let f = &e.maxwell.field.f_2form;
    Ok(Residual::exact(mat_max(&(f + f.transpose()))))
}

fn maxwell(e: &PointEval) -> Result<Residual> {
    let r = vec_max(&e.maxwell.residuals);
    let scale = mat_max(&e.fm.g_low) * e.c_squared() * vec_max(&e.point.y).max(1.0);
    Ok(Residual::scaled(r, scale / e.jet.h11))
}

/// The registered checks with their default tolerances.
pub fn registry() -> Vec<Check> {
    use Scope::*;
    let c = |name, description, tolerance, scope, eval| Check {
        name,
        description,
        tolerance,
        fd_route_tolerance: tolerance,
        scope,
        eval,
    };
    vec![
        c("metric-inverse", "g_low g_up = I", 1e-9, All, metric_inverse as fn(&PointEval) -> Result<Residual>),
        c("metric-definitional", "closed-form g against (h11/2) FD Hessian of F^2", 1e-5, All, metric_definitional),
        c("metric-homogeneity", "g(lambda y) = g(y)", 1e-9, All, metric_homogeneity),
        c("f2-metric", "g = (1 - delta)/2, g^-1 = (2/3)(1 - 3 delta)", 1e-15, QuadraticF2, f2_metric_golden),
        c("euler-identities", "homogeneity identities of the cubic contractions", 1e-9, Cubic, euler_identities),
        c("half-identities", "S_1^j = y^j/2 and bold S_111 = S_111/2", 1e-10, Cubic, half_identities),
        c("spray-chernov", "G = -(kappa/2) y", 1e-10, Chernov, spray_chernov),
        c("nonlinear-reduction", "N = -(kappa/2) delta, M = -kappa y", 1e-10, LocallyMinkowski, nonlinear_reduction).fd_route(1e-6),
        c("spray-routes", "full spray formula against the locally-Minkowski reduction", 1e-9, CustomLocallyMinkowski, spray_routes),
        c("cartan-symmetry", "C^i_j(k) = C^i_k(j)", 1e-12, All, cartan_symmetry),
        c("cartan-trace", "C^i_j(m) y^m = 0", 1e-9, All, cartan_trace),
        c("cartan-reduction", "L = (kappa/2) C", 1e-12, LocallyMinkowski, cartan_reduction).fd_route(1e-6),
        c("cartan-routes", "closed-form C against the general formula", 1e-7, Cubic, cartan_routes),
        c("connection-flat", "G, L and C vanish", 1e-12, QuadraticF2, connection_flat),
        c("torsion-zero", "five vanishing torsion families", 1e-9, LocallyMinkowski, torsion_zero),
        c("torsion-temporal", "R_temporal = (dkappa/dt - kappa^2)/2 delta", 1e-10, LocallyMinkowski, torsion_temporal).fd_route(1e-4),
        c("curvature-proportional", "R = (kappa^2/4) S and P = (kappa/2) S", 1e-6, LocallyMinkowski, curvature_proportional).fd_route(1e-5),
        c("curvature-zero", "vanishing curvature families", 1e-9, LocallyMinkowski, curvature_zero).fd_route(1e-5),
        c("curvature-antisymmetry", "S^l_i(j)(k) antisymmetric in (j)(k)", 1e-9, All, curvature_antisymmetry),
        c("ricci-closed", "contracted vertical Ricci tensor against the closed form", 1e-6, All, ricci_closed),
        c("ricci-symmetry", "vertical Ricci tensor symmetric", 1e-9, All, ricci_symmetry),
        c("scalar-routes", "contracted scalar curvature against the factored form", 1e-6, LocallyMinkowski, scalar_routes).fd_route(1e-5),
        c("einstein-residual", "Ric - (Sc/2) G - K T blockwise", 1e-8, All, einstein_residual).fd_route(1e-6),
        c("einstein-zero-blocks", "T_1i, T_i1, T_(i)1, T_1(i) vanish", 1e-12, LocallyMinkowski, einstein_zero_blocks),
        c("einstein-mixed-symmetry", "T_i(j) = T_(i)j", 0.0, All, einstein_mixed_symmetry),
        c("einstein-trivial", "stress-energy and scalar curvature vanish", 1e-12, QuadraticF2, einstein_trivial),
        c("em-zero", "electromagnetic 2-form vanishes", 1e-10, LocallyMinkowski, em_zero).fd_route(1e-8),
        c("em-antisymmetry", "F_(i)j = -F_(j)i", 1e-12, All, em_antisymmetry),
        c("maxwell", "three Maxwell equations", 1e-8, LocallyMinkowski, maxwell),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let mut names: Vec<_> = registry().iter().map(|c| c.name).collect();
        let n = names.len();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), n);
    }

    #[test]
    fn scopes() {
        let ch = MRootStructure::chernov();
        let f2 = MRootStructure::quadratic_f2();
        assert!(Scope::Chernov.admits(&ch) && !Scope::Chernov.admits(&f2));
        assert!(Scope::QuadraticF2.admits(&f2) && !Scope::Cubic.admits(&f2));
        assert!(!Scope::CustomLocallyMinkowski.admits(&ch));
    }

    #[test]
    fn relative_residual_floors_magnitude_at_one() {
        assert_eq!(Residual::exact(2e-9).relative(), 2e-9);
        assert_eq!(Residual::scaled(2e-9, 0.5).relative(), 2e-9);
        assert!((Residual::scaled(2e-9, 100.0).relative() - 2e-11).abs() < 1e-25);
    }
}
