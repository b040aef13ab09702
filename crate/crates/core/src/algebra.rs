//! Contractions of the cubic structure `S_pqr(x)` with the fiber velocity and
//! their duals.
//!
//! With `y = y_1`, the primal contractions are
//! `S_111 = S_pqr y^p y^q y^r`, `S_i11 = dS_111/dy^i`, `S_ij1 = d2S_111/dy^i dy^j`,
//! and the duals are built from the inverse `S^{jk1}` of `S_ij1`.

use nalgebra::Matrix4;

use crate::error::{GeometryError, Result};
use crate::jet::{JetPoint, DIM};
use crate::structure::{Coefficients, MRootStructure, MetricKind};

/// Below this magnitude of `y^i` the Chernov form `(S_111 y^i - S_4) / (y^i)^2`
/// is replaced by the direct elementary-symmetric sum.
pub const CHERNOV_DIVISION_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct CubicContractions {
    pub s111: f64,
    pub si11: [f64; DIM],
    pub sij1: Matrix4<f64>,
    /// `S_[1]1 = y^1 + y^2 + y^3 + y^4`.
    pub s1_1: f64,
    /// `S_[4]1111 = y^1 y^2 y^3 y^4`.
    pub s4_1111: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualContractions {
    /// `S^{jk1}`, the inverse of `S_ij1`.
    pub sjk1_up: Matrix4<f64>,
    /// `S_1^j = S^{jp1} S_p11`.
    pub s1_up: [f64; DIM],
    /// Bold `S_111` defined by `3 S_111 = S^{pq1} S_p11 S_q11`.
    pub bold_s111: f64,
    /// `det(S_ij1)`.
    pub d1111: f64,
}

/// Everything the cubic pipeline needs at one point.
#[derive(Debug, Clone)]
pub struct CubicPoint {
    pub coeffs: Coefficients,
    pub contractions: CubicContractions,
    pub duals: DualContractions,
}

fn sum_and_product(y: &[f64; DIM]) -> (f64, f64) {
    (y.iter().sum(), y.iter().product())
}

/// Contractions for an arbitrary coefficient table.
pub fn contract_generic(s: &Coefficients, y: &[f64; DIM]) -> CubicContractions {
    let mut sij1 = Matrix4::zeros();
    for i in 0..DIM {
        for j in 0..DIM {
            sij1[(i, j)] = 6.0 * (0..DIM).map(|p| s[i][j][p] * y[p]).sum::<f64>();
        }
    }
    let mut si11 = [0.0; DIM];
    for (i, v) in si11.iter_mut().enumerate() {
        *v = 0.5 * (0..DIM).map(|j| sij1[(i, j)] * y[j]).sum::<f64>();
    }
    let s111 = si11.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / 3.0;
    let (s1_1, s4_1111) = sum_and_product(y);
    CubicContractions {
        s111,
        si11,
        sij1,
        s1_1,
        s4_1111,
    }
}

/// Chernov contractions from the elementary-symmetric closed forms.
pub fn chernov_contractions(y: &[f64; DIM]) -> CubicContractions {
    let (s1_1, s4_1111) = sum_and_product(y);
    let s111 = y[0] * y[1] * y[2] + y[0] * y[1] * y[3] + y[0] * y[2] * y[3] + y[1] * y[2] * y[3];
    let mut si11 = [0.0; DIM];
    for (i, v) in si11.iter_mut().enumerate() {
        *v = if y[i].abs() >= CHERNOV_DIVISION_GUARD {
            (s111 * y[i] - s4_1111) / (y[i] * y[i])
        } else {
            // Removable singularity: e2 of the other three components.
            let o: Vec<f64> = (0..DIM).filter(|&k| k != i).map(|k| y[k]).collect();
            o[0] * o[1] + o[0] * o[2] + o[1] * o[2]
        };
    }
    let mut sij1 = Matrix4::zeros();
    for i in 0..DIM {
        for j in 0..DIM {
            if i != j {
                sij1[(i, j)] = s1_1 - y[i] - y[j];
            }
        }
    }
    CubicContractions {
        s111,
        si11,
        sij1,
        s1_1,
        s4_1111,
    }
}

/// Primal contractions of the cubic structure at `p`.
pub fn contract_cubic(metric: &MRootStructure, p: &JetPoint) -> Result<CubicContractions> {
    match metric.kind() {
        MetricKind::Chernov => Ok(chernov_contractions(&p.y)),
        MetricKind::CustomCubic(table) => Ok(contract_generic(&table.coefficients_at(&p.x), &p.y)),
        MetricKind::QuadraticF2 => Err(quadratic_unsupported()),
    }
}

pub(crate) fn quadratic_unsupported() -> GeometryError {
    GeometryError::Unsupported("the quadratic preset has no cubic structure".into())
}

/// `D_1111 = 4 [4 S_[4]1111 - S_[1]1 S_111]` for Chernov.
pub fn chernov_determinant(c: &CubicContractions) -> f64 {
    4.0 * (4.0 * c.s4_1111 - c.s1_1 * c.s111)
}

/// Chernov closed form of `S^{jk1}`. The `1/y` factors of the textbook form
/// are cancelled algebraically, so no component of `y` may cause a division.
pub fn chernov_inverse(y: &[f64; DIM], d1111: f64) -> Matrix4<f64> {
    let mut inv = Matrix4::zeros();
    for j in 0..DIM {
        for k in 0..DIM {
            inv[(j, k)] = if j == k {
                // (1/y^j) prod_l (y^j + y^l) with the l = j factor 2 y^j cancelled.
                2.0 * (0..DIM)
                    .filter(|&l| l != j)
                    .map(|l| y[j] + y[l])
                    .product::<f64>()
                    / d1111
            } else {
                // S_4 / (y^j y^k) is the product of the two remaining components.
                let rest: f64 = (0..DIM).filter(|&l| l != j && l != k).map(|l| y[l]).product();
                -2.0 / d1111 * (y[j] + y[k]) * (y[j] * y[k] + rest)
            };
        }
    }
    inv
}

/// LU-based inverse and determinant of `S_ij1`.
pub fn invert_numeric(sij1: &Matrix4<f64>) -> Option<(Matrix4<f64>, f64)> {
    let lu = sij1.lu();
    let det = lu.determinant();
    lu.try_inverse().map(|inv| (inv, det))
}

fn duals_from(c: &CubicContractions, sjk1_up: Matrix4<f64>, d1111: f64) -> DualContractions {
    let mut s1_up = [0.0; DIM];
    for (j, v) in s1_up.iter_mut().enumerate() {
        *v = (0..DIM).map(|p| sjk1_up[(j, p)] * c.si11[p]).sum();
    }
    let bold_s111 = s1_up.iter().zip(&c.si11).map(|(a, b)| a * b).sum::<f64>() / 3.0;
    DualContractions {
        sjk1_up,
        s1_up,
        bold_s111,
        d1111,
    }
}

fn degenerate(quantity: &'static str, value: f64, metric: &MRootStructure, p: &JetPoint) -> GeometryError {
    GeometryError::Degenerate {
        quantity,
        value,
        floor: metric.floor(),
        point: *p,
    }
}

fn duals_checked(
    metric: &MRootStructure,
    p: &JetPoint,
    c: &CubicContractions,
) -> Result<DualContractions> {
    match metric.kind() {
        MetricKind::Chernov => {
            let d = chernov_determinant(c);
            if !(d.abs() > metric.floor()) {
                return Err(degenerate("D_1111", d, metric, p));
            }
            Ok(duals_from(c, chernov_inverse(&p.y, d), d))
        }
        MetricKind::CustomCubic(_) => {
            let (inv, d) = invert_numeric(&c.sij1)
                .ok_or_else(|| degenerate("D_1111", 0.0, metric, p))?;
            if !(d.abs() > metric.floor()) {
                return Err(degenerate("D_1111", d, metric, p));
            }
            Ok(duals_from(c, inv, d))
        }
        MetricKind::QuadraticF2 => Err(quadratic_unsupported()),
    }
}

/// Dual contractions `S^{jk1}`, `S_1^j`, bold `S_111` and `D_1111`.
pub fn dual_contractions(metric: &MRootStructure, p: &JetPoint) -> Result<DualContractions> {
    let c = contract_cubic(metric, p)?;
    duals_checked(metric, p, &c)
}

/// Fails unless `|S_111|` and `|D_1111|` both exceed the floor.
pub fn check_nondegenerate(metric: &MRootStructure, p: &JetPoint) -> Result<()> {
    if metric.is_cubic() {
        cubic_point(metric, p).map(|_| ())
    } else {
        Ok(())
    }
}

/// Coefficients, contractions and duals at `p`, with both degeneracy checks.
pub fn cubic_point(metric: &MRootStructure, p: &JetPoint) -> Result<CubicPoint> {
    let coeffs = metric
        .coefficients_at(&p.x)
        .ok_or_else(quadratic_unsupported)?;
    let contractions = contract_cubic(metric, p)?;
    if !(contractions.s111.abs() > metric.floor()) {
        return Err(degenerate("S_111", contractions.s111, metric, p));
    }
    let duals = duals_checked(metric, p, &contractions)?;
    Ok(CubicPoint {
        coeffs,
        contractions,
        duals,
    })
}

/// Residuals of the homogeneity identities
/// `S_i11 y^i = 3 S_111`, `S_ij1 y^j = 2 S_i11`, `S_ij1 y^i y^j = 6 S_111`.
pub fn euler_residuals(c: &CubicContractions, p: &JetPoint) -> [f64; 3] {
    let y = &p.y;
    let first = (c.si11.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() - 3.0 * c.s111).abs();
    let second = (0..DIM)
        .map(|i| ((0..DIM).map(|j| c.sij1[(i, j)] * y[j]).sum::<f64>() - 2.0 * c.si11[i]).abs())
        .fold(0.0, f64::max);
    let quad: f64 = (0..DIM)
        .flat_map(|i| (0..DIM).map(move |j| (i, j)))
        .map(|(i, j)| c.sij1[(i, j)] * y[i] * y[j])
        .sum();
    [first, second, (quad - 6.0 * c.s111).abs()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::CubicTable;

    fn chernov_at(y: [f64; 4]) -> (CubicContractions, DualContractions) {
        let m = MRootStructure::chernov();
        let p = JetPoint::from_velocity(y);
        (contract_cubic(&m, &p).unwrap(), dual_contractions(&m, &p).unwrap())
    }

    #[test]
    fn chernov_at_ones() {
        let (c, d) = chernov_at([1.0; 4]);
        assert_eq!(c.s111, 4.0);
        assert_eq!(c.si11, [3.0; 4]);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(c.sij1[(i, j)], if i == j { 0.0 } else { 2.0 });
                let expect = if i == j { -1.0 / 3.0 } else { 1.0 / 6.0 };
                assert!((d.sjk1_up[(i, j)] - expect).abs() < 1e-15);
            }
        }
        assert_eq!(d.d1111, -48.0);
    }

    #[test]
    fn chernov_at_one_two_three_four() {
        let (c, d) = chernov_at([1.0, 2.0, 3.0, 4.0]);
        assert_eq!(c.s111, 50.0);
        assert_eq!(c.si11, [26.0, 19.0, 14.0, 11.0]);
        let euler: f64 = c.si11.iter().zip([1.0, 2.0, 3.0, 4.0]).map(|(a, b)| a * b).sum();
        assert_eq!(euler, 150.0);
        assert_eq!(d.d1111, -1616.0);
        let det = invert_numeric(&c.sij1).unwrap().1;
        assert!((det + 1616.0).abs() < 1e-9);
    }

    #[test]
    fn chernov_homogeneity_scaling() {
        let (c, _) = chernov_at([2.0; 4]);
        assert_eq!(c.s111, 32.0);
    }

    #[test]
    fn chernov_half_identities() {
        let y = [0.7, -1.3, 1.9, 0.4];
        let (c, d) = chernov_at(y);
        for j in 0..4 {
            assert!((d.s1_up[j] - y[j] / 2.0).abs() < 1e-12);
        }
        assert!((d.bold_s111 - c.s111 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn division_guard_uses_direct_sum() {
        let y = [1e-12, 2.0, 3.0, 4.0];
        let c = chernov_contractions(&y);
        let g = contract_generic(&CubicTable::chernov().coefficients_at(&[0.0; 4]), &y);
        assert!((c.si11[0] - 26.0).abs() < 1e-9);
        for i in 0..4 {
            assert!((c.si11[i] - g.si11[i]).abs() < 1e-9);
        }
        // exactly zero component
        let c0 = chernov_contractions(&[0.0, 2.0, 3.0, 4.0]);
        assert_eq!(c0.si11[0], 26.0);
    }

    #[test]
    fn euler_residuals_vanish() {
        let (c, _) = chernov_at([1.0; 4]);
        let r = euler_residuals(&c, &JetPoint::from_velocity([1.0; 4]));
        assert!(r.iter().all(|v| *v < 1e-12));
        let y = [1.0, 2.0, 3.0, 4.0];
        let (c, _) = chernov_at(y);
        let r = euler_residuals(&c, &JetPoint::from_velocity(y));
        assert!(r.iter().all(|v| *v < 1e-10));
    }

    #[test]
    fn degenerate_determinant_reported() {
        // y = (1, 1, 1, -1): S_111 = -2, D = 4 [4 (-1) - 2 (-2)] = 0.
        let m = MRootStructure::chernov();
        let p = JetPoint::from_velocity([1.0, 1.0, 1.0, -1.0]);
        let err = dual_contractions(&m, &p).unwrap_err();
        assert!(matches!(err, GeometryError::Degenerate { quantity: "D_1111", .. }));
        assert!(err.is_degeneracy());
    }

    #[test]
    fn quadratic_preset_is_rejected() {
        let m = MRootStructure::quadratic_f2();
        let p = JetPoint::from_velocity([1.0; 4]);
        assert!(matches!(contract_cubic(&m, &p), Err(GeometryError::Unsupported(_))));
    }
}
