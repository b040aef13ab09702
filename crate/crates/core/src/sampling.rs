//! Seeded rejection sampling of nondegenerate jet points.

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::check_nondegenerate;
use crate::error::{GeometryError, Result};
use crate::jet::{JetPoint, DIM};
use crate::structure::MRootStructure;

/// Half-width of the sampling box for `t`.
pub const T_BOX: f64 = 1.0;
/// Half-width of the sampling box for each `x^i`.
pub const X_BOX: f64 = 1.0;
/// Half-width of the sampling box for each `y^i`.
pub const Y_BOX: f64 = 2.0;
/// Candidates drawn before giving up.
pub const SAMPLE_BUDGET: usize = 10_000;

/// A point of `[-1, 1] x [-1, 1]^4 x [-2, 2]^4` where `|S_111|` and `|D_1111|`
/// exceed the structure's floor. Deterministic in `seed`.
pub fn sample_nondegenerate_point(seed: u64, metric: &MRootStructure) -> Result<JetPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t_dist = Uniform::new_inclusive(-T_BOX, T_BOX);
    let x_dist = Uniform::new_inclusive(-X_BOX, X_BOX);
    let y_dist = Uniform::new_inclusive(-Y_BOX, Y_BOX);
    for _ in 0..SAMPLE_BUDGET {
        let t = t_dist.sample(&mut rng);
        let x: [f64; DIM] = std::array::from_fn(|_| x_dist.sample(&mut rng));
        let y: [f64; DIM] = std::array::from_fn(|_| y_dist.sample(&mut rng));
        let p = JetPoint::new(t, x, y)?;
        match check_nondegenerate(metric, &p) {
            Ok(()) => return Ok(p),
            Err(e) if e.is_degeneracy() => continue,
            Err(e) => return Err(e),
        }
    }
    Err(GeometryError::SamplingExhausted {
        seed,
        attempts: SAMPLE_BUDGET,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::contract_cubic;

    #[test]
    fn deterministic() {
        let m = MRootStructure::chernov();
        assert_eq!(
            sample_nondegenerate_point(7, &m).unwrap(),
            sample_nondegenerate_point(7, &m).unwrap()
        );
    }

    #[test]
    fn samples_clear_the_floor() {
        let m = MRootStructure::chernov();
        for seed in 0..1000 {
            let p = sample_nondegenerate_point(seed, &m).unwrap();
            let s: f64 = (0..4)
                .flat_map(|a| (a + 1..4).flat_map(move |b| (b + 1..4).map(move |c| (a, b, c))))
                .map(|(a, b, c)| p.y[a] * p.y[b] * p.y[c])
                .sum();
            assert!(s.abs() > m.floor());
            assert!((s - contract_cubic(&m, &p).unwrap().s111).abs() < 1e-12);
            assert!(p.y.iter().all(|v| v.abs() <= Y_BOX) && p.t.abs() <= T_BOX);
        }
    }

    #[test]
    fn seeds_do_not_collapse() {
        let m = MRootStructure::chernov();
        let mut pts: Vec<_> = (1..=100)
            .map(|s| sample_nondegenerate_point(s, &m).unwrap())
            .collect();
        pts.sort_by(|a, b| a.y.partial_cmp(&b.y).unwrap());
        pts.dedup();
        assert!(pts.len() >= 95);
    }

    #[test]
    fn impossible_floor_exhausts_budget() {
        let m = MRootStructure::chernov().with_floor(1e9).unwrap();
        assert!(matches!(
            sample_nondegenerate_point(1, &m),
            Err(GeometryError::SamplingExhausted { .. })
        ));
    }
}
