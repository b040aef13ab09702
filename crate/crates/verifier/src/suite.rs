//! Runs the check registry over seeded sample points.

use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use rheojet_core::sampling::{sample_nondegenerate_point, T_BOX};
use rheojet_core::MRootStructure;

use crate::checks::{registry, PointEval, Residual};
use crate::config::VerifyConfig;
use crate::error::VerifyError;
use crate::report::{CheckRecord, GeometryReport};

const NOTE_FULL_SPRAY: &str =
    "spray: the (1 - kappa) factor of the full spatial spray formula is applied verbatim; it only acts on x-dependent structures";
const NOTE_GK: &str =
    "maxwell: G^k_i1|j enters the first equation but G^k_j1 = 0 for every supported structure, so its nonzero path is untested";
const NOTE_X_DEPENDENT: &str =
    "x-dependent structure: locally-Minkowski reductions, vanishing families and the Maxwell checks are skipped";

/// Runs every applicable check at `cfg.samples` points; point `i` is drawn
/// with seed `cfg.seed + i`.
pub fn run_suite(cfg: &VerifyConfig) -> Result<GeometryReport, VerifyError> {
    cfg.validate()?;
    let metric = cfg.metric.load()?;
    run_suite_on(&metric, cfg)
}

/// [`run_suite`] for an already constructed structure; `cfg.metric` is only
/// echoed in the report.
pub fn run_suite_on(metric: &MRootStructure, cfg: &VerifyConfig) -> Result<GeometryReport, VerifyError> {
    cfg.validate()?;
    let h = &cfg.h.0;
    h.check_positive_on(-T_BOX, T_BOX, 201)
        .map_err(|e| VerifyError::Config(format!("temporal metric on [-{T_BOX}, {T_BOX}]: {e}")))?;
    let checks: Vec<_> = registry().into_iter().filter(|c| c.scope.admits(metric)).collect();
    for name in cfg.tolerances.keys() {
        if !registry().iter().any(|c| c.name == name) {
            return Err(VerifyError::Config(format!("tolerance override for unknown check `{name}`")));
        }
    }

    let per_point: Vec<Vec<Residual>> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| -> Result<Vec<Residual>, VerifyError> {
            let p = sample_nondegenerate_point(cfg.seed.wrapping_add(i as u64), metric)?;
            let eval = PointEval::new(metric, h, p, cfg.k)?;
            checks
                .iter()
                .map(|c| (c.eval)(&eval).map_err(VerifyError::from))
                .collect()
        })
        .collect::<Result<_, _>>()?;

    let records: Vec<CheckRecord> = checks
        .iter()
        .enumerate()
        .map(|(ci, c)| {
            let tolerance = cfg.tolerances.get(c.name).copied().unwrap_or_else(|| c.default_tolerance(metric));
            let mut max_residual: f64 = 0.0;
            let mut max_scaled: f64 = 0.0;
            let mut worst = None;
            let mut finite = true;
            for (i, row) in per_point.iter().enumerate() {
                let r = row[ci];
                finite &= r.abs.is_finite() && r.magnitude.is_finite();
                max_residual = max_residual.max(r.abs);
                if worst.is_none() || r.relative() > max_scaled {
                    max_scaled = r.relative();
                    worst = Some(i);
                }
            }
            CheckRecord {
                name: c.name.to_string(),
                description: c.description.to_string(),
                tolerance,
                max_residual,
                max_scaled_residual: max_scaled,
                worst_sample: worst,
                samples_used: per_point.len(),
                passed: finite && max_scaled <= tolerance,
            }
        })
        .collect();

    let mut notes = vec![NOTE_GK.to_string()];
    if metric.is_x_dependent() {
        notes.push(NOTE_FULL_SPRAY.to_string());
        notes.push(NOTE_X_DEPENDENT.to_string());
    }
    let timestamp_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(GeometryReport {
        overall_pass: records.iter().all(|r| r.passed),
        checks: records,
        seed: cfg.seed,
        samples: cfg.samples,
        config: cfg.clone(),
        notes,
        timestamp_unix,
    })
}
