//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints one PASS/FAIL line; exits nonzero when any criterion fails.

use std::process::ExitCode;

use nalgebra::Matrix4;
use rheojet_core::connections::cartan_connection;
use rheojet_core::curvature::{curvature_tensors, einstein_system, ricci_and_scalar, torsion_tensors};
use rheojet_core::electromag::em_two_form;
use rheojet_core::fd::{central_diff_vec, Axis};
use rheojet_core::metric::{definitional_metric_oracle, fundamental_metric};
use rheojet_core::sampling::sample_nondegenerate_point;
use rheojet_core::{CubicTable, JetPoint, MRootStructure, TemporalMetric, DIM};
use rheojet_verifier::{run_suite, run_suite_on, GeometryReport, HSelector, MetricSelector, VerifyConfig};

const CUSTOM_TABLE: &str = "\
1 1 1 0.31
1 1 2 -0.42
1 1 3 0.17
1 1 4 0.05
1 2 2 0.66
1 2 3 0.23
1 2 4 -0.58
1 3 3 -0.11
1 3 4 0.47
1 4 4 0.09
2 2 2 -0.27
2 2 3 0.38
2 2 4 0.14
2 3 3 0.52
2 3 4 -0.19
2 4 4 -0.73
3 3 3 0.21
3 3 4 -0.36
3 4 4 0.44
4 4 4 0.12
";

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

fn cfg(metric: MetricSelector, h: TemporalMetric, samples: usize) -> VerifyConfig {
    VerifyConfig {
        metric,
        h: HSelector(h),
        samples,
        ..VerifyConfig::default()
    }
}

fn exp1() -> TemporalMetric {
    TemporalMetric::exponential(1.0).unwrap()
}

fn h_families() -> [TemporalMetric; 3] {
    [
        TemporalMetric::constant(1.5).unwrap(),
        exp1(),
        TemporalMetric::polynomial(vec![1.0, 0.3, 0.2]).unwrap(),
    ]
}

/// Joint outcome of named report checks, with the worst absolute and scaled
/// residuals for the detail line.
fn checks(reports: &[&GeometryReport], names: &[&str]) -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for name in names {
        let mut abs: f64 = 0.0;
        let mut scaled: f64 = 0.0;
        let mut tol = f64::NAN;
        for r in reports {
            let c = r.check(name).unwrap_or_else(|| panic!("check {name} missing"));
            passed &= c.passed;
            abs = abs.max(c.max_residual);
            scaled = scaled.max(c.max_scaled_residual);
            tol = c.tolerance;
        }
        parts.push(format!("{name} abs {abs:.1e} scaled {scaled:.1e} tol {tol:.0e}"));
    }
    Outcome::new(passed, parts.join("; "))
}

fn and(a: Outcome, b: Outcome) -> Outcome {
    Outcome::new(a.passed && b.passed, format!("{}; {}", a.detail, b.detail))
}

fn mat_max(m: &Matrix4<f64>) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

/// `C^i_j(k) = (g^im / 2) dg_jk/dy^m` with `g^-1` inverted from the FD
/// Hessian metric and `dg/dy` by central differences.
fn cartan_oracle(metric: &MRootStructure, h: &TemporalMetric, p: &JetPoint) -> [[[f64; DIM]; DIM]; DIM] {
    let g_fd = definitional_metric_oracle(metric, h, p).unwrap();
    let g_up = g_fd.try_inverse().unwrap();
    let dg: Vec<Vec<f64>> = (0..DIM)
        .map(|m| {
            central_diff_vec(
                |q| fundamental_metric(metric, h, q).map(|f| f.g_low.iter().copied().collect()),
                p,
                Axis::Y(m),
            )
            .unwrap()
        })
        .collect();
    // nalgebra iterates column-major; g is symmetric so (j, k) order is immaterial.
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            std::array::from_fn(|k| (0..DIM).map(|m| g_up[(i, m)] * dg[m][j * DIM + k]).sum::<f64>() / 2.0)
        })
    })
}

fn main() -> ExitCode {
    let chernov = run_suite(&cfg(MetricSelector::Chernov, exp1(), 100)).unwrap();
    let by_h: Vec<GeometryReport> = h_families()
        .into_iter()
        .map(|h| run_suite(&cfg(MetricSelector::Chernov, h, 100)).unwrap())
        .collect();
    let by_h_refs: Vec<&GeometryReport> = by_h.iter().collect();
    let custom_metric = MRootStructure::custom(CubicTable::parse(CUSTOM_TABLE).unwrap());
    let custom = run_suite_on(&custom_metric, &cfg(MetricSelector::Custom("inline".into()), exp1(), 20)).unwrap();
    let f2 = run_suite(&cfg(MetricSelector::F2, exp1(), 100)).unwrap();

    let mut results: Vec<(&str, Outcome)> = Vec::new();

    results.push((
        "inverse pair g_low g_up = I (100 Chernov, 20 custom)",
        checks(&[&chernov, &custom], &["metric-inverse"]),
    ));

    results.push((
        "closed-form g against FD Hessian of F^2",
        checks(&by_h_refs, &["metric-definitional"]),
    ));

    results.push((
        "S_1^j = y^j/2 and bold S_111 = S_111/2",
        checks(&[&chernov, &custom], &["half-identities"]),
    ));

    results.push((
        "Chernov G = -(kappa/2) y, N = -(kappa/2) delta for const, exp, poly",
        checks(&by_h_refs, &["spray-chernov", "nonlinear-reduction"]),
    ));

    results.push(("Cartan structure and value table at ones", {
        let base = checks(
            &by_h_refs,
            &["cartan-symmetry", "cartan-trace", "cartan-reduction", "cartan-routes"],
        );
        let m = MRootStructure::chernov();
        let h = TemporalMetric::constant(1.0).unwrap();
        let p = JetPoint::from_velocity([1.0; 4]);
        let c = cartan_connection(&m, &h, &p).unwrap().c;
        let oracle = cartan_oracle(&m, &h, &p);
        let mut table_err: f64 = 0.0;
        let mut oracle_err: f64 = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    let expected = match (i == j, i == k, j == k) {
                        (true, true, _) => -3.0 / 16.0,
                        (false, false, false) => -1.0 / 16.0,
                        _ => 1.0 / 16.0,
                    };
                    table_err = table_err.max((c.at3(i, j, k) - expected).abs());
                    oracle_err = oracle_err.max((oracle[i][j][k] - expected).abs());
                }
            }
        }
        let table = Outcome::new(
            table_err < 1e-7 && oracle_err < 1e-7,
            format!("table abs {table_err:.1e}, independent oracle abs {oracle_err:.1e} tol 1e-7"),
        );
        and(base, table)
    }));

    results.push(("torsion: three effective families, five vanishing", {
        let base = checks(&by_h_refs, &["torsion-zero", "torsion-temporal"]);
        let m = MRootStructure::chernov();
        let h = exp1();
        let mut effective = true;
        for i in 0..10u64 {
            let p = sample_nondegenerate_point(42 + i, &m).unwrap();
            let t = torsion_tensors(&m, &h, &p).unwrap();
            effective &= t.p_mixed.max_abs() > 1e-3 && t.p_vert.max_abs() > 1e-3 && mat_max(&t.r_temporal) > 1e-3;
        }
        and(base, Outcome::new(effective, format!("three effective families nonzero at kappa = 1: {effective}")))
    }));

    results.push((
        "curvature proportionalities and vanishing families",
        checks(&by_h_refs, &["curvature-proportional", "curvature-zero"]),
    ));

    results.push((
        "vertical Ricci: contraction against closed form, symmetry",
        checks(&by_h_refs, &["ricci-closed", "ricci-symmetry"]),
    ));

    results.push(("scalar curvature, two routes", checks(&by_h_refs, &["scalar-routes"])));

    results.push((
        "Einstein system: residual, zero blocks, mixed symmetry",
        checks(&by_h_refs, &["einstein-residual", "einstein-zero-blocks", "einstein-mixed-symmetry"]),
    ));

    results.push((
        "electromagnetic 2-form vanishes, Maxwell residuals",
        checks(&by_h_refs, &["em-zero", "maxwell"]),
    ));

    results.push(("F2 golden suite", {
        let base = checks(&[&f2], &["f2-metric", "connection-flat", "einstein-trivial"]);
        let m = MRootStructure::quadratic_f2();
        let mut worst: f64 = 0.0;
        for h in h_families() {
            for i in 0..20u64 {
                let p = sample_nondegenerate_point(42 + i, &m).unwrap();
                let curv = curvature_tensors(&m, &h, &p).unwrap();
                let ric = ricci_and_scalar(&m, &h, &p).unwrap();
                let e = einstein_system(&m, &h, &p, 1.0).unwrap();
                let f = em_two_form(&m, &h, &p).unwrap();
                worst = [
                    curv.s_vert.max_abs(),
                    curv.r_horiz.max_abs(),
                    curv.p_curv.max_abs(),
                    curv.zero_family_max(),
                    mat_max(&ric.r_ij),
                    mat_max(&ric.p_ij),
                    mat_max(&ric.s_vert_ricci),
                    ric.sc.abs(),
                    e.max_abs(),
                    mat_max(&f),
                    worst,
                ]
                .into_iter()
                .fold(0.0, f64::max);
            }
        }
        and(
            base,
            Outcome::new(worst < 1e-12, format!("curvature, Ricci, Sc, T, F abs {worst:.1e} tol 1e-12")),
        )
    }));

    results.push(("determinism modulo timestamp", {
        let c = cfg(MetricSelector::Chernov, exp1(), 100);
        let strip = |mut r: GeometryReport| {
            r.timestamp_unix = 0;
            r.to_json_string()
        };
        let a = strip(run_suite(&c).unwrap());
        let b = strip(run_suite(&c).unwrap());
        Outcome::new(a == b, format!("{} byte reports identical: {}", a.len(), a == b))
    }));

    let mut all = true;
    for (n, (title, o)) in results.iter().enumerate() {
        all &= o.passed;
        println!(
            "{} {:>2} {title} | {}",
            if o.passed { "PASS" } else { "FAIL" },
            n + 1,
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
