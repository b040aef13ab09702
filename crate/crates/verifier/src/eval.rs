//! Single-point evaluation of named geometric objects.

use nalgebra::Matrix4;
use rheojet_core::algebra::{contract_cubic, dual_contractions};
use rheojet_core::connections::{canonical_spray, cartan_connection, nonlinear_connection};
use rheojet_core::curvature::{
    curvature_from_jet, einstein_from_ricci, ricci_from_curvature, torsion_from_jet, ConnectionJet,
};
use rheojet_core::electromag::maxwell_from_jet;
use rheojet_core::metric::fundamental_metric;
use rheojet_core::{DTensor, JetPoint, MRootStructure, Slot, TemporalMetric, DIM};
use serde_json::{Map, Value};

use crate::error::VerifyError;
use crate::report::real;

use Slot::*;

/// Names accepted by [`eval_tensor`]. `family.*` evaluates a whole family.
pub const TENSOR_NAMES: &[&str] = &[
    "S111",
    "Si11",
    "Sij1",
    "Sjk1_up",
    "D1111",
    "g",
    "g_inv",
    "F",
    "spray",
    "M",
    "N",
    "L",
    "C",
    "torsion.p_mixed",
    "torsion.p_vert",
    "torsion.r_temporal",
    "torsion.t_1j",
    "torsion.t_ij",
    "torsion.p_1j",
    "torsion.r_ij",
    "torsion.s_ij",
    "curvature.s_vert",
    "curvature.r_horiz",
    "curvature.p_curv",
    "curvature.r_temporal",
    "curvature.p_temporal",
    "ricci.r_ij",
    "ricci.p_ij",
    "ricci.s_vert",
    "ricci.s_vert_closed",
    "ricci.r_i1",
    "ricci.p_i1",
    "Sc",
    "einstein.t11",
    "einstein.tij",
    "einstein.tvert",
    "einstein.t_mixed",
    "einstein.t_mixed_dual",
    "einstein.t_1i",
    "einstein.t_i1",
    "einstein.t_vi1",
    "einstein.t_1vi",
    "em.F",
    "em.aux",
    "maxwell.residuals",
];

fn nested(shape: &[usize], values: &[f64]) -> Value {
    match shape.split_first() {
        None => real(values[0]),
        Some((&n, rest)) => {
            let stride: usize = rest.iter().product();
            (0..n)
                .map(|i| nested(rest, &values[i * stride..(i + 1) * stride]))
                .collect()
        }
    }
}

fn object(signature: &[&str], shape: &[usize], values: &[f64]) -> Value {
    let mut m = Map::new();
    m.insert("index_signature".into(), signature.iter().map(|s| Value::from(*s)).collect());
    m.insert("shape".into(), shape.iter().map(|&n| Value::from(n)).collect());
    m.insert("values".into(), nested(shape, values));
    Value::Object(m)
}

fn scalar(v: f64) -> Value {
    object(&[], &[], &[v])
}

fn vector(slot: Slot, v: &[f64; DIM]) -> Value {
    object(&[slot.label()], &[DIM], v)
}

fn matrix(slots: [Slot; 2], m: &Matrix4<f64>) -> Value {
    let values: Vec<f64> = (0..DIM).flat_map(|i| (0..DIM).map(move |j| m[(i, j)])).collect();
    object(&[slots[0].label(), slots[1].label()], &[DIM, DIM], &values)
}

fn dtensor(t: &DTensor) -> Value {
    let labels: Vec<&str> = t.slots().iter().map(|s| s.label()).collect();
    object(&labels, &t.shape(), t.values())
}

fn rank3(a: &[[[f64; DIM]; DIM]; DIM], slots: [Slot; 3]) -> Value {
    let values: Vec<f64> = a.iter().flatten().flatten().copied().collect();
    object(&slots.map(|s| s.label()), &[DIM, DIM, DIM], &values)
}

fn family(prefix: &str, metric: &MRootStructure, h: &TemporalMetric, p: &JetPoint, k: f64) -> Result<Value, VerifyError> {
    let mut m = Map::new();
    for name in TENSOR_NAMES.iter().filter(|n| n.strip_prefix(prefix).is_some_and(|r| r.starts_with('.'))) {
        let key = &name[prefix.len() + 1..];
        m.insert(key.to_string(), eval_tensor(name, metric, h, p, k)?);
    }
    if m.is_empty() {
        return Err(VerifyError::UnknownTensor(format!("{prefix}.*")));
    }
    Ok(Value::Object(m))
}

/// Evaluates the named object at `p` with its index signature.
pub fn eval_tensor(
    name: &str,
    metric: &MRootStructure,
    h: &TemporalMetric,
    p: &JetPoint,
    k: f64,
) -> Result<Value, VerifyError> {
    if let Some(prefix) = name.strip_suffix(".*") {
        return family(prefix, metric, h, p, k);
    }
    if !TENSOR_NAMES.contains(&name) {
        return Err(VerifyError::UnknownTensor(name.to_string()));
    }
    let cubic_only = || {
        if metric.is_cubic() {
            Ok(())
        } else {
            Err(VerifyError::Config(format!("`{name}` is defined for cubic structures only")))
        }
    };
    let value = match name {
        "S111" | "Si11" | "Sij1" => {
            cubic_only()?;
            let c = contract_cubic(metric, p)?;
            match name {
                "S111" => scalar(c.s111),
                "Si11" => vector(SpatialLower, &c.si11),
                _ => matrix([SpatialLower, SpatialLower], &c.sij1),
            }
        }
        "Sjk1_up" | "D1111" => {
            cubic_only()?;
            let d = dual_contractions(metric, p)?;
            if name == "D1111" {
                scalar(d.d1111)
            } else {
                matrix([SpatialUpper, SpatialUpper], &d.sjk1_up)
            }
        }
        "g" | "g_inv" | "F" => {
            let fm = fundamental_metric(metric, h, p)?;
            match name {
                "g" => matrix([VerticalLower, VerticalLower], &fm.g_low),
                "g_inv" => matrix([VerticalUpper, VerticalUpper], &fm.g_up),
                _ => scalar(fm.f_value),
            }
        }
        "spray" => {
            let s = canonical_spray(metric, h, p)?;
            let mut m = Map::new();
            m.insert("H".into(), vector(VerticalUpper, &s.h));
            m.insert("G".into(), vector(VerticalUpper, &s.g));
            Value::Object(m)
        }
        "M" | "N" => {
            let nc = nonlinear_connection(metric, h, p)?;
            if name == "M" {
                vector(VerticalUpper, &nc.m)
            } else {
                matrix([VerticalUpper, SpatialLower], &nc.n)
            }
        }
        "L" | "C" => {
            let cc = cartan_connection(metric, h, p)?;
            dtensor(if name == "L" { &cc.l } else { &cc.c })
        }
        _ => eval_derived(name, metric, h, p, k)?,
    };
    Ok(value)
}

fn eval_derived(name: &str, metric: &MRootStructure, h: &TemporalMetric, p: &JetPoint, k: f64) -> Result<Value, VerifyError> {
    let jet = ConnectionJet::new(metric, h, p)?;
    let torsion = torsion_from_jet(&jet);
    if let Some(member) = name.strip_prefix("torsion.") {
        let z = &torsion.zero;
        return Ok(match member {
            "p_mixed" => dtensor(&torsion.p_mixed),
            "p_vert" => dtensor(&torsion.p_vert),
            "r_temporal" => matrix([VerticalUpper, SpatialLower], &torsion.r_temporal),
            "t_1j" => matrix([SpatialUpper, SpatialLower], &z.t_1j),
            "t_ij" => dtensor(&z.t_ij),
            "p_1j" => matrix([VerticalUpper, VerticalLower], &z.p_1j),
            "r_ij" => dtensor(&z.r_ij),
            _ => dtensor(&z.s_ij),
        });
    }
    if name.starts_with("em.") || name == "maxwell.residuals" {
        let mx = maxwell_from_jet(metric, h, &jet, &torsion)?;
        let f = &mx.field;
        return Ok(match name {
            "em.F" => matrix([VerticalLower, SpatialLower], &f.f_2form),
            "maxwell.residuals" => object(&["equation"], &[3], &mx.residuals),
            _ => {
                let mut m = Map::new();
                m.insert("Dbar".into(), vector(VerticalLower, &f.dbar));
                m.insert("D".into(), matrix([VerticalLower, SpatialLower], &f.d));
                m.insert("d".into(), matrix([VerticalLower, VerticalLower], &f.d_small));
                m.insert("F_slash_1".into(), matrix([VerticalLower, SpatialLower], &f.f_slash));
                m.insert("F_bar".into(), rank3(&f.f_bar, [VerticalLower, SpatialLower, SpatialLower]));
                m.insert("F_vert".into(), rank3(&f.f_vert, [VerticalLower, SpatialLower, VerticalLower]));
                Value::Object(m)
            }
        });
    }
    let curv = curvature_from_jet(&jet, &torsion);
    if let Some(member) = name.strip_prefix("curvature.") {
        return Ok(dtensor(match member {
            "s_vert" => &curv.s_vert,
            "r_horiz" => &curv.r_horiz,
            "p_curv" => &curv.p_curv,
            "r_temporal" => &curv.r_temporal_curv,
            _ => &curv.p_temporal_curv,
        }));
    }
    let ricci = ricci_from_curvature(metric, &jet, &curv)?;
    if let Some(member) = name.strip_prefix("ricci.") {
        return Ok(match member {
            "r_ij" => matrix([SpatialLower, SpatialLower], &ricci.r_ij),
            "p_ij" => matrix([SpatialLower, VerticalLower], &ricci.p_ij),
            "s_vert" => matrix([VerticalLower, VerticalLower], &ricci.s_vert_ricci),
            "s_vert_closed" => matrix([VerticalLower, VerticalLower], &ricci.s_vert_ricci_closed),
            "r_i1" => vector(SpatialLower, &ricci.r_i1),
            _ => vector(VerticalLower, &ricci.p_i1),
        });
    }
    if name == "Sc" {
        return Ok(scalar(ricci.sc));
    }
    let e = einstein_from_ricci(metric, &jet, &ricci, k)?;
    let member = name.strip_prefix("einstein.").unwrap_or(name);
    Ok(match member {
        "t11" => scalar(e.t11),
        "tij" => matrix([SpatialLower, SpatialLower], &e.tij),
        "tvert" => matrix([VerticalLower, VerticalLower], &e.tvert),
        "t_mixed" => matrix([SpatialLower, VerticalLower], &e.t_mixed),
        "t_mixed_dual" => matrix([VerticalLower, SpatialLower], &e.t_mixed_dual),
        "t_1i" => vector(SpatialLower, &e.t_1i),
        "t_i1" => vector(SpatialLower, &e.t_i1),
        "t_vi1" => vector(VerticalLower, &e.t_vi1),
        _ => vector(VerticalLower, &e.t_1vi),
    })
}

/// Parses `t=T,x=a,b,c,d,y=e,f,g,h`.
pub fn parse_point(s: &str) -> Result<JetPoint, VerifyError> {
    let bad = |why: &str| VerifyError::Config(format!("point `{s}`: {why}"));
    let mut t = None;
    let mut x = None;
    let mut y = None;
    let mut current: Option<(char, Vec<f64>)> = None;
    let mut flush = |cur: Option<(char, Vec<f64>)>| -> Result<(), VerifyError> {
        let Some((key, vals)) = cur else { return Ok(()) };
        match key {
            't' if vals.len() == 1 => t = Some(vals[0]),
            'x' | 'y' if vals.len() == DIM => {
                let arr = [vals[0], vals[1], vals[2], vals[3]];
                if key == 'x' {
                    x = Some(arr)
                } else {
                    y = Some(arr)
                }
            }
            _ => return Err(bad(&format!("`{key}` has {} components", vals.len()))),
        }
        Ok(())
    };
    for part in s.split(',') {
        let part = part.trim();
        let value = if let Some((key, v)) = part.split_once('=') {
            let key = match key.trim() {
                "t" => 't',
                "x" => 'x',
                "y" => 'y',
                other => return Err(bad(&format!("unknown coordinate `{other}`"))),
            };
            flush(current.take())?;
            current = Some((key, Vec::new()));
            v
        } else {
            part
        };
        let v: f64 = value.trim().parse().map_err(|_| bad(&format!("`{value}` is not a number")))?;
        match current.as_mut() {
            Some((_, vals)) => vals.push(v),
            None => return Err(bad("expected `t=`, `x=` or `y=`")),
        }
    }
    flush(current.take())?;
    let y = y.ok_or_else(|| bad("missing y"))?;
    JetPoint::new(t.unwrap_or(0.0), x.unwrap_or([0.0; DIM]), y).map_err(VerifyError::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp1() -> TemporalMetric {
        TemporalMetric::exponential(1.0).unwrap()
    }

    #[test]
    fn point_syntax() {
        let p = parse_point("t=0.5,x=1,2,3,4,y=-1,0.5,2,3").unwrap();
        assert_eq!(p.t, 0.5);
        assert_eq!(p.x, [1.0, 2.0, 3.0, 4.0]);
        assert_eq!(p.y, [-1.0, 0.5, 2.0, 3.0]);
        assert_eq!(parse_point("y=1,1,1,1").unwrap().t, 0.0);
        assert!(parse_point("t=0,y=1,2").is_err());
        assert!(parse_point("z=1").is_err());
        assert!(parse_point("t=0,x=1,2,3,4").is_err());
    }

    #[test]
    fn metric_at_ones() {
        let p = JetPoint::from_velocity([1.0; 4]);
        let h = TemporalMetric::constant(1.0).unwrap();
        let v = eval_tensor("g", &MRootStructure::chernov(), &h, &p, 1.0).unwrap();
        let g11 = v["values"][0][0].as_f64().unwrap();
        let g12 = v["values"][0][1].as_f64().unwrap();
        assert!((g11 + 0.1574901).abs() < 1e-7);
        assert!((g12 - 0.2624836).abs() < 1e-7);
        assert_eq!(v["index_signature"][0], "vertical-lower");
    }

    #[test]
    fn every_name_evaluates() {
        let p = JetPoint::new(0.1, [0.2, -0.1, 0.3, 0.0], [1.2, -0.3, 0.8, 1.9]).unwrap();
        for name in TENSOR_NAMES {
            eval_tensor(name, &MRootStructure::chernov(), &exp1(), &p, 1.0).unwrap();
        }
        let v = eval_tensor("torsion.*", &MRootStructure::chernov(), &exp1(), &p, 1.0).unwrap();
        assert_eq!(v.as_object().unwrap().len(), 8);
        assert!(matches!(
            eval_tensor("Ricci", &MRootStructure::chernov(), &exp1(), &p, 1.0),
            Err(VerifyError::UnknownTensor(_))
        ));
    }

    #[test]
    fn nonlinear_connection_is_half_identity() {
        let p = JetPoint::from_velocity([1.0, 2.0, 3.0, 4.0]);
        let v = eval_tensor("N", &MRootStructure::chernov(), &exp1(), &p, 1.0).unwrap();
        for i in 0..DIM {
            for j in 0..DIM {
                let expected = if i == j { -0.5 } else { 0.0 };
                assert!((v["values"][i][j].as_f64().unwrap() - expected).abs() < 1e-12);
            }
        }
    }
}
