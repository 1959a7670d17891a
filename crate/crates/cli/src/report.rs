//! JSON encoding of results.
//!
//! Objects are key-sorted and floats print in shortest round-trip form, so a
//! report is a pure function of its inputs. Non-finite floats become the
//! strings `"inf"`, `"-inf"` and `"nan"`.

use serde_json::{json, Map, Value};
use stochdom_core::dominance::{Catalyst, MinNResult};
use stochdom_core::ldp::{Certification, LhsValue, RateResult};
use stochdom_core::spectrum::{Radial, RayComparison, RayVerdict, SpectralReport, SpectralVerdict};
use stochdom_core::stochorder::{CouplingPlan, OrderVerdict};
use stochdom_core::{Direction, Measure, Point, Rational};

pub fn float(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        json!("nan")
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn rational(q: &Rational) -> Value {
    Value::String(q.to_string())
}

pub fn point(p: &Point) -> Value {
    Value::Array(p.coords().iter().map(rational).collect())
}

pub fn measure(mu: &Measure) -> Value {
    Value::Array(mu.iter().map(|(x, w)| json!({"x": point(x), "w": rational(w)})).collect())
}

pub fn radial(r: Radial) -> Value {
    match r {
        Radial::NegInf => json!("-inf"),
        Radial::PosInf => json!("inf"),
        Radial::Finite(v) => float(v),
    }
}

pub fn direction(d: &Direction) -> Value {
    point(&d.t)
}

pub fn coupling(plan: &CouplingPlan) -> Value {
    Value::Array(
        plan.entries.iter().map(|((x, y), w)| json!({"from": point(x), "to": point(y), "w": rational(w)})).collect(),
    )
}

pub fn order(v: &OrderVerdict) -> Value {
    json!({
        "dominated": v.dominated,
        "coupling": v.witness_coupling.as_ref().map(coupling),
        "upset_generators": v.witness_upset.as_ref().map(|u| u.iter().map(point).collect::<Vec<_>>()),
    })
}

pub fn spectral_name(v: SpectralVerdict) -> &'static str {
    match v {
        SpectralVerdict::Strict => "Strict",
        SpectralVerdict::NonStrictOnly => "NonStrictOnly",
        SpectralVerdict::Violated => "Violated",
        SpectralVerdict::Inconclusive => "Inconclusive",
    }
}

fn ray_name(v: RayVerdict) -> &'static str {
    match v {
        RayVerdict::StrictOnRay => "StrictOnRay",
        RayVerdict::TieOnRay => "TieOnRay",
        RayVerdict::ViolatedOnRay => "ViolatedOnRay",
        RayVerdict::InconclusiveOnRay => "InconclusiveOnRay",
    }
}

fn ray(r: &RayComparison) -> Value {
    json!({
        "direction": direction(&r.direction),
        "verdict": ray_name(r.verdict),
        "min_margin": float(r.min_margin),
        "argmin_radial": radial(r.argmin_radial),
        "witness_radial": r.witness.map(radial),
        "exact_margins": {
            "min_tropical": rational(&r.exact.min_tropical),
            "arctic": rational(&r.exact.arctic),
            "max_tropical": rational(&r.exact.max_tropical),
        },
    })
}

pub fn spectral(s: &SpectralReport) -> Value {
    json!({
        "verdict": spectral_name(s.verdict),
        "sampled_only": s.sampled_only,
        "rays": s.rays.iter().map(ray).collect::<Vec<_>>(),
        "witnesses": s.witnesses.iter().map(|w| json!({"direction": direction(&w.direction), "radial": radial(w.radial)})).collect::<Vec<_>>(),
    })
}

pub fn min_n(r: &MinNResult) -> Value {
    json!({
        "found": r.found,
        "n0": r.n0,
        "stable_through": r.stable_through,
        "failures": r.failures.iter().map(|(n, up)| json!({"n": n, "upset_generators": up.iter().map(point).collect::<Vec<_>>()})).collect::<Vec<_>>(),
    })
}

pub fn catalyst(c: &Catalyst) -> Value {
    json!({"z": measure(&c.z), "grid_step": rational(&c.grid_step), "verified": c.verified})
}

pub fn certification(c: Certification) -> &'static str {
    match c {
        Certification::Exact => "exact",
        Certification::ExactLimit => "exact-limit",
        Certification::Bisection => "bisection",
        Certification::GridRefined => "grid-refined",
        Certification::LowerBound => "lower-bound",
    }
}

pub fn rate(r: &RateResult) -> Value {
    json!({
        "value": float(r.value),
        "certified": certification(r.certified),
        "maximizer": r.maximizer.as_ref().map(|(d, s)| json!({"direction": direction(d), "radial": float(*s)})),
    })
}

pub fn lhs(v: &LhsValue) -> Value {
    json!({"n": v.n, "eps": rational(&v.eps), "value": float(v.value), "exhaustive": v.exhaustive})
}

/// Common envelope: tool, version, command, seed and the command's payload.
pub fn envelope(command: &str, seed: u64, inputs: Value, result: Value) -> Value {
    let mut m = Map::new();
    m.insert("tool".into(), json!("stochdom"));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("command".into(), json!(command));
    m.insert("seed".into(), json!(seed));
    m.insert("inputs".into(), inputs);
    m.insert("result".into(), result);
    Value::Object(m)
}
