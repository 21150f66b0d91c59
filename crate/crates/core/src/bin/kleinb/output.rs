//! Number formatting shared by the JSON and CSV writers.

use kleinb::{ChannelParams, CurrentBudget, ScatterAmplitudes};
use num_complex::Complex64;
use serde_json::{json, Map, Number, Value};

/// 17 significant digits, enough to reproduce any `f64` exactly, with a
/// signed exponent (`1.0000000000000000e+0`).
pub fn fmt17(x: f64) -> String {
    let s = format!("{x:.16e}");
    match s.split_once('e') {
        Some((mantissa, exp)) if !exp.starts_with('-') => format!("{mantissa}e+{exp}"),
        _ => s,
    }
}

/// JSON number carrying the [`fmt17`] text verbatim; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    fmt17(x)
        .parse::<Number>()
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub fn complex(z: Complex64) -> Value {
    json!({ "re": num(z.re), "im": num(z.im) })
}

pub fn inputs(p: &ChannelParams) -> Value {
    json!({
        "E": num(p.energy()),
        "V0": num(p.v0()),
        "b": num(p.field().b()),
        "n": p.state().n(),
        "spin": p.state().spin().to_string(),
    })
}

pub fn amps_record(p: &ChannelParams, a: &ScatterAmplitudes, budget: &CurrentBudget) -> Value {
    let (t_sq, tp_sq) = a.transmitted_probabilities();
    let mut m = Map::new();
    m.insert("inputs".into(), inputs(p));
    m.insert("regime".into(), Value::from(a.regime.label()));
    m.insert("channel_mass".into(), num(p.channel_mass()));
    m.insert(
        "amplitudes".into(),
        json!({
            "R": complex(a.r),
            "Rp": complex(a.r_flip),
            "T": complex(a.t),
            "Tp": complex(a.t_flip),
        }),
    );
    m.insert(
        "budget".into(),
        json!({
            "refl_same": num(budget.refl_same),
            "refl_flip": num(budget.refl_flip),
            "trans_same": num(budget.trans_same),
            "trans_flip": num(budget.trans_flip),
        }),
    );
    m.insert("sum".into(), num(budget.sum()));
    m.insert("T_sq".into(), num(t_sq));
    m.insert("Tp_sq".into(), num(tp_sq));
    Value::Object(m)
}
