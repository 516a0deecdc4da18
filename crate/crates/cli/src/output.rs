//! CSV and JSON writers. Floats in CSV carry 17 significant digits.

use std::io::Write;

use meridian_core::meridian::{GridSample, InvariantRecord};
use meridian_core::profiles::{MeridianProfile, ProfileDocument};
use serde_json::{Map, Value};

pub const INVARIANT_COLUMNS: [&str; 15] = [
    "u",
    "v",
    "gamma1",
    "gamma2",
    "nu1",
    "nu2",
    "lambda",
    "mu",
    "beta1",
    "beta2",
    "k",
    "kappa_conn",
    "K",
    "H_norm",
    "mask",
];

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn record_cells(r: &InvariantRecord) -> Vec<String> {
    r.values().iter().map(|&x| num(x)).collect()
}

pub fn invariants_csv(samples: &[GridSample], out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(INVARIANT_COLUMNS)?;
    for s in samples {
        let mut row = vec![num(s.u), num(s.v)];
        match &s.record {
            Some(r) => {
                row.extend(record_cells(r));
                row.push("0".into());
            }
            None => {
                row.extend(std::iter::repeat_n(String::new(), 12));
                row.push("1".into());
            }
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn invariants_json(samples: &[GridSample]) -> Value {
    Value::Array(
        samples
            .iter()
            .map(|s| {
                let mut obj = match &s.record {
                    Some(r) => match serde_json::to_value(r) {
                        Ok(Value::Object(m)) => m,
                        _ => Map::new(),
                    },
                    None => {
                        let mut m = Map::new();
                        m.insert("u".into(), s.u.into());
                        m.insert("v".into(), s.v.into());
                        m
                    }
                };
                obj.insert("mask".into(), u8::from(s.record.is_none()).into());
                Value::Object(obj)
            })
            .collect(),
    )
}

/// CSV of (u, f, g, ḟ, ġ, κ_m), preceded by `#` lines describing the profile.
pub fn profile_csv(
    p: &dyn MeridianProfile,
    doc: &ProfileDocument,
    mut out: impl Write,
) -> Result<(), Box<dyn std::error::Error>> {
    writeln!(out, "# kind: {}", doc.kind)?;
    writeln!(out, "# params: {}", doc.params)?;
    if let Some(v) = doc.validity {
        writeln!(out, "# validity: [{}, {}]", num(v.lo), num(v.hi))?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["u", "f", "g", "f_dot", "g_dot", "kappa_m"])?;
    for &u in &doc.u_samples {
        let j = p.jet(u)?;
        w.write_record([num(u), num(j.f), num(j.g), num(j.f1), num(j.g1), num(j.kappa_m())])?;
    }
    w.flush()?;
    Ok(())
}
