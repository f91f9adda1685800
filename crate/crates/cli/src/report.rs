//! JSON and CSV emission helpers.
//!
//! Reports must be byte-identical for a fixed command and version: keys are
//! sorted (serde_json's default map), floats are rounded to 12 significant
//! digits, and exact products that can exceed 64 bits travel as strings.

use serde_json::Value;

/// Rounds to 12 significant digits so formatting noise never leaks into
/// reports.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(11 - magnitude);
    (x * factor).round() / factor
}

pub fn float(x: f64) -> Value {
    Value::from(sig12(x))
}

pub fn big_u(x: u128) -> Value {
    Value::String(x.to_string())
}

pub fn big_i(x: i128) -> Value {
    Value::String(x.to_string())
}

pub fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("report serialization"));
}

pub fn csv_field(text: &str) -> String {
    if text.contains(',') || text.contains('"') || text.contains('\n') {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

pub fn csv_row(fields: &[String]) -> String {
    fields
        .iter()
        .map(|f| csv_field(f))
        .collect::<Vec<_>>()
        .join(",")
}
