//! Canonical JSON: sorted keys, two-space indentation, floats rounded to
//! twelve significant digits and printed in shortest round-trip form.

use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

/// Significant digits kept for floating-point numbers.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Round `x` to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    let s = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let r: f64 = s.parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Canonical text of a float as it appears in JSON output.
pub fn format_float(x: f64) -> String {
    format!("{:?}", round_significant(x))
}

pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("result types serialize to JSON");
    value_to_canonical(&v)
}

pub fn value_to_canonical(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_value(out: &mut String, v: &Value, level: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_u64() {
                write!(out, "{i}").unwrap();
            } else if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else {
                out.push_str(&format_float(n.as_f64().expect("finite number")));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            if items.iter().all(|i| !i.is_array() && !i.is_object()) {
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, item, level);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                indent(out, level + 1);
                write_value(out, item, level + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (k, key) in keys.iter().enumerate() {
                indent(out, level + 1);
                out.push_str(&serde_json::to_string(key).expect("strings serialize"));
                out.push_str(": ");
                write_value(out, &map[key.as_str()], level + 1);
                out.push_str(if k + 1 < keys.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounds_to_twelve_digits() {
        assert_eq!(format_float(9.440000000000001), "9.44");
        assert_eq!(format_float(944.0), "944.0");
        assert_eq!(format_float(0.1 + 0.2), "0.3");
        assert_eq!(format_float(-1.2345678901234567e-7), "-1.23456789012e-7");
        assert_eq!(format_float(-0.0), "0.0");
        assert_eq!(round_significant(round_significant(2.0 / 3.0)), round_significant(2.0 / 3.0));
    }

    #[test]
    fn sorted_and_stable() {
        let v = json!({"b": 1, "a": [1.5, 2], "c": {"z": null, "y": "x"}});
        let text = value_to_canonical(&v);
        assert_eq!(text, "{\n  \"a\": [1.5, 2],\n  \"b\": 1,\n  \"c\": {\n    \"y\": \"x\",\n    \"z\": null\n  }\n}\n");
        let again: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value_to_canonical(&again), text);
    }
}
