//! Plain-text rendering of report JSON.

use ccdim_core::linalg::{parse_rational, to_f64};
use serde_json::{Map, Value};

const EMPTY: &str = "—";

fn is_label_key(key: &str) -> bool {
    key.contains("label") || key == "kind" || key == "status"
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some(EMPTY.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

/// Decimal form of a fraction-valued string; `None` for integers and
/// anything that is not a rational.
fn decimal(v: &Value) -> Option<String> {
    let Value::String(s) = v else { return None };
    if !s.contains('/') {
        return None;
    }
    parse_rational(s).ok().map(|r| format!("{:.6}", to_f64(&r)))
}

fn scalars(items: &[Value]) -> Option<Vec<String>> {
    items.iter().map(scalar).collect()
}

struct Row {
    key: String,
    value: String,
    decimal: Option<String>,
}

fn flatten(key: &str, value: &Value, labels: bool, out: &mut Vec<Row>) {
    let plain = |value: String, decimal: Option<String>| Row {
        key: key.to_string(),
        value,
        decimal,
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let child = if key.is_empty() { k.clone() } else { format!("{key}.{k}") };
                flatten(&child, v, labels || is_label_key(k), out);
            }
        }
        Value::Array(items) if items.is_empty() => out.push(plain(EMPTY.into(), None)),
        Value::Array(items) => {
            if let Some(cells) = scalars(items) {
                let dec = (!labels && items.iter().any(|v| decimal(v).is_some()))
                    .then(|| items.iter().map(|v| decimal(v).unwrap_or_else(|| scalar(v).unwrap_or_default())).collect::<Vec<_>>().join(", "));
                out.push(plain(cells.join(", "), dec));
                return;
            }
            let rows: Option<Vec<&Vec<Value>>> = items.iter().map(|v| v.as_array()).collect();
            if let Some(rows) = rows {
                if let Some(cells) = rows.iter().map(|r| scalars(r)).collect::<Option<Vec<_>>>() {
                    let text = cells.iter().map(|c| format!("[{}]", c.join(", "))).collect::<Vec<_>>().join("; ");
                    let any_frac = !labels && rows.iter().flat_map(|r| r.iter()).any(|v| decimal(v).is_some());
                    let dec = any_frac.then(|| {
                        rows.iter()
                            .map(|r| format!("[{}]", r.iter().map(|v| decimal(v).unwrap_or_else(|| scalar(v).unwrap_or_default())).collect::<Vec<_>>().join(", ")))
                            .collect::<Vec<_>>()
                            .join("; ")
                    });
                    out.push(plain(text, dec));
                    return;
                }
            }
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{key}[{i}]"), v, labels, out);
            }
        }
        other => {
            let dec = if labels { None } else { decimal(other) };
            out.push(plain(scalar(other).unwrap_or_default(), dec));
        }
    }
}

/// One `key=value` row per leaf, in key order. With `decimal`, rows that
/// hold fractions get a second, approximate column.
pub fn render_report(report: &Value, decimal: bool) -> String {
    let mut rows = Vec::new();
    flatten("", report, false, &mut rows);
    let cells: Vec<String> = rows.iter().map(|r| format!("{}={}", r.key, r.value)).collect();
    let mut text = String::new();
    if decimal {
        let width = cells.iter().map(|c| c.chars().count()).max().unwrap_or(0);
        text.push_str(&format!("{:<width$}  {}\n", "field=value", "decimal (approximate)"));
        for (cell, row) in cells.iter().zip(&rows) {
            match &row.decimal {
                Some(d) => text.push_str(&format!("{cell:<width$}  ~{d}\n")),
                None => text.push_str(&format!("{cell}\n")),
            }
        }
    } else {
        for cell in cells {
            text.push_str(&cell);
            text.push('\n');
        }
    }
    text
}

/// Copy of `value` with every fraction string replaced by its nearest
/// `f64`; label fields are left alone.
pub fn decimal_copy(value: &Value) -> Value {
    fn go(v: &Value, labels: bool) -> Value {
        match v {
            Value::Object(map) => {
                let mut out = Map::new();
                for (k, x) in map {
                    out.insert(k.clone(), go(x, labels || is_label_key(k)));
                }
                Value::Object(out)
            }
            Value::Array(items) => Value::Array(items.iter().map(|x| go(x, labels)).collect()),
            Value::String(s) if !labels => match parse_rational(s) {
                Ok(r) => serde_json::Number::from_f64(to_f64(&r)).map_or_else(|| v.clone(), Value::Number),
                Err(_) => v.clone(),
            },
            _ => v.clone(),
        }
    }
    go(value, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn empty_arrays_render_as_dash() {
        let text = render_report(&json!({"violations": [], "witness": null}), false);
        assert_eq!(text, "violations=—\nwitness=—\n");
    }

    #[test]
    fn nested_and_matrix_values() {
        let v = json!({"a": {"b": ["1/2", "1"]}, "m": [["1", "0"], ["0", "1"]], "pts": [{"u": ["0"]}]});
        let text = render_report(&v, false);
        assert_eq!(text, "a.b=1/2, 1\nm=[1, 0]; [0, 1]\npts[0].u=0\n");
    }

    #[test]
    fn decimal_column_only_for_fractions() {
        let v = json!({"p": ["1/3", "2/3"], "row_labels": ["1/2"], "n": 3});
        let text = render_report(&v, true);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].contains("decimal (approximate)"));
        assert!(lines.iter().any(|l| l.starts_with("p=1/3, 2/3") && l.ends_with("~0.333333, 0.666667")));
        assert!(lines.contains(&"row_labels=1/2"));
        assert!(lines.contains(&"n=3"));
    }

    #[test]
    fn decimal_copy_keeps_labels() {
        let v = json!({"p": ["1/4"], "col_labels": ["12"]});
        assert_eq!(decimal_copy(&v), json!({"p": [0.25], "col_labels": ["12"]}));
    }
}
