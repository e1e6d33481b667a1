//! Deterministic text emission: every float in JSON and CSV output goes
//! through one fixed 17-significant-digit formatter, so identical inputs
//! yield byte-identical outputs.

/// Fixed-width scientific form; round-trips any finite double exactly.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v == f64::INFINITY {
        return "inf".into();
    }
    if v == f64::NEG_INFINITY {
        return "-inf".into();
    }
    format!("{v:.16e}")
}

/// A float as a JSON value: a plain number when finite, the strings
/// "inf"/"-inf" at infinite interval endpoints.
pub fn json_num(v: f64) -> String {
    if v.is_finite() {
        fmt_float(v)
    } else {
        format!("\"{}\"", fmt_float(v))
    }
}

pub fn json_bool(v: bool) -> &'static str {
    if v {
        "true"
    } else {
        "false"
    }
}

/// JSON array from items already rendered to valid JSON.
pub fn json_array(items: impl IntoIterator<Item = String>) -> String {
    let mut out = String::from("[");
    for (i, item) in items.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&item);
    }
    out.push(']');
    out
}

pub fn json_num_array(values: impl IntoIterator<Item = f64>) -> String {
    json_array(values.into_iter().map(json_num))
}

/// Key-value assembly with insertion order preserved.
pub struct JsonObject {
    buf: String,
}

impl JsonObject {
    pub fn new() -> JsonObject {
        JsonObject { buf: String::from("{") }
    }

    /// Add a field whose value is already rendered JSON.
    pub fn field(mut self, key: &str, value: &str) -> JsonObject {
        if self.buf.len() > 1 {
            self.buf.push(',');
        }
        self.buf.push('"');
        self.buf.push_str(key);
        self.buf.push_str("\":");
        self.buf.push_str(value);
        self
    }

    pub fn num(self, key: &str, v: f64) -> JsonObject {
        let rendered = json_num(v);
        self.field(key, &rendered)
    }

    pub fn finish(mut self) -> String {
        self.buf.push('}');
        self.buf
    }
}
