//! Deterministic CSV emission.

use std::fmt::Write;

/// Shortest decimal string that parses back to the same `f64`.
///
/// Plain notation for `1e-5 <= |x| < 1e16`, exponent notation otherwise.
/// Zero (of either sign) prints as `0`; non-finite values as `nan`, `inf`,
/// `-inf`.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else if (1e-5..1e16).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// CSV table with a fixed header, LF line endings and [`format_number`]
/// formatting.
#[derive(Debug, Clone)]
pub struct CsvTable {
    columns: usize,
    text: String,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        CsvTable {
            columns: header.len(),
            text,
        }
    }

    pub fn push(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.columns, "row width must match the header");
        for (k, &x) in row.iter().enumerate() {
            if k > 0 {
                self.text.push(',');
            }
            let _ = write!(self.text, "{}", format_number(x));
        }
        self.text.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}
