//! Plain CSV rendering shared by every scenario writer.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros trimmed,
/// exponent notation below `1e-4` or from `1e12` up.
pub fn format_float(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    // the rounded exponent decides the style, exactly as printf does
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..DIGITS).contains(&exp) {
        let fixed = format!("{:.*}", (DIGITS - 1 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub(crate) fn format_opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

/// Accumulates rows in memory; written once so a failed run leaves no
/// partial file.
pub(crate) struct CsvTable {
    width: usize,
    body: String,
}

impl CsvTable {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut body = String::new();
        push_line(&mut body, header);
        Self {
            width: header.len(),
            body,
        }
    }

    pub fn push<S: AsRef<str>>(&mut self, row: &[S]) {
        debug_assert_eq!(row.len(), self.width, "row width mismatch");
        push_line(&mut self.body, row);
    }

    pub fn as_str(&self) -> &str {
        &self.body
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_file(path, self.body.as_bytes())
    }
}

fn push_line<S: AsRef<str>>(out: &mut String, fields: &[S]) {
    for (i, f) in fields.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{}", f.as_ref());
    }
    out.push('\n');
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g12() {
        let cases = [
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333333333"),
            (20.25, "20.25"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (9.9999999999999e-5, "0.0001"),
            (-0.0, "0"),
            (1e100, "1e+100"),
            (std::f64::consts::PI, "3.14159265359"),
        ];
        for (x, want) in cases {
            assert_eq!(format_float(x), want, "formatting {x:e}");
        }
    }

    #[test]
    fn table_layout() {
        let mut t = CsvTable::new(&["a", "b"]);
        t.push(&["1".to_string(), String::new()]);
        assert_eq!(t.as_str(), "a,b\n1,\n");
        assert_eq!(format_opt(None), "");
    }
}
