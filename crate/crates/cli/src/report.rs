//! Report envelope and deterministic JSON writing.
//!
//! Floats are emitted in scientific notation with 17 significant digits,
//! enough to round-trip every f64 exactly, so identical runs produce
//! byte-identical reports.

use pptmaps::matcore::ComplexMatrix;
use serde::Serialize;
use serde_json::json;
use std::io;

/// Envelope every subcommand prints: command name, echoed inputs, payload,
/// the tolerances in effect, and the artifact version.
#[derive(Serialize)]
pub struct Report<R: Serialize> {
    pub command: String,
    pub inputs: serde_json::Value,
    pub results: R,
    pub tolerances: serde_json::Value,
    pub version: String,
}

impl<R: Serialize> Report<R> {
    pub fn to_json_string(&self) -> serde_json::Result<String> {
        to_json_string_17(self)
    }
}

/// Serialize any value to JSON with 17-significant-digit floats.
pub fn to_json_string_17<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::with_capacity(1024);
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits17);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

/// `serde_json` formatter that pins f64 output to `{:.16e}` (17 significant
/// digits); everything else keeps the default compact layout.
struct SigDigits17;

impl serde_json::ser::Formatter for SigDigits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{value:.7e}")
    }
}

/// Dense complex matrix as nested arrays of [re, im] pairs.
pub fn complex_matrix_json(m: &ComplexMatrix) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = (0..m.rows())
        .map(|i| {
            let row: Vec<serde_json::Value> = (0..m.cols())
                .map(|j| json!([m[(i, j)].re, m[(i, j)].im]))
                .collect();
            json!(row)
        })
        .collect();
    json!(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        for x in [
            0.0,
            1.0,
            -1.0 / 3.0,
            5f64.sqrt(),
            4f64.powi(-20) * 2f64.sqrt(),
            1e-300,
        ] {
            let s = to_json_string_17(&x).unwrap();
            let back: f64 = serde_json::from_str(&s).unwrap();
            assert_eq!(back, x, "17 digits must round-trip: {s}");
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let r = Report {
            command: "demo".into(),
            inputs: json!({"b": 1, "a": 2}),
            results: json!({"x": 0.1, "y": [1.5, -2.5]}),
            tolerances: json!({"psd": 1e-9}),
            version: "0.0.0".into(),
        };
        let one = r.to_json_string().unwrap();
        let two = r.to_json_string().unwrap();
        assert_eq!(one, two);
        assert!(one.starts_with("{\"command\":\"demo\""));
    }
}
