//! Dense complex matrix files: first line "rows cols", then one line per row
//! of whitespace-separated scalars written as "a", "bi", or "a+bi".

use num_complex::Complex64;
use pptmaps::matcore::ComplexMatrix;

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix, String> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or("empty input")?;
    let mut it = header.split_whitespace();
    let rows: usize = it
        .next()
        .ok_or("missing row count")?
        .parse()
        .map_err(|e| format!("bad row count: {e}"))?;
    let cols: usize = it
        .next()
        .ok_or("missing column count")?
        .parse()
        .map_err(|e| format!("bad column count: {e}"))?;
    if it.next().is_some() {
        return Err("trailing tokens after header".into());
    }
    let mut m = ComplexMatrix::zeros(rows, cols);
    let mut row = 0usize;
    for (idx, line) in lines {
        if row >= rows {
            return Err(format!("line {}: more rows than promised", idx + 1));
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != cols {
            return Err(format!(
                "line {}: expected {cols} entries, found {}",
                idx + 1,
                tokens.len()
            ));
        }
        for (j, tok) in tokens.iter().enumerate() {
            m[(row, j)] = parse_complex(tok)
                .map_err(|e| format!("line {}, entry {}: {e}", idx + 1, j + 1))?;
        }
        row += 1;
    }
    if row != rows {
        return Err(format!("expected {rows} rows, found {row}"));
    }
    Ok(m)
}

/// Parse "a", "bi", or "a+bi" (signs and scientific notation allowed; a bare
/// "i" means 1i).
pub fn parse_complex(token: &str) -> Result<Complex64, String> {
    let t = token.trim();
    if t.is_empty() {
        return Err("empty scalar".into());
    }
    if let Some(imag_part) = t.strip_suffix(['i', 'I']) {
        // Find the split between real and imaginary: the last sign that is
        // neither leading nor part of an exponent.
        let bytes = imag_part.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            let c = bytes[k] as char;
            if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
                split = Some(k);
                break;
            }
        }
        match split {
            Some(k) => {
                let re = parse_real(&imag_part[..k])?;
                let im = parse_signed_coefficient(&imag_part[k..])?;
                Ok(Complex64::new(re, im))
            }
            None => Ok(Complex64::new(0.0, parse_signed_coefficient(imag_part)?)),
        }
    } else {
        Ok(Complex64::new(parse_real(t)?, 0.0))
    }
}

fn parse_real(s: &str) -> Result<f64, String> {
    s.parse().map_err(|_| format!("invalid real part {s:?}"))
}

/// Imaginary coefficient with the unit stripped: "", "+", "-", or a number.
fn parse_signed_coefficient(s: &str) -> Result<f64, String> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        other => other
            .parse()
            .map_err(|_| format!("invalid imaginary part {other:?}")),
    }
}
