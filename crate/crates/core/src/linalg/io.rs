//! Plain-text matrix format.
//!
//! ```text
//! dim 2
//! 1.0000000000000000e0+0.0000000000000000e0i 0.0000000000000000e0-1.0000000000000000e0i
//! 0.0000000000000000e0+1.0000000000000000e0i 2.0000000000000000e0+0.0000000000000000e0i
//! ```
//!
//! Entries are written with 17 significant digits so doubles round-trip.

use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex;

use super::{GeneralOperator, LinalgError};
use crate::scalar::Real;

pub fn write_matrix<T: Real>(m: &GeneralOperator<T>) -> String {
    let n = m.dim();
    let prec = T::SIGNIFICANT_DIGITS - 1;
    let mut out = String::new();
    let _ = writeln!(out, "dim {n}");
    for i in 0..n {
        for j in 0..n {
            let z = m.get(i, j);
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{:.prec$e}", z.re, prec = prec);
            if z.im.is_sign_negative() {
                let _ = write!(out, "-{:.prec$e}i", -z.im, prec = prec);
            } else {
                let _ = write!(out, "+{:.prec$e}i", z.im, prec = prec);
            }
        }
        out.push('\n');
    }
    out
}

pub fn read_matrix<T: Real + FromStr>(text: &str) -> Result<GeneralOperator<T>, LinalgError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line_no, header) = lines.next().ok_or(LinalgError::Parse {
        line: 1,
        message: "empty input".into(),
    })?;
    let dim = header
        .strip_prefix("dim")
        .and_then(|rest| rest.trim().parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| LinalgError::Parse {
            line: line_no,
            message: format!("expected header `dim n`, found `{header}`"),
        })?;
    let mut entries = Vec::with_capacity(dim * dim);
    for row in 0..dim {
        let (line_no, line) = lines.next().ok_or_else(|| LinalgError::Parse {
            line: line_no + row + 1,
            message: format!("missing row {row}"),
        })?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != dim {
            return Err(LinalgError::Parse {
                line: line_no,
                message: format!("expected {dim} entries, found {}", tokens.len()),
            });
        }
        for tok in tokens {
            entries.push(parse_complex::<T>(tok).ok_or_else(|| LinalgError::Parse {
                line: line_no,
                message: format!("bad complex entry `{tok}`"),
            })?);
        }
    }
    if let Some((line_no, extra)) = lines.next() {
        return Err(LinalgError::Parse {
            line: line_no,
            message: format!("trailing content `{extra}`"),
        });
    }
    Ok(GeneralOperator::from_fn(dim, |i, j| entries[i * dim + j]))
}

/// Parses `a+bi`, `a-bi`, `a` or `bi`.
pub fn parse_complex<T: Real + FromStr>(tok: &str) -> Option<Complex<T>> {
    let tok = tok.trim();
    if let Some(body) = tok.strip_suffix('i') {
        // Split at the last sign that does not belong to an exponent.
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        return match split {
            Some(k) => {
                let re = body[..k].parse::<T>().ok()?;
                let im = body[k..].trim_start_matches('+').parse::<T>().ok()?;
                Some(Complex::new(re, im))
            }
            None => {
                let im = match body {
                    "" | "+" => T::one(),
                    "-" => -T::one(),
                    s => s.trim_start_matches('+').parse::<T>().ok()?,
                };
                Some(Complex::new(T::zero(), im))
            }
        };
    }
    tok.parse::<T>().ok().map(|re| Complex::new(re, T::zero()))
}
