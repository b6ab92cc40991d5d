use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use semilab::graph::{DirectedGraph, PathWord};

use crate::CliError;

pub fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` (also `i`, `-i`, exponents allowed).
pub fn complex(s: &str) -> Result<Complex64, CliError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::input(format!("cannot parse `{s}` as a complex number a+bi"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return match t.parse::<f64>() {
            Ok(re) if re.is_finite() => Ok(Complex64::new(re, 0.0)),
            _ => Err(bad()),
        };
    };
    // split at the last sign that is not leading and not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

pub fn complex_list(s: &str) -> Result<Vec<Complex64>, CliError> {
    s.split(',').map(complex).collect()
}

pub fn usize_list(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| CliError::input(format!("cannot parse `{x}` as a nonnegative integer")))
        })
        .collect()
}

pub fn turns(t: f64) -> Result<Complex64, CliError> {
    if !t.is_finite() {
        return Err(CliError::input("μ must be a finite number of turns"));
    }
    Ok(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t))
}

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn load_graph(path: &Path) -> Result<Arc<DirectedGraph>, CliError> {
    let g = DirectedGraph::from_json(&read(path)?)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok(Arc::new(g))
}

pub fn path(g: &DirectedGraph, ids: &str) -> Result<PathWord, CliError> {
    let names: Vec<&str> = ids.split(',').map(str::trim).collect();
    Ok(g.path(&names)?)
}
