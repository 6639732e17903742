//! Text formats read and written by the CLI.
//!
//! - FSL gradient tables: `bvals` is one line of b-values rounded to 0.1,
//!   `bvecs` is three lines (x, y, z) with 6 significant digits.
//! - Sample files: one real value per line; blank lines and lines starting
//!   with `#` are skipped.
//! - Coefficient CSV: header `n,l,m,re,im`, one row per coefficient.
//! - Query files: `b x y z` per line, separated by whitespace or commas.
//!
//! Floats written "at full precision" use Rust's shortest round-trip
//! representation.

use num_complex::Complex64;
use qspace_core::angular::DirectedSample;
use qspace_core::multishell::{MultiShellGrid, SpfLayout};

use crate::CliError;

/// Formats `x` rounded to one decimal, dropping a trailing `.0`.
pub fn format_bvalue(x: f64) -> String {
    let s = format!("{:.1}", x);
    match s.strip_suffix(".0") {
        Some(t) if t != "-0" => t.to_string(),
        Some(_) => "0".to_string(),
        None => s,
    }
}

/// Formats `x` with 6 significant digits, without exponent for the unit
/// range. Values that round to zero print as `0`.
pub fn format_sig6(x: f64) -> String {
    if x.abs() < 5e-7 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let mut s = format!("{:.*}", decimals, x);
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    s
}

pub fn write_bvals(grid: &MultiShellGrid) -> String {
    let mut line = grid.samples().iter().map(|s| format_bvalue(s.b)).collect::<Vec<_>>().join(" ");
    line.push('\n');
    line
}

pub fn write_bvecs(grid: &MultiShellGrid) -> String {
    let mut out = String::new();
    for axis in 0..3 {
        let row: Vec<String> = grid.samples().iter().map(|s| format_sig6(s.direction[axis])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn parse_f64(token: &str, line: usize) -> Result<f64, CliError> {
    token.parse::<f64>().map_err(|_| CliError::parse(line, format!("cannot parse {:?} as a number", token)))
}

/// Parses an FSL `bvals` file (whitespace separated, any line breaks).
pub fn parse_bvals(text: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        for tok in line.split_whitespace() {
            out.push(parse_f64(tok, i + 1)?);
        }
    }
    Ok(out)
}

/// Parses an FSL `bvecs` file laid out as three rows.
pub fn parse_bvecs(text: &str) -> Result<Vec<[f64; 3]>, CliError> {
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line.split_whitespace().map(|t| parse_f64(t, i + 1)).collect::<Result<Vec<_>, _>>()?;
        rows.push((i + 1, row));
    }
    if rows.len() != 3 {
        return Err(CliError::parse(rows.last().map_or(1, |r| r.0), format!("expected 3 rows, found {}", rows.len())));
    }
    let m = rows[0].1.len();
    for (line, row) in &rows {
        if row.len() != m {
            return Err(CliError::parse(*line, format!("expected {} columns, found {}", m, row.len())));
        }
    }
    Ok((0..m).map(|j| [rows[0].1[j], rows[1].1[j], rows[2].1[j]]).collect())
}

/// Per-sample table for plotting or inspection.
pub fn write_grid_csv(grid: &MultiShellGrid) -> String {
    let mut out = String::from("index,shell,b,q,theta,phi,x,y,z\n");
    for (i, s) in grid.samples().iter().enumerate() {
        out.push_str(&format!(
            "{},{},{:?},{:?},{:?},{:?},{:?},{:?},{:?}\n",
            i, s.shell, s.b, s.q, s.theta, s.phi, s.direction[0], s.direction[1], s.direction[2]
        ));
    }
    out
}

/// Full-sphere point list: the grid's hemisphere samples plus antipodes.
pub fn write_mirror_csv(points: &[(usize, f64, DirectedSample<f64>)]) -> String {
    let mut out = String::from("shell,b,x,y,z,mirrored\n");
    for (shell, b, p) in points {
        out.push_str(&format!(
            "{},{:?},{:?},{:?},{:?},{}\n",
            shell,
            b,
            p.direction[0],
            p.direction[1],
            p.direction[2],
            u8::from(p.mirrored)
        ));
    }
    out
}

/// Reads rows of a CSV-ish file with `#` comments, yielding 1-based line
/// numbers and trimmed content.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_samples(text: &str) -> Result<Vec<f64>, CliError> {
    content_lines(text).map(|(line, l)| parse_f64(l, line)).collect()
}

pub fn write_samples(values: &[f64]) -> String {
    values.iter().map(|v| format!("{:?}\n", v)).collect()
}

pub fn write_coefficients(layout: &SpfLayout, values: &[Complex64]) -> String {
    let mut out = String::from("n,l,m,re,im\n");
    for ((n, l, m), v) in layout.entries().zip(values) {
        out.push_str(&format!("{},{},{},{:?},{:?}\n", n, l, m, v.re, v.im));
    }
    out
}

/// Parses a coefficient CSV. Rows must form a complete layout; their order
/// is free.
pub fn parse_coefficients(text: &str) -> Result<(SpfLayout, Vec<Complex64>), CliError> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, header)) if header.replace(' ', "") == "n,l,m,re,im" => {}
        Some((line, header)) => {
            return Err(CliError::parse(line, format!("expected header n,l,m,re,im, found {:?}", header)))
        }
        None => return Err(CliError::parse(1, "empty coefficient file")),
    }
    let mut rows = Vec::new();
    for (line, l) in lines {
        let fields: Vec<&str> = l.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(CliError::parse(line, format!("expected 5 fields, found {}", fields.len())));
        }
        let int = |s: &str| {
            s.parse::<i64>().map_err(|_| CliError::parse(line, format!("cannot parse {:?} as an integer", s)))
        };
        let n = int(fields[0])?;
        let l_deg = int(fields[1])?;
        let m = int(fields[2])?;
        if n < 0 || l_deg < 0 || m.abs() > l_deg || l_deg % 2 == 1 {
            return Err(CliError::parse(line, format!("invalid index (n={}, l={}, m={})", n, l_deg, m)));
        }
        let v = Complex64::new(parse_f64(fields[3], line)?, parse_f64(fields[4], line)?);
        rows.push((line, n as usize, l_deg as usize, m, v));
    }
    if rows.is_empty() {
        return Err(CliError::parse(1, "no coefficient rows"));
    }
    let degrees = rows.iter().map(|r| r.2).max().unwrap_or(0) / 2 + 1;
    let mut counts = vec![0usize; degrees];
    for r in &rows {
        counts[r.2 / 2] = counts[r.2 / 2].max(r.1 + 1);
    }
    let layout = SpfLayout::from_radial_counts(counts)
        .map_err(|e| CliError::parse(rows[0].0, format!("coefficient rows do not form a valid layout: {}", e)))?;
    let mut values = vec![None; layout.len()];
    for (line, n, l, m, v) in rows {
        let idx = layout.index(n, l, m).expect("index inside derived layout");
        if values[idx].replace(v).is_some() {
            return Err(CliError::parse(line, format!("duplicate coefficient (n={}, l={}, m={})", n, l, m)));
        }
    }
    if let Some(missing) = values.iter().position(Option::is_none) {
        let (n, l, m) = layout.entries().nth(missing).expect("entry exists");
        return Err(CliError::parse(text.lines().count(), format!("missing coefficient (n={}, l={}, m={})", n, l, m)));
    }
    Ok((layout, values.into_iter().map(|v| v.expect("checked")).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Query {
    pub b: f64,
    pub direction: [f64; 3],
}

pub fn parse_queries(text: &str) -> Result<Vec<Query>, CliError> {
    let mut out = Vec::new();
    for (line, l) in content_lines(text) {
        let fields: Vec<&str> = l.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        if fields.len() != 4 {
            return Err(CliError::parse(line, format!("expected 4 fields (b x y z), found {}", fields.len())));
        }
        let b = parse_f64(fields[0], line)?;
        let d = [parse_f64(fields[1], line)?, parse_f64(fields[2], line)?, parse_f64(fields[3], line)?];
        if !b.is_finite() || b < 0.0 {
            return Err(CliError::parse(line, format!("b must be finite and nonnegative, got {}", b)));
        }
        let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(CliError::parse(line, "direction must be a finite nonzero vector"));
        }
        out.push(Query { b, direction: [d[0] / norm, d[1] / norm, d[2] / norm] });
    }
    Ok(out)
}

pub fn write_values(values: &[Complex64], complex: bool) -> String {
    values.iter().map(|v| if complex { format!("{:?},{:?}\n", v.re, v.im) } else { format!("{:?}\n", v.re) }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bvalue_rounding() {
        assert_eq!(format_bvalue(8000.0), "8000");
        assert_eq!(format_bvalue(411.3168941), "411.3");
        assert_eq!(format_bvalue(1694.40666), "1694.4");
        assert_eq!(format_bvalue(0.01), "0");
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_sig6(0.123456789), "0.123457");
        assert_eq!(format_sig6(-0.5), "-0.5");
        assert_eq!(format_sig6(1.0), "1");
        assert_eq!(format_sig6(0.000123456789), "0.000123457");
        assert_eq!(format_sig6(1e-9), "0");
        assert_eq!(format_sig6(0.99999999), "1");
    }

    #[test]
    fn samples_skip_comments() {
        let v = parse_samples("# header\n1.5\n\n  -2e-3\n#x\n0\n").unwrap();
        assert_eq!(v, vec![1.5, -2e-3, 0.0]);
        match parse_samples("1\nabc\n") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn queries_report_line_numbers() {
        let q = parse_queries("# b x y z\n1000 0 0 2\n500,1,0,0\n").unwrap();
        assert_eq!(q[0].direction, [0.0, 0.0, 1.0]);
        assert_eq!(q[1].b, 500.0);
        for (text, bad) in [("1 0 0 1\n1 2 3\n", 2), ("1 0 0 1\n\n1 a 0 0\n", 3), ("1 0 0 0\n", 1), ("-1 1 0 0\n", 1)] {
            match parse_queries(text) {
                Err(CliError::Parse { line, .. }) => assert_eq!(line, bad, "{:?}", text),
                other => panic!("{:?}", other),
            }
        }
    }

    #[test]
    fn coefficient_csv_round_trip() {
        let layout = qspace_core::multishell::staircase_index(&[3, 5, 9, 11]);
        let values: Vec<Complex64> =
            (0..layout.len()).map(|i| Complex64::new(i as f64 / 7.0, -(i as f64).sqrt())).collect();
        let text = write_coefficients(&layout, &values);
        let (parsed_layout, parsed) = parse_coefficients(&text).unwrap();
        assert_eq!(parsed_layout, layout);
        assert_eq!(parsed, values);
    }

    #[test]
    fn coefficient_csv_errors() {
        assert!(parse_coefficients("n,l,m,re\n").is_err());
        match parse_coefficients("n,l,m,re,im\n0,0,0,1,0\n0,0,0,1,0\n") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{:?}", other),
        }
        match parse_coefficients("n,l,m,re,im\n0,0,0,1,0\n0,2,1,1,0\n") {
            Err(CliError::Parse { message, .. }) => assert!(message.contains("missing")),
            other => panic!("{:?}", other),
        }
        match parse_coefficients("n,l,m,re,im\n0,1,0,1,0\n") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{:?}", other),
        }
    }
}
