use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{Example, Task};
use crate::error::{Error, Result};
use crate::geometry::Point;

const SIG_DIGITS: i32 = 10;
const SEPARATOR: &str = "output";

/// Formats `v` with 10 significant digits, `%g` style: fixed notation for
/// moderate magnitudes, scientific otherwise, trailing zeros removed.
pub fn format_coord(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", (SIG_DIGITS - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIG_DIGITS).contains(&exp) {
        let decimals = (SIG_DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// One example per line: `x1 y1 … xn yn output i1 … ik`.
pub fn serialize(example: &Example) -> String {
    let mut parts: Vec<String> = Vec::with_capacity(2 * example.n() + 1 + example.output.len());
    for p in &example.points {
        parts.push(format_coord(p.x));
        parts.push(format_coord(p.y));
    }
    parts.push(SEPARATOR.to_string());
    parts.extend(example.output.iter().map(|i| i.to_string()));
    parts.join(" ")
}

/// Parses one line for `task`. `line_no` is 1-based and only used in errors.
pub fn parse_line(line: &str, task: Task, line_no: usize) -> Result<Example> {
    let err = |reason: String| Error::Parse { line: line_no, reason };
    let tokens: Vec<&str> = line.split_whitespace().collect();
    let sep =
        tokens.iter().position(|&t| t == SEPARATOR).ok_or_else(|| err(format!("missing `{SEPARATOR}` separator")))?;
    let (coords, labels) = (&tokens[..sep], &tokens[sep + 1..]);
    if coords.is_empty() || coords.len() % 2 != 0 {
        return Err(err(format!("odd or empty coordinate count {}", coords.len())));
    }
    let values = coords
        .iter()
        .map(|t| t.parse::<f64>().map_err(|e| err(format!("bad coordinate `{t}`: {e}"))))
        .collect::<Result<Vec<f64>>>()?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(err("non-finite coordinate".into()));
    }
    let points: Vec<Point> = values.chunks_exact(2).map(|c| Point::new(c[0], c[1])).collect();
    let output = labels
        .iter()
        .map(|t| t.parse::<usize>().map_err(|e| err(format!("bad index `{t}`: {e}"))))
        .collect::<Result<Vec<usize>>>()?;
    let n = points.len();
    if let Some(&bad) = output.iter().find(|&&i| i == 0 || i > n) {
        return Err(Error::Validation(format!("line {line_no}: index {bad} out of range 1..={n}")));
    }
    if output.is_empty() {
        return Err(err("empty label".into()));
    }
    if task == Task::Delaunay && output.len() % 3 != 0 {
        return Err(Error::Validation(format!(
            "line {line_no}: delaunay label has {} indices, not whole triples",
            output.len()
        )));
    }
    Ok(Example { task, points, output })
}

/// Reads every non-blank line of `path`.
pub fn read_examples(path: &Path, task: Task) -> Result<Vec<Example>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_line(&line, task, i + 1)?);
    }
    Ok(out)
}

/// Writes examples with LF line endings.
pub fn write_examples(path: &Path, examples: &[Example]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for e in examples {
        w.write_all(serialize(e).as_bytes())?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_formatting() {
        assert_eq!(format_coord(0.5), "0.5");
        assert_eq!(format_coord(0.0), "0");
        assert_eq!(format_coord(1.0), "1");
        assert_eq!(format_coord(0.123456789012345), "0.123456789");
        assert_eq!(format_coord(0.000123456789012), "0.000123456789");
        assert_eq!(format_coord(1.5e-7), "1.5e-7");
        assert_eq!(format_coord(-2.25), "-2.25");
        for v in [0.3, 0.987654321987, 1e-9, 12345.678] {
            let back: f64 = format_coord(v).parse().unwrap();
            assert!((back - v).abs() <= 1e-9 * v.abs());
        }
    }

    #[test]
    fn hull_round_trip() {
        let e = Example {
            task: Task::Hull,
            points: vec![Point::new(0.1, 0.2), Point::new(0.9, 0.25), Point::new(0.4, 0.8)],
            output: vec![1, 2, 3, 1],
        };
        let line = serialize(&e);
        assert_eq!(line, "0.1 0.2 0.9 0.25 0.4 0.8 output 1 2 3 1");
        assert_eq!(parse_line(&line, Task::Hull, 1).unwrap(), e);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_line("0.1 0.2 0.3 output 1", Task::Hull, 7), Err(Error::Parse { line: 7, .. })));
        assert!(matches!(parse_line("0.1 0.2 1", Task::Hull, 1), Err(Error::Parse { .. })));
        assert!(matches!(parse_line("0.1 0.2 output x", Task::Hull, 1), Err(Error::Parse { .. })));
        assert!(matches!(parse_line("0.1 0.2 0.3 0.4 output 1 3", Task::Tsp, 1), Err(Error::Validation(_))));
        assert!(matches!(parse_line("0 0 1 0 0 1 output 1 2", Task::Delaunay, 1), Err(Error::Validation(_))));
    }
}
