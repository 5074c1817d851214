//! Matrix CSV files and numeric parameters.

use std::io::Write;
use std::path::Path;

use stiefel_core::Mat;

use crate::error::CliError;

/// Reads a headerless CSV file, one matrix row per line.
pub fn read_matrix(path: &Path) -> Result<Mat, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    parse_matrix(&text).map_err(|e| match e {
        CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_matrix(text: &str) -> Result<Mat, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(j, f)| {
                f.parse::<f64>()
                    .map_err(|_| CliError::Parse(format!("row {}, column {}: `{f}` is not a number", i + 1, j + 1)))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    Mat::from_rows(&refs).map_err(|e| CliError::Parse(e.to_string()))
}

/// Shortest decimal that parses back to the same `f64`; exponent form
/// outside `[1e-5, 1e16)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Every entry in [`fmt_f64`] form, so reading the output back gives the
/// identical matrix.
pub fn format_matrix(m: &Mat) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_matrix(m: &Mat, path: Option<&Path>) -> Result<(), CliError> {
    let text = format_matrix(m);
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Parses a real number or a multiple of pi: `1.5`, `pi`, `-pi`, `0.5pi`,
/// `2*pi`, `pi/2`, `3pi/4`.
pub fn parse_param(s: &str) -> Result<f64, CliError> {
    let bad = || CliError::Parse(format!("`{s}` is not a number or multiple of pi"));
    let t = s.trim().to_ascii_lowercase();
    if let Some((num, den)) = t.split_once('/') {
        let den: f64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0.0 {
            return Err(bad());
        }
        return Ok(parse_param(num)? / den);
    }
    let value = if let Some(coef) = t.strip_suffix("pi") {
        let coef = coef.trim().trim_end_matches('*').trim();
        let c = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        c * std::f64::consts::PI
    } else {
        t.parse::<f64>().map_err(|_| bad())?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// Comma-separated list of [`parse_param`] values.
pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(parse_param).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn pi_multiples() {
        assert_eq!(parse_param("pi").unwrap(), PI);
        assert_eq!(parse_param("0.5pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_param("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_param("-pi").unwrap(), -PI);
        assert_eq!(parse_param("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_param("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_param(" 1.25 ").unwrap(), 1.25);
        assert!(parse_param("tau").is_err());
        assert!(parse_param("1/0").is_err());
        assert!(parse_param("inf").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list("0.25pi, 0.5pi").unwrap(), vec![0.25 * PI, 0.5 * PI]);
    }

    #[test]
    fn matrix_text_roundtrip_is_exact() {
        let m = Mat::from_rows(&[&[0.1, -1.0 / 3.0], &[1e-300, std::f64::consts::E], &[-4.7e-16, 2e20]]).unwrap();
        let back = parse_matrix(&format_matrix(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn number_forms() {
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(-0.25), "-0.25");
        assert_eq!(fmt_f64(4.7e-16), "4.7e-16");
        assert_eq!(fmt_f64(1e16), "1e16");
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }

    #[test]
    fn matrix_errors() {
        assert!(matches!(parse_matrix("1,2\n3"), Err(CliError::Parse(_))));
        assert!(matches!(parse_matrix("1,x"), Err(CliError::Parse(_))));
        assert!(matches!(parse_matrix(""), Err(CliError::Parse(_))));
        assert_eq!(parse_matrix("# comment\n1, 2\n\n3, 4\n").unwrap().shape(), (2, 2));
    }
}
