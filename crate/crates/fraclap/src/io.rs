//! Text formats of the CLI: CSV emission and parsing, the flat key=value
//! config file, and gnuplot companion scripts.
//!
//! CSV output is deterministic: '.' decimal separator, scientific notation
//! with 17 significant digits, one header row, `#`-prefixed metadata lines
//! before it. Identical inputs produce byte-identical files.

use crate::harness::ConvergenceReport;
use crate::{Error, Result};

/// Scientific notation with 17 significant digits.
pub fn format_sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// Renders one CSV with optional `#` metadata lines, a header row, and
/// numeric rows (empty cells for missing values).
pub fn render_csv(meta: &[String], header: &[&str], rows: &[Vec<Option<f64>>]) -> String {
    let mut out = String::new();
    for m in meta {
        out.push_str("# ");
        out.push_str(m);
        out.push('\n');
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| c.map(format_sci).unwrap_or_default())
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// CSV for a convergence report: one row per sweep cell.
pub fn report_csv(report: &ConvergenceReport) -> String {
    let rows: Vec<Vec<Option<f64>>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                Some(r.alpha),
                Some(if r.order == crate::InterpOrder::Tent { 1.0 } else { 2.0 }),
                Some(r.l),
                Some(r.h),
                Some(r.error),
                r.error2,
                Some(if r.saturated { 1.0 } else { 0.0 }),
            ]
        })
        .collect();
    render_csv(
        std::slice::from_ref(&report.meta),
        &["alpha", "order", "L", "h", "error", "error2", "saturated"],
        &rows,
    )
}

/// CSV for the fitted rates of a convergence report.
pub fn rates_csv(report: &ConvergenceReport) -> String {
    let rows: Vec<Vec<Option<f64>>> = report
        .series
        .iter()
        .map(|s| {
            vec![
                Some(s.alpha),
                Some(if s.order == crate::InterpOrder::Tent { 1.0 } else { 2.0 }),
                Some(s.l),
                s.rate,
                s.rate2,
                Some(if s.saturated { 1.0 } else { 0.0 }),
            ]
        })
        .collect();
    render_csv(
        std::slice::from_ref(&report.meta),
        &["alpha", "order", "L", "rate", "rate2", "saturated"],
        &rows,
    )
}

/// A gnuplot script plotting `error` against `h` from a report CSV on
/// doubly logarithmic axes.
pub fn gnuplot_script(csv_name: &str, title: &str) -> String {
    let mut s = String::new();
    s.push_str("set logscale xy\n");
    s.push_str("set xlabel 'h'\n");
    s.push_str("set ylabel 'error'\n");
    s.push_str(&format!("set title '{title}'\n"));
    s.push_str("set datafile separator ','\n");
    s.push_str(&format!(
        "plot '{csv_name}' every ::1 using 4:5 with linespoints title 'error'\n"
    ));
    s
}

/// Parses a two-column numeric CSV (`x,value` per line). `#` lines and
/// blank lines are skipped; one non-numeric header row is tolerated.
pub fn parse_table_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cells = line.split(',');
        let (a, b) = (cells.next().unwrap_or(""), cells.next().unwrap_or(""));
        if cells.next().is_some() {
            return Err(Error::Parse(format!(
                "table line {}: more than two columns",
                lineno + 1
            )));
        }
        match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
            (Ok(x), Ok(v)) => {
                if !(x.is_finite() && v.is_finite()) {
                    return Err(Error::Parse(format!(
                        "table line {}: non-finite value",
                        lineno + 1
                    )));
                }
                rows.push((x, v));
            }
            // a fully non-numeric first row is a column header
            (Err(_), Err(_)) if rows.is_empty() && lineno == 0 => continue,
            _ => {
                return Err(Error::Parse(format!(
                    "table line {}: expected 'x,value'",
                    lineno + 1
                )))
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse("table: no data rows".into()));
    }
    Ok(rows)
}

/// Parses the flat `key = value` config format. `#` comments and blank
/// lines are skipped; keys mirror the CLI's long flag names.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(Error::Parse(format!(
                "config line {}: expected key=value",
                lineno + 1
            )));
        };
        let key = line[..eq].trim();
        let value = line[eq + 1..].trim();
        if key.is_empty() {
            return Err(Error::Parse(format!("config line {}: empty key", lineno + 1)));
        }
        if key.contains(char::is_whitespace) {
            return Err(Error::Parse(format!(
                "config line {}: key '{key}' contains whitespace",
                lineno + 1
            )));
        }
        pairs.push((key.to_string(), value.to_string()));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_sci(1.0), "1.0000000000000000e0");
        assert_eq!(format_sci(-0.125), "-1.2500000000000000e-1");
        // round-trips through parse exactly
        let x = std::f64::consts::PI * 1e-7;
        assert_eq!(format_sci(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn csv_render_deterministic_with_empty_cells() {
        let text = render_csv(
            &["meta".into()],
            &["a", "b"],
            &[vec![Some(1.0), None], vec![Some(2.0), Some(0.5)]],
        );
        assert_eq!(
            text,
            "# meta\na,b\n1.0000000000000000e0,\n2.0000000000000000e0,5.0000000000000000e-1\n"
        );
    }

    #[test]
    fn table_parse_accepts_header_and_comments() {
        let rows = parse_table_csv("x,u\n# note\n0.5,1.25\n-0.5,1.25\n").unwrap();
        assert_eq!(rows, vec![(0.5, 1.25), (-0.5, 1.25)]);
    }

    #[test]
    fn table_parse_rejects_garbage() {
        assert!(parse_table_csv("").is_err());
        assert!(parse_table_csv("1.0,2.0,3.0\n").is_err());
        assert!(parse_table_csv("0.1,nope\n0.2,1.0\n").is_err());
        assert!(parse_table_csv("0.1,inf\n").is_err());
    }

    #[test]
    fn config_parse_basics() {
        let pairs =
            parse_config("# comment\nalpha = 0.5\nout=run.csv\n\norder = quad\n").unwrap();
        assert_eq!(
            pairs,
            vec![
                ("alpha".into(), "0.5".into()),
                ("out".into(), "run.csv".into()),
                ("order".into(), "quad".into()),
            ]
        );
        assert!(parse_config("no equals sign").is_err());
        assert!(parse_config("= value").is_err());
        assert!(parse_config("two words = 1").is_err());
    }
}
