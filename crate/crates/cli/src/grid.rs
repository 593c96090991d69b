//! Value-grid syntax shared by every sweep flag.
//!
//! A grid is either a comma list (`5,10,20`) or a geometric range
//! `lo:hi:n` — optionally suffixed `(geom)` for readability — which places
//! `n` points between `lo` and `hi` at constant ratio, endpoints exact.

use crate::CliError;

/// Parses a sweep flag into its list of values.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let compact: String = text.split_whitespace().collect();
    if compact.is_empty() {
        return Err(CliError::Usage("empty value grid".into()));
    }
    if compact.contains(':') {
        return parse_geometric(&compact);
    }
    compact.split(',').map(parse_number).collect()
}

/// Grid text with interior whitespace removed: the canonical form echoed in
/// artifact metadata and replay lines (values containing spaces would split
/// when a replay line is tokenised).
pub fn canonical_text(text: &str) -> String {
    text.split_whitespace().collect()
}

fn parse_number(text: &str) -> Result<f64, CliError> {
    let value: f64 = text
        .parse()
        .map_err(|_| CliError::Usage(format!("cannot parse '{text}' as a number")))?;
    if !value.is_finite() {
        return Err(CliError::Usage(format!("grid value '{text}' must be finite")));
    }
    Ok(value)
}

fn parse_geometric(text: &str) -> Result<Vec<f64>, CliError> {
    let body = text.strip_suffix("(geom)").unwrap_or(text);
    let parts: Vec<&str> = body.split(':').collect();
    let [lo, hi, count] = parts[..] else {
        return Err(CliError::Usage(format!(
            "geometric range must be lo:hi:n, got '{text}'"
        )));
    };
    let lo = parse_number(lo)?;
    let hi = parse_number(hi)?;
    let count: usize = count
        .parse()
        .map_err(|_| CliError::Usage(format!("cannot parse '{count}' as a point count")))?;
    if count < 2 {
        return Err(CliError::Usage("geometric range needs at least 2 points".into()));
    }
    if !(lo > 0.0 && hi > lo) {
        return Err(CliError::Usage(format!(
            "geometric range needs 0 < lo < hi, got {lo}:{hi}"
        )));
    }
    let span = hi / lo;
    Ok((0..count)
        .map(|k| {
            if k == count - 1 {
                hi
            } else {
                lo * span.powf(k as f64 / (count - 1) as f64)
            }
        })
        .collect())
}
