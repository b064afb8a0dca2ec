//! Angles as radians or as rational multiples of `pi`.

use std::f64::consts::PI;

/// Accepts `1.2`, `pi`, `-pi`, `pi/2`, `3pi/4`, `3*pi/4`, `0.5pi`.
pub fn parse(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    let Some(idx) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| format!("`{s}` is not an angle"));
    };
    let bad = || format!("`{s}` is not an angle (try `pi`, `pi/2`, `3pi/4` or radians)");
    let coeff = t[..idx].trim().trim_end_matches('*').trim();
    let coeff = match coeff {
        "" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let rest = t[idx + 2..].trim();
    let denom = if rest.is_empty() {
        1.0
    } else {
        let d = rest.strip_prefix('/').ok_or_else(bad)?.trim();
        d.parse::<f64>().ok().filter(|d| *d != 0.0).ok_or_else(bad)?
    };
    Ok(coeff * PI / denom)
}
