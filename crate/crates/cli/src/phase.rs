//! Numbers written as plain reals or as multiples of π: `pi`, `2pi`,
//! `4/3pi`, `-0.5pi`, `pi/3`, `4/3*pi`, `2π`.

use std::f64::consts::PI;

pub fn parse_phase(text: &str) -> Result<f64, String> {
    let s: String = text.trim().chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse `{text}` as a number or multiple of pi");
    if s.is_empty() {
        return Err(bad());
    }
    let lower = s.to_ascii_lowercase();
    let Some(pos) = lower.find("pi").map(|p| (p, 2)).or_else(|| lower.find('π').map(|p| (p, 'π'.len_utf8())))
    else {
        return lower.parse::<f64>().map_err(|_| bad()).and_then(|v| finite(v, text));
    };
    let (at, width) = pos;
    let coeff = lower[..at].trim_end_matches('*');
    let rest = &lower[at + width..];
    let mut value = match coeff {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => ratio(c).ok_or_else(bad)?,
    };
    if !rest.is_empty() {
        let divisor = rest.strip_prefix('/').and_then(|d| d.parse::<f64>().ok()).ok_or_else(bad)?;
        value /= divisor;
    }
    finite(value * PI, text)
}

fn ratio(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((a, b)) => Some(a.parse::<f64>().ok()? / b.parse::<f64>().ok()?),
        None => s.parse().ok(),
    }
}

fn finite(v: f64, text: &str) -> Result<f64, String> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{text}` is not a finite number"))
    }
}
