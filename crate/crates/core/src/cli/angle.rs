//! Angle expressions for command-line flags.
//!
//! ```text
//! angle := ['-'] term
//! term  := number                      plain radians, e.g. 1.5708
//!        | [number ['*']] 'pi' ['/' number]
//! ```
//!
//! So `pi`, `pi/2`, `3pi/4`, `3*pi/4`, `-pi/8` and `0.25` are all accepted.

use std::f64::consts::PI;

pub fn parse_angle(expr: &str) -> Result<f64, String> {
    let s: String = expr
        .split_whitespace()
        .collect::<String>()
        .to_ascii_lowercase();
    if s.is_empty() {
        return Err("empty angle expression".into());
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s.strip_prefix('+').unwrap_or(&s)),
    };
    let number = |t: &str| -> Result<f64, String> {
        if t.starts_with(['+', '-']) {
            return Err(format!("malformed angle expression '{expr}'"));
        }
        match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(format!("malformed angle expression '{expr}'")),
        }
    };
    let value = match body.find("pi") {
        None => number(body)?,
        Some(at) => {
            let coeff = body[..at].strip_suffix('*').unwrap_or(&body[..at]);
            let coeff = if coeff.is_empty() {
                1.0
            } else {
                number(coeff)?
            };
            let rest = &body[at + 2..];
            let denom = match rest {
                "" => 1.0,
                _ => {
                    let d = rest
                        .strip_prefix('/')
                        .ok_or_else(|| format!("malformed angle expression '{expr}'"))?;
                    let d = number(d)?;
                    if d == 0.0 {
                        return Err(format!("division by zero in '{expr}'"));
                    }
                    d
                }
            };
            coeff * PI / denom
        }
    };
    Ok(sign * value)
}

/// Comma-separated list of angle expressions.
pub fn parse_angle_list(list: &str) -> Result<Vec<f64>, String> {
    list.split(',')
        .map(|item| parse_angle(item.trim()))
        .collect()
}

/// A θ grid: either a point count (evenly spaced over `[0, 2π]`, both ends
/// included) or an explicit list.
pub fn parse_theta_grid(spec: &str) -> Result<Vec<f64>, String> {
    let t = spec.trim();
    if !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit()) {
        let n: usize = t.parse().map_err(|_| format!("bad point count '{t}'"))?;
        if n < 2 {
            return Err(format!("a theta grid needs at least 2 points, got {n}"));
        }
        return Ok((0..n)
            .map(|k| 2.0 * PI * k as f64 / (n - 1) as f64)
            .collect());
    }
    parse_angle_list(t)
}
