use std::f64::consts::PI;

/// Parses a decimal angle or a simple multiple of π: `0.5`, `pi`, `-pi/2`,
/// `3pi/4`, `3*pi/4`, `π/8`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let s: String = text.trim().to_lowercase().replace('π', "pi").replace(' ', "");
    let bad = || format!("cannot parse angle {text:?}");
    let Some(at) = s.find("pi") else {
        let v: f64 = s.parse().map_err(|_| bad())?;
        return if v.is_finite() { Ok(v) } else { Err(bad()) };
    };
    let (head, tail) = (&s[..at], &s[at + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let coeff = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let divisor = match tail {
        "" => 1.0,
        t => t
            .strip_prefix('/')
            .ok_or_else(bad)?
            .parse::<f64>()
            .map_err(|_| bad())?,
    };
    if divisor == 0.0 || !coeff.is_finite() || !divisor.is_finite() {
        return Err(bad());
    }
    Ok(coeff * PI / divisor)
}

/// Largest gap between a decimal and the π/16 multiple it is read as; covers
/// angles rounded to four decimals such as `1.5708`.
pub const SNAP_TOL: f64 = 5e-5;

/// Like [`parse_angle`], but a decimal within [`SNAP_TOL`] of a multiple of
/// π/16 is replaced by that multiple.
pub fn parse_gate_angle(text: &str) -> Result<f64, String> {
    let v = parse_angle(text)?;
    let k = (v / (PI / 16.0)).round();
    let snapped = k * PI / 16.0;
    Ok(if (v - snapped).abs() <= SNAP_TOL { snapped } else { v })
}

/// Parses a comma-separated triple of angles.
pub fn parse_triple(text: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated angles, got {text:?}"));
    }
    let mut out = [0.0; 3];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = parse_angle(p)?;
    }
    Ok(out)
}

/// Formats an angle as a multiple of π/8 when it is one, else as a decimal.
pub fn format_angle(x: f64) -> String {
    let eighths = x / (PI / 8.0);
    let k = eighths.round();
    if (eighths - k).abs() > 1e-9 {
        return format!("{x:.9}");
    }
    let k = k as i64;
    if k == 0 {
        return "0".to_string();
    }
    // reduce k/8
    let g = gcd(k.unsigned_abs(), 8) as i64;
    let (num, den) = (k / g, 8 / g);
    let sign = if num < 0 { "-" } else { "" };
    let num = num.abs();
    let coeff = if num == 1 { String::new() } else { num.to_string() };
    if den == 1 {
        format!("{sign}{coeff}π")
    } else {
        format!("{sign}{coeff}π/{den}")
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Formats a real number, printing values within `1e-12` of zero as `0`.
pub fn format_real(x: f64) -> String {
    if x.abs() < 1e-12 {
        "0".to_string()
    } else {
        format!("{x:.9}")
    }
}
