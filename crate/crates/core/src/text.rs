//! Small number parsers shared by the probe text form and the CLI.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fock::C64;

/// Parses a real number, also accepting multiples of π such as `pi/4`,
/// `3pi/8`, `-pi` or `0.5*pi`.
pub fn parse_real(s: &str) -> Result<f64> {
    let t = s.trim();
    if let Ok(v) = t.parse::<f64>() {
        return if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::parse(s, "not a finite number"))
        };
    }
    let lower = t.to_ascii_lowercase();
    let Some(pos) = lower.find("pi") else {
        return Err(Error::parse(s, "not a number"));
    };
    let (head, tail) = (&lower[..pos], &lower[pos + 2..]);
    let head = head.trim_end_matches('*').trim();
    let factor = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h
            .parse::<f64>()
            .map_err(|_| Error::parse(s, "bad multiplier before pi"))?,
    };
    let tail = tail.trim();
    let divisor = if tail.is_empty() {
        1.0
    } else if let Some(d) = tail.strip_prefix('/') {
        d.trim()
            .parse::<f64>()
            .map_err(|_| Error::parse(s, "bad divisor after pi"))?
    } else {
        return Err(Error::parse(s, "unexpected text after pi"));
    };
    if divisor == 0.0 {
        return Err(Error::parse(s, "division by zero"));
    }
    Ok(factor * PI / divisor)
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` (also `j` for the imaginary unit).
pub fn parse_complex(s: &str) -> Result<C64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(Error::parse(s, "empty complex number"));
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Ok(C64::new(parse_real(&t)?, 0.0));
    };
    // split at the last sign that is not an exponent sign or the leading sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (parse_real(&body[..k])?, imag_part(&body[k..], s)?),
        None => (0.0, imag_part(body, s)?),
    };
    Ok(C64::new(re, im))
}

fn imag_part(text: &str, whole: &str) -> Result<f64> {
    match text {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        t => parse_real(t).map_err(|_| Error::parse(whole, "bad imaginary part")),
    }
}

/// Formats a number with 12 significant digits, fixed notation when the
/// exponent is moderate and scientific otherwise.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.11e}", x);
    let (_, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        format!("{:.*}", decimals, x)
    } else {
        let (mant, _) = sci.split_once('e').expect("mantissa");
        format!("{mant}e{exp}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_and_pi_multiples() {
        assert_eq!(parse_real("0.25").unwrap(), 0.25);
        assert_eq!(parse_real("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_real("3pi/8").unwrap(), 3.0 * PI / 8.0);
        assert_eq!(parse_real("-pi").unwrap(), -PI);
        assert_eq!(parse_real("0.5*pi").unwrap(), 0.5 * PI);
        assert!(parse_real("abc").is_err());
        assert!(parse_real("pi/0").is_err());
        assert!(parse_real("inf").is_err());
    }

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("1.5").unwrap(), C64::new(1.5, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), C64::new(0.0, 2.0));
        assert_eq!(parse_complex("1-0.5i").unwrap(), C64::new(1.0, -0.5));
        assert_eq!(parse_complex("-1+i").unwrap(), C64::new(-1.0, 1.0));
        assert_eq!(parse_complex("1e-3+2e-3i").unwrap(), C64::new(1e-3, 2e-3));
        assert!(parse_complex("x+yi").is_err());
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_sig12(8.0), "8.00000000000");
        assert_eq!(fmt_sig12(0.00125), "0.00125000000000");
        assert_eq!(fmt_sig12(-1234.5), "-1234.50000000");
        assert_eq!(fmt_sig12(1.5e-9), "1.50000000000e-9");
        assert_eq!(fmt_sig12(0.0), "0.00000000000");
    }
}
