//! Number and angle text formats.

use std::f64::consts::PI;

use serde_json::Value;

use crate::error::CliError;

pub const SIG_DIGITS: usize = 12;

fn trim_zeros(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// `%.12g`: 12 significant digits, fixed notation for exponents in `[-5, 12)`.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    fmt_num(x).parse().unwrap_or(x)
}

/// Rounds every non-integer number in a JSON tree to 12 significant digits.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            if let Some(r) = serde_json::Number::from_f64(round_sig(x)) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Radians, or a multiple of pi written with a `pi` suffix (`0.35pi`, `pi`).
pub fn parse_angle(s: &str) -> Result<f64, CliError> {
    let t = s.trim();
    let value = match t.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.trim_end().trim_end_matches('*').trim();
            let c: f64 = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c
                    .parse()
                    .map_err(|_| CliError::Input(format!("bad angle {s:?}")))?,
            };
            c * PI
        }
        None => t
            .parse()
            .map_err(|_| CliError::Input(format!("bad angle {s:?}")))?,
    };
    if !value.is_finite() {
        return Err(CliError::Input(format!("angle {s:?} is not finite")));
    }
    Ok(value)
}
