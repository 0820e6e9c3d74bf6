//! Byte-stable output: 17 significant digits for every float.

use std::io::{self, Write};

use canfield::loci::FeasibilityMap;
use serde::Serialize;
use serde_json::ser::Formatter;

/// Formats `x` like C's `%.17g`.
pub fn g17(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..17).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Compact JSON with floats written by [`g17`]; non-finite floats become `null`.
struct G17Formatter;

impl Formatter for G17Formatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            writer.write_all(g17(value).as_bytes())
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` as one line of JSON.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, G17Formatter);
    value.serialize(&mut ser).expect("serializable document");
    out.push(b'\n');
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapFormat {
    Csv,
    Pgm,
}

/// Renders a feasibility map as CSV (`az_deg,pol_deg,feasible`, polar-major)
/// or as a plain PGM with one row per polar band.
pub fn emit_map(map: &FeasibilityMap, format: MapFormat) -> Vec<u8> {
    let mut out = String::new();
    match format {
        MapFormat::Csv => {
            out.push_str("az_deg,pol_deg,feasible\n");
            for (az, pol, f) in map.iter() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    g17(az.to_degrees()),
                    g17(pol.to_degrees()),
                    f as u8
                ));
            }
        }
        MapFormat::Pgm => {
            out.push_str(&format!("P2\n{} {}\n1\n", map.n_az, map.n_pol));
            for row in map.cells.chunks(map.n_az) {
                let line: Vec<&str> = row.iter().map(|&f| if f { "1" } else { "0" }).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
        }
    }
    out.into_bytes()
}
