//! JSON with every float printed to 17 significant digits, for byte-identical reruns.

use std::io;

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, Serializer};

#[derive(Clone, Copy, Debug, Default)]
pub struct SeventeenDigits;

impl Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", fmt_f64(value))
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        CompactFormatter.write_f64(writer, value as f64)
    }
}

/// `{:.16e}`: one digit, point, sixteen digits, exponent.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    value.serialize(&mut Serializer::with_formatter(&mut out, SeventeenDigits))?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        let vals = vec![0.1, 1.0 / 3.0, -2.5e-300, 12345.678, 0.0];
        let s = to_json_string(&vals).unwrap();
        assert!(s.contains("1.0000000000000001e-1"));
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vals);
        assert_eq!(to_json_string(&[f64::NAN]).unwrap(), "[null]");
    }
}
