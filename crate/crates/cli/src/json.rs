use std::io::Write;
use std::path::Path;

use ricci_core::io::fmt_float;
use serde::{Serialize, Serializer};

use crate::exit::Failure;

/// A float serialized with the fixed 17-digit format used in CSV files.
/// Non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sci(pub f64);

impl Serialize for Sci {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = serde_json::value::RawValue::from_string(fmt_float(self.0))
            .map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

pub fn sci(x: Option<f64>) -> Option<Sci> {
    x.map(Sci)
}

/// Pretty JSON to `out`, or to stdout when no path is given.
pub fn emit(value: &impl Serialize, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::new(crate::exit::Exit::Io, e.to_string()))?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sci_format() {
        assert_eq!(
            serde_json::to_string(&Sci(0.5)).unwrap(),
            "5.0000000000000000e-1"
        );
        assert_eq!(
            serde_json::to_string(&Sci(-3.0)).unwrap(),
            "-3.0000000000000000e0"
        );
        assert_eq!(serde_json::to_string(&Sci(f64::NAN)).unwrap(), "null");
        assert_eq!(serde_json::to_string(&sci(None)).unwrap(), "null");
    }
}
