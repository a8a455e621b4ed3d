//! Unit tables and quantity parsing.
//!
//! Canonical units: storage/config MB, bandwidth MB/s, time s, rate msg/s,
//! compute cores. Binary prefixes: 1 GB = 1024 MB.

use crate::rational::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dimension {
    Storage,
    Bandwidth,
    Time,
    Rate,
    Compute,
    Scalar,
}

impl Dimension {
    pub fn name(self) -> &'static str {
        match self {
            Dimension::Storage => "storage",
            Dimension::Bandwidth => "bandwidth",
            Dimension::Time => "time",
            Dimension::Rate => "rate",
            Dimension::Compute => "compute",
            Dimension::Scalar => "scalar",
        }
    }

    pub fn from_name(s: &str) -> Option<Dimension> {
        [
            Dimension::Storage,
            Dimension::Bandwidth,
            Dimension::Time,
            Dimension::Rate,
            Dimension::Compute,
        ]
        .into_iter()
        .find(|d| d.name() == s)
    }

    pub fn canonical_unit(self) -> &'static str {
        match self {
            Dimension::Storage => "MB",
            Dimension::Bandwidth => "MB/s",
            Dimension::Time => "s",
            Dimension::Rate => "msg/s",
            Dimension::Compute => "cores",
            Dimension::Scalar => "",
        }
    }
}

/// Factor converting one `unit` into the canonical unit of `dim`.
pub fn unit_factor(dim: Dimension, unit: &str) -> Option<Q> {
    let kib = Q::int(1024);
    let f = match (dim, unit) {
        (Dimension::Storage, "B") => Q::ONE / (kib * kib),
        (Dimension::Storage, "KB" | "KiB") => Q::ONE / kib,
        (Dimension::Storage, "MB" | "MiB") => Q::ONE,
        (Dimension::Storage, "GB" | "GiB") => kib,
        (Dimension::Storage, "TB" | "TiB") => kib * kib,
        (Dimension::Bandwidth, "KB/s") => Q::ONE / kib,
        (Dimension::Bandwidth, "MB/s") => Q::ONE,
        (Dimension::Bandwidth, "GB/s") => kib,
        (Dimension::Time, "us") => Q::new(1, 1_000_000),
        (Dimension::Time, "ms") => Q::new(1, 1000),
        (Dimension::Time, "s") => Q::ONE,
        (Dimension::Time, "min") => Q::int(60),
        (Dimension::Rate, "msg/s" | "Hz") => Q::ONE,
        (Dimension::Rate, "msg/min") => Q::new(1, 60),
        (Dimension::Compute, "cores" | "core") => Q::ONE,
        (Dimension::Compute, "millicores") => Q::new(1, 1000),
        _ => return None,
    };
    Some(f)
}

/// Parses `"<number> <unit>"` (space optional) or a bare number, which is
/// read in `default_unit`. Returns the value in canonical units.
pub fn parse_quantity(text: &str, dim: Dimension, default_unit: Option<&str>) -> Result<Q, String> {
    let t = text.trim();
    let split = t
        .char_indices()
        .find(|&(i, c)| c.is_ascii_alphabetic() && !(matches!(c, 'e' | 'E') && is_exponent(t, i)))
        .map(|(i, _)| i)
        .unwrap_or(t.len());
    let (num, unit) = (t[..split].trim(), t[split..].trim());
    let value: Q = num.parse().map_err(|_| format!("invalid number in `{t}`"))?;
    if dim == Dimension::Scalar {
        if !unit.is_empty() {
            return Err(format!("`{t}` must be a plain number"));
        }
        return Ok(value);
    }
    let unit = if unit.is_empty() {
        default_unit.unwrap_or(dim.canonical_unit())
    } else {
        unit
    };
    let factor = unit_factor(dim, unit).ok_or_else(|| format!("unknown {} unit `{unit}`", dim.name()))?;
    Ok(value * factor)
}

fn is_exponent(t: &str, i: usize) -> bool {
    let before = t[..i].chars().last().map(|c| c.is_ascii_digit() || c == '.').unwrap_or(false);
    let after = t[i + 1..].chars().next().map(|c| c.is_ascii_digit() || c == '-' || c == '+').unwrap_or(false);
    before && after
}

/// Renders a canonical value with its canonical unit; non-decimal rationals
/// are written as fractions so the text parses back exactly.
pub fn format_quantity(v: Q, dim: Dimension) -> String {
    let num = exact_text(v);
    match dim.canonical_unit() {
        "" => num,
        u => format!("{num} {u}"),
    }
}

/// Shortest exact text for a rational: decimal when it has at most six
/// fractional digits, `n/d` otherwise.
pub fn exact_text(v: Q) -> String {
    let dec = v.to_decimal();
    if dec.parse::<Q>().ok() == Some(v) {
        dec
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn conversions() {
        assert_eq!(parse_quantity("10 GB", Dimension::Storage, None).unwrap(), Q::int(10240));
        assert_eq!(parse_quantity("1 GB/s", Dimension::Bandwidth, None).unwrap(), Q::int(1024));
        assert_eq!(parse_quantity("5ms", Dimension::Time, None).unwrap(), Q::new(1, 200));
        assert_eq!(parse_quantity("2", Dimension::Storage, Some("GB")).unwrap(), Q::int(2048));
        assert_eq!(parse_quantity("1.5e3 MB", Dimension::Storage, None).unwrap(), Q::int(1500));
        assert_eq!(parse_quantity("10", Dimension::Rate, None).unwrap(), Q::int(10));
        assert!(parse_quantity("3 parsecs", Dimension::Time, None).is_err());
        assert!(parse_quantity("3 s", Dimension::Scalar, None).is_err());
    }

    #[test]
    fn exact_text_round_trips() {
        assert_eq!(exact_text(Q::new(1, 3)), "1/3");
        assert_eq!(exact_text(Q::new(1, 200)), "0.005");
        assert_eq!(format_quantity(Q::int(1000), Dimension::Bandwidth), "1000 MB/s");
    }

    proptest! {
        #[test]
        fn gigabytes_scale_by_1024(n in 0i64..1_000_000) {
            let gb = parse_quantity(&format!("{n} GB"), Dimension::Storage, None).unwrap();
            let mb = parse_quantity(&format!("{n} MB"), Dimension::Storage, None).unwrap();
            prop_assert_eq!(gb, mb * Q::int(1024));
        }

        #[test]
        fn milliseconds_scale_by_thousandth(n in 0i64..1_000_000) {
            let ms = parse_quantity(&format!("{n} ms"), Dimension::Time, None).unwrap();
            prop_assert_eq!(ms * Q::int(1000), Q::int(n));
        }

        #[test]
        fn formatted_quantities_parse_back(n in -100000i64..100000, d in 1i64..5000) {
            let v = Q::new(n as i128, d as i128);
            for dim in [Dimension::Storage, Dimension::Time, Dimension::Bandwidth] {
                prop_assert_eq!(parse_quantity(&format_quantity(v, dim), dim, None).unwrap(), v);
            }
        }
    }
}
