//! Unit-suffixed quantities: `0.5 mH`, `220 V`, `10 us`, `45 ohm`.

use std::fmt;

/// Physical dimension expected for a configuration key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Voltage,
    Current,
    Frequency,
    Resistance,
    Inductance,
    Capacitance,
    Power,
    ApparentPower,
    Time,
    /// Ratios and per-unit values; written bare or with `pu`.
    Dimensionless,
}

impl Dimension {
    /// Base SI symbol used when writing values back out.
    pub fn symbol(self) -> &'static str {
        match self {
            Dimension::Voltage => "V",
            Dimension::Current => "A",
            Dimension::Frequency => "Hz",
            Dimension::Resistance => "ohm",
            Dimension::Inductance => "H",
            Dimension::Capacitance => "F",
            Dimension::Power => "W",
            Dimension::ApparentPower => "VA",
            Dimension::Time => "s",
            Dimension::Dimensionless => "",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Dimension::Voltage => "voltage",
            Dimension::Current => "current",
            Dimension::Frequency => "frequency",
            Dimension::Resistance => "resistance",
            Dimension::Inductance => "inductance",
            Dimension::Capacitance => "capacitance",
            Dimension::Power => "power",
            Dimension::ApparentPower => "apparent power",
            Dimension::Time => "time",
            Dimension::Dimensionless => "dimensionless",
        };
        f.write_str(name)
    }
}

// Longest symbols first so that `VA` wins over `A` and `ohm` over `h`.
const BASE_UNITS: &[(&str, Dimension)] = &[
    ("ohm", Dimension::Resistance),
    ("Ohm", Dimension::Resistance),
    ("Hz", Dimension::Frequency),
    ("VA", Dimension::ApparentPower),
    ("Ω", Dimension::Resistance),
    ("V", Dimension::Voltage),
    ("A", Dimension::Current),
    ("H", Dimension::Inductance),
    ("F", Dimension::Capacitance),
    ("W", Dimension::Power),
    ("s", Dimension::Time),
];

const PREFIXES: &[(&str, f64)] = &[
    ("", 1.0),
    ("G", 1e9),
    ("M", 1e6),
    ("k", 1e3),
    ("m", 1e-3),
    ("u", 1e-6),
    ("µ", 1e-6),
    ("μ", 1e-6),
    ("n", 1e-9),
    ("p", 1e-12),
];

/// Scale factor to SI for `unit`, provided it measures `dim`.
pub fn unit_scale(unit: &str, dim: Dimension) -> Result<f64, String> {
    let unit = unit.trim();
    if dim == Dimension::Dimensionless {
        return match unit {
            "" | "pu" | "1" => Ok(1.0),
            other => Err(format!("expected a dimensionless value, found unit `{other}`")),
        };
    }
    if unit.is_empty() {
        return Err(format!("missing unit; expected {dim} in {}", dim.symbol()));
    }
    for (sym, d) in BASE_UNITS {
        if let Some(prefix) = unit.strip_suffix(sym) {
            let Some((_, scale)) = PREFIXES.iter().find(|(p, _)| *p == prefix) else {
                continue;
            };
            if *d != dim {
                return Err(format!("unit `{unit}` measures {d}, expected {dim}"));
            }
            return Ok(*scale);
        }
    }
    Err(format!("unknown unit `{unit}`"))
}

/// Parses `number [unit]` into SI. The space may be left out (`80mH`).
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, QuantityError> {
    let text = text.trim();
    let (num, unit) = match text.find(char::is_whitespace) {
        Some(pos) => (&text[..pos], text[pos..].trim()),
        None => {
            // Longest prefix that reads as a number, so `1e-3H` keeps its
            // exponent.
            let split = (1..=text.len())
                .rev()
                .filter(|&k| text.is_char_boundary(k))
                .find(|&k| text[..k].parse::<f64>().is_ok())
                .unwrap_or(text.len());
            (&text[..split], &text[split..])
        }
    };
    let value: f64 = num
        .parse()
        .map_err(|_| QuantityError::Number(format!("`{num}` is not a number")))?;
    if !value.is_finite() {
        return Err(QuantityError::Number(format!("`{num}` is not finite")));
    }
    let scale = unit_scale(unit, dim).map_err(QuantityError::Unit)?;
    Ok(value * scale)
}

/// Writes an SI value with its base unit, in a form that parses back to the
/// same `f64`.
pub fn format_quantity(value: f64, dim: Dimension) -> String {
    match dim.symbol() {
        "" => format!("{value}"),
        sym => format!("{value} {sym}"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuantityError {
    Number(String),
    Unit(String),
}

impl fmt::Display for QuantityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantityError::Number(m) | QuantityError::Unit(m) => f.write_str(m),
        }
    }
}
