//! Flag value parsers shared by several subcommands.

use std::path::PathBuf;

use ocular_core::augment::InputSize;

/// Accepts `0.0625` or `1/16`.
pub fn parse_fraction(s: &str) -> Result<f64, String> {
    let value = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let d: f64 = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            n / d
        }
        None => s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?,
    };
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(format!("expected a positive number, got {s:?}"))
    }
}

/// `HEIGHTxWIDTH`, e.g. `170x512`.
pub fn parse_input_size(s: &str) -> Result<InputSize, String> {
    let (h, w) = s
        .to_ascii_lowercase()
        .split_once('x')
        .map(|(h, w)| (h.trim().to_string(), w.trim().to_string()))
        .ok_or_else(|| format!("expected HEIGHTxWIDTH, got {s:?}"))?;
    let height: usize = h.parse().map_err(|_| format!("bad height in {s:?}"))?;
    let width: usize = w.parse().map_err(|_| format!("bad width in {s:?}"))?;
    if height == 0 || width == 0 {
        return Err(format!("input size must be non-zero, got {s:?}"));
    }
    Ok(InputSize { height, width })
}

/// `NAME=PATH` or a bare `PATH`.
#[derive(Debug, Clone, PartialEq)]
pub struct Named {
    pub name: Option<String>,
    pub path: PathBuf,
}

pub fn parse_named(s: &str) -> Result<Named, String> {
    match s.split_once('=') {
        Some((n, p)) if !n.is_empty() && !p.is_empty() => Ok(Named {
            name: Some(n.to_string()),
            path: p.into(),
        }),
        Some(_) => Err(format!("expected NAME=PATH, got {s:?}")),
        None => Ok(Named { name: None, path: s.into() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions() {
        assert_eq!(parse_fraction("1/16").unwrap(), 0.0625);
        assert_eq!(parse_fraction("0.5").unwrap(), 0.5);
        assert!(parse_fraction("0").is_err());
        assert!(parse_fraction("a/2").is_err());
    }

    #[test]
    fn sizes() {
        assert_eq!(parse_input_size("24x64").unwrap(), InputSize::DESK);
        assert!(parse_input_size("24").is_err());
        assert!(parse_input_size("0x5").is_err());
    }

    #[test]
    fn named() {
        assert_eq!(parse_named("M1=a.csv").unwrap().name.as_deref(), Some("M1"));
        assert_eq!(parse_named("a.csv").unwrap().name, None);
        assert!(parse_named("=a").is_err());
    }
}
