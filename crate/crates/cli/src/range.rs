//! `start:stop:count[:lin|log]` grids.

use std::str::FromStr;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Lin,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let num = |t: &str| t.parse::<f64>().map_err(|_| format!("'{t}' is not a number in range '{s}'"));
        if parts.len() == 1 {
            let v = num(parts[0])?;
            return Ok(Range { start: v, stop: v, count: 1, spacing: Spacing::Lin });
        }
        if !(3..=4).contains(&parts.len()) {
            return Err(format!("range '{s}' must look like start:stop:count[:lin|log]"));
        }
        let (start, stop) = (num(parts[0])?, num(parts[1])?);
        let count = parts[2].parse::<usize>().map_err(|_| format!("'{}' is not a valid count", parts[2]))?;
        let spacing = match parts.get(3).copied() {
            None | Some("lin") => Spacing::Lin,
            Some("log") => Spacing::Log,
            Some(other) => return Err(format!("unknown spacing '{other}', expected lin or log")),
        };
        if !start.is_finite() || !stop.is_finite() {
            return Err(format!("range '{s}' has non-finite bounds"));
        }
        if spacing == Spacing::Log && (start <= 0.0 || stop <= 0.0) {
            return Err(format!("log range '{s}' needs positive bounds"));
        }
        Ok(Range { start, stop, count, spacing })
    }
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => return Vec::new(),
            1 => return vec![self.start],
            _ => {}
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / last;
                if i == 0 {
                    return self.start;
                }
                if i == self.count - 1 {
                    return self.stop;
                }
                match self.spacing {
                    Spacing::Lin => self.start + t * (self.stop - self.start),
                    Spacing::Log => (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp(),
                }
            })
            .collect()
    }

    pub fn reals(&self, what: &str) -> CliResult<Vec<f64>> {
        let v = self.values();
        if v.is_empty() {
            return Err(CliError::usage(format!("empty {what} range")));
        }
        Ok(v)
    }

    /// Integer grid: values are rounded and duplicates removed, order kept.
    pub fn integers(&self, what: &str) -> CliResult<Vec<usize>> {
        let mut out: Vec<usize> = Vec::new();
        for v in self.reals(what)? {
            if v < 0.5 {
                return Err(CliError::usage(format!("{what} values must be positive integers, got {v}")));
            }
            let k = v.round() as usize;
            if !out.contains(&k) {
                out.push(k);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        let r: Range = "1e-3:1e3:7:log".parse().unwrap();
        let v = r.values();
        assert_eq!(v.len(), 7);
        assert!((v[3] - 1.0).abs() < 1e-12 && (v[6] - 1e3).abs() < 1e-9);
        let l: Range = "4:10:4".parse().unwrap();
        assert_eq!(l.integers("N").unwrap(), vec![4, 6, 8, 10]);
        let single: Range = "100".parse().unwrap();
        assert_eq!(single.integers("N").unwrap(), vec![100]);
    }

    #[test]
    fn rejects_malformed_and_empty() {
        assert!("1:2".parse::<Range>().is_err());
        assert!("0:1:3:log".parse::<Range>().is_err());
        assert!("1:2:3:cubic".parse::<Range>().is_err());
        assert!("a:2:3".parse::<Range>().is_err());
        let empty: Range = "4:10:0".parse().unwrap();
        assert!(matches!(empty.integers("N"), Err(CliError::Usage(_))));
    }

    #[test]
    fn integer_grids_deduplicate() {
        let r: Range = "2:4:5".parse().unwrap();
        assert_eq!(r.integers("N").unwrap(), vec![2, 3, 4]);
    }
}
