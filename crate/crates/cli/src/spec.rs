//! Parsers for generator and noise arguments.

use std::str::FromStr;

use qmetro::metrology::NoiseChannel;
use qmetro::spin;
use qmetro::{Axis, CollectiveOperator, Representation};

use crate::error::CliResult;

#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    Axis(Axis),
    /// Normalized before use.
    Direction([f64; 3]),
    /// `Σ_n n j_y^{(n)}`, optionally centered on the middle of the chain.
    Gradient { centered: bool },
}

impl FromStr for GeneratorSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim().to_ascii_lowercase();
        if let Some(rest) = t.strip_prefix("dir:") {
            let v: Vec<f64> = rest
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| format!("'{x}' is not a number")))
                .collect::<Result<_, _>>()?;
            if v.len() != 3 {
                return Err(format!("direction needs three components, got {}", v.len()));
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(norm > 0.0 && norm.is_finite()) {
                return Err("direction must be a nonzero finite vector".into());
            }
            return Ok(GeneratorSpec::Direction([v[0] / norm, v[1] / norm, v[2] / norm]));
        }
        match t.as_str() {
            "gradient" => Ok(GeneratorSpec::Gradient { centered: false }),
            "gradient-centered" => Ok(GeneratorSpec::Gradient { centered: true }),
            other => other
                .parse::<Axis>()
                .map(GeneratorSpec::Axis)
                .map_err(|_| format!("unknown generator '{s}', expected x|y|z, dir:a,b,c or gradient")),
        }
    }
}

impl GeneratorSpec {
    pub fn build(&self, rep: Representation) -> CliResult<CollectiveOperator> {
        Ok(match self {
            GeneratorSpec::Axis(a) => spin::build_collective(*a, rep)?,
            GeneratorSpec::Direction(n) => spin::build_direction(*n, rep)?,
            GeneratorSpec::Gradient { centered } => spin::build_gradient_generator(rep, *centered)?,
        })
    }

    /// Collective spin components admit the separable and k-producible bounds.
    pub fn is_collective(&self) -> bool {
        !matches!(self, GeneratorSpec::Gradient { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec(pub Option<NoiseChannel>);

impl FromStr for NoiseSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim().to_ascii_lowercase();
        let parts: Vec<&str> = t.split(':').collect();
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("'{x}' is not a number in '{s}'"));
        let channel = match parts.as_slice() {
            ["none"] => return Ok(NoiseSpec(None)),
            ["depolarizing", p] => NoiseChannel::depolarizing(num(p)?),
            ["pauli", gamma, alpha, time] => {
                let a: Vec<f64> = alpha.split(',').map(num).collect::<Result<_, _>>()?;
                if a.len() != 3 {
                    return Err(format!("pauli noise needs three rates ax,ay,az, got {}", a.len()));
                }
                NoiseChannel::pauli_semigroup(num(gamma)?, [a[0], a[1], a[2]], num(time)?)
            }
            _ => return Err(format!("unknown noise '{s}', expected none, depolarizing:P or pauli:G:AX,AY,AZ:T")),
        };
        channel.map(|c| NoiseSpec(Some(c))).map_err(|e| e.to_string())
    }
}

impl NoiseSpec {
    pub fn depolarizing_p(&self) -> Option<f64> {
        match self.0 {
            None => Some(0.0),
            Some(NoiseChannel::Depolarizing { p }) => Some(p),
            Some(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_forms() {
        assert_eq!("Jx".parse::<GeneratorSpec>().unwrap(), GeneratorSpec::Axis(Axis::X));
        match "dir:1,1,0".parse::<GeneratorSpec>().unwrap() {
            GeneratorSpec::Direction(n) => assert!((n[0] - 0.5f64.sqrt()).abs() < 1e-15 && n[2] == 0.0),
            other => panic!("{other:?}"),
        }
        assert_eq!("gradient".parse::<GeneratorSpec>().unwrap(), GeneratorSpec::Gradient { centered: false });
        assert!("dir:0,0,0".parse::<GeneratorSpec>().is_err());
        assert!("w".parse::<GeneratorSpec>().is_err());
    }

    #[test]
    fn noise_forms() {
        assert_eq!("none".parse::<NoiseSpec>().unwrap().depolarizing_p(), Some(0.0));
        assert_eq!("depolarizing:0.2".parse::<NoiseSpec>().unwrap().depolarizing_p(), Some(0.2));
        let pauli: NoiseSpec = "pauli:1:0,0,1:0.5".parse().unwrap();
        assert!(pauli.0.is_some() && pauli.depolarizing_p().is_none());
        assert!("depolarizing:1.5".parse::<NoiseSpec>().is_err());
        assert!("pauli:1:0,1:0.5".parse::<NoiseSpec>().is_err());
    }
}
