//! Bundled coefficient families used as fixtures and CLI presets.
//!
//! Names accepted by the CLI: `constant`, `constant(LAMBDA)`,
//! `example-4.4(ALPHA)`, `example-4.5(ALPHA)`, `example-4.7`, `gaussian-q`.

use crate::expr::{CoefficientPair, ExprError};

pub const PIECEWISE_R: &str = "piecewise(abs(x) <= 1: 1, else: x^2)";
pub const PIECEWISE_Q: &str = "piecewise(abs(x) <= 1: 1, else: 1 / sqrt(abs(x)))";

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: String,
    pub r_text: String,
    pub q_text: String,
    /// Window the family's scales resolve comfortably on; CLI default.
    pub suggested_window: (f64, f64),
    pub notes: &'static str,
}

impl Preset {
    pub fn pair(&self) -> Result<CoefficientPair, ExprError> {
        CoefficientPair::from_texts(&self.r_text, &self.q_text)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PresetError {
    #[error("unknown preset '{0}'")]
    Unknown(String),
    #[error("bad preset parameter in '{0}': expected e.g. name(0.5)")]
    BadParameter(String),
}

fn fmt_param(v: f64) -> String {
    // Plain decimal form keeps the generated text inside the grammar.
    format!("{v:?}")
}

/// Resolve a preset by name, with an optional parenthesized parameter.
pub fn by_name(spec: &str) -> Result<Preset, PresetError> {
    let spec = spec.trim();
    let (name, param) = match spec.find('(') {
        Some(i) if spec.ends_with(')') => {
            let p: f64 = spec[i + 1..spec.len() - 1]
                .trim()
                .parse()
                .map_err(|_| PresetError::BadParameter(spec.to_string()))?;
            (&spec[..i], Some(p))
        }
        Some(_) => return Err(PresetError::BadParameter(spec.to_string())),
        None => (spec, None),
    };
    match name {
        "constant" => {
            let lam = param.unwrap_or(1.0);
            if !(lam > 0.0) {
                return Err(PresetError::BadParameter(spec.to_string()));
            }
            Ok(Preset {
                name: format!("constant({lam})"),
                r_text: "1".into(),
                q_text: fmt_param(lam * lam),
                suggested_window: (-30.0 / lam.min(1.0), 30.0 / lam.min(1.0)),
                notes: "r = 1, q = lambda^2; every scale has a closed form",
            })
        }
        "example-4.4" => {
            let alpha = param.unwrap_or(1.0);
            if !(alpha > 0.0) {
                return Err(PresetError::BadParameter(spec.to_string()));
            }
            Ok(Preset {
                name: format!("example-4.4({alpha})"),
                r_text: PIECEWISE_R.into(),
                q_text: format!("1 + cos(abs(x)^{})", fmt_param(alpha)),
                suggested_window: (-2000.0, 2000.0),
                notes: "inverse-square 1/r tails make the theta functional finite, so the \
                        family is solvable for every alpha",
            })
        }
        "example-4.5" => {
            let alpha = param.unwrap_or(1.0);
            if !(alpha > 0.0) {
                return Err(PresetError::BadParameter(spec.to_string()));
            }
            Ok(Preset {
                name: format!("example-4.5({alpha})"),
                r_text: "1".into(),
                q_text: format!("1 + cos(abs(x)^{})", fmt_param(alpha)),
                suggested_window: (-500.0, 500.0),
                notes: "solvable exactly when alpha >= 1: for alpha < 1 the zeros of q spread \
                        out and every windowed mass m(a) collapses",
            })
        }
        "example-4.7" => Ok(Preset {
            name: "example-4.7".into(),
            r_text: PIECEWISE_R.into(),
            q_text: PIECEWISE_Q.into(),
            suggested_window: (-400.0, 400.0),
            notes: "piecewise-quadratic r with inverse square-root q tail; theta is finite, \
                    B stays bounded, so the family is solvable for every p",
        }),
        "gaussian-q" => Ok(Preset {
            name: "gaussian-q".into(),
            r_text: "1".into(),
            q_text: "exp(-(x^2))".into(),
            suggested_window: (-20.0, 20.0),
            notes: "q vanishes at infinity, so B grows with the window and the equation is \
                    not correctly solvable",
        }),
        other => Err(PresetError::Unknown(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn hand_r_47(x: f64) -> f64 {
        if x.abs() <= 1.0 {
            1.0
        } else {
            x * x
        }
    }

    fn hand_q_47(x: f64) -> f64 {
        if x.abs() <= 1.0 {
            1.0
        } else {
            1.0 / x.abs().sqrt()
        }
    }

    fn hand_q_cos(alpha: f64, x: f64) -> f64 {
        1.0 + x.abs().powf(alpha).cos()
    }

    fn hand_q_cos_sq(x: f64) -> f64 {
        1.0 + (x * x).cos()
    }

    #[test]
    fn presets_match_hand_coded_formulas() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let p47 = by_name("example-4.7").unwrap().pair().unwrap();
        let p44 = by_name("example-4.4(0.5)").unwrap().pair().unwrap();
        let p45 = by_name("example-4.5(2)").unwrap().pair().unwrap();
        let pc = by_name("constant(2)").unwrap().pair().unwrap();
        for _ in 0..1000 {
            let x: f64 = rng.gen_range(-100.0..100.0);
            assert_eq!(p47.r_at(x).unwrap(), hand_r_47(x));
            let dq = (p47.q_at(x).unwrap() - hand_q_47(x)).abs();
            assert!(dq <= 1e-15 * (1.0 + hand_q_47(x)));
            let d44 = (p44.q_at(x).unwrap() - hand_q_cos(0.5, x)).abs();
            assert!(d44 <= 1e-15 * (1.0 + hand_q_cos(0.5, x).abs()));
            // identical code path: abs(x)^2 lowers to the same squaring
            assert_eq!(p45.q_at(x).unwrap(), hand_q_cos_sq(x));
            assert_eq!(pc.q_at(x).unwrap(), 4.0);
        }
    }

    #[test]
    fn parameter_parsing() {
        assert!(by_name("constant").is_ok());
        assert!(by_name("constant(0.5)").is_ok());
        assert!(by_name("constant(-1)").is_err());
        assert!(by_name("nope").is_err());
        assert!(by_name("example-4.5(abc)").is_err());
    }
}
