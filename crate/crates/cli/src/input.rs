//! Parsing of command-line values that are richer than numbers.

use serde::Deserialize;
use ttokit::inner::ComplexJson;
use ttokit::{AtomicMeasure, BlaschkeProduct, Complex64, InnerFunction, RationalFunction};

/// A user input that could not be turned into a domain value.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// `re,im`, or a bare real number.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected `re,im`, got `{text}`")),
    }
}

pub fn blaschke(flag: &str, text: &str) -> Result<BlaschkeProduct, InputError> {
    match InnerFunction::from_json(text) {
        Ok(InnerFunction::Blaschke(b)) => Ok(b),
        Ok(InnerFunction::Singular(_)) => Err(InputError(format!(
            "{flag}: expected a Blaschke product, got a singular inner function"
        ))),
        Err(e) => Err(InputError(format!("{flag}: {e}"))),
    }
}

pub fn measure(flag: &str, text: &str) -> Result<AtomicMeasure, InputError> {
    match InnerFunction::from_json(text) {
        Ok(InnerFunction::Singular(s)) => Ok(s.measure().clone()),
        Ok(InnerFunction::Blaschke(_)) => Err(InputError(format!(
            "{flag}: expected a singular inner function, got a Blaschke product"
        ))),
        Err(e) => Err(InputError(format!("{flag}: {e}"))),
    }
}

/// `φ = Σ a_k z^k + Σ_{k≥1} c_k conj(z)^k`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigSymbol {
    #[serde(default)]
    pub analytic: Vec<ComplexJson>,
    #[serde(default)]
    pub coanalytic: Vec<ComplexJson>,
}

impl TrigSymbol {
    pub fn shift() -> Self {
        Self {
            analytic: vec![
                ComplexJson { re: 0.0, im: 0.0 },
                ComplexJson { re: 1.0, im: 0.0 },
            ],
            coanalytic: Vec::new(),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let analytic: Complex64 = self
            .analytic
            .iter()
            .enumerate()
            .map(|(k, &a)| Complex64::from(a) * z.powu(k as u32))
            .sum();
        let coanalytic: Complex64 = self
            .coanalytic
            .iter()
            .enumerate()
            .map(|(k, &c)| Complex64::from(c) * z.conj().powu(k as u32 + 1))
            .sum();
        analytic + coanalytic
    }
}

pub fn symbol(text: &str) -> Result<TrigSymbol, InputError> {
    serde_json::from_str(text).map_err(|e| InputError(format!("--symbol: {e}")))
}

/// `scale · Π(z - zeros) / Π(z - poles)`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RationalJson {
    #[serde(default = "unit")]
    scale: ComplexJson,
    #[serde(default)]
    zeros: Vec<ComplexJson>,
    #[serde(default)]
    poles: Vec<ComplexJson>,
}

fn unit() -> ComplexJson {
    ComplexJson { re: 1.0, im: 0.0 }
}

pub fn rational(text: &str) -> Result<RationalFunction, InputError> {
    let r: RationalJson = serde_json::from_str(text).map_err(|e| InputError(format!("--g: {e}")))?;
    RationalFunction::new(
        r.scale.into(),
        r.zeros.into_iter().map(Into::into).collect(),
        r.poles.into_iter().map(Into::into).collect(),
    )
    .map_err(|e| InputError(format!("--g: {e}")))
}
