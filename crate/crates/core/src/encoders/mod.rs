//! Converters: the four temporal encoders with their decoders, plus GRF population coding.

pub mod bsa;
pub mod fir;
pub mod grf;
pub mod lif;
pub mod pwm;
pub mod sf;

use std::fmt;
use std::str::FromStr;

pub use bsa::BsaParams;
pub use grf::GrfParams;
pub use lif::LifParams;
pub use pwm::PwmParams;
pub use sf::SfParams;

use crate::error::{invalid_params, Error, Result};
use crate::signal::{min_max_normalize, mse, NormalizationRecord, Signal, SpikeTrain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Lif,
    Sf,
    Pwm,
    Bsa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Real,
    Int,
    Bool,
}

impl Method {
    /// Report column order; also the 1-based feature index of reconstruction files.
    pub const ALL: [Method; 4] = [Method::Lif, Method::Sf, Method::Pwm, Method::Bsa];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Lif => "lif",
            Method::Sf => "sf",
            Method::Pwm => "pwm",
            Method::Bsa => "bsa",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Method::Lif => "LIF",
            Method::Sf => "SF",
            Method::Pwm => "PWM",
            Method::Bsa => "BSA",
        }
    }

    pub fn feature_index(self) -> usize {
        Method::ALL.iter().position(|&m| m == self).unwrap() + 1
    }

    pub fn params(self) -> &'static [(&'static str, ParamKind)] {
        match self {
            Method::Lif => &[("threshold", ParamKind::Real), ("membrane_constant", ParamKind::Real)],
            Method::Sf => &[("threshold", ParamKind::Real)],
            Method::Pwm => &[("frequency", ParamKind::Int), ("downspike", ParamKind::Bool)],
            Method::Bsa => {
                &[("filter_order", ParamKind::Int), ("filter_cutoff", ParamKind::Real), ("threshold", ParamKind::Real)]
            }
        }
    }

    pub fn param_kind(self, name: &str) -> Option<ParamKind> {
        self.params().iter().find(|(n, _)| *n == name).map(|&(_, k)| k)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| invalid_params(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamValue {
    Real(f64),
    Int(i64),
    Bool(bool),
}

impl ParamValue {
    pub fn parse(kind: ParamKind, text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || invalid_params(format!("cannot parse '{text}' as {kind:?}"));
        match kind {
            ParamKind::Real => text.parse().map(ParamValue::Real).map_err(|_| bad()),
            ParamKind::Int => text.parse().map(ParamValue::Int).map_err(|_| bad()),
            ParamKind::Bool => match text.to_ascii_lowercase().as_str() {
                "true" | "1" => Ok(ParamValue::Bool(true)),
                "false" | "0" => Ok(ParamValue::Bool(false)),
                _ => Err(bad()),
            },
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            ParamValue::Real(x) => x,
            ParamValue::Int(i) => i as f64,
            ParamValue::Bool(b) => b as i64 as f64,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Real(x) => write!(f, "{x}"),
            ParamValue::Int(i) => write!(f, "{i}"),
            ParamValue::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// Hyperparameters of one converter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConverterParams {
    Lif(LifParams),
    Sf(SfParams),
    Pwm(PwmParams),
    Bsa(BsaParams),
}

/// A spike train together with what its decoder needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoded {
    pub spikes: SpikeTrain,
    /// `None` for SF, which works in raw amplitude units.
    pub record: Option<NormalizationRecord>,
}

impl ConverterParams {
    pub fn method(&self) -> Method {
        match self {
            ConverterParams::Lif(_) => Method::Lif,
            ConverterParams::Sf(_) => Method::Sf,
            ConverterParams::Pwm(_) => Method::Pwm,
            ConverterParams::Bsa(_) => Method::Bsa,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ConverterParams::Lif(p) => p.validate(),
            ConverterParams::Sf(p) => p.validate(),
            ConverterParams::Pwm(p) => p.validate(),
            ConverterParams::Bsa(p) => p.validate(),
        }
    }

    pub fn to_pairs(&self) -> Vec<(&'static str, ParamValue)> {
        use ParamValue::*;
        match *self {
            ConverterParams::Lif(p) => {
                vec![("threshold", Real(p.threshold)), ("membrane_constant", Real(p.membrane_constant))]
            }
            ConverterParams::Sf(p) => vec![("threshold", Real(p.threshold))],
            ConverterParams::Pwm(p) => {
                vec![("frequency", Int(p.frequency as i64)), ("downspike", Bool(p.downspike))]
            }
            ConverterParams::Bsa(p) => vec![
                ("filter_order", Int(p.filter_order as i64)),
                ("filter_cutoff", Real(p.filter_cutoff)),
                ("threshold", Real(p.threshold)),
            ],
        }
    }

    /// Builds validated params from named values; every parameter of `method` must be present.
    pub fn from_pairs<'a, I>(method: Method, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, ParamValue)>,
    {
        let pairs: Vec<(&str, ParamValue)> = pairs.into_iter().collect();
        for (name, _) in &pairs {
            if method.param_kind(name).is_none() {
                return Err(invalid_params(format!("{} has no parameter '{name}'", method.label())));
            }
        }
        let get = |name: &str| {
            pairs
                .iter()
                .rev()
                .find(|(n, _)| *n == name)
                .map(|&(_, v)| v)
                .ok_or_else(|| invalid_params(format!("missing {} parameter '{name}'", method.label())))
        };
        let real = |name: &str| -> Result<f64> {
            match get(name)? {
                ParamValue::Real(x) => Ok(x),
                ParamValue::Int(i) => Ok(i as f64),
                ParamValue::Bool(_) => Err(invalid_params(format!("'{name}' must be numeric"))),
            }
        };
        let count = |name: &str| -> Result<usize> {
            match get(name)? {
                ParamValue::Int(i) if i >= 0 => Ok(i as usize),
                ParamValue::Real(x) if x >= 0.0 && x.fract() == 0.0 && x < 1e15 => Ok(x as usize),
                v => Err(invalid_params(format!("'{name}' must be a non-negative integer, got {v}"))),
            }
        };
        let flag = |name: &str| -> Result<bool> {
            match get(name)? {
                ParamValue::Bool(b) => Ok(b),
                v => Err(invalid_params(format!("'{name}' must be true or false, got {v}"))),
            }
        };
        let params = match method {
            Method::Lif => ConverterParams::Lif(LifParams::new(real("threshold")?, real("membrane_constant")?)?),
            Method::Sf => ConverterParams::Sf(SfParams::new(real("threshold")?)?),
            Method::Pwm => ConverterParams::Pwm(PwmParams::new(count("frequency")?, flag("downspike")?)?),
            Method::Bsa => ConverterParams::Bsa(BsaParams::new(
                count("filter_order")?,
                real("filter_cutoff")?,
                real("threshold")?,
            )?),
        };
        Ok(params)
    }

    /// Normalization step of the encoder, kept apart so it can be excluded from timing.
    pub fn prepare(&self, signal: &Signal) -> Result<(Vec<f64>, Option<NormalizationRecord>)> {
        match self {
            ConverterParams::Sf(_) => Ok((signal.to_vec(), None)),
            ConverterParams::Lif(_) => {
                let (bipolar, record) = lif::normalize(signal)?;
                Ok((bipolar, Some(record)))
            }
            ConverterParams::Pwm(_) | ConverterParams::Bsa(_) => {
                let (unit, record) = min_max_normalize(signal)?;
                Ok((unit.into_inner(), Some(record)))
            }
        }
    }

    /// Encoding proper, on the output of [`prepare`](Self::prepare).
    pub fn encode_prepared(&self, input: &[f64]) -> Result<SpikeTrain> {
        match self {
            ConverterParams::Lif(p) => lif::encode_normalized(input, p),
            ConverterParams::Sf(p) => sf::encode(input, p),
            ConverterParams::Pwm(p) => pwm::encode_normalized(input, p),
            ConverterParams::Bsa(p) => bsa::encode_normalized(input, p),
        }
    }

    pub fn encode(&self, signal: &Signal) -> Result<Encoded> {
        let (input, record) = self.prepare(signal)?;
        Ok(Encoded { spikes: self.encode_prepared(&input)?, record })
    }

    /// Reconstructs in the original units. SF decodes from an initial value of 0,
    /// the origin of its encoder baseline.
    pub fn decode(&self, encoded: &Encoded) -> Result<Signal> {
        let record = || {
            encoded.record.as_ref().ok_or_else(|| {
                invalid_params(format!("{} decoding needs a normalization record", self.method().label()))
            })
        };
        match self {
            ConverterParams::Sf(p) => sf::decode(&encoded.spikes, p, 0.0),
            ConverterParams::Lif(p) => lif::decode(&encoded.spikes, p, record()?),
            ConverterParams::Pwm(p) => pwm::decode(&encoded.spikes, p, record()?),
            ConverterParams::Bsa(p) => bsa::decode(&encoded.spikes, p, record()?),
        }
    }

    /// Encode, decode and score against the original.
    pub fn round_trip(&self, signal: &Signal) -> Result<RoundTrip> {
        let encoded = self.encode(signal)?;
        let reconstruction = self.decode(&encoded)?;
        let mse = mse(signal, &reconstruction)?;
        Ok(RoundTrip { encoded, reconstruction, mse })
    }
}

impl fmt::Display for ConverterParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.method().label())?;
        for (i, (name, value)) in self.to_pairs().into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{name}={value}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundTrip {
    pub encoded: Encoded,
    pub reconstruction: Signal,
    pub mse: f64,
}
