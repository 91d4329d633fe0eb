//! Spike encoding and decoding for spiking neural networks.
//!
//! Four temporal converters turn a real-valued [`Signal`] into a
//! [`SpikeTrain`] and back:
//!
//! * Step-Forward ([`encoders::sf`]): adaptive-baseline delta modulation.
//! * Leaky integrate-and-fire ([`encoders::lif`]).
//! * Pulse-width modulation ([`encoders::pwm`]) against a sawtooth carrier.
//! * Ben's Spiker Algorithm ([`encoders::bsa`]) with a windowed-sinc FIR filter.
//!
//! [`encoders::grf`] adds Gaussian receptive field population coding.
//! [`optimizer`] tunes converter parameters by seeded random search,
//! [`generators`] synthesizes benchmark waveforms, [`bench`] runs the
//! method × signal grid and [`report`] reads and writes the file formats.
//!
//! ```
//! use spike_encoding::encoders::{ConverterParams, SfParams};
//! use spike_encoding::Signal;
//!
//! let signal = Signal::new(vec![0.1, 0.3, 0.2, 0.4, 0.8]).unwrap();
//! let sf = ConverterParams::Sf(SfParams::new(0.15).unwrap());
//! let encoded = sf.encode(&signal).unwrap();
//! assert_eq!(encoded.spikes.spikes(), &[0, 1, 0, 1, 1]);
//! let reconstructed = sf.decode(&encoded).unwrap();
//! assert!((reconstructed[4] - 0.45).abs() < 1e-12);
//! ```

pub mod bench;
pub mod encoders;
pub mod error;
pub mod generators;
pub mod optimizer;
pub mod report;
pub mod signal;

pub use encoders::{ConverterParams, Encoded, Method};
pub use error::{Error, Result};
pub use signal::{NormalizationRecord, Signal, SpikeTrain};
