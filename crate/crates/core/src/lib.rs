//! Density-matrix simulation of a digital-to-analog converter that encodes
//! `2^m` words `f(k)` into ancilla polarizations through dephasing and
//! depolarizing channels, and reads them back by ensemble averaging.
//!
//! The numeric core is generic over [`scalar::Real`] (`f64` or `f32`); the
//! aliases below fix it to `f64`, the reference precision.
//!
//! ```
//! use qdac_core::dac::{run_dac, DacInstance, Mode};
//!
//! let inst = DacInstance::new(1, 3, vec![0b000, 0b101]).unwrap();
//! let out = run_dac::<f64>(&inst, Mode::Mixed).unwrap();
//! let v = out.fetch_signal_1(1).unwrap().amplitude;
//! assert_eq!(v * 2.0, 1.25);
//! ```

pub mod channels;
pub mod dac;
pub mod discord;
pub mod error;
pub mod fetch;
pub mod gates;
pub mod qstate;
pub mod satdemo;
pub mod scalar;

pub use error::{QdacError, Result};

pub type DenseState = qstate::DenseState<f64>;
pub type EnsembleState = qstate::EnsembleState<f64>;
pub type DeviationState = qstate::DeviationState<f64>;
pub type Channel = channels::Channel<f64>;
pub type DacOutput = dac::DacOutput<f64>;
pub type FetchResult = fetch::FetchResult<f64>;
pub type DiscordReport = discord::DiscordReport<f64>;

pub type DenseStateF32 = qstate::DenseState<f32>;
pub type EnsembleStateF32 = qstate::EnsembleState<f32>;
pub type DacOutputF32 = dac::DacOutput<f32>;
