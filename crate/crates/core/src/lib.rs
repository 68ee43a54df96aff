//! Spike-train codecs for uniformly sampled signals.
//!
//! Eight schemes in three families:
//!
//! - temporal contrast: TBR, step-forward (SF), moving window (MW)
//! - FIR rate coding: HSA, threshold HSA, BSA
//! - population coding: position coding, Gaussian receptive fields (GRF)
//!
//! plus a seeded synthetic-signal generator, efficiency/RMSE/drift metrics,
//! a Monte-Carlo benchmark runner and a grid-search tuner.

pub mod bench;
pub mod codec;
pub mod error;
pub mod lab;
pub mod population;
pub mod rate;
pub mod seed;
pub mod temporal;
pub mod tune;
pub mod types;

pub use codec::{encode, evaluate, Encoded};
pub use error::{CodecError, Result};
pub use types::{
    dense_to_events, events_to_dense, validate_params, CodecParams, FirFilter, ParamField, PopulationSpikes, Scheme,
    Signal, SpikeEvent, SpikeTrain,
};
