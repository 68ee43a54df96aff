//! Scheme-agnostic encode/decode over [`CodecParams`].

use crate::error::Result;
use crate::lab::spiking_efficiency;
use crate::population::{grf_decode, grf_encode, position_decode, position_encode, GrfEncodeResult};
use crate::rate::{bsa_encode, hsa_encode, rate_decode, thsa_encode, RateEncodeResult};
use crate::temporal::{mw_decode, mw_encode, sf_decode, sf_encode, tbr_decode, tbr_encode, TemporalEncodeResult};
use crate::types::{validate_params, CodecParams, FirFilter, PopulationSpikes, Scheme, Signal};

/// Output of any encoder together with everything its decoder needs.
#[derive(Debug, Clone, PartialEq)]
pub enum Encoded {
    Temporal { scheme: Scheme, result: TemporalEncodeResult },
    Rate { scheme: Scheme, result: RateEncodeResult, filter: FirFilter },
    Position { spikes: PopulationSpikes, distribution: Vec<f64> },
    Grf(GrfEncodeResult),
}

impl Encoded {
    pub fn scheme(&self) -> Scheme {
        match self {
            Encoded::Temporal { scheme, .. } | Encoded::Rate { scheme, .. } => *scheme,
            Encoded::Position { .. } => Scheme::Position,
            Encoded::Grf(_) => Scheme::Grf,
        }
    }

    pub fn efficiency(&self) -> f64 {
        match self {
            Encoded::Temporal { result, .. } => spiking_efficiency(&result.train),
            Encoded::Rate { result, .. } => spiking_efficiency(&result.train),
            Encoded::Position { spikes, .. } => spiking_efficiency(spikes),
            Encoded::Grf(r) => spiking_efficiency(&r.spikes),
        }
    }

    pub fn decode(&self) -> Result<Signal> {
        Ok(match self {
            Encoded::Temporal { scheme: Scheme::Tbr, result } => tbr_decode(result),
            Encoded::Temporal { scheme: Scheme::Mw, result } => mw_decode(result),
            Encoded::Temporal { result, .. } => sf_decode(result),
            Encoded::Rate { result, filter, .. } => rate_decode(result, filter),
            Encoded::Position { spikes, distribution } => position_decode(spikes, distribution)?,
            Encoded::Grf(r) => grf_decode(&r.spikes, &r.params)?,
        })
    }
}

/// Validates `params` and runs the matching encoder on a single-channel signal.
pub fn encode(signal: &Signal, params: &CodecParams) -> Result<Encoded> {
    validate_params(params)?;
    let threshold = || params.threshold.expect("validated");
    let filter = || params.filter.clone().expect("validated");
    Ok(match params.scheme {
        Scheme::Tbr => {
            Encoded::Temporal { scheme: Scheme::Tbr, result: tbr_encode(signal, params.factor.expect("validated"))? }
        }
        Scheme::Sf => Encoded::Temporal { scheme: Scheme::Sf, result: sf_encode(signal, threshold())? },
        Scheme::Mw => Encoded::Temporal {
            scheme: Scheme::Mw,
            result: mw_encode(signal, params.window.expect("validated"), threshold())?,
        },
        Scheme::Hsa => {
            let filter = filter();
            Encoded::Rate { scheme: Scheme::Hsa, result: hsa_encode(signal, &filter)?, filter }
        }
        Scheme::Thsa => {
            let filter = filter();
            Encoded::Rate { scheme: Scheme::Thsa, result: thsa_encode(signal, &filter, threshold())?, filter }
        }
        Scheme::Bsa => {
            let filter = filter();
            Encoded::Rate { scheme: Scheme::Bsa, result: bsa_encode(signal, &filter, threshold())?, filter }
        }
        Scheme::Grf => {
            Encoded::Grf(grf_encode(signal, params.neurons.expect("validated"), params.subtimes.expect("validated"))?)
        }
        Scheme::Position => {
            let distribution = params.distribution.clone().expect("validated");
            Encoded::Position { spikes: position_encode(signal, &distribution)?, distribution }
        }
    })
}

/// Encodes, decodes and returns `(efficiency, rmse)` against the input.
pub fn evaluate(signal: &Signal, params: &CodecParams) -> Result<(f64, f64)> {
    let encoded = encode(signal, params)?;
    let decoded = encoded.decode()?;
    Ok((encoded.efficiency(), crate::lab::rmse(signal, &decoded)?))
}
