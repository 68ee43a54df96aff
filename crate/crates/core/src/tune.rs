//! Exhaustive grid search over codec parameters.

use crate::codec::evaluate;
use crate::error::{CodecError, Result};
use crate::types::{CodecParams, FirFilter, ParamField, Scheme, Signal};

/// Candidate values per parameter. Only the lists for the fields the scheme
/// requires are used.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamGrid {
    pub factors: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub windows: Vec<usize>,
    pub filters: Vec<FirFilter>,
    pub neurons: Vec<usize>,
    pub subtimes: Vec<usize>,
    pub distributions: Vec<Vec<f64>>,
}

impl ParamGrid {
    fn len_of(&self, field: ParamField) -> usize {
        match field {
            ParamField::Factor => self.factors.len(),
            ParamField::Threshold => self.thresholds.len(),
            ParamField::Window => self.windows.len(),
            ParamField::Filter => self.filters.len(),
            ParamField::Neurons => self.neurons.len(),
            ParamField::Subtimes => self.subtimes.len(),
            ParamField::Distribution => self.distributions.len(),
        }
    }

    fn assign(&self, params: &mut CodecParams, field: ParamField, i: usize) {
        match field {
            ParamField::Factor => params.factor = Some(self.factors[i]),
            ParamField::Threshold => params.threshold = Some(self.thresholds[i]),
            ParamField::Window => params.window = Some(self.windows[i]),
            ParamField::Filter => params.filter = Some(self.filters[i].clone()),
            ParamField::Neurons => params.neurons = Some(self.neurons[i]),
            ParamField::Subtimes => params.subtimes = Some(self.subtimes[i]),
            ParamField::Distribution => params.distribution = Some(self.distributions[i].clone()),
        }
    }

    /// Grid points for `scheme` in lexicographic order of the per-field
    /// indices (fields in [`Scheme::required_fields`] order).
    pub fn candidates(&self, scheme: Scheme) -> Vec<CodecParams> {
        let fields = scheme.required_fields();
        let dims: Vec<usize> = fields.iter().map(|&f| self.len_of(f)).collect();
        if dims.contains(&0) {
            return Vec::new();
        }
        let total: usize = dims.iter().product();
        (0..total)
            .map(|mut flat| {
                let mut idx = vec![0; dims.len()];
                for k in (0..dims.len()).rev() {
                    idx[k] = flat % dims[k];
                    flat /= dims[k];
                }
                let mut p = CodecParams::empty(scheme);
                for (&field, &i) in fields.iter().zip(&idx) {
                    self.assign(&mut p, field, i);
                }
                p
            })
            .collect()
    }
}

/// `rmse_weight * rmse + efficiency_weight * (100 - efficiency)`; lower is better.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    pub rmse_weight: f64,
    pub efficiency_weight: f64,
}

impl Objective {
    pub fn score(&self, efficiency: f64, rmse: f64) -> f64 {
        self.rmse_weight * rmse + self.efficiency_weight * (100.0 - efficiency)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneResult {
    pub params: CodecParams,
    pub score: f64,
    pub efficiency: f64,
    pub rmse: f64,
}

/// Evaluates every grid point and keeps the first one with the lowest score.
pub fn tune(scheme: Scheme, signal: &Signal, grid: &ParamGrid, objective: Objective) -> Result<TuneResult> {
    let mut best: Option<TuneResult> = None;
    for params in grid.candidates(scheme) {
        let (efficiency, rmse) = evaluate(signal, &params)?;
        let score = objective.score(efficiency, rmse);
        if best.as_ref().is_none_or(|b| score < b.score) {
            best = Some(TuneResult { params, score, efficiency, rmse });
        }
    }
    best.ok_or(CodecError::EmptyGrid)
}

pub fn tune_params(scheme: Scheme, signal: &Signal, grid: &ParamGrid, objective: Objective) -> Result<CodecParams> {
    tune(scheme, signal, grid, objective).map(|r| r.params)
}
