//! Witness functions, Whitney ratios and the experiment suites built on them.

mod catalog;
pub mod random;
mod report;
mod suites;

pub use catalog::{
    entropy_fn, prop18_alternation_set, prop18_approximants, prop18_f, ramp, Expected, WitnessFunction,
};
pub use report::{format_sig, round_sig, to_csv, Case, Relation, Report};
pub use suites::*;

use serde::{Deserialize, Serialize};

use crate::approx::best_uniform;
use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, GridSpec};
use crate::smoothness::{modulus_with, ModulusOptions};

const WITNESS_FLOOR: f64 = 1e-12;

/// `E_{m-1}(f;K) / ω_m(f;K)` measured on one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhitneyEstimate {
    pub id: String,
    pub m: usize,
    pub e: f64,
    pub omega: f64,
    pub ratio: f64,
}

/// Ratio of the best degree `m-1` error to the `m`-th modulus, both taken on the same
/// lattice so that identities between them hold without discretization slack.
pub fn whitney_ratio(w: &WitnessFunction, body: &ConvexBody<f64>, m: usize, grid: &GridSpec) -> Result<WhitneyEstimate> {
    if m == 0 {
        return Err(Error::InvalidInput("whitney ratio needs m >= 1".into()));
    }
    let omega = modulus_with(&w.field, body, m, grid, ModulusOptions::lattice())?.value;
    if !(omega > WITNESS_FLOOR) {
        return Err(Error::NotAWitness(format!(
            "{}: modulus of order {m} is {omega:e} on this grid",
            w.id
        )));
    }
    let e = best_uniform(&w.field, body, m - 1, grid)?.error;
    Ok(WhitneyEstimate {
        id: w.id.clone(),
        m,
        e,
        omega,
        ratio: e / omega,
    })
}
