//! Stable many-to-one matching with complementarities.
//!
//! Firms rank sets of workers, workers rank firms. When the firms' demand
//! type is totally unimodular a stable matching exists, and this crate finds
//! one by solving the continuum version of the market and rounding a stable
//! fractional matching to an integral vertex of a unimodular system.

pub mod budget;
pub mod continuum;
pub mod converse;
pub mod demand;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod generate;
mod linalg;
pub mod lp;
pub mod market;
pub mod matrix;
pub mod rational;
pub mod round;
pub mod search;
pub mod tree;
pub mod unimodular;

pub use budget::Budget;
pub use continuum::{
    applicable_transformations, choose_continuum, is_stable_pseudo, lift_to_discrete,
    ConsumptionTrace, PseudoMatching, Subpopulation, Transformation,
};
pub use demand::{demand_type_fast, market_demand_type, DemandType, DemandVector};
pub use error::{Error, Result};
pub use market::{DiscreteMatching, FirmId, FirmPreference, Market, WorkerPreference, WorkerSet};
pub use matrix::IntMatrix;
pub use rational::Rational;
pub use round::{
    build_system, find_integral_vertex, solve, vertex_to_matching, ConstraintSystem, SolveOptions,
    SolveOutcome,
};
pub use search::{find_stable_continuum, verify_stable_continuum, CandidateSource, SearchConfig};
pub use tree::TechnologyTree;
pub use unimodular::{is_totally_unimodular, is_unimodular, MinorWitness, TuVerdict};
