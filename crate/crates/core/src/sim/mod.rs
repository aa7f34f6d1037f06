//! Slot-level simulation of the achieving schemes.

mod channel;
pub mod operating;
mod phases;
mod scheme;

pub use channel::{LinkChannel, SlotOutcome};
pub use operating::{KEY_SIGMAS, lift_for_horizon, operating_point, operating_point_for_rates, surplus_sigmas, Z_CAP};
pub use phases::{
    expansion_bound, run_arq, run_key_sharing_broadcast, run_message_phase, run_relay_expansion, run_relay_until,
    run_ry_source_phase, ArqResult, KeyPool, MessagePhase, SourcePhase,
};
pub use scheme::{run_scheme, run_seeds, LinkReport, RandomnessReport, SimConfig, SimMode, SimReport, SimRun};

use thiserror::Error;

use crate::field::FieldError;
use crate::models::ModelError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("link {link} never delivers (delta = 1)")]
    DeadLink { link: u8 },
    #[error("link {link} cannot produce key (delta_e = 0 or delta = 1)")]
    KeyUnreachable { link: u8 },
    #[error("link {link}: {requested} sends exceed the expansion bound {bound}")]
    ExpansionBound { link: u8, requested: usize, bound: usize },
    #[error("{extra} raw packets exceed the randomness budget {budget}")]
    ExtraExceedsBudget { extra: usize, budget: usize },
    #[error("operating point ({r1}, {r2}) is not feasible for the network")]
    InfeasiblePoint { r1: f64, r2: f64 },
    #[error("operating point lacks variable {0}")]
    MissingVariable(String),
    #[error("margin must lie in (0, 1], got {0}")]
    BadMargin(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Field(#[from] FieldError),
}
