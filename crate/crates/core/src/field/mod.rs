//! GF(2^8) linear algebra for exact secrecy certification.

pub mod gf256;
mod kernel;
mod linalg;
mod mds;
mod row;
mod transcript;

pub use gf256::Gf256;
pub use kernel::{mul_add, scale};
pub use linalg::{expand_rows, independent_of, matrix_rank, privacy_amplify, privacy_amplify_with, rank, Echelon};
pub use mds::{cauchy_mds, CoefficientSource, MdsMatrix};
pub use row::{combine, CoeffRow};
pub use transcript::{
    check_decodability, check_secrecy, relay_rows_in_span, BasisBlock, BasisLayout, DecodeVerdict, NodeInfo, NodeRole,
    SecrecyVerdict, Transcript, Transmission, HEADER,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("Cauchy matrix {rows}x{cols} needs {} distinct points, GF(256) has 256", rows + cols)]
    CauchyTooLarge { rows: usize, cols: usize },
    #[error("cannot distill {requested} rows from a span of rank {rank}")]
    AmplifyTooMany { requested: usize, rank: usize },
    #[error("malformed transcript: {0}")]
    Malformed(String),
}
