//! Secret-message capacity regions of two-unicast erasure networks with a
//! single-link passive eavesdropper, plus a packet-level simulator of the
//! achieving schemes and an exact rank-based secrecy verifier.

pub mod lp;
pub mod models;
pub mod field;
pub mod sim;
