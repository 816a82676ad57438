//! Projection-aggregation decoding of Reed-Muller codes.
//!
//! - [`space`]: subspaces of `F_2^m`, quotient maps and the unique-projection
//!   schedule verifier.
//! - [`code`]: RM(m, r) construction, encoding, membership and the fast
//!   Hadamard first-order decoder.
//! - [`decoders`]: RPA, CPA, RUPA and IUPA with exact or min-sum rules.
//! - [`sim`]: BPSK/AWGN channel and Monte-Carlo FER estimation.

pub mod code;
pub mod decoders;
pub mod error;
pub mod selftest;
pub mod sim;
pub mod space;

pub use code::{fht_decode_first_order, RmCode};
pub use decoders::{
    cpa_decode, duplicate_count, iupa_decode, rpa_decode, rupa_decode, Algorithm, BranchContext,
    DecodeOutcome, Decoder, DecoderConfig, LlrVec, Rule,
};
pub use error::{Error, Result};
pub use space::{q_binomial, verify_unique_schedule, QuotientMap, Subspace};
