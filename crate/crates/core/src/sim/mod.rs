//! BPSK/AWGN channel model and the Monte-Carlo FER harness.

pub mod channel;
pub mod csv_out;
pub mod fer;

pub use channel::{frame_rng, modulate, transmit_and_llr, ChannelConfig};
pub use csv_out::{CsvRow, FerCsvWriter};
pub use fer::{clopper_pearson, run_fer_point, run_sweep, FerPoint, SimConfig};
