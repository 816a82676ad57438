//! BPSK over AWGN and the LLRs it produces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::decoders::LlrVec;
use crate::error::{domain, Result};

/// One Eb/N0 operating point for a code of rate `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub ebno_db: f64,
    pub rate: f64,
    /// Noise standard deviation, `sigma^2 = 1 / (2 R 10^{ebno_db / 10})`.
    pub sigma: f64,
}

impl ChannelConfig {
    pub fn new(ebno_db: f64, rate: f64) -> Result<Self> {
        if !ebno_db.is_finite() {
            return domain(format!("Eb/N0 = {ebno_db} dB is not finite"));
        }
        if !(rate > 0.0 && rate <= 1.0) {
            return domain(format!("code rate {rate} outside (0, 1]"));
        }
        let ebno = 10f64.powf(ebno_db / 10.0);
        let sigma = (1.0 / (2.0 * rate * ebno)).sqrt();
        if !(sigma > 0.0 && sigma.is_finite()) {
            return domain(format!("degenerate noise level at {ebno_db} dB"));
        }
        Ok(Self { ebno_db, rate, sigma })
    }

    pub fn noise_variance(&self) -> f64 {
        self.sigma * self.sigma
    }
}

/// `x(z) = 1 - 2 c(z)`.
pub fn modulate(c: &[u8]) -> Vec<f64> {
    c.iter().map(|&b| 1.0 - 2.0 * (b & 1) as f64).collect()
}

/// Adds white Gaussian noise and returns `L = 2 y / sigma^2`.
pub fn transmit_and_llr<R: Rng + ?Sized>(x: &[f64], ch: &ChannelConfig, rng: &mut R) -> LlrVec {
    let scale = 2.0 / ch.noise_variance();
    let values = x
        .iter()
        .map(|&s| {
            let noise: f64 = rng.sample(StandardNormal);
            scale * (s + ch.sigma * noise)
        })
        .collect();
    LlrVec::new(values).expect("finite LLRs of power-of-two length")
}

/// Independent random stream for one frame: identical `(seed, frame)`
/// always replays the same message and noise.
pub fn frame_rng(seed: u64, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame);
    rng
}
