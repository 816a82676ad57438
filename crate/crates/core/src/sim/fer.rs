//! Monte-Carlo frame-error-rate estimation.
//!
//! Frames are indexed from zero and each draws its message and noise from
//! [`frame_rng`]`(seed, index)`. Workers decode disjoint frames of a batch;
//! results are merged in frame order and the stopping rule is applied during
//! that merge, so the outcome does not depend on the number of workers.

use std::thread;

use rand::Rng;
use statrs::distribution::{Beta, ContinuousCDF};

use crate::code::RmCode;
use crate::decoders::{Decoder, DecoderConfig};
use crate::error::{domain, Result};

use super::channel::{frame_rng, modulate, transmit_and_llr, ChannelConfig};

pub const DEFAULT_MIN_FRAME_ERRORS: u64 = 100;
pub const DEFAULT_MAX_FRAMES: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub m: usize,
    pub r: usize,
    pub decoder: DecoderConfig,
    pub ebno_grid: Vec<f64>,
    pub max_frames: u64,
    pub min_frame_errors: u64,
    pub seed: u64,
    pub workers: usize,
}

impl SimConfig {
    pub fn new(m: usize, r: usize, decoder: DecoderConfig) -> Self {
        Self {
            m,
            r,
            decoder,
            ebno_grid: Vec::new(),
            max_frames: DEFAULT_MAX_FRAMES,
            min_frame_errors: DEFAULT_MIN_FRAME_ERRORS,
            seed: 1,
            workers: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_frames < 1 {
            return domain("max_frames must be at least 1");
        }
        if self.min_frame_errors < 1 {
            return domain("min_frame_errors must be at least 1");
        }
        if self.workers < 1 {
            return domain("workers must be at least 1");
        }
        self.decoder.validate()
    }
}

/// Accumulated statistics at one Eb/N0.
#[derive(Debug, Clone, PartialEq)]
pub struct FerPoint {
    pub ebno_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    /// Codeword-bit errors of the hard decisions.
    pub bit_errors: u64,
    pub fer: f64,
    pub ber: f64,
    pub avg_iterations: f64,
    pub avg_first_order_decodes: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
}

/// Two-sided 95% Clopper-Pearson interval for `k` successes in `n` trials.
pub fn clopper_pearson(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (kf, nf) = (k as f64, n as f64);
    let low = if k == 0 {
        0.0
    } else {
        Beta::new(kf, nf - kf + 1.0)
            .expect("positive shape parameters")
            .inverse_cdf(0.025)
    };
    let high = if k == n {
        1.0
    } else {
        Beta::new(kf + 1.0, nf - kf)
            .expect("positive shape parameters")
            .inverse_cdf(0.975)
    };
    (low, high)
}

#[derive(Debug, Clone, Copy, Default)]
struct FrameResult {
    frame_error: bool,
    bit_errors: u64,
    iterations: u64,
    first_order_decodes: u64,
}

fn simulate_frame(
    code: &RmCode,
    decoder: &mut Decoder,
    ch: &ChannelConfig,
    seed: u64,
    frame: u64,
) -> Result<FrameResult> {
    let mut rng = frame_rng(seed, frame);
    let message: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2u8)).collect();
    let codeword = code.encode(&message)?;
    let llr = transmit_and_llr(&modulate(&codeword), ch, &mut rng);
    let out = decoder.decode(llr.as_slice())?;
    let bit_errors = out
        .codeword
        .iter()
        .zip(&codeword)
        .filter(|(a, b)| a != b)
        .count() as u64;
    Ok(FrameResult {
        frame_error: bit_errors > 0,
        bit_errors,
        iterations: out.iterations_used as u64,
        first_order_decodes: out.first_order_decodes,
    })
}

/// Simulates frames at one operating point until `min_frame_errors` frame
/// errors or `max_frames` frames, whichever comes first.
pub fn run_fer_point(sim: &SimConfig, point: &ChannelConfig) -> Result<FerPoint> {
    sim.validate()?;
    let code = RmCode::new(sim.m, sim.r)?;
    let template = Decoder::new(sim.m, sim.r, sim.decoder)?;
    let mut decoders = vec![template; sim.workers];
    let batch = if sim.workers == 1 { 1 } else { 4 * sim.workers as u64 };

    let mut frames = 0u64;
    let mut frame_errors = 0u64;
    let mut bit_errors = 0u64;
    let mut iterations = 0u64;
    let mut fo_decodes = 0u64;
    let mut results = Vec::new();

    'outer: while frames < sim.max_frames && frame_errors < sim.min_frame_errors {
        let start = frames;
        let count = batch.min(sim.max_frames - start) as usize;
        results.clear();
        results.extend((0..count).map(|_| None::<Result<FrameResult>>));
        if sim.workers == 1 {
            results[0] = Some(simulate_frame(&code, &mut decoders[0], point, sim.seed, start));
        } else {
            let chunk = count.div_ceil(sim.workers);
            thread::scope(|scope| {
                for (w, (slots, decoder)) in results.chunks_mut(chunk).zip(decoders.iter_mut()).enumerate() {
                    let code = &code;
                    scope.spawn(move || {
                        let first = start + (w * chunk) as u64;
                        for (j, slot) in slots.iter_mut().enumerate() {
                            *slot = Some(simulate_frame(code, decoder, point, sim.seed, first + j as u64));
                        }
                    });
                }
            });
        }
        for result in results.drain(..) {
            let res = result.expect("every slot is filled")?;
            frames += 1;
            frame_errors += res.frame_error as u64;
            bit_errors += res.bit_errors;
            iterations += res.iterations;
            fo_decodes += res.first_order_decodes;
            if frame_errors >= sim.min_frame_errors {
                break 'outer;
            }
        }
    }

    let n_bits = frames as f64 * (1u64 << sim.m) as f64;
    let (ci95_low, ci95_high) = clopper_pearson(frame_errors, frames);
    Ok(FerPoint {
        ebno_db: point.ebno_db,
        frames,
        frame_errors,
        bit_errors,
        fer: frame_errors as f64 / frames as f64,
        ber: bit_errors as f64 / n_bits,
        avg_iterations: iterations as f64 / frames as f64,
        avg_first_order_decodes: fo_decodes as f64 / frames as f64,
        ci95_low,
        ci95_high,
    })
}

/// Runs every point of `sim.ebno_grid` in order, handing each finished
/// point to `on_point` before starting the next.
pub fn run_sweep<F>(sim: &SimConfig, mut on_point: F) -> Result<Vec<FerPoint>>
where
    F: FnMut(&FerPoint) -> Result<()>,
{
    let rate = RmCode::new(sim.m, sim.r)?.rate();
    let mut out = Vec::with_capacity(sim.ebno_grid.len());
    for &ebno in &sim.ebno_grid {
        let point = run_fer_point(sim, &ChannelConfig::new(ebno, rate)?)?;
        on_point(&point)?;
        out.push(point);
    }
    Ok(out)
}
