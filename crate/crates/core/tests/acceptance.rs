//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Criterion numbers may be passed as arguments to
//! run a subset; by default all run.

use std::io::Write;
use std::process::ExitCode;
use std::thread;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rm_paal::decoders::{default_max_iters, kept_fraction_denominator};
use rm_paal::selftest::partition_identity_failures;
use rm_paal::sim::{run_fer_point, ChannelConfig, FerPoint, SimConfig};
use rm_paal::space::enumerate_one_dim;
use rm_paal::{
    duplicate_count, fht_decode_first_order, iupa_decode, q_binomial, rpa_decode, rupa_decode, verify_unique_schedule,
    Algorithm, BranchContext, DecoderConfig, RmCode, Rule,
};

/// Relative allowance around the reference FER values.
const FER_REL_TOL: f64 = 0.25;
const FER_MIN_ERRORS: u64 = 300;
const FER_MAX_FRAMES: u64 = 1_000_000;
const FER_SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    summary: String,
}

fn report(id: u32, name: &str, o: &Outcome) {
    let tag = if o.passed { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id}: {name}: {}", o.summary);
    std::io::stdout().flush().ok();
}

fn info(line: &str) {
    println!("    {line}");
    std::io::stdout().flush().ok();
}

fn counting_identities() -> Outcome {
    let a = duplicate_count(7, 3).unwrap();
    let b = duplicate_count(6, 4).unwrap();
    let ok = (a.total, a.unique, a.duplicates) == (8001, 2667, 5334)
        && (b.total, b.unique, b.duplicates) == (29295, 1395, 27900)
        && kept_fraction_denominator(3).unwrap() == 3
        && kept_fraction_denominator(4).unwrap() == 21
        && a.total == 3 * a.unique
        && b.total == 21 * b.unique
        && format!("{:.2}", b.reduction_percent()) == "95.24";
    Outcome {
        passed: ok,
        summary: format!(
            "RM(7,3) {{{}, {}, {}}}, RM(6,4) {{{}, {}, {}}}, kept 1/{} and 1/{}, reduction {:.2}%",
            a.total,
            a.unique,
            a.duplicates,
            b.total,
            b.unique,
            b.duplicates,
            kept_fraction_denominator(3).unwrap(),
            kept_fraction_denominator(4).unwrap(),
            b.reduction_percent()
        ),
    }
}

fn schedule_uniqueness() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (m, r) in [(4, 3), (5, 3), (6, 3), (7, 3), (5, 4), (6, 4), (7, 4)] {
        let rep = verify_unique_schedule(m, r).unwrap();
        let target = q_binomial(m, r - 1).unwrap();
        ok &= rep.complete && rep.distinct_count == target && rep.leaf_count == target;
        parts.push(format!("RM({m},{r}) {}/{}", rep.distinct_count, target));
    }
    Outcome {
        passed: ok,
        summary: parts.join(", "),
    }
}

fn property_one() -> Outcome {
    let (exact, minsum) = partition_identity_failures(1000, 1);
    Outcome {
        passed: exact == 0 && minsum == 0,
        summary: format!("1000 trials, failures: tanh {exact} (rel 1e-9), min-sum {minsum} (exact)"),
    }
}

fn fht_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut ok = true;
    let mut parts = Vec::new();
    for m in 2..=4 {
        let code = RmCode::new(m, 1).unwrap();
        let codewords: Vec<Vec<u8>> = (0..1u64 << code.k())
            .map(|u| code.encode(&(0..code.k()).map(|j| (u >> j & 1) as u8).collect::<Vec<_>>()).unwrap())
            .collect();
        let (mut agree, mut ties) = (0, 0);
        let mut trials = 0;
        while trials < 1000 {
            let llr: Vec<f64> = (0..code.n()).map(|_| rng.random_range(-4.0..4.0)).collect();
            let mut scores: Vec<f64> = codewords
                .iter()
                .map(|c| c.iter().zip(&llr).map(|(&b, &l)| (1.0 - 2.0 * b as f64) * l).sum())
                .collect();
            scores.sort_by(|a, b| b.partial_cmp(a).unwrap());
            if scores[0] == scores[1] {
                ties += 1;
                continue;
            }
            trials += 1;
            agree += usize::from(fht_decode_first_order(&llr).unwrap() == code.brute_force_ml(&llr).unwrap());
        }
        ok &= agree == trials;
        parts.push(format!("m={m}: {agree}/{trials} ({ties} ties skipped)"));
    }
    Outcome {
        passed: ok,
        summary: parts.join(", "),
    }
}

fn projection_closure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut ok = true;
    let mut parts = Vec::new();
    for (m, r) in [(4, 2), (5, 3)] {
        let code = RmCode::new(m, r).unwrap();
        let target = RmCode::new(m - 1, r - 1).unwrap();
        let subspaces = enumerate_one_dim(m).unwrap();
        let (mut pass, mut total) = (0, 0);
        for _ in 0..100 {
            let u: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2)).collect();
            let c = code.encode(&u).unwrap();
            for b in &subspaces {
                total += 1;
                pass += usize::from(target.is_codeword(&code.project_codeword(&c, b).unwrap()).unwrap());
            }
        }
        ok &= pass == total;
        parts.push(format!("RM({m},{r}) {pass}/{total}"));
    }
    Outcome {
        passed: ok,
        summary: parts.join(", "),
    }
}

fn complexity_counters() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut ok = true;
    let mut parts = Vec::new();
    for (m, r) in [(7, 3), (6, 4)] {
        let counts = duplicate_count(m, r).unwrap();
        let code = RmCode::new(m, r).unwrap();
        let u: Vec<u8> = (0..code.k()).map(|_| rng.random_range(0..2)).collect();
        let c = code.encode(&u).unwrap();
        let llr: Vec<f64> = c.iter().map(|&b| (1.0 - 2.0 * b as f64) * 1.5 + rng.random_range(-1.0..1.0)).collect();
        // One outer iteration with one pass at every level.
        let cfg = |alg| DecoderConfig::new(alg).with_max_iters(1);
        let rpa = rpa_decode(&llr, m, r, &cfg(Algorithm::Rpa)).unwrap().first_order_decodes;
        let rupa = rupa_decode(&llr, m, r, BranchContext::default(), &cfg(Algorithm::Rupa))
            .unwrap()
            .first_order_decodes;
        let iupa_one = iupa_decode(&llr, m, r, &cfg(Algorithm::Iupa)).unwrap().first_order_decodes;
        // IUPA's inner levels never iterate: every outer iteration costs N_U.
        let full = iupa_decode(&llr, m, r, &DecoderConfig::new(Algorithm::Iupa).with_max_iters(3)).unwrap();
        ok &= rpa == counts.total
            && rupa == counts.unique
            && iupa_one == counts.unique
            && full.first_order_decodes == counts.unique * full.iterations_used as u64;
        parts.push(format!("RM({m},{r}) rpa {rpa}, rupa {rupa}, iupa {iupa_one}"));
    }
    Outcome {
        passed: ok,
        summary: parts.join("; "),
    }
}

struct Reference {
    m: usize,
    r: usize,
    ebno_db: f64,
    /// Reference FER for RPA, CPA, RUPA, IUPA.
    fer: [f64; 4],
}

const REFERENCES: [Reference; 4] = [
    Reference {
        m: 7,
        r: 3,
        ebno_db: 2.0,
        fer: [0.0469, 0.0542, 0.0489, 0.0583],
    },
    Reference {
        m: 8,
        r: 3,
        ebno_db: 1.0,
        fer: [0.1163, 0.1582, 0.1205, 0.2025],
    },
    Reference {
        m: 6,
        r: 4,
        ebno_db: 4.0,
        fer: [0.0842, 0.0993, 0.0870, 0.0936],
    },
    Reference {
        m: 7,
        r: 4,
        ebno_db: 3.5,
        fer: [0.0359, 0.0421, 0.0370, 0.0486],
    },
];

fn workers() -> usize {
    thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn fer_point(m: usize, r: usize, algorithm: Algorithm, ebno: f64, min_errors: u64, max_frames: u64) -> FerPoint {
    let cfg = DecoderConfig::new(algorithm)
        .with_rule(Rule::MinSum)
        .with_max_iters(default_max_iters(m, r));
    let mut sim = SimConfig::new(m, r, cfg);
    sim.min_frame_errors = min_errors;
    sim.max_frames = max_frames;
    sim.seed = FER_SEED;
    sim.workers = workers();
    let rate = RmCode::new(m, r).unwrap().rate();
    run_fer_point(&sim, &ChannelConfig::new(ebno, rate).unwrap()).unwrap()
}

fn within_tolerance(p: &FerPoint, reference: f64) -> bool {
    (p.fer - reference).abs() <= FER_REL_TOL * reference || (p.ci95_low <= reference && reference <= p.ci95_high)
}

/// Runs all sixteen reference points; returns them in table order.
fn reference_points() -> Vec<(usize, Algorithm, FerPoint)> {
    let mut out = Vec::new();
    for (idx, reference) in REFERENCES.iter().enumerate() {
        for (a, algorithm) in Algorithm::ALL.into_iter().enumerate() {
            let start = Instant::now();
            let p = fer_point(
                reference.m,
                reference.r,
                algorithm,
                reference.ebno_db,
                FER_MIN_ERRORS,
                FER_MAX_FRAMES,
            );
            let target = reference.fer[a];
            info(&format!(
                "RM({},{}) {:.2} dB {:<4} FER {:.4} [{:.4}, {:.4}] ({}/{}) ref {:.4} rel.dev {:+.1}% {} ({:.0}s)",
                reference.m,
                reference.r,
                reference.ebno_db,
                algorithm.name(),
                p.fer,
                p.ci95_low,
                p.ci95_high,
                p.frame_errors,
                p.frames,
                target,
                100.0 * (p.fer - target) / target,
                if within_tolerance(&p, target) { "ok" } else { "OUT" },
                start.elapsed().as_secs_f64()
            ));
            out.push((idx, algorithm, p));
        }
    }
    out
}

fn fer_reproduction(points: &[(usize, Algorithm, FerPoint)]) -> Outcome {
    let mut failed = Vec::new();
    let mut enough_errors = true;
    for (idx, algorithm, p) in points {
        let reference = &REFERENCES[*idx];
        let a = Algorithm::ALL.iter().position(|x| x == algorithm).unwrap();
        enough_errors &= p.frame_errors >= FER_MIN_ERRORS;
        if !within_tolerance(p, reference.fer[a]) {
            failed.push(format!("RM({},{}) {}", reference.m, reference.r, algorithm));
        }
    }
    Outcome {
        passed: failed.is_empty() && enough_errors,
        summary: if failed.is_empty() {
            format!("{}/{} points within max(25%, 95% CI)", points.len(), points.len())
        } else {
            format!(
                "{}/{} points within max(25%, 95% CI); outside: {}",
                points.len() - failed.len(),
                points.len(),
                failed.join(", ")
            )
        },
    }
}

fn rupa_matches_rpa(points: &[(usize, Algorithm, FerPoint)]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (idx, reference) in REFERENCES.iter().enumerate() {
        let find = |alg| &points.iter().find(|(i, a, _)| *i == idx && *a == alg).unwrap().2;
        let (rpa, rupa) = (find(Algorithm::Rpa), find(Algorithm::Rupa));
        let overlap = rpa.ci95_low <= rupa.ci95_high && rupa.ci95_low <= rpa.ci95_high;
        ok &= overlap;
        parts.push(format!(
            "RM({},{}) RPA [{:.4}, {:.4}] RUPA [{:.4}, {:.4}]{}",
            reference.m,
            reference.r,
            rpa.ci95_low,
            rpa.ci95_high,
            rupa.ci95_low,
            rupa.ci95_high,
            if overlap { "" } else { " disjoint" }
        ));
    }
    Outcome {
        passed: ok,
        summary: parts.join("; "),
    }
}

/// Monotone trend of each code's IUPA curve beyond the reference point.
fn fer_trend() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for reference in &REFERENCES {
        let mut curve = Vec::new();
        for step in 0..4 {
            let ebno = reference.ebno_db + 0.5 * step as f64;
            let p = fer_point(reference.m, reference.r, Algorithm::Iupa, ebno, 50, 20_000);
            info(&format!(
                "trend RM({},{}) iupa {:.2} dB FER {:.2e} [{:.2e}, {:.2e}] ({}/{})",
                reference.m, reference.r, ebno, p.fer, p.ci95_low, p.ci95_high, p.frame_errors, p.frames
            ));
            curve.push(p);
        }
        let monotone = curve.windows(2).all(|w| w[1].fer <= w[0].fer);
        ok &= monotone;
        parts.push(format!(
            "RM({},{}) {:.1e}..{:.1e}{}",
            reference.m,
            reference.r,
            curve[0].fer,
            curve[curve.len() - 1].fer,
            if monotone { "" } else { " not monotone" }
        ));
    }
    Outcome {
        passed: ok,
        summary: parts.join(", "),
    }
}

fn main() -> ExitCode {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |id: u32| selected.is_empty() || selected.contains(&id);
    let mut all_passed = true;
    let mut record = |id: u32, name: &str, o: Outcome| {
        report(id, name, &o);
        all_passed &= o.passed;
    };

    if wanted(1) {
        record(1, "counting identities", counting_identities());
    }
    if wanted(2) {
        record(2, "schedule uniqueness", schedule_uniqueness());
    }
    if wanted(3) {
        record(3, "partition identity", property_one());
    }
    if wanted(4) {
        record(4, "FHT optimality", fht_optimality());
    }
    if wanted(5) {
        record(5, "projection closure", projection_closure());
    }
    if wanted(6) || wanted(7) {
        info(&format!(
            "FER points: min-sum, default N_max, >= {FER_MIN_ERRORS} frame errors, seed {FER_SEED}, {} worker(s)",
            workers()
        ));
        let points = reference_points();
        if wanted(6) {
            let mut o = fer_reproduction(&points);
            let trend = fer_trend();
            o.passed &= trend.passed;
            o.summary = format!("{}; trend: {}", o.summary, trend.summary);
            record(6, "FER reproduction", o);
        }
        if wanted(7) {
            record(7, "RUPA vs RPA", rupa_matches_rpa(&points));
        }
    }
    if wanted(8) {
        record(8, "complexity counters", complexity_counters());
    }

    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
