use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rm_paal::decoders::{default_max_iters, duplicate_count, kept_fraction_denominator, DEFAULT_THETA};
use rm_paal::sim::csv_out::read_rows;
use rm_paal::sim::fer::{DEFAULT_MAX_FRAMES, DEFAULT_MIN_FRAME_ERRORS};
use rm_paal::sim::{run_sweep, CsvRow, FerCsvWriter, SimConfig};
use rm_paal::{selftest, verify_unique_schedule, Algorithm, Decoder, DecoderConfig, Rule};

const SEED_ENV: &str = "RM_PAAL_SEED";

#[derive(Parser, Debug)]
#[command(name = "rm-paal", version, about = "Projection-aggregation decoding of Reed-Muller codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte-Carlo FER/BER sweep over AWGN; writes CSV.
    Simulate(SimulateArgs),
    /// Decodes one LLR vector read from a file.
    Decode(DecodeArgs),
    /// Checks that the unique-projection schedule reaches every subspace once.
    VerifySchedule(CodeOnly),
    /// Prints total, unique and duplicate first-order projection counts.
    Count(CodeOnly),
    /// Runs the built-in consistency checks.
    Selftest {
        #[arg(long, default_value_t = 6)]
        max_m: usize,
    },
}

#[derive(Args, Debug)]
struct CodeOnly {
    /// Code as `m,r`.
    #[arg(long)]
    code: String,
}

#[derive(Args, Debug)]
struct DecoderArgs {
    #[arg(long)]
    code: String,
    /// rpa, cpa, rupa or iupa.
    #[arg(long)]
    decoder: String,
    /// tanh or minsum.
    #[arg(long, default_value = "minsum")]
    rule: String,
    /// Maximum iterations (default depends on the code).
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_THETA)]
    theta: f64,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    decoder: DecoderArgs,
    /// Eb/N0 grid in dB as `start:stop:step` or a single value.
    #[arg(long)]
    snr: Option<String>,
    #[arg(long, default_value_t = DEFAULT_MIN_FRAME_ERRORS)]
    min_errors: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_FRAMES)]
    max_frames: u64,
    /// Overridden by the RM_PAAL_SEED environment variable when set.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// CSV destination; an existing file is resumed by grid point.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DecodeArgs {
    #[command(flatten)]
    decoder: DecoderArgs,
    /// Whitespace-separated LLRs, `2^m` of them.
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<rm_paal::Error> for Failure {
    fn from(e: rm_paal::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn parse_code(text: &str, min_r: usize) -> Result<(usize, usize), Failure> {
    let usage = || Failure::Usage(format!("invalid --code '{text}': expected m,r with {min_r} <= r <= m <= 16"));
    let (m, r) = text.split_once(',').ok_or_else(usage)?;
    let m: usize = m.trim().parse().map_err(|_| usage())?;
    let r: usize = r.trim().parse().map_err(|_| usage())?;
    if m < 1 || m > 16 || r < min_r || r > m {
        return Err(usage());
    }
    Ok((m, r))
}

fn parse_grid(text: &str) -> Result<Vec<f64>, Failure> {
    let usage = || Failure::Usage(format!("invalid --snr '{text}': expected start:stop:step"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| usage()))
        .collect::<Result<_, _>>()?;
    if parts.iter().any(|v| !v.is_finite()) {
        return Err(usage());
    }
    match parts.as_slice() {
        [v] => Ok(vec![*v]),
        [start, stop, step] => {
            if *step <= 0.0 || stop < start {
                return Err(usage());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count)
                .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
                .collect())
        }
        _ => Err(usage()),
    }
}

/// Eb/N0 range of the reference curves for the four reference codes.
fn reference_grid(m: usize, r: usize) -> Option<&'static str> {
    match (m, r) {
        (7, 3) => Some("2:4:0.25"),
        (8, 3) => Some("1:2.75:0.25"),
        (6, 4) => Some("4:6:0.25"),
        (7, 4) => Some("3.5:5:0.25"),
        _ => None,
    }
}

fn decoder_config(args: &DecoderArgs, min_r: usize) -> Result<(usize, usize, DecoderConfig), Failure> {
    let (m, r) = parse_code(&args.code, min_r)?;
    let algorithm: Algorithm = args.decoder.parse().map_err(|e: rm_paal::Error| Failure::Usage(e.to_string()))?;
    let rule: Rule = args.rule.parse().map_err(|e: rm_paal::Error| Failure::Usage(e.to_string()))?;
    if algorithm == Algorithm::Cpa && r < 2 {
        return Err(Failure::Usage("cpa needs r >= 2".into()));
    }
    let cfg = DecoderConfig::new(algorithm)
        .with_rule(rule)
        .with_max_iters(args.nmax.unwrap_or_else(|| default_max_iters(m, r)))
        .with_theta(args.theta);
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok((m, r, cfg))
}

fn resolve_seed(flag: u64) -> Result<u64, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{SEED_ENV}='{v}' is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let (m, r, cfg) = decoder_config(&args.decoder, 1)?;
    let grid_text = match &args.snr {
        Some(s) => s.clone(),
        None => reference_grid(m, r)
            .ok_or_else(|| Failure::Usage(format!("--snr is required for RM({m},{r})")))?
            .to_string(),
    };
    let mut sim = SimConfig::new(m, r, cfg);
    sim.ebno_grid = parse_grid(&grid_text)?;
    sim.min_frame_errors = args.min_errors;
    sim.max_frames = args.max_frames;
    sim.seed = resolve_seed(args.seed)?;
    sim.workers = args.workers;
    sim.validate().map_err(|e| Failure::Usage(e.to_string()))?;

    match &args.out {
        None => {
            let stdout = io::stdout();
            let mut writer = FerCsvWriter::new(stdout.lock());
            run_sweep(&sim, |p| writer.write(&CsvRow::new(&sim, p)))?;
        }
        Some(path) => {
            let (mut writer, done) = open_resumable(path, &sim)?;
            sim.ebno_grid.retain(|e| !done.contains(e));
            run_sweep(&sim, |p| {
                eprintln!("{:.2} dB: {} / {} frames in error", p.ebno_db, p.frame_errors, p.frames);
                writer.write(&CsvRow::new(&sim, p))
            })?;
        }
    }
    Ok(())
}

/// Opens `path` for appending and returns the grid points it already holds
/// for this configuration.
fn open_resumable(path: &Path, sim: &SimConfig) -> Result<(FerCsvWriter<File>, Vec<f64>), Failure> {
    let existing = fs::metadata(path).map(|md| md.len() > 0).unwrap_or(false);
    if existing {
        let rows = read_rows(File::open(path)?)?;
        let done = rows.iter().filter(|row| row.matches(sim)).map(|row| row.ebno_db).collect();
        let file = OpenOptions::new().append(true).open(path)?;
        Ok((FerCsvWriter::appending(file), done))
    } else {
        Ok((FerCsvWriter::new(File::create(path)?), Vec::new()))
    }
}

fn decode(args: DecodeArgs) -> Result<(), Failure> {
    let (m, r, cfg) = decoder_config(&args.decoder, 1)?;
    let text = fs::read_to_string(&args.input)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", args.input.display())))?;
    let llr: Vec<f64> = text
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| Failure::Usage(format!("'{t}' is not a number"))))
        .collect::<Result<_, _>>()?;
    let n = 1usize << m;
    if llr.len() != n {
        return Err(Failure::Usage(format!("expected {n} LLRs for RM({m},{r}), found {}", llr.len())));
    }
    if llr.iter().any(|v| !v.is_finite()) {
        return Err(Failure::Usage("LLRs must be finite".into()));
    }
    let out = Decoder::new(m, r, cfg)?.decode(&llr)?;
    let bits: String = out.codeword.iter().map(|&b| char::from(b'0' + b)).collect();
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "bits: {bits}")?;
    writeln!(stdout, "iterations: {}", out.iterations_used)?;
    writeln!(stdout, "converged: {}", out.converged)?;
    writeln!(stdout, "first_order_decodes: {}", out.first_order_decodes)?;
    writeln!(stdout, "projection_ops: {}", out.projection_ops)?;
    Ok(())
}

fn verify(args: CodeOnly) -> Result<(), Failure> {
    let (m, r) = parse_code(&args.code, 2)?;
    let rep = verify_unique_schedule(m, r)?;
    let status = if rep.complete { "complete" } else { "INCOMPLETE" };
    println!("RM({m},{r}): {}/{} unique, {status}", rep.distinct_count, rep.leaf_count);
    for (d, count) in rep.per_level.iter().enumerate() {
        println!("level {d}: {count} projections");
    }
    if rep.complete {
        Ok(())
    } else {
        Err(Failure::Runtime("schedule verification failed".into()))
    }
}

fn count(args: CodeOnly) -> Result<(), Failure> {
    let (m, r) = parse_code(&args.code, 2)?;
    let c = duplicate_count(m, r)?;
    let denominator = kept_fraction_denominator(r)?;
    println!("code: RM({m},{r})");
    println!("total (N_T): {}", c.total);
    println!("unique (N_U): {}", c.unique);
    println!("duplicates (N_D): {}", c.duplicates);
    println!("kept fraction: 1/{denominator}");
    println!("reduction: {:.2}%", c.reduction_percent());
    Ok(())
}

fn run_selftest(max_m: usize) -> Result<(), Failure> {
    if !(1..=8).contains(&max_m) {
        return Err(Failure::Usage("--max-m must lie in 1..=8".into()));
    }
    let checks = selftest::run(max_m)?;
    let mut failed = 0;
    for c in &checks {
        println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Runtime(format!("{failed} self-test check(s) failed")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Decode(args) => decode(args),
        Command::VerifySchedule(args) => verify(args),
        Command::Count(args) => count(args),
        Command::Selftest { max_m } => run_selftest(max_m),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
