use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use distopt::cli::{run, Command, Mode, RunConfig, DEFAULT_SIGMA, DEFAULT_T};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Solve,
    Synthesize,
    Simulate,
    Compare,
    Verify,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SimMode {
    Central,
    Distributed,
    Both,
}

fn pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected LO,HI")?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

/// Distributed optimization over digraphs by Lie-bracket approximation.
#[derive(Debug, Parser)]
#[command(name = "distopt", version)]
struct Args {
    command: Cmd,
    /// Problem and graph file (JSON).
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SIGMA)]
    sigma: f64,
    /// Horizon.
    #[arg(long = "T", default_value_t = DEFAULT_T)]
    t: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Padding constant for agents without a genuine inequality row.
    #[arg(long = "K")]
    k: Option<f64>,
    /// Output directory for reports and CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write brackets.json with the per-entry rewrite.
    #[arg(long)]
    dump_brackets: bool,
    /// Frequency magnitude range before the sigma scaling.
    #[arg(long, value_parser = pair, default_value = "2,70", allow_negative_numbers = true)]
    freq_range: (f64, f64),
    /// Amplitude factor on primal channels.
    #[arg(long, default_value_t = 1.0)]
    beta_primal: f64,
    /// Frequency override: a synthesize report or a bare assignment.
    #[arg(long)]
    freqs: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    mode: SimMode,
    /// Sweep points for compare.
    #[arg(long, value_delimiter = ',', default_value = "300,1000,1500")]
    sigmas: Vec<f64>,
    #[arg(long, default_value_t = 1e-3)]
    sample_dt: f64,
    #[arg(long, default_value_t = 40.0)]
    oversample: f64,
    /// Keep every N-th sample in CSV output.
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// Initial state, 3n comma-separated values (default all ones).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    z0: Option<Vec<f64>>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let command = match args.command {
        Cmd::Solve => Command::Solve,
        Cmd::Synthesize => Command::Synthesize,
        Cmd::Simulate => Command::Simulate,
        Cmd::Compare => Command::Compare,
        Cmd::Verify => Command::Verify,
    };
    let mut cfg = RunConfig::new(command, args.spec);
    cfg.sigma = args.sigma;
    cfg.t_end = args.t;
    cfg.seed = args.seed;
    cfg.k = args.k;
    cfg.out = args.out;
    cfg.dump_brackets = args.dump_brackets;
    cfg.freq_range = args.freq_range;
    cfg.beta_primal = args.beta_primal;
    cfg.freqs = args.freqs;
    cfg.mode = match args.mode {
        SimMode::Central => Mode::Central,
        SimMode::Distributed => Mode::Distributed,
        SimMode::Both => Mode::Both,
    };
    cfg.sigmas = args.sigmas;
    cfg.sample_dt = args.sample_dt;
    cfg.oversample = args.oversample;
    cfg.stride = args.stride;
    cfg.z0 = args.z0;
    ExitCode::from(run(&cfg) as u8)
}
