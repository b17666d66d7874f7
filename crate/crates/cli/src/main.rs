mod config;
mod export;
mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bethe_circuit::cba::bethe_state_explicit;
use bethe_circuit::index::{sector_basis, MagnonString};
use bethe_circuit::synth::synthesize_circuit;
use clap::{Args, Parser, Subcommand};

use config::{load, Overrides, RunConfig};
use export::CircuitExport;

#[derive(Parser)]
#[command(name = "abc", version, about = "Bethe-state circuits for the periodic XXZ chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; the N = 6, M = 2 random demo when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for random parameters and randomized checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance applied to every residual check.
    #[arg(long)]
    tol: Option<f64>,
    /// Set every inhomogeneity to zero; `verify` then also runs the
    /// homogeneous-chain equivalences.
    #[arg(long)]
    homogeneous: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the circuit and write it in the `ABC-CIRCUIT 1` format.
    Synth(Common),
    /// Run the property battery and write a JSON report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Previously exported circuit to check against the Bethe state.
        #[arg(long)]
        circuit: Option<PathBuf>,
    },
    /// Dump the amplitudes of a Bethe state on the last `k` sites.
    State {
        #[command(flatten)]
        common: Common,
        /// Number of sites the state is supported on.
        #[arg(long)]
        k: usize,
        /// Comma-separated momenta, e.g. `1,2`; empty for the vacuum.
        #[arg(long, default_value = "")]
        selection: String,
    },
}

enum Failure {
    Check,
    Input(String),
}

fn config(common: &Common) -> Result<RunConfig, Failure> {
    let overrides = Overrides { seed: common.seed, check_tol: common.tol, homogeneous: common.homogeneous };
    load(common.config.as_deref(), &overrides).map_err(Failure::Input)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Input(e.to_string())),
    }
}

fn synth(common: &Common) -> Result<(), Failure> {
    let cfg = config(common)?;
    if cfg.spec.n_magnons() == 0 {
        eprintln!("warning: no magnons, every gate is the identity");
    }
    let circuit = synthesize_circuit(&cfg.spec).map_err(|e| Failure::Input(e.to_string()))?;
    emit(common.out.as_deref(), &CircuitExport::new(&cfg.spec, &circuit).to_text())
}

fn verify(common: &Common, circuit: Option<&Path>) -> Result<(), Failure> {
    let cfg = config(common)?;
    let imported = match circuit {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
            Some(CircuitExport::from_text(&text).and_then(|c| c.to_circuit()).map_err(Failure::Input)?)
        }
        None => None,
    };
    let report = verify::run(&cfg.spec, cfg.seed, cfg.check_tol, common.homogeneous, imported.as_ref());
    match &common.out {
        Some(path) => {
            print!("{}", report.to_text());
            let json = serde_json::to_string_pretty(&report).expect("serializable report");
            emit(Some(path), &format!("{json}\n"))?;
        }
        None => print!("{}", report.to_text()),
    }
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn parse_selection(text: &str) -> Result<Vec<usize>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|e| Failure::Input(format!("bad momentum `{s}`: {e}"))))
        .collect()
}

fn state(common: &Common, k: usize, selection: &str) -> Result<(), Failure> {
    let cfg = config(common)?;
    let positions = parse_selection(selection)?;
    let sel = MagnonString::new(cfg.spec.n_magnons(), positions).map_err(|e| Failure::Input(e.to_string()))?;
    let state = bethe_state_explicit(k, &sel, &cfg.spec).map_err(|e| Failure::Input(e.to_string()))?;
    let mut text = String::new();
    for (basis, amp) in sector_basis(k, state.r).iter().zip(&state.amplitudes) {
        text.push_str(&format!("{} {} {}\n", basis.bits(), amp.re, amp.im));
    }
    emit(common.out.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Synth(c) => synth(c),
        Command::Verify { common, circuit } => verify(common, circuit.as_deref()),
        Command::State { common, k, selection } => state(common, *k, selection),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
