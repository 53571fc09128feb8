//! End to end: rewrite, synthesize inputs, run the distributed closed loop for
//! several sigma and probe that no agent reads a non-neighbor.
//!
//! `cargo run --release --example distributed_run`

use std::path::PathBuf;

use distopt::cli::SpecFile;
use distopt::liebracket::rewrite_dynamics;
use distopt::problem::augment;
use distopt::sim::{centralized, check_distributed, sigma_sweep, OscillatoryRhs};
use distopt::synthesis::{synthesize, SynthConfig};

fn main() -> anyhow::Result<()> {
    let spec = SpecFile::load(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/graph_b.json"))?;
    let ap = augment(&spec.problem()?, 1.0)?;
    let g = spec.graph()?;
    let ext = rewrite_dynamics(&ap, &g)?;
    let syn = synthesize(&ext, &SynthConfig::default())?;
    println!("{} brackets, {} input atoms, omega_max {:.2}", ext.terms.len(), syn.inputs.atoms.len(), syn.inputs.max_omega());

    let z0 = vec![1.0; 15];
    let reference = centralized(&ap, &z0, 2.0, 1e-3)?;
    let sigmas = [300.0, 1000.0, 1500.0];
    let pts = sigma_sweep(&ext, &syn.inputs, &reference, &sigmas, &z0, 1e-3, 40.0)?;
    for p in &pts {
        println!("sigma {:6}: sup error {:.4}, {} steps per sample, x(2) = {:.3?}", p.sigma, p.sup_error, p.steps_per_sample, &p.final_state[..5]);
    }
    println!("centralized x(2) = {:.3?}", &reference.final_state()[..5]);

    let rhs = OscillatoryRhs::closed_loop(&ext, &syn.inputs, 1000.0);
    match check_distributed(&rhs, &g, 5, 1) {
        Ok(()) => println!("closed loop only uses neighbor states"),
        Err(w) => println!("leak: agent {} reads agent {}", w.agent, w.other),
    }
    Ok(())
}
