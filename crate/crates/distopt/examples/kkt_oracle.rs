//! Exact saddle point of a constrained quadratic program and the standing checks.
//!
//! `cargo run --example kkt_oracle [spec.json]`

use std::path::PathBuf;

use distopt::cli::SpecFile;
use distopt::problem::{augment, check_assumptions, solve_kkt_oracle};

fn main() -> anyhow::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/graph_b.json")
    });
    let spec = SpecFile::load(&path)?;
    let ap = augment(&spec.problem()?, spec.k.unwrap_or(1.0))?;
    let sp = solve_kkt_oracle(&ap)?;
    println!("x*  = {:?}", sp.x);
    println!("nu* = {:?}", sp.nu);
    println!("mu* = {:?}", sp.mu);
    println!("active inequality rows: {:?}", sp.active);
    println!("stationarity residual: {:e}", ap.stationarity_residual(&sp));
    println!("objective: {}", ap.lagrangian(&sp.x, &vec![0.0; ap.n()], &vec![0.0; ap.n()])?);

    let report = check_assumptions(&ap, &spec.graph()?);
    println!("diagonal failures: {:?}", report.diagonal_failures);
    println!("couplings to rewrite: {}", report.rest_entries.len());
    for e in &report.rest_entries {
        println!("  {} ({}, {}) = {}", e.kind.label(), e.i, e.j, e.coeff);
    }
    println!("inequality rows coupling non-neighbors: {}", report.topology_violations.len());
    Ok(())
}
