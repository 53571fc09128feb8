//! Centralized saddle-point flow and its split into admissible drift plus rest.
//!
//! `cargo run --release --example saddle_flow`

use std::path::PathBuf;

use distopt::cli::SpecFile;
use distopt::problem::{augment, solve_kkt_oracle};
use distopt::sim::centralized;
use distopt::spdyn::{admissible_split, saddle_rhs};

fn main() -> anyhow::Result<()> {
    let spec = SpecFile::load(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/graph_b.json"))?;
    let ap = augment(&spec.problem()?, 1.0)?;
    let g = spec.graph()?;
    let split = admissible_split(&ap, &g);
    println!("rest fields (entry, coeff, row, col):");
    for (e, c, r, k) in split.rest_fields() {
        println!("  {} ({},{})  {c:+}  z{r} <- z{k}", e.kind.label(), e.i, e.j);
    }

    let z0 = vec![1.0; 15];
    let full = saddle_rhs(&ap, &z0);
    let mut parts = split.f_adm(&z0);
    let m = split.rest_matrix();
    for r in 0..15 {
        parts[r] += (0..15).map(|c| m[(r, c)] * z0[c]).sum::<f64>();
    }
    let gap = full.iter().zip(&parts).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("|F - (f_adm + rest)| at z0: {gap:e}");

    let x_star = solve_kkt_oracle(&ap)?.x;
    let tr = centralized(&ap, &z0, 40.0, 1e-2)?;
    for (t, z) in tr.times.iter().zip(&tr.states).step_by(500) {
        let err = z[..5].iter().zip(&x_star).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        println!("t = {t:5.1}  |x - x*| = {err:.4}  mu = {:.3?}", &z[10..]);
    }
    Ok(())
}
