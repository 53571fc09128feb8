//! Rewrites every non-admissible coupling as a Lie bracket of admissible fields.
//!
//! `cargo run --example bracket_rewrite [spec.json]`

use std::path::PathBuf;

use distopt::cli::SpecFile;
use distopt::liebracket::rewrite_dynamics;
use distopt::problem::augment;

fn main() -> anyhow::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/graph_b.json")
    });
    let spec = SpecFile::load(&path)?;
    let ap = augment(&spec.problem()?, spec.k.unwrap_or(1.0))?;
    let ext = rewrite_dynamics(&ap, &spec.graph()?)?;
    for r in &ext.rewrites {
        println!("{} ({},{}) = {}  ->  tau {} on h({},{}) along {:?}", r.kind, r.i, r.j, r.coeff, r.tau, r.k1, r.k2, r.path);
        println!("    {}", r.raw);
        for (c, b) in &r.projection {
            println!("    {c:+} {b}");
        }
    }
    println!("terms:");
    for t in &ext.terms {
        println!("  {:+} * {}  (degree {}, hits {:?})", t.v, t.bracket.pretty(ext.n), t.bracket.degree(), t.target);
    }
    println!("max degree {}, exactness error {:e}", ext.max_degree(), ext.exactness_error());
    Ok(())
}
