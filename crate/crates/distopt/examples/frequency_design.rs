//! Frequency sets: minimal cancellation, independence certificates and a full search.
//!
//! `cargo run --example frequency_design [seed]`

use std::path::PathBuf;

use distopt::cli::SpecFile;
use distopt::liebracket::rewrite_dynamics;
use distopt::problem::augment;
use distopt::synthesis::{check_minimally_canceling, choose_frequencies, collect_classes, ripple_score, Omega, SynthConfig};

fn main() -> anyhow::Result<()> {
    for set in [[1, 2, -3], [1, 5, -6]] {
        let ws: Vec<Omega> = set.iter().map(|&k| Omega::int(k)).collect();
        let cert = check_minimally_canceling(&ws);
        println!("{set:?}: holds {} witness {:?}", cert.holds, cert.witness);
    }

    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0);
    let spec = SpecFile::load(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/graph_b.json"))?;
    let ext = rewrite_dynamics(&augment(&spec.problem()?, 1.0)?, &spec.graph()?)?;
    let classes = collect_classes(&ext)?;
    let cfg = SynthConfig { seed, ..SynthConfig::default() };
    let fa = choose_frequencies(&classes, &cfg)?;
    println!("seed {seed}: {} attempts, ripple score {:.3}", fa.attempts, ripple_score(&classes, &fa.classes)?);
    for (c, f) in classes.iter().zip(&fa.classes) {
        let gens: Vec<String> = c.generators.iter().map(|g| g.to_string()).collect();
        println!("class [{}], {} members", gens.join(" "), c.members.len());
        for s in &f.sets {
            println!("    {}", s.iter().map(|w| format!("{w} ~ {:.4}", w.value())).collect::<Vec<_>>().join(", "));
        }
    }
    for cert in &fa.certificates {
        println!("{}: {} ({})", cert.check, if cert.holds { "ok" } else { "FAILS" }, cert.method);
    }
    Ok(())
}
