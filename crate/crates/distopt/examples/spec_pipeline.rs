//! Driving the command pipeline from code instead of the `distopt` binary.
//!
//! `cargo run --release --example spec_pipeline`

use std::path::PathBuf;

use distopt::cli::{execute, Command, RunConfig};

fn main() -> anyhow::Result<()> {
    let spec = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/graph_a.json");
    let out = std::env::temp_dir().join("distopt-spec-pipeline");
    for command in [Command::Solve, Command::Synthesize, Command::Verify] {
        let mut cfg = RunConfig::new(command, &spec);
        cfg.out = Some(out.clone());
        cfg.dump_brackets = true;
        let res = execute(&cfg)?;
        println!("== {command:?} (exit {})", res.code);
        println!("{}", res.stdout.lines().take(12).collect::<Vec<_>>().join("\n"));
        for (name, body) in &res.files {
            println!("   would write {name} ({} bytes)", body.len());
        }
    }
    Ok(())
}
