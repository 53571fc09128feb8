//! Brackets on a chain of generators and the size of their equivalence classes.
//!
//! `cargo run --example equivalence_classes`

use distopt::digraph::{DiGraph, Path};
use distopt::liebracket::{admissible_fields, equivalence_class, rec_bracket, rec_bracket_phall, PHallBasis};

fn main() -> anyhow::Result<()> {
    let n = 10;
    for d in 2..=8 {
        let nodes: Vec<usize> = (1..=d + 1).collect();
        let edges: Vec<(usize, usize)> = nodes.windows(2).map(|w| (w[0], w[1])).collect();
        let g = DiGraph::new(n, &edges)?;
        let p = Path::new(&g, nodes)?;
        let raw = rec_bracket(&p, p.tail(), p.head(), n)?;
        let basis = PHallBasis::over(admissible_fields(&g, n));
        let proj = rec_bracket_phall(&p, p.tail(), p.head(), n, &basis)?;
        let (c, b) = proj.first().ok_or_else(|| anyhow::anyhow!("empty projection"))?;
        let class = equivalence_class(b, &basis)?;
        println!("degree {d}: {raw}");
        println!("    hall form {c:+} {b}, class size {}", class.len());
    }
    Ok(())
}
