//! Digraph basics: neighbors, Laplacian, shortest paths, strong connectivity.
//!
//! `cargo run --example graph_paths`

use distopt::digraph::DiGraph;

fn main() -> anyhow::Result<()> {
    // (i, j): agent i receives from agent j
    let g = DiGraph::new(5, &[(1, 2), (1, 5), (2, 3), (3, 1), (4, 3), (5, 4)])?;
    println!("strongly connected: {}", g.is_strongly_connected());
    for i in 1..=5 {
        println!("agent {i} hears {:?}", g.neighbors(i).collect::<Vec<_>>());
    }
    println!("laplacian:");
    for row in g.laplacian() {
        println!("  {row:?}");
    }
    for (i, j) in [(5, 2), (2, 1), (4, 1)] {
        let p = g.shortest_path(i, j)?;
        println!("path {i} <- {j}: {p} ({} edges)", p.len());
    }
    let broken = DiGraph::new(3, &[(1, 2), (2, 1), (3, 1)])?;
    println!("3-node graph without edges into 3: strongly connected = {}", broken.is_strongly_connected());
    Ok(())
}
