//! Hall basis enumeration, membership checks and projection of arbitrary brackets.
//!
//! `cargo run --example hall_basis`

use distopt::liebracket::{build_phall, Bracket, Gen};

fn main() -> anyhow::Result<()> {
    let (x, y) = (Gen::new(1, 2), Gen::new(2, 3));
    let basis = build_phall(&[x, y], 5, None);
    basis.validate().map_err(|v| anyhow::anyhow!("{v:?}"))?;
    let mut per_degree = [0usize; 6];
    for b in basis.elements() {
        per_degree[b.degree()] += 1;
    }
    // Witt dimensions on two letters: 2, 1, 2, 3, 6
    println!("elements per degree: {:?}", &per_degree[1..]);
    for b in basis.elements().iter().filter(|b| b.degree() <= 3) {
        println!("  {b}");
    }

    let z = Gen::new(3, 1);
    let gens = [x, y, z];
    let basis = build_phall(&gens, 1, None);
    let leaf = Bracket::leaf;
    let b = Bracket::node(Bracket::node(leaf(z), leaf(y)), Bracket::node(leaf(x), leaf(y)));
    println!("{b} evaluates to {:?}", b.eval().entries().collect::<Vec<_>>());
    for (c, e) in basis.project(&b)? {
        println!("  {c:+} {e}  (hall: {})", basis.check_element(&e).is_ok());
    }
    Ok(())
}
