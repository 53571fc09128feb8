//! Approximating one bracket flow with sinusoidal inputs; the error shrinks as sigma grows.
//!
//! `cargo run --release --example single_bracket`

use distopt::liebracket::{Bracket, Gen};
use distopt::sim::{integrate, integrate_oscillatory, sup_error, LinearRhs, OscillatoryRhs};
use distopt::synthesis::{choose_frequencies, class_inputs, explicit_low_degree, ClassSpec, SynthConfig};

fn main() -> anyhow::Result<()> {
    let h = |i, j| Bracket::leaf(Gen::new(i, j));
    let cases = [
        ("degree 2", Bracket::node(h(1, 2), h(2, 3)), 3),
        ("degree 3", Bracket::node(h(3, 4), Bracket::node(h(1, 2), h(2, 3))), 4),
    ];
    for (label, b, dim) in cases {
        let class = ClassSpec::single(&b, 1.0)?;
        let fa = choose_frequencies(std::slice::from_ref(&class), &SynthConfig::default())?;
        let z0 = vec![1.0; dim];
        let reference = integrate(&LinearRhs::from_brackets(dim, &[(b.clone(), 1.0)]), &z0, 1.0, 1e-3, 1)?;
        println!("{label}: {b}, reference final {:?}", reference.final_state());
        for (how, inputs) in [
            ("general", class_inputs(&class, &fa.classes[0], 100, 1.0)?),
            ("explicit", explicit_low_degree(&class, &fa.classes[0], 1.0)?),
        ] {
            let mut line = format!("    {how:8}");
            for sigma in [100.0, 400.0, 1600.0] {
                let tr = integrate_oscillatory(&OscillatoryRhs::new(dim, None, &inputs, sigma), &z0, 1.0, 1e-3, 40.0)?;
                line.push_str(&format!("  sigma {sigma}: {:.4}", sup_error(&reference, &tr)?));
            }
            println!("{line}");
        }
    }
    Ok(())
}
