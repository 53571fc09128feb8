//! Distributed constrained optimization over directed graphs by Lie-bracket
//! approximation of saddle-point dynamics.
//!
//! Pipeline: [`problem`] builds the augmented program and its exact saddle point,
//! [`spdyn`] splits the saddle flow into the part agents can compute from
//! neighbors and a linear rest, [`liebracket`] writes the rest as Hall brackets
//! of admissible fields, [`synthesis`] picks frequencies and sinusoidal inputs
//! whose averaged flow reproduces those brackets, and [`sim`] integrates both.
//!
//! ## Examples
//!
//! ```text
//! examples/
//! ├── graph_paths.rs          neighbors, Laplacian, shortest paths
//! ├── kkt_oracle.rs           exact saddle point, couplings to rewrite
//! ├── saddle_flow.rs          admissible/rest split, centralized convergence
//! ├── hall_basis.rs           Hall sets and bracket projection
//! ├── bracket_rewrite.rs      every rest coupling as a bracket
//! ├── equivalence_classes.rs  chain brackets and their class sizes
//! ├── frequency_design.rs     cancellation certificates, frequency search
//! ├── single_bracket.rs       one bracket flow from oscillatory inputs
//! ├── distributed_run.rs      closed loop, sigma sweep, locality probe
//! └── spec_pipeline.rs        the command pipeline called from code
//! ```
//!
//! ```bash
//! cargo run --release --example distributed_run
//! ```

pub mod cli;
pub mod digraph;
pub mod liebracket;
pub mod problem;
pub mod sim;
pub mod spdyn;
pub mod synthesis;
