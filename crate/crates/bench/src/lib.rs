//! Fixtures shared by the criterion benchmarks.

use thetalab_core::lattice::registry::Registry;
use thetalab_core::{GramTarget, Lattice};

pub fn lattice(name: &str) -> Lattice {
    Registry::builtin().resolve(name).expect("built-in lattice")
}

/// The A4 Cartan matrix as a genus-4 target.
pub fn a4() -> GramTarget {
    GramTarget::from_rows(&[[2, -1, 0, 0], [-1, 2, -1, 0], [0, -1, 2, -1], [0, 0, -1, 2]]).unwrap()
}
