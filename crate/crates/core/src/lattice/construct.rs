//! Root lattices, orthogonal sums, `D_n^+` and glue-code lattices.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::roots::{Component, RootType};
use super::{Lattice, LatticeError};
use crate::exactnum::{hnf_rowreduce, IntMatrix, RatMatrix};

/// Root lattice `X_n` with its simple roots as basis. The Gram matrix is the
/// Cartan matrix; the lattice is even and positive definite but in general
/// not unimodular.
pub fn root_lattice(kind: RootType, rank: usize) -> Result<Lattice, LatticeError> {
    let c = Component::new(kind, rank)?;
    let cartan = c.cartan();
    Lattice::from_generator(c.to_string(), RatMatrix::identity(rank), cartan)
}

/// Orthogonal sum: block-diagonal generator, ambient form and Gram matrix.
pub fn direct_sum(first: &Lattice, second: &Lattice) -> Lattice {
    let name = match (first.rank(), second.rank()) {
        (0, _) => second.name().to_string(),
        (_, 0) => first.name().to_string(),
        _ => format!("{}+{}", first.name(), second.name()),
    };
    let generator = first.generator().block_diag(second.generator());
    let ambient = first.ambient_form().block_diag(second.ambient_form());
    let gram = first.gram().block_diag(second.gram());
    Lattice::assemble(name, generator, ambient, gram).expect("blocks of valid Gram matrices fit")
}

/// `D_n^+`: `D_n` together with the all-`1/2` vector, in standard
/// coordinates of `Z^n`. Even unimodular exactly when `8 | n`.
pub fn plus_construction(n: usize) -> Result<Lattice, LatticeError> {
    if n < 8 || n % 8 != 0 {
        return Err(LatticeError::PlusConstruction(n));
    }
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let int = |v: i64| BigRational::from_integer(BigInt::from(v));
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(n + 1);
    for i in 0..n - 1 {
        let mut r = vec![int(0); n];
        r[i] = int(1);
        r[i + 1] = int(-1);
        rows.push(r);
    }
    let mut r = vec![int(0); n];
    r[n - 2] = int(1);
    r[n - 1] = int(1);
    rows.push(r);
    rows.push(vec![half; n]);
    let basis = hnf_rowreduce(&RatMatrix::from_rows(rows))?;
    let lattice = Lattice::from_generator(format!("D{n}+"), basis.to_rational(), IntMatrix::identity(n))?;
    lattice.ensure_even_unimodular()?;
    lattice.reduced()
}

/// Root-lattice components plus generators of the glue code.
///
/// Word entries index the discriminant-class representatives of each
/// component (see [`Component::glue_vector`]).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlueSpec {
    pub components: Vec<Component>,
    pub glue_words: Vec<Vec<usize>>,
}

impl GlueSpec {
    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.rank).sum()
    }

    pub fn check(&self) -> Result<(), LatticeError> {
        for word in &self.glue_words {
            if word.len() != self.components.len() {
                return Err(LatticeError::GlueWordLength { got: word.len(), expected: self.components.len() });
            }
            for (c, &idx) in self.components.iter().zip(word) {
                if idx >= c.discriminant_order() {
                    return Err(LatticeError::InvalidGlueIndex { component: c.to_string(), index: idx });
                }
            }
        }
        Ok(())
    }
}

/// Lattice generated by the orthogonal sum of the root lattices and the glue
/// vectors of every word. Fails unless the result is even unimodular and
/// positive definite. The returned basis is LLL-reduced.
pub fn glue(name: &str, spec: &GlueSpec) -> Result<Lattice, LatticeError> {
    spec.check()?;
    let n = spec.rank();
    if n == 0 {
        return Err(LatticeError::EmptyLattice);
    }
    let mut ambient = IntMatrix::zeros(0, 0);
    for c in &spec.components {
        ambient = ambient.block_diag(&c.cartan());
    }
    let mut rows: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| BigRational::from_integer(BigInt::from(i64::from(i == j))))
                .collect()
        })
        .collect();
    for word in &spec.glue_words {
        let mut r = Vec::with_capacity(n);
        for (c, &idx) in spec.components.iter().zip(word) {
            r.extend(c.glue_vector(idx)?);
        }
        if r.iter().any(|v| !v.is_zero()) {
            rows.push(r);
        }
    }
    let basis = hnf_rowreduce(&RatMatrix::from_rows(rows))?;
    let lattice = Lattice::from_generator(name, basis.to_rational(), ambient)?;
    lattice.ensure_even_unimodular()?;
    lattice.reduced()
}
