//! Lattices given by a generator matrix in an ambient rational quadratic
//! space, together with their integer Gram matrix.

mod analysis;
mod construct;
mod reduce;
pub mod registry;
pub mod roots;
pub mod spec;

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::enumeration::{EnumerationError, ExactEnumerator};
use crate::exactnum::{det_exact, ldl_rational, ExactError, IntMatrix, RatMatrix};

pub use analysis::{
    extremal_bound, extremality_check, minimum_norm, root_system, stable_eq_hyp_predicate,
    stable_eq_hyp_predicate_for, validate, ExtremalityReport, RootSystemReport, ValidationReport,
};
pub use construct::{direct_sum, glue, plus_construction, root_lattice, GlueSpec};
pub use reduce::{enumeration_basis, enumeration_cost, lll_reduce, LllOutput};
pub use roots::{format_root_system, parse_root_system, Component, RootType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("invalid root system component `{0}`")]
    InvalidComponent(String),
    #[error("glue index {index} is out of range for component {component}")]
    InvalidGlueIndex { component: String, index: usize },
    #[error("glue word has length {got}, expected {expected}")]
    GlueWordLength { got: usize, expected: usize },
    #[error("D_n^+ needs n >= 8 with n divisible by 8, got {0}")]
    PlusConstruction(usize),
    #[error("Gram matrix entries do not fit in 64 bits")]
    EntryOverflow,
    #[error("Gram matrix of the generated lattice is not integral")]
    NotIntegral,
    #[error("lattice `{name}` is not even unimodular positive definite: {reason}")]
    NotEvenUnimodular { name: String, reason: String },
    #[error("empty lattice has no nonzero vectors")]
    EmptyLattice,
    #[error("unrecognized root system: component with {roots} roots spanning rank {rank}")]
    UnrecognizedRootSystem { rank: usize, roots: u64 },
    #[error("unknown lattice `{0}`")]
    UnknownLattice(String),
    #[error("malformed lattice spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
}

/// A lattice with basis rows `generator` inside an ambient space whose
/// quadratic form is `ambient`; `gram = generator · ambient · generatorᵀ`.
///
/// This type only requires an integral symmetric Gram matrix. Constructors
/// that produce even unimodular lattices check that property themselves;
/// [`validate`] reports it for arbitrary input.
#[derive(Clone, Debug)]
pub struct Lattice {
    name: String,
    generator: RatMatrix,
    ambient: IntMatrix,
    gram: IntMatrix,
    gram_i64: Vec<i64>,
    fingerprint: OnceLock<String>,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.generator == other.generator && self.ambient == other.ambient
    }
}

impl Lattice {
    /// Lattice given directly by its Gram matrix (generator = identity).
    pub fn from_gram(name: impl Into<String>, gram: IntMatrix) -> Result<Self, LatticeError> {
        if !gram.is_square() {
            return Err(ExactError::NotSquare { rows: gram.rows(), cols: gram.cols() }.into());
        }
        if !gram.is_symmetric() {
            return Err(ExactError::NotSymmetric.into());
        }
        let n = gram.rows();
        Lattice::assemble(name.into(), RatMatrix::identity(n), gram.clone(), gram)
    }

    /// Lattice spanned by the rows of `generator` in the space with form
    /// `ambient`. The resulting Gram matrix must be integral.
    pub fn from_generator(
        name: impl Into<String>,
        generator: RatMatrix,
        ambient: IntMatrix,
    ) -> Result<Self, LatticeError> {
        if !ambient.is_square() || !ambient.is_symmetric() {
            return Err(ExactError::NotSymmetric.into());
        }
        if generator.cols() != ambient.rows() {
            return Err(ExactError::Shape(format!(
                "generator has {} columns, ambient form is {}x{}",
                generator.cols(),
                ambient.rows(),
                ambient.cols()
            ))
            .into());
        }
        let gram = generator
            .mul(&ambient.to_rational())?
            .mul(&generator.transpose())?
            .to_integer()
            .ok_or(LatticeError::NotIntegral)?;
        Lattice::assemble(name.into(), generator, ambient, gram)
    }

    /// The rank-0 lattice, identity element of [`direct_sum`].
    pub fn zero() -> Self {
        Lattice::from_gram("0", IntMatrix::zeros(0, 0)).expect("empty Gram is valid")
    }

    fn assemble(name: String, generator: RatMatrix, ambient: IntMatrix, gram: IntMatrix) -> Result<Self, LatticeError> {
        let gram_i64 = gram
            .entries()
            .iter()
            .map(|v| v.to_i64())
            .collect::<Option<Vec<_>>>()
            .ok_or(LatticeError::EntryOverflow)?;
        Ok(Lattice { name, generator, ambient, gram, gram_i64, fingerprint: OnceLock::new() })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn generator(&self) -> &RatMatrix {
        &self.generator
    }

    pub fn ambient_form(&self) -> &IntMatrix {
        &self.ambient
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    /// Row-major Gram matrix as machine integers.
    pub fn gram_i64(&self) -> &[i64] {
        &self.gram_i64
    }

    /// Inner product `xᵀ G y` of two vectors in basis coordinates.
    pub fn inner(&self, x: &[i64], y: &[i64]) -> i64 {
        let n = self.rank();
        let mut acc = 0i64;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            let row = &self.gram_i64[i * n..(i + 1) * n];
            acc += x[i] * row.iter().zip(y).map(|(a, b)| a * b).sum::<i64>();
        }
        acc
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram_i64[i * self.rank() + i] % 2 == 0)
    }

    pub fn determinant(&self) -> BigInt {
        det_exact(&self.gram).expect("Gram matrix is square")
    }

    pub fn is_positive_definite(&self) -> bool {
        ldl_rational(&self.gram.to_rational()).is_ok()
    }

    pub fn enumerator(&self) -> Result<ExactEnumerator, EnumerationError> {
        ExactEnumerator::new(self.rank(), &self.gram_i64)
    }

    /// Enumerator on the basis predicted to walk fastest for `Q ≤ bound`,
    /// with the transform `T` from this basis: enumerated coordinates `y`
    /// correspond to the vector `y·T` here.
    pub fn enumerator_for_bound(&self, bound: i64) -> Result<(ExactEnumerator, IntMatrix), EnumerationError> {
        let basis = enumeration_basis(&self.gram, bound).ok_or(EnumerationError::Overflow)?;
        let gram: Vec<i64> = basis.gram.to_i64_rows().ok_or(EnumerationError::Overflow)?.concat();
        Ok((ExactEnumerator::new(self.rank(), &gram)?, basis.transform))
    }

    /// Same lattice with an LLL-reduced basis.
    pub fn reduced(&self) -> Result<Self, LatticeError> {
        if self.rank() == 0 {
            return Ok(self.clone());
        }
        let out = lll_reduce(&self.gram).ok_or(LatticeError::EntryOverflow)?;
        let generator = out.transform.to_rational().mul(&self.generator)?;
        Lattice::assemble(self.name.clone(), generator, self.ambient.clone(), out.gram)
    }

    /// Same lattice with basis vectors reordered: row `i` of the result is
    /// row `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self, LatticeError> {
        let n = self.rank();
        let mut p = IntMatrix::zeros(n, n);
        for (i, &j) in order.iter().enumerate() {
            p.set(i, j, BigInt::from(1));
        }
        let generator = p.to_rational().mul(&self.generator)?;
        let gram = p.mul(&self.gram)?.mul(&p.transpose())?;
        Lattice::assemble(self.name.clone(), generator, self.ambient.clone(), gram)
    }

    /// Checks the even unimodular positive definite invariants.
    pub fn ensure_even_unimodular(&self) -> Result<(), LatticeError> {
        let fail = |reason: String| LatticeError::NotEvenUnimodular { name: self.name.clone(), reason };
        if !self.is_even() {
            return Err(fail("odd diagonal entry".into()));
        }
        let det = self.determinant();
        if det != BigInt::from(1) {
            return Err(fail(format!("determinant {det}")));
        }
        if let Err(e) = ldl_rational(&self.gram.to_rational()) {
            return Err(fail(e.to_string()));
        }
        Ok(())
    }

    /// Content hash identifying this lattice with this basis.
    ///
    /// Covers the rank, the Gram matrix and the shell counts up to norm 4.
    /// Shell counts alone do not separate lattices (E8⊕E8 and D16+ share
    /// all of them), so the Gram matrix is included; two bases of one
    /// lattice may therefore get different fingerprints, which only costs
    /// cache misses.
    pub fn fingerprint(&self) -> &str {
        self.fingerprint.get_or_init(|| crate::enumeration::fingerprint(self))
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (rank {})", self.name, self.rank())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_generator_computes_gram() {
        let b = RatMatrix::from_fractions(&[[(1, 1), (0, 1)], [(1, 2), (1, 2)]]);
        let form = IntMatrix::from_rows(&[[2, 0], [0, 2]]);
        let l = Lattice::from_generator("t", b, form).unwrap();
        assert_eq!(l.gram(), &IntMatrix::from_rows(&[[2, 1], [1, 1]]));
    }

    #[test]
    fn non_integral_gram_rejected() {
        let b = RatMatrix::from_fractions(&[[(1, 2), (0, 1)], [(0, 1), (1, 1)]]);
        assert_eq!(
            Lattice::from_generator("t", b, IntMatrix::identity(2)).unwrap_err(),
            LatticeError::NotIntegral
        );
    }

    #[test]
    fn permuted_and_reduced_preserve_determinant() {
        let l = Lattice::from_gram("t", IntMatrix::from_rows(&[[2, 1, 0], [1, 4, 1], [0, 1, 6]])).unwrap();
        let p = l.permuted(&[2, 0, 1]).unwrap();
        assert_eq!(p.gram().get(0, 0), &BigInt::from(6));
        assert_eq!(p.determinant(), l.determinant());
        assert_eq!(l.reduced().unwrap().determinant(), l.determinant());
    }

    #[test]
    fn rank_zero() {
        let z = Lattice::zero();
        assert_eq!(z.rank(), 0);
        assert_eq!(z.determinant(), BigInt::from(1));
    }
}
