//! Dirichlet characters modulo T^M, their L-polynomials and unitarized
//! zeros, and numerical checks of the spectral identities they satisfy.

mod character;
mod checks;
mod group;
mod lfunc;

pub use character::{CharacterFamily, DirichletCharacter, FamilyCounts, ResidueWeights};
pub use checks::{
    character_sum_decay, class_function_weights, explicit_formula_check, explicit_formula_residual,
    family_delta, family_delta_matrix, prime_power_weights, schur_of_zeros_check,
    schur_of_zeros_residual, short_interval_identity_check, DeltaMatrix, ShortIntervalCheck,
};
pub use group::{Residues, UnitGroupDecomposition};
pub use lfunc::{l_polynomial, l_polynomial_with, polynomial_roots, LFunctionData, ZERO_TOL};

use crate::error::Result;
use crate::ffpoly::FieldSpec;

/// All characters modulo T^M, with the classification counts verified.
pub fn characters(q: u32, m: usize) -> Result<CharacterFamily> {
    CharacterFamily::new(FieldSpec::new(q)?, m)
}

/// The decomposition of (F_q[T]/T^M)^*.
pub fn unit_group(q: u32, m: usize) -> Result<UnitGroupDecomposition> {
    UnitGroupDecomposition::new(FieldSpec::new(q)?, m)
}
