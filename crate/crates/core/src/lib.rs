//! Exact finite probability built around logically independent
//! families of σ-algebras: families in which every choice of one
//! nontrivial member per algebra has nonempty intersection.
//!
//! That structural property is what lets prescribed per-factor
//! marginals extend to a single measure making the family independent,
//! and the crate is organized around verifying both directions:
//!
//! * [`space`] has finite sample spaces, events, and partition
//!   σ-algebras.
//! * [`measure`] has exact rational measures on atoms.
//! * [`independence`] checks logical and probabilistic independence,
//!   returning witnesses that can be re-verified from the outside.
//! * [`extension`] builds the extension measure from factor marginals
//!   and verifies its additivity and uniqueness through the cylinder
//!   semi-ring.
//! * [`signed`] extends the independence notion to signed measures via
//!   Jordan decomposition.
//! * [`limit`] runs seeded long-run simulations whose side conditions
//!   are certified in exact arithmetic first.
//! * [`testkit`] has deterministic generators for randomized tests.
//!
//! Probabilities are `BigRational` throughout; floating point enters
//! only at the simulation boundary in [`limit`].

mod bits;
pub mod extension;
pub mod independence;
pub mod limit;
pub mod measure;
pub mod signed;
pub mod space;
pub mod testkit;

pub use bits::MAX_ATOMS;
pub use extension::{
    verify_finite_additivity, verify_uniqueness, CylinderEvent, ExtensionMeasure, FactorMeasure,
    IndependentFamily,
};
pub use independence::{
    check_logical_independence, check_logical_independence_bruteforce,
    check_probabilistic_independence, check_sigma_logical_independence, IndependenceVerdict,
    Witness,
};
pub use measure::{ratio, AtomMeasure, EventProbability, MeasureError};
pub use signed::{check_independence_signed, check_uniform_independence, jordan_decompose, SignedMeasure};
pub use space::{EventSet, FiniteSpace, SigmaAlgebra, SpaceError};
