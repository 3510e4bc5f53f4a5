//! Koszul modules `W(V, K)` over exact fields.
//!
//! For `K ⊆ ∧^2 V` the Koszul module is the middle homology of
//! `K ⊗ S → V ⊗ S(1) → S(2)` with `S = Sym V`. This crate computes its
//! Hilbert function by exact sparse elimination over `Q` or `GF(p)`, tests
//! linear resonance components for isotropy and separability, builds the
//! Orlik–Solomon data of hyperplane arrangements, and runs seeded
//! generic-vanishing experiments.
//!
//! ```
//! use koszul::field::PrimeField;
//! use koszul::koszul::{dim_wq, ProblemFile};
//!
//! let text = r#"{"n": 4, "K_perp_basis": [[1,0,0,0,0,0], [0,1,0,0,1,0]]}"#;
//! let p = ProblemFile::from_json(text)?.build(PrimeField::new(32003)?)?;
//! assert_eq!(dim_wq(&p, 3, true)?, 8);
//! # Ok::<(), koszul::Error>(())
//! ```

pub mod arrangements;
pub mod error;
pub mod exactalg;
pub mod experiments;
pub mod field;
pub mod koszul;
pub mod multilinear;
pub mod resonance;

pub use arrangements::{Arrangement, Flat2, Graph, Multinet, ValidationReport};
pub use error::{Error, Result};
pub use exactalg::{Matrix, SubspaceBasis};
pub use experiments::{TrialReport, TrialSpec};
pub use field::{Field, FieldScalar, FieldTag, PrimeField, Rationals};
pub use koszul::{BaseLocus, HilbertTable, KoszulProblem};
pub use multilinear::{ExteriorBasis, MonomialBasis};
pub use resonance::ResonanceComponent;
