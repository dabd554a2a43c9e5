//! Observation spaces, signed groundings and their quantum sources.
//!
//! The crate is organized bottom-up:
//!
//! - [`field`]: exact and approximate number systems;
//! - [`algebra`]: sample spaces, partitions, partial distributions and the
//!   consistency check;
//! - [`grounding`]: the linear system of a grounding problem, its affine
//!   solution set, nonnegative feasibility with certificates, vertices,
//!   symmetry and signed moments;
//! - [`quantum`]: states, observables, the product construction and the
//!   exact example spaces in [`fixtures`];
//! - [`ks`]: rigid selections on measurement frames;
//! - [`wigner`]: phase-space densities, line marginals and reconstruction.
//!
//! ```
//! use obspace::fixtures;
//! use obspace::grounding::{assemble_system, solve_affine};
//! use obspace::field::{OrderedField, Rational};
//!
//! let os = fixtures::piponi::<Rational>();
//! let set = solve_affine(&assemble_system(&os).unwrap()).unwrap();
//! assert_eq!(set.dim(), 0);
//! assert_eq!(set.particular[0], Rational::from_ratio(-1, 2));
//! ```

pub mod algebra;
pub mod error;
pub mod field;
pub mod grounding;
pub mod ks;
pub mod quantum;
pub mod wigner;

pub use error::Error;
pub use quantum::fixtures;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/observation-spaces.md")]
    mod observation_spaces {}
    #[doc = include_str!("../../../book/src/grounding.md")]
    mod grounding {}
    #[doc = include_str!("../../../book/src/quantum.md")]
    mod quantum {}
    #[doc = include_str!("../../../book/src/ks.md")]
    mod ks {}
    #[doc = include_str!("../../../book/src/wigner.md")]
    mod wigner {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
