//! Compile generalized quantum measurements (POVMs) on a `d`-level system
//! into one-dimensional coined quantum walks, and simulate them.
//!
//! A walk program is a list of position-dependent coin layers, each usually
//! followed by the conditional shift (coin `|0⟩` steps up, `|1⟩` steps down,
//! anything else stays put). Measuring the walker position at the end
//! implements a POVM on the initial coin state. [`synthesis`] and
//! [`alt_synthesis`] build such programs from a target POVM; [`walk`]
//! simulates them and extracts the measurement they actually realize.
//!
//! ```
//! use qwalk::{povm::Povm, decompose_rank1, synthesize, walk::induced_povm};
//! use qwalk::linalg::{basis_ket, outer};
//!
//! let e0 = basis_ket(2, 0);
//! let e1 = basis_ket(2, 1);
//! let p = Povm::new(vec![outer(&e0, &e0), outer(&e1, &e1)]).unwrap();
//! let r = decompose_rank1(&p, 1e-10).unwrap();
//! let (program, _) = synthesize(&r, 1e-10).unwrap();
//! assert_eq!(program.layer_count(), 2);
//! let omega = induced_povm(&program).unwrap();
//! assert!((omega.element(2)[(0, 0)].re - 1.0).abs() < 1e-12);
//! ```

// `!(x > y)` is used on purpose so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alt_synthesis;
pub mod error;
pub mod linalg;
pub mod povm;
pub mod program;
pub mod random;
pub mod sic;
pub mod synthesis;
pub mod walk;

pub use alt_synthesis::{synthesize_alt, AltTrace};
pub use error::{Error, Result};
pub use povm::{born_probabilities, decompose_rank1, Povm, Rank1Povm};
pub use program::{CoinLayer, WalkProgram};
pub use synthesis::{extend_post_measurement, synthesize, SynthesisTrace};
pub use walk::{conditional_state, induced_povm, run, sample, InducedPovm, WalkState};

/// Guide chapters under `book/src` (all but the CLI one), compiled as doc-tests so the snippets
/// there cannot drift from the library.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/walks.md")]
    pub struct Walks;
    #[doc = include_str!("../../../book/src/povms.md")]
    pub struct Povms;
    #[doc = include_str!("../../../book/src/main-algorithm.md")]
    pub struct MainAlgorithm;
    #[doc = include_str!("../../../book/src/post-measurement.md")]
    pub struct PostMeasurement;
    #[doc = include_str!("../../../book/src/alternative-algorithm.md")]
    pub struct AlternativeAlgorithm;
    #[doc = include_str!("../../../book/src/sic.md")]
    pub struct Sic;
}
