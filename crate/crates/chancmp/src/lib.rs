//! One-shot comparison of quantum channels.
//!
//! Diamond norms, conditional min-entropies and their superchannel
//! variants, conversion distances between channels, measurement
//! simulability and the Le Cam deficiency of classical experiments. Every
//! quantity is compiled to a semidefinite or linear program and solved by
//! the interior-point method in [`conic`].
//!
//! Conventions: the Choi matrix of `Φ: A0 → A1` lives on `A1 ⊗ A0`
//! (output first), while elements of the dual space paired with maps live
//! on `A0 ⊗ A1` (input first). Tensor factors are always labeled, see
//! [`linalg::SystemDims`].

pub mod channels;
pub mod classical;
pub mod conic;
pub mod convert;
pub mod error;
pub mod games;
pub mod io;
pub mod linalg;
pub mod norms;
pub mod random;

pub use error::{Error, Result};
pub use linalg::{CMatrix, SystemDims, C64};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/tensors.md")]
    mod tensors {}
    #[doc = include_str!("../../../book/src/solver.md")]
    mod solver {}
    #[doc = include_str!("../../../book/src/channels.md")]
    mod channels {}
    #[doc = include_str!("../../../book/src/norms.md")]
    mod norms {}
    #[doc = include_str!("../../../book/src/conversion.md")]
    mod conversion {}
    #[doc = include_str!("../../../book/src/games.md")]
    mod games {}
    #[doc = include_str!("../../../book/src/classical.md")]
    mod classical {}
}
