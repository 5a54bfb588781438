//! Rotation numbers and phase-lock areas of the overdamped Josephson junction
//! model `φ' = −sin φ + B + A cos ωt`, together with the linear system whose
//! monodromy detects adjacency points and the Painlevé 3 Bessel solutions that
//! generate them.

pub mod adjacency;
pub mod error;
pub mod lax;
pub mod linalg;
pub mod monodromy;
pub mod odeint;
pub mod painleve;
mod roots;
pub mod rotation;
pub mod specfun;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/odeint.md")]
    mod odeint {}
    #[doc = include_str!("../../../book/src/specfun.md")]
    mod specfun {}
    #[doc = include_str!("../../../book/src/rotation.md")]
    mod rotation {}
    #[doc = include_str!("../../../book/src/monodromy.md")]
    mod monodromy {}
    #[doc = include_str!("../../../book/src/painleve.md")]
    mod painleve {}
    #[doc = include_str!("../../../book/src/lax.md")]
    mod lax {}
    #[doc = include_str!("../../../book/src/adjacency.md")]
    mod adjacency {}
}
