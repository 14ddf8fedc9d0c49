//! Polarization of light launched by a linear dipole into the fundamental
//! HE₁₁ mode of an optical nanofibre.
//!
//! A dipole lying on the fibre surface couples to the two quasi-linear HE₁₁
//! modes through different field components: its transverse part drives the
//! mode polarized across the fibre, its longitudinal part drives the
//! orthogonal mode through that mode's longitudinal field. Because the
//! longitudinal field of a strongly confined mode is in phase quadrature with
//! the transverse one, the two amplitudes are always in quadrature. The
//! dipole's tilt `θ` then sets the ellipticity of the guided light and its
//! azimuthal position `α` sets the ellipse orientation.
//!
//! ```
//! use fibrepol::{coupling, mode};
//!
//! let spec = mode::FiberSpec::nanofiber_637();
//! let he11 = mode::solve_he11(&spec)?;
//! let theta_circ = coupling::theta_circ(&he11, 9.0);
//! assert!((theta_circ - 43.0).abs() < 1.5);
//! # Ok::<(), fibrepol::Error>(())
//! ```
//!
//! Modules:
//! - [`special`]: Bessel `Jₙ`, `Kₙ` and derivatives.
//! - [`mode`]: HE₁₁ eigenvalue solver and field profiles.
//! - [`coupling`]: dipole projection, guided Jones vector, `θ_circ`, Poincaré map.
//! - [`polarimetry`]: Jones/Stokes/ellipse conversions and birefringence compensation.
//! - [`scatterer`]: nanorod polarizability, Malus law and fit.
//! - [`cli`]: command-line front end and its configuration format.

pub mod cli;
pub mod coupling;
pub mod error;
pub mod mode;
pub mod polarimetry;
pub mod roots;
pub mod scatterer;
pub mod simplex;
pub mod special;

pub use error::{Error, Result};

/// Chapters of the guide in `book/`, compiled here so their snippets run as doctests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/modes.md")]
    pub mod modes {}
    #[doc = include_str!("../../../book/src/coupling.md")]
    pub mod coupling {}
    #[doc = include_str!("../../../book/src/polarimetry.md")]
    pub mod polarimetry {}
    #[doc = include_str!("../../../book/src/nanorod.md")]
    pub mod nanorod {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
