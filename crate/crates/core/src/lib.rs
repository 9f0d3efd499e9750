//! A desk-scale numerical laboratory for detecting point configurations in
//! the supports of fractal measures on the discretized torus: uniformity
//! norms computed by independent routes, mollification ladders, multilinear
//! configuration counts, closed-form decay rates, and integer-lattice
//! brute-force counterparts.

pub mod count;
pub mod dimension;
pub mod discrete;
pub mod error;
mod fit;
pub mod gowers;
pub mod measure;
pub mod mollify;
pub mod pattern;
pub mod rates;

pub use error::{Error, Result};
pub use gowers::{Budget, Route};
pub use measure::{Density, Generator, GridMeasure, MeasureSpec, Spectrum};
pub use mollify::{MollifierLadder, Taper};
pub use pattern::Pattern;
