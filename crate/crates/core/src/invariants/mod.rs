//! Independent oracles for the factoring pipeline.

mod alexander;
mod diagram;
mod laurent;

pub use alexander::{alexander, burau_closure_determinant, AlexanderError};
pub use diagram::{is_reducible_diagram, DiagramError, DiagramGraph};
pub use laurent::LaurentPoly;
