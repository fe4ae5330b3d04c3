//! Positive braided templates, their periodic orbits as positive braid knots,
//! and the prime factorization of those knots.
//!
//! The modules build on each other bottom-up:
//!
//! - [`braid`]: positive braid words, closure permutations, permutation braids
//! - [`factor`]: prime factorization by nugatory-crossing removal and
//!   factoring circles around the braid axis
//! - [`invariants`]: Alexander polynomial and diagram cut points, used as
//!   independent checks on the factorizer
//! - [`template`]: the combinatorial template model and the prime-factor bound
//! - [`orbit`]: periodic orbit enumeration, orbit braids and the census
//! - [`verify`]: invariant suites over a finished census

pub mod braid;
pub mod factor;
pub mod invariants;
pub mod orbit;
pub mod template;
pub mod verify;

pub use braid::{
    half_twist_word, parse_braid, positive_sort_braid, BraidWord, ClosureInfo, Permutation,
};
pub use factor::{factorize, factorize_nonsplit, Factorization, SplitPoint};
pub use invariants::{alexander, is_reducible_diagram, LaurentPoly};
pub use orbit::{census, enumerate_orbits, orbit_braid, Census, OrbitRecord, OrbitWord};
pub use template::{parse_template, Template, TemplateStats};
pub use verify::{verify_census, VerifyReport};
