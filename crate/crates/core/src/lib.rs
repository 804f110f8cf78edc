//! Exact and numeric Poisson calculus on conjugation-invariant trace
//! polynomials of matrix pairs, with Calogero–Moser point sampling,
//! explicit symplectic flows and Lie-closure certificates.

pub mod basis;
pub mod catalog;
pub mod cli;
pub mod coeff;
pub mod error;
pub mod flows;
pub mod generation;
pub mod numeric;
pub mod poisson;
pub mod poly;
pub mod reduce;
pub mod text;
pub mod word;

pub use coeff::CoefficientQn;
pub use error::{Result, TraceError};
pub use poly::{Mode, MonomialKey, TracePolynomial};
pub use word::{canonicalize, CyclicWord, Letter, Word};
