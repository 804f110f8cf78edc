//! Lie-closure construction, membership certificates, proof-chain replays
//! and the model-space and product algebras.

pub mod chains;
pub mod closure;
pub mod membership;
pub mod model;
pub mod product;

pub use chains::{replay_lemma_chain, ChainReport};
pub use closure::{build_closure, standard_generators, BracketTree, ClosureConfig, LieClosureBasis};
pub use membership::{check_membership, MembershipCertificate, MembershipContext, MembershipStatus};
pub use model::{model_bracket, model_generation, LaurentPoly2, ModelSpace};
