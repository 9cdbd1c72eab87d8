//! Generators `X_{i,j}` (`i + j <= p - 4`) of the distribution of parameter
//! directions that keep the separatrix class fixed, and their structure.

pub mod derivation;
pub mod generators;
pub mod solver;

pub use derivation::{DerivationOnA, PlaneVectorField};
pub use solver::{solve_generator, x00_closed_form, GeneratorSolution, LeadingBlocks, SolveDiagnostics};
