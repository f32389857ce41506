//! Entanglement witnesses built from local orthogonal observables (LOOs).
//!
//! The crate computes, for a bipartite density matrix, the linear witness
//! `1 - Σ_k G_k^A ⊗ G_k^B` and its nonlinear refinement at any pair of LOO
//! bases, and their exact minima over all pairs via the singular values of
//! the correlation matrix `μ` and the covariance matrix `τ`. On top of that
//! sit the PPT and realignment criteria, I-concurrence lower bounds, and
//! one-parameter family scans.
//!
//! ```
//! use loo_witness::{qstate, witness};
//!
//! let bell = qstate::bell_state();
//! let opt = witness::optimal_nonlinear_min(&bell).unwrap();
//! assert!((opt.value + 1.0).abs() < 1e-12);
//! ```

pub mod criteria;
pub mod error;
pub mod exec;
pub mod io;
pub mod linalg;
pub mod loo;
pub mod oracle;
pub mod qstate;
pub mod sample;
pub mod scan;
pub mod witness;

pub use criteria::{concurrence_lower_bounds, evaluate_all, ConcurrenceBound, Criterion, Verdict};
pub use error::{Error, Result};
pub use exec::ExecMode;
pub use loo::{LooBasis, OrthogonalRotation};
pub use qstate::{DensityMatrix, Subsystem};
pub use witness::{optimal_linear_min, optimal_nonlinear_min, CorrelationData, OptimalWitness, WitnessCertificate};
