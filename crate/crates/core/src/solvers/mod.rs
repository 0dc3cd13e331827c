//! Top-level drivers, the gluttonous baseline, exact oracles and the parameter certificate.

pub mod certificate;
pub mod exact;
pub mod gluttonous;
pub mod main_alg;
pub mod steiner_tree;

pub use certificate::{verify_parameters, CertificateTable};
pub use exact::{exact_opt, steiner_tree_opt};
pub use gluttonous::gluttonous;
pub use main_alg::{solve_main, Choice, MainOutcome, MainParameters, SolveReport};
pub use steiner_tree::{default_tree_beta, solve_steiner_tree, SteinerTreeOutcome};
