//! Randomized checkers and structure fits that turn structural statements
//! about quasi-states into pass/fail reports.
//!
//! Every checker is deterministic given its random generator. Checks whose
//! hypotheses do not hold (too small `n`, a discontinuous input) return a
//! skipped report carrying the reason.

mod checks;
mod fits;
mod report;

pub use checks::{
    check_ad_invariance, check_isotropic_linearity, check_quasi_linearity, isotropic_pair, FGEvaluator,
    VectorFunctional, CONJUGATION_SCALE,
};
pub use fits::{
    embed_gl, fit_gleason_on_unitary, fit_main_theorem, fit_rank_one_trace, unitary_basis, unitary_trace_oracle,
    ElementOracle, GlEmbedding, MainTheoremFit, OMEGA_MARGIN, SAMPLE_FACTOR, TRAIN_FRACTION, TRANSVERSALITY_LIMIT,
};
pub use report::{MatrixValue, Parameter, SuiteReport, Tolerance, TrialRecord, VerificationReport};
