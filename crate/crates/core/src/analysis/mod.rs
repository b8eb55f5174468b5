//! Theory constants, high-probability event diagnostics, anchor
//! independence checks and regression fits.

mod constants;
mod diagnostics;
mod independence;
mod regression;

pub use constants::{derive_constants, ConstantsBundle};
pub use diagnostics::{
    check_ec, check_f2, diagnose, write_diagnostics_header, write_diagnostics_row, DiagnosticReport,
    DIAGNOSTICS_HEADER,
};
pub use independence::{anchor_match_vars, check_anchor_independence, match_graph_acyclic};
pub use regression::{ols, ols_loglog, pearson, RegressionFit};
