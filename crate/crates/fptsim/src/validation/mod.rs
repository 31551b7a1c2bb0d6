//! Statistical checks, the ε-truncation oracle and the benchmark harness.

pub mod bench;
pub mod checks;
pub mod oracle;
pub mod stats;
pub mod suite;

pub use bench::{bench, bench_point, fig2_grid, fig3_grid, write_bench_csv, BenchPoint, BenchRow};
pub use checks::{hitting_bound_check, laplace_check, HittingReport, LaplaceCheck};
pub use oracle::{bias_proxy, oracle_triplet, residual_proxy, Oracle, OracleConfig, OracleMode};
pub use stats::{ks_one_sample, ks_two_sample, KsResult};
pub use suite::{run_criterion, run_suite, Outcome, Suite, CRITERIA};
