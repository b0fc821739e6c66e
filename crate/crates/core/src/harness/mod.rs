//! Benchmarks and self checks.

mod bench;
mod oracle;
pub mod reference;

pub use bench::{bench, BenchResult};
pub use oracle::{
    adversarial_stream, oracle_suite, run_oracle_suite, CheckOutcome, Faults, OracleConfig, OracleReport, KDF_VECTORS,
};
