//! Model adapters and the runners that score them on the test suites.

mod adapter;
mod report;
mod runners;
mod subprocess;

pub use adapter::{AdapterError, FaultyOracleAdapter, FileAdapter, LengthCappedOracle, ModelAdapter, OracleAdapter};
pub use report::{EvaluationReport, ReportBody, RunMetadata, REPORT_SCHEMA_VERSION};
pub use runners::{
    run_accuracy, run_consistency, run_eos_analysis, run_length_generalisation, run_localism, run_overgeneralisation,
    AccuracyReport, ConsistencyReport, EosReport, LengthCell, LocalismReport, LocalismRow, OverallProfilePoint,
    OvergeneralisationPeak, OvergeneralisationReport, Stratification, StratumKey, StratumRow,
};
pub use subprocess::{SubprocessAdapter, DEFAULT_RESTARTS, DEFAULT_TIMEOUT};
