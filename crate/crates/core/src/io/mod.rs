//! Study-table ingestion, analysis configuration and report rendering.

pub mod format;
pub mod ingest;
pub mod report;
pub mod single;

pub use ingest::{ingest_csv, ingest_reader, ingest_str};
pub use report::{build_report, AnalysisConfig, GRule, MethodChoice, OutputFormat, Report};
pub use single::{SingleStudyInput, SingleStudyReport};
