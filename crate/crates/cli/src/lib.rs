//! Ingestion, instance generation, run pipelines and JSON reports for the
//! `dirspan` command-line tool.

pub mod format;
pub mod generate;
pub mod report;
pub mod run;
