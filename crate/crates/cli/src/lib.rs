//! State files, analysis reports and batch campaigns on top of `sppt-core`.

pub mod campaign;
pub mod report;
pub mod state_file;

pub use report::{analyze, AnalysisReport};
pub use state_file::{StateFile, StateFileError};
