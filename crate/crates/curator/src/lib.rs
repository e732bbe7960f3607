//! Web data curation pipeline on top of `curator-core`: manifests and
//! search backends, caption memory, step plans, the pipeline stages, step
//! reports and the bundled fixture corpus. The `curator` binary is a thin
//! CLI over [`pipeline`].

pub mod checkpoint;
pub mod error;
pub mod fixture;
pub mod io;
pub mod pipeline;
pub mod plan;
pub mod report;
pub mod websource;

pub use error::{CuratorError, Result};
