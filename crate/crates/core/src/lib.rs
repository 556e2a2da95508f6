//! Graph-based intrusion detection on flow logs: traffic graphs, node
//! metrics, block-wise feature extraction and an RBF SVM with feature
//! selection and grid search. See `book/` for a guided tour.

pub mod derived;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod learner;
pub mod metrics;
pub mod modelsel;
pub mod pipeline;
pub mod report;
pub mod synth;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    pub struct Overview;
    #[doc = include_str!("../../../book/src/graph.md")]
    pub struct Graph;
    #[doc = include_str!("../../../book/src/metrics.md")]
    pub struct Metrics;
    #[doc = include_str!("../../../book/src/schedule.md")]
    pub struct Schedule;
    #[doc = include_str!("../../../book/src/svm.md")]
    pub struct Svm;
    #[doc = include_str!("../../../book/src/modelsel.md")]
    pub struct ModelSelection;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
