//! Benchmark harness: task packs, metrics, and the runner that executes a
//! pack and aggregates a report.

pub mod metrics;
pub mod runner;
pub mod task;

pub use metrics::{
    aggregate, completion_rate, step_efficiency, success_rate, MetricsError, MetricsReport,
    SubsetRow, SuccessRate, TaskOutcome,
};
pub use runner::{judge_outcome, run_benchmark, AgentKind, BenchConfig, BenchRunOutput, GoldenReplay};
pub use task::{
    load_task_pack, parse_task_pack, Category, Level, Origin, TaskError, TaskPack, TaskSet,
    TaskSpec,
};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Task(#[from] task::TaskError),
    #[error(transparent)]
    Metrics(#[from] metrics::MetricsError),
    #[error(transparent)]
    Pack(#[from] crate::sim::pack::PackError),
    #[error(transparent)]
    Arm(#[from] crate::arm::ArmError),
    #[error(transparent)]
    Blob(#[from] crate::blob::BlobError),
    #[error("scripted agent requires a golden trajectory for task `{0}`")]
    ScriptedNeedsGolden(String),
    #[error("bench io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unknown task id `{0}`")]
    UnknownTask(String),
    #[error("step budget must be at least 1")]
    ZeroBudget,
}
