//! Benchmark task schema and task-pack loading.
//!
//! Tasks carry their golden-step count from a human-executed trajectory;
//! single-app tasks count from the app's home screen, cross-app tasks from
//! the phone's home screen. The optional golden trajectory drives the
//! scripted oracle agent.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::action::ActionSpec;
use crate::sim::env::ResetOrigin;

pub const TASK_PACK_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum TaskError {
    #[error("cannot read task pack: {0}")]
    Io(#[from] std::io::Error),
    #[error("task pack is malformed: {0}")]
    Format(String),
    #[error("unsupported task_pack_version {0}, expected {TASK_PACK_VERSION}")]
    Version(u32),
    #[error("task `{task_id}`: {message}")]
    Invariant { task_id: String, message: String },
    #[error("duplicate task id `{0}`")]
    DuplicateTask(String),
    #[error("task pack contains no tasks")]
    Empty,
}

/// Application-domain categories: the eight single-app categories plus the
/// cross-app groupings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    CommSocial,
    Lifestyle,
    NewsReading,
    ProdTools,
    SystemApps,
    TravelNav,
    MediaEntmt,
    ShopFin,
    // cross-app groupings
    GeneralTool,
    InformationManagement,
    MediaEntertainment,
    MultiApps,
    SocialSharing,
    WebShopping,
}

impl Category {
    pub fn display(&self) -> &'static str {
        match self {
            Category::CommSocial => "Comm&Social",
            Category::Lifestyle => "Lifestyle",
            Category::NewsReading => "News&Reading",
            Category::ProdTools => "Prod&Tools",
            Category::SystemApps => "SystemApps",
            Category::TravelNav => "Travel&Nav",
            Category::MediaEntmt => "Media&Entmt",
            Category::ShopFin => "Shop&Fin",
            Category::GeneralTool => "General Tool",
            Category::InformationManagement => "Information Management",
            Category::MediaEntertainment => "Media Entertainment",
            Category::MultiApps => "Multi-Apps",
            Category::SocialSharing => "Social Sharing",
            Category::WebShopping => "Web Shopping",
        }
    }
}

/// Difficulty level; single-app tasks only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Simple,
    Medium,
    Hard,
}

impl Level {
    pub fn display(&self) -> &'static str {
        match self {
            Level::Simple => "Simple",
            Level::Medium => "Medium",
            Level::Hard => "Hard",
        }
    }
}

/// Which benchmark subset a task belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskSet {
    Standard,
    Challenging,
    CrossApp,
}

impl TaskSet {
    pub fn display(&self) -> &'static str {
        match self {
            TaskSet::Standard => "Standard",
            TaskSet::Challenging => "Challenging",
            TaskSet::CrossApp => "Cross-App",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    AppHome,
    PhoneHome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub task_id: String,
    pub category: Category,
    #[serde(default)]
    pub level: Option<Level>,
    pub apps: Vec<String>,
    pub set: TaskSet,
    pub instruction: String,
    /// Optimal human step count, >= 1.
    pub golden_steps: u32,
    pub origin: Origin,
    /// When present, the exact optimal action sequence; drives the scripted
    /// oracle. Length must equal golden_steps.
    #[serde(default)]
    pub golden_trajectory: Option<Vec<ActionSpec>>,
}

impl TaskSpec {
    pub fn reset_origin(&self) -> ResetOrigin {
        match self.origin {
            Origin::PhoneHome => ResetOrigin::PhoneHome,
            Origin::AppHome => ResetOrigin::AppHome {
                app_id: self.apps[0].clone(),
            },
        }
    }

    fn check(&self) -> Result<(), TaskError> {
        let fail = |message: String| -> Result<(), TaskError> {
            Err(TaskError::Invariant {
                task_id: self.task_id.clone(),
                message,
            })
        };
        if self.golden_steps < 1 {
            return fail("golden_steps must be >= 1".into());
        }
        if self.apps.is_empty() {
            return fail("apps must not be empty".into());
        }
        match self.set {
            TaskSet::CrossApp => {
                if self.origin != Origin::PhoneHome {
                    return fail("cross-app tasks start at the phone home screen".into());
                }
                if self.apps.len() < 2 {
                    return fail("cross-app tasks involve at least two apps".into());
                }
                if self.level.is_some() {
                    return fail("cross-app tasks carry no difficulty level".into());
                }
            }
            TaskSet::Standard | TaskSet::Challenging => {
                if self.origin != Origin::AppHome {
                    return fail("single-app tasks start at the app home screen".into());
                }
                if self.apps.len() != 1 {
                    return fail("single-app tasks involve exactly one app".into());
                }
                if self.level.is_none() {
                    return fail("single-app tasks declare a difficulty level".into());
                }
            }
        }
        if let Some(gt) = &self.golden_trajectory {
            if gt.len() != self.golden_steps as usize {
                return fail(format!(
                    "golden_trajectory length {} != golden_steps {}",
                    gt.len(),
                    self.golden_steps
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskPack {
    pub task_pack_version: u32,
    /// Optional path (relative to this file) of the screen pack the tasks
    /// run against.
    #[serde(default)]
    pub screen_pack: Option<String>,
    /// Optional path of the matching device profile.
    #[serde(default)]
    pub device_profile: Option<String>,
    pub tasks: Vec<TaskSpec>,
}

/// Per-subset counts reported after a successful load.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackCounts {
    pub total: usize,
    pub standard: usize,
    pub challenging: usize,
    pub cross_app: usize,
}

impl TaskPack {
    pub fn counts(&self) -> PackCounts {
        let count = |set: TaskSet| self.tasks.iter().filter(|t| t.set == set).count();
        PackCounts {
            total: self.tasks.len(),
            standard: count(TaskSet::Standard),
            challenging: count(TaskSet::Challenging),
            cross_app: count(TaskSet::CrossApp),
        }
    }

    pub fn validate(&self) -> Result<(), TaskError> {
        if self.task_pack_version != TASK_PACK_VERSION {
            return Err(TaskError::Version(self.task_pack_version));
        }
        if self.tasks.is_empty() {
            return Err(TaskError::Empty);
        }
        let mut ids = HashSet::new();
        for task in &self.tasks {
            if !ids.insert(task.task_id.clone()) {
                return Err(TaskError::DuplicateTask(task.task_id.clone()));
            }
            task.check()?;
        }
        Ok(())
    }

    pub fn task(&self, id: &str) -> Option<&TaskSpec> {
        self.tasks.iter().find(|t| t.task_id == id)
    }
}

/// Load and validate a task pack file.
pub fn load_task_pack(path: impl AsRef<Path>) -> Result<TaskPack, TaskError> {
    let raw = fs::read_to_string(path)?;
    parse_task_pack(&raw)
}

pub fn parse_task_pack(raw: &str) -> Result<TaskPack, TaskError> {
    let pack: TaskPack =
        serde_json::from_str(raw).map_err(|e| TaskError::Format(e.to_string()))?;
    pack.validate()?;
    Ok(pack)
}
