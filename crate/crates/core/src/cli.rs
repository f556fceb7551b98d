//! Operator entry points: run a task, run a benchmark pack, calibrate a
//! device profile, validate a dataset directory, and replay episodes.
//!
//! Exit codes: 0 success, 1 semantic failure (task failed, replay diverged,
//! validation found violations), 2 usage/config error.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::arm::calibration::fit_calibration;
use crate::arm::profile::{Correspondence, DeviceProfile};
use crate::bench::runner::{run_benchmark, run_single, AgentKind, BenchConfig};
use crate::bench::task::{load_task_pack, TaskPack};
use crate::blob::BlobStore;
use crate::dataset::replay::{replay_episode, ReplayOutcome};
use crate::dataset::validate::validate_file;
use crate::dataset::EpisodeFile;
use crate::geom::{PxPoint, ScreenDims};
use crate::sim::env::Environment;
use crate::sim::pack::{load_pack, ScreenPack};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "taprig",
    about = "Vision-only smartphone operation through a simulated single-contact arm",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Task pack file (JSON).
    #[arg(long)]
    pub pack: PathBuf,
    /// Agent: scripted | random | policy_service.
    #[arg(long, default_value = "scripted")]
    pub agent: String,
    /// Environment: `sim` (screen pack from the task pack) or
    /// `sim:<screens.json>` or `live`.
    #[arg(long, default_value = "sim")]
    pub env: String,
    /// Device profile (JSON); defaults to the pack's declared profile.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-task step budget (default: 3x golden steps, min 10).
    #[arg(long)]
    pub budget: Option<u32>,
    /// Parallel sim environments for bench runs.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a single task and persist its episode.
    Run {
        /// Task id inside the pack.
        #[arg(long)]
        task: String,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Run every task in a pack and write the metrics report.
    Bench {
        #[command(flatten)]
        args: RunArgs,
    },
    /// Fit a device profile from a correspondence points file.
    Calibrate {
        /// JSON file: {"points": [{"pixel": [x, y], "workspace": [X, Y]}...],
        ///             "dims": {...}, "z_contact": .., "z_hover": ..,
        ///             "workspace": {...}, "device_id": ".."}
        #[arg(long)]
        points: PathBuf,
        /// Output device profile path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate a dataset directory (episodes + blobs).
    Validate {
        /// Dataset directory containing episodes/ and blobs/.
        dir: PathBuf,
    },
    /// Replay an episode's hardware actions and check screen fidelity.
    Replay {
        /// Episode file.
        episode: PathBuf,
        /// Task pack the episode was recorded against.
        #[arg(long)]
        pack: PathBuf,
        /// Screen pack override (defaults to the task pack's).
        #[arg(long)]
        screens: Option<PathBuf>,
        /// Device profile override.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
}

fn fail_usage(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn parse_agent(s: &str) -> Result<AgentKind, String> {
    match s {
        "scripted" => Ok(AgentKind::Scripted),
        "random" => Ok(AgentKind::Random),
        "policy_service" => Ok(AgentKind::PolicyService),
        other => Err(format!(
            "unknown agent `{other}`; expected scripted | random | policy_service"
        )),
    }
}

/// Resolve screen pack + profile for a task pack, honoring `--env` and
/// `--profile` overrides. Paths declared inside the pack are relative to
/// the pack file.
fn resolve_world(
    pack_path: &Path,
    pack: &TaskPack,
    env: &str,
    profile_flag: &Option<PathBuf>,
) -> Result<(Arc<ScreenPack>, DeviceProfile), String> {
    let base = pack_path.parent().unwrap_or(Path::new("."));
    let screens_path = match env {
        "sim" => pack
            .screen_pack
            .as_ref()
            .map(|p| base.join(p))
            .ok_or("task pack declares no screen_pack; pass --env sim:<screens.json>")?,
        "live" => {
            return Err(
                "live mode requires a configured arm executor; none is bundled".to_string()
            )
        }
        other => match other.strip_prefix("sim:") {
            Some(path) => PathBuf::from(path),
            None => return Err(format!("unknown env `{other}`; expected sim, sim:<path>, live")),
        },
    };
    let screens = load_pack(&screens_path).map_err(|e| e.to_string())?;
    let profile_path = match profile_flag {
        Some(p) => p.clone(),
        None => pack
            .device_profile
            .as_ref()
            .map(|p| base.join(p))
            .ok_or("task pack declares no device_profile; pass --profile")?,
    };
    let profile = DeviceProfile::load(&profile_path).map_err(|e| e.to_string())?;
    Ok((screens, profile))
}

fn cmd_run(task: &str, args: &RunArgs) -> i32 {
    let agent = match parse_agent(&args.agent) {
        Ok(a) => a,
        Err(e) => return fail_usage(e),
    };
    if args.budget == Some(0) {
        return fail_usage("budget must be at least 1");
    }
    let pack = match load_task_pack(&args.pack) {
        Ok(p) => p,
        Err(e) => return fail_usage(e),
    };
    let (screens, profile) = match resolve_world(&args.pack, &pack, &args.env, &args.profile) {
        Ok(w) => w,
        Err(e) => return fail_usage(e),
    };
    let cfg = BenchConfig {
        agent,
        seed: args.seed,
        budget: args.budget,
        jobs: 1,
        out_dir: args.out.clone(),
    };
    match run_single(task, &pack, screens, &profile, &cfg) {
        Ok((outcome, path)) => {
            println!("episode: {}", path.display());
            println!(
                "task {}: success={} steps={}/{}",
                outcome.task_id,
                outcome.success,
                outcome.agent_steps_successful,
                outcome.agent_steps_total
            );
            if outcome.success {
                EXIT_OK
            } else {
                EXIT_FAILURE
            }
        }
        Err(crate::bench::BenchError::UnknownTask(id)) => fail_usage(format!("unknown task id `{id}`")),
        Err(e) => fail_usage(e),
    }
}

fn cmd_bench(args: &RunArgs) -> i32 {
    let agent = match parse_agent(&args.agent) {
        Ok(a) => a,
        Err(e) => return fail_usage(e),
    };
    if args.budget == Some(0) {
        return fail_usage("budget must be at least 1");
    }
    let pack = match load_task_pack(&args.pack) {
        Ok(p) => p,
        Err(e) => return fail_usage(e),
    };
    let (screens, profile) = match resolve_world(&args.pack, &pack, &args.env, &args.profile) {
        Ok(w) => w,
        Err(e) => return fail_usage(e),
    };
    let cfg = BenchConfig {
        agent,
        seed: args.seed,
        budget: args.budget,
        jobs: args.jobs,
        out_dir: args.out.clone(),
    };
    match run_benchmark(&pack, screens, &profile, &cfg) {
        Ok(output) => {
            print!("{}", output.report.to_text());
            println!("report: {}", args.out.join("report.json").display());
            // A completed run exits 0 regardless of the measured SR.
            EXIT_OK
        }
        Err(e) => fail_usage(e),
    }
}

#[derive(Debug, serde::Deserialize)]
struct PointsFile {
    device_id: String,
    dims: ScreenDims,
    workspace: crate::arm::calibration::WorkspaceBounds,
    z_contact: f64,
    z_hover: f64,
    points: Vec<Correspondence>,
}

fn cmd_calibrate(points: &Path, out: &Path) -> i32 {
    let raw = match std::fs::read_to_string(points) {
        Ok(r) => r,
        Err(e) => return fail_usage(format!("cannot read points file: {e}")),
    };
    let parsed: PointsFile = match serde_json::from_str(&raw) {
        Ok(p) => p,
        Err(e) => return fail_usage(format!("points file malformed: {e}")),
    };
    let pairs: Vec<(PxPoint, crate::arm::calibration::WsPoint)> = parsed
        .points
        .iter()
        .map(|c| {
            (
                PxPoint::new(c.pixel[0], c.pixel[1]),
                crate::arm::calibration::WsPoint::new(c.workspace[0], c.workspace[1]),
            )
        })
        .collect();
    let map = match fit_calibration(&pairs, parsed.z_contact, parsed.z_hover) {
        Ok(m) => m,
        Err(e) => return fail_usage(e),
    };
    let profile = DeviceProfile {
        profile_version: 1,
        device_id: parsed.device_id,
        dims: parsed.dims,
        workspace: parsed.workspace,
        z_contact: parsed.z_contact,
        z_hover: parsed.z_hover,
        correspondences: parsed.points,
    };
    if let Err(e) = profile.save(out) {
        return fail_usage(e);
    }
    println!(
        "calibrated {}: residual {:.6} mm -> {}",
        profile.device_id,
        map.residual,
        out.display()
    );
    EXIT_OK
}

fn cmd_validate(dir: &Path) -> i32 {
    let episodes_dir = dir.join("episodes");
    let blob_dir = dir.join("blobs");
    if !episodes_dir.is_dir() {
        return fail_usage(format!("{} has no episodes/ directory", dir.display()));
    }
    let blobs = if blob_dir.is_dir() {
        match BlobStore::open(&blob_dir) {
            Ok(b) => Some(b),
            Err(e) => return fail_usage(e),
        }
    } else {
        None
    };
    let mut entries: Vec<PathBuf> = match std::fs::read_dir(&episodes_dir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().map(|x| x == "json").unwrap_or(false))
            .collect(),
        Err(e) => return fail_usage(e),
    };
    entries.sort();
    if entries.is_empty() {
        return fail_usage("no episode files found");
    }
    let mut total_violations = 0usize;
    for path in &entries {
        match validate_file(path, blobs.as_ref()) {
            Ok(violations) => {
                for v in &violations {
                    println!("{}: {}", path.display(), v);
                }
                total_violations += violations.len();
            }
            Err(e) => return fail_usage(format!("{}: {e}", path.display())),
        }
    }
    println!(
        "validated {} episodes: {} violations",
        entries.len(),
        total_violations
    );
    if total_violations == 0 {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

fn cmd_replay(
    episode: &Path,
    pack_path: &Path,
    screens_flag: &Option<PathBuf>,
    profile_flag: &Option<PathBuf>,
) -> i32 {
    let file = match EpisodeFile::load(episode) {
        Ok(f) => f,
        Err(e) => return fail_usage(e),
    };
    let pack = match load_task_pack(pack_path) {
        Ok(p) => p,
        Err(e) => return fail_usage(e),
    };
    let task = match pack.task(&file.metadata.task_id) {
        Some(t) => t.clone(),
        None => {
            return fail_usage(format!(
                "episode's task `{}` not found in the pack",
                file.metadata.task_id
            ))
        }
    };
    let env_arg = match screens_flag {
        Some(p) => format!("sim:{}", p.display()),
        None => "sim".to_string(),
    };
    let (screens, profile) = match resolve_world(pack_path, &pack, &env_arg, profile_flag) {
        Ok(w) => w,
        Err(e) => return fail_usage(e),
    };
    let planner = match profile.planner() {
        Ok(p) => p,
        Err(e) => return fail_usage(e),
    };
    let mut env = Environment::new(screens);
    match replay_episode(&file, &task, &mut env, &planner) {
        Ok(ReplayOutcome::Match { steps }) => {
            println!("replay ok: {steps} steps reproduce the recorded screens");
            EXIT_OK
        }
        Ok(ReplayOutcome::Divergence { step, expected, actual }) => {
            eprintln!("replay diverged at step {step}: expected {expected}, observed {actual}");
            EXIT_FAILURE
        }
        Err(e) => fail_usage(e),
    }
}

/// Dispatch a parsed command line; returns the process exit code.
pub fn dispatch(cli: Cli) -> i32 {
    match &cli.command {
        Command::Run { task, args } => cmd_run(task, args),
        Command::Bench { args } => cmd_bench(args),
        Command::Calibrate { points, out } => cmd_calibrate(points, out),
        Command::Validate { dir } => cmd_validate(dir),
        Command::Replay {
            episode,
            pack,
            screens,
            profile,
        } => cmd_replay(episode, pack, screens, profile),
    }
}
