//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! 1. Metrics exactness against printed ratios and a brute-force oracle.
//! 2. Oracle-agent soundness over the bundled pack (SR = SE = 1).
//! 3. Keyboard localization: exact on clean anchors, bounded under +/-2 px.
//! 4. Gesture template sweep across screen sizes + fallback paths.
//! 5. Calibration recovery and tap round-trip precision.
//! 6. Determinism and full-episode replay fidelity.
//! 7. Joint log-likelihood accounting.
//! 8. Dataset schema completeness under a deletion fuzzer.

use std::collections::HashMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use taprig_core::action::execute::{execute, ExecutionContext};
use taprig_core::action::keyboard::{localize_keyboard, LayoutCache};
use taprig_core::action::{ActionError, ActionSpec};
use taprig_core::agent::decision::joint_logprob;
use taprig_core::agent::history::{StepRecord, StepStatus};
use taprig_core::arm::calibration::{fit_calibration, WsPoint};
use taprig_core::bench::metrics::{
    completion_rate, step_efficiency, success_rate, TaskOutcome,
};
use taprig_core::bench::runner::{run_benchmark, AgentKind, BenchConfig};
use taprig_core::bench::task::{Category, Level, Origin, TaskSet, TaskSpec};
use taprig_core::dataset::replay::replay_episode;
use taprig_core::dataset::validate::validate_episode_json;
use taprig_core::dataset::EpisodeFile;
use taprig_core::geom::{BBox, PxPoint, ScreenDims};
use taprig_core::perception::scene::SceneGrounder;
use taprig_core::perception::{center_of, Grounder, PerceptionError};
use taprig_core::sim::env::{Environment, ScreenObservation};
use taprig_core::synthetic;

// ---------------------------------------------------------------------------
// Criterion 1: metrics exactness
// ---------------------------------------------------------------------------

/// Independent brute-force metrics oracle, coded from the definitions and
/// kept apart from the implementation under test.
mod oracle {
    pub struct Case {
        pub success: bool,
        pub astep: u32,
        pub golden: u32,
    }

    pub fn sr(cases: &[Case]) -> f64 {
        let mut s = 0u32;
        for c in cases {
            if c.success {
                s += 1;
            }
        }
        s as f64 / cases.len() as f64
    }

    /// Mean CR over not-fully-successful tasks; None when all succeeded.
    pub fn cr(cases: &[Case]) -> Option<f64> {
        let mut sum = 0.0;
        let mut n = 0u32;
        for c in cases {
            if !c.success {
                let mut v = c.astep as f64 / c.golden as f64;
                if v > 1.0 {
                    v = 1.0;
                }
                sum += v;
                n += 1;
            }
        }
        if n == 0 {
            None
        } else {
            Some(sum / n as f64)
        }
    }

    /// Mean SE over successes; None when none succeeded.
    pub fn se(cases: &[Case]) -> Option<f64> {
        let mut sum = 0.0;
        let mut n = 0u32;
        for c in cases {
            if c.success {
                sum += c.golden as f64 / c.astep as f64;
                n += 1;
            }
        }
        if n == 0 {
            None
        } else {
            Some(sum / n as f64)
        }
    }
}

fn synth_task(id: &str, golden: u32) -> TaskSpec {
    TaskSpec {
        task_id: id.into(),
        category: Category::SystemApps,
        level: Some(Level::Simple),
        apps: vec!["app".into()],
        set: TaskSet::Standard,
        instruction: String::new(),
        golden_steps: golden,
        origin: Origin::AppHome,
        golden_trajectory: None,
    }
}

#[test]
fn criterion_1_metrics_exactness() {
    let started = Instant::now();

    // Printed per-subset success counts reproduce their ratios exactly.
    let printed: [(u32, u32); 7] = [
        (11, 13),
        (5, 13),
        (1, 11),
        (23, 32),
        (18, 35),
        (3, 36),
        (2, 15),
    ];
    for (s, n) in printed {
        let outcomes: Vec<TaskOutcome> = (0..n)
            .map(|i| TaskOutcome {
                task_id: format!("t{i}"),
                success: i < s,
                agent_steps_successful: if i < s { 1 } else { 0 },
                agent_steps_total: 1,
                diagnostics: None,
            })
            .collect();
        let sr = success_rate(&outcomes).unwrap();
        assert_eq!((sr.successes, sr.total), (s, n));
        assert!(
            (sr.ratio - s as f64 / n as f64).abs() <= 1e-12,
            "{s}/{n}: got {}",
            sr.ratio
        );
    }

    // 1,000 randomized outcome sets vs the brute-force oracle.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for round in 0..1000 {
        let n = rng.gen_range(1..40usize);
        let mut cases = Vec::with_capacity(n);
        let mut tasks = Vec::with_capacity(n);
        let mut outcomes = Vec::with_capacity(n);
        for i in 0..n {
            let golden = rng.gen_range(1..15u32);
            let success: bool = rng.gen();
            let total = rng.gen_range(1..25u32);
            let astep = if success {
                total
            } else {
                rng.gen_range(0..=total)
            };
            cases.push(oracle::Case {
                success,
                astep,
                golden,
            });
            tasks.push(synth_task(&format!("t{i}"), golden));
            outcomes.push(TaskOutcome {
                task_id: format!("t{i}"),
                success,
                agent_steps_successful: astep,
                agent_steps_total: total,
                diagnostics: None,
            });
        }

        let sr = success_rate(&outcomes).unwrap();
        assert!(
            (sr.ratio - oracle::sr(&cases)).abs() <= 1e-12,
            "round {round}: SR mismatch"
        );

        let cr = completion_rate(&outcomes, &tasks).unwrap().subset;
        match (cr, oracle::cr(&cases)) {
            (None, None) => {}
            (Some(a), Some(b)) => assert!((a - b).abs() <= 1e-12, "round {round}: CR {a} vs {b}"),
            (a, b) => panic!("round {round}: CR applicability mismatch {a:?} vs {b:?}"),
        }

        let se = step_efficiency(&outcomes, &tasks).unwrap().subset;
        match (se, oracle::se(&cases)) {
            (None, None) => {}
            (Some(a), Some(b)) => assert!((a - b).abs() <= 1e-12, "round {round}: SE {a} vs {b}"),
            (a, b) => panic!("round {round}: SE applicability mismatch {a:?} vs {b:?}"),
        }
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "criterion 1 runtime {elapsed:?} >= 5 s");
    println!("ACCEPTANCE 1 (metrics exactness): PASS in {elapsed:?}");
}

// ---------------------------------------------------------------------------
// Criterion 2: oracle-agent soundness
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_oracle_agent_soundness() {
    let started = Instant::now();
    let tasks = synthetic::bundled_task_pack();
    let counts = tasks.counts();
    assert!(counts.total >= 10, "bundled pack must hold >= 10 tasks");
    let challenging = tasks
        .tasks
        .iter()
        .filter(|t| {
            t.golden_trajectory.as_ref().unwrap().iter().any(|a| {
                matches!(a, ActionSpec::Back | ActionSpec::Exit | ActionSpec::Text { .. })
            })
        })
        .count();
    assert!(challenging >= 3, "need >= 3 back/exit/text tasks, found {challenging}");

    let out = tempfile::tempdir().unwrap();
    let cfg = BenchConfig {
        agent: AgentKind::Scripted,
        seed: 1,
        budget: None,
        jobs: 1,
        out_dir: out.path().to_path_buf(),
    };
    let output = run_benchmark(
        &tasks,
        synthetic::bundled_screen_pack(),
        &synthetic::bundled_device_profile(),
        &cfg,
    )
    .unwrap();

    for (outcome, task) in output.outcomes.iter().zip({
        let mut sorted: Vec<&TaskSpec> = tasks.tasks.iter().collect();
        sorted.sort_by(|a, b| a.task_id.cmp(&b.task_id));
        sorted
    }) {
        assert!(outcome.success, "task {} failed: {:?}", outcome.task_id, outcome.diagnostics);
        assert_eq!(
            outcome.agent_steps_total, task.golden_steps,
            "task {} step count != golden steps",
            task.task_id
        );
    }
    for row in output.report.overview.iter().chain(output.report.by_category.iter()) {
        assert_eq!(row.sr.ratio, 1.0);
        assert_eq!(row.se, Some(1.0), "SE_Si must be exactly 1.0");
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "criterion 2 runtime {elapsed:?} >= 10 s");
    println!("ACCEPTANCE 2 (oracle-agent soundness): PASS in {elapsed:?}");
}

// ---------------------------------------------------------------------------
// Criterion 3: keyboard localization
// ---------------------------------------------------------------------------

/// Wraps the scene grounder, shifting the boxes returned for selected
/// single-character anchor queries by a fixed per-character offset.
struct PerturbedAnchors {
    inner: SceneGrounder,
    shifts: HashMap<char, (i32, i32)>,
}

impl Grounder for PerturbedAnchors {
    fn ground_text(
        &self,
        obs: &ScreenObservation,
        query: &str,
    ) -> Result<Vec<BBox>, PerceptionError> {
        let mut hits = self.inner.ground_text(obs, query)?;
        let mut chars = query.chars();
        if let (Some(c), None) = (chars.next(), chars.next()) {
            if let Some(&(dx, dy)) = self.shifts.get(&c) {
                for b in &mut hits {
                    *b = BBox::new(b.x_min + dx, b.y_min + dy, b.x_max + dx, b.y_max + dy);
                }
            }
        }
        Ok(hits)
    }

    fn detect_icons(
        &self,
        obs: &ScreenObservation,
    ) -> Result<Vec<taprig_core::perception::IndexedBBox>, PerceptionError> {
        self.inner.detect_icons(obs)
    }
}

#[test]
fn criterion_3_keyboard_localization() {
    let dims = ScreenDims::new(1080, 2400);
    let pack = synthetic::keyboard_probe_pack(dims);
    let kb = pack.keyboard.clone().unwrap();
    let env = Environment::new(pack);
    let obs = env.observe();

    let truth: HashMap<char, (i32, i32)> = kb
        .rows
        .iter()
        .flatten()
        .map(|k| (k.symbol, center_of(&k.bbox)))
        .collect();
    let pitch = truth[&'w'].0 - truth[&'q'].0;
    assert!(pitch > 0);

    // Clean anchors: every one of the 26 letter estimates is exact.
    let layout = localize_keyboard(&obs, &SceneGrounder, "probe").unwrap();
    for c in 'a'..='z' {
        assert_eq!(
            layout.letter_center(c),
            Some(truth[&c]),
            "letter {c} must be exact on an equal-pitch keyboard"
        );
    }

    // Perturbed anchors: +/-2 px in the worst-case sign patterns and a
    // seeded random sample; max Euclidean error stays within half a pitch.
    let half_pitch = pitch as f64 / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let anchors = ['q', 'w', 'a', 's', 'z', 'x'];
    let mut patterns: Vec<HashMap<char, (i32, i32)>> = vec![
        anchors.iter().map(|&c| (c, (-2, 2))).collect(),
        anchors
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, if i % 2 == 0 { (-2, -2) } else { (2, 2) }))
            .collect(),
        anchors
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, if i % 2 == 0 { (2, 2) } else { (-2, -2) }))
            .collect(),
    ];
    for _ in 0..40 {
        patterns.push(
            anchors
                .iter()
                .map(|&c| (c, (rng.gen_range(-2..=2), rng.gen_range(-2..=2))))
                .collect(),
        );
    }

    let mut worst: f64 = 0.0;
    for shifts in patterns {
        let grounder = PerturbedAnchors {
            inner: SceneGrounder,
            shifts,
        };
        let layout = localize_keyboard(&obs, &grounder, "probe").unwrap();
        for c in 'a'..='z' {
            let est = layout.letter_center(c).unwrap();
            let tru = truth[&c];
            let err = (((est.0 - tru.0).pow(2) + (est.1 - tru.1).pow(2)) as f64).sqrt();
            worst = worst.max(err);
            assert!(
                err <= half_pitch,
                "letter {c}: error {err:.1} px exceeds half pitch {half_pitch:.1}"
            );
        }
    }
    println!(
        "ACCEPTANCE 3 (keyboard localization): PASS (exact clean; worst perturbed error {worst:.2} px <= {half_pitch:.1})"
    );
}

// ---------------------------------------------------------------------------
// Criterion 4: gesture coverage sweep + fallback paths
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_gesture_sweep_and_fallback() {
    // 4x4 grid over {320..2160} x {480..3840}.
    let widths = [320u32, 933, 1546, 2160];
    let heights = [480u32, 1600, 2720, 3840];
    for &w in &widths {
        for &h in &heights {
            let dims = ScreenDims::new(w, h);
            let pack = synthetic::gesture_probe_pack(dims);
            let profile = synthetic::identity_profile(dims, "probe");
            let planner = profile.planner().unwrap();
            let mut layouts = LayoutCache::in_memory();

            let mut env = Environment::new(pack.clone());
            let mut ctx = ExecutionContext {
                env: &mut env,
                planner: &planner,
                grounder: &SceneGrounder,
                layouts: &mut layouts,
                device_id: "probe",
            };
            let report = execute(&ActionSpec::Back, &mut ctx).unwrap();
            assert!(!report.fallback_used, "{w}x{h}: back needed fallback");
            assert_eq!(report.outcome.to_screen, "went_back", "{w}x{h}");

            let mut env = Environment::new(pack);
            let mut ctx = ExecutionContext {
                env: &mut env,
                planner: &planner,
                grounder: &SceneGrounder,
                layouts: &mut layouts,
                device_id: "probe",
            };
            let report = execute(&ActionSpec::Exit, &mut ctx).unwrap();
            assert!(!report.fallback_used, "{w}x{h}: exit needed fallback");
            assert_eq!(report.outcome.to_screen, "went_home", "{w}x{h}");
        }
    }

    // Fallback success on a gesture-disabled screen holding a back element.
    let pack = synthetic::bundled_screen_pack();
    let planner = synthetic::bundled_device_profile().planner().unwrap();
    let mut layouts = LayoutCache::in_memory();
    let mut env = Environment::new(pack.clone());
    env.reset(&taprig_core::sim::env::ResetOrigin::AppHome { app_id: "notes".into() })
        .unwrap();
    let kb_return = center_of(&pack.keyboard.as_ref().unwrap().return_key.bbox);
    for action in [
        ActionSpec::Tap { x: 180, y: 380 },
        ActionSpec::Text { text: "x".into() },
        ActionSpec::Tap { x: kb_return.0, y: kb_return.1 },
    ] {
        let mut ctx = ExecutionContext {
            env: &mut env,
            planner: &planner,
            grounder: &SceneGrounder,
            layouts: &mut layouts,
            device_id: synthetic::DEVICE_ID,
        };
        execute(&action, &mut ctx).unwrap();
    }
    assert_eq!(env.current_screen_id(), "note_saved");
    let mut ctx = ExecutionContext {
        env: &mut env,
        planner: &planner,
        grounder: &SceneGrounder,
        layouts: &mut layouts,
        device_id: synthetic::DEVICE_ID,
    };
    let report = execute(&ActionSpec::Back, &mut ctx).unwrap();
    assert!(report.fallback_used, "gesture-disabled screen must use the fallback");
    assert_eq!(report.outcome.to_screen, "notes_home");
    assert!(matches!(
        report.hardware[0].trajectory.kind,
        taprig_core::arm::trajectory::TrajectoryKind::Swipe
    ));
    assert!(matches!(
        report.hardware[1].trajectory.kind,
        taprig_core::arm::trajectory::TrajectoryKind::Tap
    ));

    // Fallback failure with the documented error when no affordance exists.
    let mut env2 = Environment::new(pack);
    env2.reset(&taprig_core::sim::env::ResetOrigin::AppHome { app_id: "mail".into() })
        .unwrap();
    for action in [
        ActionSpec::Tap { x: 180, y: 380 },
        ActionSpec::Text { text: "x".into() },
        ActionSpec::Tap { x: kb_return.0, y: kb_return.1 },
    ] {
        let mut ctx = ExecutionContext {
            env: &mut env2,
            planner: &planner,
            grounder: &SceneGrounder,
            layouts: &mut layouts,
            device_id: synthetic::DEVICE_ID,
        };
        execute(&action, &mut ctx).unwrap();
    }
    assert_eq!(env2.current_screen_id(), "mail_sent");
    let mut ctx = ExecutionContext {
        env: &mut env2,
        planner: &planner,
        grounder: &SceneGrounder,
        layouts: &mut layouts,
        device_id: synthetic::DEVICE_ID,
    };
    let err = execute(&ActionSpec::Back, &mut ctx).unwrap_err();
    assert!(
        matches!(err, ActionError::FallbackNotFound { .. }),
        "expected FallbackNotFound, got {err}"
    );

    println!("ACCEPTANCE 4 (gesture sweep + fallback): PASS (16 grid points)");
}

// ---------------------------------------------------------------------------
// Criterion 5: calibration
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_calibration_recovery_and_roundtrip() {
    // Exactly-affine 5-point data: recover with residual <= 1e-6 mm.
    let affine = [0.21, -0.013, 4.2, 0.017, 0.198, -2.5];
    let apply = |p: PxPoint| WsPoint {
        x: affine[0] * p.x + affine[1] * p.y + affine[2],
        y: affine[3] * p.x + affine[4] * p.y + affine[5],
    };
    let pixels = [
        PxPoint::new(0.0, 0.0),
        PxPoint::new(1080.0, 0.0),
        PxPoint::new(0.0, 2400.0),
        PxPoint::new(1080.0, 2400.0),
        PxPoint::new(540.0, 1200.0),
    ];
    let corr: Vec<(PxPoint, WsPoint)> = pixels.iter().map(|&p| (p, apply(p))).collect();
    let map = fit_calibration(&corr, 1.0, 9.0).unwrap();
    assert!(map.residual <= 1e-6, "residual {} mm", map.residual);
    for (a, e) in map.affine.iter().zip(affine) {
        assert!((a - e).abs() <= 1e-9, "affine {:?} vs {affine:?}", map.affine);
    }

    // Round trip plan_tap -> trace_of for 100 random in-bounds pixels.
    let bounds = taprig_core::arm::calibration::WorkspaceBounds {
        x_min: -1000.0,
        x_max: 1000.0,
        y_min: -1000.0,
        y_max: 1000.0,
    };
    let planner = taprig_core::arm::trajectory::TouchPlanner::new(map, bounds);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = PxPoint::new(rng.gen_range(0.0..1080.0), rng.gen_range(0.0..2400.0));
        let traj = planner.plan_tap(p).unwrap();
        let trace = planner.trace_of(&traj).unwrap();
        let contacts: Vec<_> = trace.contact_samples().collect();
        assert!(!contacts.is_empty());
        for s in contacts {
            let err = s.point.dist(&p);
            worst = worst.max(err);
            assert!(err <= 1e-6, "round-trip error {err} px at {p:?}");
        }
    }
    println!("ACCEPTANCE 5 (calibration): PASS (worst round-trip {worst:.2e} px)");
}

// ---------------------------------------------------------------------------
// Criterion 6: determinism & replay
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_determinism_and_replay() {
    let tasks = synthetic::bundled_task_pack();
    let pack = synthetic::bundled_screen_pack();
    let profile = synthetic::bundled_device_profile();

    for agent in [AgentKind::Scripted, AgentKind::Random] {
        let run = |dir: &std::path::Path| {
            let cfg = BenchConfig {
                agent,
                seed: 1234,
                budget: Some(6),
                jobs: 1,
                out_dir: dir.to_path_buf(),
            };
            run_benchmark(&tasks, pack.clone(), &profile, &cfg).unwrap()
        };
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        run(a.path());
        run(b.path());
        for task in &tasks.tasks {
            let rel = format!("episodes/{}.json", task.task_id);
            let fa = std::fs::read(a.path().join(&rel)).unwrap();
            let fb = std::fs::read(b.path().join(&rel)).unwrap();
            assert_eq!(fa, fb, "{rel} not byte-identical across identical runs");
        }

        // Replay every recorded episode: identical screen sequence.
        let planner = profile.planner().unwrap();
        for task in &tasks.tasks {
            let rel = format!("episodes/{}.json", task.task_id);
            let file = EpisodeFile::load(a.path().join(&rel)).unwrap();
            if file.steps.is_empty() {
                continue; // an episode that never observed has nothing to replay
            }
            let mut env = Environment::new(pack.clone());
            let outcome = replay_episode(&file, task, &mut env, &planner).unwrap();
            assert!(
                outcome.matched(),
                "replay of {rel} ({agent:?}) diverged: {outcome:?}"
            );
        }
    }
    println!("ACCEPTANCE 6 (determinism & replay): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 7: joint log-likelihood accounting
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_joint_logprob_accounting() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..10_000 {
        let lp_tht = -rng.gen::<f64>() * 20.0;
        let lp_env = -rng.gen::<f64>() * 20.0;
        let record = StepRecord {
            index: i,
            observation_summary: String::new(),
            thought: String::new(),
            env_action: None,
            expected_outcome: None,
            status: StepStatus::Done,
            component_logprobs: Some((lp_tht, lp_env)),
            suspected_wrong: false,
        };
        // Independent accumulation (other association order).
        let independent = ((0.0 + lp_tht) + lp_env) + 0.0;
        let joint = joint_logprob(&record).unwrap();
        assert!(
            (joint - independent).abs() <= 1e-12,
            "pair ({lp_tht}, {lp_env}): {joint} vs {independent}"
        );
    }
    println!("ACCEPTANCE 7 (joint log-likelihood accounting): PASS (10000 pairs)");
}

// ---------------------------------------------------------------------------
// Criterion 8: dataset schema
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_dataset_schema_and_fuzzer() {
    // Record real episodes through the harness; all validate clean.
    let tasks = synthetic::bundled_task_pack();
    let out = tempfile::tempdir().unwrap();
    let cfg = BenchConfig {
        agent: AgentKind::Scripted,
        seed: 2,
        budget: None,
        jobs: 1,
        out_dir: out.path().to_path_buf(),
    };
    run_benchmark(
        &tasks,
        synthetic::bundled_screen_pack(),
        &synthetic::bundled_device_profile(),
        &cfg,
    )
    .unwrap();

    let attrs = [
        "screenshot",
        "instruction",
        "observation",
        "thought",
        "action",
        "action_hardware",
        "gui_bboxes",
        "bbox_type",
        "is_step_correct",
        "is_final_success",
    ];
    let blobs = taprig_core::blob::BlobStore::open(out.path().join("blobs")).unwrap();
    for task in &tasks.tasks {
        let path = out.path().join("episodes").join(format!("{}.json", task.task_id));
        let raw = std::fs::read_to_string(&path).unwrap();
        let violations = validate_episode_json(&raw, Some(&blobs)).unwrap();
        assert!(violations.is_empty(), "{}: {violations:?}", task.task_id);

        // Deletion fuzzer: removing any one attribute from any step yields
        // exactly one violation naming that step and attribute.
        let base: serde_json::Value = serde_json::from_str(&raw).unwrap();
        let n_steps = base["steps"].as_array().unwrap().len();
        for step_ix in 0..n_steps {
            for attr in attrs {
                let mut mutated = base.clone();
                mutated["steps"][step_ix]
                    .as_object_mut()
                    .unwrap()
                    .remove(attr);
                let violations = validate_episode_json(&mutated.to_string(), None).unwrap();
                assert_eq!(
                    violations.len(),
                    1,
                    "{} step {step_ix} attr {attr}: {violations:?}",
                    task.task_id
                );
                assert!(
                    violations[0].location.contains(&format!("steps[{step_ix}]"))
                        && violations[0].location.contains(attr),
                    "violation must name the step and attribute: {violations:?}"
                );
            }
        }
    }
    println!("ACCEPTANCE 8 (dataset schema + fuzzer): PASS");
}
