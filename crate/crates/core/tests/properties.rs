//! Property tests for cross-cutting invariants: gesture template
//! classification across all screen sizes, trajectory structure, metric
//! monotonicity and partition identities, mock-grounder exactness, and the
//! typing planner against an independent layer-machine oracle.

use proptest::prelude::*;

use taprig_core::action::keyboard::plan_text_input;
use taprig_core::action::swipe::{resolve_swipe, synthesize_back, synthesize_exit, SwipeDistance};
use taprig_core::action::ActionSpec;
use taprig_core::arm::calibration::{fit_calibration, CalibrationMap, WorkspaceBounds, WsPoint};
use taprig_core::arm::trajectory::TouchPlanner;
use taprig_core::bench::metrics::{
    completion_rate, step_efficiency, step_efficiency_task, success_rate, TaskOutcome,
};
use taprig_core::bench::task::{Category, Level, Origin, TaskSet, TaskSpec};
use taprig_core::geom::{Direction, PxPoint, ScreenDims};
use taprig_core::perception::{Grounder, SceneGrounder};
use taprig_core::sim::env::Environment;
use taprig_core::sim::gesture::{classify, GestureClass, TouchTrace};
use taprig_core::sim::pack::ElementKind;
use taprig_core::synthetic;

fn planner_for(dims: ScreenDims) -> TouchPlanner {
    TouchPlanner::new(
        CalibrationMap::identity(1.0, 9.0),
        WorkspaceBounds {
            x_min: 0.0,
            x_max: dims.width as f64,
            y_min: 0.0,
            y_max: dims.height as f64,
        },
    )
}

proptest! {
    /// Back/exit templates classify correctly for every screen size in the
    /// supported range, via the real planned trajectory.
    #[test]
    fn gesture_templates_classify_across_all_dims(
        w in 320u32..=2160,
        h in 480u32..=3840,
    ) {
        let dims = ScreenDims::new(w, h);
        let planner = planner_for(dims);

        let (s, e) = synthesize_back(dims);
        let trace = planner.trace_of(&planner.plan_swipe(s, e).unwrap()).unwrap();
        prop_assert_eq!(classify(&trace, dims), GestureClass::BackGesture);

        let (s, e) = synthesize_exit(dims);
        let trace = planner.trace_of(&planner.plan_swipe(s, e).unwrap()).unwrap();
        prop_assert_eq!(classify(&trace, dims), GestureClass::ExitGesture);
    }

    /// Swipe resolution displaces exactly one axis by the exact fraction.
    #[test]
    fn resolve_swipe_exact_fraction(
        x in 0i32..1080,
        y in 0i32..2400,
        dir_ix in 0usize..4,
        dist_ix in 0usize..3,
    ) {
        let dims = ScreenDims::new(1080, 2400);
        let dirs = [Direction::Up, Direction::Down, Direction::Left, Direction::Right];
        let dists = [SwipeDistance::Short, SwipeDistance::Medium, SwipeDistance::Long];
        let (dir, dist) = (dirs[dir_ix], dists[dist_ix]);
        if let Ok((s, e)) = resolve_swipe(x, y, dir, dist, dims) {
            let axis_len = match dir {
                Direction::Left | Direction::Right => dims.width as f64,
                _ => dims.height as f64,
            };
            let (moved, fixed) = match dir {
                Direction::Left | Direction::Right => ((e.x - s.x).abs(), e.y - s.y),
                _ => ((e.y - s.y).abs(), e.x - s.x),
            };
            prop_assert_eq!(moved, dist.fraction() * axis_len);
            prop_assert_eq!(fixed, 0.0);
        }
    }

    /// Every planned trajectory satisfies the hover/contact/hover structure.
    #[test]
    fn planned_trajectories_are_structurally_valid(
        x1 in 0.0f64..1080.0,
        y1 in 0.0f64..2400.0,
        x2 in 0.0f64..1080.0,
        y2 in 0.0f64..2400.0,
    ) {
        let dims = ScreenDims::new(1080, 2400);
        let planner = planner_for(dims);
        let tap = planner.plan_tap(PxPoint::new(x1, y1)).unwrap();
        prop_assert!(tap.check_structure(planner.map()));
        if (x1 - x2).abs() + (y1 - y2).abs() > 1e-9 {
            let swipe = planner
                .plan_swipe(PxPoint::new(x1, y1), PxPoint::new(x2, y2))
                .unwrap();
            prop_assert!(swipe.check_structure(planner.map()));
            // trace round trip: times strictly increase, contacts in bounds
            let trace = planner.trace_of(&swipe).unwrap();
            prop_assert!(trace.validate(dims).is_ok());
        }
    }

    /// Affine fits on exactly-affine data recover the transform within
    /// 1e-6 mm regardless of the generating parameters.
    #[test]
    fn affine_fit_recovers_exact_data(
        a00 in 0.05f64..0.5,
        a11 in 0.05f64..0.5,
        a01 in -0.05f64..0.05,
        a10 in -0.05f64..0.05,
        tx in -50.0f64..50.0,
        ty in -50.0f64..50.0,
    ) {
        let apply = |p: PxPoint| WsPoint::new(
            a00 * p.x + a01 * p.y + tx,
            a10 * p.x + a11 * p.y + ty,
        );
        let pixels = [
            PxPoint::new(0.0, 0.0),
            PxPoint::new(500.0, 10.0),
            PxPoint::new(20.0, 900.0),
            PxPoint::new(480.0, 870.0),
            PxPoint::new(250.0, 440.0),
        ];
        let corr: Vec<(PxPoint, WsPoint)> = pixels.iter().map(|&p| (p, apply(p))).collect();
        let map = fit_calibration(&corr, 0.0, 1.0).unwrap();
        prop_assert!(map.residual <= 1e-6, "residual {}", map.residual);
    }
}

#[test]
fn noisy_fit_residual_within_grid_search_bound() {
    // Exact 0.1-scale map, correspondences perturbed by uniform +/-0.5 mm.
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let truth = |p: PxPoint| WsPoint::new(0.1 * p.x, 0.1 * p.y);
    let pixels: Vec<PxPoint> = (0..8)
        .map(|i| PxPoint::new(((i % 3) * 500) as f64, ((i / 3) * 800) as f64 + i as f64))
        .collect();
    let corr: Vec<(PxPoint, WsPoint)> = pixels
        .iter()
        .map(|&p| {
            let t = truth(p);
            (
                p,
                WsPoint::new(
                    t.x + rng.gen_range(-0.5..0.5),
                    t.y + rng.gen_range(-0.5..0.5),
                ),
            )
        })
        .collect();

    let map = fit_calibration(&corr, 0.0, 1.0).unwrap();

    // Independent brute-force: grid search translation offsets around the
    // true linear part, minimizing the max residual over the same points.
    let max_residual = |affine: [f64; 6]| -> f64 {
        corr.iter()
            .map(|(p, w)| {
                let mx = affine[0] * p.x + affine[1] * p.y + affine[2];
                let my = affine[3] * p.x + affine[4] * p.y + affine[5];
                ((mx - w.x).powi(2) + (my - w.y).powi(2)).sqrt()
            })
            .fold(0.0, f64::max)
    };
    let mut grid_best = f64::INFINITY;
    let steps = 41;
    for i in 0..steps {
        for j in 0..steps {
            let tx = -0.5 + i as f64 * (1.0 / (steps - 1) as f64);
            let ty = -0.5 + j as f64 * (1.0 / (steps - 1) as f64);
            grid_best = grid_best.min(max_residual([0.1, 0.0, tx, 0.0, 0.1, ty]));
        }
    }

    assert!(map.residual <= 1.0, "noisy residual {} mm", map.residual);
    assert!(
        map.residual <= grid_best + 0.2,
        "least squares ({}) should not be far above the grid-search bound ({grid_best})",
        map.residual
    );
}

#[test]
fn metrics_monotonicity() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..500 {
        let n = rng.gen_range(1..20usize);
        let outcomes: Vec<TaskOutcome> = (0..n)
            .map(|i| {
                let success: bool = rng.gen();
                let total = rng.gen_range(1..20u32);
                TaskOutcome {
                    task_id: format!("t{i}"),
                    success,
                    agent_steps_successful: if success { total } else { rng.gen_range(0..=total) },
                    agent_steps_total: total,
                    diagnostics: None,
                }
            })
            .collect();
        let sr_before = success_rate(&outcomes).unwrap().ratio;

        // Adding a successful outcome never decreases SR.
        let mut plus = outcomes.clone();
        plus.push(TaskOutcome {
            task_id: "extra".into(),
            success: true,
            agent_steps_successful: 3,
            agent_steps_total: 3,
            diagnostics: None,
        });
        let sr_after = success_rate(&plus).unwrap().ratio;
        assert!(sr_after >= sr_before);

        // Increasing AStep on a fixed success never increases SE_ti.
        let golden = rng.gen_range(1..10u32);
        let task = TaskSpec {
            task_id: "se".into(),
            category: Category::Lifestyle,
            level: Some(Level::Medium),
            apps: vec!["a".into()],
            set: TaskSet::Challenging,
            instruction: String::new(),
            golden_steps: golden,
            origin: Origin::AppHome,
            golden_trajectory: None,
        };
        let astep = rng.gen_range(1..15u32);
        let mk = |steps: u32| TaskOutcome {
            task_id: "se".into(),
            success: true,
            agent_steps_successful: steps,
            agent_steps_total: steps,
            diagnostics: None,
        };
        assert!(step_efficiency_task(&mk(astep + 1), &task) <= step_efficiency_task(&mk(astep), &task));
    }
}

#[test]
fn subset_aggregates_recombine_to_overall_means() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        // Random outcomes split into two disjoint subsets.
        let n = rng.gen_range(2..30usize);
        let mut tasks = Vec::new();
        let mut outcomes = Vec::new();
        for i in 0..n {
            let golden = rng.gen_range(1..10u32);
            tasks.push(synth_task(&format!("t{i}"), golden));
            let success: bool = rng.gen();
            let total = rng.gen_range(1..15u32);
            outcomes.push(TaskOutcome {
                task_id: format!("t{i}"),
                success,
                agent_steps_successful: if success { total } else { rng.gen_range(0..=total) },
                agent_steps_total: total,
                diagnostics: None,
            });
        }
        let split = rng.gen_range(1..n);
        let (left, right) = outcomes.split_at(split);

        // SR recombines weighted by subset sizes.
        let overall = success_rate(&outcomes).unwrap();
        let l = success_rate(left).unwrap();
        let r = success_rate(right).unwrap();
        let recombined =
            (l.ratio * l.total as f64 + r.ratio * r.total as f64) / overall.total as f64;
        assert!((overall.ratio - recombined).abs() <= 1e-12);

        // CR recombines weighted by non-success counts, SE by success counts.
        let weight_cr = |os: &[TaskOutcome]| os.iter().filter(|o| !o.success).count() as f64;
        let weight_se = |os: &[TaskOutcome]| os.iter().filter(|o| o.success).count() as f64;

        let overall_cr = completion_rate(&outcomes, &tasks).unwrap().subset;
        let lcr = completion_rate(left, &tasks).unwrap().subset;
        let rcr = completion_rate(right, &tasks).unwrap().subset;
        let num = lcr.unwrap_or(0.0) * weight_cr(left) + rcr.unwrap_or(0.0) * weight_cr(right);
        let den = weight_cr(&outcomes);
        match overall_cr {
            None => assert_eq!(den, 0.0),
            Some(v) => assert!((v - num / den).abs() <= 1e-12),
        }

        let overall_se = step_efficiency(&outcomes, &tasks).unwrap().subset;
        let lse = step_efficiency(left, &tasks).unwrap().subset;
        let rse = step_efficiency(right, &tasks).unwrap().subset;
        let num = lse.unwrap_or(0.0) * weight_se(left) + rse.unwrap_or(0.0) * weight_se(right);
        let den = weight_se(&outcomes);
        match overall_se {
            None => assert_eq!(den, 0.0),
            Some(v) => assert!((v - num / den).abs() <= 1e-12),
        }
    }
}

fn synth_task(id: &str, golden: u32) -> TaskSpec {
    TaskSpec {
        task_id: id.into(),
        category: Category::ShopFin,
        level: Some(Level::Simple),
        apps: vec!["a".into()],
        set: TaskSet::Standard,
        instruction: String::new(),
        golden_steps: golden,
        origin: Origin::AppHome,
        golden_trajectory: None,
    }
}

#[test]
fn mock_grounder_matches_direct_pack_scan_exactly() {
    // Set equality between ground_text and an independent scan of the pack.
    let pack = synthetic::bundled_screen_pack();
    for screen in &pack.screens {
        let mut env = Environment::new(pack.clone());
        // Drive via direct state: reset to home then force-observe each
        // screen by loading a fresh env per screen id through resets where
        // possible; otherwise scan the scene of the observation produced
        // for the screen pack directly.
        if pack.apps.values().any(|home| home == &screen.screen_id) {
            let app = pack
                .apps
                .iter()
                .find(|(_, home)| *home == &screen.screen_id)
                .map(|(a, _)| a.clone())
                .unwrap();
            env.reset(&taprig_core::sim::env::ResetOrigin::AppHome { app_id: app })
                .unwrap();
        } else if screen.screen_id != pack.home_screen {
            continue; // deep screens are covered through the app homes
        }
        let obs = env.observe();
        for query in ["a", "settings", "Result", "zzz-no-match"] {
            let got: Vec<_> = SceneGrounder.ground_text(&obs, query).unwrap();
            let expected: Vec<_> = obs
                .scene
                .as_ref()
                .unwrap()
                .iter()
                .filter(|e| {
                    e.kind == ElementKind::Text
                        && e.label.to_lowercase().contains(&query.to_lowercase())
                })
                .map(|e| e.bbox)
                .collect();
            assert_eq!(got, expected, "screen {} query {query}", screen.screen_id);
        }
    }
}

#[test]
fn text_plan_matches_independent_layer_machine_oracle() {
    // Independent oracle: simulate the two-layer keyboard state machine and
    // count the taps required per character.
    fn oracle_tap_count(text: &str) -> usize {
        let mut taps = 0usize;
        let mut symbols = false;
        for c in text.chars() {
            match c {
                ' ' | '\u{8}' => taps += 1,
                c if c.is_ascii_lowercase() => {
                    if symbols {
                        taps += 1;
                        symbols = false;
                    }
                    taps += 1;
                }
                c if c.is_ascii_uppercase() => {
                    if symbols {
                        taps += 1;
                        symbols = false;
                    }
                    taps += 2; // shift + key
                }
                _ => {
                    if !symbols {
                        taps += 1;
                        symbols = true;
                    }
                    taps += 1;
                }
            }
        }
        if symbols {
            taps += 1; // restore letters
        }
        taps
    }

    let pack = synthetic::keyboard_probe_pack(ScreenDims::new(1080, 2400));
    let env = Environment::new(pack);
    let layout = taprig_core::action::keyboard::localize_keyboard(
        &env.observe(),
        &SceneGrounder,
        "probe",
    )
    .unwrap();

    for text in [
        "a",
        "a1b",
        "Hi",
        "Hello 1",
        "mixed CASE with 42 digits!",
        "(a+b)*c",
        "a1",
    ] {
        let taps = plan_text_input(text, &layout).unwrap();
        assert_eq!(
            taps.len(),
            oracle_tap_count(text),
            "tap count for {text:?}"
        );
    }

    // And the planned taps really type the string in the simulator.
    let sim_pack = synthetic::bundled_screen_pack();
    let planner = synthetic::bundled_device_profile().planner().unwrap();
    let mut env = Environment::new(sim_pack);
    env.reset(&taprig_core::sim::env::ResetOrigin::AppHome { app_id: "notes".into() })
        .unwrap();
    let mut layouts = taprig_core::action::keyboard::LayoutCache::in_memory();
    let mut ctx = taprig_core::action::execute::ExecutionContext {
        env: &mut env,
        planner: &planner,
        grounder: &SceneGrounder,
        layouts: &mut layouts,
        device_id: synthetic::DEVICE_ID,
    };
    taprig_core::action::execute::execute(&ActionSpec::Tap { x: 180, y: 380 }, &mut ctx).unwrap();
    let text = "Try (2+2)!";
    let mut ctx = taprig_core::action::execute::ExecutionContext {
        env: &mut env,
        planner: &planner,
        grounder: &SceneGrounder,
        layouts: &mut layouts,
        device_id: synthetic::DEVICE_ID,
    };
    taprig_core::action::execute::execute(
        &ActionSpec::Text { text: text.into() },
        &mut ctx,
    )
    .unwrap();
    assert_eq!(env.text_buffer(), text);
}

#[test]
fn swapped_anchors_give_a_pitch_error() {
    use taprig_core::action::keyboard::localize_keyboard;
    use taprig_core::action::ActionError;
    use taprig_core::geom::BBox;
    use taprig_core::perception::{IndexedBBox, PerceptionError};
    use taprig_core::sim::env::ScreenObservation;

    /// Swaps the boxes answered for 'q' and 'w': the second anchor lands
    /// left of the first, so the pitch comes out negative.
    struct SwappingGrounder {
        inner: SceneGrounder,
    }
    impl Grounder for SwappingGrounder {
        fn ground_text(
            &self,
            obs: &ScreenObservation,
            query: &str,
        ) -> Result<Vec<BBox>, PerceptionError> {
            match query {
                "q" => self.inner.ground_text(obs, "w"),
                "w" => self.inner.ground_text(obs, "q"),
                other => self.inner.ground_text(obs, other),
            }
        }
        fn detect_icons(
            &self,
            obs: &ScreenObservation,
        ) -> Result<Vec<IndexedBBox>, PerceptionError> {
            self.inner.detect_icons(obs)
        }
    }

    let pack = synthetic::keyboard_probe_pack(ScreenDims::new(1080, 2400));
    let env = Environment::new(pack);
    let err = localize_keyboard(&env.observe(), &SwappingGrounder { inner: SceneGrounder }, "x")
        .unwrap_err();
    assert!(matches!(err, ActionError::NonPositivePitch(p) if p < 0), "{err}");
}

#[test]
fn episode_step_count_never_exceeds_budget() {
    use taprig_core::action::keyboard::LayoutCache;
    use taprig_core::agent::policy::RandomPolicy;
    use taprig_core::agent::runner::run_episode;

    let tasks = synthetic::bundled_task_pack();
    let pack = synthetic::bundled_screen_pack();
    let planner = synthetic::bundled_device_profile().planner().unwrap();
    for seed in 0..8u64 {
        for budget in [1u32, 2, 5] {
            let task = &tasks.tasks[seed as usize % tasks.tasks.len()];
            let mut env = Environment::new(pack.clone());
            let mut policy = RandomPolicy::new(seed);
            let mut layouts = LayoutCache::in_memory();
            let run = run_episode(
                task,
                &mut env,
                &planner,
                &SceneGrounder,
                &mut policy,
                &mut layouts,
                synthetic::DEVICE_ID,
                budget,
                seed,
                None,
            )
            .unwrap();
            assert!(
                run.executed_steps <= budget,
                "seed {seed} budget {budget}: executed {}",
                run.executed_steps
            );
        }
    }
}

#[test]
fn random_trace_never_escapes_the_pack() {
    // Closure: whatever we throw at the env, the current screen stays a
    // pack screen and dispatch stays total.
    use rand::{Rng, SeedableRng};
    let pack = synthetic::bundled_screen_pack();
    let ids: Vec<&str> = pack.screens.iter().map(|s| s.screen_id.as_str()).collect();
    let mut env = Environment::new(pack.clone());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let dims = pack.dims;
    for _ in 0..400 {
        let a = PxPoint::new(
            rng.gen_range(0.0..dims.width as f64),
            rng.gen_range(0.0..dims.height as f64),
        );
        let b = PxPoint::new(
            rng.gen_range(0.0..dims.width as f64),
            rng.gen_range(0.0..dims.height as f64),
        );
        let trace = if rng.gen::<bool>() {
            TouchTrace::tap(a)
        } else {
            TouchTrace::swipe_line(a, b, 6)
        };
        env.dispatch_touch(&trace).unwrap();
        assert!(ids.contains(&env.current_screen_id()));
    }
}
