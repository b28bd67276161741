//! Acceptance gate: one line per criterion, exit status 1 if any fails.
//!
//! Every check runs offline against the simulators and mocks.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use astra_core::act::{announce, build_grid, move_cursor, Direction, NavCursor, NoBackend, ROW_TOLERANCE};
use astra_core::clients::{Clients, MockAsr, MockOcr, MockVlm, RecordingTts, ServiceKind};
use astra_core::config::{load_game_config, save_game_config, Element, ElementMap, NormalizedBlock, SpatialConfig};
use astra_core::describe::{assess_change, frame_delta, route_for, spatial_at, spatial_params, Route};
use astra_core::detect::{CueClassifier, Debouncer, EventPayload, Sightings, StateClassification, StateClassifier};
use astra_core::frames::VecSource;
use astra_core::harness::{
    gen_card_corpus, make_game, replay_corpus, run_action_audit, run_navigation_audit, score_detections, AuditOptions,
    CardGame, GameKind, JitterSpec, SimGame,
};
use astra_core::orchestrator::{general_config, LogEntry, Mode, Session, SessionOptions};
use astra_core::{Execution, Frame, GameConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

type Criterion = (&'static str, fn() -> Check);

fn main() {
    let criteria: [Criterion; 9] = [
        ("template-corpus", template_corpus),
        ("cue-classification", cue_classification),
        ("navigation-completeness", navigation_completeness),
        ("action-execution", action_execution),
        ("change-routing", change_routing),
        ("description-cache", description_cache),
        ("spatial-audio", spatial_audio),
        ("mode-ladder", mode_ladder),
        ("invariant-suites", invariant_suites),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name:<24} {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name:<24} {detail} [{secs:.1}s]");
            }
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

/// 119-frame card corpus, clean and jittered: accuracy 100% / >= 99%, no
/// false positives, under a minute in total.
fn template_corpus() -> Check {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = CardGame::new(0, 1).bundle();
    let mut notes = Vec::new();
    for (label, jitter, floor) in [("clean", JitterSpec::NONE, 1.0), ("jitter", JitterSpec::STANDARD, 0.99)] {
        let (trace, truth) = gen_card_corpus(119, 7, jitter, 1, &dir.path().join(label)).map_err(|e| e.to_string())?;
        ensure(trace.len() == 119, || format!("{label}: {} frames", trace.len()))?;
        let preds = replay_corpus(&trace, &config, Execution::Parallel).map_err(|e| e.to_string())?;
        let m = score_detections(&preds, &truth.items()).map_err(|e| e.to_string())?;
        let acc = m.detection.expect("scored");
        let fp = m.false_positives.expect("scored");
        notes.push(format!("{label} {acc} fp={fp}"));
        ensure(acc.value() >= floor && fp == 0, || notes.join("; "))?;
    }
    let elapsed = start.elapsed();
    notes.push(format!("{:.1}s", elapsed.as_secs_f64()));
    ensure(elapsed < Duration::from_secs(60), || notes.join("; "))?;
    Ok(notes.join("; "))
}

/// Every scene of every game, reached from every other scene, classified at
/// 1280x720; mean time per frame under 10 ms.
fn cue_classification() -> Check {
    let (mut frames, mut correct, mut total_time, mut worst) = (0usize, 0usize, Duration::ZERO, Duration::ZERO);
    let mut wrong = Vec::new();
    for kind in GameKind::ALL {
        let mut game = make_game(kind, 11, 2);
        ensure(game.size() == (1280, 720), || format!("{kind} renders {:?}", game.size()))?;
        let config = game.bundle();
        let classifier = CueClassifier::new(&config.cues, config.detect.accept, Execution::default());
        let scenes = game.scenes();
        let mut t = 0;
        for from in &scenes {
            for to in &scenes {
                if from == to {
                    continue;
                }
                for scene in [from, to] {
                    game.set_scene(scene).map_err(|e| e.to_string())?;
                    t += 100;
                    let frame = game.render(t).with_timestamp(t);
                    let want = game.truth(t).state_id;
                    let clock = Instant::now();
                    let got = classifier.classify(&frame);
                    let dt = clock.elapsed();
                    total_time += dt;
                    worst = worst.max(dt);
                    frames += 1;
                    if got.state_id == want {
                        correct += 1;
                    } else if wrong.len() < 5 {
                        wrong.push(format!("{kind}/{scene}: {} != {want}", got.state_id));
                    }
                }
            }
        }
    }
    let mean_ms = total_time.as_secs_f64() * 1000.0 / frames as f64;
    let detail = format!(
        "{correct}/{frames} labels correct; mean {mean_ms:.2} ms/frame, worst {:.2} ms at 1280x720",
        worst.as_secs_f64() * 1000.0
    );
    ensure(correct == frames && mean_ms < 10.0, || format!("{detail}; {}", wrong.join(", ")))?;
    Ok(detail)
}

/// Exhaustive arrow-key traversal of every navigable scene in full mode.
fn navigation_completeness() -> Check {
    let (mut scenes, mut reached, mut targets) = (0, 0, 0);
    let mut misses = Vec::new();
    for kind in GameKind::ALL {
        for scene in make_game(kind, 1, 1).scenes() {
            let a = run_navigation_audit(kind, &scene, &AuditOptions::new(Mode::Full)).map_err(|e| e.to_string())?;
            let Some(cov) = a.metrics.coverage else { continue };
            scenes += 1;
            reached += cov.hits;
            targets += cov.total;
            if cov.hits < cov.total {
                misses.push(format!("{kind}/{scene} missed {:?}", a.missed));
            }
        }
    }
    let detail = format!("{reached}/{targets} targets reached over {scenes} scenes");
    ensure(misses.is_empty() && scenes >= 10, || format!("{detail}; {}", misses.join("; ")))?;
    Ok(detail)
}

/// Static scenes: >= 98% of >= 67 activations hit; the lagged moving-fruit
/// scene must miss at least once.
fn action_execution() -> Check {
    let mut plan: Vec<(GameKind, String, Vec<String>)> = Vec::new();
    for kind in GameKind::ALL {
        let mut g = make_game(kind, 1, 1);
        for scene in g.scenes() {
            if (kind, scene.as_str()) == (GameKind::Merge, "moving") {
                continue;
            }
            g.set_scene(&scene).map_err(|e| e.to_string())?;
            let ids: Vec<String> = g.truth(0).targets.into_iter().map(|t| t.id).collect();
            if !ids.is_empty() {
                plan.push((kind, scene, ids));
            }
        }
    }
    let (mut hits, mut attempts) = (0, 0);
    let mut failures = Vec::new();
    while attempts < 67 {
        for (kind, scene, ids) in &plan {
            let a = run_action_audit(*kind, scene, ids, &AuditOptions::new(Mode::Full)).map_err(|e| e.to_string())?;
            let r = a.metrics.action.expect("scored");
            hits += r.hits;
            attempts += r.total;
            failures.extend(a.attempts.iter().filter(|t| !t.success).map(|t| format!("{kind}/{scene}/{}", t.target)));
        }
    }
    let rate = hits as f64 / attempts as f64;

    let mut g = make_game(GameKind::Merge, 1, 1);
    g.set_scene("moving").map_err(|e| e.to_string())?;
    let fruits: Vec<String> = g.truth(0).targets.into_iter().map(|t| t.id).filter(|id| id.starts_with("fruit_")).collect();
    let lagged = run_action_audit(GameKind::Merge, "moving", &fruits, &AuditOptions::new(Mode::Full).with_lag(300))
        .map_err(|e| e.to_string())?;
    let moving = lagged.metrics.action.expect("scored");
    let detail = format!(
        "static {hits}/{attempts} ({:.2}%) over {} scenes; moving with 300 ms lag {moving}",
        100.0 * rate,
        plan.len()
    );
    ensure(attempts >= 67 && rate >= 0.98 && moving.hits < moving.total, || {
        format!("{detail}; failed: {}", failures.join(", "))
    })?;
    Ok(detail)
}

/// Reference SSIM: BT.601 luma, full 2D 11x11 Gaussian (sigma 1.5) at each
/// valid window position, mean-subtracted moments.
#[allow(clippy::needless_range_loop)]
fn reference_ssim(a: &Frame, b: &Frame) -> f64 {
    let luma = |f: &Frame| -> Vec<f64> {
        f.pixels().chunks(3).map(|p| 0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64).collect()
    };
    let (la, lb) = (luma(a), luma(b));
    let (w, h) = (a.width() as usize, a.height() as usize);
    let mut g = [[0.0f64; 11]; 11];
    let mut sum = 0.0;
    for (y, row) in g.iter_mut().enumerate() {
        for (x, v) in row.iter_mut().enumerate() {
            let (dx, dy) = (x as f64 - 5.0, y as f64 - 5.0);
            *v = (-(dx * dx + dy * dy) / 4.5).exp();
            sum += *v;
        }
    }
    let (c1, c2) = (6.5025, 58.5225);
    let mut total = 0.0;
    for oy in 0..=h - 11 {
        for ox in 0..=w - 11 {
            let at = |p: &[f64], x: usize, y: usize| p[(oy + y) * w + ox + x];
            let (mut ma, mut mb) = (0.0, 0.0);
            for y in 0..11 {
                for x in 0..11 {
                    ma += g[y][x] / sum * at(&la, x, y);
                    mb += g[y][x] / sum * at(&lb, x, y);
                }
            }
            let (mut va, mut vb, mut cov) = (0.0, 0.0, 0.0);
            for y in 0..11 {
                for x in 0..11 {
                    let (da, db) = (at(&la, x, y) - ma, at(&lb, x, y) - mb);
                    va += g[y][x] / sum * da * da;
                    vb += g[y][x] / sum * db * db;
                    cov += g[y][x] / sum * da * db;
                }
            }
            total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
        }
    }
    total / ((w - 10) * (h - 10)) as f64
}

fn noise_frame(rng: &mut ChaCha8Rng, w: u32, h: u32) -> Frame {
    Frame::from_fn(w, h, |_, _| [rng.random(), rng.random(), rng.random()])
}

fn blend(a: &Frame, b: &Frame, t: f64) -> Frame {
    Frame::from_fn(a.width(), a.height(), |x, y| {
        let (p, q) = (a.pixel(x, y), b.pixel(x, y));
        std::array::from_fn(|i| ((1.0 - t) * p[i] as f64 + t * q[i] as f64).round() as u8)
    })
}

/// 50 pairs: a textured scene blended with growing amounts of noise.
fn change_routing() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let cfg = astra_core::config::ChangeConfig::default();
    ensure((cfg.threshold1, cfg.threshold2) == (0.3, 0.7), || format!("thresholds {cfg:?}"))?;
    let mut counts = [0usize; 3];
    let mut worst = 0.0f64;
    for k in 0..50 {
        let base = Frame::from_fn(64, 48, |x, y| {
            let v = ((x * 5 + y * 3 + k * 7) % 200) as u8 + 20;
            [v, 255 - v, (x * y % 256) as u8]
        });
        let noise = noise_frame(&mut rng, 64, 48);
        let cur = blend(&base, &noise, k as f64 / 49.0);
        let oracle = 1.0 - reference_ssim(&base, &cur);
        let delta = frame_delta(&base, &cur, Execution::Parallel).map_err(|e| e.to_string())?;
        worst = worst.max((delta - oracle).abs());
        ensure((delta - oracle).abs() < 1e-6, || format!("pair {k}: delta {delta} vs oracle {oracle}"))?;
        let route = assess_change(&base, &cur, &cfg, Execution::Sequential).map_err(|e| e.to_string())?.route;
        let want = if oracle < 0.3 {
            Route::Silent
        } else if oracle < 0.7 {
            Route::Brief
        } else {
            Route::Rich
        };
        ensure(route == want && route_for(delta, 0.3, 0.7) == want, || format!("pair {k}: {route:?} vs {want:?} at {oracle}"))?;
        counts[want as usize] += 1;
        let same = assess_change(&cur, &cur.clone(), &cfg, Execution::Parallel).map_err(|e| e.to_string())?;
        ensure(same.route == Route::Silent, || format!("pair {k}: identical frames routed {:?}", same.route))?;
    }
    ensure(counts.iter().all(|&c| c > 0), || format!("routes not all exercised: {counts:?}"))?;
    Ok(format!(
        "50 pairs, max |delta - oracle| = {worst:.1e}; silent/brief/rich = {}/{}/{}; identical frames silent",
        counts[0], counts[1], counts[2]
    ))
}

/// A flat frame jumps to the same noisy frame five times, fading back in
/// between; only the first jump reaches the model.
fn description_cache() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (w, h) = (160, 120);
    let flat = Frame::solid(w, h, [128, 128, 128]);
    let major = noise_frame(&mut rng, w, h);
    let mut frames = vec![flat.clone()];
    for _ in 0..5 {
        frames.push(major.clone());
        frames.extend((1..=20).map(|i| blend(&major, &flat, i as f64 / 20.0)));
    }
    let vlm = Arc::new(MockVlm::new());
    let clients = Clients::new(Arc::new(MockOcr::new()), vlm.clone(), Arc::new(MockAsr::new()));
    let mut session = Session::new(
        &GameConfig::empty("cache"),
        SessionOptions::new(Mode::General),
        clients,
        Arc::new(RecordingTts::new()),
        Arc::new(NoBackend),
    )
    .map_err(|e| e.to_string())?;
    session.run(&mut VecSource::at_rate(frames, 10.0), &[]).map_err(|e| e.to_string())?;
    let rich = session
        .log()
        .records()
        .iter()
        .filter(|r| matches!(&r.entry, LogEntry::Change { assessment } if assessment.route == Route::Rich))
        .count();
    let usage = session.clients().ledger.usage(ServiceKind::Vlm);
    let (served_in, served_out) = vlm.served();
    let detail = format!(
        "{rich} major changes, {} model calls; ledger {}+{} tokens, mock served {served_in}+{served_out}",
        vlm.calls(),
        usage.input_tokens,
        usage.output_tokens
    );
    ensure(
        rich == 5 && vlm.calls() == 1 && usage.calls == 1 && (usage.input_tokens, usage.output_tokens) == (served_in, served_out),
        || detail.clone(),
    )?;
    Ok(detail)
}

fn spatial_audio() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10_000);
    let cfg = SpatialConfig::default();
    let (top, bottom) = (spatial_at(0.5, 0.0, &cfg).pitch_shift, spatial_at(0.5, 1.0, &cfg).pitch_shift);
    let mut samples = Vec::with_capacity(10_000);
    let (mut power_err, mut pitch_err) = (0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let (a, b, c, d): (f64, f64, f64, f64) = (rng.random(), rng.random(), rng.random(), rng.random());
        let (l, r) = if a < b { (a, b) } else { (b, a) };
        let (t, bt) = if c < d { (c, d) } else { (d, c) };
        let Ok(block) = NormalizedBlock::new(l, t, r.max(l + 1e-6).min(1.0), bt.max(t + 1e-6).min(1.0)) else { continue };
        let p = spatial_params(&block);
        let (cx, cy) = block.center();
        power_err = power_err.max((p.gain_left.powi(2) + p.gain_right.powi(2) - 1.0).abs());
        pitch_err = pitch_err.max((p.pitch_shift - (top + (bottom - top) * cy)).abs());
        samples.push((cx, p.gain_left, p.gain_right));
    }
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let monotone = samples.windows(2).all(|w| w[1].2 >= w[0].2 && w[1].1 <= w[0].1);
    let centre = spatial_params(&NormalizedBlock::new(0.4, 0.4, 0.6, 0.6).expect("valid"));
    let half = 0.5f64.sqrt();
    let centre_ok = (centre.gain_left - half).abs() < 1e-9 && (centre.gain_right - half).abs() < 1e-9;
    let detail = format!(
        "{} blocks: max |gL^2+gR^2-1| = {power_err:.1e}, pan monotone = {monotone}, max pitch deviation from affine = {pitch_err:.1e}, centre gL={:.12} gR={:.12}",
        samples.len(),
        centre.gain_left,
        centre.gain_right
    );
    ensure(samples.len() == 10_000 && power_err < 1e-9 && pitch_err < 1e-9 && monotone && centre_ok, || detail.clone())?;
    Ok(detail)
}

/// The icon-only homepage under every mode.
fn mode_ladder() -> Check {
    let mut rows = Vec::new();
    let mut ok = true;
    for mode in Mode::LADDER {
        let opts = AuditOptions::new(mode);
        let nav = run_navigation_audit(GameKind::Card, "homepage", &opts).map_err(|e| e.to_string())?;
        let act = run_action_audit(GameKind::Card, "homepage", &["local_mode".to_string()], &opts).map_err(|e| e.to_string())?;
        let cov = nav.metrics.coverage.expect("homepage has targets");
        let clicked = act.attempts[0].success;
        rows.push(format!("{mode}: {} announced, coverage {}/{}, click {}, vlm {}", nav.visited.len(), cov.hits, cov.total, clicked, nav.vlm_calls));
        match mode {
            Mode::BaselineOcr => ok &= nav.visited.is_empty() && nav.vlm_calls == 0 && !clicked,
            Mode::Full => ok &= cov.hits == 4 && cov.total == 4 && clicked,
            _ => {}
        }
    }
    let detail = rows.join("; ");
    ensure(ok, || detail.clone())?;
    Ok(detail)
}

fn invariant_suites() -> Check {
    let debounce = debouncer_edges()?;
    let grid = grid_fuzz()?;
    let golden = golden_announcements()?;
    let round = config_round_trip()?;
    Ok(format!("{debounce}; {grid}; {golden}; {round}"))
}

/// Reference: a state is announced when it has been the label for `n`
/// consecutive frames and differs from the last announced state.
fn debouncer_edges() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut events = 0;
    for case in 0..2000 {
        let n = rng.random_range(1..=4u32);
        let len = rng.random_range(1..60);
        let labels: Vec<&str> = (0..len).map(|_| ["a", "b", "c"][rng.random_range(0..3)]).collect();
        let mut deb = Debouncer::new(n, 0.025);
        let mut got = Vec::new();
        for (i, l) in labels.iter().enumerate() {
            let s = Sightings { state: Some(StateClassification { state_id: l.to_string(), score: 0.9, timestamp_ms: i as u64 }), ..Sightings::default() };
            for e in deb.update(&s, i as u64) {
                if let EventPayload::StateChanged { state_id, .. } = e.payload {
                    got.push((i, state_id));
                }
            }
        }
        let mut want = Vec::new();
        let mut last: Option<&str> = None;
        for i in 0..labels.len() {
            let start = (i + 1).saturating_sub(n as usize);
            let steady = i + 1 >= n as usize && labels[start..=i].iter().all(|l| *l == labels[i]);
            if steady && last != Some(labels[i]) {
                last = Some(labels[i]);
                want.push((i, labels[i].to_string()));
            }
        }
        ensure(got == want, || format!("debouncer case {case} (n={n}, {labels:?}): {got:?} vs {want:?}"))?;
        events += got.len();
    }
    Ok(format!("debouncer 2000 sequences/{events} edges match"))
}

/// 10,000 random maps, 20 random moves each.
fn grid_fuzz() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let config = general_config("fuzz");
    let (mut moves, mut violations) = (0usize, Vec::new());
    for case in 0..10_000 {
        let n = rng.random_range(1..12);
        let mut elements = Vec::with_capacity(n + 1);
        for i in 0..n {
            let (w, h) = (rng.random_range(0.02..0.3), rng.random_range(0.02..0.3));
            let (x, y) = (rng.random_range(0.0..1.0 - w), rng.random_range(0.0..1.0 - h));
            let block = NormalizedBlock::new(x, y, x + w, y + h).expect("inside unit square");
            elements.push(Element::new(block, format!("e{i}"), true));
        }
        elements.push(Element::new(NormalizedBlock::FULL, "background", false));
        let map = ElementMap::new("s", elements);
        let grid = build_grid(&map, ROW_TOLERANCE).map_err(|e| e.to_string())?;
        let mut seen: Vec<&str> = grid.rows.iter().flatten().map(|e| e.content.as_str()).collect();
        seen.sort();
        let mut want: Vec<&str> = map.interactive().map(|e| e.content.as_str()).collect();
        want.sort();
        if seen != want {
            violations.push(format!("case {case}: grid holds {seen:?}"));
        }
        let mean = |r: &Vec<Element>| r.iter().map(|e| e.block.center().1).sum::<f64>() / r.len() as f64;
        if !grid.rows.windows(2).all(|w| mean(&w[0]) <= mean(&w[1])) {
            violations.push(format!("case {case}: rows out of order"));
        }
        if !grid.rows.iter().all(|r| r.windows(2).all(|w| w[0].block.center().0 <= w[1].block.center().0)) {
            violations.push(format!("case {case}: row not left to right"));
        }
        let mut cursor = NavCursor::ORIGIN;
        for _ in 0..20 {
            let dir = Direction::ALL[rng.random_range(0..4)];
            let (next, speech) = move_cursor(&grid, cursor, dir, &config, "en");
            moves += 1;
            let horizontal_ok = match dir {
                Direction::Left | Direction::Right => next.r == cursor.r && next.c.abs_diff(cursor.c) <= 1,
                Direction::Up | Direction::Down => next.r.abs_diff(cursor.r) <= 1,
            };
            if !next.is_valid(&grid) || !horizontal_ok || speech.text.is_empty() {
                violations.push(format!("case {case}: {cursor:?} --{dir:?}--> {next:?}"));
            }
            cursor = next;
        }
        if violations.len() > 5 {
            break;
        }
    }
    ensure(violations.is_empty(), || violations.join("; "))?;
    Ok(format!("grid 10000 maps/{moves} moves, 0 cursor violations"))
}

fn golden_announcements() -> Check {
    let el = |x: f64, y: f64, name: &str| Element::new(NormalizedBlock::new(x, y, x + 0.15, y + 0.1).expect("valid"), name, true);
    let map = ElementMap::new(
        "menu",
        vec![el(0.1, 0.25, "a"), el(0.3, 0.26, "b"), el(0.5, 0.24, "c"), el(0.7, 0.25, "d"), el(0.1, 0.55, "e"), el(0.3, 0.55, "f"), el(0.5, 0.55, "g")],
    );
    let grid = build_grid(&map, ROW_TOLERANCE).map_err(|e| e.to_string())?;
    let config = general_config("golden");
    let mut checked = 0;
    for (r, row) in grid.rows.iter().enumerate() {
        for (c, e) in row.iter().enumerate() {
            let text = announce(&grid, NavCursor { r: r + 1, c: c + 1 }, &config, "en", false).text;
            let want = format!("{}, Row {} of 2, Column {} of {}", e.content, r + 1, c + 1, row.len());
            ensure(text == want, || format!("announced {text:?}, want {want:?}"))?;
            checked += 1;
        }
    }
    let (_, edge) = move_cursor(&grid, NavCursor::ORIGIN, Direction::Left, &config, "en");
    ensure(edge.text == "Edge, a, Row 1 of 2, Column 1 of 4", || format!("edge announced {:?}", edge.text))?;
    Ok(format!("{checked} golden announcements"))
}

fn config_round_trip() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for kind in GameKind::ALL {
        let config = make_game(kind, 1, 1).bundle();
        let path = dir.path().join(kind.name());
        save_game_config(&config, &path).map_err(|e| e.to_string())?;
        let loaded = load_game_config(&path).map_err(|e| e.to_string())?;
        ensure(loaded == config, || format!("{kind} bundle changed across save/load"))?;
    }
    Ok("3 bundles round-trip".into())
}
