use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex, Once};
use std::time::Instant;

use astra_core::act::{build_grid, ActError, NoBackend, OutputBackend, ROW_TOLERANCE};
use astra_core::clients::{ClientError, Clients, HttpTts, ServiceEndpoint, ServiceKind, TranscriptTts, TtsService};
use astra_core::config::{inspect_bundle, load_game_config, load_profile, save_game_config, ElementMap, GameConfig, PlayerMode, Profile};
use astra_core::describe::{DescriptionCache, SpeechItem};
use astra_core::frames::{Frame, FrameError, FrameSource, InputEvent, SourceKind, TraceReader, TraceSource};
use astra_core::harness::{
    gen_card_corpus, make_game, replay_corpus, run_action_audit, run_navigation_audit, run_scenario, score_detections,
    ActionAudit, AuditOptions, CorpusTruth, GameKind, Metrics, NavigationAudit, Ratio, Scenario, SimWorld,
};
use astra_core::orchestrator::{LogEntry, Mode, Session, SessionOptions};
use serde::{Deserialize, Serialize};

use crate::{AuditArgs, Command, CliError, GenCorpusArgs, ReplayArgs, RunArgs, SourceSpec};

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run(args) => run(args),
        Command::Validate { bundle } => validate(&bundle),
        Command::Replay(args) => replay(args),
        Command::Audit(args) => audit(args),
        Command::GenCorpus(args) => gen_corpus(args),
        Command::SimBundle { game, out, seed, scale } => sim_bundle(game, &out, seed, scale),
        Command::PreviewGrid { map, tolerance, check, json } => preview_grid(&map, tolerance, check, json),
        Command::ServeStudio(args) => crate::studio::serve(args),
    }
}

static INTERRUPT: Mutex<Option<Arc<AtomicBool>>> = Mutex::new(None);

/// Routes Ctrl-C to `flag`. The process-wide handler is installed once and
/// always targets the most recent flag.
pub(crate) fn stop_on_interrupt(flag: Arc<AtomicBool>) {
    static INSTALL: Once = Once::new();
    INSTALL.call_once(|| {
        let installed = ctrlc::set_handler(|| {
            if let Some(f) = INTERRUPT.lock().unwrap_or_else(|e| e.into_inner()).as_ref() {
                f.store(true, Ordering::SeqCst);
            }
        });
        if let Err(e) = installed {
            tracing::warn!("cannot install Ctrl-C handler: {e}");
        }
    });
    *INTERRUPT.lock().unwrap_or_else(|e| e.into_inner()) = Some(flag);
}

/// Speaks through every service in turn; the last failure is reported.
struct Tee(Vec<Arc<dyn TtsService>>);

impl TtsService for Tee {
    fn speak(&self, item: &SpeechItem, t_ms: u64) -> Result<(), ClientError> {
        let mut result = Ok(());
        for tts in &self.0 {
            if let Err(e) = tts.speak(item, t_ms) {
                result = Err(e);
            }
        }
        result
    }

    fn interrupt(&self) {
        for tts in &self.0 {
            tts.interrupt();
        }
    }
}

/// Counts the frames a session pulls.
struct Counted<'a> {
    inner: &'a mut dyn FrameSource,
    frames: usize,
}

impl FrameSource for Counted<'_> {
    fn kind(&self) -> SourceKind {
        self.inner.kind()
    }

    fn nominal_rate(&self) -> f64 {
        self.inner.nominal_rate()
    }

    fn next_frame(&mut self) -> Result<Option<Frame>, FrameError> {
        let frame = self.inner.next_frame()?;
        self.frames += usize::from(frame.is_some());
        Ok(frame)
    }
}

#[derive(Debug, Serialize)]
struct SessionSummary {
    frames: usize,
    events: usize,
    speech: usize,
    actions: usize,
    warnings: usize,
    vlm_calls: u64,
    final_state: String,
}

impl SessionSummary {
    fn line(&self) -> String {
        format!(
            "{} frames, {} events, {} utterances, {} actions, {} VLM calls, final state {}",
            self.frames, self.events, self.speech, self.actions, self.vlm_calls, self.final_state
        )
    }
}

struct SessionSetup<'a> {
    config: &'a GameConfig,
    bundle_dir: Option<&'a Path>,
    mode: Mode,
    player: PlayerMode,
    exec: astra_core::Execution,
    title: Option<String>,
    cache: Option<PathBuf>,
    out_dir: &'a Path,
}

fn profile_for(bundle_dir: Option<&Path>, config: &GameConfig, mode: PlayerMode) -> Result<Profile, CliError> {
    match bundle_dir {
        Some(dir) => Ok(load_profile(dir, mode)?),
        None => Ok(config.profiles.iter().find(|p| p.mode == mode).copied().unwrap_or_else(|| Profile::for_mode(mode))),
    }
}

/// Runs one session to the end of `source`, logging to `session.jsonl` and
/// `speech.jsonl` in the output directory.
fn drive(
    setup: SessionSetup<'_>,
    source: &mut dyn FrameSource,
    inputs: &[InputEvent],
    backend: Arc<dyn OutputBackend>,
) -> Result<SessionSummary, CliError> {
    let out = setup.out_dir;
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let speech_path = out.join("speech.jsonl");
    if speech_path.exists() {
        fs::remove_file(&speech_path).map_err(|e| CliError::io(&speech_path, e))?;
    }
    let transcript: Arc<dyn TtsService> =
        Arc::new(TranscriptTts::create(&speech_path).map_err(|e| CliError::io(&speech_path, e))?);
    let tts: Arc<dyn TtsService> = match ServiceEndpoint::from_env("TTS") {
        Some(ep) => Arc::new(Tee(vec![Arc::new(HttpTts::new(ep)), transcript])),
        None => transcript,
    };

    let mut opts = SessionOptions::new(setup.mode)
        .with_profile(profile_for(setup.bundle_dir, setup.config, setup.player)?)
        .with_exec(setup.exec);
    if let Some(title) = setup.title {
        opts = opts.with_title(title);
    }
    let mut session = Session::new(setup.config, opts, Clients::from_env(), tts, backend)?
        .with_log_file(&out.join("session.jsonl"))?;
    if let Some(path) = setup.cache {
        let cache = DescriptionCache::open(&path).map_err(|e| CliError::Failed(e.to_string()))?;
        session = session.with_cache(Arc::new(cache));
    }
    stop_on_interrupt(session.stop_handle());

    let mut counted = Counted { inner: source, frames: 0 };
    let outcome = session.run(&mut counted, inputs);
    // Flush whatever was logged even when the source failed.
    session.finish()?;
    outcome?;

    let mut summary = SessionSummary {
        frames: counted.frames,
        events: 0,
        speech: 0,
        actions: 0,
        warnings: 0,
        vlm_calls: session.clients().ledger.usage(ServiceKind::Vlm).calls,
        final_state: session.state().state_id.clone(),
    };
    for r in session.log().records() {
        match r.entry {
            LogEntry::Event { .. } => summary.events += 1,
            LogEntry::Speech { .. } => summary.speech += 1,
            LogEntry::Action { .. } => summary.actions += 1,
            LogEntry::Warning { .. } => summary.warnings += 1,
            _ => {}
        }
    }
    Ok(summary)
}

fn run(args: RunArgs) -> Result<(), CliError> {
    let setup = |config| SessionSetup {
        config,
        bundle_dir: args.bundle.as_deref(),
        mode: args.mode,
        player: args.profile.into(),
        exec: args.output.exec.into(),
        title: args.title.clone(),
        cache: args.cache.clone(),
        out_dir: &args.output.out_dir,
    };
    let summary = match &args.source {
        SourceSpec::Live => {
            return Err(CliError::Failed(
                "live capture is not available on this host; use --source trace:<dir> or sim:<game>".into(),
            ))
        }
        SourceSpec::Trace(dir) => {
            let bundle = args.bundle.as_deref().ok_or_else(|| CliError::Usage("--bundle is required for trace sources".into()))?;
            let config = load_game_config(bundle)?;
            let mut source = TraceSource::open(dir)?;
            let inputs = source.trace().inputs.clone();
            drive(setup(&config), &mut source, &inputs, Arc::new(NoBackend))?
        }
        SourceSpec::Sim(kind) => {
            let game = make_game(*kind, args.seed, args.scale);
            let config = match &args.bundle {
                Some(dir) => load_game_config(dir)?,
                None => game.bundle(),
            };
            let script = game.demo_script();
            let world = SimWorld::new(game).with_script(script).shared();
            let mut source = world.source(args.step_ms, Some(args.frames));
            drive(setup(&config), &mut source, &[], Arc::new(world.backend()))?
        }
    };
    println!("{}", summary.line());
    println!("logs in {}", args.output.out_dir.display());
    Ok(())
}

fn validate(bundle: &Path) -> Result<(), CliError> {
    if !bundle.is_dir() {
        return Err(CliError::Failed(format!("no bundle directory at {}", bundle.display())));
    }
    let (_, report) = inspect_bundle(bundle);
    for f in &report.findings {
        println!("{f}");
    }
    let errors = report.error_count();
    println!("{errors} errors, {} warnings", report.warnings().count());
    if errors > 0 {
        return Err(CliError::Findings(errors));
    }
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Serialize)]
struct ReplayReport {
    trace: String,
    frames: usize,
    digest: String,
    mode: Mode,
    session: SessionSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    metrics: Option<Metrics>,
}

fn replay(args: ReplayArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let config = load_game_config(&args.bundle)?;
    let trace = TraceReader::open(&args.trace)?;
    let setup = SessionSetup {
        config: &config,
        bundle_dir: Some(&args.bundle),
        mode: args.mode,
        player: args.profile.into(),
        exec: args.output.exec.into(),
        title: None,
        cache: None,
        out_dir: &args.output.out_dir,
    };
    let mut source = TraceSource::open(&args.trace)?;
    let session = drive(setup, &mut source, &trace.inputs, Arc::new(NoBackend))?;
    println!("{}", session.line());

    let metrics = if args.trace.join(astra_core::harness::TRUTH_FILE).exists() {
        let truth = CorpusTruth::load(&args.trace)?;
        let predicted = replay_corpus(&trace, &config, args.output.exec.into())?;
        let metrics = score_detections(&predicted, &truth.items())?;
        print!("{}", metrics.table());
        Some(metrics)
    } else {
        None
    };
    let report = ReplayReport {
        trace: args.trace.display().to_string(),
        frames: trace.len(),
        digest: format!("{:016x}", trace.digest()?),
        mode: args.mode,
        session,
        metrics,
    };
    write_json(&args.report, &report)?;
    println!("report written to {} in {:.1} s", args.report.display(), started.elapsed().as_secs_f64());
    Ok(())
}

#[derive(Debug, Serialize)]
struct SceneAudit {
    scene: String,
    navigation: NavigationAudit,
    #[serde(skip_serializing_if = "Option::is_none")]
    action: Option<ActionAudit>,
}

#[derive(Debug, Serialize)]
struct GameAudit {
    game: GameKind,
    mode: Mode,
    seed: u64,
    scenes: Vec<SceneAudit>,
    metrics: Metrics,
}

fn sum(ratios: impl Iterator<Item = Ratio>) -> Option<Ratio> {
    let (hits, total) = ratios.fold((0, 0), |(h, t), r| (h + r.hits, t + r.total));
    (total > 0).then_some(Ratio { hits, total })
}

fn audit_game(game: GameKind, scene: Option<&str>, mode: Mode, seed: u64) -> Result<GameAudit, CliError> {
    let mut sim = make_game(game, seed, 1);
    let scenes = match scene {
        Some(s) => vec![s.to_string()],
        None => sim.scenes(),
    };
    let opts = AuditOptions::new(mode).with_seed(seed);
    let mut audits = Vec::with_capacity(scenes.len());
    for scene in scenes {
        sim.set_scene(&scene)?;
        let targets: Vec<String> = sim.truth(0).targets.into_iter().map(|t| t.id).collect();
        let navigation = run_navigation_audit(game, &scene, &opts)?;
        let action = if targets.is_empty() { None } else { Some(run_action_audit(game, &scene, &targets, &opts)?) };
        audits.push(SceneAudit { scene, navigation, action });
    }
    let metrics = Metrics {
        coverage: sum(audits.iter().filter_map(|a| a.navigation.metrics.coverage)),
        action: sum(audits.iter().filter_map(|a| a.action.as_ref().and_then(|a| a.metrics.action))),
        ..Metrics::default()
    };
    Ok(GameAudit { game, mode, seed, scenes: audits, metrics })
}

fn audit(args: AuditArgs) -> Result<(), CliError> {
    let report = args.report.clone().unwrap_or_else(|| args.output.out_dir.join("report.json"));
    if let Some(path) = &args.scenario {
        let scenario = Scenario::load(path)?;
        let result = run_scenario(&scenario)?;
        print!("{}", result.table());
        write_json(&report, &result)?;
        println!("report written to {}", report.display());
        let failed = result.steps.iter().filter(|s| !s.ok).count();
        if failed > 0 {
            return Err(CliError::Failed(format!("{failed} of {} steps failed", result.steps.len())));
        }
        return Ok(());
    }
    let game = args.game.ok_or_else(|| CliError::Usage("audit needs --scenario or --game".into()))?;
    let result = audit_game(game, args.scene.as_deref(), args.mode, args.seed)?;
    println!("audit {} ({}, seed {})", result.game, result.mode, result.seed);
    for s in &result.scenes {
        let show = |r: Option<Ratio>| r.map_or("-".to_string(), |r| r.to_string());
        println!(
            "  {:<12} coverage {:<18} action {}",
            s.scene,
            show(s.navigation.metrics.coverage),
            show(s.action.as_ref().and_then(|a| a.metrics.action))
        );
    }
    print!("{}", result.metrics.table());
    write_json(&report, &result)?;
    println!("report written to {}", report.display());
    Ok(())
}

fn gen_corpus(args: GenCorpusArgs) -> Result<(), CliError> {
    if args.game != GameKind::Card {
        return Err(CliError::Usage(format!("corpus generation supports --game card, not {}", args.game)));
    }
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let frames = args.out.join("frames");
    if frames.exists() {
        fs::remove_dir_all(&frames).map_err(|e| CliError::io(&frames, e))?;
    }
    let (trace, truth) = gen_card_corpus(args.n, args.seed, args.jitter.into(), args.scale, &args.out)?;
    let items: usize = truth.frames.iter().map(|f| f.items.len()).sum();
    println!(
        "wrote {} frames with {items} items to {} (digest {:016x})",
        trace.len(),
        args.out.display(),
        trace.digest()?
    );
    Ok(())
}

fn sim_bundle(game: GameKind, out: &Path, seed: u64, scale: u32) -> Result<(), CliError> {
    let config = make_game(game, seed, scale).bundle();
    save_game_config(&config, out)?;
    println!("wrote {} bundle to {}", config.game_id, out.display());
    Ok(())
}

/// An element map with the rows the grid builder should produce.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFixture {
    #[serde(default)]
    description: String,
    tolerance: Option<f64>,
    map: ElementMap,
    expected_rows: Option<Vec<Vec<String>>>,
}

fn grid_rows(map: &ElementMap, tolerance: f64) -> Result<Vec<Vec<String>>, CliError> {
    match build_grid(map, tolerance) {
        Ok(grid) => Ok(grid.rows.iter().map(|row| row.iter().map(|e| e.content.clone()).collect()).collect()),
        Err(ActError::NoInteractiveElements(_)) => Ok(Vec::new()),
        Err(e) => Err(CliError::Failed(e.to_string())),
    }
}

fn preview_grid(path: &Path, tolerance: Option<f64>, check: bool, json: bool) -> Result<(), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?;
    let bad = |e: serde_json::Error| CliError::Failed(format!("{}: {e}", path.display()));
    let fixture = if value.get("map").is_some() {
        serde_json::from_value::<GridFixture>(value).map_err(bad)?
    } else {
        let map = serde_json::from_value::<ElementMap>(value).map_err(bad)?;
        GridFixture { description: String::new(), tolerance: None, map, expected_rows: None }
    };
    let tolerance = tolerance.or(fixture.tolerance).unwrap_or(ROW_TOLERANCE);
    let rows = grid_rows(&fixture.map, tolerance)?;

    if json {
        let out = serde_json::json!({"state_id": fixture.map.state_id, "tolerance": tolerance, "rows": rows});
        println!("{}", serde_json::to_string_pretty(&out).expect("plain json"));
    } else {
        if !fixture.description.is_empty() {
            println!("{}", fixture.description);
        }
        if rows.is_empty() {
            println!("no interactive elements in state {}", fixture.map.state_id);
        }
        for (r, row) in rows.iter().enumerate() {
            for (c, content) in row.iter().enumerate() {
                println!("({},{}) {content}", r + 1, c + 1);
            }
        }
    }
    if check {
        let expected = fixture.expected_rows.ok_or_else(|| CliError::Usage("--check needs a fixture with expected_rows".into()))?;
        if expected != rows {
            eprintln!("expected rows {expected:?}\n     got rows {rows:?}");
            return Err(CliError::Findings(1));
        }
        println!("rows match");
    }
    Ok(())
}
