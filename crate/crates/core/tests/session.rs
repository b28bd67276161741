//! Whole sessions over simulated and recorded sources.

use std::sync::atomic::Ordering;
use std::sync::Arc;

use astra_core::act::NoBackend;
use astra_core::clients::{Clients, RecordingTts, SpeechRecord, TranscriptTts};
use astra_core::frames::{record_trace, FrameSource, TraceSource};
use astra_core::harness::{make_game, GameKind, SimWorld};
use astra_core::orchestrator::{LogEntry, Mode, Session, SessionOptions};

fn speech(session: &Session) -> Vec<(u64, String)> {
    session
        .log()
        .records()
        .iter()
        .filter_map(|r| match &r.entry {
            LogEntry::Speech { text, .. } => Some((r.t_ms, text.clone())),
            _ => None,
        })
        .collect()
}

fn sim_session(kind: GameKind, seed: u64, frames: usize) -> (Session, Vec<u64>) {
    let game = make_game(kind, seed, 1);
    let bundle = game.bundle();
    let script = game.demo_script();
    let world = SimWorld::new(game).with_script(script).shared();
    let mut keys = Vec::new();
    let mut source = world.source(100, Some(frames));
    let mut session = Session::new(
        &bundle,
        SessionOptions::new(Mode::Full),
        Clients::mock(),
        Arc::new(RecordingTts::new()),
        Arc::new(world.backend()),
    )
    .unwrap();
    while let Some(frame) = source.next_frame().unwrap() {
        keys.push(frame.content_key());
        session.on_frame(frame);
    }
    session.finish().unwrap();
    (session, keys)
}

#[test]
fn simulated_sessions_are_deterministic() {
    for kind in GameKind::ALL {
        let (a, ka) = sim_session(kind, 11, 40);
        let (b, kb) = sim_session(kind, 11, 40);
        assert_eq!(ka, kb, "{kind} frames");
        assert_eq!(speech(&a), speech(&b), "{kind} speech");
        assert!(!speech(&a).is_empty(), "{kind} said nothing");
    }
}

#[test]
fn recorded_trace_replays_like_the_live_run() {
    let dir = tempfile::tempdir().unwrap();
    let game = make_game(GameKind::Card, 4, 1);
    let bundle = game.bundle();
    let script = game.demo_script();
    let world = SimWorld::new(game).with_script(script).shared();
    let trace = record_trace(&mut world.source(100, Some(45)), [], dir.path()).unwrap();
    assert_eq!(trace.len(), 45);

    let (live, _) = sim_session(GameKind::Card, 4, 45);
    let mut source = TraceSource::open(dir.path()).unwrap();
    let mut replayed = Session::new(
        &bundle,
        SessionOptions::new(Mode::Full),
        Clients::mock(),
        Arc::new(RecordingTts::new()),
        Arc::new(NoBackend),
    )
    .unwrap();
    replayed.run(&mut source, &[]).unwrap();
    replayed.finish().unwrap();
    assert_eq!(speech(&replayed), speech(&live));
}

#[test]
fn log_and_transcript_files() {
    let dir = tempfile::tempdir().unwrap();
    let game = make_game(GameKind::Card, 2, 1);
    let bundle = game.bundle();
    let script = game.demo_script();
    let world = SimWorld::new(game).with_script(script).shared();
    let speech_path = dir.path().join("speech.jsonl");
    let log_path = dir.path().join("session.jsonl");
    let mut session = Session::new(
        &bundle,
        SessionOptions::new(Mode::Full),
        Clients::mock(),
        Arc::new(TranscriptTts::create(&speech_path).unwrap()),
        Arc::new(world.backend()),
    )
    .unwrap()
    .with_log_file(&log_path)
    .unwrap();
    session.run(&mut world.source(100, Some(40)), &[]).unwrap();
    session.finish().unwrap();

    let lines: Vec<serde_json::Value> =
        std::fs::read_to_string(&log_path).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), session.log().len());
    let times: Vec<u64> = lines.iter().map(|v| v["t_ms"].as_u64().unwrap()).collect();
    assert!(times.windows(2).all(|w| w[0] <= w[1]));

    let spoken = SpeechRecord::read_all(&speech_path).unwrap();
    assert!(!spoken.is_empty());
    assert_eq!(spoken[0].text, "You are in homepage!");
    assert!(spoken.windows(2).all(|w| w[0].t_ms <= w[1].t_ms));
    for r in &spoken {
        let power = r.gl * r.gl + r.gr * r.gr;
        assert!((power - 1.0).abs() < 1e-9, "{r:?}");
    }
}

#[test]
fn stop_flag_ends_the_run() {
    let game = make_game(GameKind::Dialog, 1, 1);
    let bundle = game.bundle();
    let world = SimWorld::new(game).shared();
    let mut session = Session::new(
        &bundle,
        SessionOptions::new(Mode::Full),
        Clients::mock(),
        Arc::new(RecordingTts::new()),
        Arc::new(world.backend()),
    )
    .unwrap();
    session.stop_handle().store(true, Ordering::SeqCst);
    let mut source = world.source(100, Some(10));
    session.run(&mut source, &[]).unwrap();
    assert!(speech(&session).is_empty());
    assert!(source.next_frame().unwrap().is_some(), "frames were consumed after stop");
}
