//! Bundle layout on disk:
//!
//! ```text
//! game.json                      manifest (cues, change, detect, spatial)
//! cues/<event_id>.png            cue exemplar
//! cues/<event_id>.txt            cue message, default language
//! cues/<event_id>.<lang>.txt     cue message, other languages
//! templates/<name>.png           item templates
//! prompts/<key>.txt              prompt templates
//! labels/label_<lang>.json       {"key": "text"}
//! maps/<state_id>.json           {"state_id": ..., "elements": [...]}
//! hotkeys.json                   [binding, ...]
//! profile_blind.json, profile_low_vision.json
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::validate::{validate_config, Finding, FindingCode, ValidationReport};
use super::{
    ChangeConfig, ConfigError, DetectConfig, ElementMap, GameConfig, HotkeyBinding, NormalizedBlock, PlayerMode,
    Profile, Severity, SpatialConfig, VisualCue,
};
use crate::frames::Frame;

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    game_id: String,
    #[serde(default = "default_language")]
    default_language: String,
    #[serde(default)]
    cues: Vec<CueEntry>,
    #[serde(default)]
    change: ChangeConfig,
    #[serde(default)]
    detect: DetectConfig,
    #[serde(default)]
    spatial: SpatialConfig,
}

fn default_language() -> String {
    "en".into()
}

#[derive(Debug, Serialize, Deserialize)]
struct CueEntry {
    event_id: String,
    #[serde(default = "full_block")]
    region: NormalizedBlock,
    #[serde(default)]
    severity: Severity,
}

fn full_block() -> NormalizedBlock {
    NormalizedBlock::FULL
}

/// Loads and validates a bundle. Fails on the first error finding.
pub fn load_game_config(dir: impl AsRef<Path>) -> Result<GameConfig, ConfigError> {
    let (config, report) = inspect_bundle(dir);
    if let Some(first) = report.errors().next() {
        return Err(ConfigError::from_finding(first));
    }
    Ok(config.expect("error-free inspection yields a config"))
}

/// Parses a bundle and returns every finding instead of stopping at the first.
/// The config is `None` only when parsing itself failed.
pub fn inspect_bundle(dir: impl AsRef<Path>) -> (Option<GameConfig>, ValidationReport) {
    let dir = dir.as_ref();
    let mut report = ValidationReport::default();
    let config = parse_bundle(dir, &mut report);
    if let Some(cfg) = &config {
        report.extend(validate_config(cfg));
    }
    (config, report)
}

fn parse_bundle(dir: &Path, report: &mut ValidationReport) -> Option<GameConfig> {
    let manifest: Manifest = parse_json_file(&dir.join("game.json"), "game.json", report, true)?;

    let mut cues = Vec::new();
    let mut declared: Vec<CueEntry> = manifest.cues;
    let cue_dir = dir.join("cues");
    for stem in list_stems(&cue_dir, "png") {
        if !declared.iter().any(|c| c.event_id == stem) {
            declared.push(CueEntry { event_id: stem, region: NormalizedBlock::FULL, severity: Severity::Normal });
        }
    }
    for entry in declared {
        let png = cue_dir.join(format!("{}.png", entry.event_id));
        let txt = cue_dir.join(format!("{}.txt", entry.event_id));
        let image = load_image(&png, &format!("cues/{}.png", entry.event_id), report);
        let mut message = BTreeMap::new();
        match fs::read_to_string(&txt) {
            Ok(t) => {
                message.insert(manifest.default_language.clone(), t.trim_end().to_string());
            }
            Err(_) => report.push(Finding::error(
                FindingCode::MissingFile(format!("cues/{}.txt", entry.event_id)),
                format!("cues/{}.txt", entry.event_id),
                format!("cue {:?} is missing its message file", entry.event_id),
            )),
        }
        for (lang, path) in localized_messages(&cue_dir, &entry.event_id) {
            if let Ok(t) = fs::read_to_string(path) {
                message.insert(lang, t.trim_end().to_string());
            }
        }
        if let Some(image) = image {
            cues.push(VisualCue {
                event_id: entry.event_id,
                image,
                region: entry.region,
                message,
                severity: entry.severity,
            });
        }
    }

    let mut templates = BTreeMap::new();
    for stem in list_stems(&dir.join("templates"), "png") {
        let rel = format!("templates/{stem}.png");
        if let Some(img) = load_image(&dir.join(&rel), &rel, report) {
            templates.insert(stem, img);
        }
    }

    let mut prompts = BTreeMap::new();
    for stem in list_stems(&dir.join("prompts"), "txt") {
        if let Ok(t) = fs::read_to_string(dir.join("prompts").join(format!("{stem}.txt"))) {
            prompts.insert(stem, t.trim_end().to_string());
        }
    }

    let mut labels: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    for stem in list_stems(&dir.join("labels"), "json") {
        let Some(lang) = stem.strip_prefix("label_") else { continue };
        let rel = format!("labels/{stem}.json");
        let table: Option<BTreeMap<String, String>> = parse_json_file(&dir.join(&rel), &rel, report, true);
        for (k, v) in table.unwrap_or_default() {
            labels.entry(k).or_default().insert(lang.to_string(), v);
        }
    }

    let mut element_maps = BTreeMap::new();
    for stem in list_stems(&dir.join("maps"), "json") {
        let rel = format!("maps/{stem}.json");
        if let Some(map) = parse_json_file::<ElementMap>(&dir.join(&rel), &rel, report, true) {
            element_maps.insert(stem, map);
        }
    }

    let hotkeys: Vec<HotkeyBinding> =
        parse_json_file(&dir.join("hotkeys.json"), "hotkeys.json", report, false).unwrap_or_default();

    let mut profiles = Vec::new();
    for mode in [PlayerMode::Blind, PlayerMode::LowVision] {
        let name = mode.file_name();
        if let Some(p) = parse_json_file::<Profile>(&dir.join(name), name, report, false) {
            profiles.push(p);
        }
    }

    if report.error_count() > 0 {
        return None;
    }
    Some(GameConfig {
        game_id: manifest.game_id,
        default_language: manifest.default_language,
        cues,
        templates,
        element_maps,
        hotkeys,
        prompts,
        labels,
        profiles,
        change: manifest.change,
        detect: manifest.detect,
        spatial: manifest.spatial,
    })
}

/// Reads one player profile from a bundle.
pub fn load_profile(dir: impl AsRef<Path>, mode: PlayerMode) -> Result<Profile, ConfigError> {
    let name = mode.file_name();
    let mut report = ValidationReport::default();
    let profile = parse_json_file::<Profile>(&dir.as_ref().join(name), name, &mut report, true);
    if let Some(f) = report.errors().next() {
        return Err(ConfigError::from_finding(f));
    }
    match profile {
        Some(p) if !p.is_consistent() => Err(ConfigError::SchemaViolation {
            location: format!("{name}#"),
            message: "blind profiles must use keyboard input without OCR hover".into(),
        }),
        Some(p) => Ok(p),
        None => Err(ConfigError::MissingFile { path: name.into() }),
    }
}

/// Writes a bundle that [`load_game_config`] reads back unchanged.
pub fn save_game_config(config: &GameConfig, dir: impl AsRef<Path>) -> Result<(), ConfigError> {
    let dir = dir.as_ref();
    let mkdir = |p: PathBuf| fs::create_dir_all(&p).map_err(|e| ConfigError::io(&p, e));
    mkdir(dir.to_path_buf())?;
    for sub in ["cues", "templates", "prompts", "labels", "maps"] {
        mkdir(dir.join(sub))?;
    }
    let manifest = Manifest {
        game_id: config.game_id.clone(),
        default_language: config.default_language.clone(),
        cues: config
            .cues
            .iter()
            .map(|c| CueEntry { event_id: c.event_id.clone(), region: c.region, severity: c.severity })
            .collect(),
        change: config.change.clone(),
        detect: config.detect.clone(),
        spatial: config.spatial,
    };
    write_json(&dir.join("game.json"), &manifest)?;
    for cue in &config.cues {
        write_bytes(&dir.join("cues").join(format!("{}.png", cue.event_id)), &cue.image.encode_png())?;
        for (lang, text) in &cue.message {
            let name = if *lang == config.default_language {
                format!("{}.txt", cue.event_id)
            } else {
                format!("{}.{lang}.txt", cue.event_id)
            };
            write_bytes(&dir.join("cues").join(name), format!("{text}\n").as_bytes())?;
        }
    }
    for (name, img) in &config.templates {
        write_bytes(&dir.join("templates").join(format!("{name}.png")), &img.encode_png())?;
    }
    for (key, text) in &config.prompts {
        write_bytes(&dir.join("prompts").join(format!("{key}.txt")), format!("{text}\n").as_bytes())?;
    }
    let mut by_lang: BTreeMap<&str, BTreeMap<&str, &str>> = BTreeMap::new();
    for (key, langs) in &config.labels {
        for (lang, text) in langs {
            by_lang.entry(lang).or_default().insert(key, text);
        }
    }
    for (lang, table) in by_lang {
        write_json(&dir.join("labels").join(format!("label_{lang}.json")), &table)?;
    }
    for (state, map) in &config.element_maps {
        write_json(&dir.join("maps").join(format!("{state}.json")), map)?;
    }
    write_json(&dir.join("hotkeys.json"), &config.hotkeys)?;
    for p in &config.profiles {
        write_json(&dir.join(p.mode.file_name()), p)?;
    }
    Ok(())
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), ConfigError> {
    let mut text = serde_json::to_string_pretty(value).expect("config types serialize");
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), ConfigError> {
    fs::write(path, bytes).map_err(|e| ConfigError::io(path, e))
}

fn list_stems(dir: &Path, ext: &str) -> Vec<String> {
    let Ok(rd) = fs::read_dir(dir) else { return Vec::new() };
    let mut stems: Vec<String> = rd
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == ext))
        .filter_map(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()))
        // `<id>.<lang>.txt` files are language variants, not entries of their own.
        .filter(|s| ext != "txt" || !s.contains('.'))
        .collect();
    stems.sort();
    stems
}

fn localized_messages(cue_dir: &Path, event_id: &str) -> Vec<(String, PathBuf)> {
    let Ok(rd) = fs::read_dir(cue_dir) else { return Vec::new() };
    let prefix = format!("{event_id}.");
    let mut out: Vec<(String, PathBuf)> = rd
        .filter_map(Result::ok)
        .filter_map(|e| {
            let name = e.file_name().to_string_lossy().into_owned();
            let lang = name.strip_prefix(&prefix)?.strip_suffix(".txt")?.to_string();
            (!lang.is_empty() && !lang.contains('.')).then(|| (lang, e.path()))
        })
        .collect();
    out.sort();
    out
}

fn load_image(path: &Path, rel: &str, report: &mut ValidationReport) -> Option<Frame> {
    match fs::read(path) {
        Ok(bytes) => match Frame::decode_png(&bytes) {
            Ok(f) => Some(f),
            Err(e) => {
                report.push(Finding::error(FindingCode::SchemaViolation, rel, format!("cannot decode image: {e}")));
                None
            }
        },
        Err(_) => {
            report.push(Finding::error(FindingCode::MissingFile(rel.into()), rel, format!("missing file {rel}")));
            None
        }
    }
}

fn parse_json_file<T: DeserializeOwned>(
    path: &Path,
    rel: &str,
    report: &mut ValidationReport,
    required: bool,
) -> Option<T> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(_) => {
            if required {
                report.push(Finding::error(FindingCode::MissingFile(rel.into()), rel, format!("missing file {rel}")));
            }
            return None;
        }
    };
    match parse_json_str(&text) {
        Ok(v) => Some(v),
        Err((pointer, message)) => {
            let code = if message.contains("invalid block") { FindingCode::BadBlock } else { FindingCode::SchemaViolation };
            report.push(Finding::error(code, format!("{rel}#{pointer}"), message));
            None
        }
    }
}

/// Deserializes `text`, reporting failures with a JSON pointer.
pub(crate) fn parse_json_str<T: DeserializeOwned>(text: &str) -> Result<T, (String, String)> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|err| {
        let mut pointer = String::new();
        for seg in err.path().iter() {
            use serde_path_to_error::Segment;
            match seg {
                Segment::Seq { index } => pointer.push_str(&format!("/{index}")),
                Segment::Map { key } => pointer.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
                Segment::Enum { variant } => pointer.push_str(&format!("/{variant}")),
                Segment::Unknown => {}
            }
        }
        (pointer, err.into_inner().to_string())
    })
}
