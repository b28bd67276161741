//! A visual-novel scene: title menu, dialog lines over scene art and
//! choice panels. Menu and choice buttons carry only on-screen text, so
//! their element maps rely on OCR for labels.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::paint::{fill_circle, fill_rect, gradient, outline, Rgb};
use super::world::{GameKind, SceneTruth, SimGame, Target, TruthText};
use super::{common_bundle, HarnessError, Layout};
use crate::clients::bitcode;
use crate::config::{
    Chord, Element, ElementMap, GameConfig, HotkeyBinding, HotkeyKind, HotkeyOptions, MonitorBlock, PixelRect, Severity,
    VisualCue,
};
use crate::frames::Frame;

const WHITE: Rgb = [255, 255, 255];
const PLATE: Rgb = [90, 60, 120];

const LINES: [(&str, &str); 3] = [
    ("Aiko", "Good morning! Did you sleep well?"),
    ("Ren", "Not really. I kept thinking about the festival."),
    ("Aiko", "Then let's go together tonight!"),
];
const CHOICES_A: [&str; 3] = ["Go to the festival", "Stay home", "Ask about the shrine"];
const CHOICES_B: [&str; 3] = ["Take her hand", "Say nothing", "Change the subject"];
const MENU: [(&str, &str); 3] = [("new_game", "New Game"), ("continue", "Continue"), ("settings", "Settings")];

const SCENES: [&str; 6] = ["title", "dialog_1", "dialog_2", "dialog_3", "choice_a", "choice_b"];

#[derive(Debug, Clone)]
pub struct DialogGame {
    layout: Layout,
    scene: &'static str,
    /// Sky colours per art variant.
    palette: [(Rgb, Rgb); 4],
}

impl DialogGame {
    pub fn new(seed: u64, scale: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut palette = [([0u8; 3], [0u8; 3]); 4];
        for p in &mut palette {
            let top = [rng.random_range(20..120), rng.random_range(60..160), rng.random_range(140..250)];
            let bottom = [rng.random_range(180..250), rng.random_range(120..200), rng.random_range(60..140)];
            *p = (top, bottom);
        }
        DialogGame { layout: Layout { s: scale.max(1) }, scene: "title", palette }
    }

    fn state_of(scene: &str) -> &'static str {
        if scene.starts_with("dialog") {
            "dialog"
        } else if scene.starts_with("choice") {
            "choice"
        } else {
            "title"
        }
    }

    fn logo_rect(&self) -> PixelRect {
        self.layout.rect(180, 40, 280, 80)
    }
    fn menu_rect(&self, i: usize) -> PixelRect {
        self.layout.rect(240, 170 + 45 * i as u32, 160, 30)
    }
    fn box_rect(&self) -> PixelRect {
        self.layout.rect(20, 250, 600, 100)
    }
    fn emblem_rect(&self) -> PixelRect {
        self.layout.rect(34, 230, 20, 20)
    }
    fn log_rect(&self) -> PixelRect {
        self.layout.rect(540, 8, 40, 30)
    }
    fn menu_button_rect(&self) -> PixelRect {
        self.layout.rect(590, 8, 40, 30)
    }
    fn panel_header_rect(&self) -> PixelRect {
        self.layout.rect(160, 70, 320, 18)
    }
    fn choice_rect(&self, i: usize) -> PixelRect {
        self.layout.rect(190, 100 + 55 * i as u32, 260, 40)
    }

    fn strip_at(&self, x: u32, y: u32, text: &str) -> PixelRect {
        let (w, h) = bitcode::strip_size(text, 2 * self.layout.s);
        PixelRect::new(x, y, x + w, y + h)
    }

    fn centred_strip(&self, r: PixelRect, text: &str) -> PixelRect {
        let (w, h) = bitcode::strip_size(text, 2 * self.layout.s);
        let (cx, cy) = r.center();
        self.strip_at(cx - w / 2, cy - h / 2, text)
    }

    fn button(&self, f: &mut Frame, r: PixelRect, text: &str) {
        fill_rect(f, r, PLATE);
        outline(f, r, 2 * self.layout.s, WHITE);
        let t = self.centred_strip(r, text);
        bitcode::draw_text(f, t.left, t.top, text, 2 * self.layout.s);
    }

    fn art(&self, f: &mut Frame, variant: usize) {
        let l = self.layout;
        let s = l.s;
        let (top, bottom) = self.palette[variant % self.palette.len()];
        gradient(f, l.rect(0, 0, 640, 360), top, bottom);
        for (i, (x, r)) in [(90u32, 70u32), (300, 110), (520, 80)].into_iter().enumerate() {
            let shade = 40 + 25 * ((i + variant) % 3) as u8;
            fill_circle(f, i64::from(x * s), i64::from(260 * s), i64::from(r * s), [shade, 90 + shade, shade]);
        }
    }

    fn line(&self) -> Option<(&'static str, &'static str)> {
        let k: usize = self.scene.strip_prefix("dialog_")?.parse().ok()?;
        LINES.get(k - 1).copied()
    }

    fn choices(&self) -> Option<[&'static str; 3]> {
        match self.scene {
            "choice_a" => Some(CHOICES_A),
            "choice_b" => Some(CHOICES_B),
            _ => None,
        }
    }

    fn reference(&self, scene: &'static str) -> Frame {
        let mut g = self.clone();
        g.scene = scene;
        g.render(0)
    }
}

impl SimGame for DialogGame {
    fn kind(&self) -> GameKind {
        GameKind::Dialog
    }

    fn size(&self) -> (u32, u32) {
        self.layout.size()
    }

    fn bundle(&self) -> GameConfig {
        let l = self.layout;
        let mut cfg = GameConfig::empty("dialog");
        let cue = |event_id: &str, scene: &'static str, rect: PixelRect, msg: &str| {
            let block = l.block(rect);
            VisualCue {
                event_id: event_id.into(),
                image: self.reference(scene).crop(&block),
                region: block,
                message: BTreeMap::from([("en".to_string(), msg.to_string())]),
                severity: Severity::Normal,
            }
        };
        cfg.cues = vec![
            cue("title", "title", self.logo_rect(), "Title menu."),
            cue("choice", "choice_a", self.panel_header_rect(), "Make a choice."),
            cue("dialog", "dialog_1", self.emblem_rect(), "Story."),
        ];
        let blank = |r: PixelRect| Element::new(l.block(r), "", true);
        cfg.element_maps.insert("title".into(), ElementMap::new("title", (0..3).map(|i| blank(self.menu_rect(i))).collect()));
        cfg.element_maps.insert("choice".into(), ElementMap::new("choice", (0..3).map(|i| blank(self.choice_rect(i))).collect()));
        cfg.element_maps.insert(
            "dialog".into(),
            ElementMap::new(
                "dialog",
                vec![
                    Element::new(l.block(self.log_rect()), "Log", true),
                    Element::new(l.block(self.menu_button_rect()), "Menu", true),
                    Element::new(l.block(self.box_rect()), "Dialog box", true),
                ],
            ),
        );
        common_bundle(&mut cfg);
        let key = |s: &str| s.parse::<Chord>().expect("static chord");
        cfg.hotkeys.extend([
            HotkeyBinding {
                key: key("<alt>+s"),
                id: "last_line".into(),
                kind: HotkeyKind::StateQuery,
                options: HotkeyOptions { fact: Some("dialog".into()), ..Default::default() },
                active_states: vec!["dialog".into()],
            },
            HotkeyBinding {
                key: key("<alt>+d"),
                id: "describe_art".into(),
                kind: HotkeyKind::DescribeRegion,
                options: HotkeyOptions {
                    block: Some(l.block(l.rect(0, 40, 640, 180))),
                    prompt: Some("describe_region".into()),
                    fact: None,
                },
                active_states: vec!["dialog".into(), "choice".into()],
            },
        ]);
        cfg.set_label("last_line", "en", "Last line");
        cfg.change.blocks = vec![
            MonitorBlock { id: "dialog".into(), block: l.block(l.rect(20, 226, 600, 124)) },
            MonitorBlock { id: "art".into(), block: l.block(l.rect(0, 40, 640, 180)) },
        ];
        cfg
    }

    fn scenes(&self) -> Vec<String> {
        SCENES.iter().map(|s| s.to_string()).collect()
    }

    fn scene(&self) -> String {
        self.scene.to_string()
    }

    fn set_scene(&mut self, name: &str) -> Result<(), HarnessError> {
        self.scene = SCENES.iter().copied().find(|s| *s == name).ok_or_else(|| HarnessError::UnknownScene(name.into()))?;
        Ok(())
    }

    fn truth(&self, t_ms: u64) -> SceneTruth {
        let l = self.layout;
        let s = l.s;
        let mut truth = SceneTruth {
            t_ms,
            scene: self.scene.into(),
            state_id: Self::state_of(self.scene).into(),
            items: Vec::new(),
            texts: Vec::new(),
            targets: Vec::new(),
        };
        let add = |truth: &mut SceneTruth, id: String, label: &str, r: PixelRect, text: Option<PixelRect>| {
            truth.targets.push(Target { id, label: label.into(), block: l.block(r) });
            if let Some(t) = text {
                truth.texts.push(TruthText { text: label.into(), block: l.block(t) });
            }
        };
        if self.scene == "title" {
            for (i, (id, label)) in MENU.iter().enumerate() {
                let r = self.menu_rect(i);
                add(&mut truth, (*id).into(), label, r, Some(self.centred_strip(r, label)));
            }
        } else if let Some(choices) = self.choices() {
            for (i, label) in choices.iter().enumerate() {
                let r = self.choice_rect(i);
                add(&mut truth, format!("choice_{}", i + 1), label, r, Some(self.centred_strip(r, label)));
            }
        } else if let Some((name, line)) = self.line() {
            add(&mut truth, "log_button".into(), "Log", self.log_rect(), None);
            add(&mut truth, "menu_button".into(), "Menu", self.menu_button_rect(), None);
            add(&mut truth, "dialog_box".into(), "Dialog box", self.box_rect(), None);
            truth.texts.push(TruthText { text: name.into(), block: l.block(self.strip_at(60 * s, 232 * s, name)) });
            truth.texts.push(TruthText { text: line.into(), block: l.block(self.strip_at(40 * s, 280 * s, line)) });
        }
        truth
    }

    fn render(&self, _t_ms: u64) -> Frame {
        let l = self.layout;
        let s = l.s;
        let mut f = l.canvas([0, 0, 0]);
        if self.scene == "title" {
            gradient(&mut f, l.rect(0, 0, 640, 360), [60, 30, 90], [20, 10, 40]);
            let logo = self.logo_rect();
            fill_rect(&mut f, logo, [230, 180, 210]);
            outline(&mut f, logo, 3 * s, WHITE);
            for i in 0..5u32 {
                let (cx, cy) = (210 + 55 * i, 80);
                fill_circle(&mut f, i64::from(cx * s), i64::from(cy * s), i64::from(14 * s), [250, 120, 170]);
                fill_circle(&mut f, i64::from(cx * s), i64::from(cy * s), i64::from(5 * s), [255, 240, 120]);
            }
            for (i, (_, label)) in MENU.iter().enumerate() {
                self.button(&mut f, self.menu_rect(i), label);
            }
            return f;
        }
        if let Some(choices) = self.choices() {
            self.art(&mut f, if self.scene == "choice_a" { 3 } else { 1 });
            fill_rect(&mut f, l.rect(160, 70, 320, 200), [40, 30, 60]);
            for i in 0..16 {
                let colour = if i % 2 == 0 { [250, 120, 170] } else { [255, 240, 120] };
                fill_rect(&mut f, l.rect(160 + 20 * i, 70, 20, 18), colour);
            }
            for (i, label) in choices.iter().enumerate() {
                self.button(&mut f, self.choice_rect(i), label);
            }
            return f;
        }
        let (name, line) = self.line().expect("dialog scene");
        let k: usize = self.scene["dialog_".len()..].parse().expect("dialog index");
        self.art(&mut f, k - 1);
        let b = self.box_rect();
        fill_rect(&mut f, b, [30, 30, 50]);
        outline(&mut f, b, 2 * s, [200, 180, 230]);
        fill_rect(&mut f, l.rect(30, 226, 160, 28), PLATE);
        let e = self.emblem_rect();
        fill_rect(&mut f, e, [40, 20, 60]);
        for (dx, dy) in [(8, 2), (2, 8), (14, 8), (8, 14)] {
            fill_rect(&mut f, l.rect(34 + dx, 230 + dy, 4, 4), [255, 200, 230]);
        }
        bitcode::draw_text(&mut f, 60 * s, 232 * s, name, 2 * s);
        bitcode::draw_text(&mut f, 40 * s, 280 * s, line, 2 * s);
        for (r, bars) in [(self.log_rect(), 3u32), (self.menu_button_rect(), 2)] {
            fill_rect(&mut f, r, PLATE);
            for i in 0..bars {
                let y = r.top + (6 + 7 * i) * s;
                fill_rect(&mut f, PixelRect::new(r.left + 8 * s, y, r.right - 8 * s, y + 3 * s), WHITE);
            }
        }
        f
    }

    fn on_target(&mut self, id: &str) {
        self.scene = match (self.scene, id) {
            ("title", "new_game") => "dialog_1",
            ("dialog_1", "dialog_box") => "dialog_2",
            ("dialog_2", "dialog_box") => "dialog_3",
            ("dialog_3", "dialog_box") => "choice_a",
            ("choice_a", _) => "choice_b",
            ("choice_b", _) => "dialog_1",
            (scene, _) => scene,
        };
    }

    fn demo_script(&self) -> Vec<(u64, String)> {
        SCENES.iter().enumerate().map(|(i, s)| (i as u64 * 1500, s.to_string())).collect()
    }
}
