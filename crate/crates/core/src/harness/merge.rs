//! A fruit-merging game: fruits rest in a container; in the `moving` scene
//! they slide sideways, which makes stale click coordinates miss.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::paint::{fill_circle, fill_rect, outline, Rgb};
use super::world::{GameKind, SceneTruth, SimGame, Target, TruthItem, TruthText};
use super::{common_bundle, HarnessError, Layout};
use crate::clients::bitcode;
use crate::config::{
    Chord, Element, ElementMap, GameConfig, HotkeyBinding, HotkeyKind, HotkeyOptions, MonitorBlock, PixelRect, Severity,
    VisualCue,
};
use crate::frames::Frame;

const BACKGROUND: Rgb = [250, 232, 200];
const INTERIOR: Rgb = [245, 240, 220];
const WALL: Rgb = [140, 90, 50];
const WHITE: Rgb = [255, 255, 255];

/// Container interior in base units: x in [186, 424), y in [50, 344).
const INNER: (u32, u32, u32, u32) = (186, 50, 424, 344);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fruit {
    Cherry,
    Grape,
    Orange,
    Apple,
    Melon,
}

impl Fruit {
    const ALL: [Fruit; 5] = [Fruit::Cherry, Fruit::Grape, Fruit::Orange, Fruit::Apple, Fruit::Melon];

    fn radius(self) -> u32 {
        match self {
            Fruit::Cherry => 9,
            Fruit::Grape => 12,
            Fruit::Orange => 15,
            Fruit::Apple => 18,
            Fruit::Melon => 24,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Fruit::Cherry => "cherry",
            Fruit::Grape => "grape",
            Fruit::Orange => "orange",
            Fruit::Apple => "apple",
            Fruit::Melon => "melon",
        }
    }

    fn label(self) -> &'static str {
        match self {
            Fruit::Cherry => "Cherry",
            Fruit::Grape => "Grape",
            Fruit::Orange => "Orange",
            Fruit::Apple => "Apple",
            Fruit::Melon => "Melon",
        }
    }

    /// Draws the fruit centred at pixel `(cx, cy)`.
    fn draw(self, f: &mut Frame, cx: i64, cy: i64, s: u32) {
        let s = i64::from(s);
        let r = i64::from(self.radius()) * s;
        match self {
            Fruit::Cherry => {
                fill_circle(f, cx, cy, r, [200, 30, 50]);
                fill_rect(f, PixelRect::new((cx - s) as u32, (cy - r) as u32, (cx + s) as u32, (cy - r + 5 * s) as u32), [30, 90, 30]);
            }
            Fruit::Grape => {
                fill_circle(f, cx, cy, r, [120, 60, 160]);
                for (dx, dy) in [(-5, -3), (4, -4), (0, 5)] {
                    fill_circle(f, cx + dx * s, cy + dy * s, 2 * s, [210, 180, 240]);
                }
            }
            Fruit::Orange => {
                fill_circle(f, cx, cy, r, [250, 150, 30]);
                fill_circle(f, cx, cy, 9 * s, [200, 100, 10]);
                fill_circle(f, cx, cy, 5 * s, [250, 150, 30]);
            }
            Fruit::Apple => {
                fill_circle(f, cx, cy, r, [220, 60, 60]);
                fill_circle(f, cx - 7 * s, cy - 7 * s, 4 * s, WHITE);
            }
            Fruit::Melon => {
                fill_circle(f, cx, cy, r, [90, 180, 80]);
                for dx in [-12, -4, 4, 12] {
                    let x = (cx + dx * s) as u32;
                    fill_rect(f, PixelRect::new(x, (cy - 16 * s) as u32, x + 2 * s as u32, (cy + 16 * s) as u32), [30, 90, 30]);
                }
            }
        }
    }

    fn template(self, s: u32) -> Frame {
        let side = (2 * self.radius() + 1) * s;
        let mut f = Frame::solid(side, side, INTERIOR);
        let c = i64::from(self.radius() * s);
        self.draw(&mut f, c, c, s);
        f
    }
}

/// A fruit on a horizontal track. Speed is in base px per second; a
/// non-zero speed bounces between the container walls.
#[derive(Debug, Clone, Copy)]
struct Placed {
    fruit: Fruit,
    x: u32,
    y: u32,
    speed: u32,
}

impl Placed {
    /// Top-left corner in base units at time `t_ms`.
    fn corner(&self, t_ms: u64) -> (u32, u32) {
        let side = 2 * self.fruit.radius() + 1;
        if self.speed == 0 {
            return (self.x, self.y);
        }
        let span = u64::from(INNER.2 - INNER.0 - side);
        let travel = u64::from(self.x - INNER.0) + u64::from(self.speed) * t_ms / 1000;
        let phase = travel % (2 * span);
        let off = if phase <= span { phase } else { 2 * span - phase };
        (INNER.0 + off as u32, self.y)
    }
}

const SCENES: [&str; 4] = ["title", "playing", "moving", "game_over"];

#[derive(Debug, Clone)]
pub struct MergeGame {
    layout: Layout,
    scene: &'static str,
    resting: Vec<Placed>,
    sliding: Vec<Placed>,
    score: u32,
}

impl MergeGame {
    pub fn new(seed: u64, scale: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut resting: Vec<Placed> = Vec::new();
        let margin = 8;
        while resting.len() < 6 {
            let fruit = Fruit::ALL[rng.random_range(0..Fruit::ALL.len())];
            let side = 2 * fruit.radius() + 1;
            let x = rng.random_range(INNER.0..INNER.2 - side);
            let y = rng.random_range(INNER.1 + 40..INNER.3 - side);
            let clear = resting.iter().all(|p| {
                let ps = 2 * p.fruit.radius() + 1;
                x + side + margin <= p.x || p.x + ps + margin <= x || y + side + margin <= p.y || p.y + ps + margin <= y
            });
            if clear {
                resting.push(Placed { fruit, x, y, speed: 0 });
            }
        }
        // One lane per fruit so sliding fruits never overlap.
        let speeds = [0, 60, 0, 90, 60, 0];
        let mut sliding = Vec::new();
        let mut y = INNER.1 + 6;
        for (i, speed) in speeds.into_iter().enumerate() {
            let fruit = Fruit::ALL[(i + rng.random_range(0..2)) % 4];
            let side = 2 * fruit.radius() + 1;
            let x = rng.random_range(INNER.0..INNER.2 - side);
            sliding.push(Placed { fruit, x, y, speed });
            y += side + 10;
        }
        MergeGame { layout: Layout { s: scale.max(1) }, scene: "title", resting, sliding, score: rng.random_range(10..99) * 10 }
    }

    fn fruits(&self) -> &[Placed] {
        match self.scene {
            "playing" => &self.resting,
            "moving" => &self.sliding,
            _ => &[],
        }
    }

    fn fruit_rect(&self, p: &Placed, t_ms: u64) -> PixelRect {
        let (x, y) = p.corner(t_ms);
        let side = 2 * p.fruit.radius() + 1;
        self.layout.rect(x, y, side, side)
    }

    fn logo_rect(&self) -> PixelRect {
        self.layout.rect(200, 40, 240, 90)
    }
    fn start_rect(&self) -> PixelRect {
        self.layout.rect(260, 200, 120, 40)
    }
    fn ranking_rect(&self) -> PixelRect {
        self.layout.rect(260, 260, 120, 40)
    }
    fn next_header_rect(&self) -> PixelRect {
        self.layout.rect(460, 50, 150, 20)
    }
    fn pause_rect(&self) -> PixelRect {
        self.layout.rect(590, 8, 40, 32)
    }
    fn banner_rect(&self) -> PixelRect {
        self.layout.rect(160, 120, 320, 120)
    }
    fn banner_header_rect(&self) -> PixelRect {
        self.layout.rect(160, 120, 320, 16)
    }
    fn retry_rect(&self) -> PixelRect {
        self.layout.rect(280, 196, 80, 32)
    }

    fn score_text(&self) -> String {
        format!("Score {}", self.score)
    }

    fn button(&self, f: &mut Frame, r: PixelRect, text: &str) {
        let s = self.layout.s;
        fill_rect(f, r, [120, 80, 40]);
        outline(f, r, 2 * s, WHITE);
        let (w, h) = bitcode::strip_size(text, 2 * s);
        let (cx, cy) = r.center();
        bitcode::draw_text(f, cx - w / 2, cy - h / 2, text, 2 * s);
    }

    fn text_block(&self, r: PixelRect, text: &str) -> PixelRect {
        let (w, h) = bitcode::strip_size(text, 2 * self.layout.s);
        let (cx, cy) = r.center();
        PixelRect::new(cx - w / 2, cy - h / 2, cx - w / 2 + w, cy - h / 2 + h)
    }

    fn render_board(&self, f: &mut Frame, t_ms: u64) {
        let l = self.layout;
        let s = l.s;
        fill_rect(f, l.rect(180, 50, 250, 300), WALL);
        fill_rect(f, l.rect(INNER.0, INNER.1, INNER.2 - INNER.0, INNER.3 - INNER.1), INTERIOR);
        for i in 0..15 {
            let colour = if i % 2 == 0 { [90, 60, 30] } else { [240, 200, 120] };
            fill_rect(f, l.rect(460 + 10 * i, 50, 10, 20), colour);
        }
        fill_rect(f, l.rect(460, 70, 150, 70), [255, 245, 225]);
        outline(f, l.rect(460, 50, 150, 90), 2 * s, WALL);
        bitcode::draw_text(f, 20 * s, 20 * s, &self.score_text(), 2 * s);
        let pause = self.pause_rect();
        fill_rect(f, pause, [90, 60, 30]);
        fill_rect(f, l.rect(600, 14, 6, 20), WHITE);
        fill_rect(f, l.rect(614, 14, 6, 20), WHITE);
        for p in self.fruits() {
            let r = self.fruit_rect(p, t_ms);
            let (cx, cy) = (r.left + p.fruit.radius() * s, r.top + p.fruit.radius() * s);
            p.fruit.draw(f, i64::from(cx), i64::from(cy), s);
        }
    }

    fn reference(&self, scene: &'static str) -> Frame {
        let mut g = self.clone();
        g.scene = scene;
        g.render(0)
    }
}

impl SimGame for MergeGame {
    fn kind(&self) -> GameKind {
        GameKind::Merge
    }

    fn size(&self) -> (u32, u32) {
        self.layout.size()
    }

    fn bundle(&self) -> GameConfig {
        let l = self.layout;
        let mut cfg = GameConfig::empty("merge");
        let cue = |event_id: &'static str, scene: &'static str, rect: PixelRect, msg: &str| {
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
            cue("title", "title", self.logo_rect(), "Title screen."),
            cue("game_over", "game_over", self.banner_header_rect(), "Game over."),
            cue("playing", "playing", self.next_header_rect(), "Game started."),
        ];
        for fruit in Fruit::ALL {
            cfg.templates.insert(fruit.name().into(), fruit.template(l.s));
            cfg.set_label(fruit.name(), "en", fruit.label());
        }
        cfg.element_maps.insert(
            "title".into(),
            ElementMap::new(
                "title",
                vec![
                    Element::new(l.block(self.start_rect()), "Start", true),
                    Element::new(l.block(self.ranking_rect()), "Ranking", true),
                ],
            ),
        );
        cfg.element_maps.insert(
            "playing".into(),
            ElementMap::new("playing", vec![Element::new(l.block(self.pause_rect()), "Pause", true)]),
        );
        cfg.element_maps.insert(
            "game_over".into(),
            ElementMap::new("game_over", vec![Element::new(l.block(self.retry_rect()), "", true)]),
        );
        common_bundle(&mut cfg);
        cfg.hotkeys.push(HotkeyBinding {
            key: "<alt>+s".parse::<Chord>().expect("static chord"),
            id: "score".into(),
            kind: HotkeyKind::StateQuery,
            options: HotkeyOptions::default(),
            active_states: vec!["playing".into()],
        });
        cfg.set_label("score", "en", "Score");
        cfg.change.blocks = vec![
            MonitorBlock { id: "score".into(), block: l.block(l.rect(14, 14, 160, 28)) },
            MonitorBlock { id: "board".into(), block: l.block(l.rect(180, 50, 250, 300)) },
        ];
        cfg.detect.item_search = Some(l.block(l.rect(INNER.0, INNER.1, INNER.2 - INNER.0, INNER.3 - INNER.1)));
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
        let state_id = if self.scene == "moving" { "playing" } else { self.scene };
        let mut truth = SceneTruth {
            t_ms,
            scene: self.scene.into(),
            state_id: state_id.into(),
            items: Vec::new(),
            texts: Vec::new(),
            targets: Vec::new(),
        };
        match self.scene {
            "title" => {
                for (id, label, r) in [("start", "Start", self.start_rect()), ("ranking", "Ranking", self.ranking_rect())] {
                    truth.targets.push(Target { id: id.into(), label: label.into(), block: l.block(r) });
                    truth.texts.push(TruthText { text: label.into(), block: l.block(self.text_block(r, label)) });
                }
            }
            "game_over" => {
                truth.targets.push(Target { id: "retry".into(), label: "Retry".into(), block: l.block(self.retry_rect()) });
                truth.texts.push(TruthText { text: "Retry".into(), block: l.block(self.text_block(self.retry_rect(), "Retry")) });
            }
            _ => {
                let s = l.s;
                let text = self.score_text();
                let (w, h) = bitcode::strip_size(&text, 2 * s);
                truth.texts.push(TruthText { text, block: l.block(PixelRect::new(20 * s, 20 * s, 20 * s + w, 20 * s + h)) });
                truth.targets.push(Target { id: "pause".into(), label: "Pause".into(), block: l.block(self.pause_rect()) });
                for (i, p) in self.fruits().iter().enumerate() {
                    let block = l.block(self.fruit_rect(p, t_ms));
                    truth.items.push(TruthItem { template_name: p.fruit.name().into(), block });
                    truth.targets.push(Target { id: format!("fruit_{}", i + 1), label: p.fruit.label().into(), block });
                }
            }
        }
        truth
    }

    fn render(&self, t_ms: u64) -> Frame {
        let l = self.layout;
        let s = l.s;
        let mut f = l.canvas(BACKGROUND);
        match self.scene {
            "title" => {
                let logo = self.logo_rect();
                fill_rect(&mut f, logo, [255, 180, 120]);
                outline(&mut f, logo, 3 * s, WALL);
                for (i, fruit) in Fruit::ALL.into_iter().enumerate() {
                    let cx = 228 + 46 * i as u32;
                    let r = fruit.radius().min(18);
                    fill_circle(&mut f, i64::from(cx * s), i64::from(85 * s), i64::from(r * s), [200 - 30 * i as u8, 80 + 30 * i as u8, 60]);
                }
                self.button(&mut f, self.start_rect(), "Start");
                self.button(&mut f, self.ranking_rect(), "Ranking");
            }
            "game_over" => {
                self.render_board(&mut f, t_ms);
                fill_rect(&mut f, self.banner_rect(), [40, 30, 60]);
                for i in 0..16 {
                    let colour = if i % 2 == 0 { [220, 60, 60] } else { [250, 230, 90] };
                    fill_rect(&mut f, l.rect(160 + 20 * i, 120, 20, 16), colour);
                }
                bitcode::draw_text(&mut f, 270 * s, 150 * s, "Game Over", 2 * s);
                self.button(&mut f, self.retry_rect(), "Retry");
            }
            _ => self.render_board(&mut f, t_ms),
        }
        f
    }

    fn on_target(&mut self, id: &str) {
        match (self.scene, id) {
            ("title", "start") | ("game_over", "retry") => self.scene = "playing",
            ("playing", id) | ("moving", id) if id.starts_with("fruit_") => self.score += 10,
            _ => {}
        }
    }

    fn demo_script(&self) -> Vec<(u64, String)> {
        vec![(0, "title".into()), (1500, "playing".into()), (3000, "moving".into()), (5000, "game_over".into())]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::TemplateMatcher;
    use crate::Execution;

    fn detections_match(game: &MergeGame, t: u64) {
        let cfg = game.bundle();
        let m = TemplateMatcher::new(&cfg.templates, Execution::default());
        let found = m.find(&game.render(t), cfg.detect.match_threshold, cfg.detect.item_search.as_ref(), cfg.detect.nms_iou);
        let truth = game.truth(t);
        assert_eq!(found.len(), truth.items.len(), "{found:?} vs {:?}", truth.items);
        for it in &truth.items {
            assert!(found.iter().any(|d| d.template_name == it.template_name && d.block.iou(&it.block) > 0.99), "{it:?}");
        }
    }

    #[test]
    fn resting_fruits_are_found_exactly() {
        for seed in [1, 2, 3] {
            let mut g = MergeGame::new(seed, 1);
            g.set_scene("playing").unwrap();
            detections_match(&g, 0);
        }
    }

    #[test]
    fn sliding_fruits_are_found_wherever_they_are() {
        let mut g = MergeGame::new(4, 1);
        g.set_scene("moving").unwrap();
        for t in [0, 350, 2222] {
            detections_match(&g, t);
        }
    }

    #[test]
    fn sliding_fruit_stays_in_the_container() {
        let p = Placed { fruit: Fruit::Melon, x: 300, y: 60, speed: 90 };
        for t in (0..20_000).step_by(37) {
            let (x, _) = p.corner(t);
            assert!(x >= INNER.0 && x + 49 <= INNER.2, "t={t} x={x}");
        }
        assert_eq!(p.corner(0).0, 300);
        // 90 px right from 300 overshoots the last valid corner (424 - 49 = 375)
        // by 15 and bounces back to 360.
        assert_eq!(p.corner(1000).0, 360);
    }
}
