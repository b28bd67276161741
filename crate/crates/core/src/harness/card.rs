//! A shedding card game: icon-only homepage, a table with a draw pile, a
//! discard pile and the player's hand.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::paint::{self, fill_rect, glyph, glyphs, outline, Rgb};
use super::world::{GameKind, SceneTruth, SimGame, Target, TruthItem, TruthText};
use super::{common_bundle, HarnessError, Layout};
use crate::clients::bitcode;
use crate::config::{
    Chord, Element, ElementMap, GameConfig, HotkeyBinding, HotkeyKind, HotkeyOptions, MonitorBlock, PixelRect, Severity,
    VisualCue,
};
use crate::frames::Frame;

pub const CARD_W: u32 = 36;
pub const CARD_H: u32 = 54;
const GAP: u32 = 6;
const HAND_Y: u32 = 290;
const MAX_HAND: usize = 9;

const WHITE: Rgb = [255, 255, 255];
const BLACK: Rgb = [0, 0, 0];
const TABLE: Rgb = [30, 110, 60];
const NIGHT: Rgb = [20, 30, 60];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Colour {
    Red,
    Yellow,
    Green,
    Blue,
}

impl Colour {
    pub const ALL: [Colour; 4] = [Colour::Red, Colour::Yellow, Colour::Green, Colour::Blue];

    fn name(self) -> &'static str {
        match self {
            Colour::Red => "red",
            Colour::Yellow => "yellow",
            Colour::Green => "green",
            Colour::Blue => "blue",
        }
    }

    fn rgb(self) -> Rgb {
        match self {
            Colour::Red => [210, 40, 40],
            Colour::Yellow => [230, 200, 30],
            Colour::Green => [40, 160, 70],
            Colour::Blue => [40, 90, 210],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Face {
    Number(u8),
    Skip,
    Reverse,
    DrawTwo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Card {
    Coloured(Colour, Face),
    Wild,
    WildDrawFour,
}

impl Card {
    /// One card of every kind: 4 x 13 coloured cards plus the two wilds.
    pub fn kinds() -> Vec<Card> {
        let mut out = Vec::with_capacity(54);
        for c in Colour::ALL {
            out.extend((0..=9).map(|n| Card::Coloured(c, Face::Number(n))));
            out.extend([Face::Skip, Face::Reverse, Face::DrawTwo].map(|f| Card::Coloured(c, f)));
        }
        out.push(Card::Wild);
        out.push(Card::WildDrawFour);
        out
    }

    pub fn template_name(self) -> String {
        match self {
            Card::Coloured(c, Face::Number(n)) => format!("{}_{n}", c.name()),
            Card::Coloured(c, Face::Skip) => format!("{}_skip", c.name()),
            Card::Coloured(c, Face::Reverse) => format!("{}_reverse", c.name()),
            Card::Coloured(c, Face::DrawTwo) => format!("{}_draw2", c.name()),
            Card::Wild => "wild".into(),
            Card::WildDrawFour => "wild_draw4".into(),
        }
    }

    /// Spoken name, e.g. "Green Skip".
    pub fn label(self) -> String {
        let colour = |c: Colour| {
            let n = c.name();
            n[..1].to_uppercase() + &n[1..]
        };
        match self {
            Card::Coloured(c, Face::Number(n)) => format!("{} {n}", colour(c)),
            Card::Coloured(c, Face::Skip) => format!("{} Skip", colour(c)),
            Card::Coloured(c, Face::Reverse) => format!("{} Reverse", colour(c)),
            Card::Coloured(c, Face::DrawTwo) => format!("{} Draw Two", colour(c)),
            Card::Wild => "Wild".into(),
            Card::WildDrawFour => "Wild Draw Four".into(),
        }
    }

    /// Face image at `scale`. Each colour carries a black bar on a different
    /// inner edge so colours differ in structure, not only in brightness.
    pub fn render(self, scale: u32) -> Frame {
        let s = scale;
        let r = |x: u32, y: u32, w: u32, h: u32| PixelRect::new(x * s, y * s, (x + w) * s, (y + h) * s);
        let mut f = Frame::solid(CARD_W * s, CARD_H * s, WHITE);
        match self {
            Card::Coloured(c, face) => {
                fill_rect(&mut f, r(2, 2, 32, 50), c.rgb());
                let bar = match c {
                    Colour::Red => r(2, 2, 32, 4),
                    Colour::Yellow => r(30, 2, 4, 50),
                    Colour::Green => r(2, 48, 32, 4),
                    Colour::Blue => r(2, 2, 4, 50),
                };
                fill_rect(&mut f, bar, BLACK);
                let (corner, centre) = match face {
                    Face::Number(n) => {
                        let ch = char::from(b'0' + n);
                        (ch.to_string(), ch.to_string())
                    }
                    Face::Skip => ("S".into(), "S".into()),
                    Face::Reverse => ("R".into(), "R".into()),
                    Face::DrawTwo => ("+2".into(), "+2".into()),
                };
                glyphs(&mut f, 8 * s, 8 * s, &corner, s, WHITE);
                if centre.len() == 1 {
                    glyphs(&mut f, 12 * s, 17 * s, &centre, 4 * s, WHITE);
                } else {
                    glyphs(&mut f, 7 * s, 19 * s, &centre, 3 * s, WHITE);
                }
            }
            Card::Wild => {
                fill_rect(&mut f, r(2, 2, 32, 50), [25, 25, 25]);
                for (i, c) in Colour::ALL.into_iter().enumerate() {
                    let (dx, dy) = ((i as u32 % 2) * 8, (i as u32 / 2) * 8);
                    fill_rect(&mut f, r(10 + dx, 19 + dy, 8, 8), c.rgb());
                }
            }
            Card::WildDrawFour => {
                fill_rect(&mut f, r(2, 2, 32, 50), [25, 25, 25]);
                for (i, c) in Colour::ALL.into_iter().enumerate() {
                    let (dx, dy) = ((i as u32 % 2) * 6, (i as u32 / 2) * 6);
                    fill_rect(&mut f, r(12 + dx, 8 + dy, 6, 6), c.rgb());
                }
                glyphs(&mut f, 7 * s, 28 * s, "+4", 3 * s, WHITE);
            }
        }
        f
    }
}

fn deck_back(scale: u32) -> Frame {
    let s = scale;
    let mut f = Frame::solid(CARD_W * s, CARD_H * s, WHITE);
    fill_rect(&mut f, PixelRect::new(2 * s, 2 * s, 34 * s, 52 * s), [110, 20, 20]);
    paint::fill_circle(&mut f, i64::from(18 * s), i64::from(27 * s), i64::from(11 * s), [240, 200, 40]);
    paint::fill_circle(&mut f, i64::from(18 * s), i64::from(27 * s), i64::from(6 * s), [110, 20, 20]);
    f
}

/// Per-card placement noise used by the corpus generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CardJitter {
    pub dx: i32,
    pub dy: i32,
    pub gain: f64,
}

impl CardJitter {
    pub const NONE: CardJitter = CardJitter { dx: 0, dy: 0, gain: 1.0 };
}

const SCENES: [&str; 3] = ["homepage", "game", "your_turn"];
const HOME_BUTTONS: [(&str, &str); 4] =
    [("local_mode", "Local Mode"), ("online_mode", "Online Mode"), ("settings", "Settings"), ("exit", "Exit")];

#[derive(Debug, Clone)]
pub struct CardGame {
    layout: Layout,
    rng: ChaCha8Rng,
    scene: &'static str,
    hand: Vec<Card>,
    discard: Card,
    score: u32,
    opponent: u32,
    hand_jitter: Vec<CardJitter>,
    discard_jitter: CardJitter,
}

fn random_card(rng: &mut ChaCha8Rng) -> Card {
    let kinds = Card::kinds();
    kinds[rng.random_range(0..kinds.len())]
}

impl CardGame {
    pub fn new(seed: u64, scale: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hand = (0..7).map(|_| random_card(&mut rng)).collect();
        let discard = Card::Coloured(Colour::ALL[rng.random_range(0..4)], Face::Number(rng.random_range(0..10)));
        let score = rng.random_range(0..50) * 10;
        let opponent = rng.random_range(3..8);
        CardGame {
            layout: Layout { s: scale.max(1) },
            rng,
            scene: "homepage",
            hand,
            discard,
            score,
            opponent,
            hand_jitter: Vec::new(),
            discard_jitter: CardJitter::NONE,
        }
    }

    /// A table scene with a given hand and discard; jitter entries apply to
    /// the hand cards in order and then to the discard.
    pub fn with_table(mut self, hand: Vec<Card>, discard: Card, jitter: Vec<CardJitter>) -> Self {
        assert!(!hand.is_empty() && hand.len() <= MAX_HAND, "hand must hold 1..={MAX_HAND} cards");
        self.hand_jitter = jitter.iter().copied().take(hand.len()).collect();
        self.discard_jitter = jitter.get(hand.len()).copied().unwrap_or(CardJitter::NONE);
        self.hand = hand;
        self.discard = discard;
        self.scene = "your_turn";
        self
    }

    pub fn hand(&self) -> &[Card] {
        &self.hand
    }

    pub fn discard(&self) -> Card {
        self.discard
    }

    fn jitter(&self, i: usize) -> CardJitter {
        self.hand_jitter.get(i).copied().unwrap_or(CardJitter::NONE)
    }

    fn card_rect(&self, x: u32, y: u32, j: CardJitter) -> PixelRect {
        let s = self.layout.s as i32;
        let left = (x as i32 * s + j.dx * s) as u32;
        let top = (y as i32 * s + j.dy * s) as u32;
        PixelRect::new(left, top, left + CARD_W * self.layout.s, top + CARD_H * self.layout.s)
    }

    fn hand_rects(&self) -> Vec<PixelRect> {
        let k = self.hand.len() as u32;
        let total = k * CARD_W + k.saturating_sub(1) * GAP;
        let x0 = (super::BASE_WIDTH - total) / 2;
        (0..self.hand.len()).map(|i| self.card_rect(x0 + i as u32 * (CARD_W + GAP), HAND_Y, self.jitter(i))).collect()
    }

    fn discard_rect(&self) -> PixelRect {
        self.card_rect(300, 110, self.discard_jitter)
    }

    fn deck_rect(&self) -> PixelRect {
        self.layout.rect(232, 110, CARD_W, CARD_H)
    }

    fn uno_rect(&self) -> PixelRect {
        self.layout.rect(520, 120, 80, 40)
    }

    fn logo_rect(&self) -> PixelRect {
        self.layout.rect(220, 30, 200, 70)
    }

    fn indicator_rect(&self) -> PixelRect {
        self.layout.rect(12, 6, 48, 24)
    }

    fn home_button_rect(&self, i: usize) -> PixelRect {
        self.layout.rect(100 + 120 * i as u32, 200, 80, 60)
    }

    fn score_text(&self) -> String {
        format!("Score {}", self.score)
    }

    fn opponent_text(&self) -> String {
        format!("Opponent {} cards", self.opponent)
    }

    fn render_homepage(&self) -> Frame {
        let l = self.layout;
        let s = l.s;
        let mut f = l.canvas(NIGHT);
        fill_rect(&mut f, self.logo_rect(), [200, 40, 40]);
        for (i, c) in [Colour::Yellow, Colour::Green, Colour::Blue].into_iter().enumerate() {
            fill_rect(&mut f, l.rect(245 + 55 * i as u32, 40, 40, 50), c.rgb());
        }
        outline(&mut f, self.logo_rect(), 3 * s, WHITE);
        for i in 0..4 {
            let r = self.home_button_rect(i);
            fill_rect(&mut f, r, [60, 80, 140]);
            outline(&mut f, r, 2 * s, WHITE);
            let (cx, cy) = r.center();
            let icon = l.rect(0, 0, 30, 30);
            let icon = PixelRect::new(cx - icon.right / 2, cy - icon.bottom / 2, cx + icon.right / 2, cy + icon.bottom / 2);
            match i {
                0 => paint::fill_triangle(&mut f, icon, WHITE),
                1 => paint::fill_circle(&mut f, i64::from(cx), i64::from(cy), i64::from(14 * s), WHITE),
                2 => {
                    fill_rect(&mut f, icon, WHITE);
                    fill_rect(&mut f, PixelRect::new(cx - 6 * s, cy - 6 * s, cx + 6 * s, cy + 6 * s), [60, 80, 140]);
                }
                _ => {
                    fill_rect(&mut f, PixelRect::new(icon.left, cy - 3 * s, icon.right, cy + 3 * s), WHITE);
                    fill_rect(&mut f, PixelRect::new(cx - 3 * s, icon.top, cx + 3 * s, icon.bottom), WHITE);
                }
            }
        }
        f
    }

    fn render_table(&self, your_turn: bool) -> Frame {
        let l = self.layout;
        let s = l.s;
        let mut f = l.canvas(TABLE);
        fill_rect(&mut f, l.rect(0, 0, 640, 36), [20, 40, 25]);
        let ind = self.indicator_rect();
        if your_turn {
            fill_rect(&mut f, ind, BLACK);
            glyph(&mut f, ind.left + 18 * s, ind.top + 2 * s, '>', 4 * s, [240, 220, 40]);
        } else {
            fill_rect(&mut f, ind, [60, 60, 60]);
        }
        bitcode::draw_text(&mut f, 120 * s, 10 * s, &self.opponent_text(), 2 * s);
        bitcode::draw_text(&mut f, 500 * s, 10 * s, &self.score_text(), 2 * s);
        let deck = self.deck_rect();
        paint::paste(&mut f, &deck_back(s), deck.left, deck.top);
        let uno = self.uno_rect();
        fill_rect(&mut f, uno, [200, 30, 30]);
        outline(&mut f, uno, 2 * s, WHITE);
        bitcode::draw_text(&mut f, 555 * s, 132 * s, "UNO", 2 * s);
        let place = |f: &mut Frame, card: Card, r: PixelRect, j: CardJitter| {
            paint::paste(f, &card.render(s), r.left, r.top);
            if j.gain != 1.0 {
                paint::scale_brightness(f, r, j.gain);
            }
        };
        place(&mut f, self.discard, self.discard_rect(), self.discard_jitter);
        for (i, r) in self.hand_rects().into_iter().enumerate() {
            place(&mut f, self.hand[i], r, self.jitter(i));
        }
        f
    }

    fn truth_now(&self, t_ms: u64) -> SceneTruth {
        let l = self.layout;
        let mut truth = SceneTruth {
            t_ms,
            scene: self.scene.to_string(),
            state_id: self.scene.to_string(),
            items: Vec::new(),
            texts: Vec::new(),
            targets: Vec::new(),
        };
        if self.scene == "homepage" {
            for (i, (id, label)) in HOME_BUTTONS.iter().enumerate() {
                truth.targets.push(Target {
                    id: (*id).into(),
                    label: (*label).into(),
                    block: l.block(self.home_button_rect(i)),
                });
            }
            return truth;
        }
        let s = l.s;
        for (text, x) in [(self.opponent_text(), 120), (self.score_text(), 500)] {
            let (w, h) = bitcode::strip_size(&text, 2 * s);
            truth.texts.push(TruthText { text, block: l.block(PixelRect::new(x * s, 10 * s, x * s + w, 10 * s + h)) });
        }
        truth.items.push(TruthItem { template_name: self.discard.template_name(), block: l.block(self.discard_rect()) });
        truth.targets.push(Target { id: "draw_pile".into(), label: "Draw pile".into(), block: l.block(self.deck_rect()) });
        truth.targets.push(Target { id: "uno_button".into(), label: "UNO button".into(), block: l.block(self.uno_rect()) });
        for (i, r) in self.hand_rects().into_iter().enumerate() {
            let block = l.block(r);
            truth.items.push(TruthItem { template_name: self.hand[i].template_name(), block });
            truth.targets.push(Target { id: format!("hand_{}", i + 1), label: self.hand[i].label(), block });
        }
        truth
    }

    fn reference(&self, scene: &'static str) -> Frame {
        let mut g = self.clone();
        g.scene = scene;
        g.render(0)
    }
}

impl SimGame for CardGame {
    fn kind(&self) -> GameKind {
        GameKind::Card
    }

    fn size(&self) -> (u32, u32) {
        self.layout.size()
    }

    fn bundle(&self) -> GameConfig {
        let l = self.layout;
        let mut cfg = GameConfig::empty("card");
        let cue = |event_id: &str, rect: PixelRect, msg: &str, severity: Severity| {
            let scene = SCENES.iter().copied().find(|s| *s == event_id).expect("cue scene");
            let block = l.block(rect);
            VisualCue {
                event_id: event_id.into(),
                image: self.reference(scene).crop(&block),
                region: block,
                message: BTreeMap::from([("en".to_string(), msg.to_string())]),
                severity,
            }
        };
        // Declaration order matters: the turn indicator shares the table
        // with the plain game state and must win the tie.
        cfg.cues = vec![
            cue("homepage", self.logo_rect(), "You are in homepage!", Severity::Normal),
            cue("your_turn", self.indicator_rect(), "Your turn!", Severity::Critical),
            cue("game", self.deck_rect(), "Opponent's turn.", Severity::Normal),
        ];
        for card in Card::kinds() {
            cfg.set_label(card.template_name(), "en", card.label());
            cfg.templates.insert(card.template_name(), card.render(l.s));
        }
        let home: Vec<Element> = HOME_BUTTONS
            .iter()
            .enumerate()
            .map(|(i, (_, label))| Element::new(l.block(self.home_button_rect(i)), *label, true))
            .collect();
        cfg.element_maps.insert("homepage".into(), ElementMap::new("homepage", home));
        for state in ["your_turn", "game"] {
            let table = vec![
                Element::new(l.block(self.deck_rect()), "Draw pile", true),
                Element::new(l.block(self.uno_rect()), "UNO button", true),
            ];
            cfg.element_maps.insert(state.into(), ElementMap::new(state, table));
        }
        common_bundle(&mut cfg);
        let key = |s: &str| s.parse::<Chord>().expect("static chord");
        let table_states = vec!["your_turn".to_string(), "game".to_string()];
        cfg.hotkeys.extend([
            HotkeyBinding {
                key: key("<alt>+d"),
                id: "last_discard".into(),
                kind: HotkeyKind::StateQuery,
                options: HotkeyOptions { fact: Some("discard".into()), ..Default::default() },
                active_states: table_states.clone(),
            },
            HotkeyBinding {
                key: key("<alt>+s"),
                id: "score".into(),
                kind: HotkeyKind::StateQuery,
                options: HotkeyOptions::default(),
                active_states: table_states.clone(),
            },
            HotkeyBinding {
                key: key("<alt>+h"),
                id: "describe_hand".into(),
                kind: HotkeyKind::DescribeRegion,
                options: HotkeyOptions {
                    block: Some(l.block(l.rect(0, 280, 640, 80))),
                    prompt: Some("describe_region".into()),
                    fact: None,
                },
                active_states: table_states,
            },
            HotkeyBinding {
                key: key("<alt>+u"),
                id: "call_uno".into(),
                kind: HotkeyKind::ClickBlock,
                options: HotkeyOptions { block: Some(l.block(self.uno_rect())), ..Default::default() },
                active_states: vec!["your_turn".into()],
            },
            HotkeyBinding {
                key: key("<alt>+l"),
                id: "local_mode".into(),
                kind: HotkeyKind::ClickBlock,
                options: HotkeyOptions { block: Some(l.block(self.home_button_rect(0))), ..Default::default() },
                active_states: vec!["homepage".into()],
            },
        ]);
        cfg.set_label("last_discard", "en", "Last discard");
        cfg.set_label("score", "en", "Score");
        cfg.change.blocks = vec![
            MonitorBlock { id: "discard".into(), block: l.block(l.rect(290, 100, 56, 74)) },
            MonitorBlock { id: "score".into(), block: l.block(l.rect(480, 4, 156, 28)) },
            MonitorBlock { id: "hand".into(), block: l.block(l.rect(0, 276, 640, 84)) },
        ];
        cfg.detect.item_search = Some(l.block(l.rect(0, 96, 640, 264)));
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
        self.truth_now(t_ms)
    }

    fn render(&self, _t_ms: u64) -> Frame {
        match self.scene {
            "homepage" => self.render_homepage(),
            "your_turn" => self.render_table(true),
            _ => self.render_table(false),
        }
    }

    fn on_target(&mut self, id: &str) {
        match (self.scene, id) {
            ("homepage", "local_mode") => self.scene = "your_turn",
            ("your_turn", "draw_pile") if self.hand.len() < MAX_HAND => {
                let c = random_card(&mut self.rng);
                self.hand.push(c);
                self.hand_jitter.clear();
            }
            ("your_turn", id) => {
                if let Some(i) = id.strip_prefix("hand_").and_then(|n| n.parse::<usize>().ok()) {
                    if (1..=self.hand.len()).contains(&i) && self.hand.len() > 1 {
                        self.discard = self.hand.remove(i - 1);
                        self.hand_jitter.clear();
                        self.discard_jitter = CardJitter::NONE;
                        self.opponent += 1;
                        self.scene = "game";
                    }
                }
            }
            _ => {}
        }
    }

    fn demo_script(&self) -> Vec<(u64, String)> {
        vec![(0, "homepage".into()), (1500, "game".into()), (3000, "your_turn".into())]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::{ncc_score, TemplateMatcher};
    use crate::Execution;

    #[test]
    fn fifty_four_distinct_templates() {
        let kinds = Card::kinds();
        assert_eq!(kinds.len(), 54);
        let names: std::collections::BTreeSet<String> = kinds.iter().map(|c| c.template_name()).collect();
        assert_eq!(names.len(), 54);
        let keys: std::collections::BTreeSet<u64> = kinds.iter().map(|c| c.render(1).content_key()).collect();
        assert_eq!(keys.len(), 54);
        assert_eq!(Card::Coloured(Colour::Green, Face::Skip).label(), "Green Skip");
    }

    #[test]
    fn every_card_scores_best_against_its_own_template() {
        let kinds = Card::kinds();
        let faces: Vec<Frame> = kinds.iter().map(|c| c.render(1)).collect();
        for (i, face) in faces.iter().enumerate() {
            for (j, tpl) in faces.iter().enumerate() {
                let s = ncc_score(face, tpl, (0, 0)).unwrap();
                if i == j {
                    assert!((s - 1.0).abs() < 1e-9);
                } else {
                    assert!(s < 0.999, "{} vs {} scored {s}", kinds[i].template_name(), kinds[j].template_name());
                }
            }
        }
    }

    #[test]
    fn table_detections_match_truth() {
        let game = CardGame::new(3, 1).with_table(
            vec![
                Card::Coloured(Colour::Red, Face::Number(5)),
                Card::Coloured(Colour::Green, Face::Skip),
                Card::Coloured(Colour::Yellow, Face::Number(5)),
                Card::Wild,
                Card::Coloured(Colour::Blue, Face::Number(8)),
                Card::Coloured(Colour::Blue, Face::Number(3)),
                Card::WildDrawFour,
            ],
            Card::Coloured(Colour::Yellow, Face::Number(4)),
            Vec::new(),
        );
        let cfg = game.bundle();
        let frame = game.render(0);
        let m = TemplateMatcher::new(&cfg.templates, Execution::default());
        let found = m.find(&frame, cfg.detect.match_threshold, cfg.detect.item_search.as_ref(), cfg.detect.nms_iou);
        let truth = game.truth(0);
        assert_eq!(found.len(), truth.items.len(), "{found:?}");
        for t in &truth.items {
            assert!(found.iter().any(|d| d.template_name == t.template_name && d.block.iou(&t.block) > 0.99), "{t:?}");
        }
    }

    #[test]
    fn playing_a_card_moves_it_to_the_discard() {
        let mut g = CardGame::new(11, 1);
        g.on_target("local_mode");
        assert_eq!(g.scene(), "your_turn");
        let first = g.hand()[0];
        g.on_target("hand_1");
        assert_eq!(g.discard(), first);
        assert_eq!(g.hand().len(), 6);
        assert_eq!(g.scene(), "game");
    }

    #[test]
    fn same_seed_same_pixels() {
        let a = CardGame::new(5, 1);
        let b = CardGame::new(5, 1);
        for scene in SCENES {
            let (mut a, mut b) = (a.clone(), b.clone());
            a.set_scene(scene).unwrap();
            b.set_scene(scene).unwrap();
            assert_eq!(a.render(0), b.render(0));
            assert_eq!(a.truth(0), b.truth(0));
        }
    }
}
