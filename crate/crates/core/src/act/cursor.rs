use serde::{Deserialize, Serialize};

use super::grid::NavigationGrid;
use crate::config::{fill_template, GameConfig};
use crate::describe::{spatial_params_with, Origin, SpeechItem};

/// 1-based grid position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NavCursor {
    pub r: usize,
    pub c: usize,
}

impl NavCursor {
    pub const ORIGIN: NavCursor = NavCursor { r: 1, c: 1 };

    pub fn is_valid(&self, grid: &NavigationGrid) -> bool {
        grid.get(self.r, self.c).is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Up, Direction::Down, Direction::Left, Direction::Right];

    /// Parses arrow key names ("up", "arrowup", ...).
    pub fn from_key(key: &str) -> Option<Direction> {
        match key.to_ascii_lowercase().trim_start_matches("arrow") {
            "up" => Some(Direction::Up),
            "down" => Some(Direction::Down),
            "left" => Some(Direction::Left),
            "right" => Some(Direction::Right),
            _ => None,
        }
    }
}

/// Position announcement for the element under `cursor`.
pub fn announce(grid: &NavigationGrid, cursor: NavCursor, config: &GameConfig, language: &str, edge: bool) -> SpeechItem {
    let el = grid.get(cursor.r, cursor.c).expect("cursor inside grid");
    let (r, rr) = (cursor.r.to_string(), grid.row_count().to_string());
    let (c, cc) = (cursor.c.to_string(), grid.rows[cursor.r - 1].len().to_string());
    let mut text = fill_template(
        &config.text("nav_position", language),
        &[("content", el.content.as_str()), ("r", &r), ("R", &rr), ("c", &c), ("C", &cc)],
    );
    if edge {
        text = format!("{}, {text}", config.text("nav_edge", language));
    }
    SpeechItem::low(text, Origin::Navigation).with_spatial(spatial_params_with(&el.block, &config.spatial))
}

/// Moves within the grid; hitting an edge keeps the cursor and prefixes the
/// announcement with the edge notice. Vertical moves land on the column whose
/// centre is horizontally closest (ties to the smaller index).
pub fn move_cursor(
    grid: &NavigationGrid,
    cursor: NavCursor,
    direction: Direction,
    config: &GameConfig,
    language: &str,
) -> (NavCursor, SpeechItem) {
    let cursor = clamp(grid, cursor);
    let row_len = grid.rows[cursor.r - 1].len();
    let next = match direction {
        Direction::Left if cursor.c > 1 => Some(NavCursor { c: cursor.c - 1, ..cursor }),
        Direction::Right if cursor.c < row_len => Some(NavCursor { c: cursor.c + 1, ..cursor }),
        Direction::Up if cursor.r > 1 => Some(vertical(grid, cursor, cursor.r - 1)),
        Direction::Down if cursor.r < grid.row_count() => Some(vertical(grid, cursor, cursor.r + 1)),
        _ => None,
    };
    match next {
        Some(n) => (n, announce(grid, n, config, language, false)),
        None => (cursor, announce(grid, cursor, config, language, true)),
    }
}

fn clamp(grid: &NavigationGrid, c: NavCursor) -> NavCursor {
    let r = c.r.clamp(1, grid.row_count());
    NavCursor { r, c: c.c.clamp(1, grid.rows[r - 1].len()) }
}

fn vertical(grid: &NavigationGrid, cursor: NavCursor, target_row: usize) -> NavCursor {
    let x = grid.rows[cursor.r - 1][cursor.c - 1].block.center().0;
    let mut best = (1, f64::INFINITY);
    for (i, e) in grid.rows[target_row - 1].iter().enumerate() {
        let d = (e.block.center().0 - x).abs();
        if d < best.1 {
            best = (i + 1, d);
        }
    }
    NavCursor { r: target_row, c: best.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Element, NormalizedBlock};
    use crate::describe::Priority;
    use proptest::prelude::*;

    fn grid(widths: &[usize]) -> NavigationGrid {
        let rows = widths
            .iter()
            .enumerate()
            .map(|(r, &w)| {
                (0..w)
                    .map(|c| {
                        let x = (c as f64 + 0.1) / w as f64;
                        let y = (r as f64 + 0.1) / widths.len() as f64;
                        Element::new(
                            NormalizedBlock::new(x, y, x + 0.5 / w as f64, y + 0.5 / widths.len() as f64).unwrap(),
                            format!("r{}c{}", r + 1, c + 1),
                            true,
                        )
                    })
                    .collect()
            })
            .collect();
        NavigationGrid { state_id: "s".into(), rows }
    }

    #[test]
    fn golden_announcement() {
        let g = grid(&[8, 8, 8, 8, 8]);
        let cfg = GameConfig::empty("g");
        let (cur, item) = move_cursor(&g, NavCursor { r: 3, c: 1 }, Direction::Right, &cfg, "en");
        assert_eq!(cur, NavCursor { r: 3, c: 2 });
        assert_eq!(item.text, "r3c2, Row 3 of 5, Column 2 of 8");
        assert_eq!((item.priority, item.origin), (Priority::Low, Origin::Navigation));
        assert!(item.spatial.is_some());
    }

    #[test]
    fn single_cell_is_all_edges() {
        let g = grid(&[1]);
        let cfg = GameConfig::empty("g");
        for d in Direction::ALL {
            let (cur, item) = move_cursor(&g, NavCursor::ORIGIN, d, &cfg, "en");
            assert_eq!(cur, NavCursor::ORIGIN);
            assert_eq!(item.text, "Edge, r1c1, Row 1 of 1, Column 1 of 1");
        }
    }

    #[test]
    fn down_picks_nearest_centre() {
        // Row 1 has four cells with centres 0.125..0.875 (width 0.25); the last
        // is at 0.9 by construction. Row 2 centres: 0.2, 0.5, 0.8.
        let mk = |x1: f64, x2: f64, y: f64, n: &str| Element::new(NormalizedBlock::new(x1, y, x2, y + 0.1).unwrap(), n, true);
        let g = NavigationGrid {
            state_id: "s".into(),
            rows: vec![
                vec![mk(0.0, 0.2, 0.1, "a"), mk(0.25, 0.45, 0.1, "b"), mk(0.5, 0.7, 0.1, "c"), mk(0.85, 0.95, 0.1, "d")],
                vec![mk(0.1, 0.3, 0.5, "e"), mk(0.4, 0.6, 0.5, "f"), mk(0.7, 0.9, 0.5, "g")],
            ],
        };
        let cfg = GameConfig::empty("g");
        // |0.9 - 0.8| = 0.1 beats |0.9 - 0.5| = 0.4.
        let (cur, _) = move_cursor(&g, NavCursor { r: 1, c: 4 }, Direction::Down, &cfg, "en");
        assert_eq!(cur, NavCursor { r: 2, c: 3 });
        // Exact tie: centre 0.5 against 0.25 and 0.75 goes to column 1.
        let tie = NavigationGrid {
            state_id: "s".into(),
            rows: vec![vec![mk(0.375, 0.625, 0.1, "m")], vec![mk(0.125, 0.375, 0.5, "l"), mk(0.625, 0.875, 0.5, "r")]],
        };
        let (cur, _) = move_cursor(&tie, NavCursor::ORIGIN, Direction::Down, &cfg, "en");
        assert_eq!(cur, NavCursor { r: 2, c: 1 });
    }

    #[test]
    fn localized_format() {
        let g = grid(&[2]);
        let mut cfg = GameConfig::empty("g");
        cfg.set_label("nav_position", "en", "{content}, Row {r} of {R}, Column {c} of {C}");
        cfg.set_label("nav_position", "es", "{content}, fila {r} de {R}, columna {c} de {C}");
        let item = announce(&g, NavCursor { r: 1, c: 2 }, &cfg, "es", false);
        assert_eq!(item.text, "r1c2, fila 1 de 1, columna 2 de 2");
    }

    proptest! {
        #[test]
        fn cursor_stays_valid(widths in proptest::collection::vec(1usize..9, 1..6), moves in proptest::collection::vec(0usize..4, 0..10_000)) {
            let g = grid(&widths);
            let cfg = GameConfig::empty("g");
            let mut cur = NavCursor::ORIGIN;
            for m in moves {
                cur = move_cursor(&g, cur, Direction::ALL[m], &cfg, "en").0;
                prop_assert!(cur.is_valid(&g));
            }
        }
    }
}
