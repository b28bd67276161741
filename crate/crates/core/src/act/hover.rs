use crate::config::{Element, ElementMap};

/// Topmost element containing `(x, y)`: the last one declared.
pub fn hit_test(map: &ElementMap, x: f64, y: f64) -> Option<&Element> {
    map.elements.iter().rev().find(|e| e.block.contains(x, y))
}

/// Remembers the last hovered element so each one is announced once per
/// visit.
#[derive(Debug, Clone, Default)]
pub struct HoverTracker {
    last: Option<Element>,
}

impl HoverTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the element to announce, if the hit changed.
    pub fn update(&mut self, hit: Option<&Element>) -> Option<Element> {
        match hit {
            Some(e) if self.last.as_ref() != Some(e) => {
                self.last = Some(e.clone());
                Some(e.clone())
            }
            Some(_) => None,
            None => {
                self.last = None;
                None
            }
        }
    }

    pub fn reset(&mut self) {
        self.last = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::NormalizedBlock;

    fn map() -> ElementMap {
        ElementMap::new(
            "s",
            vec![
                Element::new(NormalizedBlock::new(0.1, 0.1, 0.5, 0.5).unwrap(), "panel", false),
                Element::new(NormalizedBlock::new(0.2, 0.2, 0.3, 0.3).unwrap(), "button", true),
            ],
        )
    }

    #[test]
    fn hits() {
        let m = map();
        assert_eq!(hit_test(&m, 0.4, 0.4).unwrap().content, "panel");
        assert_eq!(hit_test(&m, 0.25, 0.25).unwrap().content, "button");
        assert!(hit_test(&m, 0.9, 0.9).is_none());
    }

    #[test]
    fn hover_announces_on_change_only() {
        let m = map();
        let mut t = HoverTracker::new();
        assert!(t.update(hit_test(&m, 0.25, 0.25)).is_some());
        assert!(t.update(hit_test(&m, 0.26, 0.26)).is_none());
        assert_eq!(t.update(hit_test(&m, 0.45, 0.45)).unwrap().content, "panel");
        assert!(t.update(hit_test(&m, 0.95, 0.95)).is_none());
        assert!(t.update(hit_test(&m, 0.45, 0.45)).is_some());
    }
}
