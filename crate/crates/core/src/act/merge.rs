use crate::config::{Element, ElementMap, Provenance};
use crate::detect::TextDetection;

/// Overlap above which a manual element replaces a parser element.
pub const OVERRIDE_IOU: f64 = 0.5;

/// Combines parser output, hand-annotated zones and live OCR into one map.
///
/// Manual zones replace parser elements they overlap. An OCR line names an
/// unlabelled element it overlaps (or sits inside); a line inside an element
/// that already has content is taken as that element's own caption and
/// skipped; any other line becomes a non-interactive text element. Output
/// is ordered top to bottom, then left to right.
pub fn merge_element_sources(
    state_id: &str,
    parser: &[Element],
    manual: &[Element],
    ocr: &[TextDetection],
) -> ElementMap {
    let mut elements: Vec<Element> = parser
        .iter()
        .filter(|p| !manual.iter().any(|m| m.block.iou(&p.block) > OVERRIDE_IOU))
        .cloned()
        .collect();
    elements.extend(manual.iter().cloned().map(|m| m.with_provenance(Provenance::Manual)));

    for t in ocr {
        let (cx, cy) = t.block.center();
        let overlaps = |e: &Element| e.block.iou(&t.block) > OVERRIDE_IOU || e.block.contains(cx, cy);
        let target = elements
            .iter()
            .enumerate()
            .filter(|(_, e)| e.content.is_empty() && overlaps(e))
            .max_by(|a, b| a.1.block.iou(&t.block).total_cmp(&b.1.block.iou(&t.block)).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i);
        match target {
            Some(i) => elements[i].content = t.text.clone(),
            None if elements.iter().any(overlaps) => {}
            None => elements.push(Element::new(t.block, t.text.clone(), false).with_provenance(Provenance::Ocr)),
        }
    }
    elements.sort_by(|a, b| {
        a.block.y1().total_cmp(&b.block.y1()).then(a.block.x1().total_cmp(&b.block.x1()))
    });
    ElementMap::new(state_id, elements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::NormalizedBlock;

    fn b(x1: f64, y1: f64, x2: f64, y2: f64) -> NormalizedBlock {
        NormalizedBlock::new(x1, y1, x2, y2).unwrap()
    }

    fn text(s: &str, block: NormalizedBlock) -> TextDetection {
        TextDetection { text: s.into(), block, confidence: 0.9, timestamp_ms: 0 }
    }

    #[test]
    fn manual_wins_over_parser() {
        let parser = [Element::new(b(0.9, 0.0, 1.0, 0.1), "settings", false).with_provenance(Provenance::Parser)];
        let manual = [Element::new(b(0.9, 0.0, 1.0, 0.1), "Settings", true)];
        let map = merge_element_sources("home", &parser, &manual, &[]);
        assert_eq!(map.elements.len(), 1);
        assert!(map.elements[0].interactivity);
        assert_eq!(map.elements[0].provenance, Provenance::Manual);
    }

    #[test]
    fn ocr_names_empty_icon() {
        let parser = [Element::new(b(0.1, 0.4, 0.3, 0.6), "", true)];
        let map = merge_element_sources("home", &parser, &[], &[text("Local Mode", b(0.11, 0.41, 0.29, 0.58))]);
        assert_eq!(map.elements.len(), 1);
        assert_eq!(map.elements[0].content, "Local Mode");
    }

    #[test]
    fn disjoint_sources_concatenate_sorted() {
        let parser = [Element::new(b(0.5, 0.5, 0.6, 0.6), "p", true)];
        let manual = [Element::new(b(0.1, 0.5, 0.2, 0.6), "m", true)];
        let ocr = [text("o", b(0.0, 0.0, 0.1, 0.05))];
        let map = merge_element_sources("s", &parser, &manual, &ocr);
        let names: Vec<_> = map.elements.iter().map(|e| e.content.as_str()).collect();
        assert_eq!(names, ["o", "m", "p"]);
        assert!(!map.elements[0].interactivity);
    }

    #[test]
    fn caption_of_labelled_button_is_not_duplicated() {
        let manual = [Element::new(b(0.1, 0.1, 0.4, 0.2), "Start", true)];
        let map = merge_element_sources("s", &[], &manual, &[text("Start", b(0.15, 0.12, 0.3, 0.18))]);
        assert_eq!(map.elements.len(), 1);
    }
}
