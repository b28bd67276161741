use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::world::TruthItem;
use super::HarnessError;
use crate::detect::ItemDetection;

/// Minimum overlap for a prediction to count as finding a truth box.
pub const MATCH_IOU: f64 = 0.5;

/// `hits / total` with a non-zero denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub hits: usize,
    pub total: usize,
}

impl Ratio {
    pub fn new(hits: usize, total: usize, what: &'static str) -> Result<Self, HarnessError> {
        if total == 0 {
            return Err(HarnessError::EmptyDenominator(what));
        }
        assert!(hits <= total, "{what}: {hits} hits out of {total}");
        Ok(Ratio { hits, total })
    }

    pub fn value(&self) -> f64 {
        self.hits as f64 / self.total as f64
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{} ({:.2}%)", self.hits, self.total, 100.0 * self.value())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detection: Option<Ratio>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub false_positives: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<Ratio>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub action: Option<Ratio>,
}

impl Metrics {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metrics serialize")
    }

    /// Plain-text table, one metric per line.
    pub fn table(&self) -> String {
        let mut out = String::from("metric           value\n");
        let mut row = |name: &str, value: String| {
            let _ = writeln!(out, "{name:<16} {value}");
        };
        if let Some(r) = self.detection {
            row("detection", r.to_string());
        }
        if let Some(fp) = self.false_positives {
            row("false_positives", fp.to_string());
        }
        if let Some(r) = self.coverage {
            row("coverage", r.to_string());
        }
        if let Some(r) = self.action {
            row("action", r.to_string());
        }
        out
    }
}

/// Scores per-frame predictions against the truth ledger.
///
/// A truth item is detected when some prediction carries its template name
/// with IoU >= 0.5. A prediction is a false positive when it overlaps no
/// truth box at IoU >= 0.5, whatever its name; a right box with a wrong
/// name costs accuracy instead.
pub fn score_detections(predicted: &[Vec<ItemDetection>], truth: &[Vec<TruthItem>]) -> Result<Metrics, HarnessError> {
    if predicted.len() != truth.len() {
        return Err(HarnessError::MisalignedCorpus { predicted: predicted.len(), truth: truth.len() });
    }
    let (mut correct, mut total, mut fp) = (0, 0, 0);
    for (preds, items) in predicted.iter().zip(truth) {
        total += items.len();
        correct += items
            .iter()
            .filter(|t| preds.iter().any(|p| p.template_name == t.template_name && p.block.iou(&t.block) >= MATCH_IOU))
            .count();
        fp += preds.iter().filter(|p| !items.iter().any(|t| p.block.iou(&t.block) >= MATCH_IOU)).count();
    }
    Ok(Metrics {
        detection: Some(Ratio::new(correct, total, "corpus has no truth items")?),
        false_positives: Some(fp),
        ..Metrics::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::NormalizedBlock;
    use proptest::prelude::*;

    fn block(i: usize) -> NormalizedBlock {
        let x = 0.05 * (i % 10) as f64;
        let y = 0.3 * (i / 10 % 3) as f64;
        NormalizedBlock::new(x, y, x + 0.04, y + 0.2).unwrap()
    }

    fn truth_item(name: &str, i: usize) -> TruthItem {
        TruthItem { template_name: name.into(), block: block(i) }
    }

    fn pred(name: &str, i: usize) -> ItemDetection {
        ItemDetection { template_name: name.into(), block: block(i), score: 0.99, timestamp_ms: 0 }
    }

    /// 119 single-item frames.
    fn corpus() -> Vec<Vec<TruthItem>> {
        (0..119).map(|i| vec![truth_item("red_5", i)]).collect()
    }

    #[test]
    fn perfect_predictions() {
        let truth = corpus();
        let preds: Vec<Vec<ItemDetection>> = truth.iter().map(|f| f.iter().map(|t| pred(&t.template_name, 0)).collect()).collect();
        let preds: Vec<Vec<ItemDetection>> = preds
            .into_iter()
            .zip(&truth)
            .map(|(mut p, t)| {
                p[0].block = t[0].block;
                p
            })
            .collect();
        let m = score_detections(&preds, &truth).unwrap();
        assert_eq!(m.detection, Some(Ratio { hits: 119, total: 119 }));
        assert_eq!(m.false_positives, Some(0));
    }

    #[test]
    fn one_mislabel_in_119() {
        let truth = corpus();
        let mut preds: Vec<Vec<ItemDetection>> = (0..119).map(|i| vec![pred("red_5", i)]).collect();
        preds[40][0].template_name = "red_6".into();
        let m = score_detections(&preds, &truth).unwrap();
        assert_eq!(m.detection, Some(Ratio { hits: 118, total: 119 }));
        assert!((m.detection.unwrap().value() - 118.0 / 119.0).abs() < 1e-12);
        assert_eq!(m.false_positives, Some(0));
    }

    #[test]
    fn spurious_box_is_a_false_positive_only() {
        let truth = corpus();
        let mut preds: Vec<Vec<ItemDetection>> = (0..119).map(|i| vec![pred("red_5", i)]).collect();
        let mut extra = pred("blue_2", 3);
        extra.block = NormalizedBlock::new(0.9, 0.9, 0.95, 0.99).unwrap();
        preds[3].push(extra);
        let m = score_detections(&preds, &truth).unwrap();
        assert_eq!(m.detection, Some(Ratio { hits: 119, total: 119 }));
        assert_eq!(m.false_positives, Some(1));
    }

    #[test]
    fn misaligned_and_empty() {
        let truth = corpus();
        assert!(matches!(
            score_detections(&[], &truth),
            Err(HarnessError::MisalignedCorpus { predicted: 0, truth: 119 })
        ));
        assert!(matches!(score_detections(&[vec![]], &[vec![]]), Err(HarnessError::EmptyDenominator(_))));
    }

    #[test]
    fn table_and_json() {
        let m = Metrics { coverage: Some(Ratio { hits: 4, total: 4 }), ..Metrics::default() };
        assert!(m.table().contains("coverage         4/4 (100.00%)"));
        let v: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(v["coverage"]["hits"], 4);
        assert!(v.get("detection").is_none());
    }

    proptest! {
        #[test]
        fn scorer_ignores_prediction_order(
            names in prop::collection::vec(0usize..3, 1..12),
            shuffle_seed in any::<u64>(),
        ) {
            let labels = ["a", "b", "c"];
            let truth: Vec<Vec<TruthItem>> = vec![names.iter().enumerate().map(|(i, n)| truth_item(labels[*n], i)).collect()];
            let mut preds: Vec<ItemDetection> =
                names.iter().enumerate().map(|(i, n)| pred(labels[(n + i % 2) % 3], (i * 7) % 30)).collect();
            let before = score_detections(std::slice::from_ref(&preds), &truth).unwrap();
            let mut s = shuffle_seed;
            for i in (1..preds.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                preds.swap(i, (s >> 33) as usize % (i + 1));
            }
            let after = score_detections(&[preds], &truth).unwrap();
            prop_assert_eq!(before, after);
        }
    }
}
