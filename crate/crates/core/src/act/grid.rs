use serde::Serialize;

use super::ActError;
use crate::config::{Element, ElementMap};

/// Default row tolerance, as a fraction of the smaller element height.
pub const ROW_TOLERANCE: f64 = 0.5;

/// Interactive elements laid out in rows, top to bottom, left to right.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NavigationGrid {
    pub state_id: String,
    pub rows: Vec<Vec<Element>>,
}

impl NavigationGrid {
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn cell_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// 1-based lookup.
    pub fn get(&self, r: usize, c: usize) -> Option<&Element> {
        self.rows.get(r.checked_sub(1)?)?.get(c.checked_sub(1)?)
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Two elements share a row when their vertical centres differ by less than
/// `tolerance` times the smaller height; rows are the transitive closure.
pub fn build_grid(map: &ElementMap, tolerance: f64) -> Result<NavigationGrid, ActError> {
    let items: Vec<&Element> = map.interactive().collect();
    if items.is_empty() {
        return Err(ActError::NoInteractiveElements(map.state_id.clone()));
    }
    let n = items.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&items[i].block, &items[j].block);
            if (a.center().1 - b.center().1).abs() < tolerance * a.height().min(b.height()) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<&Element>> = Default::default();
    for (i, e) in items.iter().enumerate() {
        groups.entry(find(&mut parent, i)).or_default().push(e);
    }
    let mut rows: Vec<Vec<Element>> = groups
        .into_values()
        .map(|mut g| {
            g.sort_by(|a, b| a.block.center().0.total_cmp(&b.block.center().0));
            g.into_iter().cloned().collect()
        })
        .collect();
    let mean_cy = |r: &Vec<Element>| r.iter().map(|e| e.block.center().1).sum::<f64>() / r.len() as f64;
    rows.sort_by(|a, b| mean_cy(a).total_cmp(&mean_cy(b)));
    Ok(NavigationGrid { state_id: map.state_id.clone(), rows })
}
