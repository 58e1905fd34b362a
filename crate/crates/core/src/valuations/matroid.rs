use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ItemSet;

/// A matroid on the item types.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Matroid {
    Uniform { rank: usize },
    /// `blocks` partition the items; at most `caps[k]` items of block `k` are independent.
    Partition { blocks: Vec<Vec<usize>>, caps: Vec<usize> },
    /// Item `e` is the edge `edges[e]` of a multigraph; forests are independent.
    Graphic { edges: Vec<(usize, usize)> },
}

impl Matroid {
    pub fn validate(&self, m: usize) -> Result<()> {
        match self {
            Matroid::Uniform { .. } => Ok(()),
            Matroid::Partition { blocks, caps } => {
                if blocks.len() != caps.len() {
                    return Err(Error::InvalidValuation("partition matroid needs one cap per block".into()));
                }
                let mut seen = vec![false; m];
                for &e in blocks.iter().flatten() {
                    if e >= m || seen[e] {
                        return Err(Error::InvalidValuation(format!("partition blocks misuse item {e}")));
                    }
                    seen[e] = true;
                }
                if seen.iter().any(|s| !s) {
                    return Err(Error::InvalidValuation("partition blocks must cover every item".into()));
                }
                Ok(())
            }
            Matroid::Graphic { edges } => {
                if edges.len() != m {
                    return Err(Error::InvalidValuation(format!(
                        "graphic matroid needs {m} edges, got {}",
                        edges.len()
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn is_independent(&self, s: ItemSet) -> bool {
        match self {
            Matroid::Uniform { rank } => s.len() <= *rank,
            Matroid::Partition { blocks, caps } => blocks
                .iter()
                .zip(caps)
                .all(|(block, &cap)| block.iter().filter(|&&e| s.contains(e)).count() <= cap),
            Matroid::Graphic { edges } => {
                let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
                let mut parent: Vec<usize> = (0..n).collect();
                fn find(parent: &mut [usize], mut x: usize) -> usize {
                    while parent[x] != x {
                        parent[x] = parent[parent[x]];
                        x = parent[x];
                    }
                    x
                }
                for e in s.iter() {
                    let (u, v) = edges[e];
                    let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                    if ru == rv {
                        return false;
                    }
                    parent[ru] = rv;
                }
                true
            }
        }
    }

    /// Maximum weight of an independent subset of `s` (greedy, heaviest first, lowest index on ties).
    pub fn max_weight(&self, s: ItemSet, weights: &[i64]) -> i64 {
        let mut order: Vec<usize> = s.iter().filter(|&e| weights[e] > 0).collect();
        order.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
        let mut chosen = ItemSet::EMPTY;
        let mut total = 0;
        for e in order {
            let mut next = chosen;
            next.insert(e);
            if self.is_independent(next) {
                chosen = next;
                total += weights[e];
            }
        }
        total
    }
}
