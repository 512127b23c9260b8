//! One extremely randomized regression tree.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

pub(crate) struct GrowParams {
    pub min_samples_leaf: usize,
    pub n_candidates: usize,
}

struct Split {
    feature: usize,
    threshold: f64,
    score: f64,
}

fn sse(y: &[f64], idx: &[usize]) -> f64 {
    let n = idx.len() as f64;
    let mean = idx.iter().map(|&i| y[i]).sum::<f64>() / n;
    idx.iter().map(|&i| (y[i] - mean) * (y[i] - mean)).sum()
}

fn mean(y: &[f64], idx: &[usize]) -> f64 {
    let first = y[idx[0]];
    first + idx.iter().map(|&i| y[i] - first).sum::<f64>() / idx.len() as f64
}

impl Tree {
    /// Grows a tree on the rows `idx` of `x`/`y`; impurity decreases are
    /// accumulated into `importance`.
    pub(crate) fn grow<R: Rng>(
        x: &[Vec<f64>],
        y: &[f64],
        idx: Vec<usize>,
        params: &GrowParams,
        rng: &mut R,
        importance: &mut [f64],
    ) -> Tree {
        let d = importance.len();
        let mut nodes: Vec<Node> = Vec::new();
        // (node slot, sample indices)
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(0, idx)];
        nodes.push(Node::Leaf { value: 0.0 });
        while let Some((slot, rows)) = stack.pop() {
            let node_sse = sse(y, &rows);
            let split = if rows.len() >= 2 * params.min_samples_leaf && node_sse > 0.0 {
                best_split(x, y, &rows, d, node_sse, params, rng)
            } else {
                None
            };
            match split {
                None => nodes[slot] = Node::Leaf { value: mean(y, &rows) },
                Some(s) => {
                    let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| x[i][s.feature] <= s.threshold);
                    importance[s.feature] += s.score;
                    let left = nodes.len();
                    nodes.push(Node::Leaf { value: 0.0 });
                    let right = nodes.len();
                    nodes.push(Node::Leaf { value: 0.0 });
                    nodes[slot] = Node::Split {
                        feature: s.feature,
                        threshold: s.threshold,
                        left,
                        right,
                    };
                    stack.push((right, r));
                    stack.push((left, l));
                }
            }
        }
        Tree { nodes }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            match &t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(t, *left).max(go(t, *right)),
            }
        }
        go(self, 0)
    }
}

/// Draws candidate features among the non-constant ones, a uniform threshold
/// for each, and keeps the largest impurity decrease among splits that leave
/// at least `min_samples_leaf` rows on both sides.
fn best_split<R: Rng>(
    x: &[Vec<f64>],
    y: &[f64],
    rows: &[usize],
    d: usize,
    node_sse: f64,
    params: &GrowParams,
    rng: &mut R,
) -> Option<Split> {
    let ranges: Vec<(usize, f64, f64)> = (0..d)
        .filter_map(|f| {
            let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                (lo.min(x[i][f]), hi.max(x[i][f]))
            });
            (hi > lo).then_some((f, lo, hi))
        })
        .collect();
    if ranges.is_empty() {
        return None;
    }
    let k = params.n_candidates.min(ranges.len());
    let picks = sample(rng, ranges.len(), k);
    let mut best: Option<Split> = None;
    for p in picks.iter() {
        let (f, lo, hi) = ranges[p];
        let t = rng.random_range(lo..hi);
        let (mut nl, mut sl, mut ql) = (0usize, 0.0, 0.0);
        let (mut nr, mut sr, mut qr) = (0usize, 0.0, 0.0);
        let shift = y[rows[0]];
        for &i in rows {
            let v = y[i] - shift;
            if x[i][f] <= t {
                nl += 1;
                sl += v;
                ql += v * v;
            } else {
                nr += 1;
                sr += v;
                qr += v * v;
            }
        }
        if nl < params.min_samples_leaf || nr < params.min_samples_leaf {
            continue;
        }
        let child = (ql - sl * sl / nl as f64) + (qr - sr * sr / nr as f64);
        let score = node_sse - child.max(0.0);
        if best.as_ref().is_none_or(|b| score > b.score) {
            best = Some(Split {
                feature: f,
                threshold: t,
                score,
            });
        }
    }
    best
}
