//! Exact k-nearest-neighbor and radius queries over dataset rows.
//!
//! Two interchangeable strategies sit behind [`NeighborModel`]: a linear
//! scan and a vantage-point tree. Both are exact and share one total
//! ordering, so they return identical lists: ascending distance, then
//! the query's own row first among ties, then ascending row id. k-NN
//! queries return `min(k + 1, n_reference)` entries so that callers get
//! `k` genuine neighbors even when the query belongs to the reference
//! set; [`NeighborList::genuine`] strips the self-entry either way.

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

pub const DEFAULT_LEAF_SIZE: usize = 32;

/// Neighbor-query cap applied to radius searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    BruteForce,
    MetricTree,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub row_id: u64,
    pub distance: f64,
}

/// Result of one query: neighbors in ascending `(distance, self-first,
/// row_id)` order. `truncated` is set when a radius query hit its cap.
#[derive(Debug, Clone)]
pub struct NeighborList {
    pub query_row_id: u64,
    pub neighbors: Vec<Neighbor>,
    pub truncated: bool,
}

impl NeighborList {
    /// Neighbors excluding the query itself, truncated to `k` entries.
    pub fn genuine(&self, k: usize) -> &[Neighbor] {
        let start = usize::from(
            self.neighbors
                .first()
                .is_some_and(|n| n.row_id == self.query_row_id),
        );
        let end = start.saturating_add(k).min(self.neighbors.len());
        &self.neighbors[start..end]
    }
}

#[inline]
pub fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for i in 0..a.len() {
        let d = a[i] - b[i];
        acc += d * d;
    }
    acc
}

#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_euclidean(a, b).sqrt()
}

/// Total ordering key: distance, then self-entry first, then row id.
#[derive(Clone, Copy, PartialEq)]
struct Key {
    distance: f64,
    not_self: bool,
    row_id: u64,
}

impl Key {
    fn new(distance: f64, row_id: u64, query_row_id: u64) -> Self {
        Self {
            distance,
            not_self: row_id != query_row_id,
            row_id,
        }
    }

    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.distance
            .partial_cmp(&other.distance)
            .unwrap()
            .then(self.not_self.cmp(&other.not_self))
            .then(self.row_id.cmp(&other.row_id))
    }
}

enum Node {
    Leaf(Vec<usize>),
    Split {
        vantage: usize,
        mu: f64,
        inner: Box<Node>,
        outer: Box<Node>,
    },
}

fn build_tree(data: &Dataset, mut indices: Vec<usize>, leaf_size: usize) -> Node {
    if indices.len() <= leaf_size.max(1) {
        return Node::Leaf(indices);
    }
    let vantage = indices[0];
    let mut rest: Vec<(f64, usize)> = indices
        .drain(1..)
        .map(|i| (euclidean(data.row(vantage), data.row(i)), i))
        .collect();
    let mid = (rest.len() - 1) / 2;
    rest.select_nth_unstable_by(mid, |a, b| {
        a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1))
    });
    let mu = rest[mid].0;
    let outer_part: Vec<usize> = rest.split_off(mid + 1).into_iter().map(|(_, i)| i).collect();
    let inner_part: Vec<usize> = rest.into_iter().map(|(_, i)| i).collect();
    Node::Split {
        vantage,
        mu,
        inner: Box::new(build_tree(data, inner_part, leaf_size)),
        outer: Box::new(build_tree(data, outer_part, leaf_size)),
    }
}

/// Fitted neighbor index over one reference dataset.
pub struct NeighborModel<'a> {
    data: &'a Dataset,
    strategy: Strategy,
    leaf_size: usize,
    root: Option<Node>,
}

impl<'a> NeighborModel<'a> {
    pub fn fit(data: &'a Dataset, strategy: Strategy, leaf_size: usize) -> Result<Self> {
        if data.n_rows() < 2 {
            return Err(Error::InsufficientNeighbors {
                available: data.n_rows(),
            });
        }
        let root = match strategy {
            Strategy::BruteForce => None,
            Strategy::MetricTree => Some(build_tree(data, (0..data.n_rows()).collect(), leaf_size)),
        };
        Ok(Self {
            data,
            strategy,
            leaf_size,
            root,
        })
    }

    /// Tree-backed model with the default leaf size.
    pub fn fit_default(data: &'a Dataset) -> Result<Self> {
        Self::fit(data, Strategy::MetricTree, DEFAULT_LEAF_SIZE)
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn leaf_size(&self) -> usize {
        self.leaf_size
    }

    pub fn reference(&self) -> &Dataset {
        self.data
    }

    /// k nearest neighbors of every query row, in query order.
    pub fn knn_query(&self, queries: &Dataset, k: usize) -> Vec<NeighborList> {
        (0..queries.n_rows())
            .into_par_iter()
            .map(|i| self.knn_of(queries.row(i), queries.row_ids()[i], k))
            .collect()
    }

    /// All reference rows within `radius` of every query row, capped at
    /// `max_neighbors`, in query order.
    pub fn radius_query(
        &self,
        queries: &Dataset,
        radius: f64,
        max_neighbors: usize,
    ) -> Vec<NeighborList> {
        (0..queries.n_rows())
            .into_par_iter()
            .map(|i| self.radius_of(queries.row(i), queries.row_ids()[i], radius, max_neighbors))
            .collect()
    }

    /// k nearest neighbors of one point. The list holds
    /// `min(k + 1, n_reference)` entries.
    pub fn knn_of(&self, point: &[f64], query_row_id: u64, k: usize) -> NeighborList {
        let want = (k + 1).min(self.data.n_rows());
        let mut best: Vec<Key> = Vec::with_capacity(want + 1);
        match &self.root {
            None => {
                for i in 0..self.data.n_rows() {
                    let key = Key::new(
                        euclidean(point, self.data.row(i)),
                        self.data.row_ids()[i],
                        query_row_id,
                    );
                    push_best(&mut best, key, want);
                }
            }
            Some(root) => self.knn_walk(root, point, query_row_id, want, &mut best),
        }
        best.sort_unstable_by(Key::cmp);
        NeighborList {
            query_row_id,
            neighbors: best
                .into_iter()
                .map(|k| Neighbor {
                    row_id: k.row_id,
                    distance: k.distance,
                })
                .collect(),
            truncated: false,
        }
    }

    fn knn_walk(&self, node: &Node, point: &[f64], query_row_id: u64, want: usize, best: &mut Vec<Key>) {
        match node {
            Node::Leaf(indices) => {
                for &i in indices {
                    let key = Key::new(
                        euclidean(point, self.data.row(i)),
                        self.data.row_ids()[i],
                        query_row_id,
                    );
                    push_best(best, key, want);
                }
            }
            Node::Split {
                vantage,
                mu,
                inner,
                outer,
            } => {
                let d = euclidean(point, self.data.row(*vantage));
                let key = Key::new(d, self.data.row_ids()[*vantage], query_row_id);
                push_best(best, key, want);
                let worst = |best: &Vec<Key>| {
                    if best.len() < want {
                        f64::INFINITY
                    } else {
                        best.iter().map(|k| k.distance).fold(0.0, f64::max)
                    }
                };
                // Visit the nearer child first; prune the other only when no
                // point inside it can beat the current worst distance. Equal
                // bounds are visited because ties are broken by row id.
                if d <= *mu {
                    self.knn_walk(inner, point, query_row_id, want, best);
                    if *mu - d <= worst(best) {
                        self.knn_walk(outer, point, query_row_id, want, best);
                    }
                } else {
                    self.knn_walk(outer, point, query_row_id, want, best);
                    if d - *mu <= worst(best) {
                        self.knn_walk(inner, point, query_row_id, want, best);
                    }
                }
            }
        }
    }

    /// Reference rows within `radius` of one point (inclusive boundary),
    /// capped at `max_neighbors` nearest.
    pub fn radius_of(
        &self,
        point: &[f64],
        query_row_id: u64,
        radius: f64,
        max_neighbors: usize,
    ) -> NeighborList {
        let mut hits: Vec<Key> = Vec::new();
        match &self.root {
            None => {
                for i in 0..self.data.n_rows() {
                    let d = euclidean(point, self.data.row(i));
                    if d <= radius {
                        hits.push(Key::new(d, self.data.row_ids()[i], query_row_id));
                    }
                }
            }
            Some(root) => self.radius_walk(root, point, query_row_id, radius, &mut hits),
        }
        hits.sort_unstable_by(Key::cmp);
        let truncated = hits.len() > max_neighbors;
        hits.truncate(max_neighbors);
        NeighborList {
            query_row_id,
            neighbors: hits
                .into_iter()
                .map(|k| Neighbor {
                    row_id: k.row_id,
                    distance: k.distance,
                })
                .collect(),
            truncated,
        }
    }

    fn radius_walk(&self, node: &Node, point: &[f64], query_row_id: u64, radius: f64, hits: &mut Vec<Key>) {
        match node {
            Node::Leaf(indices) => {
                for &i in indices {
                    let d = euclidean(point, self.data.row(i));
                    if d <= radius {
                        hits.push(Key::new(d, self.data.row_ids()[i], query_row_id));
                    }
                }
            }
            Node::Split {
                vantage,
                mu,
                inner,
                outer,
            } => {
                let d = euclidean(point, self.data.row(*vantage));
                if d <= radius {
                    hits.push(Key::new(d, self.data.row_ids()[*vantage], query_row_id));
                }
                if d - *mu <= radius {
                    self.radius_walk(inner, point, query_row_id, radius, hits);
                }
                if *mu - d <= radius {
                    self.radius_walk(outer, point, query_row_id, radius, hits);
                }
            }
        }
    }
}

/// Keeps the `want` best keys in `best`, unordered.
fn push_best(best: &mut Vec<Key>, key: Key, want: usize) {
    if best.len() < want {
        best.push(key);
        return;
    }
    let mut worst = 0;
    for i in 1..best.len() {
        if best[i].cmp(&best[worst]).is_gt() {
            worst = i;
        }
    }
    if key.cmp(&best[worst]).is_lt() {
        best[worst] = key;
    }
}
