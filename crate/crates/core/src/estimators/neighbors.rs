//! Exact Euclidean neighbour queries.
//!
//! A kd-tree is used for low-dimensional data and a linear scan otherwise.
//! Both paths compute distances with the same routine and order candidates by
//! `(squared distance, point id)`, so they return identical answers.

use std::collections::BinaryHeap;

use ndarray::Array2;

use crate::preprocess::EncodedMatrix;
use crate::{Error, Result};

const LEAF_SIZE: usize = 16;
/// Above this many dimensions the kd-tree stops pruning well.
const MAX_TREE_DIMS: usize = 12;
const MIN_TREE_POINTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub id: usize,
    pub distance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStrategy {
    /// Kd-tree when the data is small-dimensional and large enough.
    Auto,
    BruteForce,
    KdTree,
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

#[derive(Clone, Copy, PartialEq)]
struct Candidate {
    sq: f64,
    id: usize,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sq.total_cmp(&other.sq).then(self.id.cmp(&other.id))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug)]
struct KdTree {
    nodes: Vec<Node>,
    /// Point ids, permuted so every leaf owns a contiguous range.
    order: Vec<usize>,
}

impl KdTree {
    fn build(points: &Array2<f64>) -> Self {
        let mut tree = KdTree {
            nodes: Vec::new(),
            order: (0..points.nrows()).collect(),
        };
        let n = points.nrows();
        tree.build_node(points, 0, n);
        tree
    }

    fn build_node(&mut self, points: &Array2<f64>, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        // Split on the axis with the widest spread.
        let (axis, spread) = (0..points.ncols())
            .map(|a| {
                let (lo, hi) = self.order[start..end].iter().fold(
                    (f64::INFINITY, f64::NEG_INFINITY),
                    |(lo, hi), &i| (lo.min(points[[i, a]]), hi.max(points[[i, a]])),
                );
                (a, hi - lo)
            })
            .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
        if spread <= 0.0 {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let mid = start + (end - start) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            points[[a, axis]].total_cmp(&points[[b, axis]])
        });
        let value = points[[self.order[mid], axis]];
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build_node(points, start, mid);
        let right = self.build_node(points, mid, end);
        // Left holds values <= value, right holds values >= value.
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }
}

/// Exact neighbour index over the rows of an encoded matrix.
#[derive(Clone, Debug)]
pub struct NeighborIndex {
    points: Array2<f64>,
    tree: Option<KdTree>,
}

impl NeighborIndex {
    pub fn new(points: &EncodedMatrix) -> Self {
        Self::with_strategy(points, SearchStrategy::Auto)
    }

    pub fn with_strategy(points: &EncodedMatrix, strategy: SearchStrategy) -> Self {
        Self::from_array(points.values.as_standard_layout().to_owned(), strategy)
    }

    pub(crate) fn from_array(points: Array2<f64>, strategy: SearchStrategy) -> Self {
        let use_tree = match strategy {
            SearchStrategy::BruteForce => false,
            SearchStrategy::KdTree => points.nrows() > 0,
            SearchStrategy::Auto => {
                points.nrows() >= MIN_TREE_POINTS && points.ncols() <= MAX_TREE_DIMS
            }
        };
        let tree = use_tree.then(|| KdTree::build(&points));
        NeighborIndex { points, tree }
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn uses_tree(&self) -> bool {
        self.tree.is_some()
    }

    fn point(&self, i: usize) -> &[f64] {
        let d = self.points.ncols();
        &self.points.as_slice().expect("standard layout")[i * d..(i + 1) * d]
    }

    fn check_query(&self, query: &[f64]) -> Result<()> {
        if query.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: query.len(),
            });
        }
        Ok(())
    }

    /// The `k` nearest points, ascending by distance, ties by ascending id.
    pub fn knn(&self, query: &[f64], k: usize) -> Result<Vec<Neighbor>> {
        self.check_query(query)?;
        if k == 0 || k > self.len() {
            return Err(Error::InvalidArgument(format!(
                "k = {k} must lie in 1..={}",
                self.len()
            )));
        }
        let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(k + 1);
        let offer = |heap: &mut BinaryHeap<Candidate>, cand: Candidate| {
            if heap.len() < k {
                heap.push(cand);
            } else if cand < *heap.peek().expect("non-empty heap") {
                heap.pop();
                heap.push(cand);
            }
        };
        match &self.tree {
            None => {
                for i in 0..self.len() {
                    let sq = squared_distance(query, self.point(i));
                    offer(&mut heap, Candidate { sq, id: i });
                }
            }
            Some(tree) => {
                // Each entry carries a lower bound on the squared distance to its subtree.
                let mut stack = vec![(0usize, 0.0f64)];
                while let Some((node, bound)) = stack.pop() {
                    // Strict comparison keeps equal-distance points so id tie-breaks match.
                    if heap.len() == k && bound > heap.peek().expect("full heap").sq {
                        continue;
                    }
                    match tree.nodes[node] {
                        Node::Leaf { start, end } => {
                            for &i in &tree.order[start..end] {
                                let sq = squared_distance(query, self.point(i));
                                offer(&mut heap, Candidate { sq, id: i });
                            }
                        }
                        Node::Split {
                            axis,
                            value,
                            left,
                            right,
                        } => {
                            let diff = query[axis] - value;
                            let (near, far) = if diff <= 0.0 { (left, right) } else { (right, left) };
                            stack.push((far, bound.max(diff * diff)));
                            stack.push((near, bound));
                        }
                    }
                }
            }
        }
        let mut found = heap.into_sorted_vec();
        found.truncate(k);
        Ok(found
            .into_iter()
            .map(|c| Neighbor {
                id: c.id,
                distance: c.sq.sqrt(),
            })
            .collect())
    }

    pub fn nn_distance(&self, query: &[f64]) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptyTable("neighbour index".into()));
        }
        Ok(self.knn(query, 1)?[0].distance)
    }

    /// Number of points within distance `radius` (inclusive).
    pub fn radius_count(&self, query: &[f64], radius: f64) -> Result<usize> {
        self.check_query(query)?;
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
        }
        let within = |i: usize| squared_distance(query, self.point(i)).sqrt() <= radius;
        match &self.tree {
            None => Ok((0..self.len()).filter(|&i| within(i)).count()),
            Some(tree) => {
                let mut count = 0;
                let mut stack = vec![0usize];
                while let Some(node) = stack.pop() {
                    match tree.nodes[node] {
                        Node::Leaf { start, end } => {
                            count += tree.order[start..end].iter().filter(|&&i| within(i)).count();
                        }
                        Node::Split {
                            axis,
                            value,
                            left,
                            right,
                        } => {
                            let diff = query[axis] - value;
                            let plane = (diff * diff).sqrt();
                            let (near, far) = if diff <= 0.0 { (left, right) } else { (right, left) };
                            if plane <= radius {
                                stack.push(far);
                            }
                            stack.push(near);
                        }
                    }
                }
                Ok(count)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn index(rows: &[Vec<f64>], strategy: SearchStrategy) -> NeighborIndex {
        NeighborIndex::with_strategy(&EncodedMatrix::from_rows(rows).unwrap(), strategy)
    }

    #[test]
    fn knn_small_examples() {
        for s in [SearchStrategy::BruteForce, SearchStrategy::KdTree] {
            let idx = index(&[vec![0.0], vec![1.0], vec![3.0]], s);
            let got = idx.knn(&[0.9], 2).unwrap();
            assert_eq!(got[0].id, 1);
            assert!((got[0].distance - 0.1).abs() < 1e-12);
            assert_eq!(got[1].id, 0);
            assert!((got[1].distance - 0.9).abs() < 1e-12);

            let all = idx.knn(&[3.0], 3).unwrap();
            assert_eq!(all[0].distance, 0.0);
            assert_eq!(all.iter().map(|n| n.id).collect::<Vec<_>>(), [2, 1, 0]);
            assert!(idx.knn(&[0.0], 4).is_err());
            assert!(idx.knn(&[0.0, 1.0], 1).is_err());
        }
    }

    #[test]
    fn ties_break_by_id() {
        for s in [SearchStrategy::BruteForce, SearchStrategy::KdTree] {
            let idx = index(&[vec![2.0], vec![0.0], vec![2.0], vec![0.0]], s);
            let got = idx.knn(&[1.0], 4).unwrap();
            assert_eq!(got.iter().map(|n| n.id).collect::<Vec<_>>(), [0, 1, 2, 3]);
        }
    }

    #[test]
    fn nn_distance_examples() {
        let idx = index(&[vec![0.0, 0.0], vec![1.0, 1.0]], SearchStrategy::Auto);
        assert!((idx.nn_distance(&[3.0, 4.0]).unwrap() - 13f64.sqrt()).abs() < 1e-12);
        assert_eq!(idx.nn_distance(&[1.0, 1.0]).unwrap(), 0.0);
        let single = index(&[vec![2.0, 2.0]], SearchStrategy::Auto);
        assert!((single.nn_distance(&[2.0, 5.0]).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn radius_examples() {
        for s in [SearchStrategy::BruteForce, SearchStrategy::KdTree] {
            let idx = index(&[vec![0.0], vec![0.5], vec![2.0]], s);
            assert_eq!(idx.radius_count(&[0.2], 1.0).unwrap(), 2);
            assert_eq!(idx.radius_count(&[0.2], 1e-9).unwrap(), 0);
            assert!(idx.radius_count(&[0.5], 1e-12).unwrap() >= 1);
            assert!(idx.radius_count(&[0.5], 0.0).is_err());
        }
    }

    #[test]
    fn auto_strategy_picks_tree_for_low_dims() {
        let rows: Vec<Vec<f64>> = (0..100).map(|i| vec![i as f64, (i * 7 % 13) as f64]).collect();
        assert!(index(&rows, SearchStrategy::Auto).uses_tree());
        let wide: Vec<Vec<f64>> = (0..100).map(|i| vec![i as f64; 20]).collect();
        assert!(!index(&wide, SearchStrategy::Auto).uses_tree());
    }
}
