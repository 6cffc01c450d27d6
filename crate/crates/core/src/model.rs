//! Graphs, edge-subset solutions, Hamming distance and occurrence bookkeeping.

use std::collections::HashSet;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
}

/// A simple graph with dense edge ids `0..m` and a non-negative rational weight per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    vertex_count: usize,
    directed: bool,
    edges: Vec<Edge>,
    weights: Vec<Rational>,
}

impl Graph {
    pub fn new(vertex_count: usize, directed: bool, edges: Vec<(usize, usize, Rational)>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidGraph("vertex count must be positive".into()));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut out_edges = Vec::with_capacity(edges.len());
        let mut weights = Vec::with_capacity(edges.len());
        for (id, (u, v, w)) in edges.into_iter().enumerate() {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::InvalidGraph(format!("edge {id} ({u},{v}) has an endpoint out of range")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("edge {id} is a self-loop at {u}")));
            }
            if w.is_negative() {
                return Err(Error::InvalidGraph(format!("edge {id} has negative weight")));
            }
            let key = if directed || u < v { (u, v) } else { (v, u) };
            if !seen.insert(key) {
                return Err(Error::InvalidGraph(format!("edge {id} duplicates ({u},{v})")));
            }
            out_edges.push(Edge { u, v });
            weights.push(w);
        }
        Ok(Graph { vertex_count, directed, edges: out_edges, weights })
    }

    /// Unit-weight graph from endpoint pairs.
    pub fn unweighted(vertex_count: usize, directed: bool, pairs: &[(usize, usize)]) -> Result<Self> {
        Self::new(vertex_count, directed, pairs.iter().map(|&(u, v)| (u, v, int(1))).collect())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn weight(&self, id: EdgeId) -> &Rational {
        &self.weights[id]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn with_weights(&self, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != self.edges.len() {
            return Err(Error::InvalidGraph("weight vector length differs from edge count".into()));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidGraph("negative weight".into()));
        }
        Ok(Graph { weights, ..self.clone() })
    }

    /// Edge ids leaving each vertex (both directions for undirected graphs).
    pub fn incidence(&self) -> Vec<Vec<EdgeId>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for (id, e) in self.edges.iter().enumerate() {
            adj[e.u].push(id);
            if !self.directed {
                adj[e.v].push(id);
            }
        }
        adj
    }

    /// Connectivity of the underlying undirected graph.
    pub fn is_connected(&self) -> bool {
        let adj = self.incidence_undirected();
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &id in &adj[x] {
                let e = self.edges[id];
                let y = if e.u == x { e.v } else { e.u };
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == self.vertex_count
    }

    fn incidence_undirected(&self) -> Vec<Vec<EdgeId>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for (id, e) in self.edges.iter().enumerate() {
            adj[e.u].push(id);
            adj[e.v].push(id);
        }
        adj
    }

    pub fn total_weight(&self, ids: &[EdgeId]) -> Rational {
        ids.iter().fold(int(0), |acc, &id| acc + &self.weights[id])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    SpanningTree,
    StPath,
    Matching,
    MatroidBasis,
    Generic,
}

/// A solution: a sorted, duplicate-free set of edge ids over a universe of `universe` edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeSubset {
    universe: usize,
    ids: Vec<EdgeId>,
    role: Role,
}

impl EdgeSubset {
    pub fn new(universe: usize, role: Role, ids: impl IntoIterator<Item = EdgeId>) -> Result<Self> {
        let mut ids: Vec<EdgeId> = ids.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        if let Some(&bad) = ids.iter().find(|&&id| id >= universe) {
            return Err(Error::InvalidArgument(format!("edge id {bad} outside universe of {universe}")));
        }
        Ok(EdgeSubset { universe, ids, role })
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn ids(&self) -> &[EdgeId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.ids.binary_search(&id).is_ok()
    }

    /// Same edge set, ignoring the role tag.
    pub fn same_edges(&self, other: &EdgeSubset) -> bool {
        self.universe == other.universe && self.ids == other.ids
    }
}

/// `|a △ b|`.
pub fn hamming_distance(a: &EdgeSubset, b: &EdgeSubset) -> Result<usize> {
    if a.universe != b.universe {
        return Err(Error::IncomparableSolutions(a.universe, b.universe));
    }
    Ok(sorted_symmetric_difference(&a.ids, &b.ids))
}

pub(crate) fn sorted_symmetric_difference(a: &[EdgeId], b: &[EdgeId]) -> usize {
    let (mut i, mut j, mut common) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    a.len() + b.len() - 2 * common
}

/// Sum of pairwise Hamming distances.
pub fn diversity_sum(solutions: &[EdgeSubset]) -> Result<usize> {
    if solutions.is_empty() {
        return Err(Error::EmptySolutionList);
    }
    let mut total = 0;
    for (i, a) in solutions.iter().enumerate() {
        for b in &solutions[i + 1..] {
            total += hamming_distance(a, b)?;
        }
    }
    Ok(total)
}

/// Full pairwise distance matrix.
pub fn pairwise_distances(solutions: &[EdgeSubset]) -> Result<Vec<Vec<usize>>> {
    let k = solutions.len();
    let mut m = vec![vec![0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let d = hamming_distance(&solutions[i], &solutions[j])?;
            m[i][j] = d;
            m[j][i] = d;
        }
    }
    Ok(m)
}

/// How often each edge occurs among already-selected solutions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccurrenceWeights {
    count: Vec<u32>,
    num_solutions: usize,
}

impl OccurrenceWeights {
    pub fn zero(m: usize) -> Self {
        OccurrenceWeights { count: vec![0; m], num_solutions: 0 }
    }

    pub fn from_counts(count: Vec<u32>, num_solutions: usize) -> Self {
        debug_assert!(count.iter().all(|&c| c as usize <= num_solutions));
        OccurrenceWeights { count, num_solutions }
    }

    pub fn add(&mut self, y: &EdgeSubset) {
        for &id in y.ids() {
            self.count[id] += 1;
        }
        self.num_solutions += 1;
    }

    pub fn count(&self, id: EdgeId) -> u32 {
        self.count[id]
    }

    pub fn counts(&self) -> &[u32] {
        &self.count
    }

    pub fn num_solutions(&self) -> usize {
        self.num_solutions
    }

    pub fn edge_count(&self) -> usize {
        self.count.len()
    }

    /// Largest count, the `r` in the range bound `{0..r}`.
    pub fn max_count(&self) -> u32 {
        self.count.iter().copied().max().unwrap_or(0)
    }

    /// `Σ_{e∈ids} count(e)`.
    pub fn similarity(&self, ids: &[EdgeId]) -> u64 {
        ids.iter().map(|&id| u64::from(self.count[id])).sum()
    }
}

pub fn occurrence_weights(solutions: &[EdgeSubset], m: usize) -> Result<OccurrenceWeights> {
    let mut w = OccurrenceWeights::zero(m);
    for y in solutions {
        if y.universe() != m {
            return Err(Error::IncomparableSolutions(y.universe(), m));
        }
        w.add(y);
    }
    Ok(w)
}

/// `Σ_j d(y, y_j)` from occurrence counts alone:
/// `Σ_j |y_j| + i·|y| − 2·Σ_{e∈y} count(e)`.
pub fn farness_objective(y: &EdgeSubset, weights: &OccurrenceWeights, per_solution_size: &[usize]) -> u64 {
    debug_assert_eq!(per_solution_size.len(), weights.num_solutions());
    let total: u64 = per_solution_size.iter().map(|&s| s as u64).sum();
    farness_from_parts(total, weights.num_solutions(), y.ids(), weights)
}

pub(crate) fn farness_from_parts(total_size: u64, i: usize, ids: &[EdgeId], weights: &OccurrenceWeights) -> u64 {
    let raw = total_size as i128 + (i as i128) * (ids.len() as i128) - 2 * weights.similarity(ids) as i128;
    debug_assert!(raw >= 0);
    raw as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(ids: &[usize]) -> EdgeSubset {
        EdgeSubset::new(6, Role::Generic, ids.iter().copied()).unwrap()
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_distance(&s(&[0, 1]), &s(&[0, 1])).unwrap(), 0);
        assert_eq!(hamming_distance(&s(&[0, 1]), &s(&[2, 3])).unwrap(), 4);
        assert_eq!(hamming_distance(&s(&[0, 1, 2]), &s(&[1, 2, 5])).unwrap(), 2);
    }

    #[test]
    fn hamming_rejects_other_universe() {
        let other = EdgeSubset::new(3, Role::Generic, [0]).unwrap();
        assert!(matches!(
            hamming_distance(&s(&[0]), &other),
            Err(Error::IncomparableSolutions(6, 3))
        ));
    }

    #[test]
    fn diversity_examples() {
        assert_eq!(diversity_sum(&[s(&[0, 3])]).unwrap(), 0);
        assert_eq!(diversity_sum(&[s(&[0]), s(&[1]), s(&[2])]).unwrap(), 6);
        // spanning trees of a triangle: each omits one edge
        let k3 = [s(&[1, 2]), s(&[0, 2]), s(&[0, 1])];
        assert_eq!(diversity_sum(&k3).unwrap(), 6);
        assert!(matches!(diversity_sum(&[]), Err(Error::EmptySolutionList)));
    }

    #[test]
    fn occurrence_examples() {
        let sol = |m, ids: &[usize]| EdgeSubset::new(m, Role::Generic, ids.iter().copied()).unwrap();
        let w = occurrence_weights(&[sol(4, &[0, 1]), sol(4, &[1, 2])], 4).unwrap();
        assert_eq!(w.counts(), &[1, 2, 1, 0]);
        assert_eq!(w.num_solutions(), 2);
        let w = occurrence_weights(&[sol(2, &[])], 2).unwrap();
        assert_eq!(w.counts(), &[0, 0]);
        let w = occurrence_weights(&[sol(1, &[0]), sol(1, &[0]), sol(1, &[0])], 1).unwrap();
        assert_eq!(w.count(0), 3);
    }

    #[test]
    fn farness_examples() {
        let prior = [s(&[0, 1])];
        let w = occurrence_weights(&prior, 6).unwrap();
        assert_eq!(farness_objective(&s(&[0, 1]), &w, &[2]), 0);
        assert_eq!(farness_objective(&s(&[2, 3]), &w, &[2]), 4);
    }

    #[test]
    fn graph_validation() {
        assert!(Graph::unweighted(3, false, &[(0, 0)]).is_err());
        assert!(Graph::unweighted(3, false, &[(0, 1), (1, 0)]).is_err());
        assert!(Graph::unweighted(3, true, &[(0, 1), (1, 0)]).is_ok());
        assert!(Graph::unweighted(3, false, &[(0, 3)]).is_err());
        assert!(Graph::new(2, false, vec![(0, 1, int(-1))]).is_err());
        assert!(Graph::unweighted(0, false, &[]).is_err());
        let g = Graph::unweighted(4, false, &[(0, 1), (2, 3)]).unwrap();
        assert!(!g.is_connected());
    }
}
