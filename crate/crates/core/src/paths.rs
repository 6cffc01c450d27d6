//! Diverse c-approximate s-t shortest paths.
//!
//! The budget-constrained step minimizes `Σ f(e)` (occurrence counts) over s-t paths with
//! `ω(P) ≤ c·dist_ω(s,t)`. The table `D(v, c')` holds the least ω-length of an s-v path
//! whose f-cost is at most `c'`; each column is filled by a neighbour scan over edges with
//! `f > 0` followed by Dijkstra over the `f = 0` edges seeded with those values.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_traits::Signed;

use crate::engine::{
    diverse_solve, BiApproximation, Branching, Candidate, DiverseRunReport, ReductionType, RestrictedBcoSolver,
    Restriction,
};
use crate::error::{Error, Result};
use crate::model::{EdgeId, EdgeSubset, Graph, OccurrenceWeights, Role};
use crate::rational::{int, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Back {
    Source,
    Via { edge: EdgeId, from: usize, col: usize },
}

/// The `D(v, c')` table over one (possibly reduced) graph.
#[derive(Debug, Clone)]
pub struct BicriteriaTable {
    source: usize,
    dist: Vec<Vec<Option<Rational>>>,
    back: Vec<Vec<Option<Back>>>,
}

impl BicriteriaTable {
    /// Fills every column `0..=r·(n'−1)` where `n'` counts allowed vertices and `r` is the
    /// largest f among allowed edges.
    pub fn build(g: &Graph, f: &[u32], source: usize, allowed_edge: &[bool], allowed_vertex: &[bool]) -> Self {
        let n = g.vertex_count();
        let active = allowed_vertex.iter().filter(|&&a| a).count().max(1);
        let usable = |id: EdgeId| {
            let e = g.edge(id);
            allowed_edge[id] && allowed_vertex[e.u] && allowed_vertex[e.v]
        };
        let r = (0..g.edge_count()).filter(|&id| usable(id)).map(|id| f[id]).max().unwrap_or(0) as usize;
        let columns = r * (active - 1) + 1;

        let mut zero_out = vec![Vec::new(); n];
        let mut positive_in = vec![Vec::new(); n];
        for (id, e) in g.edges().iter().enumerate() {
            if !usable(id) {
                continue;
            }
            if f[id] == 0 {
                zero_out[e.u].push(id);
            } else {
                positive_in[e.v].push(id);
            }
        }

        let mut dist: Vec<Vec<Option<Rational>>> = vec![vec![None; columns]; n];
        let mut back: Vec<Vec<Option<Back>>> = vec![vec![None; columns]; n];
        for col in 0..columns {
            let mut label: Vec<Option<Rational>> = vec![None; n];
            let mut via: Vec<Option<Back>> = vec![None; n];
            label[source] = Some(int(0));
            via[source] = Some(Back::Source);
            // Case 1: last edge has f > 0.
            if col > 0 {
                for v in 0..n {
                    if v == source || !allowed_vertex[v] {
                        continue;
                    }
                    for &id in &positive_in[v] {
                        let cost = f[id] as usize;
                        if cost > col {
                            continue;
                        }
                        let x = g.edge(id).u;
                        if let Some(dx) = &dist[x][col - cost] {
                            let cand = dx + g.weight(id);
                            if label[v].as_ref().is_none_or(|cur| cand < *cur) {
                                label[v] = Some(cand);
                                via[v] = Some(Back::Via { edge: id, from: x, col: col - cost });
                            }
                        }
                    }
                }
            }
            // Case 2: extend Case-1 labels along f = 0 edges.
            let mut heap = BinaryHeap::new();
            for (v, l) in label.iter().enumerate() {
                if let Some(l) = l {
                    heap.push(Reverse((l.clone(), v)));
                }
            }
            let mut done = vec![false; n];
            while let Some(Reverse((d, y))) = heap.pop() {
                if done[y] || label[y].as_ref() != Some(&d) {
                    continue;
                }
                done[y] = true;
                for &id in &zero_out[y] {
                    let w = g.edge(id).v;
                    let cand = &d + g.weight(id);
                    if label[w].as_ref().is_none_or(|cur| cand < *cur) {
                        label[w] = Some(cand.clone());
                        via[w] = Some(Back::Via { edge: id, from: y, col });
                        heap.push(Reverse((cand, w)));
                    }
                }
            }
            for v in 0..n {
                dist[v][col] = label[v].take();
                back[v][col] = via[v].take();
            }
        }
        BicriteriaTable { source, dist, back }
    }

    pub fn columns(&self) -> usize {
        self.dist.first().map_or(0, |row| row.len())
    }

    /// `D(v, c')`, or `None` for infinity. Columns past the end repeat the last one.
    pub fn value(&self, v: usize, col: usize) -> Option<&Rational> {
        let col = col.min(self.columns() - 1);
        self.dist[v][col].as_ref()
    }

    /// Ordered edge list of a path admitting `D(v, c')`.
    pub fn path_to(&self, v: usize, col: usize) -> Option<Vec<EdgeId>> {
        let mut col = col.min(self.columns() - 1);
        self.dist[v][col].as_ref()?;
        let mut edges = Vec::new();
        let mut cur = v;
        loop {
            match self.back[cur][col].as_ref()? {
                Back::Source => break,
                Back::Via { edge, from, col: c } => {
                    edges.push(*edge);
                    cur = *from;
                    col = *c;
                }
            }
        }
        debug_assert_eq!(cur, self.source);
        edges.reverse();
        Some(edges)
    }

    /// Smallest `c'` with `D(t, c') ≤ budget`.
    pub fn min_cost_within(&self, t: usize, budget: &Rational) -> Option<usize> {
        (0..self.columns()).find(|&c| self.dist[t][c].as_ref().is_some_and(|d| d <= budget))
    }
}

/// An s-t path as an ordered edge list with its two costs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StPath {
    pub edges: Vec<EdgeId>,
    pub length: Rational,
    pub f_cost: u64,
}

impl StPath {
    pub fn subset(&self, m: usize) -> EdgeSubset {
        EdgeSubset::new(m, Role::StPath, self.edges.iter().copied()).expect("path edges are graph edges")
    }

    pub fn vertices(&self, g: &Graph) -> Vec<usize> {
        let mut vs = Vec::with_capacity(self.edges.len() + 1);
        if let Some(&first) = self.edges.first() {
            vs.push(g.edge(first).u);
        }
        vs.extend(self.edges.iter().map(|&id| g.edge(id).v));
        vs
    }
}

/// A directed graph with strictly positive lengths, fixed endpoints and budget `c·dist(s,t)`.
#[derive(Debug, Clone)]
pub struct ShortPathInstance<'g> {
    graph: &'g Graph,
    source: usize,
    target: usize,
    factor: Rational,
    shortest: Rational,
    budget: Rational,
}

impl<'g> ShortPathInstance<'g> {
    pub fn new(graph: &'g Graph, source: usize, target: usize, factor: Rational) -> Result<Self> {
        if !graph.is_directed() {
            return Err(Error::InvalidGraph("shortest-path diversity needs a directed graph".into()));
        }
        let n = graph.vertex_count();
        if source >= n || target >= n {
            return Err(Error::InvalidArgument(format!("source/target out of range 0..{n}")));
        }
        if source == target {
            return Err(Error::InvalidArgument("source and target must differ".into()));
        }
        if let Some(id) = graph.weights().iter().position(|w| !w.is_positive()) {
            return Err(Error::InvalidGraph(format!("edge {id} has non-positive length; lengths must be > 0")));
        }
        if factor < int(1) {
            return Err(Error::InvalidArgument("approximation factor c must be at least 1".into()));
        }
        let shortest = shortest_distance(graph, source, target).ok_or(Error::Unreachable(target))?;
        let budget = &factor * &shortest;
        Ok(ShortPathInstance { graph, source, target, factor, shortest, budget })
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn shortest(&self) -> &Rational {
        &self.shortest
    }

    pub fn budget(&self) -> &Rational {
        &self.budget
    }

    pub fn factor(&self) -> &Rational {
        &self.factor
    }

    /// Min-f path that starts with `prefix` and avoids `exclude`, within the original budget.
    pub fn solve(&self, f: &[u32], prefix: &[EdgeId], exclude: &[EdgeId]) -> Result<Option<StPath>> {
        let g = self.graph;
        let n = g.vertex_count();
        if f.len() != g.edge_count() {
            return Err(Error::InvalidArgument("cost vector length differs from edge count".into()));
        }
        // Validate the prefix: a simple directed path leaving the source.
        let mut on_prefix = vec![false; n];
        on_prefix[self.source] = true;
        let mut end = self.source;
        let mut prefix_len = int(0);
        let mut prefix_f = 0u64;
        for (pos, &id) in prefix.iter().enumerate() {
            if id >= g.edge_count() {
                return Err(Error::MalformedPrefix(format!("edge {id} does not exist")));
            }
            let e = g.edge(id);
            if e.u != end {
                return Err(Error::MalformedPrefix(format!("edge {id} at position {pos} does not continue the path")));
            }
            if on_prefix[e.v] {
                return Err(Error::MalformedPrefix(format!("edge {id} revisits vertex {}", e.v)));
            }
            on_prefix[e.v] = true;
            end = e.v;
            prefix_len += g.weight(id);
            prefix_f += u64::from(f[id]);
            if end == self.target && pos + 1 != prefix.len() {
                // an s-t path cannot continue past t
                return Ok(None);
            }
        }
        if prefix.iter().any(|id| exclude.contains(id)) {
            return Err(Error::InvalidRestriction("prefix edge is also excluded".into()));
        }
        if prefix_len > self.budget {
            return Ok(None);
        }
        if end == self.target {
            return Ok(Some(StPath { edges: prefix.to_vec(), length: prefix_len, f_cost: prefix_f }));
        }
        let mut allowed_vertex: Vec<bool> = on_prefix.iter().map(|&p| !p).collect();
        allowed_vertex[end] = true;
        let mut allowed_edge = vec![true; g.edge_count()];
        for &id in exclude {
            if id < allowed_edge.len() {
                allowed_edge[id] = false;
            }
        }
        // the suffix may not re-enter the prefix end
        for (id, e) in g.edges().iter().enumerate() {
            if e.v == end {
                allowed_edge[id] = false;
            }
        }
        let table = BicriteriaTable::build(g, f, end, &allowed_edge, &allowed_vertex);
        let remaining = &self.budget - &prefix_len;
        let Some(col) = table.min_cost_within(self.target, &remaining) else {
            return Ok(None);
        };
        let suffix = table.path_to(self.target, col).expect("finite cell has a path");
        let mut edges = prefix.to_vec();
        edges.extend_from_slice(&suffix);
        let length = g.total_weight(&edges);
        let f_cost = edges.iter().map(|&id| u64::from(f[id])).sum();
        Ok(Some(StPath { edges, length, f_cost }))
    }
}

/// Dijkstra distance under the edge weights, `None` if unreachable.
pub fn shortest_distance(g: &Graph, s: usize, t: usize) -> Option<Rational> {
    let n = g.vertex_count();
    let adj = g.incidence();
    let mut dist: Vec<Option<Rational>> = vec![None; n];
    dist[s] = Some(int(0));
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((int(0), s)));
    let mut done = vec![false; n];
    while let Some(Reverse((d, x))) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        if x == t {
            return Some(d);
        }
        for &id in &adj[x] {
            let e = g.edge(id);
            let y = if e.u == x { e.v } else { e.u };
            let cand = &d + g.weight(id);
            if dist[y].as_ref().is_none_or(|cur| cand < *cur) {
                dist[y] = Some(cand.clone());
                heap.push(Reverse((cand, y)));
            }
        }
    }
    dist[t].take()
}

/// Path minimizing `Σ f(e)` subject to `ω(P) ≤ c·dist_ω(s,t)`.
pub fn bicriteria_shortest_path(g: &Graph, f: &[u32], s: usize, t: usize, c: &Rational) -> Result<StPath> {
    let inst = ShortPathInstance::new(g, s, t, c.clone())?;
    inst.solve(f, &[], &[])?.ok_or(Error::NoPathWithinBudget)
}

/// As [`bicriteria_shortest_path`], restricted to paths that start with `prefix` and avoid `exclude`.
pub fn restricted_bicriteria(
    g: &Graph,
    f: &[u32],
    s: usize,
    t: usize,
    c: &Rational,
    prefix: &[EdgeId],
    exclude: &[EdgeId],
) -> Result<Option<StPath>> {
    ShortPathInstance::new(g, s, t, c.clone())?.solve(f, prefix, exclude)
}

/// Exact restricted solver with prefix branching.
pub struct PathSolver<'a, 'g> {
    instance: &'a ShortPathInstance<'g>,
}

impl<'a, 'g> PathSolver<'a, 'g> {
    pub fn new(instance: &'a ShortPathInstance<'g>) -> Self {
        PathSolver { instance }
    }
}

impl RestrictedBcoSolver for PathSolver<'_, '_> {
    fn edge_count(&self) -> usize {
        self.instance.graph.edge_count()
    }

    fn branching(&self) -> Branching {
        Branching::Prefix
    }

    fn solve(&mut self, occurrence: &OccurrenceWeights, restriction: &Restriction) -> Result<Option<Candidate>> {
        let m = self.edge_count();
        let path = self.instance.solve(occurrence.counts(), &restriction.include, &restriction.exclude)?;
        Ok(path.map(|p| Candidate { solution: p.subset(m), score: p.f_cost as i64, order: p.edges }))
    }
}

/// `k` distinct c-approximate s-t shortest paths with diversity at least half the optimum,
/// or [`Error::FewerThanK`] when fewer than `k` such paths exist.
pub fn diverse_short_paths(g: &Graph, s: usize, t: usize, k: usize, c: &Rational) -> Result<DiverseRunReport> {
    let instance = ShortPathInstance::new(g, s, t, c.clone())?;
    let zeros = vec![0; g.edge_count()];
    let first = ShortPathInstance::new(g, s, t, int(1))?
        .solve(&zeros, &[], &[])?
        .ok_or(Error::NoPathWithinBudget)?;
    let mut solver = PathSolver::new(&instance);
    diverse_solve(&mut solver, first.subset(g.edge_count()), k, c, ReductionType::Type3, &BiApproximation::exact())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    /// s=0, t=3: route A 0->1->3 (length 1, f 1), route B 0->2->3 (length 3/2, f 0).
    fn two_routes() -> Graph {
        Graph::new(
            4,
            true,
            vec![(0, 1, ratio(1, 2)), (1, 3, ratio(1, 2)), (0, 2, ratio(3, 4)), (2, 3, ratio(3, 4))],
        )
        .unwrap()
    }

    #[test]
    fn zero_costs_give_a_shortest_path() {
        let g = two_routes();
        let p = bicriteria_shortest_path(&g, &[0, 0, 0, 0], 0, 3, &int(1)).unwrap();
        assert_eq!(p.edges, vec![0, 1]);
        assert_eq!(p.f_cost, 0);
    }

    #[test]
    fn budget_decides_between_routes() {
        let g = two_routes();
        let f = [1, 0, 0, 0];
        assert_eq!(bicriteria_shortest_path(&g, &f, 0, 3, &int(2)).unwrap().edges, vec![2, 3]);
        assert_eq!(bicriteria_shortest_path(&g, &f, 0, 3, &ratio(6, 5)).unwrap().edges, vec![0, 1]);
    }

    #[test]
    fn rejects_bad_instances() {
        let g = two_routes();
        assert!(matches!(bicriteria_shortest_path(&g, &[0; 4], 3, 0, &int(1)), Err(Error::Unreachable(0))));
        let zero = Graph::new(2, true, vec![(0, 1, int(0))]).unwrap();
        assert!(bicriteria_shortest_path(&zero, &[0], 0, 1, &int(1)).is_err());
        let undirected = Graph::unweighted(2, false, &[(0, 1)]).unwrap();
        assert!(bicriteria_shortest_path(&undirected, &[0], 0, 1, &int(1)).is_err());
    }

    #[test]
    fn prefix_restrictions() {
        let g = two_routes();
        let f = [0, 0, 0, 0];
        let full = restricted_bicriteria(&g, &f, 0, 3, &int(1), &[0, 1], &[]).unwrap().unwrap();
        assert_eq!(full.edges, vec![0, 1]);
        // cut every edge into t
        assert!(restricted_bicriteria(&g, &f, 0, 3, &int(2), &[], &[1, 3]).unwrap().is_none());
        // the worse branch's completion, allowed at c = 2
        let worse = restricted_bicriteria(&g, &f, 0, 3, &int(2), &[2], &[]).unwrap().unwrap();
        assert_eq!(worse.edges, vec![2, 3]);
        // same prefix but the budget forbids it
        assert!(restricted_bicriteria(&g, &f, 0, 3, &int(1), &[2], &[]).unwrap().is_none());
        assert!(matches!(
            restricted_bicriteria(&g, &f, 0, 3, &int(1), &[1], &[]),
            Err(Error::MalformedPrefix(_))
        ));
    }

    #[test]
    fn table_is_monotone_and_simple() {
        let g = two_routes();
        let f = [1, 1, 0, 2];
        let allowed_e = vec![true; 4];
        let allowed_v = vec![true; 4];
        let table = BicriteriaTable::build(&g, &f, 0, &allowed_e, &allowed_v);
        assert_eq!(table.columns(), 2 * 3 + 1);
        for v in 0..4 {
            for c in 1..table.columns() {
                match (table.value(v, c - 1), table.value(v, c)) {
                    (Some(a), Some(b)) => assert!(b <= a),
                    (Some(_), None) => panic!("lost a path"),
                    _ => {}
                }
            }
        }
        assert_eq!(table.value(3, 0), None);
        assert_eq!(table.value(3, 2), Some(&int(1)));
        assert_eq!(table.path_to(3, 2), Some(vec![0, 1]));
    }

    #[test]
    fn diverse_disjoint_paths() {
        let g = Graph::unweighted(4, true, &[(0, 1), (1, 3), (0, 2), (2, 3)]).unwrap();
        let r = diverse_short_paths(&g, 0, 3, 2, &int(1)).unwrap();
        assert_eq!(r.diversity, 4);
        assert!(matches!(diverse_short_paths(&g, 0, 3, 3, &int(1)), Err(Error::FewerThanK { found: 2, k: 3 })));
    }
}
