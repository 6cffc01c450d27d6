//! Diverse spanning trees: minimum spanning trees under occurrence weights.
//!
//! A tree minimizing `Σ_{e∈T} count(e)` maximizes `Σ_j d(T, T_j)`, since every spanning
//! tree has `n − 1` edges. Kruskal runs over the weight classes `E_0, E_1, …, E_i` in
//! order (a counting sort), with edge id as the tie-break inside a class.

use crate::engine::{
    diverse_solve, BiApproximation, Branching, Candidate, DiverseRunReport, ReductionType, RestrictedBcoSolver,
    Restriction,
};
use crate::error::{Error, Result};
use crate::model::{EdgeId, EdgeSubset, Graph, OccurrenceWeights, Role};
use crate::rational::int;

/// Disjoint sets with path compression and union by rank.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    components: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n], components: n }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Returns false if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

/// Verified spanning tree with a parent array rooted at vertex 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeCertificate {
    pub parent: Vec<Option<(usize, EdgeId)>>,
}

impl TreeCertificate {
    pub fn new(g: &Graph, tree: &[EdgeId]) -> Result<Self> {
        let n = g.vertex_count();
        if tree.len() + 1 != n {
            return Err(Error::InvalidArgument(format!("a spanning tree needs {} edges, got {}", n - 1, tree.len())));
        }
        let mut uf = UnionFind::new(n);
        let mut adj = vec![Vec::new(); n];
        for &id in tree {
            let e = g.edge(id);
            if !uf.union(e.u, e.v) {
                return Err(Error::InvalidArgument(format!("edge {id} closes a cycle")));
            }
            adj[e.u].push((e.v, id));
            adj[e.v].push((e.u, id));
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(x) = stack.pop() {
            for &(y, id) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some((x, id));
                    stack.push(y);
                }
            }
        }
        debug_assert!(seen.iter().all(|&s| s));
        Ok(TreeCertificate { parent })
    }
}

pub fn is_spanning_tree(g: &Graph, tree: &[EdgeId]) -> bool {
    TreeCertificate::new(g, tree).is_ok()
}

fn require_undirected(g: &Graph) -> Result<()> {
    if g.is_directed() {
        return Err(Error::InvalidGraph("spanning trees need an undirected graph".into()));
    }
    Ok(())
}

/// Edge ids bucketed by occurrence count, ascending id within each bucket.
fn weight_classes(w: &OccurrenceWeights) -> Vec<Vec<EdgeId>> {
    let mut classes = vec![Vec::new(); w.max_count() as usize + 1];
    for (id, &c) in w.counts().iter().enumerate() {
        classes[c as usize].push(id);
    }
    classes
}

/// Minimum spanning tree with respect to the occurrence counts.
pub fn min_tree_wrt_occurrence(g: &Graph, w: &OccurrenceWeights) -> Result<EdgeSubset> {
    require_undirected(g)?;
    restricted_min_tree(g, w, &Restriction::none())?.ok_or(Error::Disconnected)
}

/// Minimum occurrence-cost spanning tree containing `include` and avoiding `exclude`.
pub fn restricted_min_tree(g: &Graph, w: &OccurrenceWeights, restriction: &Restriction) -> Result<Option<EdgeSubset>> {
    require_undirected(g)?;
    restriction.check_disjoint()?;
    let n = g.vertex_count();
    let mut uf = UnionFind::new(n);
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for &id in &restriction.include {
        let e = g.edge(id);
        if !uf.union(e.u, e.v) {
            return Err(Error::CyclicInclude);
        }
        tree.push(id);
    }
    'outer: for class in weight_classes(w) {
        for id in class {
            if uf.components() == 1 {
                break 'outer;
            }
            if restriction.is_excluded(id) {
                continue;
            }
            let e = g.edge(id);
            if uf.union(e.u, e.v) {
                tree.push(id);
            }
        }
    }
    if uf.components() != 1 {
        return Ok(None);
    }
    Ok(Some(EdgeSubset::new(g.edge_count(), Role::SpanningTree, tree)?))
}

/// Exact restricted solver for spanning trees.
pub struct TreeSolver<'g> {
    graph: &'g Graph,
}

impl<'g> TreeSolver<'g> {
    pub fn new(graph: &'g Graph) -> Result<Self> {
        require_undirected(graph)?;
        Ok(TreeSolver { graph })
    }
}

impl RestrictedBcoSolver for TreeSolver<'_> {
    fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    fn branching(&self) -> Branching {
        Branching::Unordered
    }

    fn solve(&mut self, occurrence: &OccurrenceWeights, restriction: &Restriction) -> Result<Option<Candidate>> {
        Ok(restricted_min_tree(self.graph, occurrence, restriction)?.map(|t| {
            let score = occurrence.similarity(t.ids()) as i64;
            Candidate::unordered(t, score)
        }))
    }
}

/// `k` distinct spanning trees with diversity at least half the optimum.
pub fn diverse_spanning_trees(g: &Graph, k: usize) -> Result<DiverseRunReport> {
    require_undirected(g)?;
    let first = min_tree_wrt_occurrence(g, &OccurrenceWeights::zero(g.edge_count()))?;
    let mut solver = TreeSolver::new(g)?;
    diverse_solve(&mut solver, first, k, &int(1), ReductionType::Type3, &BiApproximation::exact())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::occurrence_weights;

    fn k3() -> Graph {
        Graph::unweighted(3, false, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn zero_weights_give_first_tree() {
        let t = min_tree_wrt_occurrence(&k3(), &OccurrenceWeights::zero(3)).unwrap();
        assert_eq!(t.ids(), &[0, 1]);
    }

    #[test]
    fn triangle_with_one_prior_tree() {
        // counts e0=1, e1=1, e2=0: trees {0,1}=2, {0,2}=1, {1,2}=1; id order picks {0,2}
        let g = k3();
        let prior = EdgeSubset::new(3, Role::SpanningTree, [0, 1]).unwrap();
        let w = occurrence_weights(&[prior], 3).unwrap();
        assert_eq!(min_tree_wrt_occurrence(&g, &w).unwrap().ids(), &[0, 2]);
    }

    #[test]
    fn path_graph_has_one_tree() {
        let g = Graph::unweighted(4, false, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let w = OccurrenceWeights::from_counts(vec![5, 0, 2], 5);
        assert_eq!(min_tree_wrt_occurrence(&g, &w).unwrap().ids(), &[0, 1, 2]);
    }

    #[test]
    fn disconnected_is_an_error() {
        let g = Graph::unweighted(4, false, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(min_tree_wrt_occurrence(&g, &OccurrenceWeights::zero(2)), Err(Error::Disconnected)));
    }

    #[test]
    fn restrictions() {
        let g = Graph::unweighted(4, false, &[(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        let zero = OccurrenceWeights::zero(4);
        // edge 3 is a bridge
        assert_eq!(restricted_min_tree(&g, &zero, &Restriction::new(vec![], vec![3])).unwrap(), None);
        let forced = restricted_min_tree(&g, &zero, &Restriction::new(vec![3, 2, 1], vec![])).unwrap().unwrap();
        assert_eq!(forced.ids(), &[1, 2, 3]);
        assert!(matches!(
            restricted_min_tree(&g, &zero, &Restriction::new(vec![0, 1, 2], vec![])),
            Err(Error::CyclicInclude)
        ));
        assert!(restricted_min_tree(&g, &zero, &Restriction::new(vec![0], vec![0])).is_err());
    }

    #[test]
    fn k4_minus_an_edge() {
        // K4 edges: 0:(0,1) 1:(0,2) 2:(0,3) 3:(1,2) 4:(1,3) 5:(2,3). Excluding edge 0 leaves
        // 8 of the 16 trees; with zero weights Kruskal in id order takes 1, 2, 3.
        let g = Graph::unweighted(4, false, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let t = restricted_min_tree(&g, &OccurrenceWeights::zero(6), &Restriction::new(vec![], vec![0]))
            .unwrap()
            .unwrap();
        assert_eq!(t.ids(), &[1, 2, 3]);
    }

    #[test]
    fn diverse_triangle_and_tree() {
        let r = diverse_spanning_trees(&k3(), 3).unwrap();
        assert_eq!(r.diversity, 6);
        let tree = Graph::unweighted(3, false, &[(0, 1), (1, 2)]).unwrap();
        let r = diverse_spanning_trees(&tree, 1).unwrap();
        assert_eq!(r.solutions[0].ids(), &[0, 1]);
        assert!(matches!(diverse_spanning_trees(&tree, 2), Err(Error::FewerThanK { found: 1, k: 2 })));
    }

    #[test]
    fn certificate() {
        let g = k3();
        assert!(is_spanning_tree(&g, &[0, 1]));
        assert!(!is_spanning_tree(&g, &[0]));
        let c = TreeCertificate::new(&g, &[0, 2]).unwrap();
        assert_eq!(c.parent[0], None);
        assert_eq!(c.parent[1], Some((0, 0)));
        assert_eq!(c.parent[2], Some((0, 2)));
    }
}
