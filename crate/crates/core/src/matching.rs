//! Diverse c-maximum matchings.
//!
//! A matching `M` is c-maximum when `|M|·c ≥ Δ*`, `Δ*` being the maximum matching size.
//! Restricted subproblems are answered through an exact-weight perfect matching question
//! on a lifted graph `H`: a copy of `G` plus `|V|` fresh vertices that absorb unmatched
//! vertices at zero weight. An original edge `e` weighs `Γ + ℓ(e)` in `H`, so a perfect
//! matching of `H` of weight `xΓ + y` is a matching of `G` with `x` edges and cost `y`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{
    diverse_solve, BiApproximation, Branching, Candidate, DiverseRunReport, ReductionType, RestrictedBcoSolver,
    Restriction,
};
use crate::error::{Error, Result};
use crate::field::{Field, FieldConfig};
use crate::model::{EdgeId, EdgeSubset, Graph, OccurrenceWeights, Role};
use crate::rational::{ceil_div, int, Rational};

/// How the maximum matching size `Δ*` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchingMethod {
    #[default]
    Blossom,
    Exhaustive,
}

fn require_undirected(g: &Graph) -> Result<()> {
    if g.is_directed() {
        return Err(Error::InvalidGraph("matchings need an undirected graph".into()));
    }
    Ok(())
}

pub fn is_matching(g: &Graph, ids: &[EdgeId]) -> bool {
    let mut used = vec![false; g.vertex_count()];
    ids.iter().all(|&id| {
        if id >= g.edge_count() {
            return false;
        }
        let e = g.edge(id);
        let free = !used[e.u] && !used[e.v];
        used[e.u] = true;
        used[e.v] = true;
        free
    })
}

/// A maximum-cardinality matching by Edmonds' blossom algorithm.
pub fn maximum_matching(g: &Graph) -> Result<EdgeSubset> {
    maximum_matching_with(g, MatchingMethod::Blossom)
}

pub fn maximum_matching_with(g: &Graph, method: MatchingMethod) -> Result<EdgeSubset> {
    require_undirected(g)?;
    let ids = match method {
        MatchingMethod::Blossom => blossom(g),
        MatchingMethod::Exhaustive => exhaustive(g),
    };
    EdgeSubset::new(g.edge_count(), Role::Matching, ids)
}

fn exhaustive(g: &Graph) -> Vec<EdgeId> {
    fn rec(g: &Graph, next: usize, used: &mut [bool], cur: &mut Vec<EdgeId>, best: &mut Vec<EdgeId>) {
        if cur.len() + (g.edge_count() - next) <= best.len() {
            return;
        }
        if next == g.edge_count() {
            *best = cur.clone();
            return;
        }
        let e = g.edge(next);
        if !used[e.u] && !used[e.v] {
            used[e.u] = true;
            used[e.v] = true;
            cur.push(next);
            rec(g, next + 1, used, cur, best);
            cur.pop();
            used[e.u] = false;
            used[e.v] = false;
        }
        rec(g, next + 1, used, cur, best);
    }
    let mut best = Vec::new();
    rec(g, 0, &mut vec![false; g.vertex_count()], &mut Vec::new(), &mut best);
    best
}

const NONE: usize = usize::MAX;

struct Blossom<'a> {
    adj: &'a [Vec<usize>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
}

impl Blossom<'_> {
    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.adj.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    /// Endpoint of an augmenting path from `root`, if one exists.
    fn find_path(&mut self, root: usize) -> Option<usize> {
        let n = self.adj.len();
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &to in self.adj[v].iter() {
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let next = self.mate[to];
                    self.used[next] = true;
                    queue.push_back(next);
                }
            }
        }
        None
    }
}

fn blossom(g: &Graph) -> Vec<EdgeId> {
    let n = g.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for e in g.edges() {
        adj[e.u].push(e.v);
        adj[e.v].push(e.u);
    }
    let mut b = Blossom {
        adj: &adj,
        mate: vec![NONE; n],
        parent: vec![NONE; n],
        base: (0..n).collect(),
        used: vec![false; n],
        in_blossom: vec![false; n],
    };
    for root in 0..n {
        if b.mate[root] != NONE {
            continue;
        }
        if let Some(mut v) = b.find_path(root) {
            while v != NONE {
                let pv = b.parent[v];
                let ppv = b.mate[pv];
                b.mate[v] = pv;
                b.mate[pv] = v;
                v = ppv;
            }
        }
    }
    g.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| b.mate[e.u] == e.v)
        .map(|(id, _)| id)
        .collect()
}

/// Edge of the lifted graph; `original` is the edge of `G` it copies, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LiftedEdge {
    pub u: usize,
    pub v: usize,
    pub weight: u64,
    pub original: Option<EdgeId>,
}

/// `H`: the surviving vertices of `G`, an equal number of absorbing vertices forming a
/// clique, and every surviving-to-absorbing pair.
#[derive(Debug, Clone)]
pub struct LiftedGraph {
    size: usize,
    edges: Vec<LiftedEdge>,
    gamma: u64,
    degree: usize,
}

impl LiftedGraph {
    /// `Γ = r·⌈n/2⌉ + 1` separates every `(x, y)` with `y ≤ r·x ≤ r·⌊n/2⌋`.
    pub fn gamma_for(vertex_count: usize, max_cost: u64) -> u64 {
        max_cost * vertex_count.div_ceil(2) as u64 + 1
    }

    /// Lifts the subgraph of `g` on vertices with `keep_vertex` and edges with `keep_edge`.
    pub fn new(g: &Graph, costs: &[u32], keep_vertex: &[bool], keep_edge: &[bool], gamma: u64) -> Self {
        let mut index = vec![NONE; g.vertex_count()];
        let mut n = 0;
        for v in 0..g.vertex_count() {
            if keep_vertex[v] {
                index[v] = n;
                n += 1;
            }
        }
        let mut edges = Vec::new();
        let mut kept_costs = Vec::new();
        for (id, e) in g.edges().iter().enumerate() {
            if keep_edge[id] && keep_vertex[e.u] && keep_vertex[e.v] {
                edges.push(LiftedEdge { u: index[e.u], v: index[e.v], weight: gamma + costs[id] as u64, original: Some(id) });
                kept_costs.push(costs[id] as u64);
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                edges.push(LiftedEdge { u: n + a, v: n + b, weight: 0, original: None });
            }
            for z in 0..n {
                edges.push(LiftedEdge { u: a, v: n + z, weight: 0, original: None });
            }
        }
        let max_x = n / 2;
        kept_costs.sort_unstable_by(|a, b| b.cmp(a));
        let max_y: u64 = kept_costs.iter().take(max_x).sum();
        let degree = if kept_costs.is_empty() { 0 } else { (max_x.min(kept_costs.len()) as u64 * gamma + max_y) as usize };
        LiftedGraph { size: 2 * n, edges, gamma, degree }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn edges(&self) -> &[LiftedEdge] {
        &self.edges
    }

    pub fn gamma(&self) -> u64 {
        self.gamma
    }

    pub fn encode(&self, x: u64, y: u64) -> u64 {
        x * self.gamma + y
    }

    pub fn decode(&self, t: u64) -> (u64, u64) {
        (t / self.gamma, t % self.gamma)
    }

    /// Upper bound on the lifted weight of any perfect matching.
    pub fn degree_bound(&self) -> usize {
        self.degree
    }

    fn without(&self, skip: usize) -> LiftedGraph {
        let mut h = self.clone();
        h.edges.remove(skip);
        h
    }

    /// One randomized evaluation of the Pfaffian's weight polynomial: coefficient `t`
    /// is nonzero only if a perfect matching of weight `t` exists.
    fn spectrum_trial<R: Rng>(&self, field: &Field, rng: &mut R) -> Vec<u64> {
        let values: Vec<u64> = self.edges.iter().map(|_| field.random_nonzero(rng)).collect();
        let points: Vec<u64> = (0..=self.degree as u64)
            .map(|x| {
                let mut a = vec![vec![0u64; self.size]; self.size];
                for (e, &r) in self.edges.iter().zip(&values) {
                    let val = field.mul(r, field.pow(x, e.weight));
                    a[e.u][e.v] = val;
                    a[e.v][e.u] = field.neg(val);
                }
                field.pfaffian(a)
            })
            .collect();
        field.interpolate_at_integers(&points)
    }

    /// Weights with a witnessed perfect matching in any of `repeats` trials.
    pub fn spectrum<R: Rng>(&self, cfg: &FieldConfig, rng: &mut R) -> Result<Vec<bool>> {
        let field = Field::new(cfg.modulus);
        field.check_degree(self.degree)?;
        let mut seen = vec![false; self.degree + 1];
        for _ in 0..cfg.repeats {
            for (s, c) in seen.iter_mut().zip(self.spectrum_trial(&field, rng)) {
                *s |= c != 0;
            }
        }
        Ok(seen)
    }
}

/// Does `H` have a perfect matching of lifted weight exactly `target`? False negatives
/// only, each trial failing with probability at most `(|U|/2)/(p−1)`.
pub fn exact_weight_pm_decision<R: Rng>(h: &LiftedGraph, target: u64, cfg: &FieldConfig, rng: &mut R) -> Result<bool> {
    let field = Field::new(cfg.modulus);
    field.check_degree(h.degree)?;
    if target > h.degree as u64 {
        return Ok(false);
    }
    for _ in 0..cfg.repeats {
        if h.spectrum_trial(&field, rng)[target as usize] != 0 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Which `(x, y)` a restricted solve selects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchingObjective {
    /// Smallest cost `y`, then largest size.
    MinCost,
    /// Largest `i·x − 2y` against `i` earlier matchings, then smallest cost.
    MaxFarness { earlier: u64 },
}

/// A graph with its maximum matching size and the size floor `⌈Δ*/c⌉`.
#[derive(Debug, Clone)]
pub struct MatchingInstance<'g> {
    graph: &'g Graph,
    max_size: usize,
    min_size: usize,
    cfg: FieldConfig,
}

impl<'g> MatchingInstance<'g> {
    pub fn new(graph: &'g Graph, c: &Rational, cfg: FieldConfig) -> Result<Self> {
        require_undirected(graph)?;
        if *c < int(1) {
            return Err(Error::InvalidArgument("approximation factor c must be at least 1".into()));
        }
        let max_size = maximum_matching(graph)?.len();
        Ok(MatchingInstance { graph, max_size, min_size: ceil_div(max_size, c), cfg })
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    pub fn min_size(&self) -> usize {
        self.min_size
    }

    pub fn config(&self) -> &FieldConfig {
        &self.cfg
    }

    /// Best matching of size at least `⌈Δ*/c⌉` under `restriction`, per `objective`.
    pub fn solve<R: Rng>(
        &self,
        cost: &OccurrenceWeights,
        restriction: &Restriction,
        objective: MatchingObjective,
        rng: &mut R,
    ) -> Result<Option<EdgeSubset>> {
        let g = self.graph;
        let m = g.edge_count();
        if cost.edge_count() != m {
            return Err(Error::IncomparableSolutions(cost.edge_count(), m));
        }
        restriction.check_disjoint()?;
        if restriction.include.iter().any(|&id| id >= m) || !is_matching(g, &restriction.include) {
            return Err(Error::InvalidRestriction("include set is not a matching".into()));
        }
        let mut keep_vertex = vec![true; g.vertex_count()];
        for &id in &restriction.include {
            let e = g.edge(id);
            keep_vertex[e.u] = false;
            keep_vertex[e.v] = false;
        }
        let keep_edge: Vec<bool> = (0..m).map(|id| !restriction.is_excluded(id) && !restriction.include.contains(&id)).collect();
        let costs = cost.counts();
        let max_cost = (0..m).filter(|&id| keep_edge[id]).map(|id| costs[id] as u64).max().unwrap_or(0);
        let gamma = LiftedGraph::gamma_for(g.vertex_count(), max_cost);
        let h = LiftedGraph::new(g, costs, &keep_vertex, &keep_edge, gamma);

        let fixed_x = restriction.include.len() as u64;
        let fixed_y = cost.similarity(&restriction.include);
        let spectrum = h.spectrum(&self.cfg, rng)?;
        let key = |t: u64| {
            let (x, y) = h.decode(t);
            let (xt, yt) = ((x + fixed_x) as i128, (y + fixed_y) as i128);
            match objective {
                MatchingObjective::MinCost => (yt, -xt, 0),
                MatchingObjective::MaxFarness { earlier } => (2 * yt - earlier as i128 * xt, yt, -xt),
            }
        };
        let best = (0..spectrum.len() as u64)
            .filter(|&t| spectrum[t as usize] && h.decode(t).0 + fixed_x >= self.min_size as u64)
            .min_by_key(|&t| key(t));
        let Some(target) = best else {
            return Ok(None);
        };
        let mut ids = self.witness(&h, target, rng)?;
        ids.extend_from_slice(&restriction.include);
        let found = EdgeSubset::new(m, Role::Matching, ids)?;
        debug_assert!(is_matching(g, found.ids()));
        Ok(Some(found))
    }

    /// Deletes original edges of `H` one at a time while weight `target` stays attainable.
    /// A false negative can only keep a superfluous edge, which the final check catches.
    fn witness<R: Rng>(&self, h: &LiftedGraph, target: u64, rng: &mut R) -> Result<Vec<EdgeId>> {
        let field = Field::new(self.cfg.modulus);
        let (x, y) = h.decode(target);
        for _ in 0..self.cfg.repeats {
            let mut cur = h.clone();
            let mut i = 0;
            while i < cur.edges.len() {
                if cur.edges[i].original.is_none() {
                    i += 1;
                    continue;
                }
                let trial = cur.without(i);
                if trial.spectrum_trial(&field, rng)[target as usize] != 0 {
                    cur = trial;
                } else {
                    i += 1;
                }
            }
            let kept: Vec<LiftedEdge> = cur.edges.iter().copied().filter(|e| e.original.is_some()).collect();
            let weight: u64 = kept.iter().map(|e| e.weight).sum();
            let ids: Vec<EdgeId> = kept.iter().filter_map(|e| e.original).collect();
            if kept.len() as u64 == x && weight == h.encode(x, y) && is_matching(self.graph, &ids) {
                return Ok(ids);
            }
        }
        Err(Error::WorkCapExceeded(format!(
            "witness reconstruction failed {} times in a row",
            self.cfg.repeats
        )))
    }
}

/// Smallest-cost matching of size at least `⌈Δ*/c⌉` that contains `include` and avoids
/// `exclude`.
pub fn min_cost_c_maximum_matching<R: Rng>(
    g: &Graph,
    cost: &OccurrenceWeights,
    c: &Rational,
    cfg: &FieldConfig,
    include: &[EdgeId],
    exclude: &[EdgeId],
    rng: &mut R,
) -> Result<Option<EdgeSubset>> {
    let inst = MatchingInstance::new(g, c, cfg.clone())?;
    let r = Restriction::new(include.to_vec(), exclude.to_vec());
    inst.solve(cost, &r, MatchingObjective::MinCost, rng)
}

/// Restricted solver maximizing farness over c-maximum matchings.
pub struct MatchingSolver<'a, 'g> {
    instance: &'a MatchingInstance<'g>,
    rng: ChaCha8Rng,
}

impl<'a, 'g> MatchingSolver<'a, 'g> {
    pub fn new(instance: &'a MatchingInstance<'g>) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(instance.cfg.seed);
        MatchingSolver { instance, rng }
    }
}

impl RestrictedBcoSolver for MatchingSolver<'_, '_> {
    fn edge_count(&self) -> usize {
        self.instance.graph.edge_count()
    }

    fn branching(&self) -> Branching {
        Branching::Unordered
    }

    fn solve(&mut self, occurrence: &OccurrenceWeights, restriction: &Restriction) -> Result<Option<Candidate>> {
        let earlier = occurrence.num_solutions() as u64;
        let objective = MatchingObjective::MaxFarness { earlier };
        Ok(self.instance.solve(occurrence, restriction, objective, &mut self.rng)?.map(|mm| {
            let sim = occurrence.similarity(mm.ids()) as i64;
            let score = 2 * sim - earlier as i64 * mm.len() as i64;
            Candidate::unordered(mm, score)
        }))
    }
}

/// `k` distinct c-maximum matchings with diversity at least half the optimum, with high
/// probability.
pub fn diverse_matchings(g: &Graph, k: usize, c: &Rational, cfg: &FieldConfig) -> Result<DiverseRunReport> {
    let instance = MatchingInstance::new(g, c, cfg.clone())?;
    let first = maximum_matching(g)?;
    let mut solver = MatchingSolver::new(&instance);
    let mut report = diverse_solve(&mut solver, first, k, c, ReductionType::Type1, &BiApproximation::exact())?;
    report.seed = Some(cfg.seed);
    Ok(report)
}
