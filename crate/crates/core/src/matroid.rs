//! Diverse minimum-weight matroid bases under a weight budget.
//!
//! All bases share one cardinality `r`, so the farness of a basis `B` to `i` earlier
//! bases is `2ir − 2ℓ(B)`, where `ℓ(e)` counts the earlier bases containing `e`.
//! Maximizing farness is minimizing `ℓ` subject to `w(B) ≤ c·w(B_min)`.

use itertools::Itertools;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::dispersion::binomial;
use crate::engine::{
    diverse_solve, BiApproximation, Branching, Candidate, DiverseRunReport, ReductionType, RestrictedBcoSolver,
    Restriction, Type5Condition,
};
use crate::error::{Error, Result};
use crate::field::{Field, DEFAULT_MODULUS};
use crate::model::{hamming_distance, EdgeSubset, Graph, OccurrenceWeights, Role};
use crate::rational::{int, parse_rational, Rational};
use crate::trees::UnionFind;

/// Independence oracle. Implementations must be pure.
pub trait Matroid {
    fn ground_size(&self) -> usize;

    fn is_independent(&self, set: &[usize]) -> bool;

    fn rank(&self) -> usize;

    /// Backing graph, for solvers that only work on graphic matroids.
    fn graph(&self) -> Option<&Graph> {
        None
    }
}

/// Acyclic edge sets of an undirected graph.
#[derive(Debug, Clone)]
pub struct GraphicMatroid {
    graph: Graph,
    rank: usize,
}

impl GraphicMatroid {
    pub fn new(graph: Graph) -> Result<Self> {
        if graph.is_directed() {
            return Err(Error::InvalidGraph("graphic matroids need an undirected graph".into()));
        }
        let mut uf = UnionFind::new(graph.vertex_count());
        for e in graph.edges() {
            uf.union(e.u, e.v);
        }
        let rank = graph.vertex_count() - uf.components();
        Ok(GraphicMatroid { graph, rank })
    }
}

impl Matroid for GraphicMatroid {
    fn ground_size(&self) -> usize {
        self.graph.edge_count()
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        let mut uf = UnionFind::new(self.graph.vertex_count());
        set.iter().all(|&id| {
            if id >= self.graph.edge_count() {
                return false;
            }
            let e = self.graph.edge(id);
            uf.union(e.u, e.v)
        })
    }

    fn rank(&self) -> usize {
        self.rank
    }

    fn graph(&self) -> Option<&Graph> {
        Some(&self.graph)
    }
}

/// `U(n, r)`: every set of at most `r` elements is independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniformMatroid {
    n: usize,
    r: usize,
}

impl UniformMatroid {
    pub fn new(n: usize, r: usize) -> Result<Self> {
        if r > n {
            return Err(Error::InvalidArgument(format!("uniform matroid needs r <= n, got U({n},{r})")));
        }
        Ok(UniformMatroid { n, r })
    }
}

impl Matroid for UniformMatroid {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn is_independent(&self, set: &[usize]) -> bool {
        if set.len() > self.r || set.iter().any(|&e| e >= self.n) {
            return false;
        }
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    fn rank(&self) -> usize {
        self.r
    }
}

/// Constrained-basis solver mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    /// ℓ optimal, `w(B) ≤ 2·budget`.
    Lagrangian2,
    /// ℓ optimal, `w(B) ≤ (1+ε)·budget`.
    PtasEps(Rational),
    /// ℓ within `1+ε` of optimal, `w(B) ≤ budget`. Graphic matroids with integer weights.
    PseudoExact(Rational),
}

impl Mode {
    pub fn parse(name: &str, eps: Option<Rational>) -> Result<Self> {
        let eps = eps.unwrap_or_else(|| parse_rational("1/10").expect("literal"));
        if !eps.is_positive() {
            return Err(Error::InvalidArgument("eps must be positive".into()));
        }
        match name {
            "lagrangian-2" => Ok(Mode::Lagrangian2),
            "ptas-eps" => Ok(Mode::PtasEps(eps)),
            "pseudo-exact" => Ok(Mode::PseudoExact(eps)),
            other => Err(Error::UnknownMode(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Lagrangian2 => "lagrangian-2",
            Mode::PtasEps(_) => "ptas-eps",
            Mode::PseudoExact(_) => "pseudo-exact",
        }
    }

    pub fn factors(&self) -> BiApproximation {
        match self {
            Mode::Lagrangian2 => BiApproximation { a: int(1), b: int(2) },
            Mode::PtasEps(eps) => BiApproximation { a: int(1), b: int(1) + eps },
            Mode::PseudoExact(eps) => BiApproximation { a: int(1) + eps, b: int(1) },
        }
    }

    pub fn reduction(&self) -> ReductionType {
        match self {
            Mode::Lagrangian2 | Mode::PtasEps(_) => ReductionType::Type4,
            Mode::PseudoExact(_) => ReductionType::Type5,
        }
    }

    /// Multiplier on the budget that outputs of this mode respect.
    pub fn budget_factor(&self) -> Rational {
        self.factors().b
    }
}

/// Work cap on the number of guessed heavy subsets in `ptas-eps` mode.
pub const PTAS_GUESS_CAP: u128 = 2_000_000;

fn check_weights<M: Matroid + ?Sized>(matroid: &M, w: &[Rational]) -> Result<()> {
    if w.len() != matroid.ground_size() {
        return Err(Error::InvalidArgument(format!(
            "{} weights for a ground set of {}",
            w.len(),
            matroid.ground_size()
        )));
    }
    if w.iter().any(|x| x.is_negative()) {
        return Err(Error::InvalidArgument("element weights must be non-negative".into()));
    }
    Ok(())
}

/// Greedy completion of `fixed` by `order`, stopping at full rank.
fn greedy<M: Matroid + ?Sized>(matroid: &M, fixed: &[usize], order: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let rank = matroid.rank();
    let mut cur = fixed.to_vec();
    for e in order {
        if cur.len() >= rank {
            break;
        }
        cur.push(e);
        if !matroid.is_independent(&cur) {
            cur.pop();
        }
    }
    cur
}

fn total(w: &[Rational], ids: &[usize]) -> Rational {
    ids.iter().fold(Rational::zero(), |acc, &e| acc + &w[e])
}

fn ell(l: &[u32], ids: &[usize]) -> u64 {
    ids.iter().map(|&e| l[e] as u64).sum()
}

/// Greedy minimum-weight basis, ties broken by element id.
pub fn min_weight_basis<M: Matroid + ?Sized>(matroid: &M, w: &[Rational]) -> Result<EdgeSubset> {
    check_weights(matroid, w)?;
    let order = (0..matroid.ground_size()).sorted_by(|&a, &b| w[a].cmp(&w[b]).then(a.cmp(&b)));
    let basis = greedy(matroid, &[], order);
    if basis.len() != matroid.rank() {
        return Err(Error::InvalidArgument("oracle rank disagrees with greedy".into()));
    }
    EdgeSubset::new(matroid.ground_size(), Role::MatroidBasis, basis)
}

/// Fixed elements plus the free elements a restricted subproblem may use.
struct Sub<'a, M: ?Sized> {
    matroid: &'a M,
    w: &'a [Rational],
    l: &'a [u32],
    fixed: Vec<usize>,
}

impl<M: Matroid + ?Sized> Sub<'_, M> {
    fn basis_by<K: Ord>(&self, allowed: &[usize], key: impl Fn(usize) -> K) -> Option<Vec<usize>> {
        let order = allowed.iter().copied().sorted_by_key(|&e| key(e));
        let b = greedy(self.matroid, &self.fixed, order);
        (b.len() == self.matroid.rank()).then_some(b)
    }

    /// Minimizer of `ℓ + λw`, breaking ties toward lower `w` (or higher, if `heavy`).
    fn combined(&self, allowed: &[usize], lambda: &Rational, heavy: bool) -> Option<Vec<usize>> {
        self.basis_by(allowed, |e| {
            let c = int(self.l[e] as i64) + lambda * &self.w[e];
            let tie = if heavy { -self.w[e].clone() } else { self.w[e].clone() };
            (c, tie, e)
        })
    }

    /// `ℓ(B)` at most the best `ℓ` among bases with `w(B) ≤ budget`, and
    /// `w(B) ≤ budget + max_{e∈allowed} w(e)`.
    fn lagrangian(&self, allowed: &[usize], budget: &Rational) -> Option<Vec<usize>> {
        let zero = Rational::zero();
        let base = total(self.w, &self.fixed);
        let free_w = |b: &[usize]| total(self.w, b) - &base;
        let lightest = self.basis_by(allowed, |e| (self.w[e].clone(), self.l[e], e))?;
        if free_w(&lightest) > *budget {
            return None;
        }
        let at_zero = self.combined(allowed, &zero, false)?;
        if free_w(&at_zero) <= *budget {
            return Some(at_zero);
        }
        // Breakpoints where two elements swap places in the combined order.
        let mut lambdas: Vec<Rational> = Vec::new();
        for (i, &e) in allowed.iter().enumerate() {
            for &f in &allowed[i + 1..] {
                if self.w[e] != self.w[f] {
                    let lam = (int(self.l[e] as i64) - int(self.l[f] as i64)) / (&self.w[f] - &self.w[e]);
                    if lam.is_positive() {
                        lambdas.push(lam);
                    }
                }
            }
        }
        lambdas.sort();
        lambdas.dedup();
        // Smallest breakpoint whose light-tied minimizer fits the budget.
        let fits = |lam: &Rational| {
            self.combined(allowed, lam, false).is_some_and(|b| free_w(&b) <= *budget)
        };
        let idx = lambdas.partition_point(|lam| !fits(lam));
        let lam = lambdas.get(idx).cloned().unwrap_or_else(|| lambdas.last().cloned().unwrap_or(zero));
        let over = self.combined(allowed, &lam, true)?;
        let under = self.combined(allowed, &lam, false)?;
        if free_w(&under) > *budget {
            return Some(lightest);
        }
        // Walk from `over` to `under` through bases that stay optimal at λ.
        let path = exchange_path(self.matroid, over, &under);
        let j = path.iter().position(|b| free_w(b) <= *budget).unwrap_or(path.len() - 1);
        if j == 0 {
            return Some(path[0].clone());
        }
        let (prev, cur) = (&path[j - 1], &path[j]);
        if ell(self.l, cur) <= ell(self.l, prev) {
            Some(cur.clone())
        } else {
            Some(prev.clone())
        }
    }
}

/// Sequence of bases from `from` to `to`, each one symmetric exchange from the last.
fn exchange_path<M: Matroid + ?Sized>(matroid: &M, from: Vec<usize>, to: &[usize]) -> Vec<Vec<usize>> {
    let mut path = vec![from.clone()];
    let mut cur = from;
    loop {
        let out: Vec<usize> = cur.iter().copied().filter(|e| !to.contains(e)).sorted().collect();
        let inn: Vec<usize> = to.iter().copied().filter(|e| !cur.contains(e)).sorted().collect();
        let Some(&e) = out.first() else { break };
        let swap = inn.iter().copied().find(|&f| {
            let a: Vec<usize> = cur.iter().map(|&x| if x == e { f } else { x }).collect();
            let b: Vec<usize> = to.iter().map(|&x| if x == f { e } else { x }).collect();
            matroid.is_independent(&a) && matroid.is_independent(&b)
        });
        let f = swap.expect("symmetric exchange exists between bases");
        for x in cur.iter_mut() {
            if *x == e {
                *x = f;
            }
        }
        path.push(cur.clone());
    }
    path
}

/// Basis minimizing `Σ ℓ(e)` under the budget on `Σ w(e)`, with the guarantees of `mode`.
pub fn constrained_basis<M: Matroid + ?Sized>(
    matroid: &M,
    w: &[Rational],
    l: &OccurrenceWeights,
    budget: &Rational,
    mode: &Mode,
    restriction: &Restriction,
) -> Result<Option<EdgeSubset>> {
    check_weights(matroid, w)?;
    let n = matroid.ground_size();
    if l.edge_count() != n {
        return Err(Error::IncomparableSolutions(l.edge_count(), n));
    }
    restriction.check_disjoint()?;
    let fixed: Vec<usize> = restriction.include.iter().copied().sorted().dedup().collect();
    if fixed.len() != restriction.include.len() || !matroid.is_independent(&fixed) {
        return Err(Error::DependentInclude);
    }
    let residual = budget - total(w, &fixed);
    if residual.is_negative() {
        return Ok(None);
    }
    let allowed: Vec<usize> = (0..n)
        .filter(|e| !fixed.contains(e) && !restriction.is_excluded(*e) && w[*e] <= residual)
        .collect();
    let sub = Sub { matroid, w, l: l.counts(), fixed };
    let basis = match mode {
        Mode::Lagrangian2 => sub.lagrangian(&allowed, &residual),
        Mode::PtasEps(eps) => ptas(&sub, &allowed, &residual, eps)?,
        Mode::PseudoExact(_) => pseudo_exact(&sub, &allowed, &residual)?,
    };
    basis.map(|b| EdgeSubset::new(n, Role::MatroidBasis, b)).transpose()
}

/// Guess the `⌈1/ε⌉` heaviest free elements, then run the Lagrangian step on what remains.
fn ptas<M: Matroid + ?Sized>(
    sub: &Sub<'_, M>,
    allowed: &[usize],
    residual: &Rational,
    eps: &Rational,
) -> Result<Option<Vec<usize>>> {
    let q = (int(1) / eps).ceil().to_usize().unwrap_or(usize::MAX);
    let free_rank = sub.matroid.rank() - sub.fixed.len();
    let q = q.min(free_rank);
    if binomial(allowed.len(), q) > PTAS_GUESS_CAP {
        return Err(Error::WorkCapExceeded(format!("C({},{q}) heavy-element guesses", allowed.len())));
    }
    let mut best: Option<(u64, Rational, Vec<usize>)> = None;
    for guess in allowed.iter().copied().combinations(q) {
        let mut fixed = sub.fixed.clone();
        fixed.extend_from_slice(&guess);
        if !sub.matroid.is_independent(&fixed) {
            continue;
        }
        let rest = residual - total(sub.w, &guess);
        if rest.is_negative() {
            continue;
        }
        let cap = guess.iter().map(|&e| &sub.w[e]).min().cloned();
        let inner: Vec<usize> = allowed
            .iter()
            .copied()
            .filter(|e| !guess.contains(e) && sub.w[*e] <= rest && cap.as_ref().is_none_or(|c| sub.w[*e] <= *c))
            .collect();
        let guessed = Sub { matroid: sub.matroid, w: sub.w, l: sub.l, fixed };
        if let Some(mut b) = guessed.lagrangian(&inner, &rest) {
            b.sort_unstable();
            let key = (ell(sub.l, &b), total(sub.w, &b), b);
            if best.as_ref().is_none_or(|cur| key < *cur) {
                best = Some(key);
            }
        }
    }
    Ok(best.map(|(_, _, b)| b))
}

/// Spanning trees of a contracted multigraph, counted by `(w, ℓ)`.
struct TreeSpectrum {
    /// `count[a][b]` = number of trees with weight `a` and occurrence cost `b`, mod p.
    count: Vec<Vec<u64>>,
}

/// Edge of the contracted multigraph: endpoints, integer weight, occurrence count.
#[derive(Clone, Copy)]
struct SpecEdge {
    u: usize,
    v: usize,
    w: usize,
    l: usize,
    id: usize,
}

fn largest_sum(values: impl Iterator<Item = usize>, take: usize) -> usize {
    values.sorted_by(|a, b| b.cmp(a)).take(take).sum()
}

/// Weighted matrix-tree theorem with monomial edge weights `x^w y^ℓ`, evaluated on an
/// integer grid and interpolated in both variables.
fn tree_spectrum(field: &Field, n: usize, edges: &[SpecEdge]) -> TreeSpectrum {
    let dx = largest_sum(edges.iter().map(|e| e.w), n - 1);
    let dy = largest_sum(edges.iter().map(|e| e.l), n - 1);
    let dim = n - 1;
    // values[y][x]
    let mut by_y = Vec::with_capacity(dy + 1);
    for y in 0..=dy as u64 {
        let ypow: Vec<u64> = (0..=dy as u64).map(|b| field.pow(y, b)).collect();
        let mut row = Vec::with_capacity(dx + 1);
        for x in 0..=dx as u64 {
            let mut lap = vec![vec![0u64; dim]; dim];
            for e in edges {
                let val = field.mul(field.pow(x, e.w as u64), ypow[e.l]);
                if e.u < dim {
                    lap[e.u][e.u] = field.add(lap[e.u][e.u], val);
                }
                if e.v < dim {
                    lap[e.v][e.v] = field.add(lap[e.v][e.v], val);
                }
                if e.u < dim && e.v < dim {
                    lap[e.u][e.v] = field.sub(lap[e.u][e.v], val);
                    lap[e.v][e.u] = field.sub(lap[e.v][e.u], val);
                }
            }
            row.push(field.determinant(lap));
        }
        by_y.push(field.interpolate_at_integers(&row));
    }
    let mut count = vec![vec![0u64; dy + 1]; dx + 1];
    for a in 0..=dx {
        let column: Vec<u64> = by_y.iter().map(|r| r[a]).collect();
        count[a] = field.interpolate_at_integers(&column);
    }
    TreeSpectrum { count }
}

impl TreeSpectrum {
    fn get(&self, a: usize, b: usize) -> bool {
        self.count.get(a).and_then(|r| r.get(b)).is_some_and(|&c| c != 0)
    }
}

/// Exact `(w, ℓ)` tree counting on a graphic matroid, then edge-deletion self-reduction.
fn pseudo_exact<M: Matroid + ?Sized>(
    sub: &Sub<'_, M>,
    allowed: &[usize],
    residual: &Rational,
) -> Result<Option<Vec<usize>>> {
    let Some(g) = sub.matroid.graph() else {
        return Err(Error::Unsupported("pseudo-exact mode needs a graphic matroid".into()));
    };
    let mut int_w = vec![0usize; g.edge_count()];
    for &e in allowed {
        let x = &sub.w[e];
        if !x.is_integer() {
            return Err(Error::Unsupported("pseudo-exact mode needs integer weights".into()));
        }
        int_w[e] = x.to_integer().to_usize().ok_or_else(|| Error::Unsupported("weight too large".into()))?;
    }
    let mut uf = UnionFind::new(g.vertex_count());
    for &e in &sub.fixed {
        let edge = g.edge(e);
        uf.union(edge.u, edge.v);
    }
    let mut label = vec![usize::MAX; g.vertex_count()];
    let mut n = 0;
    for v in 0..g.vertex_count() {
        let r = uf.find(v);
        if label[r] == usize::MAX {
            label[r] = n;
            n += 1;
        }
        label[v] = label[r];
    }
    if sub.matroid.rank() + 1 != g.vertex_count() {
        return Err(Error::Unsupported("pseudo-exact mode needs a connected graph".into()));
    }
    if n == 1 {
        return Ok(Some(sub.fixed.clone()));
    }
    let edges: Vec<SpecEdge> = allowed
        .iter()
        .filter_map(|&e| {
            let edge = g.edge(e);
            let (u, v) = (label[edge.u], label[edge.v]);
            (u != v).then_some(SpecEdge { u, v, w: int_w[e], l: sub.l[e] as usize, id: e })
        })
        .collect();
    // The number of trees is at most the product of non-root degrees; below p every
    // nonzero count survives reduction mod p.
    let mut degree = vec![0u128; n];
    for e in &edges {
        degree[e.u] += 1;
        degree[e.v] += 1;
    }
    let bound = degree[..n - 1].iter().try_fold(1u128, |acc, &d| acc.checked_mul(d.max(1)));
    if bound.is_none_or(|b| b >= DEFAULT_MODULUS as u128) {
        return Err(Error::Unsupported("too many spanning trees for exact counting".into()));
    }
    let field = Field::new(DEFAULT_MODULUS);
    let spectrum = tree_spectrum(&field, n, &edges);
    let cap = residual.floor().to_integer().to_usize().unwrap_or(usize::MAX);
    let target = (0..spectrum.count.first().map_or(0, |r| r.len()))
        .find_map(|b| (0..spectrum.count.len().min(cap.saturating_add(1))).find(|&a| spectrum.get(a, b)).map(|a| (a, b)));
    let Some((a, b)) = target else {
        return Ok(None);
    };
    let mut kept = edges;
    let mut i = 0;
    while i < kept.len() {
        let mut trial = kept.clone();
        trial.remove(i);
        if tree_spectrum(&field, n, &trial).get(a, b) {
            kept = trial;
        } else {
            i += 1;
        }
    }
    let mut basis = sub.fixed.clone();
    basis.extend(kept.iter().map(|e| e.id));
    debug_assert!(basis.len() == sub.matroid.rank() && sub.matroid.is_independent(&basis));
    Ok(Some(basis))
}

/// Restricted solver over the bases of a matroid within `budget`.
pub struct BasisSolver<'a, M: ?Sized> {
    matroid: &'a M,
    weights: &'a [Rational],
    budget: Rational,
    mode: Mode,
}

impl<'a, M: Matroid + ?Sized> BasisSolver<'a, M> {
    pub fn new(matroid: &'a M, weights: &'a [Rational], budget: Rational, mode: Mode) -> Result<Self> {
        check_weights(matroid, weights)?;
        Ok(BasisSolver { matroid, weights, budget, mode })
    }
}

impl<M: Matroid + ?Sized> RestrictedBcoSolver for BasisSolver<'_, M> {
    fn edge_count(&self) -> usize {
        self.matroid.ground_size()
    }

    fn branching(&self) -> Branching {
        Branching::Unordered
    }

    fn solve(&mut self, occurrence: &OccurrenceWeights, restriction: &Restriction) -> Result<Option<Candidate>> {
        let b = constrained_basis(self.matroid, self.weights, occurrence, &self.budget, &self.mode, restriction)?;
        Ok(b.map(|b| {
            let score = occurrence.similarity(b.ids()) as i64;
            Candidate::unordered(b, score)
        }))
    }
}

/// `k` distinct bases of weight at most `β·c·w(B_min)` with diversity within 4 of optimal.
pub fn diverse_min_weight_bases<M: Matroid + ?Sized>(
    matroid: &M,
    w: &[Rational],
    k: usize,
    c: &Rational,
    mode: &Mode,
) -> Result<DiverseRunReport> {
    if *c < int(1) {
        return Err(Error::InvalidArgument("approximation factor c must be at least 1".into()));
    }
    let first = min_weight_basis(matroid, w)?;
    let budget = c * total(w, first.ids());
    let mut solver = BasisSolver::new(matroid, w, budget, mode.clone())?;
    let report = diverse_solve(&mut solver, first, k, c, mode.reduction(), &mode.factors())?;
    let rank = matroid.rank() as u64;
    for (i, entry) in report.trace.iter().enumerate().skip(1) {
        let direct: usize =
            report.solutions[..i].iter().map(|y| hamming_distance(&entry.solution, y)).sum::<Result<usize>>()?;
        debug_assert_eq!(entry.farness, direct as u64);
        debug_assert_eq!(entry.farness, 2 * i as u64 * rank - 2 * entry.similarity);
    }
    Ok(match mode {
        Mode::PseudoExact(eps) => {
            report.with_type5(Type5Condition { diameter: 2 * matroid.rank(), eps: eps.clone() })
        }
        _ => report,
    })
}
