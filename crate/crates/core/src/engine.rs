//! Farthest insertion over an implicit solution space.
//!
//! Each insertion asks a pluggable restricted budget-constrained solver for the best
//! solution under include/exclude restrictions, and Lawler partitioning steps around
//! solutions that were already selected.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use crate::error::{Error, Result};
use crate::model::{diversity_sum, farness_from_parts, pairwise_distances, EdgeId, EdgeSubset, OccurrenceWeights};
use crate::rational::{int, Rational};

/// How a candidate is split into Lawler subproblems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branching {
    /// Include sets are arbitrary element sets (trees, matchings, bases).
    Unordered,
    /// Include sets must be prefixes of the candidate's element order (s-t paths).
    Prefix,
}

/// Edges forced into (in order, for prefix branching) and out of a solution.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Restriction {
    pub include: Vec<EdgeId>,
    pub exclude: Vec<EdgeId>,
}

impl Restriction {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(include: Vec<EdgeId>, mut exclude: Vec<EdgeId>) -> Self {
        exclude.sort_unstable();
        exclude.dedup();
        Restriction { include, exclude }
    }

    pub fn is_excluded(&self, id: EdgeId) -> bool {
        self.exclude.binary_search(&id).is_ok()
    }

    pub(crate) fn check_disjoint(&self) -> Result<()> {
        match self.include.iter().find(|id| self.is_excluded(**id)) {
            Some(id) => Err(Error::InvalidRestriction(format!("edge {id} is both included and excluded"))),
            None => Ok(()),
        }
    }
}

/// A solver answer. `score` is what the solver minimized (lower is better); `order` is the
/// element order used for branching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub solution: EdgeSubset,
    pub order: Vec<EdgeId>,
    pub score: i64,
}

impl Candidate {
    pub fn unordered(solution: EdgeSubset, score: i64) -> Self {
        let order = solution.ids().to_vec();
        Candidate { solution, order, score }
    }
}

/// Contract of a restricted budget-constrained solver.
///
/// Returned solutions must be feasible, contain every include edge, avoid every exclude
/// edge, and meet the owning module's budget up to its advertised factor `b`; the score
/// is optimal up to the advertised factor `a`.
pub trait RestrictedBcoSolver {
    fn edge_count(&self) -> usize;

    fn branching(&self) -> Branching;

    fn solve(&mut self, occurrence: &OccurrenceWeights, restriction: &Restriction) -> Result<Option<Candidate>>;
}

/// The five reduction types and the diversity guarantee each one yields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionType {
    /// `(a,1)` metric solver: `(2a, c)`.
    Type1,
    /// `(a,b)` metric solver: `(4a, bc)`.
    Type2,
    /// `(1,1)` similarity solver: `(2, c)`.
    Type3,
    /// `(1,b)` similarity solver: `(4, bc)`.
    Type4,
    /// `(1+ε,1)` similarity solver: `(4, c)` under a lower bound on the optimal average distance.
    Type5,
}

impl ReductionType {
    pub fn from_tag(tag: u8) -> Result<Self> {
        Ok(match tag {
            1 => ReductionType::Type1,
            2 => ReductionType::Type2,
            3 => ReductionType::Type3,
            4 => ReductionType::Type4,
            5 => ReductionType::Type5,
            _ => return Err(Error::InvalidArgument(format!("reduction type must be 1..5, got {tag}"))),
        })
    }

    pub fn tag(self) -> u8 {
        match self {
            ReductionType::Type1 => 1,
            ReductionType::Type2 => 2,
            ReductionType::Type3 => 3,
            ReductionType::Type4 => 4,
            ReductionType::Type5 => 5,
        }
    }
}

/// `(a, b)` factors of a budget-constrained solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiApproximation {
    pub a: Rational,
    pub b: Rational,
}

impl BiApproximation {
    pub fn exact() -> Self {
        BiApproximation { a: int(1), b: int(1) }
    }
}

/// Declared `(α, β)`: diversity within `α` of optimal, every solution `β`-approximate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Guarantee {
    pub alpha: Rational,
    pub beta: Rational,
    pub reduction: ReductionType,
}

impl Guarantee {
    pub fn for_type(reduction: ReductionType, factors: &BiApproximation, c: &Rational) -> Self {
        let (alpha, beta) = match reduction {
            ReductionType::Type1 => (int(2) * &factors.a, c.clone()),
            ReductionType::Type2 => (int(4) * &factors.a, &factors.b * c),
            ReductionType::Type3 => (int(2), c.clone()),
            ReductionType::Type4 => (int(4), &factors.b * c),
            ReductionType::Type5 => (int(4), c.clone()),
        };
        Guarantee { alpha, beta, reduction }
    }
}

/// Side condition of type-5 runs: optimal average pairwise distance ≥ `D·4ε/(1+2ε)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Type5Condition {
    pub diameter: usize,
    pub eps: Rational,
}

impl Type5Condition {
    pub fn threshold(&self) -> Rational {
        let d = int(self.diameter as i64);
        d * int(4) * &self.eps / (int(1) + int(2) * &self.eps)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub solution: EdgeSubset,
    /// `Σ_j d(y, y_j)` against the solutions selected before this one.
    pub farness: u64,
    /// `Σ_{e∈y} count(e)` against the same prefix.
    pub similarity: u64,
    /// Solver calls spent by the Lawler enumeration for this insertion.
    pub branches: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiverseRunReport {
    pub solutions: Vec<EdgeSubset>,
    pub diversity: usize,
    pub pairwise: Vec<Vec<usize>>,
    pub guarantee: Guarantee,
    pub trace: Vec<TraceEntry>,
    pub seed: Option<u64>,
    pub type5: Option<Type5Condition>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct LawlerOutcome {
    pub candidate: Option<Candidate>,
    pub solver_calls: usize,
}

struct PoolEntry {
    key: Reverse<(i64, Vec<EdgeId>, u64)>,
    candidate: Candidate,
    restriction: Restriction,
}

impl PartialEq for PoolEntry {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl Eq for PoolEntry {}
impl PartialOrd for PoolEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for PoolEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key.cmp(&other.key)
    }
}

/// Best solution outside `forbidden`, found by best-first Lawler partitioning.
///
/// The pool is ordered by score, then by the sorted edge list, then by insertion order.
/// Every pop of a forbidden candidate splits its subproblem into children that exclude
/// exactly that candidate, so at most `|forbidden| + 1` pops are needed.
pub fn lawler_enumerate<S: RestrictedBcoSolver + ?Sized>(
    solver: &mut S,
    occurrence: &OccurrenceWeights,
    forbidden: &[EdgeSubset],
) -> Result<LawlerOutcome> {
    let banned: HashSet<&[EdgeId]> = forbidden.iter().map(|y| y.ids()).collect();
    let mut pool = BinaryHeap::new();
    let mut calls = 0;
    let mut serial = 0u64;
    let mut push = |pool: &mut BinaryHeap<PoolEntry>, candidate: Candidate, restriction: Restriction| {
        let key = Reverse((candidate.score, candidate.solution.ids().to_vec(), serial));
        serial += 1;
        pool.push(PoolEntry { key, candidate, restriction });
    };

    let root = Restriction::none();
    calls += 1;
    if let Some(c) = solver.solve(occurrence, &root)? {
        push(&mut pool, c, root);
    }

    while let Some(PoolEntry { candidate, restriction, .. }) = pool.pop() {
        if !banned.contains(candidate.solution.ids()) {
            return Ok(LawlerOutcome { candidate: Some(candidate), solver_calls: calls });
        }
        let branch: Vec<EdgeId> = match solver.branching() {
            Branching::Unordered => {
                let fixed: HashSet<EdgeId> = restriction.include.iter().copied().collect();
                candidate.order.iter().copied().filter(|id| !fixed.contains(id)).collect()
            }
            Branching::Prefix => {
                debug_assert!(candidate.order.starts_with(&restriction.include));
                candidate.order[restriction.include.len()..].to_vec()
            }
        };
        for (j, &pivot) in branch.iter().enumerate() {
            let mut include = restriction.include.clone();
            include.extend_from_slice(&branch[..j]);
            let mut exclude = restriction.exclude.clone();
            exclude.push(pivot);
            let child = Restriction::new(include, exclude);
            calls += 1;
            if let Some(c) = solver.solve(occurrence, &child)? {
                push(&mut pool, c, child);
            }
        }
    }
    Ok(LawlerOutcome { candidate: None, solver_calls: calls })
}

/// Runs `k − 1` farthest insertions starting from `initial`.
pub fn diverse_solve<S: RestrictedBcoSolver + ?Sized>(
    solver: &mut S,
    initial: EdgeSubset,
    k: usize,
    c: &Rational,
    reduction: ReductionType,
    factors: &BiApproximation,
) -> Result<DiverseRunReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if *c < int(1) {
        return Err(Error::InvalidArgument("approximation factor c must be at least 1".into()));
    }
    if initial.universe() != solver.edge_count() {
        return Err(Error::IncomparableSolutions(initial.universe(), solver.edge_count()));
    }
    let m = solver.edge_count();
    let mut occurrence = OccurrenceWeights::zero(m);
    let mut total_size = 0u64;
    let mut trace = vec![TraceEntry { solution: initial.clone(), farness: 0, similarity: 0, branches: 0 }];
    occurrence.add(&initial);
    total_size += initial.len() as u64;
    let mut solutions = vec![initial];

    while solutions.len() < k {
        let outcome = lawler_enumerate(solver, &occurrence, &solutions)?;
        let Some(candidate) = outcome.candidate else {
            return Err(Error::FewerThanK { found: solutions.len(), k });
        };
        let y = candidate.solution;
        trace.push(TraceEntry {
            farness: farness_from_parts(total_size, solutions.len(), y.ids(), &occurrence),
            similarity: occurrence.similarity(y.ids()),
            branches: outcome.solver_calls,
            solution: y.clone(),
        });
        occurrence.add(&y);
        total_size += y.len() as u64;
        solutions.push(y);
    }

    Ok(DiverseRunReport {
        diversity: diversity_sum(&solutions)?,
        pairwise: pairwise_distances(&solutions)?,
        guarantee: Guarantee::for_type(reduction, factors, c),
        trace,
        solutions,
        seed: None,
        type5: None,
        warnings: Vec::new(),
    })
}

impl DiverseRunReport {
    /// Attaches the type-5 side condition and records it as a warning.
    pub fn with_type5(mut self, condition: Type5Condition) -> Self {
        self.warnings.push(format!(
            "type-5 guarantee assumes the optimal average pairwise distance is at least D*4eps/(1+2eps) = {} (D = {}, eps = {}); not verified",
            crate::rational::format_rational(&condition.threshold()),
            condition.diameter,
            crate::rational::format_rational(&condition.eps),
        ));
        self.type5 = Some(condition);
        self
    }
}
