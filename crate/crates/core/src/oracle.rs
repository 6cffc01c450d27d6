//! Brute-force enumerators used to check solver output on small instances.
//!
//! Nothing here shares code with the solvers it checks: feasibility tests are written
//! out directly and the best k-subset is found by exhaustive search.

use itertools::Itertools;

use crate::dispersion::{binomial, ORACLE_SUBSET_LIMIT};
use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::model::{sorted_symmetric_difference, EdgeId, Graph};
use crate::rational::{int, Rational};

/// Enumeration guard for raw solution spaces.
pub const SOLUTION_LIMIT: usize = 200_000;

fn acyclic_by_relabel(n: usize, g: &Graph, ids: &[EdgeId]) -> bool {
    let mut label: Vec<usize> = (0..n).collect();
    for &id in ids {
        let e = g.edge(id);
        let (a, b) = (label[e.u], label[e.v]);
        if a == b {
            return false;
        }
        for l in label.iter_mut() {
            if *l == b {
                *l = a;
            }
        }
    }
    true
}

/// Every spanning tree, as sorted edge-id lists in lexicographic order.
pub fn all_spanning_trees(g: &Graph) -> Result<Vec<Vec<EdgeId>>> {
    let n = g.vertex_count();
    let m = g.edge_count();
    if n == 1 {
        return Ok(vec![Vec::new()]);
    }
    if binomial(m, n - 1) > ORACLE_SUBSET_LIMIT {
        return Err(Error::OracleTooLarge(format!("C({m},{}) edge subsets", n - 1)));
    }
    Ok((0..m).combinations(n - 1).filter(|ids| acyclic_by_relabel(n, g, ids)).collect())
}

/// Every simple directed s-t path with its length, found by depth-first search.
pub fn all_simple_paths(g: &Graph, s: usize, t: usize) -> Result<Vec<(Vec<EdgeId>, Rational)>> {
    let n = g.vertex_count();
    let mut out_edges = vec![Vec::new(); n];
    for (id, e) in g.edges().iter().enumerate() {
        out_edges[e.u].push(id);
    }
    let mut found = Vec::new();
    let mut on_path = vec![false; n];
    let mut stack: Vec<EdgeId> = Vec::new();
    fn dfs(
        g: &Graph,
        out_edges: &[Vec<EdgeId>],
        x: usize,
        t: usize,
        on_path: &mut [bool],
        stack: &mut Vec<EdgeId>,
        found: &mut Vec<(Vec<EdgeId>, Rational)>,
    ) -> Result<()> {
        if x == t {
            if found.len() >= SOLUTION_LIMIT {
                return Err(Error::OracleTooLarge(format!("more than {SOLUTION_LIMIT} simple paths")));
            }
            let len = stack.iter().fold(int(0), |acc, &id| acc + g.weight(id));
            found.push((stack.clone(), len));
            return Ok(());
        }
        on_path[x] = true;
        for &id in &out_edges[x] {
            let y = g.edge(id).v;
            if !on_path[y] {
                stack.push(id);
                dfs(g, out_edges, y, t, on_path, stack, found)?;
                stack.pop();
            }
        }
        on_path[x] = false;
        Ok(())
    }
    dfs(g, &out_edges, s, t, &mut on_path, &mut stack, &mut found)?;
    Ok(found)
}

/// Simple s-v paths for every v (including the empty path at s).
pub fn all_simple_paths_from(g: &Graph, s: usize) -> Vec<(usize, Vec<EdgeId>)> {
    let n = g.vertex_count();
    let mut out_edges = vec![Vec::new(); n];
    for (id, e) in g.edges().iter().enumerate() {
        out_edges[e.u].push(id);
    }
    let mut found = Vec::new();
    let mut on_path = vec![false; n];
    let mut stack = Vec::new();
    fn dfs(
        g: &Graph,
        out_edges: &[Vec<EdgeId>],
        x: usize,
        on_path: &mut [bool],
        stack: &mut Vec<EdgeId>,
        found: &mut Vec<(usize, Vec<EdgeId>)>,
    ) {
        found.push((x, stack.clone()));
        on_path[x] = true;
        for &id in &out_edges[x] {
            let y = g.edge(id).v;
            if !on_path[y] {
                stack.push(id);
                dfs(g, out_edges, y, on_path, stack, found);
                stack.pop();
            }
        }
        on_path[x] = false;
    }
    dfs(g, &out_edges, s, &mut on_path, &mut stack, &mut found);
    found
}

/// Every matching (including the empty one), sorted edge lists.
pub fn all_matchings(g: &Graph) -> Result<Vec<Vec<EdgeId>>> {
    let m = g.edge_count();
    let mut used = vec![false; g.vertex_count()];
    let mut cur = Vec::new();
    let mut out = Vec::new();
    fn rec(
        g: &Graph,
        next: usize,
        m: usize,
        used: &mut [bool],
        cur: &mut Vec<EdgeId>,
        out: &mut Vec<Vec<EdgeId>>,
    ) -> Result<()> {
        if next == m {
            if out.len() >= SOLUTION_LIMIT {
                return Err(Error::OracleTooLarge(format!("more than {SOLUTION_LIMIT} matchings")));
            }
            out.push(cur.clone());
            return Ok(());
        }
        rec(g, next + 1, m, used, cur, out)?;
        let e = g.edge(next);
        if !used[e.u] && !used[e.v] {
            used[e.u] = true;
            used[e.v] = true;
            cur.push(next);
            rec(g, next + 1, m, used, cur, out)?;
            cur.pop();
            used[e.u] = false;
            used[e.v] = false;
        }
        Ok(())
    }
    rec(g, 0, m, &mut used, &mut cur, &mut out)?;
    Ok(out)
}

/// Every basis of `matroid`: all independent subsets of size rank.
pub fn all_bases<M: Matroid + ?Sized>(matroid: &M) -> Result<Vec<Vec<usize>>> {
    let n = matroid.ground_size();
    let rank = matroid.rank();
    if binomial(n, rank) > ORACLE_SUBSET_LIMIT {
        return Err(Error::OracleTooLarge(format!("C({n},{rank}) subsets")));
    }
    Ok((0..n).combinations(rank).filter(|s| matroid.is_independent(s)).collect())
}

/// Simple s-t paths of length at most `c·dist(s,t)`, as sorted edge lists.
pub fn c_short_paths(g: &Graph, s: usize, t: usize, c: &Rational) -> Result<Vec<Vec<EdgeId>>> {
    let all = all_simple_paths(g, s, t)?;
    let Some(shortest) = all.iter().map(|(_, len)| len).min().cloned() else {
        return Ok(Vec::new());
    };
    let budget = c * shortest;
    Ok(all
        .into_iter()
        .filter(|(_, len)| *len <= budget)
        .map(|(mut p, _)| {
            p.sort_unstable();
            p
        })
        .collect())
}

/// Matchings `M` with `|M|·c ≥ Δ*`, where `Δ*` is found by enumeration.
pub fn c_maximum_matchings(g: &Graph, c: &Rational) -> Result<(usize, Vec<Vec<EdgeId>>)> {
    let all = all_matchings(g)?;
    let best = all.iter().map(|m| m.len()).max().unwrap_or(0);
    let keep = all.into_iter().filter(|m| int(m.len() as i64) * c >= int(best as i64)).collect();
    Ok((best, keep))
}

/// Bases of weight at most `c` times the minimum basis weight, and that minimum.
pub fn c_approximate_bases<M: Matroid + ?Sized>(
    matroid: &M,
    w: &[Rational],
    c: &Rational,
) -> Result<(Rational, Vec<Vec<usize>>)> {
    let all = all_bases(matroid)?;
    let weight = |b: &[usize]| b.iter().fold(int(0), |acc, &e| acc + &w[e]);
    let Some(lightest) = all.iter().map(|b| weight(b)).min() else {
        return Ok((int(0), Vec::new()));
    };
    let budget = c * &lightest;
    let keep = all.into_iter().filter(|b| weight(b) <= budget).collect();
    Ok((lightest, keep))
}

/// Maximum total pairwise Hamming distance over all k-subsets of `solutions`.
/// Returns the lexicographically first optimal index set and its value.
pub fn best_k_subset(solutions: &[Vec<EdgeId>], k: usize) -> Result<(Vec<usize>, usize)> {
    let n = solutions.len();
    if k > n {
        return Err(Error::FewerThanK { found: n, k });
    }
    if binomial(n, k) > ORACLE_SUBSET_LIMIT {
        return Err(Error::OracleTooLarge(format!("C({n},{k}) solution subsets")));
    }
    let mut dist = vec![vec![0usize; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = sorted_symmetric_difference(&solutions[i], &solutions[j]);
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    let mut best: Option<(Vec<usize>, usize)> = None;
    let mut chosen = Vec::with_capacity(k);
    fn rec(
        dist: &[Vec<usize>],
        start: usize,
        k: usize,
        value: usize,
        chosen: &mut Vec<usize>,
        best: &mut Option<(Vec<usize>, usize)>,
    ) {
        if chosen.len() == k {
            if best.as_ref().is_none_or(|(_, b)| value > *b) {
                *best = Some((chosen.clone(), value));
            }
            return;
        }
        let n = dist.len();
        for i in start..=n - (k - chosen.len()) {
            let add: usize = chosen.iter().map(|&j| dist[i][j]).sum();
            chosen.push(i);
            rec(dist, i + 1, k, value + add, chosen, best);
            chosen.pop();
        }
    }
    rec(&dist, 0, k, 0, &mut chosen, &mut best);
    Ok(best.unwrap_or((Vec::new(), 0)))
}
