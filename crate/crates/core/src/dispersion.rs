//! Max-sum k-dispersion on explicit finite metrics.

use itertools::Itertools;
use num_traits::{Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::Graph;
use crate::rational::{int, Rational};

/// Largest number of k-subsets the exhaustive oracle will scan.
pub const ORACLE_SUBSET_LIMIT: u128 = 10_000_000;

/// Explicit symmetric distance matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetric {
    dist: Vec<Vec<Rational>>,
}

impl FiniteMetric {
    /// Validates shape, symmetry, zero diagonal and non-negativity; the O(n³) triangle
    /// check runs only when `validate_triangle` is set. Guarantees assume it holds.
    pub fn new(dist: Vec<Vec<Rational>>, validate_triangle: bool) -> Result<Self> {
        let n = dist.len();
        if n == 0 {
            return Err(Error::InvalidMetric("metric must have at least one point".into()));
        }
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMetric(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            if !row[i].is_zero() {
                return Err(Error::InvalidMetric(format!("dist({i},{i}) is not zero")));
            }
            for (j, d) in row.iter().enumerate() {
                if d.is_negative() {
                    return Err(Error::InvalidMetric(format!("dist({i},{j}) is negative")));
                }
                if *d != dist[j][i] {
                    return Err(Error::InvalidMetric(format!("dist({i},{j}) != dist({j},{i})")));
                }
            }
        }
        let metric = FiniteMetric { dist };
        if validate_triangle {
            if let Some((i, j, k)) = metric.triangle_violation() {
                return Err(Error::InvalidMetric(format!(
                    "triangle inequality fails: dist({i},{k}) > dist({i},{j}) + dist({j},{k})"
                )));
            }
        }
        Ok(metric)
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][j]
    }

    pub fn triangle_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.dist[i][k] > &self.dist[i][j] + &self.dist[j][k] {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    /// `W(S)`, the sum of pairwise distances within `points`.
    pub fn subset_value(&self, points: &[usize]) -> Rational {
        let mut total = int(0);
        for (a, &p) in points.iter().enumerate() {
            for &q in &points[a + 1..] {
                total += &self.dist[p][q];
            }
        }
        total
    }
}

/// Greedy furthest insertion: start at `start`, then repeatedly add the unselected point
/// with the largest total distance to the selected set (lowest index on ties).
pub fn furthest_insertion(metric: &FiniteMetric, k: usize, start: usize) -> Result<Vec<usize>> {
    let n = metric.len();
    if k > n {
        return Err(Error::InsufficientPoints { k, n });
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if start >= n {
        return Err(Error::InvalidArgument(format!("start point {start} out of range 0..{n}")));
    }
    let mut selected = vec![start];
    let mut in_set = vec![false; n];
    in_set[start] = true;
    // running total distance from every point to the selected set
    let mut to_set: Vec<Rational> = (0..n).map(|p| metric.dist(p, start).clone()).collect();
    while selected.len() < k {
        let mut best: Option<usize> = None;
        for p in (0..n).filter(|&p| !in_set[p]) {
            if best.is_none_or(|b| to_set[p] > to_set[b]) {
                best = Some(p);
            }
        }
        let p = best.expect("k <= n leaves an unselected point");
        in_set[p] = true;
        selected.push(p);
        for (q, acc) in to_set.iter_mut().enumerate() {
            *acc += metric.dist(q, p);
        }
    }
    Ok(selected)
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Exhaustive optimum over all k-subsets; the lexicographically first maximizer wins.
pub fn exact_dispersion(metric: &FiniteMetric, k: usize) -> Result<(Vec<usize>, Rational)> {
    let n = metric.len();
    if k > n {
        return Err(Error::InsufficientPoints { k, n });
    }
    let subsets = binomial(n, k);
    if subsets > ORACLE_SUBSET_LIMIT {
        return Err(Error::OracleTooLarge(format!("C({n},{k}) = {subsets} subsets exceeds {ORACLE_SUBSET_LIMIT}")));
    }
    let mut best: Option<(Vec<usize>, Rational)> = None;
    for subset in (0..n).combinations(k) {
        let value = metric.subset_value(&subset);
        if best.as_ref().is_none_or(|(_, v)| value > *v) {
            best = Some((subset, value));
        }
    }
    Ok(best.unwrap_or((Vec::new(), int(0))))
}

/// Metric on the vertices of `g`: 2 for adjacent pairs, 1 for non-adjacent distinct pairs.
pub fn gadget_from_graph(g: &Graph) -> Result<FiniteMetric> {
    gadget_from_graph_with(g, int(2), int(1))
}

pub fn gadget_from_graph_with(g: &Graph, edge_distance: Rational, nonedge_distance: Rational) -> Result<FiniteMetric> {
    if g.is_directed() {
        return Err(Error::InvalidGraph("gadget construction needs an undirected graph".into()));
    }
    let n = g.vertex_count();
    let mut dist = vec![vec![nonedge_distance.clone(); n]; n];
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = int(0);
    }
    for e in g.edges() {
        dist[e.u][e.v] = edge_distance.clone();
        dist[e.v][e.u] = edge_distance.clone();
    }
    // {1,2} always satisfies the triangle inequality; other choices are checked
    let check = !(edge_distance == int(2) && nonedge_distance == int(1));
    FiniteMetric::new(dist, check)
}

/// Random undirected graph on `n` vertices with edge probability `p` and a clique planted
/// on a random `clique` vertices. Returns the graph and the clique's vertices (sorted).
pub fn planted_clique_graph<R: Rng>(n: usize, clique: usize, p: f64, rng: &mut R) -> Result<(Graph, Vec<usize>)> {
    if clique > n {
        return Err(Error::InvalidArgument(format!("clique of size {clique} does not fit in {n} vertices")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let mut members = order[..clique].to_vec();
    members.sort_unstable();
    let mut in_clique = vec![false; n];
    for &v in &members {
        in_clique[v] = true;
    }
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if (in_clique[u] && in_clique[v]) || rng.gen_bool(p) {
                pairs.push((u, v));
            }
        }
    }
    Ok((Graph::unweighted(n, false, &pairs)?, members))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn metric(rows: &[&[i64]]) -> FiniteMetric {
        FiniteMetric::new(rows.iter().map(|r| r.iter().map(|&d| int(d)).collect()).collect(), true).unwrap()
    }

    fn random_metric(rng: &mut ChaCha8Rng, n: usize) -> FiniteMetric {
        // distances in [5,10] always satisfy the triangle inequality
        let mut d = vec![vec![int(0); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = int(rng.gen_range(5..=10));
                d[i][j] = v.clone();
                d[j][i] = v;
            }
        }
        FiniteMetric::new(d, true).unwrap()
    }

    #[test]
    fn unique_farthest_point() {
        let m = metric(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]);
        assert_eq!(furthest_insertion(&m, 2, 0).unwrap(), vec![0, 2]);
    }

    #[test]
    fn k_equals_n_selects_everything() {
        let m = metric(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]);
        let mut got = furthest_insertion(&m, 3, 1).unwrap();
        assert_eq!(got[0], 1);
        got.sort();
        assert_eq!(got, vec![0, 1, 2]);
        let (subset, value) = exact_dispersion(&m, 3).unwrap();
        assert_eq!(subset, vec![0, 1, 2]);
        assert_eq!(value, int(4));
    }

    #[test]
    fn errors() {
        let m = metric(&[&[0, 1], &[1, 0]]);
        assert!(matches!(furthest_insertion(&m, 3, 0), Err(Error::InsufficientPoints { k: 3, n: 2 })));
        assert!(furthest_insertion(&m, 2, 5).is_err());
        assert!(matches!(exact_dispersion(&m, 3), Err(Error::InsufficientPoints { .. })));
        let big = FiniteMetric::new(vec![vec![int(0); 60]; 60], false).unwrap();
        assert!(matches!(exact_dispersion(&big, 10), Err(Error::OracleTooLarge(_))));
    }

    #[test]
    fn equidistant_tie_break() {
        let m = metric(&[&[0, 3, 3], &[3, 0, 3], &[3, 3, 0]]);
        assert_eq!(exact_dispersion(&m, 2).unwrap(), (vec![0, 1], int(3)));
    }

    #[test]
    fn greedy_half_of_optimum_on_eight_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m = random_metric(&mut rng, 8);
            let greedy = furthest_insertion(&m, 4, 0).unwrap();
            let (_, best) = exact_dispersion(&m, 4).unwrap();
            assert!(m.subset_value(&greedy) * int(2) >= best);
        }
    }

    #[test]
    fn gadget_values() {
        let k3 = Graph::unweighted(3, false, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let g = gadget_from_graph(&k3).unwrap();
        assert!((0..3).all(|i| (0..3).all(|j| *g.dist(i, j) == if i == j { int(0) } else { int(2) })));
        let empty = Graph::unweighted(4, false, &[]).unwrap();
        let g = gadget_from_graph(&empty).unwrap();
        assert!((0..4).all(|i| (0..4).all(|j| *g.dist(i, j) == if i == j { int(0) } else { int(1) })));
        assert!(gadget_from_graph_with(&empty, int(5), int(1)).is_ok());
        let single = Graph::unweighted(3, false, &[(0, 1)]).unwrap();
        assert!(gadget_from_graph_with(&single, int(5), int(1)).is_err());
    }

    #[test]
    fn five_cycle_gadget_regression() {
        // C5 has no triangle, so any 3 vertices induce at most 2 edges: W <= 2+2+1 = 5,
        // and the path 0-1-2 attains it.
        let c5 = Graph::unweighted(5, false, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let (subset, value) = exact_dispersion(&gadget_from_graph(&c5).unwrap(), 3).unwrap();
        assert_eq!(value, int(5));
        assert_eq!(subset, vec![0, 1, 2]);
    }

    #[test]
    fn planted_clique_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 2..=5 {
            let (g, members) = planted_clique_graph(9, k, 0.3, &mut rng).unwrap();
            let gadget = gadget_from_graph(&g).unwrap();
            assert_eq!(gadget.subset_value(&members), int(2 * (k * (k - 1) / 2) as i64));
            let (_, value) = exact_dispersion(&gadget, k).unwrap();
            assert_eq!(value, int(2 * binomial(k, 2) as i64));
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(8, 4), 70);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 5), 0);
    }
}
