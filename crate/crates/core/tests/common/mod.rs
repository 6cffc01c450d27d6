#![allow(dead_code)]

use divopt::rational::{int, ratio};
use divopt::{Graph, Rational};
use rand::Rng;

/// Random spanning tree on `n` vertices plus each remaining pair with probability `p`.
pub fn connected_graph<R: Rng>(rng: &mut R, n: usize, p: f64, weight: impl Fn(&mut R) -> Rational) -> Graph {
    let mut pairs = Vec::new();
    for v in 1..n {
        pairs.push((rng.gen_range(0..v), v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !pairs.contains(&(u, v)) && rng.gen_bool(p) {
                pairs.push((u, v));
            }
        }
    }
    let edges = pairs.into_iter().map(|(u, v)| (u, v, weight(rng))).collect();
    Graph::new(n, false, edges).unwrap()
}

pub fn simple_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                pairs.push((u, v));
            }
        }
    }
    Graph::unweighted(n, false, &pairs).unwrap()
}

/// Each ordered pair with probability `p`, weight a positive multiple of 1/2 up to 2.
pub fn digraph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                edges.push((u, v, ratio(rng.gen_range(1..=4), 2)));
            }
        }
    }
    Graph::new(n, true, edges).unwrap()
}

pub fn unit(_: &mut impl Rng) -> Rational {
    int(1)
}

pub fn small_int<R: Rng>(rng: &mut R) -> Rational {
    int(rng.gen_range(1..=10))
}

pub fn pick_factor<R: Rng>(rng: &mut R, choices: &[(i64, i64)]) -> Rational {
    let (a, b) = choices[rng.gen_range(0..choices.len())];
    ratio(a, b)
}
