#![allow(dead_code)]

use feller_core::graph::{GraphBuilder, WeightedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Line `0..=n` with the frontier at `n`.
pub fn line(n: usize, b: impl Fn(usize) -> f64, m: impl Fn(usize) -> f64) -> WeightedGraph {
    let mut gb = GraphBuilder::new();
    let names: Vec<String> = (0..=n).map(|r| r.to_string()).collect();
    for (r, name) in names.iter().enumerate() {
        gb.measure(name, m(r));
    }
    for r in 0..n {
        gb.edge(&names[r], &names[r + 1], b(r));
    }
    gb.frontier(&names[n]);
    gb.build().unwrap()
}

pub fn unit_line(n: usize) -> WeightedGraph {
    line(n, |_| 1.0, |_| 1.0)
}

pub fn model_example(n: usize) -> WeightedGraph {
    line(n, |_| 1.0, |r| ((r + 1) as f64).powi(-3))
}

/// Full tree numbered breadth first, frontier at generation `depth`.
/// `b(r)` joins generations `r` and `r+1`, `m(r)` is the vertex measure.
pub fn tree(arity: usize, depth: usize, b: impl Fn(usize) -> f64, m: impl Fn(usize) -> f64) -> WeightedGraph {
    let mut generation = Vec::new();
    let mut count = 1;
    for r in 0..=depth {
        generation.extend(std::iter::repeat_n(r, count));
        count *= arity;
    }
    let mut gb = GraphBuilder::new();
    let names: Vec<String> = (0..generation.len()).map(|i| i.to_string()).collect();
    for (i, name) in names.iter().enumerate() {
        gb.measure(name, m(generation[i]));
    }
    for (i, name) in names.iter().enumerate() {
        if generation[i] < depth {
            for c in 1..=arity {
                gb.edge(name, &names[arity * i + c], b(generation[i]));
            }
        } else {
            gb.frontier(name);
        }
    }
    gb.build().unwrap()
}

pub fn binary_tree(depth: usize) -> WeightedGraph {
    tree(2, depth, |_| 1.0, |_| 1.0)
}

pub fn ternary_anti(depth: usize) -> WeightedGraph {
    tree(
        3,
        depth,
        |r| 2.0 * (r + 1) as f64 / 3f64.powi(r as i32 + 1),
        |r| 1.0 / (3f64.powi(r as i32) * ((r + 1) as f64).powi(2)),
    )
}

/// Connected graph on `2..=max_n` vertices: a random spanning tree plus
/// extra edges, weights and measures drawn from `[0.1, 10]`.
pub fn random_graph(seed: u64, max_n: usize) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_n);
    let mut gb = GraphBuilder::new();
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    for name in &names {
        gb.measure(name, rng.random_range(0.1..=10.0));
    }
    let mut seen = std::collections::BTreeSet::new();
    for i in 1..n {
        let p = rng.random_range(0..i);
        seen.insert((p, i));
        gb.edge(&names[p], &names[i], rng.random_range(0.1..=10.0));
    }
    for _ in 0..rng.random_range(0..=n) {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        let key = (a.min(b), a.max(b));
        if a != b && seen.insert(key) {
            gb.edge(&names[key.0], &names[key.1], rng.random_range(0.1..=10.0));
        }
    }
    gb.build().unwrap()
}
