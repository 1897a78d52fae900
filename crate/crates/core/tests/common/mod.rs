#![allow(dead_code)]

use onum::domain::feasibility_tolerance;
use rand::Rng;

/// Best value over all `2^K` subsets, enumerated depth-first with values
/// accumulated in index order.
pub fn brute_force_knapsack(mu: &[f64], theta: &[f64], capacity: f64) -> f64 {
    fn go(
        i: usize,
        mu: &[f64],
        theta: &[f64],
        limit: f64,
        value: f64,
        weight: f64,
        best: &mut f64,
    ) {
        if i == mu.len() {
            if value > *best {
                *best = value;
            }
            return;
        }
        if weight + theta[i] <= limit {
            go(
                i + 1,
                mu,
                theta,
                limit,
                value + mu[i],
                weight + theta[i],
                best,
            );
        }
        go(i + 1, mu, theta, limit, value, weight, best);
    }
    let mut best = 0.0;
    go(
        0,
        mu,
        theta,
        capacity + feasibility_tolerance(capacity),
        0.0,
        0.0,
        &mut best,
    );
    best
}

/// Smallest subset size attaining the brute-force optimum (within `1e-12`).
pub fn brute_force_min_cardinality(mu: &[f64], theta: &[f64], capacity: f64) -> usize {
    let best = brute_force_knapsack(mu, theta, capacity);
    let limit = capacity + feasibility_tolerance(capacity);
    let k = mu.len();
    (0u32..1 << k)
        .filter(|mask| {
            let (v, w) = (0..k)
                .filter(|i| mask >> i & 1 == 1)
                .fold((0.0, 0.0), |(v, w), i| (v + mu[i], w + theta[i]));
            w <= limit && (v - best).abs() <= 1e-12
        })
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap()
}

/// Random instance with `K` arms, uniform values and weights in `(0, 1)` and
/// a capacity between 20% and 80% of the total weight.
pub fn random_instance<R: Rng>(rng: &mut R, k: usize) -> (Vec<f64>, Vec<f64>, f64) {
    let mu: Vec<f64> = (0..k).map(|_| rng.random_range(0.01..1.0)).collect();
    let theta: Vec<f64> = (0..k).map(|_| rng.random_range(0.01..1.0)).collect();
    let total: f64 = theta.iter().sum();
    let capacity = total * rng.random_range(0.2..0.8);
    (mu, theta, capacity)
}

/// Greedy packing in the given order: serve every arm whose threshold still fits.
pub fn greedy_value(order: &[usize], mu: &[f64], theta: &[f64], capacity: f64) -> f64 {
    let limit = capacity + feasibility_tolerance(capacity);
    let mut used = 0.0;
    let mut value = 0.0;
    for &i in order {
        if used + theta[i] <= limit {
            used += theta[i];
            value += mu[i];
        }
    }
    value
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}
