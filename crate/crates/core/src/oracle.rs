//! Exact combinatorial and analytic utilities.
//!
//! The optimal allocation of an instance `(μ, θ, C)` is the solution of the
//! 0-1 knapsack with values `μ`, weights `θ` and capacity `C`: serve exactly
//! the selected arms with their thresholds. [`solve_knapsack`] solves it
//! exactly over real weights with depth-first branch and bound, using the
//! fractional relaxation as the upper bound.
//!
//! Ties between optimal sets are broken deterministically: equal value
//! (within `1e-12` relative) prefers the smaller total weight, then the
//! smaller number of items, then the lexicographically smallest sorted index
//! list. That makes the leftover resource and `gamma_star` reproducible.

use std::cmp::Ordering;

use crate::domain::{feasibility_tolerance, Allocation};
use crate::environment::served_value;
use crate::error::{Error, Result};

/// Relative tolerance under which two objective values count as equal.
pub const VALUE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackSolution {
    /// Selected arm indices, ascending.
    pub selected: Vec<usize>,
    /// `Σ μ_i` over `selected`, summed in index order.
    pub total_value: f64,
    pub total_weight: f64,
    /// Resource left after serving the selected arms, `C - total_weight` (never negative).
    pub leftover: f64,
    /// `leftover / K`: per-arm slack that preserves optimality.
    pub gamma_star: f64,
}

impl KnapsackSolution {
    pub fn contains(&self, arm: usize) -> bool {
        self.selected.binary_search(&arm).is_ok()
    }

    /// The allocation serving every selected arm with `weights[i]`.
    pub fn allocation(&self, weights: &[f64]) -> Allocation {
        let mut x = vec![0.0; weights.len()];
        for &i in &self.selected {
            x[i] = weights[i];
        }
        Allocation::new(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TieBreak {
    /// Lighter, then fewer items, then lexicographic.
    WeightThenLex,
    /// Fewer items only; used to find the smallest optimal superarm.
    Cardinality,
}

struct Candidate {
    selected: Vec<usize>,
    value: f64,
    weight: f64,
}

fn values_tie(a: f64, b: f64) -> bool {
    (a - b).abs() <= VALUE_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

fn compare(a: &Candidate, b: &Candidate, rule: TieBreak) -> Ordering {
    if !values_tie(a.value, b.value) {
        // Larger value is "less" so that `Ordering::Less` always means better.
        return b.value.partial_cmp(&a.value).unwrap_or(Ordering::Equal);
    }
    match rule {
        TieBreak::Cardinality => a.selected.len().cmp(&b.selected.len()),
        TieBreak::WeightThenLex => {
            if !values_tie(a.weight, b.weight) {
                return a.weight.partial_cmp(&b.weight).unwrap_or(Ordering::Equal);
            }
            a.selected
                .len()
                .cmp(&b.selected.len())
                .then_with(|| a.selected.cmp(&b.selected))
        }
    }
}

struct Search<'a> {
    values: &'a [f64],
    weights: &'a [f64],
    /// Candidate items (positive value, weight within capacity), best ratio first.
    order: Vec<usize>,
    capacity: f64,
    rule: TieBreak,
    stack: Vec<usize>,
    best: Option<Candidate>,
}

impl Search<'_> {
    /// Fractional-relaxation bound on the value reachable from `depth` on.
    fn bound(&self, depth: usize, value: f64, weight: f64) -> f64 {
        let mut room = self.capacity - weight;
        let mut bound = value;
        for &i in &self.order[depth..] {
            let w = self.weights[i];
            if w <= room {
                room -= w;
                bound += self.values[i];
            } else {
                bound += self.values[i] * room / w;
                break;
            }
        }
        bound
    }

    fn prune_margin(&self) -> Option<f64> {
        self.best.as_ref().map(|b| {
            // Generous compared to the tie tolerance: the running sums drift
            // from the canonical index-order sums by a few ulps.
            b.value - 1e-9 * b.value.abs().max(1.0)
        })
    }

    fn dfs(&mut self, depth: usize, value: f64, weight: f64) {
        if let Some(margin) = self.prune_margin() {
            if self.bound(depth, value, weight) < margin {
                return;
            }
        }
        if depth == self.order.len() {
            self.offer_leaf();
            return;
        }
        let item = self.order[depth];
        let w = self.weights[item];
        if weight + w <= self.capacity {
            self.stack.push(item);
            self.dfs(depth + 1, value + self.values[item], weight + w);
            self.stack.pop();
        }
        self.dfs(depth + 1, value, weight);
    }

    fn offer_leaf(&mut self) {
        let mut selected = self.stack.clone();
        selected.sort_unstable();
        let value = selected.iter().map(|&i| self.values[i]).sum();
        let weight = selected.iter().map(|&i| self.weights[i]).sum();
        let candidate = Candidate {
            selected,
            value,
            weight,
        };
        let better = match &self.best {
            None => true,
            Some(best) => compare(&candidate, best, self.rule) == Ordering::Less,
        };
        if better {
            self.best = Some(candidate);
        }
    }
}

fn check_inputs(values: &[f64], weights: &[f64], capacity: f64) -> Result<()> {
    if values.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            what: "weights",
            expected: values.len(),
            got: weights.len(),
        });
    }
    if !(capacity >= 0.0 && capacity.is_finite()) {
        return Err(Error::out_of_range("capacity", capacity, "[0, inf)"));
    }
    for (i, &w) in weights.iter().enumerate() {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::out_of_range(format!("weights[{i}]"), w, "[0, inf)"));
        }
    }
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::out_of_range(format!("values[{i}]"), v, "finite"));
        }
    }
    Ok(())
}

fn ratio_order(values: &[f64], weights: &[f64], capacity: f64) -> Vec<usize> {
    let ratio = |i: usize| {
        if weights[i] == 0.0 {
            f64::INFINITY
        } else {
            values[i] / weights[i]
        }
    };
    let mut order: Vec<usize> = (0..values.len())
        .filter(|&i| values[i] > 0.0 && weights[i] <= capacity)
        .collect();
    order.sort_by(|&a, &b| {
        ratio(b)
            .partial_cmp(&ratio(a))
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

fn run_search(values: &[f64], weights: &[f64], capacity: f64, rule: TieBreak) -> Result<Candidate> {
    check_inputs(values, weights, capacity)?;
    let cap = capacity + feasibility_tolerance(capacity);
    let mut search = Search {
        values,
        weights,
        order: ratio_order(values, weights, cap),
        capacity: cap,
        rule,
        stack: Vec::new(),
        best: None,
    };
    search.dfs(0, 0.0, 0.0);
    Ok(search.best.unwrap_or(Candidate {
        selected: Vec::new(),
        value: 0.0,
        weight: 0.0,
    }))
}

/// Exact 0-1 knapsack: values `mu`, weights `theta`, capacity `capacity`.
///
/// Weights may sum to `capacity` plus [`feasibility_tolerance`].
pub fn solve_knapsack(mu: &[f64], theta: &[f64], capacity: f64) -> Result<KnapsackSolution> {
    let best = run_search(mu, theta, capacity, TieBreak::WeightThenLex)?;
    let leftover = (capacity - best.weight).max(0.0);
    let k = mu.len().max(1) as f64;
    Ok(KnapsackSolution {
        selected: best.selected,
        total_value: best.value,
        total_weight: best.weight,
        leftover,
        gamma_star: leftover / k,
    })
}

/// `k⋆`: the fewest arms any optimal allocation serves.
pub fn min_optimal_cardinality(mu: &[f64], theta: &[f64], capacity: f64) -> Result<usize> {
    Ok(run_search(mu, theta, capacity, TieBreak::Cardinality)?
        .selected
        .len())
}

/// `K_max`: the most arms any feasible allocation can serve.
pub fn max_feasible_cardinality(theta: &[f64], capacity: f64) -> usize {
    let mut sorted = theta.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let cap = capacity + feasibility_tolerance(capacity);
    let mut used = 0.0;
    sorted
        .into_iter()
        .take_while(|&t| {
            used += t;
            used <= cap
        })
        .count()
}

/// Allocation-equivalent threshold for the same-threshold case.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalentSameThreshold {
    /// Number of arms an optimal allocation serves, `min(⌊C/θ_s⌋, K)`.
    pub m_arms: usize,
    /// `C / m_arms`.
    pub theta_hat: f64,
    /// Candidates `C/K, C/(K-1), …, C`, ascending.
    pub theta_set: Vec<f64>,
}

/// The finite candidate set `{C/K, C/(K-1), …, C}` in ascending order.
pub fn same_threshold_candidates(capacity: f64, num_arms: usize) -> Vec<f64> {
    (1..=num_arms)
        .map(|pos| capacity / (num_arms - pos + 1) as f64)
        .collect()
}

pub fn allocation_equivalent_same(
    theta_s: f64,
    capacity: f64,
    num_arms: usize,
) -> Result<EquivalentSameThreshold> {
    if num_arms == 0 {
        return Err(Error::NoArms);
    }
    if !(theta_s > 0.0 && theta_s <= capacity) {
        return Err(Error::out_of_range(
            "theta_s",
            theta_s,
            format!("(0, {capacity}]"),
        ));
    }
    let fit = (capacity / theta_s).floor();
    let m_arms = if fit >= num_arms as f64 {
        num_arms
    } else {
        (fit as usize).max(1)
    };
    Ok(EquivalentSameThreshold {
        m_arms,
        theta_hat: capacity / m_arms as f64,
        theta_set: same_threshold_candidates(capacity, num_arms),
    })
}

/// True iff both threshold vectors give the same optimal value (within `1e-12`).
pub fn verify_allocation_equivalent(
    mu: &[f64],
    theta_a: &[f64],
    theta_b: &[f64],
    capacity: f64,
) -> Result<bool> {
    let a = solve_knapsack(mu, theta_a, capacity)?.total_value;
    let b = solve_knapsack(mu, theta_b, capacity)?.total_value;
    Ok((a - b).abs() <= VALUE_TOLERANCE)
}

/// `Δ_x`: expected reward lost by `x` relative to the optimum.
pub fn suboptimality_gap(mu: &[f64], theta: &[f64], capacity: f64, x: &Allocation) -> Result<f64> {
    x.check_feasible(mu.len(), capacity)?;
    let opt = solve_knapsack(mu, theta, capacity)?.total_value;
    Ok(opt - served_value(mu, theta, x.amounts()))
}

/// `Δ_m`: the largest per-round gap over all feasible allocations.
///
/// The all-zero allocation is the worst; it still collects every arm whose
/// threshold is zero.
pub fn max_gap(mu: &[f64], theta: &[f64], capacity: f64) -> Result<f64> {
    let opt = solve_knapsack(mu, theta, capacity)?.total_value;
    let free: f64 = mu
        .iter()
        .zip(theta)
        .filter(|(_, &t)| t == 0.0)
        .map(|(&m, _)| m)
        .sum();
    Ok(opt - free)
}

/// KL divergence between Bernoulli(`p`) and Bernoulli(`q`), with `0 ln 0 = 0`.
pub fn kl_bernoulli(p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::out_of_range("p", p, "[0, 1]"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::out_of_range("q", q, "[0, 1]"));
    }
    if p == q {
        return Ok(0.0);
    }
    if q == 0.0 || q == 1.0 {
        return Err(Error::Degenerate(format!("d({p}, {q}) is infinite")));
    }
    let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).ln() };
    Ok(term(p, q) + term(1.0 - p, 1.0 - q))
}

/// Asymptotic regret constant `Σ_{i ∉ top-M} (μ_M − μ_i) / d(μ_i, μ_M)` of the
/// multiple-play problem with `m_arms` plays. Works on a sorted copy of `mu`.
pub fn lower_bound_constant(mu: &[f64], m_arms: usize) -> Result<f64> {
    if m_arms == 0 || m_arms > mu.len() {
        return Err(Error::InvalidParameter(format!(
            "M = {m_arms} must be in 1..={}",
            mu.len()
        )));
    }
    if m_arms == mu.len() {
        return Ok(0.0);
    }
    let mut sorted = mu.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    let mu_m = sorted[m_arms - 1];
    if mu_m <= sorted[m_arms] {
        return Err(Error::Degenerate(format!(
            "μ_M = μ_(M+1) = {mu_m}: top-{m_arms} set is not unique"
        )));
    }
    if mu_m == 1.0 {
        // d(μ_i, 1) is infinite for every μ_i < 1.
        return Ok(0.0);
    }
    sorted[m_arms..]
        .iter()
        .map(|&mu_i| Ok((mu_m - mu_i) / kl_bernoulli(mu_i, mu_m)?))
        .sum()
}

fn check_confidence(delta: f64, epsilon: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::out_of_range("delta", delta, "(0, 1)"));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::out_of_range("epsilon", epsilon, "(0, 1]"));
    }
    Ok(())
}

fn ceil_rounds(numerator_log: f64, epsilon: f64) -> u64 {
    let raw = numerator_log / (1.0 / (1.0 - epsilon)).ln();
    // ε = 1 gives ln(∞) in the denominator and a raw value of zero.
    (raw.ceil() as u64).max(1)
}

/// Consecutive all-zero rounds after which the same-threshold search
/// concludes it is under-allocating: `⌈ln(log₂K / δ) / ln(1/(1−ε))⌉`.
pub fn w_delta_st(num_arms: usize, delta: f64, epsilon: f64) -> Result<u64> {
    if num_arms < 2 {
        return Err(Error::InvalidParameter(
            "the same-threshold search needs at least two arms".into(),
        ));
    }
    check_confidence(delta, epsilon)?;
    let log_k = (num_arms as f64).log2();
    Ok(ceil_rounds((log_k / delta).ln(), epsilon))
}

/// `⌈1 + C/γ⌉`: number of resolution cells of the per-arm search.
pub fn search_grid_size(capacity: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::out_of_range("gamma", gamma, "(0, inf)"));
    }
    if !(capacity >= 0.0 && capacity.is_finite()) {
        return Err(Error::out_of_range("capacity", capacity, "[0, inf)"));
    }
    Ok((1.0 + capacity / gamma).ceil())
}

/// `⌈log₂⌈1 + C/γ⌉⌉`: binary-search depth of one arm.
pub fn search_depth_dt(capacity: f64, gamma: f64) -> Result<u32> {
    Ok(search_grid_size(capacity, gamma)?.log2().ceil() as u32)
}

/// Per-arm zero count after which the different-thresholds search raises
/// its lower bound: `⌈ln(K log₂⌈1+C/γ⌉ / δ) / ln(1/(1−ε))⌉`.
pub fn w_delta_dt(
    num_arms: usize,
    capacity: f64,
    gamma: f64,
    delta: f64,
    epsilon: f64,
) -> Result<u64> {
    if num_arms == 0 {
        return Err(Error::NoArms);
    }
    check_confidence(delta, epsilon)?;
    let grid = search_grid_size(capacity, gamma)?;
    if grid < 2.0 {
        return Err(Error::Degenerate(
            "capacity 0 leaves nothing to search".into(),
        ));
    }
    let depth = grid.log2();
    Ok(ceil_rounds((num_arms as f64 * depth / delta).ln(), epsilon))
}
