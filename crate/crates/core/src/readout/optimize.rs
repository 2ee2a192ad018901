use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use rand::Rng;
use rayon::prelude::*;

use super::adaptive::{run_adaptive, Node};
use super::policy::{history_key, wrap_angle, AdaptivePolicy, Correction, Decision, LocalBasis};
use super::ReadoutError;
use crate::fisher::{classical_fisher, state_qfi};
use crate::probes::ProbeFamily;
use crate::random;
use crate::scalar::Real;
use crate::tol;

/// Search settings for [`optimize_adaptive`].
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeConfig {
    /// Grid points in `θ ∈ [0, π]`, endpoints included.
    pub theta_points: usize,
    /// Grid points in `ϕ ∈ [0, 2π)`.
    pub varphi_points: usize,
    /// Cap on coordinate-descent passes over all node angles.
    pub max_iterations: usize,
    pub initial_step: f64,
    /// Descent stops once the step has been halved below this.
    pub min_step: f64,
    /// Cap on subtree evaluations; exceeding it returns the best policy so far.
    pub max_evaluations: usize,
    /// Seeds the offset of the `ϕ` grid.
    pub seed: u64,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            theta_points: 12,
            varphi_points: 12,
            max_iterations: 200,
            initial_step: PI / 12.0,
            min_step: 1e-4,
            max_evaluations: 2_000_000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OptimizeResult<T: Real> {
    pub policy: AdaptivePolicy,
    /// Fisher information of `policy`, recomputed by [`run_adaptive`].
    pub fisher: T,
    pub evaluations: usize,
    pub iterations: usize,
    pub budget_exceeded: bool,
}

/// Searches adaptive policies measuring qubits `0, 1, …, N−1` in order.
///
/// Each node's basis is first chosen greedily from the `(θ, ϕ)` grid,
/// scoring a candidate by the summed quantum Fisher information of its two
/// unnormalized conditional states, which bounds what the subtree can still
/// extract. All angles are then refined by coordinate descent on the exact
/// adaptive Fisher information, halving the step whenever a full pass brings
/// no improvement.
pub fn optimize_adaptive<T: Real>(
    family: &ProbeFamily<T>,
    phi: T,
    config: &OptimizeConfig,
) -> Result<OptimizeResult<T>, ReadoutError> {
    let n = family.qubits();
    if n > tol::OPTIMIZER_QUBIT_LIMIT {
        return Err(ReadoutError::TooManyQubits {
            n,
            limit: tol::OPTIMIZER_QUBIT_LIMIT,
        });
    }
    if config.theta_points < 2 || config.varphi_points < 1 {
        return Err(ReadoutError::InvalidBasis(
            "optimizer grid needs at least 2×1 points".into(),
        ));
    }
    let grid = grid(config);
    let root = Node::root(family, phi);

    let mut search = Search {
        evaluations: 0,
        budget: config.max_evaluations,
    };
    let mut nodes = BTreeMap::new();
    search.greedy(&root, &mut vec![], &grid, &mut nodes);
    let mut policy = AdaptivePolicy::new(n, nodes, Correction::None)?;

    let mut iterations = 0;
    let mut step = config.initial_step;
    let histories: Vec<Vec<usize>> = policy
        .nodes()
        .keys()
        .map(|k| k.bytes().map(|b| (b - b'0') as usize).collect())
        .collect();
    'descent: while iterations < config.max_iterations && step >= config.min_step {
        iterations += 1;
        let mut improved = false;
        for history in &histories {
            let node = descend(&root, &policy, history);
            let mut best = search.subtree(&node, &policy, history);
            for axis in [Axis::Theta, Axis::Varphi] {
                for direction in [1.0, -1.0] {
                    if search.exhausted() {
                        break 'descent;
                    }
                    let current = policy.decision(history).expect("complete policy").basis();
                    let Some(candidate) = axis.shift(current, direction * step) else {
                        continue;
                    };
                    let mut trial = policy.clone();
                    trial.set_basis(history, candidate)?;
                    let value = search.subtree(&node, &trial, history);
                    if value > best + T::lit(1e-14) * best.max(T::one()) {
                        best = value;
                        policy = trial;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }

    let fisher = classical_fisher(&run_adaptive(family, phi, &policy)?.distribution)?;
    Ok(OptimizeResult {
        policy,
        fisher,
        evaluations: search.evaluations,
        iterations,
        budget_exceeded: search.exhausted(),
    })
}

fn grid(config: &OptimizeConfig) -> Vec<LocalBasis> {
    let mut rng = random::rng(config.seed);
    let spacing = TAU / config.varphi_points as f64;
    let offset = rng.gen::<f64>() * spacing;
    let mut points = Vec::with_capacity(config.theta_points * config.varphi_points);
    for i in 0..config.theta_points {
        let theta = PI * i as f64 / (config.theta_points - 1) as f64;
        for j in 0..config.varphi_points {
            points.push(LocalBasis {
                theta,
                varphi: wrap_angle(offset + spacing * j as f64),
            });
        }
    }
    points
}

#[derive(Clone, Copy)]
enum Axis {
    Theta,
    Varphi,
}

impl Axis {
    fn shift(self, b: LocalBasis, delta: f64) -> Option<LocalBasis> {
        match self {
            Axis::Theta => {
                let theta = (b.theta + delta).clamp(0.0, PI);
                (theta != b.theta).then_some(LocalBasis { theta, ..b })
            }
            Axis::Varphi => Some(LocalBasis {
                varphi: wrap_angle(b.varphi + delta),
                ..b
            }),
        }
    }
}

/// Conditional state reached by following `history` under `policy`.
fn descend<T: Real>(root: &Node<T>, policy: &AdaptivePolicy, history: &[usize]) -> Node<T> {
    let mut node = root.clone();
    for (depth, &outcome) in history.iter().enumerate() {
        let prefix = &history[..depth];
        let d = policy.decision(prefix).expect("complete policy");
        node = node.child(d.qubit, d.basis(), outcome, correction_at(policy, &node, prefix));
    }
    node
}

fn correction_at<T: Real>(policy: &AdaptivePolicy, node: &Node<T>, prefix: &[usize]) -> Option<super::Pauli> {
    if node.remaining.len() == 1 {
        policy.correction().for_history(prefix)
    } else {
        None
    }
}

/// `∂p²/p`, or zero for outcomes that never occur.
fn leaf_term<T: Real>(p: T, dp: T) -> T {
    if p > T::lit(tol::ZERO_PROBABILITY) {
        dp * dp / p
    } else {
        T::zero()
    }
}

/// Upper bound on the Fisher information still extractable from a node.
fn potential<T: Real>(node: &Node<T>) -> T {
    if node.remaining.is_empty() {
        leaf_term(node.prob(), node.dprob())
    } else {
        state_qfi(&node.rho, &node.drho).unwrap_or_else(|_| T::zero())
    }
}

struct Search {
    evaluations: usize,
    budget: usize,
}

impl Search {
    fn exhausted(&self) -> bool {
        self.evaluations >= self.budget
    }

    fn greedy<T: Real>(
        &mut self,
        node: &Node<T>,
        history: &mut Vec<usize>,
        grid: &[LocalBasis],
        nodes: &mut BTreeMap<String, Decision>,
    ) {
        if node.remaining.is_empty() {
            return;
        }
        let qubit = node.remaining[0];
        let scored = grid
            .par_iter()
            .enumerate()
            .map(|(i, &b)| {
                let score = potential(&node.child(qubit, b, 0, None)) + potential(&node.child(qubit, b, 1, None));
                (score, i)
            })
            .reduce(|| (T::neg_infinity(), usize::MAX), better);
        self.evaluations += grid.len();
        let basis = grid[scored.1.min(grid.len() - 1)];
        nodes.insert(history_key(history), Decision::new(qubit, basis));
        for outcome in 0..2 {
            history.push(outcome);
            self.greedy(&node.child(qubit, basis, outcome, None), history, grid, nodes);
            history.pop();
        }
    }

    /// Fisher information contributed by the leaves below `node`.
    fn subtree<T: Real>(&mut self, node: &Node<T>, policy: &AdaptivePolicy, history: &[usize]) -> T {
        self.evaluations += 1;
        subtree_fisher(node, policy, &mut history.to_vec())
    }
}

/// Larger score wins; ties go to the lower grid index so the reduction is
/// associative and independent of scheduling.
fn better<T: Real>(a: (T, usize), b: (T, usize)) -> (T, usize) {
    if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
        a
    } else {
        b
    }
}

fn subtree_fisher<T: Real>(node: &Node<T>, policy: &AdaptivePolicy, history: &mut Vec<usize>) -> T {
    if node.remaining.is_empty() {
        return leaf_term(node.prob(), node.dprob());
    }
    let d = *policy.decision(history).expect("complete policy");
    let correction = correction_at(policy, node, history);
    let mut total = T::zero();
    for outcome in 0..2 {
        let child = node.child(d.qubit, d.basis(), outcome, correction);
        history.push(outcome);
        total += subtree_fisher(&child, policy, history);
        history.pop();
    }
    total
}
