use super::policy::{AdaptivePolicy, LocalBasis, Pauli};
use super::ReadoutError;
use crate::fisher::OutcomeDistribution;
use crate::numerics::ComplexMatrix;
use crate::probes::{derivative_at, encode, DensityMatrix, ProbeFamily};
use crate::scalar::{czero, Real, C};
use crate::tol;

/// Unnormalized conditional state of the unmeasured qubits and its
/// φ-derivative. Both evolve linearly under local projections, so the
/// branch probability is `tr ρ̃` and its derivative is `tr ∂ρ̃`.
#[derive(Clone, Debug)]
pub(crate) struct Node<T: Real> {
    pub rho: ComplexMatrix<T>,
    pub drho: ComplexMatrix<T>,
    /// Original indices of the unmeasured qubits, most significant first.
    pub remaining: Vec<usize>,
}

impl<T: Real> Node<T> {
    pub fn root(family: &ProbeFamily<T>, phi: T) -> Self {
        let rho = encode(family, phi);
        let drho = derivative_at(family, &rho);
        Self {
            rho: rho.into_matrix(),
            drho,
            remaining: (0..family.qubits()).collect(),
        }
    }

    pub fn prob(&self) -> T {
        self.rho.trace().re
    }

    pub fn dprob(&self) -> T {
        self.drho.trace().re
    }

    /// Projects `qubit` onto the bra of `outcome` in `basis`, after applying
    /// `correction` when it is the last unmeasured qubit.
    pub fn child(&self, qubit: usize, basis: LocalBasis, outcome: usize, correction: Option<Pauli>) -> Self {
        let pos = self
            .remaining
            .iter()
            .position(|&q| q == qubit)
            .expect("policy validation guarantees an unmeasured qubit");
        let mut bra = basis.bra::<T>(outcome);
        if let Some(p) = correction {
            // ⟨m| P ρ P† |m⟩ = (⟨m|P) ρ (⟨m|P)†
            let m = p.matrix::<T>();
            bra = [bra[0] * m[0][0] + bra[1] * m[1][0], bra[0] * m[0][1] + bra[1] * m[1][1]];
        }
        let k = self.remaining.len();
        let mut remaining = self.remaining.clone();
        remaining.remove(pos);
        Self {
            rho: contract(&self.rho, k, pos, &bra),
            drho: contract(&self.drho, k, pos, &bra),
            remaining,
        }
    }
}

/// `⟨b|_pos A |b⟩_pos` for a `k`-qubit operator, where `⟨b| = b₀⟨0| + b₁⟨1|`.
fn contract<T: Real>(a: &ComplexMatrix<T>, k: usize, pos: usize, bra: &[C<T>; 2]) -> ComplexMatrix<T> {
    let shift = k - 1 - pos;
    let low = (1usize << shift) - 1;
    let insert = |x: usize, bit: usize| ((x & !low) << 1) | (bit << shift) | (x & low);
    let ket = [bra[0].conj(), bra[1].conj()];
    let half = 1usize << (k - 1);
    ComplexMatrix::from_fn(half, |r, c| {
        let mut acc = czero();
        for s in 0..2 {
            for t in 0..2 {
                acc += bra[s] * a[(insert(r, s), insert(c, t))] * ket[t];
            }
        }
        acc
    })
}

/// A node of the measurement tree below the root.
#[derive(Clone, Debug)]
pub struct Branch<T: Real> {
    /// Outcomes in measurement order.
    pub history: Vec<usize>,
    /// Qubits in measurement order.
    pub measured: Vec<usize>,
    /// Joint probability of `history`.
    pub prob: T,
    pub dprob: T,
    /// Normalized state of the unmeasured qubits; `None` when `prob` vanishes.
    pub post_state: Option<DensityMatrix<T>>,
    /// φ-derivative of `post_state`.
    pub post_derivative: Option<ComplexMatrix<T>>,
}

impl<T: Real> Branch<T> {
    /// Probability of the last outcome given the earlier ones.
    pub fn conditional_prob(&self, parent_prob: T) -> T {
        self.prob / parent_prob
    }
}

#[derive(Clone, Debug)]
pub struct AdaptiveOutcome<T: Real> {
    /// Joint distribution over all `2^N` outcome strings, labelled by qubit index.
    pub distribution: OutcomeDistribution<T>,
    /// Every non-root node of the tree in depth-first order.
    pub branches: Vec<Branch<T>>,
}

/// Enumerates every branch of `policy` on `ρ_φ` and assembles the joint
/// outcome distribution with exact derivatives.
pub fn run_adaptive<T: Real>(
    family: &ProbeFamily<T>,
    phi: T,
    policy: &AdaptivePolicy,
) -> Result<AdaptiveOutcome<T>, ReadoutError> {
    if family.qubits() != policy.n_qubits() {
        return Err(ReadoutError::QubitMismatch {
            state: family.qubits(),
            policy: policy.n_qubits(),
        });
    }
    policy.validate()?;
    let mut walk = Walk {
        policy,
        labels: vec![],
        prob: vec![],
        dprob: vec![],
        branches: vec![],
    };
    walk.visit(&Node::root(family, phi), &mut vec![], &mut vec![]);
    let distribution = OutcomeDistribution::new(walk.labels, walk.prob, walk.dprob)?;
    Ok(AdaptiveOutcome {
        distribution,
        branches: walk.branches,
    })
}

struct Walk<'a, T: Real> {
    policy: &'a AdaptivePolicy,
    labels: Vec<Vec<usize>>,
    prob: Vec<T>,
    dprob: Vec<T>,
    branches: Vec<Branch<T>>,
}

impl<T: Real> Walk<'_, T> {
    fn visit(&mut self, node: &Node<T>, history: &mut Vec<usize>, measured: &mut Vec<usize>) {
        if node.remaining.is_empty() {
            let mut label = vec![0; measured.len()];
            for (&q, &o) in measured.iter().zip(history.iter()) {
                label[q] = o;
            }
            self.labels.push(label);
            self.prob.push(node.prob());
            self.dprob.push(node.dprob());
            return;
        }
        let decision = *self.policy.decision(history).expect("validated policy");
        let correction = if node.remaining.len() == 1 {
            self.policy.correction().for_history(history)
        } else {
            None
        };
        for outcome in 0..2 {
            let child = node.child(decision.qubit, decision.basis(), outcome, correction);
            history.push(outcome);
            measured.push(decision.qubit);
            self.branches.push(branch(&child, history, measured));
            self.visit(&child, history, measured);
            history.pop();
            measured.pop();
        }
    }
}

fn branch<T: Real>(node: &Node<T>, history: &[usize], measured: &[usize]) -> Branch<T> {
    let (p, dp) = (node.prob(), node.dprob());
    let live = p > T::lit(tol::ZERO_PROBABILITY);
    let post_state = live.then(|| DensityMatrix::from_trusted(node.rho.scale_real(T::one() / p).hermitian_part()));
    // ∂(ρ̃/p) = ∂ρ̃/p − ρ̃·∂p/p²
    let post_derivative =
        live.then(|| (&node.drho.scale_real(T::one() / p) - &node.rho.scale_real(dp / (p * p))).hermitian_part());
    Branch {
        history: history.to_vec(),
        measured: measured.to_vec(),
        prob: p,
        dprob: dp,
        post_state,
        post_derivative,
    }
}
