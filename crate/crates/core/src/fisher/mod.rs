//! Classical Fisher information of outcome distributions (with conditional
//! chain decomposition) and quantum Fisher information of encoded probes.

mod quantum;

pub use quantum::{
    global_optimality_witness, optimality_check, povm_fisher, qfi, sld, sld_of, sld_povm, state_qfi, OptimalityReport,
    SldResult, WitnessReport, WitnessVerdict,
};

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::numerics::NumericsError;
use crate::probes::ProbeError;
use crate::readout::PovmError;
use crate::scalar::Real;
use crate::tol;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FisherError {
    #[error("Fisher information diverges: outcome {label:?} has probability {prob:e} but derivative {dprob:e}")]
    SingularFisher { label: Vec<usize>, prob: f64, dprob: f64 },
    #[error("invalid outcome distribution: {0}")]
    InvalidDistribution(String),
    #[error("partition mismatch: {0}")]
    PartitionMismatch(String),
    #[error("dimension mismatch: state {state}, measurement {measurement}")]
    DimMismatch { state: usize, measurement: usize },
    #[error(transparent)]
    Povm(#[from] PovmError),
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Probabilities `p_φ(x)` and derivatives `∂_φ p_φ(x)` over multi-part outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution<T: Real> {
    labels: Vec<Vec<usize>>,
    prob: Vec<T>,
    dprob: Vec<T>,
}

impl<T: Real> OutcomeDistribution<T> {
    pub fn new(labels: Vec<Vec<usize>>, prob: Vec<T>, dprob: Vec<T>) -> Result<Self, FisherError> {
        let bad = |msg: String| Err(FisherError::InvalidDistribution(msg));
        if labels.is_empty() {
            return bad("no outcomes".into());
        }
        if labels.len() != prob.len() || labels.len() != dprob.len() {
            return bad(format!(
                "{} labels, {} probabilities, {} derivatives",
                labels.len(),
                prob.len(),
                dprob.len()
            ));
        }
        let parts = labels[0].len();
        if parts == 0 || labels.iter().any(|l| l.len() != parts) {
            return bad("labels must share a nonzero number of parts".into());
        }
        let mut seen = HashSet::with_capacity(labels.len());
        if let Some(dup) = labels.iter().find(|l| !seen.insert(*l)) {
            return bad(format!("duplicate label {dup:?}"));
        }
        if let Some(p) = prob.iter().find(|p| !(**p >= -T::tol(tol::NEGATIVE_PROBABILITY))) {
            return bad(format!("probability {p} is negative"));
        }
        if dprob.iter().any(|d| !d.is_finite()) {
            return bad("non-finite derivative".into());
        }
        let total: T = prob.iter().copied().sum();
        if (total - T::one()).abs() > T::tol(tol::PROBABILITY_SUM) {
            return bad(format!("probabilities sum to {total}"));
        }
        let dtotal: T = dprob.iter().copied().sum();
        if dtotal.abs() > T::tol(tol::PROBABILITY_SUM) {
            return bad(format!("derivatives sum to {dtotal}"));
        }
        Ok(Self { labels, prob, dprob })
    }

    /// One part; outcome `i` is labelled `[i]`.
    pub fn single_part(prob: Vec<T>, dprob: Vec<T>) -> Result<Self, FisherError> {
        let labels = (0..prob.len()).map(|i| vec![i]).collect();
        Self::new(labels, prob, dprob)
    }

    /// Full grid with the given alphabet sizes, row-major (last part fastest).
    pub fn from_grid(alphabet: &[usize], prob: Vec<T>, dprob: Vec<T>) -> Result<Self, FisherError> {
        let mut labels = vec![vec![]];
        for &size in alphabet {
            labels = labels
                .into_iter()
                .flat_map(|l: Vec<usize>| {
                    (0..size).map(move |x| {
                        let mut next = l.clone();
                        next.push(x);
                        next
                    })
                })
                .collect();
        }
        Self::new(labels, prob, dprob)
    }

    pub fn parts(&self) -> usize {
        self.labels[0].len()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Vec<usize>] {
        &self.labels
    }

    pub fn prob(&self) -> &[T] {
        &self.prob
    }

    pub fn dprob(&self) -> &[T] {
        &self.dprob
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], T, T)> + '_ {
        self.labels
            .iter()
            .zip(self.prob.iter().zip(&self.dprob))
            .map(|(l, (&p, &d))| (l.as_slice(), p, d))
    }

    /// Marginal on the listed parts, in the listed order.
    pub fn marginal(&self, parts: &[usize]) -> Result<Self, FisherError> {
        if parts.is_empty() || parts.iter().any(|&k| k >= self.parts()) {
            return Err(FisherError::PartitionMismatch(format!(
                "parts {parts:?} of a {}-part distribution",
                self.parts()
            )));
        }
        let (labels, prob, dprob) = self.accumulate(parts);
        Ok(Self { labels, prob, dprob })
    }

    fn accumulate(&self, parts: &[usize]) -> (Vec<Vec<usize>>, Vec<T>, Vec<T>) {
        let mut acc: BTreeMap<Vec<usize>, (T, T)> = BTreeMap::new();
        for (label, p, d) in self.iter() {
            let key: Vec<usize> = parts.iter().map(|&k| label[k]).collect();
            let e = acc.entry(key).or_insert((T::zero(), T::zero()));
            e.0 += p;
            e.1 += d;
        }
        let mut labels = Vec::with_capacity(acc.len());
        let mut prob = Vec::with_capacity(acc.len());
        let mut dprob = Vec::with_capacity(acc.len());
        for (k, (p, d)) in acc {
            labels.push(k);
            prob.push(p);
            dprob.push(d);
        }
        (labels, prob, dprob)
    }
}

/// Applies the zero-probability rule to one outcome: `None` if dropped,
/// otherwise the contribution `(∂p)²/p`.
fn fisher_term<T: Real>(label: &[usize], p: T, d: T) -> Result<Option<T>, FisherError> {
    if p <= T::lit(tol::ZERO_PROBABILITY) {
        if d.abs() > T::lit(tol::SINGULAR_DERIVATIVE) {
            return Err(FisherError::SingularFisher {
                label: label.to_vec(),
                prob: p.as_f64(),
                dprob: d.as_f64(),
            });
        }
        return Ok(None);
    }
    Ok(Some(d * d / p))
}

/// `F = Σ_x (∂_φ p_x)² / p_x`.
pub fn classical_fisher<T: Real>(d: &OutcomeDistribution<T>) -> Result<T, FisherError> {
    let mut f = T::zero();
    for (label, p, dp) in d.iter() {
        if let Some(term) = fisher_term(label, p, dp)? {
            f += term;
        }
    }
    Ok(f)
}

/// One component of a chain decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainTerm<T: Real> {
    /// `F(Xk)` or `F(Xk|Xk+1,…)`, naming parts 1-based.
    pub label: String,
    pub value: T,
}

/// Decomposes the joint Fisher information along `order = (X_1, …, X_N)`:
/// returns `[F(X_N), F(X_{N−1}|X_N), …, F(X_1|X_2…X_N)]`.
///
/// Each conditional term is computed directly from the conditional
/// distributions `q(x_k | x_{k+1} … x_N)`, not by differencing joint values.
pub fn chain_decompose<T: Real>(d: &OutcomeDistribution<T>, order: &[usize]) -> Result<Vec<ChainTerm<T>>, FisherError> {
    let n = d.parts();
    if n < 2 {
        return Err(FisherError::PartitionMismatch(
            "chain decomposition needs at least two parts".into(),
        ));
    }
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(FisherError::PartitionMismatch(format!(
            "{order:?} is not a permutation of the {n} parts"
        )));
    }
    let name = |k: usize| format!("X{}", order[k] + 1);

    let mut terms = Vec::with_capacity(n);
    for k in (0..n).rev() {
        let context: Vec<usize> = order[k + 1..].to_vec();
        let value = if context.is_empty() {
            classical_fisher(&d.marginal(&[order[k]])?)?
        } else {
            let mut with_target = vec![order[k]];
            with_target.extend(&context);
            conditional_fisher(d, &with_target, &context)?
        };
        let label = if context.is_empty() {
            format!("F({})", name(k))
        } else {
            let ctx: Vec<String> = (k + 1..n).map(name).collect();
            format!("F({}|{})", name(k), ctx.join(","))
        };
        terms.push(ChainTerm { label, value });
    }
    Ok(terms)
}

/// `F(X | C) = Σ_c p(c) Σ_x q(x|c) (∂ ln q(x|c))²` where `joint_parts = [X, C…]`.
fn conditional_fisher<T: Real>(
    d: &OutcomeDistribution<T>,
    joint_parts: &[usize],
    context_parts: &[usize],
) -> Result<T, FisherError> {
    let joint = d.marginal(joint_parts)?;
    let context = d.marginal(context_parts)?;
    let ctx_index: BTreeMap<&[usize], (T, T)> = context.iter().map(|(l, p, dp)| (l, (p, dp))).collect();
    let mut f = T::zero();
    for (label, p, dp) in joint.iter() {
        let (pc, dpc) = ctx_index[&label[1..]];
        if fisher_term(label, p, dp)?.is_none() {
            continue;
        }
        // ∂ ln q(x|c) = ∂p(x,c)/p(x,c) − ∂p(c)/p(c)
        let score = dp / p - dpc / pc;
        f += p * score * score;
    }
    Ok(f)
}

#[cfg(test)]
mod tests;
