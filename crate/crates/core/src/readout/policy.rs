use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use super::ReadoutError;
use crate::numerics::Sign;
use crate::scalar::{cis, cplx, creal, czero, Real, C};

/// Single-qubit measurement direction in Bloch angles.
///
/// Outcome 0 is the bra `⟨m| = m₀⟨0| + m₁⟨1|` with `m₀ = cos(θ/2)` and
/// `m₁ = e^{iϕ} sin(θ/2)`; outcome 1 is the orthogonal bra
/// `sin(θ/2)⟨0| − e^{iϕ} cos(θ/2)⟨1|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalBasis {
    pub theta: f64,
    pub varphi: f64,
}

impl LocalBasis {
    /// Requires `θ ∈ [0, π]`; `ϕ` is wrapped into `[0, 2π)`.
    pub fn new(theta: f64, varphi: f64) -> Result<Self, ReadoutError> {
        if !theta.is_finite() || !varphi.is_finite() {
            return Err(ReadoutError::InvalidBasis(format!(
                "non-finite angles ({theta}, {varphi})"
            )));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(ReadoutError::InvalidBasis(format!("theta {theta} outside [0, π]")));
        }
        Ok(Self {
            theta,
            varphi: wrap_angle(varphi),
        })
    }

    /// `|±⟩`.
    pub fn plus_minus() -> Self {
        Self {
            theta: FRAC_PI_2,
            varphi: 0.0,
        }
    }

    pub fn computational() -> Self {
        Self {
            theta: 0.0,
            varphi: 0.0,
        }
    }

    pub fn is_valid(&self) -> bool {
        (0.0..=PI).contains(&self.theta) && (0.0..TAU).contains(&self.varphi)
    }

    /// `(m₀, m₁)`.
    pub fn amplitudes<T: Real>(&self) -> (C<T>, C<T>) {
        let half = T::lit(self.theta / 2.0);
        (creal(half.cos()), cis(T::lit(self.varphi)) * half.sin())
    }

    /// Row vector of the bra for `outcome ∈ {0, 1}`.
    pub fn bra<T: Real>(&self, outcome: usize) -> [C<T>; 2] {
        let half = T::lit(self.theta / 2.0);
        let phase = cis(T::lit(self.varphi));
        match outcome {
            0 => [creal(half.cos()), phase * half.sin()],
            1 => [creal(half.sin()), -(phase * half.cos())],
            _ => panic!("qubit outcome must be 0 or 1, got {outcome}"),
        }
    }
}

pub(crate) fn wrap_angle(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix<T: Real>(self) -> [[C<T>; 2]; 2] {
        let (o, l, i) = (czero(), creal(T::one()), cplx(T::zero(), T::one()));
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }
}

/// Classical correction applied to the last unmeasured qubit, chosen from
/// the outcomes of all earlier measurements.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Correction {
    #[default]
    None,
    /// `σ_z` when an odd number of earlier outcomes were 1.
    ParityPhaseFlip,
    /// Explicit Pauli per history of length `N − 1`.
    Table { map: BTreeMap<String, Pauli> },
}

impl Correction {
    pub fn for_history(&self, history: &[usize]) -> Option<Pauli> {
        match self {
            Correction::None => None,
            Correction::ParityPhaseFlip => {
                let odd = history.iter().filter(|&&o| o == 1).count() % 2 == 1;
                odd.then_some(Pauli::Z)
            }
            Correction::Table { map } => map.get(&history_key(history)).copied(),
        }
    }
}

/// Next measurement at a node of the decision tree.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Decision {
    pub qubit: usize,
    pub theta: f64,
    pub varphi: f64,
}

impl Decision {
    pub fn new(qubit: usize, basis: LocalBasis) -> Self {
        Self {
            qubit,
            theta: basis.theta,
            varphi: basis.varphi,
        }
    }

    pub fn basis(&self) -> LocalBasis {
        LocalBasis {
            theta: self.theta,
            varphi: self.varphi,
        }
    }
}

/// `"0110"` for the outcome sequence `[0, 1, 1, 0]`.
pub fn history_key(history: &[usize]) -> String {
    history.iter().map(|&o| if o == 0 { '0' } else { '1' }).collect()
}

/// All outcome sequences of the given length, in lexicographic order.
pub(crate) fn histories(len: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..1usize << len).map(move |x| (0..len).map(|b| (x >> (len - 1 - b)) & 1).collect())
}

/// Decision tree over outcome histories: which qubit to measure next and in
/// which basis, plus a final classical correction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptivePolicy {
    n_qubits: usize,
    nodes: BTreeMap<String, Decision>,
    #[serde(default)]
    correction: Correction,
}

impl AdaptivePolicy {
    pub fn new(
        n_qubits: usize,
        nodes: BTreeMap<String, Decision>,
        correction: Correction,
    ) -> Result<Self, ReadoutError> {
        let policy = Self {
            n_qubits,
            nodes,
            correction,
        };
        policy.validate()?;
        Ok(policy)
    }

    /// Measures qubits `0, 1, …, N−1` in order, all in the same basis.
    pub fn uniform(n_qubits: usize, basis: LocalBasis, correction: Correction) -> Result<Self, ReadoutError> {
        let nodes = (0..n_qubits)
            .flat_map(histories)
            .map(|h| (history_key(&h), Decision::new(h.len(), basis)))
            .collect();
        Self::new(n_qubits, nodes, correction)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn nodes(&self) -> &BTreeMap<String, Decision> {
        &self.nodes
    }

    pub fn correction(&self) -> &Correction {
        &self.correction
    }

    pub fn decision(&self, history: &[usize]) -> Option<&Decision> {
        self.nodes.get(&history_key(history))
    }

    /// Replaces the basis at an existing node.
    pub fn set_basis(&mut self, history: &[usize], basis: LocalBasis) -> Result<(), ReadoutError> {
        if !basis.is_valid() {
            return Err(ReadoutError::InvalidBasis(format!("{basis:?}")));
        }
        let key = history_key(history);
        let node = self
            .nodes
            .get_mut(&key)
            .ok_or_else(|| ReadoutError::IncompletePolicy(format!("no decision for history \"{key}\"")))?;
        node.theta = basis.theta;
        node.varphi = basis.varphi;
        Ok(())
    }

    pub fn with_correction(mut self, correction: Correction) -> Result<Self, ReadoutError> {
        self.correction = correction;
        self.validate()?;
        Ok(self)
    }

    /// Checks that every reachable history has a decision, every path
    /// measures each qubit exactly once, and no entry is unreachable.
    pub fn validate(&self) -> Result<(), ReadoutError> {
        let n = self.n_qubits;
        if n == 0 {
            return Err(ReadoutError::InvalidQubitCount(0));
        }
        let mut stack: Vec<(Vec<usize>, Vec<bool>)> = vec![(vec![], vec![false; n])];
        let mut reachable = 0usize;
        while let Some((history, measured)) = stack.pop() {
            if history.len() == n {
                continue;
            }
            let key = history_key(&history);
            let d = self
                .nodes
                .get(&key)
                .ok_or_else(|| ReadoutError::IncompletePolicy(format!("no decision for history \"{key}\"")))?;
            reachable += 1;
            if d.qubit >= n {
                return Err(ReadoutError::InvalidPolicy(format!(
                    "history \"{key}\" measures qubit {} of {n}",
                    d.qubit
                )));
            }
            if measured[d.qubit] {
                return Err(ReadoutError::InvalidPolicy(format!(
                    "history \"{key}\" measures qubit {} a second time",
                    d.qubit
                )));
            }
            if !d.basis().is_valid() {
                return Err(ReadoutError::InvalidBasis(format!(
                    "history \"{key}\": {:?}",
                    d.basis()
                )));
            }
            for outcome in 0..2 {
                let mut h = history.clone();
                h.push(outcome);
                let mut m = measured.clone();
                m[d.qubit] = true;
                stack.push((h, m));
            }
        }
        if reachable != self.nodes.len() {
            return Err(ReadoutError::InvalidPolicy(format!(
                "{} entries but only {reachable} reachable histories",
                self.nodes.len()
            )));
        }
        if let Correction::Table { map } = &self.correction {
            for h in histories(n - 1) {
                let key = history_key(&h);
                if !map.contains_key(&key) {
                    return Err(ReadoutError::IncompletePolicy(format!(
                        "no correction for history \"{key}\""
                    )));
                }
            }
            if map.len() != 1 << (n - 1) {
                return Err(ReadoutError::InvalidPolicy(
                    "correction table has entries of the wrong length".into(),
                ));
            }
        }
        Ok(())
    }

    /// Canonical text form: pretty-printed JSON with keys in sorted order.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("policy serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, ReadoutError> {
        let policy: Self = serde_json::from_str(text).map_err(|e| ReadoutError::InvalidPolicy(e.to_string()))?;
        policy.validate()?;
        Ok(policy)
    }
}

/// Every qubit measured in `|±⟩` in order, with `σ_z` on the last qubit
/// when the number of `|−⟩` outcomes is odd.
pub fn paper_policy(n: usize) -> Result<AdaptivePolicy, ReadoutError> {
    AdaptivePolicy::uniform(n, LocalBasis::plus_minus(), Correction::ParityPhaseFlip)
}

/// [`paper_policy`] with the last measurement rotated about `z` so that the
/// accumulated phase `sign·N·φ` sits where the parity statistics are most
/// sensitive. At `φ = π/(2N)` this coincides with the φ-independent policy.
pub fn paper_policy_at(n: usize, phi: f64, sign: Sign) -> Result<AdaptivePolicy, ReadoutError> {
    let mut policy = paper_policy(n)?;
    let chi = sign.value::<f64>() * n as f64 * phi;
    let last = LocalBasis::new(FRAC_PI_2, FRAC_PI_2 - chi)?;
    for h in histories(n - 1) {
        policy.set_basis(&h, last)?;
    }
    Ok(policy)
}
