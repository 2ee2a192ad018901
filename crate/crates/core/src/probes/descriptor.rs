//! JSON state descriptors.
//!
//! ```json
//! { "kind": "werner", "n": 3, "eta": 0.5, "generator": "collective", "sign": 1 }
//! ```
//!
//! `kind` is one of `werner`, `nghz`, `bell`, `classical`, `raw-matrix`.
//! Complex entries are `[re, im]` pairs; matrices are arrays of rows.

use serde::{Deserialize, Serialize};

use crate::numerics::{ComplexMatrix, Sign};
use crate::scalar::{cplx, Real};

use super::{
    bell00, classically_correlated, nghz, werner, ClassicalTable, DensityMatrix, ProbeError, ProbeFamily, WernerSpec,
};

/// Row-major complex matrix with `[re, im]` entries.
pub type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StateKind {
    Werner {
        n: usize,
        eta: f64,
    },
    Nghz {
        n: usize,
    },
    Bell,
    Classical {
        n: usize,
        table: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bases: Option<Vec<RawMatrix>>,
    },
    RawMatrix {
        entries: RawMatrix,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorSpec {
    /// `Σ_i |1⟩⟨1|_i`.
    #[default]
    Collective,
    Raw(RawMatrix),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDescriptor {
    #[serde(flatten)]
    pub state: StateKind,
    #[serde(default)]
    pub generator: GeneratorSpec,
    #[serde(default)]
    pub sign: Sign,
}

impl StateDescriptor {
    pub fn werner(n: usize, eta: f64) -> Self {
        Self::from_kind(StateKind::Werner { n, eta })
    }

    pub fn nghz(n: usize) -> Self {
        Self::from_kind(StateKind::Nghz { n })
    }

    pub fn from_kind(state: StateKind) -> Self {
        Self {
            state,
            generator: GeneratorSpec::Collective,
            sign: Sign::Plus,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ProbeError> {
        serde_json::from_str(text).map_err(|e| ProbeError::Descriptor(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes")
    }

    pub fn kind_name(&self) -> &'static str {
        match self.state {
            StateKind::Werner { .. } => "werner",
            StateKind::Nghz { .. } => "nghz",
            StateKind::Bell => "bell",
            StateKind::Classical { .. } => "classical",
            StateKind::RawMatrix { .. } => "raw-matrix",
        }
    }

    pub fn state<T: Real>(&self) -> Result<DensityMatrix<T>, ProbeError> {
        match &self.state {
            StateKind::Werner { n, eta } => werner(&WernerSpec::new(*n, T::lit(*eta))?),
            StateKind::Nghz { n } => nghz(*n),
            StateKind::Bell => Ok(bell00()),
            StateKind::Classical { n, table, bases } => {
                let probs = table.iter().map(|&p| T::lit(p)).collect();
                let table = match bases {
                    None => ClassicalTable::new(*n, probs)?,
                    Some(raw) => {
                        let bases = raw.iter().map(raw_to_matrix).collect::<Result<Vec<_>, _>>()?;
                        ClassicalTable::with_local_bases(*n, probs, bases)?
                    }
                };
                Ok(classically_correlated(&table))
            }
            StateKind::RawMatrix { entries } => DensityMatrix::new(raw_to_matrix(entries)?),
        }
    }

    pub fn family<T: Real>(&self) -> Result<ProbeFamily<T>, ProbeError> {
        let initial = self.state::<T>()?;
        match &self.generator {
            GeneratorSpec::Collective => Ok(ProbeFamily::collective(initial).with_sign(self.sign)),
            GeneratorSpec::Raw(raw) => ProbeFamily::new(initial, raw_to_matrix(raw)?, self.sign),
        }
    }
}

pub fn raw_to_matrix<T: Real>(raw: &RawMatrix) -> Result<ComplexMatrix<T>, ProbeError> {
    let rows = raw
        .iter()
        .map(|row| row.iter().map(|[re, im]| cplx(T::lit(*re), T::lit(*im))).collect())
        .collect();
    Ok(ComplexMatrix::from_rows(rows)?)
}

pub fn matrix_to_raw<T: Real>(m: &ComplexMatrix<T>) -> RawMatrix {
    (0..m.dim())
        .map(|i| m.row(i).iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect())
        .collect()
}
