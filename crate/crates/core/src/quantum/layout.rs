//! Composite-system layout: an ordered list of subsystem dimensions.

use serde::{Deserialize, Serialize};

use super::QuantumError;

/// Ordered list of per-site Hilbert-space dimensions of a composite system.
///
/// The total dimension is the product of the per-site dimensions; every site
/// dimension must be at least 2 and the list must be nonempty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct SubsystemLayout {
    dims: Vec<usize>,
}

impl SubsystemLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self, QuantumError> {
        if dims.is_empty() {
            return Err(QuantumError::EmptyLayout);
        }
        let mut total: usize = 1;
        for (site, &d) in dims.iter().enumerate() {
            if d < 2 {
                return Err(QuantumError::BadSiteDimension { site, dim: d });
            }
            total = total
                .checked_mul(d)
                .ok_or(QuantumError::DimensionOverflow)?;
        }
        Ok(Self { dims })
    }

    /// `n` qubit sites.
    pub fn qubits(n: usize) -> Result<Self, QuantumError> {
        Self::new(vec![2; n])
    }

    /// A single site of dimension `d`.
    pub fn single(d: usize) -> Result<Self, QuantumError> {
        Self::new(vec![d])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_sites(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn dim_of(&self, site: usize) -> Option<usize> {
        self.dims.get(site).copied()
    }

    /// True when every site is a qubit.
    pub fn all_qubits(&self) -> bool {
        self.dims.iter().all(|&d| d == 2)
    }

    /// Layout of the combined system `self ⊗ other`.
    pub fn concat(&self, other: &Self) -> Result<Self, QuantumError> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new(dims)
    }

    /// Row-major strides: the basis index of the multi-index `(i_0, ..)` is
    /// `Σ i_k · stride_k`.
    pub fn strides(&self) -> Vec<usize> {
        let n = self.dims.len();
        let mut strides = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    /// Validate that `sites` is a nonempty, strictly increasing subset.
    pub(crate) fn check_site_subset(&self, sites: &[usize]) -> Result<(), QuantumError> {
        if sites.is_empty() {
            return Err(QuantumError::EmptyKeepSet);
        }
        for (k, &s) in sites.iter().enumerate() {
            if s >= self.n_sites() {
                return Err(QuantumError::SiteOutOfRange {
                    site: s,
                    n_sites: self.n_sites(),
                });
            }
            if k > 0 && sites[k - 1] >= s {
                return Err(QuantumError::UnsortedSites);
            }
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for SubsystemLayout {
    fn deserialize<D>(deserializer: D) -> Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let dims = Vec::<usize>::deserialize(deserializer)?;
        Self::new(dims).map_err(serde::de::Error::custom)
    }
}
