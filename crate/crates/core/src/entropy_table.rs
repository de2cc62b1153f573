//! Entropies of every subset of the Bobs.
//!
//! Bob `k` (1-based) is bit `k - 1` of a Bob mask. Any entropy that also
//! involves Alice is rewritten through purity: `S(A ∪ X) = S(Bobs \ X)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::PureState;

/// Largest Bob count for which the full `2^m` table is built.
pub const MAX_TABLE_BOBS: usize = 12;

/// Second differences below this count as strong-subadditivity violations.
pub const SSA_TOL: f64 = 1e-9;

/// Violations below this abort region construction.
pub const SSA_ABORT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetEntropyTable {
    m: usize,
    entries: Vec<f64>,
}

impl SubsetEntropyTable {
    /// Build from raw entries indexed by Bob mask; `entries[0]` must be 0.
    pub fn from_entries(m: usize, entries: Vec<f64>) -> Result<Self> {
        if m == 0 || m > MAX_TABLE_BOBS {
            return Err(Error::TooManyParties {
                m,
                limit: MAX_TABLE_BOBS,
            });
        }
        if entries.len() != 1 << m {
            return Err(Error::DimensionMismatch {
                expected: 1 << m,
                got: entries.len(),
            });
        }
        if entries[0] != 0.0 {
            return Err(Error::TableInvalid(
                "entropy of the empty set must be 0".into(),
            ));
        }
        if let Some((mask, v)) = entries
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < -SSA_TOL)
        {
            return Err(Error::TableInvalid(format!(
                "entry {mask:#b} has invalid entropy {v}"
            )));
        }
        let entries = entries.into_iter().map(|v| v.max(0.0)).collect();
        Ok(SubsetEntropyTable { m, entries })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn full_mask(&self) -> u32 {
        (1u32 << self.m) - 1
    }

    /// `S(B_T)` for a Bob mask `T`.
    pub fn get(&self, mask: u32) -> f64 {
        self.entries[mask as usize]
    }

    /// Entropy of Alice, equal to the entropy of all Bobs together.
    pub fn s_a(&self) -> f64 {
        self.entries[self.full_mask() as usize]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// Entropy of every nonempty Bob subset, with party 0 as Alice.
pub fn build_table(state: &PureState) -> Result<SubsetEntropyTable> {
    let m = state.bob_count();
    if m > MAX_TABLE_BOBS {
        return Err(Error::TooManyParties {
            m,
            limit: MAX_TABLE_BOBS,
        });
    }
    let mut entries: Vec<f64> = (1u32..1 << m)
        .into_par_iter()
        .map(|mask| state.subset_entropy(mask << 1))
        .collect::<Result<_>>()?;
    entries.insert(0, 0.0);
    SubsetEntropyTable::from_entries(m, entries)
}

/// Signed ebit cost of merging Bob `mover` into Alice's side, where Alice
/// already holds the Bobs in `receiver_side`. Negative values are ebits
/// gained.
pub fn merging_cost(table: &SubsetEntropyTable, mover: usize, receiver_side: u32) -> Result<f64> {
    let m = table.m();
    if mover == 0 || mover > m {
        return Err(Error::InvalidSubset(format!(
            "Bob {mover} does not exist (m = {m})"
        )));
    }
    let full = table.full_mask();
    if receiver_side & !full != 0 {
        return Err(Error::InvalidSubset(format!(
            "mask {receiver_side:#b} out of range"
        )));
    }
    let bit = 1u32 << (mover - 1);
    if receiver_side & bit != 0 {
        return Err(Error::InvalidSubset(format!(
            "Bob {mover} is already on Alice's side"
        )));
    }
    let outside = full & !receiver_side;
    // S(B | A R) = S(B A R) - S(A R), both rewritten over the remaining Bobs
    Ok(table.get(outside & !bit) - table.get(outside))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsaWitness {
    /// Base Bob mask `T`.
    pub base: u32,
    /// 1-based Bob indices outside `T`.
    pub i: usize,
    pub j: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsaReport {
    /// Smallest second difference found; `None` when there is nothing to check.
    pub worst: Option<f64>,
    pub witness: Option<SsaWitness>,
    pub violated: bool,
}

/// Exhaustive scan of `S(T+i) + S(T+j) - S(T) - S(T+i+j) >= 0`.
pub fn check_strong_subadditivity(table: &SubsetEntropyTable) -> SsaReport {
    let m = table.m();
    let mut worst: Option<(f64, SsaWitness)> = None;
    for base in 0..=table.full_mask() {
        for i in 0..m {
            if base & (1 << i) != 0 {
                continue;
            }
            for j in i + 1..m {
                if base & (1 << j) != 0 {
                    continue;
                }
                let (bi, bj) = (base | 1 << i, base | 1 << j);
                let diff = table.get(bi) + table.get(bj) - table.get(base) - table.get(bi | bj);
                if worst.is_none_or(|(w, _)| diff < w) {
                    worst = Some((
                        diff,
                        SsaWitness {
                            base,
                            i: i + 1,
                            j: j + 1,
                        },
                    ));
                }
            }
        }
    }
    SsaReport {
        worst: worst.map(|w| w.0),
        witness: worst.map(|w| w.1),
        violated: worst.is_some_and(|(w, _)| w < -SSA_TOL),
    }
}
