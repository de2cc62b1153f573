//! Entropic bookkeeping for the two combing protocols: the step-by-step
//! greedy comb (merge when Alice's side can absorb the Bob, otherwise let
//! the Bob measure and decouple), and the round-based breeding schedule that
//! repays borrowed ebits by amplification.

use serde::{Deserialize, Serialize};

use crate::entropy_table::SubsetEntropyTable;
use crate::error::{Error, Result};
use crate::region::{hull_weights, CombingRegion, EntanglementVector, MembershipMode};

/// Conservation tolerance for the comb trace.
pub const CONSERVATION_TOL: f64 = 1e-9;
/// Weights at or below this are dropped from a decomposition.
pub const WEIGHT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// State merging of the Bob into Alice's side; yields ebits.
    #[serde(rename = "T1_merge")]
    T1Merge,
    /// Assisting measurement by the Bob; decouples it without gain.
    #[serde(rename = "T2_assist")]
    T2Assist,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombStep {
    /// 1-based Bob index.
    pub bob: usize,
    pub branch: Branch,
    pub gain: f64,
    pub a_side_entropy_after: f64,
    /// Set once an earlier assist step has fired: from then on the remaining
    /// Bobs' entropies are taken from the original table, which is a model.
    pub approximate: bool,
}

/// Process the Bobs in `order` (1-based). At each step Alice's side either
/// merges the Bob (when its entropy is at least that of the Bobs left after
/// removal, gaining the difference as ebits with that Bob) or the Bob
/// assists and decouples.
///
/// When every step merges, the result equals `corner_point` of the reversed
/// order.
pub fn greedy_comb(
    table: &SubsetEntropyTable,
    order: &[usize],
) -> Result<(EntanglementVector, Vec<CombStep>)> {
    let m = table.m();
    if order.len() != m {
        return Err(Error::BadPermutation(format!(
            "expected {m} entries, got {}",
            order.len()
        )));
    }
    let mut seen = 0u32;
    for &b in order {
        if b == 0 || b > m || seen & (1 << (b - 1)) != 0 {
            return Err(Error::BadPermutation(format!("{order:?}")));
        }
        seen |= 1 << (b - 1);
    }

    let mut remaining = table.full_mask();
    let mut a_side = table.s_a();
    let mut assisted = false;
    let mut values = vec![0.0; m];
    let mut steps = Vec::with_capacity(m);
    for &b in order {
        let rest = remaining & !(1 << (b - 1));
        let rest_entropy = table.get(rest);
        let approximate = assisted;
        let (branch, gain) = if a_side >= rest_entropy {
            let gain = a_side - rest_entropy;
            a_side = rest_entropy;
            (Branch::T1Merge, gain)
        } else {
            assisted = true;
            (Branch::T2Assist, 0.0)
        };
        values[b - 1] = gain;
        remaining = rest;
        steps.push(CombStep {
            bob: b,
            branch,
            gain,
            a_side_entropy_after: a_side,
            approximate,
        });
    }
    Ok((EntanglementVector(values), steps))
}

/// `target = Σ weights[i] · vertices[i]` with at most `m + 1` terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaratheodoryDecomposition {
    pub vertices: Vec<EntanglementVector>,
    pub weights: Vec<f64>,
}

impl CaratheodoryDecomposition {
    /// Assemble a decomposition directly, e.g. for synthetic schedules.
    pub fn new(vertices: Vec<EntanglementVector>, weights: Vec<f64>) -> Result<Self> {
        if vertices.is_empty() || vertices.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: vertices.len(),
                got: weights.len(),
            });
        }
        let m = vertices[0].len();
        if vertices.iter().any(|v| v.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: vertices
                    .iter()
                    .map(|v| v.len())
                    .find(|&l| l != m)
                    .unwrap_or(m),
            });
        }
        if weights.iter().any(|&w| w.is_nan() || w < 0.0)
            || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(Error::InvalidSubset(
                "weights must be nonnegative and sum to 1".into(),
            ));
        }
        Ok(CaratheodoryDecomposition { vertices, weights })
    }

    pub fn point(&self) -> EntanglementVector {
        let m = self.vertices[0].len();
        let mut out = vec![0.0; m];
        for (v, w) in self.vertices.iter().zip(&self.weights) {
            for (o, x) in out.iter_mut().zip(v.values()) {
                *o += w * x;
            }
        }
        EntanglementVector(out)
    }

    /// Borrowed ebits per party per unit `n`: `Σ_i w_i · max(-V_i[j], 0)`.
    pub fn borrowed(&self) -> Vec<f64> {
        self.weighted_parts(|x| (-x).max(0.0))
    }

    /// Produced ebits per party per unit `n`: `Σ_i w_i · max(V_i[j], 0)`.
    pub fn produced(&self) -> Vec<f64> {
        self.weighted_parts(|x| x.max(0.0))
    }

    fn weighted_parts(&self, part: impl Fn(f64) -> f64) -> Vec<f64> {
        let m = self.vertices[0].len();
        let mut out = vec![0.0; m];
        for (v, w) in self.vertices.iter().zip(&self.weights) {
            for (o, &x) in out.iter_mut().zip(v.values()) {
                *o += w * part(x);
            }
        }
        out
    }
}

/// Write a point of `F` as a convex combination of at most `m + 1` vertices
/// of `F′`.
pub fn caratheodory_decompose(
    region: &CombingRegion,
    target: &EntanglementVector,
) -> Result<CaratheodoryDecomposition> {
    let membership = region.contains(target, MembershipMode::ExactRegion);
    if !membership.inside {
        return Err(Error::PointOutsideRegion(format!(
            "{:?}",
            membership.witness
        )));
    }
    let weights = hull_weights(region.vertices_fprime(), target.values(), region.tol())?
        .ok_or_else(|| Error::PointOutsideRegion("not in the hull of the corner points".into()))?;
    let (vertices, weights): (Vec<_>, Vec<_>) = region
        .vertices_fprime()
        .iter()
        .zip(weights)
        .filter(|(_, w)| *w > WEIGHT_EPS)
        .map(|(v, w)| (v.clone(), w))
        .unzip();
    let total: f64 = weights.iter().sum();
    let weights = weights.into_iter().map(|w| w / total).collect();
    Ok(CaratheodoryDecomposition { vertices, weights })
}

/// Copies consumed over rounds `0..=r` per unit `n`, including the `n0`
/// spent on the initial assist: `n0 + (x^{r+1} - 1)/(x - 1)`.
pub fn total_consumed(n0: f64, x: f64, rounds: u32) -> f64 {
    if x == 1.0 {
        return n0 + (rounds + 1) as f64;
    }
    n0 + (x.powi(rounds as i32 + 1) - 1.0) / (x - 1.0)
}

/// Same quantity by explicit summation of the rounds.
pub fn total_consumed_by_rounds(n0: f64, x: f64, rounds: u32) -> f64 {
    n0 + (0..=rounds).map(|i| x.powi(i as i32)).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRow {
    pub round: u32,
    /// Copies of the state consumed in this round.
    pub consumed: f64,
    /// Ebits borrowed per party in this round.
    pub borrowed: Vec<f64>,
    /// Ebits produced per party in this round.
    pub produced: Vec<f64>,
    pub total_consumed: f64,
    pub borrowed_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerReport {
    pub n0: f64,
    pub rounds: u32,
    /// `n_j` per unit `n`.
    pub borrowed: Vec<f64>,
    /// `k_j` per unit `n`.
    pub produced: Vec<f64>,
    /// `x_j = k_j / n_j`, absent for parties that borrow nothing.
    pub ratios: Vec<Option<f64>>,
    /// Amplification ratio: the smallest `x_j`.
    pub x: f64,
    /// When set, row quantities are `⌊block · value⌋` for this block size.
    pub integer_block: Option<u64>,
    pub rows: Vec<RoundRow>,
}

impl LedgerReport {
    pub fn total_consumed(&self, round: u32) -> f64 {
        total_consumed(self.n0, self.x, round)
    }

    pub fn borrowed_weight(&self, round: u32) -> f64 {
        self.n0 / self.total_consumed(round)
    }
}

/// Round-by-round schedule for repaying the borrowed ebits of a
/// decomposition. Fails with `ZeroBorrow` when no vertex has a negative
/// entry and with `NotAmplifying` when some borrowing party produces no
/// more than it borrows.
pub fn breeding_schedule(
    decomp: &CaratheodoryDecomposition,
    n0: f64,
    rounds: u32,
    integer_block: Option<u64>,
) -> Result<LedgerReport> {
    if !n0.is_finite() || n0 <= 0.0 {
        return Err(Error::InvalidSubset(format!(
            "n0 must be positive, got {n0}"
        )));
    }
    let borrowed = decomp.borrowed();
    let produced = decomp.produced();
    let ratios: Vec<Option<f64>> = borrowed
        .iter()
        .zip(&produced)
        .map(|(&n, &k)| (n > WEIGHT_EPS).then(|| k / n))
        .collect();
    let x = ratios
        .iter()
        .flatten()
        .copied()
        .reduce(f64::min)
        .ok_or(Error::ZeroBorrow)?;
    if x.is_nan() || x <= 1.0 {
        return Err(Error::NotAmplifying { x });
    }
    let scale = |v: f64| match integer_block {
        Some(n) => (n as f64 * v).floor(),
        None => v,
    };
    let rows = (0..=rounds)
        .map(|round| {
            let factor = x.powi(round as i32);
            let total = total_consumed(n0, x, round);
            RoundRow {
                round,
                consumed: scale(factor),
                borrowed: borrowed.iter().map(|&n| scale(n * factor)).collect(),
                produced: produced.iter().map(|&k| scale(k * factor)).collect(),
                total_consumed: total,
                borrowed_weight: n0 / total,
            }
        })
        .collect();
    Ok(LedgerReport {
        n0,
        rounds,
        borrowed,
        produced,
        ratios,
        x,
        integer_block,
        rows,
    })
}
