//! Queries built on top of combing regions: LOCC rate lower bounds, overlap
//! with an externally supplied rate region, and the volume measure.

use serde::{Deserialize, Serialize};

use crate::entropy_table::{build_table, SubsetEntropyTable};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::qstate::PureState;
use crate::region::{build_region, CombingRegion, EntanglementVector};

/// Marginal entropies at or below this are treated as zero.
const ZERO_ENTROPY: f64 = 1e-12;
/// Allowed disagreement between the min-ratio formula and the LP.
pub const RATE_CROSSCHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateBound {
    /// Copies of the target obtainable per copy of the source.
    pub r: f64,
    /// Party acting as Alice.
    pub alice_choice: usize,
    /// Bob mask (relative to the chosen Alice) attaining the minimum ratio.
    pub binding_subset: u32,
}

/// Single-Bob entropies `S(ψ_{B_k})`, `k = 1..m`, with party 0 as Alice.
pub fn bob_marginals(state: &PureState) -> Result<Vec<f64>> {
    (1..state.layout().parties())
        .map(|p| state.subset_entropy(1 << p))
        .collect()
}

/// `min_T S(B_T) / s(T)` over Bob subsets with `s(T) > 0`, with the
/// lowest mask winning ties.
pub fn min_ratio_rate(table: &SubsetEntropyTable, marginals: &[f64]) -> Result<(f64, u32)> {
    if marginals.len() != table.m() {
        return Err(Error::PartyMismatch(format!(
            "{} marginals for {} Bobs",
            marginals.len(),
            table.m()
        )));
    }
    let mut best: Option<(f64, u32)> = None;
    for mask in 1..=table.full_mask() {
        let s: f64 = marginals
            .iter()
            .enumerate()
            .filter(|(k, _)| mask & (1 << k) != 0)
            .map(|(_, v)| v)
            .sum();
        if s <= ZERO_ENTROPY {
            continue;
        }
        let ratio = table.get(mask) / s;
        if best.is_none_or(|(b, _)| ratio < b - 1e-12 * b.max(1.0)) {
            best = Some((ratio, mask));
        }
    }
    best.ok_or(Error::ZeroTarget)
}

/// Largest `r` with `r · marginals` dominated by a convex combination of
/// the vertices of `F`, by linear programming over the vertex set.
pub fn rate_by_lp(region: &CombingRegion, marginals: &[f64]) -> Result<f64> {
    let verts = region.vertices_f();
    let n = verts.len() + 1;
    let mut objective = vec![0.0; n];
    objective[0] = 1.0;
    let mut lp = LinearProgram::new(n).maximize(objective);
    for (k, &s) in marginals.iter().enumerate() {
        let mut row = vec![s];
        row.extend(verts.iter().map(|v| -v.values()[k]));
        lp.add(row, Relation::Le, 0.0);
    }
    let mut simplex = vec![0.0];
    simplex.extend(std::iter::repeat_n(1.0, verts.len()));
    lp.add(simplex, Relation::Eq, 1.0);
    match lp.solve()? {
        LpOutcome::Optimal { value, .. } => Ok(value),
        LpOutcome::Unbounded => Err(Error::ZeroTarget),
        LpOutcome::Infeasible { .. } => Err(Error::Lp("rate problem infeasible".into())),
    }
}

/// Lower bound on the rate of `source → target` under LOCC obtained by
/// combing `source` at party `alice` and rebuilding `target` from the pairs.
pub fn rate_lower_bound(source: &PureState, target: &PureState, alice: usize) -> Result<RateBound> {
    let parties = source.layout().parties();
    if target.layout().parties() != parties {
        return Err(Error::PartyMismatch(format!(
            "source has {parties} parties, target has {}",
            target.layout().parties()
        )));
    }
    let source = source.with_alice(alice)?;
    let target = target.with_alice(alice)?;
    let table = build_table(&source)?;
    let marginals = bob_marginals(&target)?;
    let (r, binding_subset) = min_ratio_rate(&table, &marginals)?;
    let lp_r = rate_by_lp(&build_region(&table)?, &marginals)?;
    if (lp_r - r).abs() > RATE_CROSSCHECK_TOL {
        return Err(Error::Lp(format!(
            "min-ratio rate {r} disagrees with LP rate {lp_r}"
        )));
    }
    Ok(RateBound {
        r,
        alice_choice: alice,
        binding_subset,
    })
}

/// Best `rate_lower_bound` over every choice of the distinguished party.
/// Choices for which the target is unentangled are skipped; ties go to the
/// lowest party index.
pub fn best_rate_over_parties(source: &PureState, target: &PureState) -> Result<RateBound> {
    let mut best: Option<RateBound> = None;
    for alice in 0..source.layout().parties() {
        match rate_lower_bound(source, target, alice) {
            Ok(b) => {
                if best.as_ref().is_none_or(|cur| b.r > cur.r + 1e-12) {
                    best = Some(b);
                }
            }
            Err(Error::ZeroTarget) => continue,
            Err(e) => return Err(e),
        }
    }
    best.ok_or(Error::ZeroTarget)
}

/// External rate constraint `Σ coeffs[k] · E_k >= lower_bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub coeffs: Vec<f64>,
    pub lower_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Overlap {
    pub feasible: bool,
    pub witness: Option<EntanglementVector>,
    /// Largest uniform slack achievable on the constraints.
    pub margin: Option<f64>,
}

/// Does `F` meet the region cut out by `constraints`? The witness maximizes
/// the smallest constraint slack, which picks a central point when the
/// overlap has interior.
pub fn region_overlap(region: &CombingRegion, constraints: &[LinearConstraint]) -> Result<Overlap> {
    let m = region.m();
    if let Some(c) = constraints.iter().find(|c| c.coeffs.len() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: c.coeffs.len(),
        });
    }
    if constraints.is_empty() {
        return Ok(Overlap {
            feasible: true,
            witness: region.vertices_f().first().cloned(),
            margin: None,
        });
    }
    // variables: E_1..E_m, t+, t-
    let n = m + 2;
    let mut objective = vec![0.0; n];
    objective[m] = 1.0;
    objective[m + 1] = -1.0;
    let mut lp = LinearProgram::new(n).maximize(objective);
    let embed = |mask: u32| -> Vec<f64> {
        (0..n)
            .map(|k| {
                if k < m && mask & (1 << k) != 0 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect()
    };
    for h in region.halfspaces() {
        lp.add(embed(h.subset), Relation::Le, h.bound);
    }
    lp.add(embed((1 << m) - 1), Relation::Eq, region.s_a());
    for c in constraints {
        let mut row = c.coeffs.clone();
        row.push(-1.0);
        row.push(1.0);
        lp.add(row, Relation::Ge, c.lower_bound);
    }
    match lp.solve()? {
        LpOutcome::Optimal { x, value } => {
            let feasible = value >= -region.tol();
            Ok(Overlap {
                feasible,
                witness: feasible.then(|| EntanglementVector(x[..m].to_vec())),
                margin: Some(value),
            })
        }
        LpOutcome::Infeasible { .. } => Err(Error::Lp("combing region LP infeasible".into())),
        LpOutcome::Unbounded => Err(Error::Lp("overlap margin unbounded".into())),
    }
}

/// Volume of the combing region with `alice` as the distinguished party.
pub fn multipartite_volume_measure(state: &PureState, alice: usize) -> Result<f64> {
    let state = state.with_alice(alice)?;
    Ok(build_region(&build_table(&state)?)?.volume())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{
        make_state, pair_network, product_state, standard_state, Complex64, PartyLayout, StateKind,
    };
    use approx::assert_abs_diff_eq;

    fn ghz(m: usize) -> PureState {
        standard_state(StateKind::Ghz, m, 2, None).unwrap()
    }

    /// Bell(A,B1) ⊗ |0⟩_B2
    fn bell_plus_zero() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        amps[0] = Complex64::new(h, 0.0);
        amps[0b110] = Complex64::new(h, 0.0);
        make_state(PartyLayout::with_dims(vec![2, 2, 2]).unwrap(), amps, false).unwrap()
    }

    #[test]
    fn ghz_to_ghz() {
        let b = rate_lower_bound(&ghz(2), &ghz(2), 0).unwrap();
        assert_abs_diff_eq!(b.r, 0.5, epsilon = 1e-12);
        assert_eq!(b.binding_subset, 0b11);
        let best = best_rate_over_parties(&ghz(2), &ghz(2)).unwrap();
        assert_abs_diff_eq!(best.r, 0.5, epsilon = 1e-12);
        assert_eq!(best.alice_choice, 0);
    }

    #[test]
    fn ghz_to_bell() {
        let b = rate_lower_bound(&ghz(2), &bell_plus_zero(), 0).unwrap();
        assert_abs_diff_eq!(b.r, 1.0, epsilon = 1e-12);
        assert_eq!(b.binding_subset, 0b01);
    }

    #[test]
    fn identity_and_errors() {
        let bell = ghz(1);
        assert_abs_diff_eq!(
            rate_lower_bound(&bell, &bell, 0).unwrap().r,
            1.0,
            epsilon = 1e-12
        );
        let prod = product_state(PartyLayout::with_dims(vec![2, 2, 2]).unwrap()).unwrap();
        assert_eq!(rate_lower_bound(&ghz(2), &prod, 0), Err(Error::ZeroTarget));
        assert_eq!(
            best_rate_over_parties(&ghz(2), &prod),
            Err(Error::ZeroTarget)
        );
        assert!(matches!(
            rate_lower_bound(&ghz(2), &ghz(3), 0),
            Err(Error::PartyMismatch(_))
        ));
        assert_eq!(rate_lower_bound(&prod, &ghz(2), 0).unwrap().r, 0.0);
    }

    #[test]
    fn split_pairs_rate_is_zero() {
        // EPR(A,B1) ⊗ EPR(B2,B3): B2B3 is pure, so every Alice choice sees a
        // zero-entropy subset with positive target demand
        let s = pair_network(4, &[(0, 1), (2, 3)], 2).unwrap();
        let b = best_rate_over_parties(&s, &s).unwrap();
        assert_eq!(b.alice_choice, 0);
        assert_abs_diff_eq!(b.r, 0.0, epsilon = 1e-12);
        assert_eq!(b.binding_subset, 0b110);
    }

    #[test]
    fn doubling_target_halves_rate() {
        // GHZ ⊗ GHZ as a 4x4x4 state
        let g = ghz(2);
        let mut amps = vec![Complex64::new(0.0, 0.0); 64];
        for (i, a) in g.amplitudes().iter().enumerate() {
            for (j, b) in g.amplitudes().iter().enumerate() {
                let (ai, bi, ci) = (i >> 2 & 1, i >> 1 & 1, i & 1);
                let (aj, bj, cj) = (j >> 2 & 1, j >> 1 & 1, j & 1);
                let idx = (ai * 2 + aj) * 16 + (bi * 2 + bj) * 4 + (ci * 2 + cj);
                amps[idx] = a * b;
            }
        }
        let doubled =
            make_state(PartyLayout::with_dims(vec![4, 4, 4]).unwrap(), amps, false).unwrap();
        let r1 = rate_lower_bound(&ghz(2), &ghz(2), 0).unwrap().r;
        let r2 = rate_lower_bound(&ghz(2), &doubled, 0).unwrap().r;
        assert_abs_diff_eq!(r2, r1 / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn overlap_queries() {
        let region = build_region(&build_table(&ghz(2)).unwrap()).unwrap();
        let c = |coeffs: Vec<f64>, lower_bound| LinearConstraint {
            coeffs,
            lower_bound,
        };
        let o = region_overlap(&region, &[c(vec![1.0, 0.0], 0.4), c(vec![0.0, 1.0], 0.4)]).unwrap();
        assert!(o.feasible);
        let w = o.witness.unwrap();
        assert_abs_diff_eq!(w.values()[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(w.values()[1], 0.5, epsilon = 1e-12);

        let o = region_overlap(&region, &[c(vec![1.0, 0.0], 2.0)]).unwrap();
        assert!(!o.feasible);
        assert!(o.witness.is_none());

        let o = region_overlap(&region, &[]).unwrap();
        assert!(o.feasible);
        assert_eq!(o.witness.as_ref(), region.vertices_f().first());

        assert!(region_overlap(&region, &[c(vec![1.0], 0.0)]).is_err());
    }

    #[test]
    fn volume_measure() {
        assert_abs_diff_eq!(
            multipartite_volume_measure(&ghz(2), 0).unwrap(),
            2f64.sqrt(),
            epsilon = 1e-12
        );
        let pairs = pair_network(3, &[(0, 1), (0, 2)], 2).unwrap();
        assert_eq!(multipartite_volume_measure(&pairs, 0).unwrap(), 0.0);
        let prod = product_state(PartyLayout::with_dims(vec![2, 2, 2]).unwrap()).unwrap();
        assert_eq!(multipartite_volume_measure(&prod, 0).unwrap(), 0.0);
    }
}
