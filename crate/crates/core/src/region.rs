//! The combing polytope.
//!
//! `F′` is the convex hull of the merging-order corner points; equivalently
//! the base polytope `{E : E(T) <= S(B_T) for all T, E(all) = S(A)}` of the
//! submodular function `T -> S(B_T)`. The combing region `F` is `F′`
//! intersected with the nonnegative orthant.
//!
//! Vertices of `F` come from the same greedy construction applied to the
//! monotone hull `f̃(T) = min_{U ⊇ T} S(B_U)`: for nonnegative `E`,
//! `E(T) <= S(B_U)` for every `U ⊇ T` is implied by the constraints on `U`,
//! so `F` is exactly the base polytope of the polymatroid `f̃`, whose
//! vertices are its greedy corners.

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy_table::{check_strong_subadditivity, SubsetEntropyTable, SSA_ABORT};
use crate::error::{Error, Result};
use crate::geometry::{affine_rank, polytope_volume, Halfspace, RANK_TOL};
use crate::lp::{LinearProgram, LpOutcome, Relation};

/// Membership tolerance.
pub const MEMBERSHIP_TOL: f64 = 1e-8;
/// Per-coordinate tolerance for merging duplicate vertices.
pub const DEDUP_TOL: f64 = 1e-9;
/// Largest Bob count for which all `m!` corners are enumerated.
pub const MAX_REGION_BOBS: usize = 8;

/// A distribution `(E_1, .., E_m)` of pairwise ebits; entry `k - 1` belongs
/// to the pair `(A_k, B_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntanglementVector(pub Vec<f64>);

impl EntanglementVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Sum over the Bobs in `mask`.
    pub fn subset_sum(&self, mask: u32) -> f64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(k, _)| mask & (1 << k) != 0)
            .map(|(_, v)| v)
            .sum()
    }
}

impl From<Vec<f64>> for EntanglementVector {
    fn from(v: Vec<f64>) -> Self {
        EntanglementVector(v)
    }
}

/// `Σ_{k ∈ subset} E_k <= bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsetBound {
    pub subset: u32,
    pub bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipMode {
    /// `F` itself: nonnegative, all subset bounds, total equal to `S(A)`.
    ExactRegion,
    /// Everything dominated by a point of `F`: the total may fall short.
    DownClosure,
}

/// First constraint a point fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    WrongLength { expected: usize, got: usize },
    NotFinite { bob: usize },
    Negative { bob: usize, value: f64 },
    Halfspace { subset: u32, lhs: f64, bound: f64 },
    SumBelowTotal { sum: f64, s_a: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub inside: bool,
    pub witness: Option<Violation>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombingRegion {
    m: usize,
    s_a: f64,
    vertices_fprime: Vec<EntanglementVector>,
    halfspaces: Vec<SubsetBound>,
    vertices_f: Vec<EntanglementVector>,
    tol: f64,
}

fn check_perm(perm: &[usize], m: usize) -> Result<Vec<usize>> {
    if perm.len() != m {
        return Err(Error::BadPermutation(format!(
            "expected {m} entries, got {}",
            perm.len()
        )));
    }
    let mut seen = vec![false; m];
    let mut zero_based = Vec::with_capacity(m);
    for &b in perm {
        if b == 0 || b > m || std::mem::replace(&mut seen[b - 1], true) {
            return Err(Error::BadPermutation(format!("{perm:?}")));
        }
        zero_based.push(b - 1);
    }
    Ok(zero_based)
}

/// Greedy corner of a set function: `E_{π(k)} = f(π(1..k)) - f(π(1..k-1))`.
fn greedy_corner(f: &[f64], perm: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; perm.len()];
    let mut prefix = 0u32;
    for &b in perm {
        let next = prefix | 1 << b;
        out[b] = f[next as usize] - f[prefix as usize];
        prefix = next;
    }
    out
}

/// Corner point for merging the Bobs in the order `perm` (1-based labels):
/// the first entry of `perm` is the Bob whose pair is settled first in the
/// telescoping sum.
pub fn corner_point(table: &SubsetEntropyTable, perm: &[usize]) -> Result<EntanglementVector> {
    let perm = check_perm(perm, table.m())?;
    Ok(EntanglementVector(greedy_corner(table.entries(), &perm)))
}

/// `f̃(T) = min over supersets U ⊇ T of S(B_U)`.
pub fn monotone_hull(table: &SubsetEntropyTable) -> Vec<f64> {
    let m = table.m();
    let mut hull = table.entries().to_vec();
    for mask in (0..table.full_mask()).rev() {
        for b in 0..m {
            if mask & (1 << b) == 0 {
                let sup = hull[(mask | 1 << b) as usize];
                if sup < hull[mask as usize] {
                    hull[mask as usize] = sup;
                }
            }
        }
    }
    hull
}

fn all_corners(f: &[f64], m: usize) -> Vec<Vec<f64>> {
    let perms: Vec<Vec<usize>> = (0..m).permutations(m).collect();
    perms.par_iter().map(|p| greedy_corner(f, p)).collect()
}

/// Remove points equal to an earlier one within `tol` per coordinate,
/// keeping first-occurrence order.
pub fn dedup_points(points: Vec<Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    if points.is_empty() {
        return points;
    }
    let key = |p: &Vec<f64>| p.first().copied().unwrap_or(0.0);
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| key(&points[a]).total_cmp(&key(&points[b])).then(a.cmp(&b)));
    // representatives in increasing first coordinate, each with its smallest original index
    let mut reps: Vec<(usize, usize)> = Vec::new();
    for &i in &order {
        let p = &points[i];
        let hit = reps
            .iter_mut()
            .rev()
            .take_while(|(r, _)| key(&points[*r]) >= key(p) - tol)
            .find(|(r, _)| points[*r].iter().zip(p).all(|(a, b)| (a - b).abs() <= tol));
        match hit {
            Some((_, first)) => *first = (*first).min(i),
            None => reps.push((i, i)),
        }
    }
    let mut kept: Vec<(usize, usize)> = reps;
    kept.sort_by_key(|&(_, first)| first);
    let mut points = points;
    kept.into_iter()
        .map(|(r, _)| std::mem::take(&mut points[r]))
        .collect()
}

/// Build `F′` and `F` from a validated entropy table.
pub fn build_region(table: &SubsetEntropyTable) -> Result<CombingRegion> {
    let m = table.m();
    if m > MAX_REGION_BOBS {
        return Err(Error::TooManyParties {
            m,
            limit: MAX_REGION_BOBS,
        });
    }
    let ssa = check_strong_subadditivity(table);
    if let (Some(worst), Some(w)) = (ssa.worst, ssa.witness) {
        if worst < -SSA_ABORT {
            return Err(Error::TableInvalid(format!(
                "strong subadditivity fails by {worst:e} at T = {:#b}, i = {}, j = {}",
                w.base, w.i, w.j
            )));
        }
    }
    let vertices_fprime = dedup_points(all_corners(table.entries(), m), DEDUP_TOL);
    let hull = monotone_hull(table);
    let vertices_f = dedup_points(all_corners(&hull, m), DEDUP_TOL)
        .into_iter()
        .map(|v| {
            v.into_iter()
                .map(|x| if x.abs() < DEDUP_TOL { 0.0 } else { x })
                .collect()
        })
        .collect::<Vec<Vec<f64>>>();
    let halfspaces = (1..=table.full_mask())
        .map(|subset| SubsetBound {
            subset,
            bound: table.get(subset),
        })
        .collect();
    Ok(CombingRegion {
        m,
        s_a: table.s_a(),
        vertices_fprime: vertices_fprime
            .into_iter()
            .map(EntanglementVector)
            .collect(),
        halfspaces,
        vertices_f: vertices_f.into_iter().map(EntanglementVector).collect(),
        tol: MEMBERSHIP_TOL,
    })
}

impl CombingRegion {
    /// Reassemble a region from stored parts, checking the vertex invariants.
    pub fn from_parts(
        s_a: f64,
        vertices_fprime: Vec<EntanglementVector>,
        halfspaces: Vec<SubsetBound>,
        vertices_f: Vec<EntanglementVector>,
    ) -> Result<Self> {
        let m = vertices_fprime
            .first()
            .map(|v| v.len())
            .ok_or_else(|| Error::Parse("region has no F′ vertices".into()))?;
        if m == 0 || m > MAX_REGION_BOBS {
            return Err(Error::TooManyParties {
                m,
                limit: MAX_REGION_BOBS,
            });
        }
        let full = (1u32 << m) - 1;
        if halfspaces.iter().any(|h| h.subset == 0 || h.subset > full) {
            return Err(Error::Parse("halfspace subset out of range".into()));
        }
        let region = CombingRegion {
            m,
            s_a,
            vertices_fprime,
            halfspaces,
            vertices_f,
            tol: MEMBERSHIP_TOL,
        };
        for v in &region.vertices_fprime {
            if v.len() != m || (v.total() - s_a).abs() > region.tol {
                return Err(Error::Parse(format!(
                    "F′ vertex {:?} off the hyperplane",
                    v.0
                )));
            }
        }
        if region.vertices_f.is_empty() {
            return Err(Error::Parse("region has no F vertices".into()));
        }
        for v in &region.vertices_f {
            if !region.contains(v, MembershipMode::ExactRegion).inside {
                return Err(Error::Parse(format!(
                    "F vertex {:?} violates the region",
                    v.0
                )));
            }
        }
        Ok(region)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn s_a(&self) -> f64 {
        self.s_a
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn vertices_fprime(&self) -> &[EntanglementVector] {
        &self.vertices_fprime
    }

    pub fn vertices_f(&self) -> &[EntanglementVector] {
        &self.vertices_f
    }

    pub fn halfspaces(&self) -> &[SubsetBound] {
        &self.halfspaces
    }

    /// Check a point against `F` or its down-closure. Constraints are tested
    /// in a fixed order (nonnegativity, subset bounds by mask, then the total)
    /// and the first failure is returned as the witness.
    pub fn contains(&self, point: &EntanglementVector, mode: MembershipMode) -> Membership {
        let fail = |v| Membership {
            inside: false,
            witness: Some(v),
        };
        if point.len() != self.m {
            return fail(Violation::WrongLength {
                expected: self.m,
                got: point.len(),
            });
        }
        for (k, &e) in point.values().iter().enumerate() {
            if !e.is_finite() {
                return fail(Violation::NotFinite { bob: k + 1 });
            }
            if e < -self.tol {
                return fail(Violation::Negative {
                    bob: k + 1,
                    value: e,
                });
            }
        }
        for h in &self.halfspaces {
            let lhs = point.subset_sum(h.subset);
            if lhs > h.bound + self.tol {
                return fail(Violation::Halfspace {
                    subset: h.subset,
                    lhs,
                    bound: h.bound,
                });
            }
        }
        let sum = point.total();
        if mode == MembershipMode::ExactRegion && sum < self.s_a - self.tol {
            return fail(Violation::SumBelowTotal { sum, s_a: self.s_a });
        }
        Membership {
            inside: true,
            witness: None,
        }
    }

    /// Dimension of the affine hull of the `F′` vertices.
    pub fn affine_dimension(&self) -> usize {
        let pts: Vec<Vec<f64>> = self.vertices_fprime.iter().map(|v| v.0.clone()).collect();
        affine_rank(&pts, RANK_TOL)
    }

    /// True when `F′` spans less than the generic `m - 1` dimensions.
    pub fn degenerate(&self) -> bool {
        self.affine_dimension() + 1 < self.m
    }

    /// Intrinsic `(m-1)`-volume of `F` inside the hyperplane `Σ E = S(A)`.
    ///
    /// Computed on the projection that drops `E_m`, then scaled by `√m`, the
    /// area factor between that projection and the hyperplane.
    pub fn volume(&self) -> f64 {
        let m = self.m;
        if m < 2 || self.degenerate() || self.vertices_f.len() < m {
            return 0.0;
        }
        let projected: Vec<Vec<f64>> = self
            .vertices_f
            .iter()
            .map(|v| v.0[..m - 1].to_vec())
            .collect();
        let last = m - 1;
        let mut halfspaces: Vec<Halfspace> = self
            .halfspaces
            .iter()
            .filter(|h| h.subset != (1 << m) - 1)
            .map(|h| {
                let a_last = if h.subset & (1 << last) != 0 {
                    1.0
                } else {
                    0.0
                };
                Halfspace {
                    normal: (0..last)
                        .map(|k| if h.subset & (1 << k) != 0 { 1.0 } else { 0.0 } - a_last)
                        .collect(),
                    offset: h.bound - a_last * self.s_a,
                }
            })
            .collect();
        for k in 0..last {
            let mut normal = vec![0.0; last];
            normal[k] = -1.0;
            halfspaces.push(Halfspace {
                normal,
                offset: 0.0,
            });
        }
        // E_m >= 0
        halfspaces.push(Halfspace {
            normal: vec![1.0; last],
            offset: self.s_a,
        });
        polytope_volume(&projected, &halfspaces) * (m as f64).sqrt()
    }
}

/// Convex weights expressing `point` over `vertices`, or `None` if the point
/// is not in their hull. The returned weights are a basic solution, so at
/// most `dim + 1` of them are nonzero.
pub fn hull_weights(
    vertices: &[EntanglementVector],
    point: &[f64],
    tol: f64,
) -> Result<Option<Vec<f64>>> {
    let Some(dim) = vertices.first().map(|v| v.len()) else {
        return Ok(None);
    };
    if point.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: point.len(),
        });
    }
    let mut lp = LinearProgram::new(vertices.len()).feasibility_tol(tol);
    for (k, &p) in point.iter().enumerate() {
        lp.add(vertices.iter().map(|v| v.0[k]).collect(), Relation::Eq, p);
    }
    lp.add(vec![1.0; vertices.len()], Relation::Eq, 1.0);
    match lp.solve()? {
        LpOutcome::Optimal { x, .. } => Ok(Some(x)),
        LpOutcome::Infeasible { .. } => Ok(None),
        LpOutcome::Unbounded => Err(Error::Lp("feasibility problem reported unbounded".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy_table::build_table;
    use crate::qstate::{pair_network, standard_state, StateKind};
    use approx::assert_abs_diff_eq;

    fn region_of(state: &crate::qstate::PureState) -> CombingRegion {
        build_region(&build_table(state).unwrap()).unwrap()
    }

    fn ghz(m: usize) -> CombingRegion {
        region_of(&standard_state(StateKind::Ghz, m, 2, None).unwrap())
    }

    fn assert_points(actual: &[EntanglementVector], expected: &[&[f64]], tol: f64) {
        assert_eq!(actual.len(), expected.len(), "{actual:?}");
        for e in expected {
            assert!(
                actual
                    .iter()
                    .any(|a| a.0.iter().zip(*e).all(|(x, y)| (x - y).abs() <= tol)),
                "missing {e:?} in {actual:?}"
            );
        }
    }

    #[test]
    fn ghz_corners() {
        let t = build_table(&standard_state(StateKind::Ghz, 2, 2, None).unwrap()).unwrap();
        let c12 = corner_point(&t, &[1, 2]).unwrap();
        let c21 = corner_point(&t, &[2, 1]).unwrap();
        assert_abs_diff_eq!(c12.0[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c12.0[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c21.0[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c21.0[1], 1.0, epsilon = 1e-12);
        assert!(corner_point(&t, &[1, 1]).is_err());
        assert!(corner_point(&t, &[1]).is_err());
        assert!(corner_point(&t, &[0, 1]).is_err());
    }

    #[test]
    fn borrowing_corner_and_positive_part() {
        // EPR(B1,B2) ⊗ EPR(A,B3)
        let s = pair_network(4, &[(1, 2), (0, 3)], 2).unwrap();
        let t = build_table(&s).unwrap();
        let c = corner_point(&t, &[1, 2, 3]).unwrap();
        for (x, y) in c.0.iter().zip([1.0, -1.0, 1.0]) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-12);
        }
        let r = build_region(&t).unwrap();
        assert!(r.vertices_fprime().iter().any(|v| v
            .0
            .iter()
            .zip([1.0, -1.0, 1.0])
            .all(|(a, b)| (a - b).abs() < 1e-9)));
        assert_points(r.vertices_f(), &[&[0.0, 0.0, 1.0]], 1e-8);
    }

    #[test]
    fn ghz_regions() {
        let r = ghz(2);
        assert_points(r.vertices_fprime(), &[&[1.0, 0.0], &[0.0, 1.0]], 1e-12);
        assert_points(r.vertices_f(), &[&[1.0, 0.0], &[0.0, 1.0]], 1e-12);
        assert_eq!(r.vertices_fprime()[0].0, vec![1.0, 0.0]);
        let r = ghz(3);
        assert_points(
            r.vertices_f(),
            &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]],
            1e-12,
        );
    }

    #[test]
    fn membership() {
        let r = ghz(2);
        let exact = MembershipMode::ExactRegion;
        assert!(r.contains(&vec![0.5, 0.5].into(), exact).inside);
        let m = r.contains(&vec![1.0, 0.1].into(), exact);
        assert!(!m.inside);
        match m.witness.unwrap() {
            Violation::Halfspace { subset, lhs, bound } => {
                assert_eq!(subset, 0b11);
                assert_abs_diff_eq!(lhs, 1.1, epsilon = 1e-12);
                assert_abs_diff_eq!(bound, 1.0, epsilon = 1e-12);
            }
            other => panic!("{other:?}"),
        }
        for mode in [exact, MembershipMode::DownClosure] {
            let m = r.contains(&vec![-0.1, 1.1].into(), mode);
            assert!(!m.inside);
            assert!(matches!(
                m.witness,
                Some(Violation::Negative { bob: 1, .. })
            ));
        }
        let m = r.contains(&vec![0.2, 0.2].into(), exact);
        assert!(matches!(m.witness, Some(Violation::SumBelowTotal { .. })));
        assert!(
            r.contains(&vec![0.2, 0.2].into(), MembershipMode::DownClosure)
                .inside
        );
        assert!(matches!(
            r.contains(&vec![0.2].into(), exact).witness,
            Some(Violation::WrongLength { .. })
        ));
    }

    #[test]
    fn dimensions_and_volumes() {
        let r = ghz(2);
        assert_eq!(r.affine_dimension(), 1);
        assert!(!r.degenerate());
        assert_abs_diff_eq!(r.volume(), 2f64.sqrt(), epsilon = 1e-12);

        let r = ghz(3);
        assert_eq!(r.affine_dimension(), 2);
        assert_abs_diff_eq!(r.volume(), 3f64.sqrt() / 2.0, epsilon = 1e-12);

        let r = ghz(4);
        // regular tetrahedron with side √2
        assert_abs_diff_eq!(r.volume(), 1.0 / 3.0, epsilon = 1e-12);

        let pairs = region_of(&standard_state(StateKind::ProductPairs, 2, 2, None).unwrap());
        assert_eq!(pairs.affine_dimension(), 0);
        assert!(pairs.degenerate());
        assert_eq!(pairs.volume(), 0.0);
        assert_points(pairs.vertices_f(), &[&[1.0, 1.0]], 1e-12);

        let bell = ghz(1);
        assert_eq!(bell.affine_dimension(), 0);
        assert!(!bell.degenerate());
        assert_eq!(bell.volume(), 0.0);
        assert_points(bell.vertices_f(), &[&[1.0]], 1e-12);
    }

    #[test]
    fn monotone_hull_values() {
        let s = pair_network(4, &[(1, 2), (0, 3)], 2).unwrap();
        let t = build_table(&s).unwrap();
        let h = monotone_hull(&t);
        assert_eq!(h.len(), 8);
        for (mask, want) in [
            (0b001, 0.0),
            (0b010, 0.0),
            (0b100, 1.0),
            (0b011, 0.0),
            (0b101, 1.0),
            (0b111, 1.0),
        ] {
            assert_abs_diff_eq!(h[mask], want, epsilon = 1e-12);
        }
    }

    #[test]
    fn dedup_keeps_first_occurrence() {
        let pts = vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0 + 5e-10, 0.0],
            vec![0.0, 1.0 - 5e-10],
            vec![0.5, 0.5],
        ];
        let d = dedup_points(pts, DEDUP_TOL);
        assert_eq!(d, vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]]);
    }

    #[test]
    fn rejects_invalid_tables() {
        let t = SubsetEntropyTable::from_entries(2, vec![0.0, 0.1, 0.1, 1.0]).unwrap();
        assert!(matches!(build_region(&t), Err(Error::TableInvalid(_))));
    }

    #[test]
    fn hull_weights_basic() {
        let r = ghz(3);
        let w = hull_weights(r.vertices_fprime(), &[1.0 / 3.0; 3], 1e-9)
            .unwrap()
            .unwrap();
        for x in w {
            assert_abs_diff_eq!(x, 1.0 / 3.0, epsilon = 1e-12);
        }
        assert!(hull_weights(r.vertices_fprime(), &[1.0, 1.0, -1.0], 1e-9)
            .unwrap()
            .is_none());
    }
}
