//! Independent oracles shared by the integration tests. Nothing here calls
//! into the region or ledger code paths it is used to check.

#![allow(dead_code)]

use combing::qstate::{haar_state, Complex64, PartyLayout, PureState};
use combing::SubsetEntropyTable;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar state on `m + 1` parties with local dimensions drawn from `2..=max_dim`.
pub fn random_state(rng: &mut ChaCha8Rng, m: usize, max_dim: usize) -> PureState {
    let dims = (0..=m).map(|_| rng.random_range(2..=max_dim)).collect();
    haar_state(PartyLayout::with_dims(dims).unwrap(), rng).unwrap()
}

/// Trace out one party (position `pos` in `dims`) of a density matrix.
pub fn trace_out(rho: &DMatrix<Complex64>, dims: &[usize], pos: usize) -> DMatrix<Complex64> {
    let outer: usize = dims[..pos].iter().product();
    let d = dims[pos];
    let inner: usize = dims[pos + 1..].iter().product();
    let n = outer * inner;
    DMatrix::from_fn(n, n, |r, c| {
        let (ro, ri) = (r / inner, r % inner);
        let (co, ci) = (c / inner, c % inner);
        (0..d)
            .map(|k| rho[((ro * d + k) * inner + ri, (co * d + k) * inner + ci)])
            .sum()
    })
}

/// Entropy from the eigenvalues of a Hermitian matrix, ebits.
pub fn entropy_of(rho: &DMatrix<Complex64>) -> f64 {
    rho.clone()
        .symmetric_eigenvalues()
        .iter()
        .filter(|&&l| l > 1e-14)
        .map(|&l| -l * l.log2())
        .sum()
}

/// All inequality rows `(a, b)` meaning `a·E <= b` describing `F` (with
/// `nonneg`) or `F′`, excluding the total, which is an equality.
pub fn h_rows(table: &SubsetEntropyTable, nonneg: bool) -> Vec<(Vec<f64>, f64)> {
    let m = table.m();
    let mut rows = Vec::new();
    for mask in 1..table.full_mask() {
        rows.push((
            (0..m)
                .map(|k| if mask & (1 << k) != 0 { 1.0 } else { 0.0 })
                .collect(),
            table.get(mask),
        ));
    }
    if nonneg {
        for k in 0..m {
            let mut a = vec![0.0; m];
            a[k] = -1.0;
            rows.push((a, 0.0));
        }
    }
    rows
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Brute-force vertex enumeration: every choice of `m - 1` tight inequality
/// rows plus the total equality, kept when nonsingular and feasible.
pub fn brute_force_vertices(table: &SubsetEntropyTable, nonneg: bool) -> Vec<Vec<f64>> {
    let m = table.m();
    let rows = h_rows(table, nonneg);
    let mut found: Vec<Vec<f64>> = Vec::new();
    for choice in combinations(rows.len(), m - 1) {
        let a = DMatrix::from_fn(
            m,
            m,
            |i, j| if i < m - 1 { rows[choice[i]].0[j] } else { 1.0 },
        );
        let b = DVector::from_fn(m, |i, _| {
            if i < m - 1 {
                rows[choice[i]].1
            } else {
                table.s_a()
            }
        });
        let Some(x) = a.lu().solve(&b) else { continue };
        if x.iter().any(|v| !v.is_finite()) {
            continue;
        }
        let feasible = rows
            .iter()
            .all(|(a, b)| a.iter().zip(x.iter()).map(|(p, q)| p * q).sum::<f64>() <= b + 1e-9);
        if feasible
            && !found
                .iter()
                .any(|f| f.iter().zip(x.iter()).all(|(p, q)| (p - q).abs() < 1e-7))
        {
            found.push(x.iter().copied().collect());
        }
    }
    found
}

pub fn same_point_sets(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
    let covers = |x: &[Vec<f64>], y: &[Vec<f64>]| {
        x.iter().all(|p| {
            y.iter()
                .any(|q| p.iter().zip(q).all(|(s, t)| (s - t).abs() <= tol))
        })
    };
    covers(a, b) && covers(b, a)
}

/// Area of the convex hull of planar points (they must be the hull's
/// vertices), by angular sort and the shoelace formula.
pub fn shoelace_area(points: &[[f64; 2]]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let cx = points.iter().map(|p| p[0]).sum::<f64>() / points.len() as f64;
    let cy = points.iter().map(|p| p[1]).sum::<f64>() / points.len() as f64;
    let mut pts = points.to_vec();
    pts.sort_by(|p, q| {
        (p[1] - cy)
            .atan2(p[0] - cx)
            .total_cmp(&(q[1] - cy).atan2(q[0] - cx))
    });
    let n = pts.len();
    (0..n)
        .map(|i| {
            let (p, q) = (pts[i], pts[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
        .abs()
        / 2.0
}
