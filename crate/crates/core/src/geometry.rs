//! Affine rank and convex polytope volume for small point sets.

use std::collections::{BTreeSet, HashMap};

use nalgebra::{DMatrix, DVector};

/// Singular values at or below this count as zero.
pub const RANK_TOL: f64 = 1e-8;

/// Orthonormal basis (as columns) of the span of `p - points[0]`.
fn direction_basis(points: &[&[f64]], tol: f64) -> DMatrix<f64> {
    let dim = points.first().map_or(0, |p| p.len());
    if points.len() < 2 || dim == 0 {
        return DMatrix::zeros(dim, 0);
    }
    let diffs = DMatrix::from_fn(dim, points.len() - 1, |i, j| {
        points[j + 1][i] - points[0][i]
    });
    let svd = diffs.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > tol)
        .map(|(k, _)| u.column(k).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(dim, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Dimension of the affine hull of `points`.
pub fn affine_rank(points: &[Vec<f64>], tol: f64) -> usize {
    let refs: Vec<&[f64]> = points.iter().map(|p| p.as_slice()).collect();
    direction_basis(&refs, tol).ncols()
}

/// A halfspace `normal · y <= offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// Volume of `conv(points)` in its ambient space `R^d`, where `d` is the
/// length of each point. The halfspaces must describe the polytope (every
/// facet must be among them; redundant entries are fine). Returns 0 when the
/// hull is lower dimensional.
///
/// Uses the cone decomposition `vol(P) = Σ_F h_F vol(F) / d` around the
/// vertex centroid, recursing into facets.
pub fn polytope_volume(points: &[Vec<f64>], halfspaces: &[Halfspace]) -> f64 {
    let Some(d) = points.first().map(|p| p.len()) else {
        return 0.0;
    };
    if affine_rank(points, RANK_TOL) < d {
        return 0.0;
    }
    let mut solver = VolumeSolver {
        points,
        halfspaces,
        memo: HashMap::new(),
    };
    let all: Vec<usize> = (0..points.len()).collect();
    solver.face_volume(&all, d)
}

struct VolumeSolver<'a> {
    points: &'a [Vec<f64>],
    halfspaces: &'a [Halfspace],
    memo: HashMap<Vec<usize>, f64>,
}

impl VolumeSolver<'_> {
    fn face_volume(&mut self, face: &[usize], dim: usize) -> f64 {
        if dim == 0 {
            return 1.0;
        }
        if let Some(&v) = self.memo.get(face) {
            return v;
        }
        let ambient = self.points[0].len();
        let mut centroid = vec![0.0; ambient];
        for &i in face {
            for (c, x) in centroid.iter_mut().zip(&self.points[i]) {
                *c += x;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= face.len() as f64);

        let mut facets: BTreeSet<Vec<usize>> = BTreeSet::new();
        for h in self.halfspaces {
            let tol = 1e-9 * (1.0 + h.offset.abs());
            let tight: Vec<usize> = face
                .iter()
                .copied()
                .filter(|&i| (dot(&h.normal, &self.points[i]) - h.offset).abs() <= tol)
                .collect();
            if tight.len() >= dim && tight.len() < face.len() {
                facets.insert(tight);
            }
        }

        let mut volume = 0.0;
        for facet in facets {
            let refs: Vec<&[f64]> = facet.iter().map(|&i| self.points[i].as_slice()).collect();
            let basis = direction_basis(&refs, RANK_TOL);
            if basis.ncols() != dim - 1 {
                continue;
            }
            let offset = DVector::from_fn(ambient, |k, _| centroid[k] - refs[0][k]);
            let along = &basis * (basis.transpose() * &offset);
            let height = (offset - along).norm();
            volume += height * self.face_volume(&facet, dim - 1) / dim as f64;
        }
        self.memo.insert(face.to_vec(), volume);
        volume
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
