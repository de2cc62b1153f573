//! Multipartite pure states, reduced density matrices and von Neumann
//! entropies.
//!
//! Amplitudes are stored row-major in party order with party 0 (Alice) as
//! the slowest index. Subsets of parties are bitmasks with bit `p` set for
//! party `p`.

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;

/// Largest accepted product of local dimensions.
pub const MAX_TOTAL_DIM: usize = 1 << 16;

/// Tolerance on the squared norm of a state.
pub const NORM_TOL: f64 = 1e-10;
/// Negative eigenvalues above this are roundoff and get clipped to zero.
pub const EIGEN_CLIP: f64 = 1e-10;
/// Beyond this a matrix is rejected as a density matrix.
pub const DENSITY_FAIL_TOL: f64 = 1e-8;

const MAX_PARTIES: usize = 31;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartyLayout {
    names: Vec<String>,
    dims: Vec<usize>,
}

impl PartyLayout {
    pub fn new(names: Vec<String>, dims: Vec<usize>) -> Result<Self> {
        if names.len() != dims.len() {
            return Err(Error::InvalidLayout(format!(
                "{} names for {} dimensions",
                names.len(),
                dims.len()
            )));
        }
        if dims.len() < 2 {
            return Err(Error::InvalidLayout("need at least two parties".into()));
        }
        if dims.len() > MAX_PARTIES {
            return Err(Error::InvalidLayout(format!(
                "at most {MAX_PARTIES} parties supported"
            )));
        }
        if let Some(p) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidLayout(format!("party {p} has dimension 0")));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .filter(|&t| t <= MAX_TOTAL_DIM)
                .ok_or(Error::TooLarge(total.saturating_mul(d)))?;
        }
        Ok(PartyLayout { names, dims })
    }

    /// Layout with the default labels `A, B1, .., Bm`.
    pub fn with_dims(dims: Vec<usize>) -> Result<Self> {
        let names = default_names(dims.len());
        Self::new(names, dims)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    /// Number of Bobs, `m`.
    pub fn bob_count(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn full_mask(&self) -> u32 {
        (1u32 << self.parties()) - 1
    }

    pub fn subset_dim(&self, mask: u32) -> usize {
        self.dims
            .iter()
            .enumerate()
            .filter(|(p, _)| mask & (1 << p) != 0)
            .map(|(_, d)| d)
            .product()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for p in (0..self.dims.len() - 1).rev() {
            strides[p] = strides[p + 1] * self.dims[p + 1];
        }
        strides
    }
}

pub(crate) fn default_names(parties: usize) -> Vec<String> {
    (0..parties)
        .map(|p| {
            if p == 0 {
                "A".to_string()
            } else {
                format!("B{p}")
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    layout: PartyLayout,
    amplitudes: Vec<Complex64>,
}

/// Validate amplitudes against a layout. With `renormalize` the vector is
/// rescaled to unit norm instead of being rejected.
pub fn make_state(
    layout: PartyLayout,
    amplitudes: Vec<Complex64>,
    renormalize: bool,
) -> Result<PureState> {
    let expected = layout.total_dim();
    if amplitudes.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: amplitudes.len(),
        });
    }
    if amplitudes
        .iter()
        .any(|a| !a.re.is_finite() || !a.im.is_finite())
    {
        return Err(Error::Parse("non-finite amplitude".into()));
    }
    let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    let mut amplitudes = amplitudes;
    if norm_sqr == 0.0 || ((norm_sqr - 1.0).abs() > NORM_TOL && !renormalize) {
        return Err(Error::NotNormalized { norm_sqr });
    }
    // in-tolerance inputs are rescaled too (rounded files), unless the gap is float noise
    if (norm_sqr - 1.0).abs() > 64.0 * f64::EPSILON {
        let scale = 1.0 / norm_sqr.sqrt();
        amplitudes.iter_mut().for_each(|a| *a *= scale);
    }
    Ok(PureState { layout, amplitudes })
}

impl PureState {
    pub fn layout(&self) -> &PartyLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn bob_count(&self) -> usize {
        self.layout.bob_count()
    }

    /// Reorder the parties: new party `q` is old party `order[q]`.
    pub fn permute_parties(&self, order: &[usize]) -> Result<PureState> {
        let n = self.layout.parties();
        check_permutation(order, n)?;
        let dims: Vec<usize> = order.iter().map(|&p| self.layout.dims[p]).collect();
        let names: Vec<String> = order
            .iter()
            .map(|&p| self.layout.names[p].clone())
            .collect();
        let layout = PartyLayout::new(names, dims)?;
        let new_strides = layout.strides();
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        let mut digits = vec![0usize; n];
        for (idx, &amp) in self.amplitudes.iter().enumerate() {
            decompose(idx, &self.layout.dims, &mut digits);
            let new_idx: usize = order
                .iter()
                .zip(&new_strides)
                .map(|(&old, &s)| digits[old] * s)
                .sum();
            out[new_idx] = amp;
        }
        Ok(PureState {
            layout,
            amplitudes: out,
        })
    }

    /// Move `party` to position 0, keeping the others in their original order.
    pub fn with_alice(&self, party: usize) -> Result<PureState> {
        let n = self.layout.parties();
        if party >= n {
            return Err(Error::PartyMismatch(format!(
                "party {party} does not exist ({n} parties)"
            )));
        }
        let order: Vec<usize> = std::iter::once(party)
            .chain((0..n).filter(|&p| p != party))
            .collect();
        self.permute_parties(&order)
    }

    /// Apply a unitary acting on a single party.
    pub fn apply_local(&self, party: usize, unitary: &DMatrix<Complex64>) -> Result<PureState> {
        let n = self.layout.parties();
        if party >= n {
            return Err(Error::PartyMismatch(format!(
                "party {party} does not exist"
            )));
        }
        let d = self.layout.dims[party];
        if unitary.nrows() != d || unitary.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: unitary.nrows(),
            });
        }
        let stride = self.layout.strides()[party];
        let block = stride * d;
        let mut out = self.amplitudes.clone();
        for base in (0..self.amplitudes.len()).step_by(block) {
            for offset in 0..stride {
                for i in 0..d {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..d {
                        acc += unitary[(i, j)] * self.amplitudes[base + offset + j * stride];
                    }
                    out[base + offset + i * stride] = acc;
                }
            }
        }
        Ok(PureState {
            layout: self.layout.clone(),
            amplitudes: out,
        })
    }

    /// Entropy of a subset, computed on whichever side of the cut is smaller.
    pub fn subset_entropy(&self, mask: u32) -> Result<f64> {
        let full = self.layout.full_mask();
        if mask == 0 || mask == full {
            return Ok(0.0);
        }
        let side = if self.layout.subset_dim(mask) <= self.layout.subset_dim(full & !mask) {
            mask
        } else {
            full & !mask
        };
        von_neumann_entropy(&reduced_density(self, side)?)
    }
}

fn check_permutation(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::BadPermutation(format!(
            "expected {n} entries, got {}",
            order.len()
        )));
    }
    for &p in order {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::BadPermutation(format!("{order:?}")));
        }
    }
    Ok(())
}

fn decompose(mut idx: usize, dims: &[usize], digits: &mut [usize]) {
    for p in (0..dims.len()).rev() {
        digits[p] = idx % dims[p];
        idx /= dims[p];
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Ghz,
    W,
    ProductPairs,
    HaarRandom,
}

impl std::str::FromStr for StateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "ghz" => Ok(StateKind::Ghz),
            "w" => Ok(StateKind::W),
            "product_pairs" | "pairs" => Ok(StateKind::ProductPairs),
            "haar" | "haar_random" => Ok(StateKind::HaarRandom),
            other => Err(Error::UnsupportedKind(other.to_string())),
        }
    }
}

/// Standard test families on `m + 1` parties.
///
/// `ProductPairs` gives Alice one `local_dim`-level share per Bob, each
/// maximally entangled with that Bob, so Alice's dimension is `local_dim^m`.
pub fn standard_state(
    kind: StateKind,
    m: usize,
    local_dim: usize,
    seed: Option<u64>,
) -> Result<PureState> {
    if m == 0 {
        return Err(Error::InvalidLayout("need at least one Bob".into()));
    }
    if local_dim == 0 {
        return Err(Error::InvalidLayout(
            "local dimension must be positive".into(),
        ));
    }
    match kind {
        StateKind::Ghz => {
            let layout = PartyLayout::with_dims(vec![local_dim; m + 1])?;
            let mut amps = vec![Complex64::new(0.0, 0.0); layout.total_dim()];
            let step: usize = layout.strides().iter().sum();
            let a = 1.0 / (local_dim as f64).sqrt();
            for i in 0..local_dim {
                amps[i * step] = Complex64::new(a, 0.0);
            }
            make_state(layout, amps, false)
        }
        StateKind::W => {
            if local_dim != 2 {
                return Err(Error::UnsupportedKind(format!(
                    "W state needs local_dim = 2, got {local_dim}"
                )));
            }
            let layout = PartyLayout::with_dims(vec![2; m + 1])?;
            let mut amps = vec![Complex64::new(0.0, 0.0); layout.total_dim()];
            let a = 1.0 / ((m + 1) as f64).sqrt();
            for s in layout.strides() {
                amps[s] = Complex64::new(a, 0.0);
            }
            make_state(layout, amps, false)
        }
        StateKind::ProductPairs => {
            let pairs: Vec<(usize, usize)> = (1..=m).map(|b| (0, b)).collect();
            pair_network(m + 1, &pairs, local_dim)
        }
        StateKind::HaarRandom => {
            let seed =
                seed.ok_or_else(|| Error::UnsupportedKind("haar_random requires a seed".into()))?;
            let layout = PartyLayout::with_dims(vec![local_dim; m + 1])?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            haar_state(layout, &mut rng)
        }
    }
}

/// Haar-random pure state on an arbitrary layout: a normalized complex
/// Gaussian vector.
pub fn haar_state<R: Rng + ?Sized>(layout: PartyLayout, rng: &mut R) -> Result<PureState> {
    let amps: Vec<Complex64> = (0..layout.total_dim())
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    make_state(layout, amps, true)
}

/// Tensor product of maximally entangled `pair_dim`-level pairs. Each entry
/// `(p, q)` of `pairs` puts one pair between parties `p` and `q`; a party's
/// dimension is `pair_dim` raised to the number of pairs it holds.
pub fn pair_network(
    parties: usize,
    pairs: &[(usize, usize)],
    pair_dim: usize,
) -> Result<PureState> {
    for &(p, q) in pairs {
        if p >= parties || q >= parties || p == q {
            return Err(Error::InvalidLayout(format!("bad pair ({p}, {q})")));
        }
    }
    // slots[party] lists (pair index) in the order the party's digits appear
    let mut slots: Vec<Vec<usize>> = vec![Vec::new(); parties];
    for (k, &(p, q)) in pairs.iter().enumerate() {
        slots[p].push(k);
        slots[q].push(k);
    }
    let dims: Vec<usize> = slots.iter().map(|s| pair_dim.pow(s.len() as u32)).collect();
    let layout = PartyLayout::with_dims(dims)?;
    let strides = layout.strides();
    let mut amps = vec![Complex64::new(0.0, 0.0); layout.total_dim()];
    let a = (pair_dim as f64).powi(pairs.len() as i32).sqrt().recip();
    let combos = pair_dim.pow(pairs.len() as u32);
    let mut values = vec![0usize; pairs.len()];
    for c in 0..combos {
        decompose(c, &vec![pair_dim; pairs.len()], &mut values);
        let idx: usize = slots
            .iter()
            .zip(&strides)
            .map(|(s, &stride)| {
                let local = s.iter().fold(0, |acc, &k| acc * pair_dim + values[k]);
                local * stride
            })
            .sum();
        amps[idx] = Complex64::new(a, 0.0);
    }
    make_state(layout, amps, false)
}

/// All parties in their first basis state.
pub fn product_state(layout: PartyLayout) -> Result<PureState> {
    let mut amps = vec![Complex64::new(0.0, 0.0); layout.total_dim()];
    amps[0] = Complex64::new(1.0, 0.0);
    make_state(layout, amps, false)
}

/// Haar-random unitary via QR of a complex Ginibre matrix with the phase
/// ambiguity of R removed.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    subset: u32,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Wrap a matrix without validation; `von_neumann_entropy` checks it.
    pub fn from_matrix(subset: u32, matrix: DMatrix<Complex64>) -> Self {
        DensityMatrix { subset, matrix }
    }

    pub fn subset(&self) -> u32 {
        self.subset
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    }
}

/// Partial trace over the complement of `subset`.
pub fn reduced_density(state: &PureState, subset: u32) -> Result<DensityMatrix> {
    let layout = &state.layout;
    let full = layout.full_mask();
    if subset & !full != 0 {
        return Err(Error::InvalidSubset(format!(
            "mask {subset:#b} names missing parties"
        )));
    }
    if subset == 0 {
        return Err(Error::EmptySubset);
    }
    if subset == full {
        return Err(Error::FullSubset);
    }
    let n = layout.parties();
    let kept: Vec<usize> = (0..n).filter(|p| subset & (1 << p) != 0).collect();
    let traced: Vec<usize> = (0..n).filter(|p| subset & (1 << p) == 0).collect();
    let rows = layout.subset_dim(subset);
    let cols = layout.total_dim() / rows;
    let mut m = DMatrix::from_element(rows, cols, Complex64::new(0.0, 0.0));
    let mut digits = vec![0usize; n];
    for (idx, &amp) in state.amplitudes.iter().enumerate() {
        decompose(idx, &layout.dims, &mut digits);
        let r = kept
            .iter()
            .fold(0, |acc, &p| acc * layout.dims[p] + digits[p]);
        let c = traced
            .iter()
            .fold(0, |acc, &p| acc * layout.dims[p] + digits[p]);
        m[(r, c)] = amp;
    }
    let matrix = &m * m.adjoint();
    Ok(DensityMatrix { subset, matrix })
}

/// `-Σ λ log₂ λ` in ebits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let m = &rho.matrix;
    if !m.is_square() {
        return Err(Error::NotDensityMatrix("matrix is not square".into()));
    }
    let herm_err = (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if herm_err > DENSITY_FAIL_TOL {
        return Err(Error::NotDensityMatrix(format!(
            "not Hermitian (deviation {herm_err:e})"
        )));
    }
    let trace = rho.trace();
    if (trace - 1.0).abs() > DENSITY_FAIL_TOL {
        return Err(Error::NotDensityMatrix(format!("trace {trace}")));
    }
    let eigs = rho.eigenvalues();
    let mut s = 0.0;
    for lambda in eigs {
        if lambda < -DENSITY_FAIL_TOL {
            return Err(Error::NotDensityMatrix(format!("eigenvalue {lambda:e}")));
        }
        if lambda > EIGEN_CLIP {
            s -= lambda * lambda.log2();
        }
    }
    Ok(s.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        make_state(
            PartyLayout::with_dims(vec![2, 2]).unwrap(),
            vec![c(h), c(0.0), c(0.0), c(h)],
            false,
        )
        .unwrap()
    }

    #[test]
    fn make_state_validation() {
        let layout = PartyLayout::with_dims(vec![2, 2]).unwrap();
        assert!(matches!(
            make_state(layout.clone(), vec![c(1.0), c(1.0), c(0.0), c(0.0)], false),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            make_state(layout.clone(), vec![c(1.0); 5], false),
            Err(Error::DimensionMismatch {
                expected: 4,
                got: 5
            })
        ));
        let s = make_state(layout, vec![c(1.0), c(1.0), c(0.0), c(0.0)], true).unwrap();
        assert_abs_diff_eq!(
            s.amplitudes()[0].re,
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            von_neumann_entropy(&reduced_density(&bell(), 1).unwrap()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn layout_guards() {
        assert!(PartyLayout::with_dims(vec![2]).is_err());
        assert!(PartyLayout::with_dims(vec![2, 0]).is_err());
        assert!(matches!(
            PartyLayout::with_dims(vec![2; 17]),
            Err(Error::TooLarge(_))
        ));
        // dimension-1 parties are allowed
        let l = PartyLayout::with_dims(vec![1, 2, 1]).unwrap();
        assert_eq!(l.total_dim(), 2);
    }

    #[test]
    fn standard_families() {
        let ghz = standard_state(StateKind::Ghz, 2, 2, None).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (i, a) in ghz.amplitudes().iter().enumerate() {
            let expect = if i == 0 || i == 7 { h } else { 0.0 };
            assert_abs_diff_eq!(a.re, expect, epsilon = 1e-15);
        }
        let w = standard_state(StateKind::W, 2, 2, None).unwrap();
        let t = 1.0 / 3f64.sqrt();
        for (i, a) in w.amplitudes().iter().enumerate() {
            let expect = if i.count_ones() == 1 { t } else { 0.0 };
            assert_abs_diff_eq!(a.re, expect, epsilon = 1e-15);
        }
        assert!(matches!(
            standard_state(StateKind::W, 2, 3, None),
            Err(Error::UnsupportedKind(_))
        ));
        assert!(standard_state(StateKind::HaarRandom, 2, 2, None).is_err());
        let a = standard_state(StateKind::HaarRandom, 2, 2, Some(7)).unwrap();
        let b = standard_state(StateKind::HaarRandom, 2, 2, Some(7)).unwrap();
        assert_eq!(a, b);
        let pairs = standard_state(StateKind::ProductPairs, 2, 2, None).unwrap();
        assert_eq!(pairs.layout().dims(), &[4, 2, 2]);
    }

    #[test]
    fn ghz_bob_marginal_matches_direct_trace() {
        // oracle: ρ_{B1B2}[i,j] = Σ_a ψ[a,i] ψ*[a,j] over the 8 amplitudes
        let ghz = standard_state(StateKind::Ghz, 2, 2, None).unwrap();
        let psi = ghz.amplitudes();
        let rho = reduced_density(&ghz, 0b110).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect: Complex64 =
                    (0..2).map(|a| psi[a * 4 + i] * psi[a * 4 + j].conj()).sum();
                assert_abs_diff_eq!((rho.matrix()[(i, j)] - expect).norm(), 0.0, epsilon = 1e-15);
            }
        }
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.matrix()[(3, 3)].re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn entropy_values() {
        let bell = bell();
        let rho = reduced_density(&bell, 0b01).unwrap();
        assert_abs_diff_eq!(rho.matrix()[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-15);

        let prod = product_state(PartyLayout::with_dims(vec![2, 2, 2]).unwrap()).unwrap();
        assert_eq!(
            von_neumann_entropy(&reduced_density(&prod, 0b010).unwrap()).unwrap(),
            0.0
        );

        let w = standard_state(StateKind::W, 2, 2, None).unwrap();
        let h13 = -(1.0 / 3.0) * (1.0f64 / 3.0).log2() - (2.0 / 3.0) * (2.0f64 / 3.0).log2();
        let s = von_neumann_entropy(&reduced_density(&w, 0b010).unwrap()).unwrap();
        assert_abs_diff_eq!(s, h13, epsilon = 1e-12);
        assert_abs_diff_eq!(s, 0.918296, epsilon = 1e-6);
    }

    #[test]
    fn reduced_density_errors() {
        let bell = bell();
        assert_eq!(reduced_density(&bell, 0), Err(Error::EmptySubset));
        assert_eq!(reduced_density(&bell, 0b11), Err(Error::FullSubset));
        assert!(matches!(
            reduced_density(&bell, 0b100),
            Err(Error::InvalidSubset(_))
        ));
    }

    #[test]
    fn entropy_rejects_bad_matrices() {
        let bad_trace = DensityMatrix::from_matrix(1, DMatrix::identity(2, 2));
        assert!(matches!(
            von_neumann_entropy(&bad_trace),
            Err(Error::NotDensityMatrix(_))
        ));
        let negative = DensityMatrix::from_matrix(
            1,
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.1), c(-0.1)])),
        );
        assert!(matches!(
            von_neumann_entropy(&negative),
            Err(Error::NotDensityMatrix(_))
        ));
        let tiny_negative = DensityMatrix::from_matrix(
            1,
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                c(1.0 + 5e-11),
                c(-5e-11),
            ])),
        );
        assert_abs_diff_eq!(
            von_neumann_entropy(&tiny_negative).unwrap(),
            0.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn pair_network_layout() {
        // EPR(B1,B2) ⊗ EPR(A,B3)
        let s = pair_network(4, &[(1, 2), (0, 3)], 2).unwrap();
        assert_eq!(s.layout().dims(), &[2, 2, 2, 2]);
        assert_abs_diff_eq!(s.subset_entropy(0b0110).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.subset_entropy(0b0010).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.subset_entropy(0b1110).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn permute_and_local_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let layout = PartyLayout::with_dims(vec![2, 3, 2]).unwrap();
        let s = haar_state(layout, &mut rng).unwrap();
        let p = s.permute_parties(&[2, 0, 1]).unwrap();
        assert_eq!(p.layout().dims(), &[2, 2, 3]);
        // new party 1 is old party 0
        assert_abs_diff_eq!(
            p.subset_entropy(0b010).unwrap(),
            s.subset_entropy(0b001).unwrap(),
            epsilon = 1e-10
        );
        let u = random_unitary(3, &mut rng);
        let uu = &u * u.adjoint();
        assert_abs_diff_eq!((uu - DMatrix::identity(3, 3)).norm(), 0.0, epsilon = 1e-12);
        let t = s.apply_local(1, &u).unwrap();
        let norm: f64 = t.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        assert!(s.permute_parties(&[0, 0, 1]).is_err());
    }
}
