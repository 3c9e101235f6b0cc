use std::sync::Arc;

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use rustfft::num_complex::Complex64;

use super::fourier::FourierTransform;
use super::grid::SpatialGrid;
use super::hermite::{resize, shift_axis, HermiteBasis, ShiftKind};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Spatial grid, velocity basis and transform plans shared by every field
/// living on them.
#[derive(Debug)]
pub struct Discretization {
    grid: SpatialGrid,
    basis: HermiteBasis,
    fft: FourierTransform,
    derivative_symbols: Vec<Vec<f64>>,
    laplacian_symbols: Vec<f64>,
    negated: Vec<usize>,
}

impl Discretization {
    pub fn new(grid: SpatialGrid, basis: HermiteBasis) -> Result<Arc<Self>> {
        if grid.dim() != basis.dim() {
            return Err(Error::config(format!(
                "spatial dimension {} and velocity dimension {} differ",
                grid.dim(),
                basis.dim()
            )));
        }
        let fft = FourierTransform::new(&grid);
        let derivative_symbols = grid.derivative_symbols();
        let laplacian_symbols = grid.laplacian_symbols();
        let negated = (0..grid.len()).map(|f| grid.negated(f)).collect();
        Ok(Arc::new(Self {
            grid,
            basis,
            fft,
            derivative_symbols,
            laplacian_symbols,
            negated,
        }))
    }

    /// `dim`-dimensional torus of period `length` with `n_x` modes per axis
    /// and `n_v` Hermite modes per velocity axis.
    pub fn build(dim: usize, n_x: usize, n_v: usize, length: f64) -> Result<Arc<Self>> {
        Self::new(SpatialGrid::new(dim, n_x, length)?, HermiteBasis::new(dim, n_v)?)
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn basis(&self) -> &HermiteBasis {
        &self.basis
    }

    pub fn fft(&self) -> &FourierTransform {
        &self.fft
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// `k_m` along `axis` (zero at Nyquist).
    pub fn k(&self, mode: usize, axis: usize) -> f64 {
        self.derivative_symbols[mode][axis]
    }

    pub fn k_squared(&self, mode: usize) -> f64 {
        self.laplacian_symbols[mode]
    }

    pub fn negated(&self, mode: usize) -> usize {
        self.negated[mode]
    }

    fn same_shape(&self, other: &Discretization) -> bool {
        self.grid == other.grid && self.basis.n_v() == other.basis.n_v()
    }
}

/// Check that two fields share a discretization.
pub(crate) fn check_compatible(a: &Discretization, b: &Discretization) -> Result<()> {
    if std::ptr::eq(a, b) || a.same_shape(b) {
        Ok(())
    } else {
        Err(Error::config("fields live on different discretizations"))
    }
}

/// Fourier × Hermite coefficients `ĝ_{m,n}` of a real phase-space function
/// `g(x, v) = Σ ĝ_{m,n} e^{i k_m·x} ψ_n(v)`.
#[derive(Debug, Clone)]
pub struct SpectralField {
    space: Arc<Discretization>,
    coeffs: Array2<Complex64>,
}

impl SpectralField {
    pub fn zeros(space: &Arc<Discretization>) -> Self {
        let shape = (space.grid.len(), space.basis.len());
        Self {
            space: Arc::clone(space),
            coeffs: Array2::zeros(shape),
        }
    }

    pub fn from_coeffs(space: &Arc<Discretization>, coeffs: Array2<Complex64>) -> Result<Self> {
        let shape = (space.grid.len(), space.basis.len());
        if coeffs.dim() != shape {
            return Err(Error::config(format!(
                "coefficient shape {:?} does not match grid × basis {:?}",
                coeffs.dim(),
                shape
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::config("coefficients contain NaN or Inf"));
        }
        Ok(Self {
            space: Arc::clone(space),
            coeffs,
        })
    }

    pub(crate) fn from_coeffs_unchecked(space: &Arc<Discretization>, coeffs: Array2<Complex64>) -> Self {
        Self {
            space: Arc::clone(space),
            coeffs,
        }
    }

    /// `Σ_n profile_n(x) ψ_n(v)` from spatial coefficient slices.
    pub fn from_slices(space: &Arc<Discretization>, slices: &[(usize, &SpatialField)]) -> Self {
        let mut out = Self::zeros(space);
        for (n, s) in slices {
            out.coeffs.column_mut(*n).assign(&s.coeffs);
        }
        out
    }

    pub fn space(&self) -> &Arc<Discretization> {
        &self.space
    }

    pub fn coeffs(&self) -> &Array2<Complex64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Array2<Complex64> {
        self.coeffs
    }

    /// Nodal values on the collocation grid × tensor Gauss–Hermite nodes,
    /// shaped `(grid points, velocity nodes)`.
    pub fn forward_transform(space: &Arc<Discretization>, values: &Array2<f64>) -> Result<Self> {
        let (nx, nq) = (space.grid.len(), space.basis.node_count());
        if values.dim() != (nx, nq) {
            return Err(Error::config(format!(
                "value tensor shape {:?} does not match grid × quadrature nodes {:?}",
                values.dim(),
                (nx, nq)
            )));
        }
        // x first: FFT every velocity column.
        let mut modal = Array2::<Complex64>::zeros((nx, nq));
        let mut col = vec![ZERO; nx];
        for q in 0..nq {
            for (j, slot) in col.iter_mut().enumerate() {
                *slot = Complex64::new(values[[j, q]], 0.0);
            }
            space.fft.forward(&mut col);
            modal.column_mut(q).assign(&Array1::from(col.clone()));
        }
        // then project onto ψ_n one velocity axis at a time.
        let basis = &space.basis;
        let q1 = basis.nodes_per_dim();
        let nv = basis.n_v();
        let project: Vec<Vec<f64>> = (0..nv)
            .map(|n| {
                (0..q1)
                    .map(|q| basis.rule().function_weights()[q] * basis.psi_at_node(q, n))
                    .collect()
            })
            .collect();
        let coeffs = contract(&modal, basis.dim(), q1, nv, &project);
        Self::from_coeffs(space, coeffs)
    }

    /// Values at collocation points × tensor Gauss–Hermite nodes.
    pub fn inverse_transform(&self) -> Array2<f64> {
        let basis = &self.space.basis;
        let q1 = basis.nodes_per_dim();
        let nv = basis.n_v();
        let eval: Vec<Vec<f64>> = (0..q1)
            .map(|q| (0..nv).map(|n| basis.psi_at_node(q, n)).collect())
            .collect();
        let nodal = contract(&self.coeffs, basis.dim(), nv, q1, &eval);
        let nx = self.space.grid.len();
        let mut out = Array2::<f64>::zeros((nx, nodal.ncols()));
        let mut col = vec![ZERO; nx];
        for q in 0..nodal.ncols() {
            for (j, slot) in col.iter_mut().enumerate() {
                *slot = nodal[[j, q]];
            }
            self.space.fft.inverse(&mut col);
            for (j, v) in col.iter().enumerate() {
                out[[j, q]] = v.re;
            }
        }
        out
    }

    /// `∂_{x_axis}`: multiplies mode `m` by `i k_m`.
    pub fn spatial_derivative(&self, axis: usize) -> Result<Self> {
        if axis >= self.space.dim() {
            return Err(Error::config(format!("spatial axis {axis} out of range")));
        }
        let mut out = self.coeffs.clone();
        for (m, mut row) in out.axis_iter_mut(Axis(0)).enumerate() {
            let ik = Complex64::new(0.0, self.space.k(m, axis));
            row.mapv_inplace(|c| c * ik);
        }
        Ok(Self::from_coeffs_unchecked(&self.space, out))
    }

    /// Apply a Hermite recurrence along velocity `axis`, truncating back to
    /// `n_v` modes.
    pub fn hermite_shift_apply(&self, axis: usize, kind: ShiftKind) -> Result<Self> {
        let basis = &self.space.basis;
        if axis >= basis.dim() {
            return Err(Error::config(format!("velocity axis {axis} out of range")));
        }
        let nv = basis.n_v();
        let out = shift_axis(&self.coeffs, basis.dim(), nv, nv, axis, kind);
        Ok(Self::from_coeffs_unchecked(&self.space, out))
    }

    /// Coefficients zero-extended (or truncated) to `ext` Hermite modes per axis.
    pub fn hermite_resized(&self, ext: usize) -> Array2<Complex64> {
        resize(&self.coeffs, self.space.dim(), self.space.basis.n_v(), ext)
    }

    /// Spatial coefficient slice of Hermite mode `n` (flat index).
    pub fn hermite_slice(&self, n: usize) -> SpatialField {
        SpatialField {
            space: Arc::clone(&self.space),
            coeffs: self.coeffs.column(n).to_owned(),
        }
    }

    /// `⟨f, h⟩_{x,v}`.
    pub fn inner(&self, other: &Self) -> f64 {
        let s: f64 = self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum();
        s * self.space.grid.volume()
    }

    /// `‖f‖²_{L²_{x,v}}`.
    pub fn norm_sq(&self) -> f64 {
        coeff_norm_sq(&self.coeffs) * self.space.grid.volume()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_coeffs_unchecked(&self.space, self.coeffs.mapv(|c| c * factor))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_coeffs_unchecked(&self.space, &self.coeffs + &other.coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_coeffs_unchecked(&self.space, &self.coeffs - &other.coeffs)
    }

    /// Dealiased pointwise product with a real spatial field, per Hermite mode.
    pub fn multiply_by_spatial(&self, w: &SpatialField) -> Self {
        let fft = &self.space.fft;
        let w_vals = fft.to_padded_values(w.coeffs.as_slice().unwrap());
        let mut out = Array2::<Complex64>::zeros(self.coeffs.dim());
        for n in 0..self.coeffs.ncols() {
            let col: Vec<Complex64> = self.coeffs.column(n).to_vec();
            if col.iter().all(|c| *c == ZERO) {
                continue;
            }
            let u_vals = fft.to_padded_values(&col);
            let prod = u_vals
                .iter()
                .zip(&w_vals)
                .map(|(a, b)| Complex64::new(a.re * b.re, 0.0))
                .collect();
            let back = fft.from_padded_values(prod);
            out.column_mut(n).assign(&Array1::from(back));
        }
        let mut f = Self::from_coeffs_unchecked(&self.space, out);
        f.symmetrize();
        f
    }

    /// Largest violation of `ĝ_{-m} = conj(ĝ_m)`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for m in 0..self.coeffs.nrows() {
            let mn = self.space.negated(m);
            for n in 0..self.coeffs.ncols() {
                let d = (self.coeffs[[m, n]] - self.coeffs[[mn, n]].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Project onto Hermitian-symmetric coefficients (real physical field).
    pub fn symmetrize(&mut self) {
        symmetrize_rows(&mut self.coeffs, &self.space);
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Random band-limited field: Fourier modes with `|m_i| ≤ max_mode` and
    /// every retained Hermite mode, Hermitian-symmetric, no Nyquist content.
    pub fn random<R: Rng>(space: &Arc<Discretization>, rng: &mut R, max_mode: usize) -> Self {
        let grid = &space.grid;
        let mut coeffs = Array2::<Complex64>::zeros((grid.len(), space.basis.len()));
        for m in 0..grid.len() {
            if grid.touches_nyquist(m) || grid.max_abs_index(m) > max_mode {
                continue;
            }
            for n in 0..space.basis.len() {
                coeffs[[m, n]] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        symmetrize_rows(&mut coeffs, space);
        Self::from_coeffs_unchecked(space, coeffs)
    }
}

/// Real scalar field on the spatial grid, stored by Fourier coefficients.
#[derive(Debug, Clone)]
pub struct SpatialField {
    space: Arc<Discretization>,
    coeffs: Array1<Complex64>,
}

impl SpatialField {
    pub fn zeros(space: &Arc<Discretization>) -> Self {
        Self {
            space: Arc::clone(space),
            coeffs: Array1::zeros(space.grid.len()),
        }
    }

    pub fn from_coeffs(space: &Arc<Discretization>, coeffs: Array1<Complex64>) -> Result<Self> {
        if coeffs.len() != space.grid.len() {
            return Err(Error::config(format!(
                "spatial coefficient length {} does not match grid size {}",
                coeffs.len(),
                space.grid.len()
            )));
        }
        Ok(Self {
            space: Arc::clone(space),
            coeffs,
        })
    }

    pub fn from_values(space: &Arc<Discretization>, values: &[f64]) -> Result<Self> {
        if values.len() != space.grid.len() {
            return Err(Error::config(format!(
                "spatial value length {} does not match grid size {}",
                values.len(),
                space.grid.len()
            )));
        }
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        space.fft.forward(&mut data);
        let mut out = Self {
            space: Arc::clone(space),
            coeffs: Array1::from(data),
        };
        out.symmetrize();
        Ok(out)
    }

    /// Sample `f(x)` at the collocation points.
    pub fn from_fn(space: &Arc<Discretization>, f: impl Fn(&[f64]) -> f64) -> Self {
        let values: Vec<f64> = (0..space.grid.len()).map(|j| f(&space.grid.point(j))).collect();
        Self::from_values(space, &values).expect("length matches by construction")
    }

    pub fn space(&self) -> &Arc<Discretization> {
        &self.space
    }

    pub fn coeffs(&self) -> &Array1<Complex64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array1<Complex64> {
        &mut self.coeffs
    }

    pub fn values(&self) -> Vec<f64> {
        let mut data = self.coeffs.to_vec();
        self.space.fft.inverse(&mut data);
        data.into_iter().map(|c| c.re).collect()
    }

    /// Spatial mean (the zero Fourier coefficient).
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn derivative(&self, axis: usize) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c * Complex64::new(0.0, self.space.k(m, axis)))
            .collect();
        Self {
            space: Arc::clone(&self.space),
            coeffs,
        }
    }

    /// `Δu` via the symbol `-|k|²`.
    pub fn laplacian(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| -c * self.space.k_squared(m))
            .collect();
        Self {
            space: Arc::clone(&self.space),
            coeffs,
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.space.grid.volume()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn inner(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum::<f64>()
            * self.space.grid.volume()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            space: Arc::clone(&self.space),
            coeffs: &self.coeffs + &other.coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            space: Arc::clone(&self.space),
            coeffs: &self.coeffs - &other.coeffs,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            space: Arc::clone(&self.space),
            coeffs: self.coeffs.mapv(|c| c * factor),
        }
    }

    /// Dealiased pointwise product.
    pub fn product(&self, other: &Self) -> Self {
        let p = self.space.fft.product(
            self.coeffs.as_slice().unwrap(),
            other.coeffs.as_slice().unwrap(),
        );
        let mut out = Self {
            space: Arc::clone(&self.space),
            coeffs: Array1::from(p),
        };
        out.symmetrize();
        out
    }

    pub fn symmetrize(&mut self) {
        let mut fixed = self.coeffs.clone();
        for m in 0..fixed.len() {
            let mn = self.space.negated(m);
            fixed[m] = 0.5 * (self.coeffs[m] + self.coeffs[mn].conj());
        }
        self.coeffs = fixed;
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values().into_iter().map(f64::abs).fold(0.0, f64::max)
    }
}

fn symmetrize_rows(coeffs: &mut Array2<Complex64>, space: &Discretization) {
    let orig = coeffs.clone();
    for m in 0..orig.nrows() {
        let mn = space.negated(m);
        for n in 0..orig.ncols() {
            coeffs[[m, n]] = 0.5 * (orig[[m, n]] + orig[[mn, n]].conj());
        }
    }
}

fn coeff_norm_sq(c: &Array2<Complex64>) -> f64 {
    c.iter().map(|z| z.norm_sqr()).sum()
}

/// Apply the 1-D map `matrix[out][in]` along every velocity axis of a
/// `(rows, in^dim)` array, producing `(rows, out^dim)`.
fn contract<T>(data: &Array2<T>, dim: usize, ext_in: usize, ext_out: usize, matrix: &[Vec<f64>]) -> Array2<Complex64>
where
    T: Copy + Into<Complex64>,
{
    let rows = data.nrows();
    let mut cur: Array2<Complex64> = data.mapv(|v| v.into());
    let mut extents = vec![ext_in; dim];
    for axis in 0..dim {
        let before: usize = extents[..axis].iter().product();
        let after: usize = extents[axis + 1..].iter().product();
        let mut next = Array2::<Complex64>::zeros((rows, before * ext_out * after));
        for r in 0..rows {
            for b in 0..before {
                for a in 0..after {
                    for (o, weights) in matrix.iter().enumerate() {
                        let mut acc = ZERO;
                        for (i, w) in weights.iter().enumerate() {
                            acc += cur[[r, (b * ext_in + i) * after + a]] * *w;
                        }
                        next[[r, (b * ext_out + o) * after + a]] = acc;
                    }
                }
            }
        }
        extents[axis] = ext_out;
        cur = next;
    }
    cur
}

/// `∫ g(x, v) w(v) dv` at every collocation point by tensor Gauss–Hermite
/// quadrature on nodal values. Independent of the coefficient path; meant
/// as a test oracle.
pub fn quadrature_oracle_moment(
    space: &Discretization,
    point_values: &Array2<f64>,
    weight: impl Fn(&[f64]) -> f64,
) -> Result<Vec<f64>> {
    let (nx, nq) = (space.grid.len(), space.basis.node_count());
    if point_values.dim() != (nx, nq) {
        return Err(Error::config(format!(
            "value tensor shape {:?} does not match grid × quadrature nodes {:?}",
            point_values.dim(),
            (nx, nq)
        )));
    }
    let w: Vec<f64> = (0..nq)
        .map(|q| space.basis.node_weight(q) * weight(&space.basis.node(q)))
        .collect();
    Ok((0..nx)
        .map(|j| (0..nq).map(|q| point_values[[j, q]] * w[q]).sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::quadrature::{hermite_functions, sqrt_maxwellian};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn space(nx: usize, nv: usize) -> Arc<Discretization> {
        Discretization::build(1, nx, nv, 2.0 * std::f64::consts::PI).unwrap()
    }

    fn nodal(space: &Arc<Discretization>, f: impl Fn(f64, f64) -> f64) -> Array2<f64> {
        let nq = space.basis().node_count();
        Array2::from_shape_fn((space.grid().len(), nq), |(j, q)| {
            f(space.grid().point(j)[0], space.basis().node(q)[0])
        })
    }

    #[test]
    fn constant_maxwellian_maps_to_single_coefficient() {
        let s = space(8, 6);
        let f = SpectralField::forward_transform(&s, &nodal(&s, |_, v| sqrt_maxwellian(v))).unwrap();
        assert!((f.coeffs()[[0, 0]].re - 1.0).abs() < 1e-13);
        let rest: f64 = f.coeffs().iter().map(|c| c.norm()).sum::<f64>() - f.coeffs()[[0, 0]].norm();
        assert!(rest < 1e-13, "{rest}");
    }

    #[test]
    fn cosine_times_psi1() {
        let s = space(8, 6);
        let f = SpectralField::forward_transform(&s, &nodal(&s, |x, v| x.cos() * hermite_functions(v, 2)[1]))
            .unwrap();
        for (m, n) in [(1, 1), (7, 1)] {
            assert!((f.coeffs()[[m, n]].norm() - 0.5).abs() < 1e-13);
        }
        let total: f64 = f.coeffs().iter().map(|c| c.norm()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn round_trip_against_direct_evaluation() {
        let s = space(16, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = SpectralField::random(&s, &mut rng, 5);
        // Oracle: sum the expansion at each node directly.
        let direct = nodal(&s, |x, v| {
            let psi = hermite_functions(v, 7);
            let mut acc = 0.0;
            for m in 0..16 {
                let k = s.grid().wavenumber(m);
                for (n, p) in psi.iter().enumerate() {
                    let c = f.coeffs()[[m, n]];
                    acc += (c * Complex64::new(0.0, k * x).exp()).re * p;
                }
            }
            acc
        });
        let values = f.inverse_transform();
        let scale = direct.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for (a, b) in values.iter().zip(direct.iter()) {
            assert!((a - b).abs() < 1e-12 * scale);
        }
        let back = SpectralField::forward_transform(&s, &values).unwrap();
        let err = coeff_norm_sq(&(back.coeffs() - f.coeffs())).sqrt();
        assert!(err < 1e-12 * coeff_norm_sq(f.coeffs()).sqrt());
    }

    #[test]
    fn shape_mismatch_is_config_error() {
        let s = space(8, 4);
        let bad = Array2::<f64>::zeros((8, 5));
        assert!(matches!(SpectralField::forward_transform(&s, &bad), Err(Error::Config(_))));
    }

    #[test]
    fn derivatives_of_trig_functions() {
        let s = space(16, 4);
        let sin = SpatialField::from_fn(&s, |x| x[0].sin());
        let d = sin.derivative(0).values();
        for (j, v) in d.iter().enumerate() {
            assert!((v - s.grid().point(j)[0].cos()).abs() < 1e-13);
        }
        let c2 = SpatialField::from_fn(&s, |x| (2.0 * x[0]).cos());
        for (j, v) in c2.derivative(0).values().iter().enumerate() {
            assert!((v + 2.0 * (2.0 * s.grid().point(j)[0]).sin()).abs() < 1e-13);
        }
        let c = SpatialField::from_fn(&s, |_| 3.0);
        assert!(c.derivative(0).values().iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn random_fields_are_hermitian() {
        let s = Discretization::build(2, 8, 4, 2.0 * std::f64::consts::PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = SpectralField::random(&s, &mut rng, 2);
        assert_eq!(f.hermitian_defect(), 0.0);
        let d = f.spatial_derivative(1).unwrap();
        assert!(d.hermitian_defect() < 1e-15);
    }
}
