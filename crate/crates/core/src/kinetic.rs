//! Fokker–Planck operator, macro–micro projections, velocity moments,
//! the electrostatic Poisson solve and the right-hand side of the scaled
//! kinetic system in perturbation form `f = M + g√M`.

use std::sync::Arc;


use crate::diagnostics::nu_norm_sq;
use crate::error::{Error, Result};
use crate::spectral::{Complex64, Discretization, ShiftKind, SpatialField, SpectralField};

/// Fourier × Hermite coefficients of the perturbation `g`.
pub type DistributionField = SpectralField;

/// Largest tolerated `|mean(a)|` for a Poisson source.
pub const NEUTRALITY_TOL: f64 = 1e-12;

/// Electrostatic potential and its gradient.
#[derive(Debug, Clone)]
pub struct Potential {
    pub phi: SpatialField,
    pub grad_phi: Vec<SpatialField>,
}

/// Density and momentum moments with the Poisson-consistent potential.
#[derive(Debug, Clone)]
pub struct MacroFields {
    pub a: SpatialField,
    pub b: Vec<SpatialField>,
    pub phi: SpatialField,
    pub grad_phi: Vec<SpatialField>,
}

impl MacroFields {
    pub fn from_distribution(g: &DistributionField) -> Result<Self> {
        let (a, b) = moments(g);
        let Potential { phi, grad_phi } = solve_poisson(&a)?;
        Ok(Self { a, b, phi, grad_phi })
    }

    /// `‖Δφ + a‖ / ‖a‖` (absolute when `a = 0`).
    pub fn poisson_residual(&self) -> f64 {
        let r = self.phi.laplacian().add(&self.a).norm();
        let scale = self.a.norm();
        if scale > 0.0 {
            r / scale
        } else {
            r
        }
    }
}

/// `Lg`: multiplies Hermite mode `n` by `|n|`.
pub fn apply_l(g: &DistributionField) -> DistributionField {
    let degrees = g.space().basis().degrees();
    let mut out = g.coeffs().clone();
    for (n, mut col) in out.columns_mut().into_iter().enumerate() {
        let d = degrees[n] as f64;
        col.mapv_inplace(|c| c * d);
    }
    SpectralField::from_coeffs_unchecked(g.space(), out)
}

/// Density moment `a = ∫ g√M dv`.
pub fn density(g: &DistributionField) -> SpatialField {
    g.hermite_slice(0)
}

/// Momentum moments `b_i = ∫ g v_i √M dv`.
pub fn momentum(g: &DistributionField) -> Vec<SpatialField> {
    let basis = g.space().basis();
    (0..basis.dim()).map(|i| g.hermite_slice(basis.unit(i))).collect()
}

pub fn moments(g: &DistributionField) -> (SpatialField, Vec<SpatialField>) {
    (density(g), momentum(g))
}

fn keep_columns(g: &DistributionField, keep: impl Fn(usize) -> bool) -> DistributionField {
    let mut out = g.coeffs().clone();
    for (n, mut col) in out.columns_mut().into_iter().enumerate() {
        if !keep(n) {
            col.fill(Complex64::new(0.0, 0.0));
        }
    }
    SpectralField::from_coeffs_unchecked(g.space(), out)
}

/// `P₀g = a√M`.
pub fn project_p0(g: &DistributionField) -> DistributionField {
    keep_columns(g, |n| n == 0)
}

/// `P₁g = v·b√M`.
pub fn project_p1(g: &DistributionField) -> DistributionField {
    let degrees = g.space().basis().degrees();
    keep_columns(g, |n| degrees[n] == 1)
}

/// `Pg = (a + v·b)√M`.
pub fn project_macro(g: &DistributionField) -> DistributionField {
    let degrees = g.space().basis().degrees();
    keep_columns(g, |n| degrees[n] <= 1)
}

/// `(I - P)g`.
pub fn project_micro(g: &DistributionField) -> DistributionField {
    let degrees = g.space().basis().degrees();
    keep_columns(g, |n| degrees[n] >= 2)
}

/// `(I - P₀)g`.
pub fn project_non_density(g: &DistributionField) -> DistributionField {
    keep_columns(g, |n| n != 0)
}

/// `Γ_ij[g] = ∫ g (v_i v_j - δ_ij) √M dv`.
pub fn gamma_moment(g: &DistributionField, i: usize, j: usize) -> Result<SpatialField> {
    let basis = g.space().basis();
    let d = basis.dim();
    if i >= d || j >= d {
        return Err(Error::config(format!(
            "stress indices ({i}, {j}) out of range for dimension {d}"
        )));
    }
    let mut idx = vec![0; d];
    idx[i] += 1;
    idx[j] += 1;
    // (v_i² - 1)√M = √2 ψ_{2e_i};  v_i v_j √M = ψ_{e_i + e_j}.
    let weight = if i == j { std::f64::consts::SQRT_2 } else { 1.0 };
    Ok(g.hermite_slice(basis.flat_index(&idx)).scaled(weight))
}

/// Solve `-Δφ = a` on the torus with zero-mean `φ`.
pub fn solve_poisson(a: &SpatialField) -> Result<Potential> {
    let mean = a.mean();
    if mean.abs() > NEUTRALITY_TOL {
        return Err(Error::NonzeroMean { mean });
    }
    let space = a.space();
    let mut coeffs = a.coeffs().clone();
    coeffs[0] = Complex64::new(0.0, 0.0);
    for m in 1..coeffs.len() {
        coeffs[m] /= space.k_squared(m);
    }
    let phi = SpatialField::from_coeffs(space, coeffs)?;
    let grad_phi = (0..space.dim()).map(|i| phi.derivative(i)).collect();
    Ok(Potential { phi, grad_phi })
}

/// Switches for the physical terms of the kinetic right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Physics {
    pub transport: bool,
    pub field: bool,
}

impl Default for Physics {
    fn default() -> Self {
        Self {
            transport: true,
            field: true,
        }
    }
}

pub(crate) fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::config(format!("epsilon must be positive, got {eps}")));
    }
    Ok(())
}

/// `Σ_i ∂_iφ (v_i/2 - ∂_{v_i})(√M + g)`: the linear source and the nonlinear
/// field coupling together, without the `1/ε` prefactor.
pub fn field_coupling(g: &DistributionField, grad_phi: &[SpatialField]) -> Result<DistributionField> {
    let space = g.space();
    let basis = space.basis();
    let mut out = SpectralField::zeros(space);
    for (i, dphi) in grad_phi.iter().enumerate() {
        let raised = g.hermite_shift_apply(i, ShiftKind::Raising)?;
        let prod = raised.multiply_by_spatial(dphi);
        *out.coeffs_mut() += prod.coeffs();
        let mut col = out.coeffs_mut().column_mut(basis.unit(i));
        col += dphi.coeffs();
    }
    Ok(out)
}

/// `Σ_i ∂_{x_i}(v_i g)`.
pub fn transport(g: &DistributionField) -> Result<DistributionField> {
    let space = g.space();
    let mut out = SpectralField::zeros(space);
    for i in 0..space.dim() {
        let vg = g.hermite_shift_apply(i, ShiftKind::MultiplyByV)?;
        *out.coeffs_mut() += vg.spatial_derivative(i)?.coeffs();
    }
    Ok(out)
}

/// `∂_t g = -(1/ε) v·∇_x g - (1/ε) ∇φ·(v/2 - ∂_v)(√M + g) - (1/ε²) L g`.
pub fn vpfp_rhs(g: &DistributionField, fields: &MacroFields, eps: f64, physics: Physics) -> Result<DistributionField> {
    check_epsilon(eps)?;
    let mut out = apply_l(g).scaled(-1.0 / (eps * eps));
    if physics.transport {
        *out.coeffs_mut() -= &(transport(g)?.coeffs() / eps);
    }
    if physics.field {
        *out.coeffs_mut() -= &(field_coupling(g, &fields.grad_phi)?.coeffs() / eps);
    }
    Ok(out)
}

/// Terms of the coercivity estimate for `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coercivity {
    /// `⟨Lg, g⟩`
    pub dirichlet: f64,
    /// `‖(I - P)g‖²_{L²_{x,v}}`
    pub micro_l2_sq: f64,
    /// `‖(I - P)g‖²_ν`
    pub micro_nu_sq: f64,
    /// `‖b‖²_{L²_x}`
    pub b_sq: f64,
}

impl Coercivity {
    /// `⟨Lg,g⟩ - ‖(I-P)g‖² - ‖b‖²`, non-negative for every `g`.
    pub fn l2_margin(&self) -> f64 {
        self.dirichlet - self.micro_l2_sq - self.b_sq
    }

    /// Largest `C` with `C‖(I-P)g‖²_ν + ‖b‖² ≤ ⟨Lg,g⟩` for this `g`.
    pub fn nu_constant(&self) -> Option<f64> {
        (self.micro_nu_sq > 0.0).then(|| (self.dirichlet - self.b_sq) / self.micro_nu_sq)
    }
}

pub fn coercivity_gap(g: &DistributionField) -> Coercivity {
    let micro = project_micro(g);
    let b_sq = momentum(g).iter().map(SpatialField::norm_sq).sum();
    Coercivity {
        dirichlet: apply_l(g).inner(g),
        micro_l2_sq: micro.norm_sq(),
        micro_nu_sq: nu_norm_sq(&micro),
        b_sq,
    }
}

/// `Σ_n profile_n(x) ψ_n(v)` with a single spatial profile on one Hermite mode.
pub fn single_mode(space: &Arc<Discretization>, hermite: &[usize], profile: &SpatialField) -> DistributionField {
    let n = space.basis().flat_index(hermite);
    SpectralField::from_slices(space, &[(n, profile)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{hermite_functions, maxwellian, quadrature_oracle_moment, sqrt_maxwellian};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn space() -> Arc<Discretization> {
        Discretization::build(1, 16, 8, 2.0 * PI).unwrap()
    }

    fn random(seed: u64) -> DistributionField {
        SpectralField::random(&space(), &mut ChaCha8Rng::seed_from_u64(seed), 5)
    }

    fn close(a: &SpectralField, b: &SpectralField, tol: f64) -> bool {
        (a.coeffs() - b.coeffs()).iter().all(|c| c.norm() <= tol)
    }

    #[test]
    fn l_annihilates_equilibrium_and_fixes_momentum_mode() {
        let s = space();
        let one = SpatialField::from_fn(&s, |_| 1.0);
        let eq = single_mode(&s, &[0], &one);
        assert!(apply_l(&eq).coeffs().iter().all(|c| c.norm() == 0.0));
        let vm = single_mode(&s, &[1], &one);
        assert!(close(&apply_l(&vm), &vm, 1e-12));
    }

    /// Strong form `-(1/√M) d/dv (M d/dv (g/√M))` by nested five-point
    /// differences, integrated against `ψ_n` with Gauss–Hermite weights.
    fn dirichlet_oracle(n: usize) -> f64 {
        let he = |v: f64| -> f64 {
            match n {
                0 => 1.0,
                1 => v,
                2 => (v * v - 1.0) / 2f64.sqrt(),
                3 => (v.powi(3) - 3.0 * v) / 6f64.sqrt(),
                4 => (v.powi(4) - 6.0 * v * v + 3.0) / 24f64.sqrt(),
                5 => (v.powi(5) - 10.0 * v.powi(3) + 15.0 * v) / 120f64.sqrt(),
                _ => unreachable!(),
            }
        };
        let h = 2e-3;
        let d5 = |f: &dyn Fn(f64) -> f64, v: f64| {
            (-f(v + 2.0 * h) + 8.0 * f(v + h) - 8.0 * f(v - h) + f(v - 2.0 * h)) / (12.0 * h)
        };
        let flux = |v: f64| maxwellian(v) * d5(&he, v);
        let rule = crate::spectral::GaussHermite::new(16);
        rule.nodes()
            .iter()
            .zip(rule.function_weights())
            .map(|(&v, &w)| {
                let lg = -d5(&flux, v) / sqrt_maxwellian(v);
                w * lg * he(v) * sqrt_maxwellian(v)
            })
            .sum()
    }

    #[test]
    fn dirichlet_form_matches_finite_difference_oracle() {
        for n in 0..=5 {
            let q = dirichlet_oracle(n);
            assert!((q - n as f64).abs() < 1e-8, "n={n}: {q}");
        }
    }

    #[test]
    fn moments_of_simple_fields() {
        let s = space();
        let g = single_mode(&s, &[0], &SpatialField::from_fn(&s, |x| x[0].cos()));
        let (a, b) = moments(&g);
        for (j, v) in a.values().iter().enumerate() {
            assert!((v - s.grid().point(j)[0].cos()).abs() < 1e-14);
        }
        assert!(b[0].values().iter().all(|v| v.abs() < 1e-15));
        let g = single_mode(&s, &[1], &SpatialField::from_fn(&s, |x| x[0].sin()));
        let (a, b) = moments(&g);
        assert!(a.values().iter().all(|v| v.abs() < 1e-15));
        for (j, v) in b[0].values().iter().enumerate() {
            assert!((v - s.grid().point(j)[0].sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn moments_match_quadrature_oracle() {
        let g = random(2);
        let values = g.inverse_transform();
        let s = g.space();
        let a = quadrature_oracle_moment(s, &values, |v| sqrt_maxwellian(v[0])).unwrap();
        let b = quadrature_oracle_moment(s, &values, |v| v[0] * sqrt_maxwellian(v[0])).unwrap();
        let gam =
            quadrature_oracle_moment(s, &values, |v| (v[0] * v[0] - 1.0) * sqrt_maxwellian(v[0])).unwrap();
        let (ma, mb) = moments(&g);
        let mg = gamma_moment(&g, 0, 0).unwrap();
        for (want, got) in [(a, ma.values()), (b, mb[0].values()), (gam, mg.values())] {
            for (x, y) in want.iter().zip(&got) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn gamma_of_basis_elements() {
        let s = space();
        let one = SpatialField::from_fn(&s, |_| 1.0);
        assert!(gamma_moment(&single_mode(&s, &[0], &one), 0, 0).unwrap().norm() == 0.0);
        assert!(gamma_moment(&single_mode(&s, &[1], &one), 0, 0).unwrap().norm() == 0.0);
        let g2 = gamma_moment(&single_mode(&s, &[2], &one), 0, 0).unwrap();
        assert!((g2.mean() - 2f64.sqrt()).abs() < 1e-15);
        // Quadrature confirmation of ∫ ψ_2 (v² - 1) √M dv.
        let rule = crate::spectral::GaussHermite::new(8);
        let q: f64 = rule
            .nodes()
            .iter()
            .zip(rule.function_weights())
            .map(|(&v, &w)| w * hermite_functions(v, 3)[2] * (v * v - 1.0) * sqrt_maxwellian(v))
            .sum();
        assert!((q - 2f64.sqrt()).abs() < 1e-13);
        assert!(gamma_moment(&single_mode(&s, &[2], &one), 1, 0).is_err());
    }

    #[test]
    fn poisson_eigenfunctions() {
        let s = space();
        for (k, scale) in [(1.0, 1.0), (2.0, 0.25)] {
            let a = SpatialField::from_fn(&s, |x| (k * x[0]).cos());
            let p = solve_poisson(&a).unwrap();
            for (j, v) in p.phi.values().iter().enumerate() {
                assert!((v - scale * (k * s.grid().point(j)[0]).cos()).abs() < 1e-12);
            }
            let resid = p.phi.laplacian().add(&a).norm();
            assert!(resid <= 1e-12 * a.norm());
        }
        let z = solve_poisson(&SpatialField::zeros(&s)).unwrap();
        assert_eq!(z.phi.norm(), 0.0);
    }

    #[test]
    fn poisson_rejects_charged_source() {
        let s = space();
        let a = SpatialField::from_fn(&s, |x| 0.5 + x[0].cos());
        match solve_poisson(&a) {
            Err(Error::NonzeroMean { mean }) => assert!((mean - 0.5).abs() < 1e-14),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rhs_of_zero_is_zero() {
        let s = space();
        let g = SpectralField::zeros(&s);
        let f = MacroFields::from_distribution(&g).unwrap();
        let r = vpfp_rhs(&g, &f, 0.3, Physics::default()).unwrap();
        assert!(r.coeffs().iter().all(|c| c.norm() == 0.0));
        assert!(vpfp_rhs(&g, &f, 0.0, Physics::default()).is_err());
    }

    #[test]
    fn rhs_of_local_equilibrium_is_macro_flux() {
        let s = space();
        let rho = SpatialField::from_fn(&s, |x| 0.1 * (2.0 * x[0]).cos());
        let g = single_mode(&s, &[0], &rho);
        let f = MacroFields::from_distribution(&g).unwrap();
        let r = vpfp_rhs(&g, &f, 1.0, Physics::default()).unwrap();
        assert!(r.hermite_slice(0).coeffs().iter().all(|c| c.norm() < 1e-15));
        // ρ = 0.1cos2x, φ = 0.025cos2x:
        // ∂ρ + ∂φ + ρ∂φ = -0.25 sin2x - 0.0025 sin4x.
        let want = |x: f64| 0.25 * (2.0 * x).sin() + 0.0025 * (4.0 * x).sin();
        for (j, v) in r.hermite_slice(1).values().iter().enumerate() {
            assert!((v - want(s.grid().point(j)[0])).abs() < 1e-14);
        }
        // Quadrature cross-check of the n=1 slice from nodal values of the rhs.
        let vals = r.inverse_transform();
        let q = quadrature_oracle_moment(&s, &vals, |v| v[0] * sqrt_maxwellian(v[0])).unwrap();
        for (j, v) in q.iter().enumerate() {
            assert!((v - want(s.grid().point(j)[0])).abs() < 1e-13);
        }
    }

    #[test]
    fn coercivity_examples() {
        let s = space();
        let cos = SpatialField::from_fn(&s, |x| x[0].cos());
        let c = coercivity_gap(&single_mode(&s, &[0], &cos));
        assert_eq!((c.dirichlet, c.micro_l2_sq, c.b_sq), (0.0, 0.0, 0.0));
        let c = coercivity_gap(&single_mode(&s, &[1], &cos));
        assert!((c.dirichlet - c.b_sq).abs() < 1e-12 * c.b_sq);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn projection_algebra(seed in any::<u64>()) {
            let g = random(seed);
            let p = project_macro(&g);
            let q = project_micro(&g);
            prop_assert!(close(&project_macro(&p), &p, 0.0));
            prop_assert!(close(&project_micro(&q), &q, 0.0));
            prop_assert!(close(&project_non_density(&q), &q, 0.0));
            prop_assert!(project_macro(&q).coeffs().iter().all(|c| c.norm() == 0.0));
            prop_assert!(close(&p.add(&q), &g, 0.0));
            prop_assert!(close(&project_p0(&g).add(&project_p1(&g)), &p, 0.0));
        }

        #[test]
        fn l2_coercivity_holds(seed in any::<u64>()) {
            let c = coercivity_gap(&random(seed));
            prop_assert!(c.l2_margin() >= -1e-12 * c.dirichlet);
            prop_assert!(c.nu_constant().unwrap() > 0.0);
        }

        #[test]
        fn dissipation_is_nonpositive(seed in any::<u64>()) {
            let g = random(seed);
            let f = MacroFields::from_distribution(&project_non_density(&g)).unwrap();
            let r = vpfp_rhs(&g, &f, 0.7, Physics { transport: false, field: false }).unwrap();
            prop_assert!(r.inner(&g) <= 0.0);
        }

        #[test]
        fn density_flux_is_divergence_of_momentum(seed in any::<u64>(), eps in 0.05f64..1.0) {
            let g = project_non_density(&random(seed));
            let f = MacroFields::from_distribution(&g).unwrap();
            let r = vpfp_rhs(&g, &f, eps, Physics::default()).unwrap();
            let want = momentum(&g)[0].derivative(0).scaled(-1.0 / eps);
            let got = r.hermite_slice(0);
            prop_assert_eq!(got.coeffs()[0], Complex64::new(0.0, 0.0));
            for (a, b) in got.coeffs().iter().zip(want.coeffs()) {
                prop_assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
            }
        }

        #[test]
        fn poincare_inequality(seed in any::<u64>()) {
            let mut a = random(seed).hermite_slice(0);
            a.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
            prop_assert!(a.norm() <= a.derivative(0).norm() * (1.0 + 1e-14));
        }
    }
}
