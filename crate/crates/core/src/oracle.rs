//! Brute-force numerical oracles for the closed forms.
//!
//! Free-particle evolution is done spectrally on a periodic grid: every Fourier
//! mode `exp(ikx)` is an energy eigenfunction with `E = hbar^2 k^2 / 2m`, so the
//! propagator is diagonal in `k`. Two-level evolution is done by numerically
//! diagonalising the 2x2 Hamiltonian with a Jacobi rotation, independent of the
//! closed-form eigenpairs in [`crate::two_level`].

use num_complex::Complex;
use rustfft::{FftNum, FftPlanner};

use crate::gaussian::{density_at, noise_variance, GaussianPrep};
use crate::scalar::Real;
use crate::two_level::{TwoLevelHamiltonian, TwoLevelState};
use crate::units::{Constants, UnitMode};
use crate::{Error, Result};

/// Default domain half-width, in standard deviations of the most spread state.
pub const DEFAULT_HALF_WIDTH: f64 = 10.0;
/// Default grid size.
pub const DEFAULT_POINTS: usize = 1 << 12;
/// Largest probability mass allowed outside the domain.
pub const MAX_TAIL_MASS: f64 = 1e-6;

/// Wavefunction samples on a uniform periodic grid `x_j = x_min + j dx`,
/// `dx = (x_max - x_min) / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState<T> {
    x_min: T,
    x_max: T,
    amps: Vec<Complex<T>>,
    mode: UnitMode,
}

impl<T: Real> GridState<T> {
    pub fn new(x_min: T, x_max: T, amps: Vec<Complex<T>>, mode: UnitMode) -> Result<Self> {
        if !(x_max > x_min) {
            return Err(Error::invalid("x_max", "domain must have positive length"));
        }
        if amps.len() < 2 || !amps.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(amps.len()));
        }
        Ok(GridState {
            x_min,
            x_max,
            amps,
            mode,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    #[inline]
    pub fn x_min(&self) -> T {
        self.x_min
    }

    #[inline]
    pub fn x_max(&self) -> T {
        self.x_max
    }

    #[inline]
    pub fn mode(&self) -> UnitMode {
        self.mode
    }

    #[inline]
    pub fn amps(&self) -> &[Complex<T>] {
        &self.amps
    }

    #[inline]
    pub fn dx(&self) -> T {
        (self.x_max - self.x_min) / T::from_count(self.amps.len())
    }

    pub fn positions(&self) -> impl Iterator<Item = T> + '_ {
        let dx = self.dx();
        (0..self.amps.len()).map(move |j| self.x_min + T::from_count(j) * dx)
    }

    /// `|psi_j|^2` at each grid point.
    pub fn densities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `sum |psi|^2 dx`.
    pub fn norm(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<T>() * self.dx()
    }

    /// `sum x |psi|^2 dx`.
    pub fn mean(&self) -> T {
        let dx = self.dx();
        self.positions()
            .zip(&self.amps)
            .map(|(x, a)| x * a.norm_sqr())
            .sum::<T>()
            * dx
    }
}

/// Position variance `sum x^2 |psi|^2 dx - (sum x |psi|^2 dx)^2`.
///
/// Computed about the grid mean to avoid cancellation for off-centre packets.
pub fn grid_variance<T: Real>(g: &GridState<T>) -> T {
    let dx = g.dx();
    let mean = g.mean();
    g.positions()
        .zip(g.amps())
        .map(|(x, a)| (x - mean) * (x - mean) * a.norm_sqr())
        .sum::<T>()
        * dx
}

/// Samples the initial Gaussian on a grid wide enough for the packet at
/// `t_max`, with the default half-width of ten standard deviations.
pub fn discretize<T: Real>(
    prep: &GaussianPrep<T>,
    t_max: T,
    n: usize,
    c: &Constants<T>,
) -> Result<GridState<T>> {
    discretize_with_half_width(prep, t_max, n, T::lit(DEFAULT_HALF_WIDTH), c)
}

/// Like [`discretize`] with the domain half-width given in standard
/// deviations of the packet at `t_max`.
pub fn discretize_with_half_width<T: Real>(
    prep: &GaussianPrep<T>,
    t_max: T,
    n: usize,
    half_width: T,
    c: &Constants<T>,
) -> Result<GridState<T>> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    if !(half_width > T::zero()) {
        return Err(Error::invalid("half_width", "must be positive"));
    }
    let spread = noise_variance(prep, t_max, c)?.sqrt();
    let hw = half_width * spread;
    let (x_min, x_max) = (prep.x0() - hw, prep.x0() + hw);
    let dx = (x_max - x_min) / T::from_count(n);

    let inside: T = (0..n)
        .map(|j| density_at(prep, x_min + T::from_count(j) * dx, t_max, c))
        .sum::<Result<T>>()?
        * dx;
    let tail_mass = (T::one() - inside).to_f64_lossy();
    if tail_mass > MAX_TAIL_MASS {
        return Err(Error::DomainTooSmall { tail_mass });
    }

    let s2 = prep.sigma2();
    let amplitude = (T::two() * T::PI() * s2).powf(-T::lit(0.25));
    let mut amps: Vec<Complex<T>> = (0..n)
        .map(|j| {
            let d = x_min + T::from_count(j) * dx - prep.x0();
            Complex::new(amplitude * (-(d * d) / (T::lit(4.0) * s2)).exp(), T::zero())
        })
        .collect();
    let norm = (amps.iter().map(|a| a.norm_sqr()).sum::<T>() * dx).sqrt();
    for a in &mut amps {
        *a = *a / norm;
    }
    GridState::new(x_min, x_max, amps, c.mode())
}

/// Free-particle dispersion on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPlan<T> {
    wavenumbers: Vec<T>,
    mass: T,
    hbar: T,
}

impl<T: Real> SpectralPlan<T> {
    /// Wavenumbers in FFT order: `2 pi j / L` for `j < n/2`, `2 pi (j - n) / L` after.
    pub fn new(n: usize, dx: T, mass: T, c: &Constants<T>) -> Result<Self> {
        if !(mass > T::zero()) {
            return Err(Error::invalid("mass", "must be positive"));
        }
        let dk = T::TAU() / (T::from_count(n) * dx);
        let wavenumbers = (0..n)
            .map(|j| {
                if j < n / 2 {
                    T::from_count(j) * dk
                } else {
                    -(T::from_count(n - j) * dk)
                }
            })
            .collect();
        Ok(SpectralPlan {
            wavenumbers,
            mass,
            hbar: c.hbar(),
        })
    }

    #[inline]
    pub fn wavenumbers(&self) -> &[T] {
        &self.wavenumbers
    }

    /// Kinetic energy `hbar^2 k^2 / 2m` of mode `k`.
    #[inline]
    pub fn energy(&self, k: T) -> T {
        self.hbar * self.hbar * k * k / (T::two() * self.mass)
    }

    /// Per-mode factors `exp(-i E(k) t / hbar)`.
    pub fn phases(&self, t: T) -> Vec<Complex<T>> {
        self.wavenumbers
            .iter()
            .map(|&k| Complex::new(T::zero(), -self.energy(k) * t / self.hbar).exp())
            .collect()
    }
}

/// Evolves `g` freely for a time `t` by scaling each Fourier mode by its phase.
pub fn propagate_spectral<T: Real + FftNum>(
    g: &GridState<T>,
    mass: T,
    t: T,
    c: &Constants<T>,
) -> Result<GridState<T>> {
    if g.mode() != c.mode() {
        return Err(Error::UnitMismatch {
            state: g.mode(),
            constants: c.mode(),
        });
    }
    if t < T::zero() {
        return Err(Error::NegativeTime(t.to_f64_lossy()));
    }
    let n = g.len();
    let plan = SpectralPlan::new(n, g.dx(), mass, c)?;
    let mut planner = FftPlanner::<T>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);

    let mut buf = g.amps().to_vec();
    forward.process(&mut buf);
    let scale = T::one() / T::from_count(n);
    for (a, ph) in buf.iter_mut().zip(plan.phases(t)) {
        *a = *a * ph * scale;
    }
    inverse.process(&mut buf);
    GridState::new(g.x_min(), g.x_max(), buf, g.mode())
}

/// Eigen-decomposition of a real symmetric 2x2 matrix by one Jacobi rotation.
/// Returns `[(lambda, (u0, u1)); 2]` with orthonormal `u`.
fn jacobi_eigen_2x2<T: Real>(h00: T, h01: T, h11: T) -> [(T, [T; 2]); 2] {
    let theta = (T::two() * h01).atan2(h00 - h11) * T::half();
    let (s, cth) = theta.sin_cos();
    let l1 = h00 * cth * cth + T::two() * h01 * s * cth + h11 * s * s;
    let l2 = h00 * s * s - T::two() * h01 * s * cth + h11 * cth * cth;
    [(l1, [cth, s]), (l2, [-s, cth])]
}

/// `exp(-i H t / hbar) |state>` via numerical diagonalisation.
pub fn unitary_evolve_2x2<T: Real>(
    h: &TwoLevelHamiltonian<T>,
    state: &TwoLevelState<T>,
    t: T,
    c: &Constants<T>,
) -> TwoLevelState<T> {
    let (h00, h01, h11) = h.elements();
    let mut out = [Complex::new(T::zero(), T::zero()); 2];
    for (lambda, u) in jacobi_eigen_2x2(h00, h01, h11) {
        let coeff = state.amp0 * u[0] + state.amp1 * u[1];
        let phased = coeff * Complex::new(T::zero(), -lambda * t / c.hbar()).exp();
        out[0] = out[0] + phased * u[0];
        out[1] = out[1] + phased * u[1];
    }
    TwoLevelState::new(out[0], out[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::two_level::{evolve, PrepBias};
    use crate::units::constants_for;
    use proptest::prelude::*;

    fn nat() -> Constants<f64> {
        constants_for(UnitMode::Natural)
    }

    fn unit_prep() -> GaussianPrep<f64> {
        GaussianPrep::new(0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn discretized_moments() {
        let prep = GaussianPrep::new(0.7, 1.0, 1.0).unwrap();
        let g = discretize(&prep, 2.0, 1 << 12, &nat()).unwrap();
        assert!((g.norm() - 1.0).abs() < 1e-12);
        assert!((g.mean() - 0.7).abs() < g.dx());
        assert!((grid_variance(&g) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn discretize_errors() {
        let prep = unit_prep();
        assert_eq!(discretize(&prep, 1.0, 1000, &nat()), Err(Error::NotPowerOfTwo(1000)));
        assert!(matches!(
            discretize_with_half_width(&prep, 1.0, 1024, 3.0, &nat()),
            Err(Error::DomainTooSmall { .. })
        ));
        assert!(discretize(&prep, -1.0, 1024, &nat()).is_err());
    }

    #[test]
    fn zero_time_is_identity() {
        let g = discretize(&unit_prep(), 1.0, 1 << 10, &nat()).unwrap();
        let out = propagate_spectral(&g, 1.0, 0.0, &nat()).unwrap();
        let diff = g
            .amps()
            .iter()
            .zip(out.amps())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn unit_mismatch_rejected() {
        let g = discretize(&unit_prep(), 1.0, 1 << 10, &nat()).unwrap();
        let si = constants_for::<f64>(UnitMode::Si);
        assert!(matches!(
            propagate_spectral(&g, 1.0, 1.0, &si),
            Err(Error::UnitMismatch { .. })
        ));
        assert!(propagate_spectral(&g, 1.0, -1.0, &nat()).is_err());
    }

    #[test]
    fn spreads_as_closed_form() {
        let prep = unit_prep();
        let c = nat();
        let g = discretize(&prep, 1.0, 1 << 12, &c).unwrap();
        let out = propagate_spectral(&g, 1.0, 1.0, &c).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-10);
        assert!((grid_variance(&out) - 1.25).abs() / 1.25 < 1e-4);
        let sup = out
            .positions()
            .zip(out.densities())
            .map(|(x, d)| (d - density_at(&prep, x, 1.0, &c).unwrap()).abs())
            .fold(0.0, f64::max);
        assert!(sup < 1e-6, "sup {sup}");
    }

    #[test]
    fn composition_law() {
        let c = nat();
        let g = discretize(&unit_prep(), 3.0, 1 << 11, &c).unwrap();
        let two_step = propagate_spectral(&propagate_spectral(&g, 1.0, 1.1, &c).unwrap(), 1.0, 1.9, &c).unwrap();
        let one_step = propagate_spectral(&g, 1.0, 3.0, &c).unwrap();
        let diff = two_step
            .amps()
            .iter()
            .zip(one_step.amps())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-10);
    }

    #[test]
    fn refinement_reduces_error() {
        let prep = GaussianPrep::new(0.0, 0.05, 1.0).unwrap();
        let c = nat();
        let err = |n: usize| {
            let g = discretize(&prep, 1.0, n, &c).unwrap();
            let out = propagate_spectral(&g, 1.0, 1.0, &c).unwrap();
            out.positions()
                .zip(out.densities())
                .map(|(x, d)| (d - density_at(&prep, x, 1.0, &c).unwrap()).abs())
                .fold(0.0, f64::max)
        };
        assert!(err(1 << 9) < err(1 << 8));
    }

    #[test]
    fn narrow_packet_variance() {
        let prep = GaussianPrep::new(0.0, 1e-4, 1.0).unwrap();
        let g = discretize(&prep, 0.0, 1 << 12, &nat()).unwrap();
        assert!((grid_variance(&g) - 1e-4).abs() / 1e-4 < 1e-6);
    }

    #[test]
    fn wavenumbers_and_energy() {
        let plan = SpectralPlan::new(8, 0.5, 2.0, &nat()).unwrap();
        let dk = std::f64::consts::TAU / 4.0;
        let k = plan.wavenumbers();
        assert_eq!(k.len(), 8);
        assert!((k[1] - dk).abs() < 1e-15 && (k[7] + dk).abs() < 1e-15);
        assert!((k[4] + 4.0 * dk).abs() < 1e-15);
        assert!((plan.energy(2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unitary_zero_time_and_diagonal() {
        let c = nat();
        let h = TwoLevelHamiltonian::new(0.5, 1.5, 0.7).unwrap();
        let s = PrepBias::new(0.3).unwrap().state();
        let same = unitary_evolve_2x2(&h, &s, 0.0, &c);
        assert!((same.amp0 - s.amp0).norm() < 1e-15 && (same.amp1 - s.amp1).norm() < 1e-15);

        let diag = TwoLevelHamiltonian::new(1.0, 2.0, 0.0).unwrap();
        for t in [0.5, 3.0, 40.0] {
            let (p0, p1) = unitary_evolve_2x2(&diag, &s, t, &c).populations();
            assert!((p0 - 0.7).abs() < 1e-14 && (p1 - 0.3).abs() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn unitary_matches_closed_form(e in -5.0f64..5.0, d in 0.0f64..5.0, eps in 0.0f64..5.0, p in 0.0f64..=1.0, t in 0.0f64..20.0) {
            let c = nat();
            let h = TwoLevelHamiltonian::new(e, d, eps).unwrap();
            let bias = PrepBias::new(p).unwrap();
            let oracle = unitary_evolve_2x2(&h, &bias.state(), t, &c);
            let closed = evolve(&h, bias, t, &c);
            prop_assert!((oracle.norm_sqr() - 1.0).abs() < 1e-12);
            prop_assert!(oracle.distance_up_to_phase(&closed) < 1e-10);
        }
    }
}
