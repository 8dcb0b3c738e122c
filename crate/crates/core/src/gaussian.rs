//! Free-particle placement channel.
//!
//! Alice places a particle of mass `m` at position `x0` with a Gaussian
//! wavefunction of variance `sigma2`. Free evolution spreads the packet, and
//! Bob's position measurement after a delay `t` sees an additive Gaussian noise
//! whose variance grows quadratically in time. The channel capacity under a
//! second-moment constraint `E[X^2] <= P` is then the Gaussian-channel formula.

use num_complex::Complex;

use crate::scalar::Real;
use crate::units::Constants;
use crate::{Error, Result};

/// Alice's initial wavepacket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPrep<T> {
    x0: T,
    sigma2: T,
    mass: T,
}

impl<T: Real> GaussianPrep<T> {
    pub fn new(x0: T, sigma2: T, mass: T) -> Result<Self> {
        if !x0.is_finite() {
            return Err(Error::invalid("x0", "must be finite"));
        }
        if !(sigma2 > T::zero()) || !sigma2.is_finite() {
            return Err(Error::invalid("sigma2", "must be positive and finite"));
        }
        if !(mass > T::zero()) || !mass.is_finite() {
            return Err(Error::invalid("mass", "must be positive and finite"));
        }
        Ok(GaussianPrep { x0, sigma2, mass })
    }

    #[inline]
    pub fn x0(&self) -> T {
        self.x0
    }

    #[inline]
    pub fn sigma2(&self) -> T {
        self.sigma2
    }

    #[inline]
    pub fn mass(&self) -> T {
        self.mass
    }

    /// Parameters of the evolved packet at time `t`.
    pub fn complex_params(&self, t: T, c: &Constants<T>) -> Result<ComplexDensityParams<T>> {
        check_time(t)?;
        Ok(ComplexDensityParams {
            center: self.x0,
            complex_width: Complex::new(self.sigma2, c.hbar() * t / (T::two() * self.mass)),
            time: t,
        })
    }
}

/// The evolved packet written as a Gaussian with a complex width
/// `sigma2 + i hbar t / 2m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexDensityParams<T> {
    pub center: T,
    pub complex_width: Complex<T>,
    pub time: T,
}

fn check_time<T: Real>(t: T) -> Result<()> {
    if t < T::zero() {
        return Err(Error::NegativeTime(t.to_f64_lossy()));
    }
    if !t.is_finite() {
        return Err(Error::invalid("t", "must be finite"));
    }
    Ok(())
}

/// Position variance seen by Bob after a delay `t`:
/// `sigma2 + (hbar t / (2 m sigma))^2`.
pub fn noise_variance<T: Real>(prep: &GaussianPrep<T>, t: T, c: &Constants<T>) -> Result<T> {
    check_time(t)?;
    let spread = c.hbar() * t / (T::two() * prep.mass);
    Ok(prep.sigma2 + spread * spread / prep.sigma2)
}

/// Probability density of finding the particle at `x` after a delay `t`.
pub fn density_at<T: Real>(prep: &GaussianPrep<T>, x: T, t: T, c: &Constants<T>) -> Result<T> {
    let var = noise_variance(prep, t, c)?;
    let d = x - prep.x0;
    Ok((-(d * d) / (T::two() * var)).exp() / (T::two() * T::PI() * var).sqrt())
}

/// Closed-form evolved wavefunction `psi(x, t)` (principal square-root branch).
pub fn wavefunction_at<T: Real>(
    prep: &GaussianPrep<T>,
    x: T,
    t: T,
    c: &Constants<T>,
) -> Result<Complex<T>> {
    let params = prep.complex_params(t, c)?;
    let sigma = prep.sigma2.sqrt();
    let prefactor_sq = Complex::new(sigma, c.hbar() * t / (T::two() * prep.mass * sigma))
        * T::TAU().sqrt();
    let d = x - params.center;
    let exponent = Complex::new(-(d * d), T::zero()) / (params.complex_width * T::lit(4.0));
    Ok(exponent.exp() / prefactor_sq.sqrt())
}

/// Gaussian-channel capacity `0.5 ln(1 + P / delta2)` in nats per use.
pub fn capacity_nats<T: Real>(p: T, delta2: T) -> Result<T> {
    if !(delta2 > T::zero()) {
        return Err(Error::NonPositiveNoise(delta2.to_f64_lossy()));
    }
    if p < T::zero() || !p.is_finite() {
        return Err(Error::invalid("P", "signal constraint must be non-negative and finite"));
    }
    Ok(T::half() * (p / delta2).ln_1p())
}

/// Preparation variance `hbar t / 2m` that minimises the noise at delay `t`.
///
/// At this variance the noise equals `hbar t / m`, twice the returned value.
pub fn optimal_sigma2<T: Real>(t: T, mass: T, c: &Constants<T>) -> Result<T> {
    if !(t > T::zero()) {
        return Err(Error::invalid("t", "optimal variance needs a positive delay"));
    }
    if !(mass > T::zero()) {
        return Err(Error::invalid("mass", "must be positive"));
    }
    Ok(c.hbar() * t / (T::two() * mass))
}

/// Timing and displacement budget for repeatedly placing particles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBudget<T> {
    prep_time: T,
    measure_delay: T,
    mass: T,
    mean_square_x: T,
}

impl<T: Real> PowerBudget<T> {
    /// `prep_time` is the time `T` taken to move the particle into place,
    /// `measure_delay` the wait `t` before measurement, `mean_square_x` is `E[X^2]`.
    pub fn new(prep_time: T, measure_delay: T, mass: T, mean_square_x: T) -> Result<Self> {
        if !(prep_time > T::zero()) {
            return Err(Error::invalid("prep_time", "must be positive"));
        }
        if measure_delay < T::zero() {
            return Err(Error::NegativeTime(measure_delay.to_f64_lossy()));
        }
        if !(mass > T::zero()) {
            return Err(Error::invalid("mass", "must be positive"));
        }
        if mean_square_x < T::zero() {
            return Err(Error::invalid("mean_square_x", "must be non-negative"));
        }
        Ok(PowerBudget {
            prep_time,
            measure_delay,
            mass,
            mean_square_x,
        })
    }

    /// Watts per square metre of mean-square displacement: `m / (2 T^2 (T + t))`.
    pub fn beta(&self) -> T {
        let tp = self.prep_time;
        self.mass / (T::two() * tp * tp * (tp + self.measure_delay))
    }

    /// Minimum average placement power `beta * E[X^2]`.
    pub fn power(&self) -> T {
        self.beta() * self.mean_square_x
    }
}

/// See [`PowerBudget::power`].
pub fn placement_power<T: Real>(b: &PowerBudget<T>) -> T {
    b.power()
}

/// See [`PowerBudget::beta`].
pub fn beta<T: Real>(b: &PowerBudget<T>) -> T {
    b.beta()
}

/// One point of a capacity-versus-precision curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionPoint<T> {
    /// Preparation variance in units of the optimal variance.
    pub sigma2_ratio: T,
    pub capacity: T,
}

/// Capacity at each preparation variance in `sigma2_grid`, for delay `t` and
/// signal constraint `p`.
pub fn capacity_vs_precision_curve<T: Real>(
    t: T,
    mass: T,
    p: T,
    sigma2_grid: &[T],
    c: &Constants<T>,
) -> Result<Vec<PrecisionPoint<T>>> {
    if sigma2_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let vstar = optimal_sigma2(t, mass, c)?;
    sigma2_grid
        .iter()
        .map(|&s2| {
            let prep = GaussianPrep::new(T::zero(), s2, mass)?;
            let delta2 = noise_variance(&prep, t, c)?;
            Ok(PrecisionPoint {
                sigma2_ratio: s2 / vstar,
                capacity: capacity_nats(p, delta2)?,
            })
        })
        .collect()
}

/// Index of the highest-capacity point (first one on ties).
pub fn peak_index<T: Real>(curve: &[PrecisionPoint<T>]) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for (i, pt) in curve.iter().enumerate() {
        match best {
            Some((_, c)) if pt.capacity <= c => {}
            _ => best = Some((i, pt.capacity)),
        }
    }
    best.map(|(i, _)| i)
}

/// `n` logarithmically spaced values over `[lo, hi]` (both endpoints included).
pub fn log_space<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.log10(), hi.log10());
            let steps = T::from_count(n - 1);
            (0..n)
                .map(|i| match i {
                    0 => lo,
                    _ if i == n - 1 => hi,
                    _ => T::lit(10.0).powf(a + (b - a) * T::from_count(i) / steps),
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{constants_for, UnitMode};
    use proptest::prelude::*;

    fn nat() -> Constants<f64> {
        constants_for(UnitMode::Natural)
    }

    fn si() -> Constants<f64> {
        constants_for(UnitMode::Si)
    }

    #[test]
    fn noise_at_zero_time_is_prep_variance() {
        let prep = GaussianPrep::new(0.3, 0.7, 2.0).unwrap();
        assert_eq!(noise_variance(&prep, 0.0, &nat()).unwrap(), 0.7);
    }

    #[test]
    fn noise_hand_value() {
        let prep = GaussianPrep::new(0.0, 1.0, 1.0).unwrap();
        assert!((noise_variance(&prep, 2.0, &nat()).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn noise_at_threshold_is_hbar_t_over_m() {
        let (t, m) = (1.0, 1e-27);
        let c = si();
        let v = optimal_sigma2(t, m, &c).unwrap();
        let prep = GaussianPrep::new(0.0, v, m).unwrap();
        let n = noise_variance(&prep, t, &c).unwrap();
        assert!((n - c.hbar() * t / m).abs() / n < 1e-14);
    }

    #[test]
    fn negative_time_rejected() {
        let prep = GaussianPrep::new(0.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            noise_variance(&prep, -1.0, &nat()),
            Err(Error::NegativeTime(_))
        ));
        assert!(density_at(&prep, 0.0, -1.0, &nat()).is_err());
        assert!(wavefunction_at(&prep, 0.0, -1.0, &nat()).is_err());
    }

    #[test]
    fn invalid_prep_rejected() {
        assert!(GaussianPrep::new(0.0, 0.0, 1.0).is_err());
        assert!(GaussianPrep::new(0.0, 1.0, -1.0).is_err());
        assert!(GaussianPrep::new(f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn density_peak_at_t0() {
        let prep = GaussianPrep::new(1.5, 0.25, 1.0).unwrap();
        let got = density_at(&prep, 1.5, 0.0, &nat()).unwrap();
        let want = 1.0 / (2.0 * std::f64::consts::PI * 0.25).sqrt();
        assert!((got - want).abs() < 1e-15);
    }

    #[test]
    fn density_hand_value() {
        let prep = GaussianPrep::new(0.0, 1.0, 1.0).unwrap();
        // Variance 1.25 after unit time.
        let got = density_at(&prep, 1.0, 1.0, &nat()).unwrap();
        assert!((got - 0.23918683193456397).abs() < 1e-15);
    }

    #[test]
    fn density_normalised_on_grid() {
        let prep = GaussianPrep::new(0.4, 0.5, 1.3).unwrap();
        for &t in &[0.0, 0.5, 3.0] {
            let var = noise_variance(&prep, t, &nat()).unwrap();
            let hw = 10.0 * var.sqrt();
            let n = 20_000;
            let dx = 2.0 * hw / n as f64;
            let total: f64 = (0..n)
                .map(|i| density_at(&prep, 0.4 - hw + i as f64 * dx, t, &nat()).unwrap() * dx)
                .sum();
            assert!((total - 1.0).abs() < 1e-8, "t={t}: {total}");
        }
    }

    #[test]
    fn wavefunction_at_t0_is_real() {
        let prep = GaussianPrep::new(0.0, 0.8, 1.0).unwrap();
        for &x in &[-1.0, 0.0, 0.3, 2.0] {
            let psi = wavefunction_at(&prep, x, 0.0, &nat()).unwrap();
            let want = (2.0 * std::f64::consts::PI * 0.8).powf(-0.25) * (-x * x / (4.0 * 0.8)).exp();
            assert_eq!(psi.im, 0.0);
            assert!((psi.re - want).abs() < 1e-15);
        }
    }

    #[test]
    fn wavefunction_grid_norm() {
        let prep = GaussianPrep::new(0.0, 1.0, 1.0).unwrap();
        for &t in &[0.0, 1.0, 5.0] {
            let hw = 10.0 * noise_variance(&prep, t, &nat()).unwrap().sqrt();
            let n = 20_000;
            let dx = 2.0 * hw / n as f64;
            let total: f64 = (0..n)
                .map(|i| wavefunction_at(&prep, -hw + i as f64 * dx, t, &nat()).unwrap().norm_sqr() * dx)
                .sum();
            assert!((total - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn capacity_values() {
        assert_eq!(capacity_nats(0.0, 3.0).unwrap(), 0.0);
        let e2m1 = std::f64::consts::E.powi(2) - 1.0;
        assert!((capacity_nats(e2m1, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let delta2 = si().hbar() * 1.0 / 1e-27;
        let c = capacity_nats(1.0, delta2).unwrap();
        assert!((c - 8.032480466267351).abs() < 1e-12);
    }

    #[test]
    fn capacity_rejects_bad_noise() {
        assert!(matches!(capacity_nats(1.0, 0.0), Err(Error::NonPositiveNoise(_))));
        assert!(capacity_nats(1.0, -2.0).is_err());
        assert!(capacity_nats(-1.0, 2.0).is_err());
    }

    #[test]
    fn optimal_variance_values() {
        assert_eq!(optimal_sigma2(1.0, 1.0, &nat()).unwrap(), 0.5);
        assert!(optimal_sigma2(0.0, 1.0, &nat()).is_err());
        assert!(optimal_sigma2(1.0, 0.0, &nat()).is_err());

        let c = si();
        let v = optimal_sigma2(1.0, 1e-27, &c).unwrap();
        let length = (2.0 * v).sqrt();
        assert!((length - 3.247417153677673e-4).abs() / length < 1e-12);
    }

    #[test]
    fn optimum_is_strict_minimum() {
        let (t, m) = (1.7, 0.6);
        let v = optimal_sigma2(t, m, &nat()).unwrap();
        let at = |s2: f64| noise_variance(&GaussianPrep::new(0.0, s2, m).unwrap(), t, &nat()).unwrap();
        for d in [0.1, 0.5] {
            assert!(at(v * (1.0 + d)) > at(v));
            assert!(at(v * (1.0 - d)) > at(v));
        }
    }

    #[test]
    fn power_hand_value() {
        let b = PowerBudget::new(1.0, 1.0, 2.0, 4.0).unwrap();
        assert_eq!(placement_power(&b), 2.0);
        assert_eq!(beta(&b), 0.5);
        let zero = PowerBudget::new(1.0, 1.0, 2.0, 0.0).unwrap();
        assert_eq!(zero.power(), 0.0);
        assert!(PowerBudget::new(0.0, 1.0, 2.0, 1.0).is_err());
        assert!(PowerBudget::new(1.0, -1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn log_space_endpoints() {
        let g = log_space(1e-31, 1e-6, 201);
        assert_eq!((g[0], g[200]), (1e-31, 1e-6));
        assert!((g[100] / 10f64.powf(-18.5) - 1.0).abs() < 1e-14);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(log_space(2.0, 3.0, 1), vec![2.0]);
        assert!(log_space(2.0, 3.0, 0).is_empty());
    }

    #[test]
    fn curve_single_point_at_optimum() {
        let (t, m, p) = (1.0, 1.0, 0.8);
        let v = optimal_sigma2(t, m, &nat()).unwrap();
        let curve = capacity_vs_precision_curve(t, m, p, &[v], &nat()).unwrap();
        assert_eq!(curve.len(), 1);
        assert!((curve[0].sigma2_ratio - 1.0).abs() < 1e-15);
        let want = 0.5 * (1.0 + p / (2.0 * v)).ln();
        assert!((curve[0].capacity - want).abs() < 1e-15);
    }

    #[test]
    fn curve_peaks_at_centre_of_symmetric_log_grid() {
        let (t, m) = (2.0, 3.0);
        let v = optimal_sigma2(t, m, &nat()).unwrap();
        let grid: Vec<f64> = log_space(1e-2, 1e2, 401).into_iter().map(|s| s * v).collect();
        let curve = capacity_vs_precision_curve(t, m, 5.0 * v, &grid, &nat()).unwrap();
        assert_eq!(peak_index(&curve), Some(200));
    }

    #[test]
    fn curve_zero_signal_and_errors() {
        let curve = capacity_vs_precision_curve(1.0, 1.0, 0.0, &[0.1, 1.0, 10.0], &nat()).unwrap();
        assert!(curve.iter().all(|p| p.capacity == 0.0));
        assert_eq!(
            capacity_vs_precision_curve(1.0, 1.0, 1.0, &[], &nat()),
            Err(Error::EmptyGrid)
        );
        assert!(capacity_vs_precision_curve(1.0, 1.0, 1.0, &[1.0, -1.0], &nat()).is_err());
    }

    #[test]
    fn threshold_scales_with_hbar() {
        let base = optimal_sigma2(1.0, 1e-27, &si()).unwrap();
        for k in 1..6 {
            let scale = 10f64.powi(-k);
            let c = Constants::with_hbar(si().hbar() * scale, UnitMode::Si).unwrap();
            let v = optimal_sigma2(1.0, 1e-27, &c).unwrap();
            assert!((v / base - scale).abs() / scale < 1e-14);
        }
    }

    #[test]
    fn generic_over_f32() {
        let c = constants_for::<f32>(UnitMode::Natural);
        let prep = GaussianPrep::new(0.0f32, 1.0, 1.0).unwrap();
        assert!((noise_variance(&prep, 2.0, &c).unwrap() - 2.0).abs() < 1e-6);
        let psi = wavefunction_at(&prep, 1.0, 1.0, &c).unwrap();
        let d = density_at(&prep, 1.0, 1.0, &c).unwrap();
        assert!((psi.norm_sqr() - d).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn noise_bounded_below_by_threshold(s2 in 1e-3f64..1e3, t in 1e-3f64..1e2, m in 1e-2f64..1e2) {
            let c = nat();
            let n = noise_variance(&GaussianPrep::new(0.0, s2, m).unwrap(), t, &c).unwrap();
            let floor = c.hbar() * t / m;
            prop_assert!(n >= floor * (1.0 - 1e-12));
        }

        #[test]
        fn modulus_matches_density(x in -10.0f64..10.0, t in 0.0f64..10.0, s2 in 0.05f64..5.0, m in 0.1f64..5.0) {
            let c = nat();
            let prep = GaussianPrep::new(0.2, s2, m).unwrap();
            let psi = wavefunction_at(&prep, x, t, &c).unwrap();
            let d = density_at(&prep, x, t, &c).unwrap();
            prop_assert!((psi.norm_sqr() - d).abs() < 1e-12);
        }

        #[test]
        fn capacity_monotone(p in 1e-3f64..1e3, d in 1e-3f64..1e3, f in 1.01f64..10.0) {
            prop_assert!(capacity_nats(p, d * f).unwrap() < capacity_nats(p, d).unwrap());
            prop_assert!(capacity_nats(p * f, d).unwrap() > capacity_nats(p, d).unwrap());
        }

        #[test]
        fn capacity_non_increasing_in_time(s2 in 0.01f64..10.0, t in 0.0f64..10.0, dt in 0.0f64..10.0) {
            let c = nat();
            let prep = GaussianPrep::new(0.0, s2, 1.0).unwrap();
            let c1 = capacity_nats(1.0, noise_variance(&prep, t, &c).unwrap()).unwrap();
            let c2 = capacity_nats(1.0, noise_variance(&prep, t + dt, &c).unwrap()).unwrap();
            prop_assert!(c2 <= c1);
        }

        #[test]
        fn power_is_beta_times_second_moment(tp in 1e-3f64..10.0, td in 0.0f64..10.0, m in 1e-3f64..10.0, x2 in 1e-3f64..10.0) {
            let b = PowerBudget::new(tp, td, m, x2).unwrap();
            prop_assert!((b.power() / x2 - b.beta()).abs() <= 1e-12 * b.beta());
        }
    }

    #[test]
    fn noise_unimodal_on_sampled_grid() {
        let (t, m) = (1.0, 1.0);
        let v = optimal_sigma2(t, m, &nat()).unwrap();
        let grid: Vec<f64> = log_space(v * 1e-3, v * 1e3, 601);
        let noise: Vec<f64> = grid
            .iter()
            .map(|&s| noise_variance(&GaussianPrep::new(0.0, s, m).unwrap(), t, &nat()).unwrap())
            .collect();
        for i in 1..grid.len() {
            if grid[i] <= v {
                assert!(noise[i] < noise[i - 1]);
            } else if grid[i - 1] >= v {
                assert!(noise[i] > noise[i - 1]);
            }
        }
    }
}
