//! Randomized oracle-equivalence and invariant suites.
//!
//! Each check draws `trials` random parameter sets, records the largest
//! observed deviation, and passes when that deviation does not exceed its
//! tolerance. Tolerances have defaults and can be overridden by name.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::gaussian::{density_at, noise_variance, optimal_sigma2, wavefunction_at, GaussianPrep};
use crate::info::{
    blahut_arimoto, capacity_binary, mutual_information, two_level_capacity, Distribution, Dmc,
    InfoUnit, BA_DEFAULT_MAX_ITER, BA_DEFAULT_TOL,
};
use crate::oracle::{discretize, grid_variance, propagate_spectral, unitary_evolve_2x2, DEFAULT_POINTS};
use crate::two_level::{channel_at, eigensystem, evolve, period, transition_probs, PrepBias, TwoLevelHamiltonian};
use crate::units::{constants_for, Constants, UnitMode};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Gaussian,
    TwoLevel,
    Infotheory,
    All,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Gaussian => "gaussian",
            Suite::TwoLevel => "two_level",
            Suite::Infotheory => "infotheory",
            Suite::All => "all",
        })
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "gaussian" => Ok(Suite::Gaussian),
            "two_level" | "two-level" => Ok(Suite::TwoLevel),
            "infotheory" => Ok(Suite::Infotheory),
            "all" => Ok(Suite::All),
            other => Err(format!("unknown suite `{other}`")),
        }
    }
}

const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("gaussian.threshold_minimum", 1e-12),
    ("gaussian.modulus_density", 1e-12),
    ("gaussian.spectral_density", 1e-6),
    ("gaussian.spectral_variance", 1e-4),
    ("gaussian.spectral_norm", 1e-10),
    ("gaussian.spectral_composition", 1e-10),
    ("two_level.eigen_residual", 1e-12),
    ("two_level.eigen_orthogonality", 1e-12),
    ("two_level.evolve_norm", 1e-12),
    ("two_level.oracle_state", 1e-10),
    ("two_level.oracle_probs", 1e-10),
    ("two_level.closed_form_chain", 1e-12),
    ("two_level.row_sums", 1e-12),
    ("two_level.periodicity", 1e-12),
    ("two_level.phase_invariance", 1e-12),
    ("infotheory.concavity", 1e-12),
    ("infotheory.ternary_vs_blahut_arimoto", 1e-9),
    ("infotheory.ternary_vs_grid", 1e-5),
    ("infotheory.capacity_bounds", 1e-12),
    ("infotheory.capacity_periodicity", 1e-9),
];

/// Named tolerances for every check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances(BTreeMap<String, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances(
            DEFAULT_TOLERANCES
                .iter()
                .map(|&(k, v)| (k.to_string(), v))
                .collect(),
        )
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    /// Overrides one tolerance; unknown names and negative values are rejected.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value >= 0.0) {
            return Err(Error::invalid("tolerance", "must be non-negative"));
        }
        match self.0.get_mut(name) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(Error::invalid("tolerance", format!("unknown check `{name}`"))),
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }
}

/// Result of one named check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub suite: Suite,
    pub trials: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// One cell of the preparation-precision monotonicity scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityCell {
    pub gamma: f64,
    pub t_over_period: f64,
    /// Largest increase of capacity (bits) between consecutive `r0` values.
    pub max_increase: f64,
    /// `r0` at which that largest increase ends.
    pub worst_r0: f64,
    pub monotone: bool,
}

/// Whether two-level capacity is non-increasing in `r0 (1 - r0)` as `r0`
/// sweeps `[0, 1/2]`. Violations are findings and never fail a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub slack: f64,
    pub r0_points: usize,
    pub cells: Vec<MonotonicityCell>,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: Suite,
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<CheckOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monotonicity: Option<MonotonicityReport>,
    pub passed: bool,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Accumulates the worst deviation seen for one check.
struct Tracker {
    name: &'static str,
    suite: Suite,
    trials: usize,
    worst: f64,
}

impl Tracker {
    fn new(name: &'static str, suite: Suite) -> Self {
        Tracker {
            name,
            suite,
            trials: 0,
            worst: 0.0,
        }
    }

    fn observe(&mut self, deviation: f64) {
        self.trials += 1;
        // NaN deviations must fail the check.
        if deviation.is_nan() || deviation > self.worst {
            self.worst = if deviation.is_nan() { f64::INFINITY } else { deviation };
        }
    }

    fn finish(self, tol: &Tolerances) -> CheckOutcome {
        let tolerance = tol.get(self.name);
        CheckOutcome {
            name: self.name.to_string(),
            suite: self.suite,
            trials: self.trials,
            max_deviation: self.worst,
            tolerance,
            passed: self.worst <= tolerance,
        }
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Runs `suite` with `trials` random draws per check.
pub fn run(suite: Suite, seed: u64, trials: usize, tol: &Tolerances) -> Result<Report> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    let mut checks = Vec::new();
    if suite.includes(Suite::Gaussian) {
        checks.extend(gaussian_suite(seed, trials, tol)?);
    }
    if suite.includes(Suite::TwoLevel) {
        checks.extend(two_level_suite(seed, trials, tol)?);
    }
    let monotonicity = if suite.includes(Suite::Infotheory) {
        checks.extend(infotheory_suite(seed, trials, tol)?);
        Some(monotonicity_scan(&default_gammas(), &default_fractions(), 51, 1e-9)?)
    } else {
        None
    };
    let passed = checks.iter().all(|c| c.passed);
    Ok(Report {
        suite,
        seed,
        trials,
        checks,
        monotonicity,
        passed,
    })
}

fn gaussian_suite(seed: u64, trials: usize, tol: &Tolerances) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6761_7573);
    let c = constants_for::<f64>(UnitMode::Natural);
    let s = Suite::Gaussian;
    let mut threshold = Tracker::new("gaussian.threshold_minimum", s);
    let mut modulus = Tracker::new("gaussian.modulus_density", s);
    let mut density = Tracker::new("gaussian.spectral_density", s);
    let mut variance = Tracker::new("gaussian.spectral_variance", s);
    let mut norm = Tracker::new("gaussian.spectral_norm", s);
    let mut compose = Tracker::new("gaussian.spectral_composition", s);

    for _ in 0..trials {
        let mass: f64 = rng.gen_range(0.5..2.0);
        let t: f64 = rng.gen_range(0.01..2.0);
        let sigma2: f64 = rng.gen_range(0.5..2.0);
        let x0: f64 = rng.gen_range(-1.0..1.0);

        // Noise floor: equality at v*, never below it elsewhere.
        let vstar = optimal_sigma2(t, mass, &c)?;
        let floor = c.hbar() * t / mass;
        let at_opt = noise_variance(&GaussianPrep::new(0.0, vstar, mass)?, t, &c)?;
        let anywhere = noise_variance(&GaussianPrep::new(0.0, vstar * rng.gen_range(0.01..100.0), mass)?, t, &c)?;
        threshold.observe(((at_opt - floor).abs() / floor).max((floor - anywhere) / floor));

        let prep = GaussianPrep::new(x0, sigma2, mass)?;
        let x = x0 + rng.gen_range(-6.0..6.0);
        let psi = wavefunction_at(&prep, x, t, &c)?;
        modulus.observe((psi.norm_sqr() - density_at(&prep, x, t, &c)?).abs());

        let t1: f64 = rng.gen_range(0.0..1.0);
        let grid = discretize(&prep, t + t1, DEFAULT_POINTS, &c)?;
        let out = propagate_spectral(&grid, mass, t, &c)?;
        let closed: Vec<f64> = out
            .positions()
            .map(|x| density_at(&prep, x, t, &c))
            .collect::<Result<_>>()?;
        density.observe(max_abs_diff(&out.densities(), &closed));
        let want = noise_variance(&prep, t, &c)?;
        variance.observe((grid_variance(&out) - want).abs() / want);
        norm.observe((out.norm() - grid.norm()).abs());

        let chained = propagate_spectral(&out, mass, t1, &c)?;
        let direct = propagate_spectral(&grid, mass, t + t1, &c)?;
        let gap = chained
            .amps()
            .iter()
            .zip(direct.amps())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        compose.observe(gap);
    }
    Ok([threshold, modulus, density, variance, norm, compose]
        .into_iter()
        .map(|t| t.finish(tol))
        .collect())
}

fn random_hamiltonian(rng: &mut ChaCha8Rng) -> Result<TwoLevelHamiltonian<f64>> {
    TwoLevelHamiltonian::new(
        rng.gen_range(-5.0..5.0),
        rng.gen_range(0.0..5.0),
        rng.gen_range(0.0..5.0),
    )
}

fn two_level_suite(seed: u64, trials: usize, tol: &Tolerances) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7477_6f6c);
    let c = constants_for::<f64>(UnitMode::Natural);
    let s = Suite::TwoLevel;
    let mut residual = Tracker::new("two_level.eigen_residual", s);
    let mut ortho = Tracker::new("two_level.eigen_orthogonality", s);
    let mut norm = Tracker::new("two_level.evolve_norm", s);
    let mut state = Tracker::new("two_level.oracle_state", s);
    let mut probs = Tracker::new("two_level.oracle_probs", s);
    let mut chain = Tracker::new("two_level.closed_form_chain", s);
    let mut rows = Tracker::new("two_level.row_sums", s);
    let mut periodic = Tracker::new("two_level.periodicity", s);
    let mut phase = Tracker::new("two_level.phase_invariance", s);

    for _ in 0..trials {
        let h = random_hamiltonian(&mut rng)?;
        let bias = PrepBias::new(rng.gen_range(0.0..=1.0))?;
        let r0: f64 = rng.gen_range(0.0..=0.5);
        let t: f64 = rng.gen_range(0.0..20.0);

        let es = eigensystem(&h);
        residual.observe(es.residual(&h));
        let dot = es.v_plus[0] * es.v_minus[0] + es.v_plus[1] * es.v_minus[1];
        let unit = (es.v_plus[0].hypot(es.v_plus[1]) - 1.0)
            .abs()
            .max((es.v_minus[0].hypot(es.v_minus[1]) - 1.0).abs());
        ortho.observe(dot.abs().max(unit));

        let closed = evolve(&h, bias, t, &c);
        norm.observe((closed.norm_sqr() - 1.0).abs());
        let oracle = unitary_evolve_2x2(&h, &bias.state(), t, &c);
        state.observe(closed.distance_up_to_phase(&oracle));

        let (p0, p1) = transition_probs(&h, bias, t, &c);
        let (o0, o1) = oracle.populations();
        probs.observe((p0 - o0).abs().max((p1 - o1).abs()));
        let (e0, e1) = closed.populations();
        chain.observe((p0 - e0).abs().max((p1 - e1).abs()));

        let ch = channel_at(&h, r0, t, &c)?.matrix();
        rows.observe(ch.iter().map(|r| (r[0] + r[1] - 1.0).abs()).fold(0.0, f64::max));

        if let Ok(t0) = period(&h, &c) {
            let later = channel_at(&h, r0, t + t0, &c)?.matrix();
            let gap = (0..2)
                .flat_map(|x| (0..2).map(move |y| (x, y)))
                .map(|(x, y)| (ch[x][y] - later[x][y]).abs())
                .fold(0.0, f64::max);
            periodic.observe(gap);
        }

        let shifted = h.shifted(rng.gen_range(-50.0..50.0))?;
        let (q0, q1) = evolve(&shifted, bias, t, &c).populations();
        phase.observe((p0 - q0).abs().max((p1 - q1).abs()));
    }
    Ok([residual, ortho, norm, state, probs, chain, rows, periodic, phase]
        .into_iter()
        .map(|t| t.finish(tol))
        .collect())
}

/// Binary-channel mutual information in nats, for the grid oracle.
fn binary_mi_nats(a: f64, b: f64, q: f64) -> f64 {
    let h = |p: f64| {
        let mut s = 0.0;
        if p > 0.0 {
            s -= p * p.ln();
        }
        if p < 1.0 {
            s -= (1.0 - p) * (1.0 - p).ln();
        }
        s
    };
    h(q * a + (1.0 - q) * b) - q * h(a) - (1.0 - q) * h(b)
}

/// Brute-force capacity (nats) of the channel with rows `(a, 1-a)` and
/// `(b, 1-b)`: maximum of the mutual information over `q = i / steps`.
pub fn grid_capacity_nats(a: f64, b: f64, steps: usize) -> f64 {
    let inv = 1.0 / steps as f64;
    (0..=steps)
        .map(|i| binary_mi_nats(a, b, i as f64 * inv))
        .fold(0.0, f64::max)
}

/// Grid step of the brute-force capacity oracle.
pub const GRID_STEPS: usize = 1_000_000;

fn infotheory_suite(seed: u64, trials: usize, tol: &Tolerances) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x696e_666f);
    let c = constants_for::<f64>(UnitMode::Natural);
    let s = Suite::Infotheory;
    let mut concave = Tracker::new("infotheory.concavity", s);
    let mut ba = Tracker::new("infotheory.ternary_vs_blahut_arimoto", s);
    let mut grid = Tracker::new("infotheory.ternary_vs_grid", s);
    let mut bounds = Tracker::new("infotheory.capacity_bounds", s);
    let mut periodic = Tracker::new("infotheory.capacity_periodicity", s);

    for _ in 0..trials {
        let (a, b): (f64, f64) = (rng.gen(), rng.gen());
        let ch = Dmc::new(vec![vec![a, 1.0 - a], vec![b, 1.0 - b]])?;

        let (q1, q2): (f64, f64) = (rng.gen(), rng.gen());
        let mi = |q: f64| -> Result<f64> {
            mutual_information(&Distribution::binary(q)?, &ch, InfoUnit::Nats)
        };
        let mid = mi((q1 + q2) / 2.0)?;
        concave.observe(((mi(q1)? + mi(q2)?) / 2.0 - mid).max(0.0));

        let tern = capacity_binary(&ch, InfoUnit::Nats)?.capacity;
        let bacap = blahut_arimoto(&ch, BA_DEFAULT_TOL, BA_DEFAULT_MAX_ITER, InfoUnit::Nats)?.capacity;
        ba.observe((tern - bacap).abs());
        let brute = grid_capacity_nats(a, b, GRID_STEPS);
        grid.observe((tern - brute).abs().max((bacap - brute).abs()));

        let h = random_hamiltonian(&mut rng)?;
        let r0: f64 = rng.gen_range(0.0..=0.5);
        let t: f64 = rng.gen_range(0.0..20.0);
        let cap = two_level_capacity(&h, r0, t, &c, InfoUnit::Bits)?.capacity;
        bounds.observe((-cap).max(cap - 1.0).max(0.0));
        if let Ok(t0) = period(&h, &c) {
            let later = two_level_capacity(&h, r0, t + t0, &c, InfoUnit::Bits)?.capacity;
            periodic.observe((cap - later).abs());
        }
    }
    Ok([concave, ba, grid, bounds, periodic]
        .into_iter()
        .map(|t| t.finish(tol))
        .collect())
}

/// Twenty ratios `gamma = D / eps` in `{0, 0.25, ..., 4.75}`.
pub fn default_gammas() -> Vec<f64> {
    (0..20).map(|i| 0.25 * i as f64).collect()
}

/// Twenty delays `t / T0` in `{0, 1/19, ..., 1}`.
pub fn default_fractions() -> Vec<f64> {
    (0..20).map(|i| i as f64 / 19.0).collect()
}

/// Scans two-level capacity over `r0 in [0, 1/2]` (`r0_points` values) for
/// each `(gamma, t / T0)` with `eps = 2 / sqrt(gamma^2 + 4)` in natural units.
/// A cell is monotone when no step in `r0` raises the capacity by more than
/// `slack` bits.
pub fn monotonicity_scan(
    gammas: &[f64],
    fractions: &[f64],
    r0_points: usize,
    slack: f64,
) -> Result<MonotonicityReport> {
    if r0_points < 2 {
        return Err(Error::invalid("r0_points", "need at least two values"));
    }
    let c: Constants<f64> = constants_for(UnitMode::Natural);
    let r0s: Vec<f64> = (0..r0_points)
        .map(|i| 0.5 * i as f64 / (r0_points - 1) as f64)
        .collect();
    let mut cells = Vec::with_capacity(gammas.len() * fractions.len());
    for &gamma in gammas {
        let h = TwoLevelHamiltonian::unit_frequency(gamma)?;
        let t0 = period(&h, &c)?;
        for &frac in fractions {
            let caps: Vec<f64> = r0s
                .iter()
                .map(|&r0| Ok(two_level_capacity(&h, r0, frac * t0, &c, InfoUnit::Bits)?.capacity))
                .collect::<Result<_>>()?;
            let (mut max_increase, mut worst_r0) = (f64::NEG_INFINITY, r0s[1]);
            for (i, w) in caps.windows(2).enumerate() {
                if w[1] - w[0] > max_increase {
                    max_increase = w[1] - w[0];
                    worst_r0 = r0s[i + 1];
                }
            }
            cells.push(MonotonicityCell {
                gamma,
                t_over_period: frac,
                max_increase,
                worst_r0,
                monotone: max_increase <= slack,
            });
        }
    }
    let violations = cells.iter().filter(|c| !c.monotone).count();
    Ok(MonotonicityReport {
        slack,
        r0_points,
        cells,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trials_rejected() {
        assert!(run(Suite::TwoLevel, 1, 0, &Tolerances::default()).is_err());
    }

    #[test]
    fn tolerance_overrides() {
        let mut tol = Tolerances::default();
        assert!(tol.set("two_level.row_sums", 0.0).is_ok());
        assert_eq!(tol.get("two_level.row_sums"), 0.0);
        assert!(tol.set("no.such.check", 1.0).is_err());
        assert!(tol.set("two_level.row_sums", -1.0).is_err());
        assert_eq!(tol.names().count(), DEFAULT_TOLERANCES.len());
    }

    #[test]
    fn two_level_suite_passes() {
        let report = run(Suite::TwoLevel, 42, 200, &Tolerances::default()).unwrap();
        assert!(report.passed, "{:#?}", report.failures().collect::<Vec<_>>());
        assert!(report.monotonicity.is_none());
    }

    #[test]
    fn gaussian_suite_passes() {
        let report = run(Suite::Gaussian, 3, 10, &Tolerances::default()).unwrap();
        assert!(report.passed, "{:#?}", report.failures().collect::<Vec<_>>());
    }

    #[test]
    fn corrupted_tolerance_fails_named_check() {
        let mut tol = Tolerances::default();
        tol.set("two_level.oracle_probs", 1e-300).unwrap();
        let report = run(Suite::TwoLevel, 42, 50, &tol).unwrap();
        assert!(!report.passed);
        let failed: Vec<_> = report.failures().map(|c| c.name.as_str()).collect();
        assert!(failed.contains(&"two_level.oracle_probs"));
    }

    #[test]
    fn deterministic_for_seed() {
        let a = run(Suite::TwoLevel, 9, 30, &Tolerances::default()).unwrap();
        let b = run(Suite::TwoLevel, 9, 30, &Tolerances::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_oracle_values() {
        let bsc = grid_capacity_nats(0.89, 0.11, 1000);
        let want = std::f64::consts::LN_2 - (-(0.11f64 * 0.11f64.ln()) - 0.89 * 0.89f64.ln());
        assert!((bsc - want).abs() < 1e-12);
        assert!(grid_capacity_nats(0.3, 0.3, 100) < 1e-15);
    }

    #[test]
    fn monotonicity_scan_shape() {
        let rep = monotonicity_scan(&[0.0, 1.0], &[0.0, 0.5], 11, 1e-9).unwrap();
        assert_eq!(rep.cells.len(), 4);
        // At t = 0 the channel is BSC(r0), whose capacity falls as r0 grows.
        assert!(rep.cells[0].monotone);
        assert!(monotonicity_scan(&[0.0], &[0.0], 1, 1e-9).is_err());
    }
}
