//! Data generators behind the figure and evolution subcommands.

use clap::{Args, ValueEnum};
use serde::Serialize;

use qcap::gaussian::{
    capacity_nats, capacity_vs_precision_curve, density_at, log_space, noise_variance,
    optimal_sigma2, GaussianPrep,
};
use qcap::info::{two_level_capacity, InfoUnit};
use qcap::two_level::{period, transition_probs, PrepBias, TwoLevelHamiltonian};
use qcap::{Constants, Error, Result, UnitMode};

use crate::output::Table;

#[derive(Debug, Clone, Args, Serialize)]
pub struct FigGaussianArgs {
    /// Signal-to-threshold ratios P / v*.
    #[arg(long = "ratios", value_delimiter = ',', default_value = "0.5,5,50")]
    pub ratios: Vec<f64>,
    /// Number of log-spaced sigma2 / v* points.
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    /// Smallest sigma2 / v*.
    #[arg(long, default_value_t = 1e-2)]
    pub sigma2_min: f64,
    /// Largest sigma2 / v*.
    #[arg(long, default_value_t = 1e2)]
    pub sigma2_max: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    /// Measurement delay t.
    #[arg(long, default_value_t = 1.0)]
    pub time: f64,
}

/// Capacity against preparation variance, one curve per ratio `P / v*`.
pub fn fig_gaussian(args: &FigGaussianArgs, c: &Constants<f64>) -> Result<Table> {
    if args.points == 0 {
        return Err(Error::EmptyGrid);
    }
    if !(args.sigma2_min > 0.0 && args.sigma2_max >= args.sigma2_min) {
        return Err(Error::InvalidParameter {
            name: "sigma2",
            reason: "grid bounds must satisfy 0 < min <= max".into(),
        });
    }
    if args.ratios.is_empty() || args.ratios.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "ratios",
            reason: "need at least one non-negative finite ratio".into(),
        });
    }
    let vstar = optimal_sigma2(args.time, args.mass, c)?;
    let grid: Vec<f64> = log_space(args.sigma2_min, args.sigma2_max, args.points)
        .into_iter()
        .map(|s| s * vstar)
        .collect();
    let mut table = Table::new(vec!["sigma2_over_vstar", "ratio", "capacity_nats"]);
    for &ratio in &args.ratios {
        for pt in capacity_vs_precision_curve(args.time, args.mass, ratio * vstar, &grid, c)? {
            table.push(vec![pt.sigma2_ratio, ratio, pt.capacity]);
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FigTwoLevelArgs {
    /// Ratios gamma = delta / epsilon; epsilon = 2 / sqrt(gamma^2 + 4).
    #[arg(long = "gamma", value_delimiter = ',', default_value = "0,1,2,4")]
    pub gammas: Vec<f64>,
    /// Preparation bias, 0 <= r0 < 1/2.
    #[arg(long, default_value_t = 0.0)]
    pub r0: f64,
    /// Number of linearly spaced delays over one period.
    #[arg(long, default_value_t = 501)]
    pub points: usize,
}

/// Two-level capacity in bits over one oscillation period for each `gamma`.
pub fn fig_two_level(args: &FigTwoLevelArgs, c: &Constants<f64>) -> Result<Table> {
    if args.points < 2 {
        return Err(Error::InvalidParameter {
            name: "points",
            reason: "need at least two delays".into(),
        });
    }
    if !(args.r0 >= 0.0 && args.r0 < 0.5) {
        return Err(Error::InvalidParameter {
            name: "r0",
            reason: "must satisfy 0 <= r0 < 1/2".into(),
        });
    }
    if args.gammas.is_empty() {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: "need at least one value".into(),
        });
    }
    let mut table = Table::new(vec!["gamma", "t", "capacity_bits"]);
    for &gamma in &args.gammas {
        let h = TwoLevelHamiltonian::unit_frequency(gamma)?;
        let t0 = period(&h, c)?;
        for i in 0..args.points {
            let t = t0 * i as f64 / (args.points - 1) as f64;
            let cap = two_level_capacity(&h, args.r0, t, c, InfoUnit::Bits)?;
            table.push(vec![gamma, t, cap.capacity]);
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ContourArgs {
    #[arg(long, default_value_t = 1e-31)]
    pub mass_min: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub mass_max: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub time_min: f64,
    #[arg(long, default_value_t = 1e3)]
    pub time_max: f64,
    /// Points per axis (log-spaced).
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    /// Second-moment constraint P on Alice's placements (m^2).
    #[arg(long = "p-constraint", default_value_t = 1.0)]
    pub p_constraint: f64,
}

/// Capacity at the optimal preparation variance over a mass/delay grid.
pub fn contour(args: &ContourArgs, c: &Constants<f64>) -> Result<Table> {
    if args.points == 0 {
        return Err(Error::EmptyGrid);
    }
    let ranges_ok = args.mass_min > 0.0
        && args.mass_max >= args.mass_min
        && args.time_min > 0.0
        && args.time_max >= args.time_min;
    if !ranges_ok {
        return Err(Error::InvalidParameter {
            name: "range",
            reason: "mass and time ranges must be positive with min <= max".into(),
        });
    }
    let masses = log_space(args.mass_min, args.mass_max, args.points);
    let times = log_space(args.time_min, args.time_max, args.points);
    let mut table = Table::new(vec!["mass", "t", "vstar", "capacity_nats"]);
    for &m in &masses {
        for &t in &times {
            let vstar = optimal_sigma2(t, m, c)?;
            let noise = noise_variance(&GaussianPrep::new(0.0, vstar, m)?, t, c)?;
            table.push(vec![m, t, vstar, capacity_nats(args.p_constraint, noise)?]);
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    Gaussian,
    TwoLevel,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvolveArgs {
    #[arg(long, value_enum)]
    pub channel: ChannelKind,
    /// Delays at which to report the state.
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
    pub times: Vec<f64>,
    /// Interpret `--times` in units of the two-level period T0.
    #[arg(long)]
    pub in_periods: bool,

    #[arg(long, default_value_t = 0.0)]
    pub x0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    /// Spatial samples per delay (gaussian).
    #[arg(long, default_value_t = 201)]
    pub grid_points: usize,
    /// Sampling half-width in standard deviations of the latest packet (gaussian).
    #[arg(long, default_value_t = 5.0)]
    pub half_width: f64,

    #[arg(long, default_value_t = 0.0)]
    pub energy: f64,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Ratio delta / epsilon with epsilon = 2 / sqrt(gamma^2 + 4); excludes --delta/--epsilon.
    #[arg(long, conflicts_with_all = ["delta", "epsilon"])]
    pub gamma: Option<f64>,
    /// Initial population of |1>.
    #[arg(long, default_value_t = 0.0)]
    pub p: f64,
}

pub fn evolve(args: &EvolveArgs, c: &Constants<f64>) -> Result<Table> {
    if args.times.is_empty() || args.times.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::InvalidParameter {
            name: "times",
            reason: "need non-negative delays".into(),
        });
    }
    match args.channel {
        ChannelKind::Gaussian => evolve_gaussian(args, c),
        ChannelKind::TwoLevel => evolve_two_level(args, c),
    }
}

fn evolve_gaussian(args: &EvolveArgs, c: &Constants<f64>) -> Result<Table> {
    if args.in_periods {
        return Err(Error::InvalidParameter {
            name: "in_periods",
            reason: "the gaussian channel has no period".into(),
        });
    }
    if args.grid_points < 2 || !(args.half_width > 0.0) {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "need at least two points and a positive half-width".into(),
        });
    }
    let prep = GaussianPrep::new(args.x0, args.sigma2, args.mass)?;
    let t_max = args.times.iter().copied().fold(0.0, f64::max);
    let hw = args.half_width * noise_variance(&prep, t_max, c)?.sqrt();
    let step = 2.0 * hw / (args.grid_points - 1) as f64;
    let mut table = Table::new(vec!["t", "x", "density"]);
    for &t in &args.times {
        for j in 0..args.grid_points {
            let x = args.x0 - hw + j as f64 * step;
            table.push(vec![t, x, density_at(&prep, x, t, c)?]);
        }
    }
    Ok(table)
}

fn evolve_two_level(args: &EvolveArgs, c: &Constants<f64>) -> Result<Table> {
    let h = match (args.gamma, args.delta, args.epsilon) {
        (Some(gamma), _, _) => {
            let base = TwoLevelHamiltonian::unit_frequency(gamma)?;
            base.shifted(args.energy)?
        }
        (None, d, e) => TwoLevelHamiltonian::new(args.energy, d.unwrap_or(0.0), e.unwrap_or(0.0))?,
    };
    let bias = PrepBias::new(args.p)?;
    let unit = if args.in_periods { period(&h, c)? } else { 1.0 };
    let mut table = Table::new(vec!["t", "prob0", "prob1"]);
    for &t in &args.times {
        let t = t * unit;
        let (p0, p1) = transition_probs(&h, bias, t, c);
        table.push(vec![t, p0, p1]);
    }
    Ok(table)
}

/// Rejects `mode` unless it is `required`.
pub fn require_mode(mode: UnitMode, required: UnitMode, what: &str) -> Result<()> {
    if mode != required {
        return Err(Error::InvalidParameter {
            name: "units",
            reason: format!("{what} requires --units {required}"),
        });
    }
    Ok(())
}
