//! Entropies, mutual information and channel-capacity solvers.
//!
//! Everything is computed in nats and converted at the boundary.

use serde::{Deserialize, Serialize};

use crate::scalar::{xlnx, Real};
use crate::two_level::{channel_at, stochastic_slack, BinaryChannel, TwoLevelHamiltonian};
use crate::units::Constants;
use crate::{Error, Result};

/// Logarithm base used to report information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InfoUnit {
    Nats,
    Bits,
}

impl InfoUnit {
    /// Converts a value in nats to this unit.
    #[inline]
    pub fn from_nats<T: Real>(self, nats: T) -> T {
        match self {
            InfoUnit::Nats => nats,
            InfoUnit::Bits => nats / T::LN_2(),
        }
    }

    /// Converts a value in this unit to nats.
    #[inline]
    pub fn to_nats<T: Real>(self, value: T) -> T {
        match self {
            InfoUnit::Nats => value,
            InfoUnit::Bits => value * T::LN_2(),
        }
    }
}

/// A finite probability distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T> {
    probs: Vec<T>,
}

impl<T: Real> Distribution<T> {
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("probs", "distribution is empty"));
        }
        if probs.iter().any(|&p| !(p >= T::zero()) || !p.is_finite()) {
            return Err(Error::invalid("probs", "entries must be non-negative and finite"));
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > stochastic_slack::<T>() {
            return Err(Error::invalid("probs", format!("entries sum to {total}, not 1")));
        }
        Ok(Distribution { probs })
    }

    pub fn uniform(n: usize) -> Self {
        let p = T::one() / T::from_count(n.max(1));
        Distribution {
            probs: vec![p; n.max(1)],
        }
    }

    /// `(q, 1 - q)`.
    pub fn binary(q: T) -> Result<Self> {
        Self::new(vec![q, T::one() - q])
    }

    #[inline]
    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Discrete memoryless channel; row `x` holds `p(y | x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dmc<T> {
    inputs: usize,
    outputs: usize,
    entries: Vec<T>,
}

impl<T: Real> Dmc<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        let inputs = rows.len();
        if inputs == 0 {
            return Err(Error::invalid("matrix", "no input symbols"));
        }
        let outputs = rows[0].len();
        if outputs == 0 {
            return Err(Error::invalid("matrix", "no output symbols"));
        }
        let slack = stochastic_slack::<T>();
        let mut entries = Vec::with_capacity(inputs * outputs);
        for row in rows {
            if row.len() != outputs {
                return Err(Error::DimensionMismatch {
                    expected: outputs,
                    found: row.len(),
                });
            }
            if row.iter().any(|&v| !(v >= T::zero() && v <= T::one())) {
                return Err(Error::invalid("matrix", "entries must lie in [0, 1]"));
            }
            let total: T = row.iter().copied().sum();
            if (total - T::one()).abs() > slack {
                return Err(Error::invalid("matrix", "rows must sum to 1"));
            }
            entries.extend(row);
        }
        Ok(Dmc {
            inputs,
            outputs,
            entries,
        })
    }

    #[inline]
    pub fn inputs(&self) -> usize {
        self.inputs
    }

    #[inline]
    pub fn outputs(&self) -> usize {
        self.outputs
    }

    #[inline]
    pub fn row(&self, x: usize) -> &[T] {
        &self.entries[x * self.outputs..(x + 1) * self.outputs]
    }

    /// Output marginal for input distribution `input`.
    fn output_marginal(&self, input: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.outputs];
        for (x, &px) in input.iter().enumerate() {
            for (o, &w) in out.iter_mut().zip(self.row(x)) {
                *o = *o + px * w;
            }
        }
        out
    }
}

impl<T: Real> From<BinaryChannel<T>> for Dmc<T> {
    fn from(ch: BinaryChannel<T>) -> Self {
        let m = ch.matrix();
        Dmc {
            inputs: 2,
            outputs: 2,
            entries: vec![m[0][0], m[0][1], m[1][0], m[1][1]],
        }
    }
}

/// Outcome of a capacity computation.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult<T> {
    pub capacity: T,
    pub unit: InfoUnit,
    /// Capacity-achieving input distribution.
    pub optimizer: Distribution<T>,
    pub iterations: usize,
    pub converged: bool,
}

fn entropy_nats<T: Real>(probs: &[T]) -> T {
    -probs.iter().map(|&p| xlnx(p)).sum::<T>()
}

/// Shannon entropy `-sum p log p`, with `0 log 0 = 0`.
pub fn shannon_entropy<T: Real>(d: &Distribution<T>, unit: InfoUnit) -> T {
    unit.from_nats(entropy_nats(d.probs()))
}

/// Binary entropy of `(p, 1 - p)` in bits.
pub fn binary_entropy_bits<T: Real>(p: T) -> T {
    InfoUnit::Bits.from_nats(-(xlnx(p) + xlnx(T::one() - p)))
}

fn mutual_information_nats<T: Real>(input: &[T], ch: &Dmc<T>) -> T {
    let h_y = entropy_nats(&ch.output_marginal(input));
    let h_y_given_x: T = input
        .iter()
        .enumerate()
        .map(|(x, &px)| px * entropy_nats(ch.row(x)))
        .sum();
    (h_y - h_y_given_x).max(T::zero())
}

/// `I(X;Y) = H(Y) - H(Y|X)`; tiny negative round-off is clamped to zero.
pub fn mutual_information<T: Real>(
    input: &Distribution<T>,
    ch: &Dmc<T>,
    unit: InfoUnit,
) -> Result<T> {
    if input.len() != ch.inputs() {
        return Err(Error::DimensionMismatch {
            expected: ch.inputs(),
            found: input.len(),
        });
    }
    Ok(unit.from_nats(mutual_information_nats(input.probs(), ch)))
}

/// Capacity of a binary-input binary-output channel.
///
/// The mutual information is concave in the input prior `q = P[X = 0]`. A
/// ternary search on its value narrows the bracket until the two probe values
/// agree to rounding, after which the bracket is bisected on the sign of the
/// analytic derivative `dI/dq` to locate the maximiser to about `1e-12`.
/// Channels with identical rows return `q = 1/2`.
pub fn capacity_binary<T: Real>(ch: &Dmc<T>, unit: InfoUnit) -> Result<CapacityResult<T>> {
    if ch.inputs() != 2 || ch.outputs() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: if ch.inputs() != 2 { ch.inputs() } else { ch.outputs() },
        });
    }
    let (w0, w1) = (ch.row(0), ch.row(1));
    let objective = |q: T| mutual_information_nats(&[q, T::one() - q], ch);

    let degenerate = w0.iter().zip(w1).all(|(a, b)| (*a - *b).abs() <= T::epsilon());
    if degenerate {
        let q = T::half();
        return Ok(CapacityResult {
            capacity: unit.from_nats(objective(q)),
            unit,
            optimizer: Distribution::binary(q)?,
            iterations: 0,
            converged: true,
        });
    }

    let (h0, h1) = (entropy_nats(w0), entropy_nats(w1));
    let slope = |q: T| {
        let mut g = h1 - h0;
        for y in 0..2 {
            let diff = w0[y] - w1[y];
            if diff != T::zero() {
                let r = q * w0[y] + (T::one() - q) * w1[y];
                g = g - diff * r.ln();
            }
        }
        g
    };

    let resolution = T::lit(1e-13).max(T::lit(8.0) * T::epsilon());
    let third = T::one() / T::lit(3.0);
    let (mut lo, mut hi) = (T::zero(), T::one());
    let mut iterations = 0;
    while hi - lo > resolution {
        iterations += 1;
        let m1 = lo + (hi - lo) * third;
        let m2 = hi - (hi - lo) * third;
        let (f1, f2) = (objective(m1), objective(m2));
        let scale = f1.abs().max(f2.abs()).max(T::min_positive_value());
        if (f1 - f2).abs() <= T::lit(4.0) * T::epsilon() * scale {
            break;
        }
        if f1 < f2 {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    while hi - lo > resolution {
        iterations += 1;
        let mid = (lo + hi) * T::half();
        if slope(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q = (lo + hi) * T::half();
    Ok(CapacityResult {
        capacity: unit.from_nats(objective(q)),
        unit,
        optimizer: Distribution::binary(q)?,
        iterations,
        converged: true,
    })
}

/// Blahut–Arimoto defaults: tolerance in the reported unit, and iteration cap.
pub const BA_DEFAULT_TOL: f64 = 1e-12;
pub const BA_DEFAULT_MAX_ITER: usize = 10_000;

/// Blahut–Arimoto alternating maximisation for an arbitrary DMC.
///
/// Iterates until the standard upper bound `max_x D(W_x || q)` and lower bound
/// `ln sum_x r_x exp(D(W_x || q))` differ by less than `tol` (in `unit`), or
/// `max_iter` updates have been made, in which case `converged` is false.
/// The reported capacity is the lower bound.
pub fn blahut_arimoto<T: Real>(
    ch: &Dmc<T>,
    tol: T,
    max_iter: usize,
    unit: InfoUnit,
) -> Result<CapacityResult<T>> {
    if !(tol > T::zero()) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    let tol_nats = unit.to_nats(tol);
    let mut prior = vec![T::one() / T::from_count(ch.inputs()); ch.inputs()];
    let mut divergence = vec![T::zero(); ch.inputs()];
    let mut iterations = 0;
    loop {
        let marginal = ch.output_marginal(&prior);
        for (x, d) in divergence.iter_mut().enumerate() {
            *d = ch
                .row(x)
                .iter()
                .zip(&marginal)
                .filter(|(w, _)| **w > T::zero())
                .map(|(&w, &q)| w * (w / q).ln())
                .sum();
        }
        // Shift by the max divergence so exp() never overflows.
        let upper = divergence.iter().copied().fold(T::neg_infinity(), T::max);
        let weights: Vec<T> = prior
            .iter()
            .zip(&divergence)
            .map(|(&r, &d)| r * (d - upper).exp())
            .collect();
        let total: T = weights.iter().copied().sum();
        let lower = upper + total.ln();
        let converged = upper - lower < tol_nats;
        if converged || iterations >= max_iter {
            let capacity = lower.max(T::zero());
            return Ok(CapacityResult {
                capacity: unit.from_nats(capacity),
                unit,
                optimizer: Distribution { probs: prior },
                iterations,
                converged,
            });
        }
        for (r, w) in prior.iter_mut().zip(weights) {
            *r = w / total;
        }
        iterations += 1;
    }
}

/// Capacity of the two-level channel at delay `t` with preparation bias `r0`.
pub fn two_level_capacity<T: Real>(
    h: &TwoLevelHamiltonian<T>,
    r0: T,
    t: T,
    c: &Constants<T>,
    unit: InfoUnit,
) -> Result<CapacityResult<T>> {
    capacity_binary(&Dmc::from(channel_at(h, r0, t, c)?), unit)
}
