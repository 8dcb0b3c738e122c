//! Two-level tunneling channel.
//!
//! The Hamiltonian is
//!
//! ```text
//!     | E      eps   |
//! H = |              |
//!     | eps    E + D |
//! ```
//!
//! with level gap `D >= 0` and tunneling energy `eps >= 0`. Alice prepares
//! `sqrt(1-p)|0> + sqrt(p)|1>`; Bob measures in the `{|0>, |1>}` basis after a
//! delay `t`. Populations oscillate with angular frequency `2a / hbar` where
//! `a = sqrt(D^2 + 4 eps^2) / 2`.

use num_complex::Complex;

use crate::scalar::Real;
use crate::units::Constants;
use crate::{Error, Result};

/// Absolute slack tolerated on row sums and entries of a stochastic matrix.
pub(crate) fn stochastic_slack<T: Real>() -> T {
    T::lit(1e-12).max(T::lit(64.0) * T::epsilon())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelHamiltonian<T> {
    energy: T,
    gap: T,
    tunneling: T,
}

impl<T: Real> TwoLevelHamiltonian<T> {
    /// `energy` is the ground level `E`, `gap` the splitting `D`, `tunneling`
    /// the off-diagonal coupling `eps`. Negative `gap` or `tunneling` is
    /// rejected.
    pub fn new(energy: T, gap: T, tunneling: T) -> Result<Self> {
        if !energy.is_finite() {
            return Err(Error::invalid("energy", "must be finite"));
        }
        if !(gap >= T::zero()) || !gap.is_finite() {
            return Err(Error::invalid("delta", "level gap must be non-negative and finite"));
        }
        if !(tunneling >= T::zero()) || !tunneling.is_finite() {
            return Err(Error::invalid(
                "epsilon",
                "tunneling energy must be non-negative and finite",
            ));
        }
        Ok(TwoLevelHamiltonian {
            energy,
            gap,
            tunneling,
        })
    }

    /// Hamiltonian with `eps = 2 / sqrt(gamma^2 + 4)` and `D = gamma * eps`,
    /// which fixes `a = 1` for every ratio `gamma = D / eps`.
    pub fn unit_frequency(gamma: T) -> Result<Self> {
        if !(gamma >= T::zero()) || !gamma.is_finite() {
            return Err(Error::invalid("gamma", "must be non-negative and finite"));
        }
        let eps = T::two() / (gamma * gamma + T::lit(4.0)).sqrt();
        Self::new(T::zero(), gamma * eps, eps)
    }

    #[inline]
    pub fn energy(&self) -> T {
        self.energy
    }

    #[inline]
    pub fn gap(&self) -> T {
        self.gap
    }

    #[inline]
    pub fn tunneling(&self) -> T {
        self.tunneling
    }

    /// `sqrt(D^2 + 4 eps^2) / 2`.
    #[inline]
    pub fn a(&self) -> T {
        self.gap.hypot(T::two() * self.tunneling) / T::two()
    }

    /// `D / 2`.
    #[inline]
    pub fn b(&self) -> T {
        self.gap / T::two()
    }

    /// `a - b`, computed as `eps^2 / (a + b)` to avoid cancellation when `eps << D`.
    fn a_minus_b(&self) -> T {
        let apb = self.a() + self.b();
        if apb > T::zero() {
            self.tunneling * self.tunneling / apb
        } else {
            T::zero()
        }
    }

    /// Matrix elements `(h00, h01, h11)`.
    pub fn elements(&self) -> (T, T, T) {
        (self.energy, self.tunneling, self.energy + self.gap)
    }

    /// Same Hamiltonian with the ground energy shifted by `shift`.
    pub fn shifted(&self, shift: T) -> Result<Self> {
        Self::new(self.energy + shift, self.gap, self.tunneling)
    }
}

/// Alice's preparation bias `p`, the initial population of `|1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrepBias<T>(T);

impl<T: Real> PrepBias<T> {
    pub fn new(p: T) -> Result<Self> {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(Error::invalid("p", "must lie in [0, 1]"));
        }
        Ok(PrepBias(p))
    }

    #[inline]
    pub fn p(&self) -> T {
        self.0
    }

    /// Bernoulli variance `p (1 - p)`.
    #[inline]
    pub fn variance(&self) -> T {
        self.0 * (T::one() - self.0)
    }

    /// Initial state `(sqrt(1-p), sqrt(p))`.
    pub fn state(&self) -> TwoLevelState<T> {
        TwoLevelState::new(
            Complex::new((T::one() - self.0).sqrt(), T::zero()),
            Complex::new(self.0.sqrt(), T::zero()),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelState<T> {
    pub amp0: Complex<T>,
    pub amp1: Complex<T>,
}

impl<T: Real> TwoLevelState<T> {
    pub fn new(amp0: Complex<T>, amp1: Complex<T>) -> Self {
        TwoLevelState { amp0, amp1 }
    }

    pub fn norm_sqr(&self) -> T {
        self.amp0.norm_sqr() + self.amp1.norm_sqr()
    }

    /// `(|amp0|^2, |amp1|^2)`.
    pub fn populations(&self) -> (T, T) {
        (self.amp0.norm_sqr(), self.amp1.norm_sqr())
    }

    /// Largest componentwise distance to `other` after removing the relative
    /// global phase.
    pub fn distance_up_to_phase(&self, other: &Self) -> T {
        let overlap = self.amp0.conj() * other.amp0 + self.amp1.conj() * other.amp1;
        let phase = if overlap.norm() > T::zero() {
            overlap / overlap.norm()
        } else {
            Complex::new(T::one(), T::zero())
        };
        let d0 = (self.amp0 * phase - other.amp0).norm();
        let d1 = (self.amp1 * phase - other.amp1).norm();
        d0.max(d1)
    }
}

/// Energy eigenpairs of a [`TwoLevelHamiltonian`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem<T> {
    pub e_plus: T,
    pub e_minus: T,
    pub v_plus: [T; 2],
    pub v_minus: [T; 2],
}

impl<T: Real> EigenSystem<T> {
    /// `max(|H v+ - E+ v+|, |H v- - E- v-|)` in the Euclidean norm.
    pub fn residual(&self, h: &TwoLevelHamiltonian<T>) -> T {
        let (h00, h01, h11) = h.elements();
        let res = |v: [T; 2], e: T| {
            let r0 = h00 * v[0] + h01 * v[1] - e * v[0];
            let r1 = h01 * v[0] + h11 * v[1] - e * v[1];
            r0.hypot(r1)
        };
        res(self.v_plus, self.e_plus).max(res(self.v_minus, self.e_minus))
    }
}

/// Closed-form eigenpairs: `E± = E ± a + b` and
/// `v± = (sqrt(a ∓ b), ± sqrt(a ± b)) / sqrt(2a)`.
///
/// For `a = 0` (no gap, no tunneling) returns the standard basis with both
/// energies equal to `E`.
pub fn eigensystem<T: Real>(h: &TwoLevelHamiltonian<T>) -> EigenSystem<T> {
    let (a, b) = (h.a(), h.b());
    if a == T::zero() {
        return EigenSystem {
            e_plus: h.energy,
            e_minus: h.energy,
            v_plus: [T::zero(), T::one()],
            v_minus: [T::one(), T::zero()],
        };
    }
    let norm = (T::two() * a).sqrt();
    let small = h.a_minus_b().sqrt() / norm;
    let large = (a + b).sqrt() / norm;
    EigenSystem {
        e_plus: h.energy + a + b,
        e_minus: h.energy - a + b,
        v_plus: [small, large],
        v_minus: [large, -small],
    }
}

/// Closed-form state after a delay `t`, including the global phase
/// `exp(-i (E + b) t / hbar)`.
pub fn evolve<T: Real>(
    h: &TwoLevelHamiltonian<T>,
    p: PrepBias<T>,
    t: T,
    c: &Constants<T>,
) -> TwoLevelState<T> {
    let (a, b, eps) = (h.a(), h.b(), h.tunneling);
    let (sq0, sq1) = ((T::one() - p.p()).sqrt(), p.p().sqrt());
    let global = Complex::new(T::zero(), -(h.energy + b) * t / c.hbar()).exp();
    if a == T::zero() {
        return TwoLevelState::new(global * sq0, global * sq1);
    }
    let theta = a * t / c.hbar();
    let (sin, cos) = theta.sin_cos();
    let amp0 = Complex::new(sq0 * cos, (b * sq0 - eps * sq1) * sin / a);
    let amp1 = Complex::new(sq1 * cos, -(eps * sq0 + b * sq1) * sin / a);
    TwoLevelState::new(global * amp0, global * amp1)
}

/// `zeta_p = (eps / 2) (eps (1 - 2p) + 2 b sqrt(p (1 - p)))`.
pub fn zeta<T: Real>(h: &TwoLevelHamiltonian<T>, p: PrepBias<T>) -> T {
    let eps = h.tunneling;
    eps / T::two() * (eps * (T::one() - T::two() * p.p()) + T::two() * h.b() * p.variance().sqrt())
}

/// Measurement probabilities `(P[y=0], P[y=1])` after a delay `t`.
///
/// Equal to `((1-p) a^2 - zeta (1 - cos(2at/hbar))) / a^2` and its complement;
/// the `1 - cos` term is evaluated as `2 sin^2(at/hbar)`.
pub fn transition_probs<T: Real>(
    h: &TwoLevelHamiltonian<T>,
    p: PrepBias<T>,
    t: T,
    c: &Constants<T>,
) -> (T, T) {
    let a = h.a();
    if a == T::zero() {
        return (T::one() - p.p(), p.p());
    }
    let s = (a * t / c.hbar()).sin();
    let swing = T::two() * zeta(h, p) * s * s / (a * a);
    (T::one() - p.p() - swing, p.p() + swing)
}

/// Oscillation period `2 pi hbar / sqrt(D^2 + 4 eps^2)`.
pub fn period<T: Real>(h: &TwoLevelHamiltonian<T>, c: &Constants<T>) -> Result<T> {
    let a = h.a();
    if a == T::zero() {
        return Err(Error::StaticChannel);
    }
    Ok(T::PI() * c.hbar() / a)
}

/// Binary-input binary-output channel; `matrix[x][y] = p(y | x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryChannel<T> {
    matrix: [[T; 2]; 2],
}

impl<T: Real> BinaryChannel<T> {
    pub fn new(matrix: [[T; 2]; 2]) -> Result<Self> {
        let slack = stochastic_slack::<T>();
        for row in &matrix {
            if row.iter().any(|&v| !(v >= T::zero() && v <= T::one())) {
                return Err(Error::invalid("matrix", "entries must lie in [0, 1]"));
            }
            if (row[0] + row[1] - T::one()).abs() > slack {
                return Err(Error::invalid("matrix", "rows must sum to 1"));
            }
        }
        Ok(BinaryChannel { matrix })
    }

    /// Binary symmetric channel with crossover probability `flip`.
    pub fn symmetric(flip: T) -> Result<Self> {
        Self::new([[T::one() - flip, flip], [flip, T::one() - flip]])
    }

    #[inline]
    pub fn matrix(&self) -> [[T; 2]; 2] {
        self.matrix
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.matrix[x][y]
    }
}

fn clamp_unit<T: Real>(v: T) -> T {
    v.max(T::zero()).min(T::one())
}

/// Channel induced by preparing `p = r0` for input 0 and `p = 1 - r0` for
/// input 1, measured after a delay `t`. Requires `0 <= r0 <= 1/2`.
pub fn channel_at<T: Real>(
    h: &TwoLevelHamiltonian<T>,
    r0: T,
    t: T,
    c: &Constants<T>,
) -> Result<BinaryChannel<T>> {
    if !(r0 >= T::zero()) {
        return Err(Error::invalid("r0", "must be non-negative"));
    }
    if r0 > T::half() {
        return Err(Error::BiasAboveHalf(r0.to_f64_lossy()));
    }
    let row = |p: T| -> Result<[T; 2]> {
        let (p0, p1) = transition_probs(h, PrepBias::new(p)?, t, c);
        Ok([clamp_unit(p0), clamp_unit(p1)])
    };
    BinaryChannel::new([row(r0)?, row(T::one() - r0)?])
}
