//! Phase-shift optimization for the surfaces.
//!
//! Closed-form coherent alignment covers every single-surface hop. The
//! double-reflection hop and the two-surface relay-to-relay hop use
//! alternating optimization with closed-form block updates. The
//! interference-limited hop of the concurrent scheme uses a Dinkelbach
//! parameter with majorization-minimization.

mod ao;
mod eigen;
mod mm;

pub use ao::{ao_double_ris, ao_second_hop_two_ris, DoubleRisSolution, SecondHopSolution};
pub use eigen::lambda_max_span2;
pub use mm::{majorizer_gap, mm_fractional_phase, FractionalProblem, MmOutcome, MmState};

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{log2_1p, unit_phasor, Real};

/// Unit-modulus reflection coefficients of one surface.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector<T>(Vec<Complex<T>>);

impl<T: Real> PhaseVector<T> {
    pub fn ones(m: usize) -> Self {
        Self(vec![Complex::new(T::one(), T::zero()); m])
    }

    pub fn from_angles(angles: impl IntoIterator<Item = T>) -> Self {
        Self(
            angles
                .into_iter()
                .map(|a| Complex::from_polar(T::one(), a))
                .collect(),
        )
    }

    /// Validates `|entry| = 1` within `1e-6` and renormalizes.
    pub fn try_new(entries: Vec<Complex<T>>) -> Result<Self> {
        let tol = T::lit(1e-6);
        if let Some(m) = entries
            .iter()
            .position(|z| !((z.norm() - T::one()).abs() <= tol))
        {
            return Err(Error::InvalidParameter {
                name: "phase vector",
                reason: format!("entry {m} is not unit modulus"),
            });
        }
        Ok(Self(entries.into_iter().map(unit_phasor).collect()))
    }

    /// Entry-wise `exp(-j angle(w_m))`, which maximizes `Re{phi^T w}`.
    pub fn conj_aligned(w: &[Complex<T>]) -> Self {
        Self(w.iter().map(|&z| unit_phasor(z).conj()).collect())
    }

    /// Entry-wise `exp(j angle(w_m))`.
    pub fn from_unit(w: &[Complex<T>]) -> Self {
        Self(w.iter().map(|&z| unit_phasor(z)).collect())
    }

    /// i.i.d. uniform phases from a seeded generator.
    pub fn random(m: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::from_angles((0..m).map(|_| T::sample_unit(&mut rng) * T::TAU()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex<T>> {
        self.0
    }

    /// Largest deviation of any entry's modulus from one.
    pub fn modulus_error(&self) -> T {
        self.0
            .iter()
            .map(|z| (z.norm() - T::one()).abs())
            .fold(T::zero(), T::max)
    }
}

impl<T> AsRef<[Complex<T>]> for PhaseVector<T> {
    fn as_ref(&self) -> &[Complex<T>] {
        &self.0
    }
}

/// Starting phases for the iterative optimizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AoInit {
    AllOnes,
    Seeded(u64),
    /// Phases matched to the strongest path: the dominant singular pair of
    /// the double-reflection cascade, the single-reflection paths of the
    /// relay-to-relay hop, or the desired signal of the fractional problem.
    Dominant,
}

/// Which quantity the relative stopping tolerance is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopMetric {
    /// `log2(1 + snr)`.
    Rate,
    Snr,
}

/// Iteration controls shared by the alternating and MM optimizers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AoSettings {
    pub max_iters: usize,
    pub rel_tol: f64,
    pub init: AoInit,
    pub stop_on: StopMetric,
}

impl Default for AoSettings {
    /// 50 iterations, relative tolerance `1e-3` on the rate, dominant-path start.
    fn default() -> Self {
        Self {
            max_iters: 50,
            rel_tol: 1e-3,
            init: AoInit::Dominant,
            stop_on: StopMetric::Rate,
        }
    }
}

impl AoSettings {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iters",
                reason: "must be at least 1".into(),
            });
        }
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return Err(Error::InvalidParameter {
                name: "rel_tol",
                reason: format!("must be positive and finite, got {}", self.rel_tol),
            });
        }
        Ok(())
    }

    pub(crate) fn initial<T: Real>(&self, m: usize, salt: u64) -> PhaseVector<T> {
        match self.init {
            AoInit::AllOnes | AoInit::Dominant => PhaseVector::ones(m),
            AoInit::Seeded(seed) => PhaseVector::random(m, seed ^ salt),
        }
    }

    /// True once a non-decreasing SNR objective has stopped improving.
    pub(crate) fn snr_converged<T: Real>(&self, prev: T, next: T) -> bool {
        let (a, b) = match self.stop_on {
            StopMetric::Rate => (log2_1p(prev), log2_1p(next)),
            StopMetric::Snr => (prev, next),
        };
        b == T::zero() || (b - a).abs() <= T::lit(self.rel_tol) * b.abs()
    }
}

const POWER_ITERS: usize = 30;

/// Dominant right singular vector of `f` by power iteration on `f^H f`,
/// started from all-ones. `None` when `f` annihilates the iterate.
pub fn dominant_right_singular<T: Real>(f: &CMatrix<T>) -> Option<Vec<Complex<T>>> {
    let n = f.cols();
    let mut x = vec![Complex::new(T::one() / T::lit(n as f64).sqrt(), T::zero()); n];
    let mut prev = T::zero();
    for _ in 0..POWER_ITERS {
        let z = f.adj_mul_vec(&f.mul_vec(&x));
        let s = crate::linalg::norm_sqr(&z).sqrt();
        if !(s > T::zero()) || !s.is_finite() {
            return None;
        }
        x = z.into_iter().map(|v| v / s).collect();
        if (s - prev).abs() <= T::lit(1e-9) * s {
            break;
        }
        prev = s;
    }
    Some(x)
}

/// `F = diag(h_i2d) G diag(h_i1s)`, so that `phi^T F theta` is the double-reflection cascade.
pub fn cascade_f<T: Real>(
    h_i2d: &[Complex<T>],
    g: &CMatrix<T>,
    h_i1s: &[Complex<T>],
) -> Result<CMatrix<T>> {
    check_len("cascade rows", g.rows(), h_i2d.len())?;
    check_len("cascade cols", g.cols(), h_i1s.len())?;
    let mut data = Vec::with_capacity(g.rows() * g.cols());
    for (i, &left) in h_i2d.iter().enumerate() {
        data.extend(g.row(i).iter().zip(h_i1s).map(|(&gij, &right)| left * gij * right));
    }
    Ok(CMatrix::from_row_major(g.rows(), g.cols(), data))
}

/// Phases that rotate every cascade term onto the phase of `reference`:
/// `exp(j(angle(ref) - angle(cascade_m)))`.
pub fn align_to_reference<T: Real>(reference: Complex<T>, cascade: &[Complex<T>]) -> PhaseVector<T> {
    let r = unit_phasor(reference);
    PhaseVector(cascade.iter().map(|&c| r * unit_phasor(c).conj()).collect())
}

/// Received SNR with coherent alignment: `rho (|ref| + sum |cascade_m|)^2`.
pub fn coherent_snr<T: Real>(rho: T, reference: Complex<T>, cascade: &[Complex<T>]) -> T {
    let amp = reference.norm() + crate::linalg::l1_norm(cascade);
    rho * amp * amp
}
