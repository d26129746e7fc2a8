use num_complex::Complex;

use super::{align_to_reference, lambda_max_span2, AoInit, AoSettings, PhaseVector};
use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, norm_sqr};
use crate::scalar::Real;

/// Interference-to-signal ratio minimization at the destination:
///
/// `u(phi) = (p1 |phi^T b|^2 + sigma2) / (p2 |h + phi^T a|^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalProblem<T> {
    /// Desired cascade, relay-to-destination via the second surface.
    pub a: Vec<Complex<T>>,
    /// Interfering cascade, source via both surfaces.
    pub b: Vec<Complex<T>>,
    pub h_r2d: Complex<T>,
    pub p1: T,
    pub p2: T,
    pub sigma2: T,
}

impl<T: Real> FractionalProblem<T> {
    pub fn new(
        a: Vec<Complex<T>>,
        b: Vec<Complex<T>>,
        h_r2d: Complex<T>,
        p1: T,
        p2: T,
        sigma2: T,
    ) -> Result<Self> {
        check_len("interference cascade b", a.len(), b.len())?;
        if !(p1 >= T::zero()) || !(p2 >= T::zero()) {
            return Err(Error::InvalidParameter {
                name: "power",
                reason: format!("powers must be non-negative, got p1={p1}, p2={p2}"),
            });
        }
        if !(sigma2 > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "sigma2",
                reason: format!("noise power must be positive, got {sigma2}"),
            });
        }
        Ok(Self {
            a,
            b,
            h_r2d,
            p1,
            p2,
            sigma2,
        })
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    /// `p1 |phi^T b|^2 + sigma2`.
    pub fn interference_plus_noise(&self, phi: &[Complex<T>]) -> T {
        self.p1 * dot(phi, &self.b).norm_sqr() + self.sigma2
    }

    /// `p2 |h + phi^T a|^2`.
    pub fn signal(&self, phi: &[Complex<T>]) -> T {
        self.p2 * (self.h_r2d + dot(phi, &self.a)).norm_sqr()
    }

    /// Objective `u(phi)`; infinite when the signal vanishes.
    pub fn u(&self, phi: &[Complex<T>]) -> T {
        let den = self.signal(phi);
        if den == T::zero() {
            T::infinity()
        } else {
            self.interference_plus_noise(phi) / den
        }
    }

    /// Parametric objective `f(phi, mu) = p1|phi^T b|^2 + sigma2 - mu p2 |h + phi^T a|^2`.
    pub fn parametric(&self, phi: &[Complex<T>], mu: T) -> T {
        self.interference_plus_noise(phi) - mu * self.signal(phi)
    }

    /// No phase choice can deliver any signal power.
    pub fn is_degenerate(&self) -> bool {
        self.p2 == T::zero()
            || (self.h_r2d.norm_sqr() == T::zero() && norm_sqr(&self.a) == T::zero())
    }

    /// Builds the quadratic upper bound of `f(., mu)` that touches at `phi_prev`.
    ///
    /// With `X = p1 b b^H - mu p2 a a^H` and `L = lambda_max(X) I`:
    /// `alpha = (L - X) conj(phi_prev) + mu p2 conj(h) a` and
    /// `beta = phi_prev^T (L - X) conj(phi_prev) - mu p2 |h|^2 + sigma2`.
    pub fn majorize(&self, phi_prev: &PhaseVector<T>, mu: T) -> MmState<T> {
        let phi = phi_prev.as_slice();
        let w_a = -mu * self.p2;
        let lambda = lambda_max_span2(&self.b, &self.a, self.p1, w_a);
        let sb = dot(phi, &self.b);
        let sa = dot(phi, &self.a);
        let coef_b = sb.conj() * self.p1;
        let coef_a = (sa.conj() + self.h_r2d.conj()) * (mu * self.p2);
        let alpha = phi
            .iter()
            .zip(&self.b)
            .zip(&self.a)
            .map(|((&p, &b), &a)| p.conj() * lambda - b * coef_b + a * coef_a)
            .collect();
        let beta = lambda * norm_sqr(phi) - self.p1 * sb.norm_sqr()
            + mu * self.p2 * sa.norm_sqr()
            - mu * self.p2 * self.h_r2d.norm_sqr()
            + self.sigma2;
        MmState {
            mu,
            phi_prev: phi_prev.clone(),
            lambda_max: lambda,
            alpha,
            beta,
            objective_trace: Vec::new(),
        }
    }
}

/// One MM surrogate plus the history of `u` values.
#[derive(Debug, Clone, PartialEq)]
pub struct MmState<T> {
    pub mu: T,
    /// Touching point of the surrogate.
    pub phi_prev: PhaseVector<T>,
    pub lambda_max: T,
    pub alpha: Vec<Complex<T>>,
    pub beta: T,
    /// `u` at the starting point and after every MM step.
    pub objective_trace: Vec<T>,
}

impl<T: Real> MmState<T> {
    /// Surrogate `g(phi) = lambda_max |phi|^2 - 2 Re{phi^T alpha} + beta`.
    pub fn surrogate(&self, phi: &[Complex<T>]) -> T {
        self.lambda_max * norm_sqr(phi) - T::lit(2.0) * dot(phi, &self.alpha).re + self.beta
    }

    /// Minimizer of the surrogate over unit-modulus vectors.
    pub fn minimizer(&self) -> PhaseVector<T> {
        PhaseVector::conj_aligned(&self.alpha)
    }
}

/// `g(phi | phi_prev, mu) - f(phi, mu)`; non-negative by construction, zero at `phi_prev`.
pub fn majorizer_gap<T: Real>(
    phi: &[Complex<T>],
    state: &MmState<T>,
    problem: &FractionalProblem<T>,
) -> T {
    state.surrogate(phi) - problem.parametric(phi, state.mu)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmOutcome<T> {
    pub phi: PhaseVector<T>,
    /// `1 / u(phi)`.
    pub sinr: T,
    pub u: T,
    pub iters: usize,
    /// Signal power is identically zero; `u` is infinite and no iteration ran.
    pub degenerate: bool,
    pub state: MmState<T>,
}

/// Dinkelbach-MM minimization of `u(phi)`.
///
/// `mu` starts at `u` of the initial phases. Every step majorizes
/// `f(., mu)` at the current phases, jumps to the surrogate's minimizer
/// and resets `mu = u(phi)`. Since `f(phi_prev, mu) = 0`, each step gives
/// `f(phi, mu) <= 0`, i.e. `u` never increases.
pub fn mm_fractional_phase<T: Real>(
    problem: &FractionalProblem<T>,
    settings: &AoSettings,
) -> Result<MmOutcome<T>> {
    settings.validate()?;
    let m = problem.m();
    let mut phi: PhaseVector<T> = match settings.init {
        AoInit::Dominant => align_to_reference(problem.h_r2d, &problem.a),
        _ => settings.initial(m, 0x3a3),
    };

    if problem.is_degenerate() {
        let mut state = problem.majorize(&phi, T::zero());
        state.mu = T::infinity();
        state.objective_trace.push(T::infinity());
        return Ok(MmOutcome {
            phi,
            sinr: T::zero(),
            u: T::infinity(),
            iters: 0,
            degenerate: true,
            state,
        });
    }

    let mut u = problem.u(phi.as_slice());
    if !u.is_finite() {
        // The start cancels the signal exactly; restart from the coherent alignment.
        phi = align_to_reference(problem.h_r2d, &problem.a);
        u = problem.u(phi.as_slice());
    }
    let mut trace = vec![u];
    let tol = T::lit(settings.rel_tol);
    let mut state = problem.majorize(&phi, u);
    let mut iters = 0;
    while iters < settings.max_iters {
        iters += 1;
        state = problem.majorize(&phi, u);
        let next_phi = state.minimizer();
        let next_u = problem.u(next_phi.as_slice());
        trace.push(next_u);
        let done = (u - next_u).abs() <= tol * next_u;
        phi = next_phi;
        u = next_u;
        if done {
            break;
        }
    }
    state.objective_trace = trace;
    Ok(MmOutcome {
        phi,
        sinr: T::one() / u,
        u,
        iters,
        degenerate: false,
        state,
    })
}
