use num_complex::Complex;

use super::{dominant_right_singular, AoInit, AoSettings, PhaseVector};
use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, l1_norm, CMatrix};
use crate::scalar::{unit_phasor, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct DoubleRisSolution<T> {
    /// First-surface phases.
    pub theta: PhaseVector<T>,
    /// Second-surface phases.
    pub phi: PhaseVector<T>,
    pub snr: T,
    pub iters: usize,
    /// SNR at the starting point followed by the SNR after each sweep.
    pub snr_trace: Vec<T>,
}

/// Maximizes `rho |phi^T F theta|^2` over unit-modulus `theta`, `phi`.
///
/// Each sweep solves `theta` for fixed `phi` and then `phi` for fixed
/// `theta`; both are closed-form conjugate-phase alignments, so the
/// objective never decreases.
pub fn ao_double_ris<T: Real>(
    f: &CMatrix<T>,
    rho: T,
    settings: &AoSettings,
) -> Result<DoubleRisSolution<T>> {
    settings.validate()?;
    if !f.is_square() {
        return Err(Error::Dimension {
            context: "double-RIS cascade must be square",
            expected: f.rows(),
            found: f.cols(),
        });
    }
    let m = f.rows();
    let (mut theta, mut phi) = match settings.init {
        AoInit::Dominant => match dominant_right_singular(f) {
            Some(v) => {
                let theta = PhaseVector::from_unit(&v);
                let phi = PhaseVector::conj_aligned(&f.mul_vec(theta.as_slice()));
                (theta, phi)
            }
            None => (PhaseVector::ones(m), PhaseVector::ones(m)),
        },
        _ => (settings.initial(m, 0x7e7a), settings.initial(m, 0x0f1)),
    };

    let mut snr = rho * f.bilinear(phi.as_slice(), theta.as_slice()).norm_sqr();
    let mut trace = vec![snr];
    let mut iters = 0;
    while iters < settings.max_iters {
        iters += 1;
        let r = f.tr_mul_vec(phi.as_slice());
        theta = PhaseVector::conj_aligned(&r);
        let v = f.mul_vec(theta.as_slice());
        phi = PhaseVector::conj_aligned(&v);
        // |phi^T v| = sum |v_m| after alignment.
        let amp = l1_norm(&v);
        let next = rho * amp * amp;
        trace.push(next);
        let done = settings.snr_converged(snr, next);
        snr = next;
        if done {
            break;
        }
    }
    Ok(DoubleRisSolution {
        theta,
        phi,
        snr,
        iters,
        snr_trace: trace,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecondHopSolution<T> {
    pub psi1: PhaseVector<T>,
    pub psi2: PhaseVector<T>,
    pub snr: T,
    pub iters: usize,
    pub snr_trace: Vec<T>,
}

/// Value of `h + psi1^T u1 + psi2^T u2 + psi2^T Q psi1`.
pub(crate) fn second_hop_gain<T: Real>(
    q: &CMatrix<T>,
    u1: &[Complex<T>],
    u2: &[Complex<T>],
    h: Complex<T>,
    psi1: &[Complex<T>],
    psi2: &[Complex<T>],
) -> Complex<T> {
    h + dot(psi1, u1) + dot(psi2, u2) + q.bilinear(psi2, psi1)
}

/// Maximizes `rho |h_r1r2 + psi1^T u1 + psi2^T u2 + psi2^T Q psi1|^2`.
///
/// For fixed `psi2` the gain is `z^T psi1 + c` with `z = u1 + Q^T psi2`,
/// `c = psi2^T u2 + h`, and `psi1_m = exp(j(angle c - angle z_m))`. The
/// `psi2` step is symmetric with `v = u2 + Q psi1`, `r = h + psi1^T u1`.
pub fn ao_second_hop_two_ris<T: Real>(
    q: &CMatrix<T>,
    u1: &[Complex<T>],
    u2: &[Complex<T>],
    h_r1r2: Complex<T>,
    rho: T,
    settings: &AoSettings,
) -> Result<SecondHopSolution<T>> {
    settings.validate()?;
    let m = u1.len();
    check_len("Q rows", m, q.rows())?;
    check_len("Q cols", m, q.cols())?;
    check_len("u2", m, u2.len())?;

    let (mut psi1, mut psi2) = match settings.init {
        AoInit::Dominant => {
            let psi1 = aligned_to(h_r1r2, u1);
            let v: Vec<_> = q
                .mul_vec(psi1.as_slice())
                .into_iter()
                .zip(u2)
                .map(|(qv, &u)| qv + u)
                .collect();
            let psi2 = aligned_to(h_r1r2 + dot(psi1.as_slice(), u1), &v);
            (psi1, psi2)
        }
        _ => (settings.initial(m, 0x51), settings.initial(m, 0x52)),
    };
    let gain = second_hop_gain(q, u1, u2, h_r1r2, psi1.as_slice(), psi2.as_slice());
    let mut snr = rho * gain.norm_sqr();
    let mut trace = vec![snr];
    let mut iters = 0;
    while iters < settings.max_iters {
        iters += 1;

        let z: Vec<_> = q
            .tr_mul_vec(psi2.as_slice())
            .into_iter()
            .zip(u1)
            .map(|(qz, &u)| qz + u)
            .collect();
        let c = dot(psi2.as_slice(), u2) + h_r1r2;
        psi1 = aligned_to(c, &z);

        let v: Vec<_> = q
            .mul_vec(psi1.as_slice())
            .into_iter()
            .zip(u2)
            .map(|(qv, &u)| qv + u)
            .collect();
        let r = h_r1r2 + dot(psi1.as_slice(), u1);
        psi2 = aligned_to(r, &v);

        let amp = r.norm() + l1_norm(&v);
        let next = rho * amp * amp;
        trace.push(next);
        let done = settings.snr_converged(snr, next);
        snr = next;
        if done {
            break;
        }
    }
    Ok(SecondHopSolution {
        psi1,
        psi2,
        snr,
        iters,
        snr_trace: trace,
    })
}

fn aligned_to<T: Real>(reference: Complex<T>, w: &[Complex<T>]) -> PhaseVector<T> {
    let r = unit_phasor(reference);
    PhaseVector(w.iter().map(|&z| r * unit_phasor(z).conj()).collect())
}
