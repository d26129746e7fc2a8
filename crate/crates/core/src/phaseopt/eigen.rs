use num_complex::Complex;

use crate::linalg::norm_sqr;
use crate::scalar::Real;

/// Largest eigenvalue of the Hermitian matrix `w_b b b^H + w_a a a^H`.
///
/// The matrix has rank at most two, so it is reduced to a 2x2 Hermitian
/// matrix on an orthonormal basis of `span{b, a}`. Directions orthogonal to
/// the span contribute the eigenvalue 0 whenever the span is smaller than
/// the ambient dimension.
pub fn lambda_max_span2<T: Real>(b: &[Complex<T>], a: &[Complex<T>], w_b: T, w_a: T) -> T {
    debug_assert_eq!(a.len(), b.len());
    let dim = a.len().max(b.len());
    let nb2 = norm_sqr(b);
    let na2 = norm_sqr(a);

    // Lead with the longer vector.
    let (x, wx, nx2, y, wy) = if nb2 >= na2 {
        (b, w_b, nb2, a, w_a)
    } else {
        (a, w_a, na2, b, w_b)
    };
    if nx2 == T::zero() {
        return T::zero();
    }
    if dim == 1 {
        // Scalars: rounding in the projection must not invent a second direction.
        return wx * nx2 + wy * norm_sqr(y);
    }

    let nx = nx2.sqrt();
    let e1: Vec<Complex<T>> = x.iter().map(|&z| z / nx).collect();
    let project = |v: &[Complex<T>]| -> Complex<T> {
        e1.iter()
            .zip(v)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (e, z)| acc + e.conj() * z)
    };

    // Classical Gram-Schmidt with one re-orthogonalization pass.
    let mut alpha1 = project(y);
    let mut perp: Vec<Complex<T>> = y.iter().zip(&e1).map(|(&z, &e)| z - e * alpha1).collect();
    let fix = project(&perp);
    alpha1 += fix;
    for (p, &e) in perp.iter_mut().zip(&e1) {
        *p -= e * fix;
    }
    let alpha2 = norm_sqr(&perp).sqrt();

    let p = wx * nx2 + wy * alpha1.norm_sqr();
    let (top, span_dim) = if alpha2 == T::zero() {
        (p, 1)
    } else {
        let r = wy * alpha2 * alpha2;
        let q = wy.abs() * alpha1.norm() * alpha2;
        let half = T::lit(0.5);
        let mean = (p + r) * half;
        let disc = ((p - r) * half).hypot(q);
        let top = if mean >= T::zero() {
            mean + disc
        } else {
            // det = wx wy |x|^2 alpha2^2 exactly; avoids cancellation in mean + disc.
            let low = mean - disc;
            wx * wy * nx2 * alpha2 * alpha2 / low
        };
        (top, 2)
    };
    if span_dim < dim {
        top.max(T::zero())
    } else {
        top
    }
}
