use dris_core::linalg::{dot, CMatrix};
use dris_core::phaseopt::{
    align_to_reference, ao_double_ris, ao_second_hop_two_ris, coherent_snr, lambda_max_span2,
    mm_fractional_phase, AoSettings, FractionalProblem,
};
use dris_core::{CMatrix32, Complex};
use proptest::prelude::*;

fn cvec(parts: &[(f64, f64)]) -> Vec<Complex<f64>> {
    parts.iter().map(|&(re, im)| Complex::new(re, im)).collect()
}

fn entries(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
}

/// Square size plus `n*n + 3n + 1` random complex entries.
fn instance() -> impl Strategy<Value = (usize, Vec<(f64, f64)>)> {
    (1usize..6).prop_flat_map(|m| (Just(m), entries(m * m + 3 * m + 1)))
}

fn split(m: usize, raw: &[(f64, f64)]) -> (CMatrix<f64>, Vec<Complex<f64>>, Vec<Complex<f64>>, Vec<Complex<f64>>, Complex<f64>) {
    let v = cvec(raw);
    let mat = CMatrix::from_row_major(m, m, v[..m * m].to_vec());
    let x = v[m * m..m * m + m].to_vec();
    let y = v[m * m + m..m * m + 2 * m].to_vec();
    let z = v[m * m + 2 * m..m * m + 3 * m].to_vec();
    (mat, x, y, z, v[m * m + 3 * m])
}

fn nudge(v: &[Complex<f64>], k: usize, delta: f64) -> Vec<Complex<f64>> {
    let mut out = v.to_vec();
    out[k] *= Complex::from_polar(1.0, delta);
    out
}

fn assert_unit(v: &[Complex<f64>]) -> Result<(), TestCaseError> {
    for z in v {
        prop_assert!((z.norm() - 1.0).abs() <= 1e-12, "modulus {}", z.norm());
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn double_ris_trace_is_monotone_and_last_block_is_optimal((m, raw) in instance(), rho in 0.1..100.0f64) {
        let (f, ..) = split(m, &raw);
        let sol = ao_double_ris(&f, rho, &AoSettings::default()).unwrap();
        assert_unit(sol.theta.as_slice())?;
        assert_unit(sol.phi.as_slice())?;
        for w in sol.snr_trace.windows(2) {
            prop_assert!(w[1] >= w[0] * (1.0 - 1e-12));
        }
        let snr = |phi: &[Complex<f64>]| rho * f.bilinear(phi, sol.theta.as_slice()).norm_sqr();
        let recomputed = snr(sol.phi.as_slice());
        prop_assert!((recomputed - sol.snr).abs() <= 1e-9 * sol.snr.max(1.0));
        for k in 0..m {
            for delta in [-0.01, 0.01] {
                prop_assert!(snr(&nudge(sol.phi.as_slice(), k, delta)) <= recomputed * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn second_hop_trace_is_monotone_and_last_block_is_optimal((m, raw) in instance(), rho in 0.1..100.0f64) {
        let (q, u1, u2, _, h) = split(m, &raw);
        let sol = ao_second_hop_two_ris(&q, &u1, &u2, h, rho, &AoSettings::default()).unwrap();
        assert_unit(sol.psi1.as_slice())?;
        assert_unit(sol.psi2.as_slice())?;
        for w in sol.snr_trace.windows(2) {
            prop_assert!(w[1] >= w[0] * (1.0 - 1e-12));
        }
        let psi1 = sol.psi1.as_slice();
        let snr = |psi2: &[Complex<f64>]| {
            rho * (h + dot(psi1, &u1) + dot(psi2, &u2) + q.bilinear(psi2, psi1)).norm_sqr()
        };
        let at = snr(sol.psi2.as_slice());
        prop_assert!((at - sol.snr).abs() <= 1e-9 * sol.snr.max(1.0));
        for k in 0..m {
            for delta in [-0.01, 0.01] {
                prop_assert!(snr(&nudge(sol.psi2.as_slice(), k, delta)) <= at * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn alignment_is_coherent_and_locally_optimal((m, raw) in instance(), rho in 0.0..50.0f64, c in 0.0..10.0f64) {
        let (_, x, ..) = split(m, &raw);
        let reference = Complex::new(raw[0].1, raw[0].0);
        let phases = align_to_reference(reference, &x);
        assert_unit(phases.as_slice())?;
        let amp = |p: &[Complex<f64>]| (reference + dot(p, &x)).norm();
        let best = amp(phases.as_slice());
        let expected = reference.norm() + x.iter().map(|z| z.norm()).sum::<f64>();
        prop_assert!((best - expected).abs() <= 1e-12 * expected.max(1.0));
        for k in 0..m {
            for delta in [-0.01, 0.01] {
                prop_assert!(amp(&nudge(phases.as_slice(), k, delta)) <= best * (1.0 + 1e-14));
            }
        }
        let base = coherent_snr(rho, reference, &x);
        prop_assert!((coherent_snr(c * rho, reference, &x) - c * base).abs() <= 1e-12 * (c * base).max(1.0));
    }

    #[test]
    fn lambda_max_bounds_every_rayleigh_quotient((m, raw) in instance(), wb in 0.0..5.0f64, wa in -5.0..5.0f64) {
        let (_, a, b, probe, _) = split(m, &raw);
        let lam = lambda_max_span2(&b, &a, wb, wa);
        let n2: f64 = probe.iter().map(|z| z.norm_sqr()).sum();
        prop_assume!(n2 > 1e-6);
        // x^H (wb b b^H + wa a a^H) x = wb |b^H x|^2 + wa |a^H x|^2
        let quad = |v: &[Complex<f64>]| -> f64 {
            let bx: Complex<f64> = b.iter().zip(v).map(|(bi, xi)| bi.conj() * xi).sum();
            let ax: Complex<f64> = a.iter().zip(v).map(|(ai, xi)| ai.conj() * xi).sum();
            wb * bx.norm_sqr() + wa * ax.norm_sqr()
        };
        let scale = wb * b.iter().map(|z| z.norm_sqr()).sum::<f64>() + wa.abs() * a.iter().map(|z| z.norm_sqr()).sum::<f64>();
        prop_assert!(quad(&probe) / n2 <= lam + 1e-10 * scale.max(1.0));
        prop_assert!(quad(&b) / b.iter().map(|z| z.norm_sqr()).sum::<f64>().max(1e-300) <= lam + 1e-10 * scale.max(1.0));
    }

    #[test]
    fn mm_never_increases_u((m, raw) in instance(), p1 in 0.0..100.0f64, p2 in 0.01..100.0f64) {
        let (_, a, b, _, h) = split(m, &raw);
        let problem = FractionalProblem::new(a, b, h, p1, p2, 1.0).unwrap();
        let out = mm_fractional_phase(&problem, &AoSettings::default()).unwrap();
        prop_assume!(!out.degenerate);
        assert_unit(out.phi.as_slice())?;
        for w in out.state.objective_trace.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-9));
        }
        prop_assert!((out.sinr * problem.u(out.phi.as_slice()) - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn lambda_max_matches_dense_eigensolver() {
    use nalgebra::DMatrix;
    let m = 5;
    let a: Vec<Complex<f64>> = (0..m).map(|i| Complex::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos())).collect();
    let b: Vec<Complex<f64>> = (0..m).map(|i| Complex::new((i as f64 * 0.4 + 1.0).cos(), (i as f64 * 2.1).sin())).collect();
    for (wb, wa) in [(1.0, -0.5), (3.0, 2.0), (0.2, -7.0), (0.0, 1.5)] {
        let x = DMatrix::from_fn(m, m, |i, j| b[i] * b[j].conj() * wb + a[i] * a[j].conj() * wa);
        let eig = x.symmetric_eigenvalues();
        let dense = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let ours = lambda_max_span2(&b, &a, wb, wa);
        assert!((ours - dense).abs() <= 1e-10 * dense.abs().max(1.0), "{ours} vs {dense}");
    }
}

#[test]
fn single_precision_tracks_double_precision() {
    let m = 8;
    let f64_mat = CMatrix::from_fn(m, m, |i, j| {
        let t = (i * m + j) as f64;
        Complex::new((0.37 * t).sin(), (0.91 * t + 0.2).cos())
    });
    let f32_mat: CMatrix32 = CMatrix::from_fn(m, m, |i, j| {
        let z = f64_mat.get(i, j);
        Complex::new(z.re as f32, z.im as f32)
    });
    let settings = AoSettings {
        max_iters: 200,
        rel_tol: 1e-6,
        ..AoSettings::default()
    };
    let hi = ao_double_ris(&f64_mat, 1.0, &settings).unwrap();
    let lo = ao_double_ris(&f32_mat, 1.0f32, &settings).unwrap();
    assert!((lo.snr as f64 - hi.snr).abs() <= 1e-3 * hi.snr, "{} vs {}", lo.snr, hi.snr);
    assert!(lo.theta.modulus_error() <= 1e-6);
}
