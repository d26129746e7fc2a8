use dris_core::schemes::SchemeId;
use dris_core::simulate::{run_sweep, threshold_crossing, Crossing, CurveKey, FixedParams, SweepAxis, SweepConfig};

fn fixed(elements: usize, snr_db: f64) -> FixedParams {
    FixedParams {
        elements,
        snr_db,
        inr_db: vec![0.0],
    }
}

#[test]
fn low_snr_rates_sit_near_the_origin() {
    let mut c = SweepConfig::with_axis(SchemeId::ALL.to_vec(), SweepAxis::TransmitSnrDb(vec![-10.0]), fixed(128, 0.0));
    c.trials = 20;
    let report = run_sweep(&c).unwrap();
    for curve in &report.curves {
        let rate = curve.points[0].mean_rate;
        assert!((0.0..0.5).contains(&rate), "{}: {rate}", curve.key.label());
    }
}

#[test]
fn quadrupling_trials_halves_std_err() {
    let run = |trials| {
        let mut c = SweepConfig::with_axis(vec![SchemeId::SingleRelay], SweepAxis::TransmitSnrDb(vec![40.0]), fixed(32, 0.0));
        c.trials = trials;
        run_sweep(&c).unwrap().curves[0].points[0].std_err
    };
    let ratio = run(400) / run(100);
    assert!((0.5 * 0.75..=0.5 * 1.25).contains(&ratio), "ratio {ratio}");
}

#[test]
fn rates_rise_along_snr_and_elements() {
    let schemes = vec![SchemeId::RisOnly, SchemeId::SingleRelay, SchemeId::TwoRelay];
    let mut by_snr = SweepConfig::with_axis(schemes.clone(), SweepAxis::TransmitSnrDb(vec![0.0, 20.0, 40.0]), fixed(16, 0.0));
    by_snr.trials = 30;
    let mut by_m = SweepConfig::with_axis(schemes, SweepAxis::ElementsPerRis(vec![4, 16, 64]), fixed(0, 40.0));
    by_m.fixed.elements = 1;
    by_m.trials = 30;
    for report in [run_sweep(&by_snr).unwrap(), run_sweep(&by_m).unwrap()] {
        for curve in &report.curves {
            for w in curve.points.windows(2) {
                let slack = 2.0 * w[0].std_err.hypot(w[1].std_err);
                assert!(w[1].mean_rate >= w[0].mean_rate - slack, "{} at {}", curve.key.label(), w[1].axis_value);
            }
        }
    }
}

#[test]
fn crossing_on_a_small_element_sweep() {
    let mut c = SweepConfig::with_axis(vec![SchemeId::SingleRelay], SweepAxis::ElementsPerRis(vec![8, 32, 128]), fixed(1, 40.0));
    c.trials = 10;
    let report = run_sweep(&c).unwrap();
    let key = CurveKey::scheme(SchemeId::SingleRelay);
    let ys: Vec<f64> = report.curve(&key).unwrap().points.iter().map(|p| p.mean_rate).collect();
    let mid = 0.5 * (ys[0] + ys[2]);
    match threshold_crossing(&report, &key, mid).unwrap() {
        Crossing::At(x) => assert!((8.0..=128.0).contains(&x)),
        Crossing::NotReached => panic!("midpoint of the curve must be crossed"),
    }
    assert_eq!(threshold_crossing(&report, &key, 1e6).unwrap(), Crossing::NotReached);
}
