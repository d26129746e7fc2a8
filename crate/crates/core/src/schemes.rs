//! Per-drop evaluation of the four transmission architectures.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::channels::{ChannelRealization, TwoRelayLinks};
use crate::error::{Error, Result};
use crate::linalg::hadamard;
use crate::phaseopt::{
    align_to_reference, ao_double_ris, ao_second_hop_two_ris, cascade_f, coherent_snr,
    mm_fractional_phase, AoSettings, FractionalProblem, SecondHopSolution,
};
use crate::scalar::{log2_1p, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeId {
    /// Both surfaces, no relay.
    RisOnly,
    /// One relay between the surfaces, two slots.
    SingleRelay,
    /// Relay next to each surface, one transmitter per slot, three slots.
    TwoRelay,
    /// Relay pair with the source and second relay transmitting concurrently.
    Enhanced,
}

impl SchemeId {
    pub const ALL: [SchemeId; 4] = [
        SchemeId::RisOnly,
        SchemeId::SingleRelay,
        SchemeId::TwoRelay,
        SchemeId::Enhanced,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::RisOnly => "ris_only",
            SchemeId::SingleRelay => "single_relay",
            SchemeId::TwoRelay => "two_relay",
            SchemeId::Enhanced => "enhanced",
        }
    }

    pub fn prelog(self) -> Prelog {
        match self {
            SchemeId::RisOnly => Prelog::Full,
            SchemeId::SingleRelay | SchemeId::Enhanced => Prelog::Half,
            SchemeId::TwoRelay => Prelog::Third,
        }
    }

    pub fn needs_mid_relay(self) -> bool {
        self == SchemeId::SingleRelay
    }

    pub fn needs_relay_pair(self) -> bool {
        matches!(self, SchemeId::TwoRelay | SchemeId::Enhanced)
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme `{s}`")))
    }
}

/// Time-slot sharing factor in front of `log2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prelog {
    Full,
    Half,
    Third,
}

impl Prelog {
    pub fn denominator(self) -> u32 {
        match self {
            Prelog::Full => 1,
            Prelog::Half => 2,
            Prelog::Third => 3,
        }
    }

    pub fn value<T: Real>(self) -> T {
        T::one() / T::lit(self.denominator() as f64)
    }
}

/// A hop whose SNR or SINR enters the rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Hop {
    SourceToDestination,
    SourceToRelay,
    RelayToDestination,
    SourceToRelay1,
    Relay1ToRelay2,
    Relay2ToDestination,
}

impl Hop {
    pub fn label(self) -> &'static str {
        match self {
            Hop::SourceToDestination => "S->D",
            Hop::SourceToRelay => "S->R",
            Hop::RelayToDestination => "R->D",
            Hop::SourceToRelay1 => "S->R1",
            Hop::Relay1ToRelay2 => "R1->R2",
            Hop::Relay2ToDestination => "R2->D",
        }
    }
}

impl fmt::Display for Hop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Transmit power budget `p = p1 + p2` for the concurrent scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit<T> {
    pub p_total: T,
    /// Source power.
    pub p1: T,
    /// Second-relay power.
    pub p2: T,
}

impl<T: Real> PowerSplit<T> {
    /// `p1 = p2 = p / 2`.
    pub fn equal(p_total: T) -> Self {
        Self::with_source_fraction(p_total, T::lit(0.5)).expect("equal split is valid")
    }

    pub fn with_source_fraction(p_total: T, fraction: T) -> Result<Self> {
        if !(p_total >= T::zero()) || !p_total.is_finite() {
            return Err(Error::InvalidParameter {
                name: "p_total",
                reason: format!("must be non-negative and finite, got {p_total}"),
            });
        }
        if !(fraction >= T::zero() && fraction <= T::one()) {
            return Err(Error::InvalidParameter {
                name: "source fraction",
                reason: format!("must lie in [0, 1], got {fraction}"),
            });
        }
        let p1 = p_total * fraction;
        Ok(Self {
            p_total,
            p1,
            p2: p_total - p1,
        })
    }
}

/// Residual inter-relay interference after cancellation, `inr = sigma_e^2 / sigma^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceParams<T> {
    pub inr: T,
}

impl<T: Real> InterferenceParams<T> {
    pub fn new(inr: T) -> Result<Self> {
        if !(inr >= T::zero()) {
            return Err(Error::InvalidParameter {
                name: "inr",
                reason: format!("must be non-negative, got {inr}"),
            });
        }
        Ok(Self { inr })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeResult<T> {
    pub scheme: SchemeId,
    pub hop_snrs: Vec<(Hop, T)>,
    pub bottleneck: Hop,
    pub rate_bps_hz: T,
    /// Iterations used by each iterative optimizer run for this drop.
    pub optimizer_iters: Vec<usize>,
    pub prelog: Prelog,
}

impl<T: Real> SchemeResult<T> {
    fn from_hops(scheme: SchemeId, hop_snrs: Vec<(Hop, T)>, optimizer_iters: Vec<usize>) -> Self {
        let (bottleneck, min) = hop_snrs
            .iter()
            .copied()
            .fold(None, |acc: Option<(Hop, T)>, (hop, snr)| match acc {
                Some((_, best)) if best <= snr => acc,
                _ => Some((hop, snr)),
            })
            .expect("every scheme has at least one hop");
        let prelog = scheme.prelog();
        Self {
            scheme,
            bottleneck,
            rate_bps_hz: prelog.value::<T>() * log2_1p(min.max(T::zero())),
            hop_snrs,
            optimizer_iters,
            prelog,
        }
    }

    pub fn min_snr(&self) -> T {
        self.hop_snrs
            .iter()
            .map(|&(_, s)| s)
            .fold(T::infinity(), T::min)
    }

    pub fn total_iters(&self) -> usize {
        self.optimizer_iters.iter().sum()
    }
}

/// Double reflection only: `rho |phi^T F theta|^2`, prelog 1.
pub fn eval_ris_only<T: Real>(
    drop: &ChannelRealization<T>,
    rho: T,
    settings: &AoSettings,
) -> Result<SchemeResult<T>> {
    let f = cascade_f(&drop.h_i2d, &drop.g, &drop.h_i1s)?;
    let sol = ao_double_ris(&f, rho, settings)?;
    Ok(SchemeResult::from_hops(
        SchemeId::RisOnly,
        vec![(Hop::SourceToDestination, sol.snr)],
        vec![sol.iters],
    ))
}

/// Mid relay with coherent alignment at each surface, prelog 1/2.
pub fn eval_single_relay<T: Real>(
    drop: &ChannelRealization<T>,
    rho: T,
    _settings: &AoSettings,
) -> Result<SchemeResult<T>> {
    let links = drop.single_relay()?;
    let first = coherent_snr(rho, links.h_sr, &hadamard(&links.h_i1r, &drop.h_i1s));
    let second = coherent_snr(rho, links.h_rd, &hadamard(&drop.h_i2d, &links.h_i2r));
    Ok(SchemeResult::from_hops(
        SchemeId::SingleRelay,
        vec![(Hop::SourceToRelay, first), (Hop::RelayToDestination, second)],
        Vec::new(),
    ))
}

/// Surface cascade `h_i1r1 h_i1s` of the S -> R1 hop.
fn first_hop_cascade<T: Real>(drop: &ChannelRealization<T>, links: &TwoRelayLinks<T>) -> Vec<Complex<T>> {
    hadamard(&links.h_i1r1, &drop.h_i1s)
}

/// Relay-to-relay hop through both surfaces, optimized by alternation.
pub fn second_hop_two_relay<T: Real>(
    drop: &ChannelRealization<T>,
    rho: T,
    settings: &AoSettings,
) -> Result<SecondHopSolution<T>> {
    let links = drop.two_relay()?;
    let q = cascade_f(&links.h_i2r2, &drop.g, &links.h_i1r1)?;
    let u1 = hadamard(&links.h_i1r2, &links.h_i1r1);
    let u2 = hadamard(&links.h_i2r2, &links.h_i2r1);
    ao_second_hop_two_ris(&q, &u1, &u2, links.h_r1r2, rho, settings)
}

/// Three sequential hops, prelog 1/3.
pub fn eval_two_relay<T: Real>(
    drop: &ChannelRealization<T>,
    rho: T,
    settings: &AoSettings,
) -> Result<SchemeResult<T>> {
    let second = second_hop_two_relay(drop, rho, settings)?;
    eval_two_relay_with(drop, rho, &second)
}

/// [`eval_two_relay`] with a precomputed relay-to-relay solution.
pub fn eval_two_relay_with<T: Real>(
    drop: &ChannelRealization<T>,
    rho: T,
    second: &SecondHopSolution<T>,
) -> Result<SchemeResult<T>> {
    let links = drop.two_relay()?;
    let first = coherent_snr(rho, links.h_sr1, &first_hop_cascade(drop, links));
    let third = coherent_snr(rho, links.h_r2d, &hadamard(&drop.h_i2d, &links.h_i2r2));
    Ok(SchemeResult::from_hops(
        SchemeId::TwoRelay,
        vec![
            (Hop::SourceToRelay1, first),
            (Hop::Relay1ToRelay2, second.snr),
            (Hop::Relay2ToDestination, third),
        ],
        vec![second.iters],
    ))
}

/// Concurrent source and second-relay transmission, prelog 1/2.
pub fn eval_enhanced<T: Real>(
    drop: &ChannelRealization<T>,
    power: PowerSplit<T>,
    sigma2: T,
    interference: InterferenceParams<T>,
    settings: &AoSettings,
) -> Result<SchemeResult<T>> {
    let second = second_hop_two_relay(drop, power.p_total / sigma2, settings)?;
    let mut out = eval_enhanced_with(drop, power, sigma2, &[interference], &second, settings)?;
    Ok(out.pop().expect("one interference level in, one result out"))
}

/// Evaluates the concurrent scheme at several interference levels.
///
/// Only the S -> R1 SINR depends on the interference level, so the
/// destination-side MM runs once. `second` must be the relay-to-relay
/// solution at full power `p_total / sigma2`: R1 forwards alone while the
/// source is silent.
pub fn eval_enhanced_with<T: Real>(
    drop: &ChannelRealization<T>,
    power: PowerSplit<T>,
    sigma2: T,
    levels: &[InterferenceParams<T>],
    second: &SecondHopSolution<T>,
    settings: &AoSettings,
) -> Result<Vec<SchemeResult<T>>> {
    let links = drop.two_relay()?;
    let cascade = first_hop_cascade(drop, links);

    // Theta maximizes the S -> R1 signal; it also shapes the leakage towards D.
    let theta = align_to_reference(links.h_sr1, &cascade);
    let q = drop.g.mul_vec(&hadamard(theta.as_slice(), &drop.h_i1s));
    let problem = FractionalProblem::new(
        hadamard(&drop.h_i2d, &links.h_i2r2),
        hadamard(&drop.h_i2d, &q),
        links.h_r2d,
        power.p1,
        power.p2,
        sigma2,
    )?;
    let mm = mm_fractional_phase(&problem, settings)?;

    Ok(levels
        .iter()
        .map(|level| {
            let noise = level.inr * sigma2 + sigma2;
            let first = coherent_snr(power.p1 / noise, links.h_sr1, &cascade);
            SchemeResult::from_hops(
                SchemeId::Enhanced,
                vec![
                    (Hop::SourceToRelay1, first),
                    (Hop::Relay1ToRelay2, second.snr),
                    (Hop::Relay2ToDestination, mm.sinr),
                ],
                vec![second.iters, mm.iters],
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{realize_drop, ChannelParams, DropSeed};
    use crate::geometry::Topology;
    use num_complex::Complex;

    fn drop(m: usize, seed: u64) -> ChannelRealization<f64> {
        realize_drop(&Topology::reference(), m, &ChannelParams::default(), DropSeed::new(seed, 0)).unwrap()
    }

    fn zero() -> Complex<f64> {
        Complex::new(0.0, 0.0)
    }

    fn check_rate(r: &SchemeResult<f64>) {
        let expect = r.prelog.value::<f64>() * (1.0 + r.min_snr()).log2();
        assert!((r.rate_bps_hz - expect).abs() <= 1e-12 * expect.max(1.0));
        assert!(r.rate_bps_hz >= 0.0);
        assert!(r.hop_snrs.iter().any(|&(h, s)| h == r.bottleneck && s == r.min_snr()));
    }

    #[test]
    fn scheme_ids_round_trip() {
        for id in SchemeId::ALL {
            assert_eq!(id.as_str().parse::<SchemeId>().unwrap(), id);
        }
        assert!("relay".parse::<SchemeId>().is_err());
    }

    #[test]
    fn ris_only_zero_cases() {
        let mut d = drop(8, 1);
        let s = AoSettings::default();
        assert_eq!(eval_ris_only(&d, 0.0, &s).unwrap().rate_bps_hz, 0.0);
        d.g = crate::linalg::CMatrix::zeros(8, 8);
        assert_eq!(eval_ris_only(&d, 1e6, &s).unwrap().rate_bps_hz, 0.0);
    }

    #[test]
    fn single_relay_symmetric_and_severed() {
        let s = AoSettings::default();
        let mut d = drop(8, 2);
        {
            let links = d.single.as_mut().unwrap();
            links.h_rd = links.h_sr;
            links.h_i2r = links.h_i1r.clone();
        }
        d.h_i2d = d.h_i1s.clone();
        let r = eval_single_relay(&d, 1e5, &s).unwrap();
        assert_eq!(r.hop_snrs[0].1, r.hop_snrs[1].1);
        check_rate(&r);

        let links = d.single.as_mut().unwrap();
        links.h_sr = zero();
        links.h_i1r = vec![zero(); 8];
        let r = eval_single_relay(&d, 1e5, &s).unwrap();
        assert_eq!(r.rate_bps_hz, 0.0);
        assert_eq!(r.bottleneck, Hop::SourceToRelay);
    }

    #[test]
    fn two_relay_severed_middle_hop() {
        let s = AoSettings::default();
        let mut d = drop(8, 3);
        assert_eq!(eval_two_relay(&d, 0.0, &s).unwrap().rate_bps_hz, 0.0);
        d.g = crate::linalg::CMatrix::zeros(8, 8);
        let links = d.pair.as_mut().unwrap();
        links.h_r1r2 = zero();
        links.h_i1r2 = vec![zero(); 8];
        links.h_i2r1 = vec![zero(); 8];
        let r = eval_two_relay(&d, 1e5, &s).unwrap();
        assert_eq!(r.rate_bps_hz, 0.0);
        assert_eq!(r.bottleneck, Hop::Relay1ToRelay2);
    }

    #[test]
    fn enhanced_limits() {
        let s = AoSettings::default();
        let d = drop(16, 4);
        let silent = PowerSplit::with_source_fraction(1e5, 0.0).unwrap();
        let r = eval_enhanced(&d, silent, 1.0, InterferenceParams::new(1.0).unwrap(), &s).unwrap();
        assert_eq!(r.rate_bps_hz, 0.0);

        let power = PowerSplit::equal(1e5);
        let r = eval_enhanced(&d, power, 1.0, InterferenceParams::new(1e300).unwrap(), &s).unwrap();
        assert!(r.rate_bps_hz < 1e-200);
        let r0 = eval_enhanced(&d, power, 1.0, InterferenceParams::new(0.0).unwrap(), &s).unwrap();
        check_rate(&r0);
        assert_eq!(r0.prelog, Prelog::Half);
    }

    #[test]
    fn enhanced_relay_hop_matches_sequential_scheme() {
        let s = AoSettings::default();
        let d = drop(16, 5);
        let power = PowerSplit::equal(1e4);
        let seq = eval_two_relay(&d, 1e4, &s).unwrap();
        let enh = eval_enhanced(&d, power, 1.0, InterferenceParams::new(1.0).unwrap(), &s).unwrap();
        assert_eq!(seq.hop_snrs[1], enh.hop_snrs[1]);
    }

    #[test]
    fn enhanced_rate_falls_with_interference() {
        let s = AoSettings::default();
        let d = drop(32, 6);
        let power = PowerSplit::equal(1e5);
        let second = second_hop_two_relay(&d, 1e5, &s).unwrap();
        let levels: Vec<_> = [0.0, 1.0, 10.0, 100.0, 1e4]
            .iter()
            .map(|&x| InterferenceParams::new(x).unwrap())
            .collect();
        let rates: Vec<f64> = eval_enhanced_with(&d, power, 1.0, &levels, &second, &s)
            .unwrap()
            .iter()
            .map(|r| r.rate_bps_hz)
            .collect();
        assert!(rates.windows(2).all(|w| w[1] <= w[0]), "{rates:?}");
    }

    #[test]
    fn rates_grow_with_power() {
        let s = AoSettings::default();
        let d = drop(24, 7);
        let mut last = [0.0f64; 3];
        for db in (-10..=60).step_by(10) {
            let rho = 10f64.powf(db as f64 / 10.0);
            let now = [
                eval_ris_only(&d, rho, &s).unwrap().rate_bps_hz,
                eval_single_relay(&d, rho, &s).unwrap().rate_bps_hz,
                eval_two_relay(&d, rho, &s).unwrap().rate_bps_hz,
            ];
            for (n, l) in now.iter().zip(&last) {
                assert!(n >= l);
            }
            last = now;
        }
    }

    #[test]
    fn enhanced_outgrows_sequential_at_high_power() {
        // Half versus third prelog: as p grows by 10^3 the enhanced rate gains
        // about half of log2(10^3), the sequential rate about a third.
        let s = AoSettings::default();
        let d = drop(64, 8);
        let inr = InterferenceParams::new(0.0).unwrap();
        let gain = |scheme: SchemeId| {
            let at = |p: f64| match scheme {
                SchemeId::Enhanced => eval_enhanced(&d, PowerSplit::equal(p), 1.0, inr, &s).unwrap(),
                _ => eval_two_relay(&d, p, &s).unwrap(),
            };
            at(1e9).rate_bps_hz - at(1e6).rate_bps_hz
        };
        let decades = 1000f64.log2();
        let enh = gain(SchemeId::Enhanced);
        let seq = gain(SchemeId::TwoRelay);
        assert!((enh / (decades / 2.0) - 1.0).abs() < 0.05, "{enh}");
        assert!((seq / (decades / 3.0) - 1.0).abs() < 0.05, "{seq}");
        assert!(enh > seq);
    }

    #[test]
    fn missing_relays_is_a_config_error() {
        let d = realize_drop(
            &Topology::reference().without_relays(),
            4,
            &ChannelParams::default(),
            DropSeed::new(1, 1),
        )
        .unwrap();
        let s = AoSettings::default();
        assert!(matches!(eval_single_relay(&d, 1.0, &s), Err(Error::Config(_))));
        assert!(matches!(eval_two_relay(&d, 1.0, &s), Err(Error::Config(_))));
        assert!(eval_ris_only(&d, 1.0, &s).is_ok());
    }
}
