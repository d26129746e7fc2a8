//! Monte Carlo sweeps over transmit SNR, surface size or interference level.
//!
//! Drop `i` at an axis point always uses `DropSeed(master_seed, i)`, and every
//! scheme is evaluated on that same drop, so scheme comparisons are paired.
//! Per-drop work runs on the rayon pool; results are reduced in drop order,
//! which keeps reports bit-identical for any thread count.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::channels::{realize_drop, ChannelParams, ChannelRealization, DropSeed};
use crate::error::{Error, Result};
use crate::geometry::Topology;
use crate::phaseopt::{AoSettings, SecondHopSolution};
use crate::scalar::db_to_linear;
use crate::schemes::{
    eval_enhanced_with, eval_ris_only, eval_single_relay, eval_two_relay_with,
    second_hop_two_relay, Hop, InterferenceParams, PowerSplit, SchemeId, SchemeResult,
};

#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    TransmitSnrDb(Vec<f64>),
    ElementsPerRis(Vec<usize>),
    InrDb(Vec<f64>),
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::TransmitSnrDb(_) => "snr_db",
            SweepAxis::ElementsPerRis(_) => "elements",
            SweepAxis::InrDb(_) => "inr_db",
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            SweepAxis::TransmitSnrDb(v) | SweepAxis::InrDb(v) => v.clone(),
            SweepAxis::ElementsPerRis(v) => v.iter().map(|&m| m as f64).collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SweepAxis::TransmitSnrDb(v) | SweepAxis::InrDb(v) => v.len(),
            SweepAxis::ElementsPerRis(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Values held constant along the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedParams {
    pub elements: usize,
    pub snr_db: f64,
    /// Interference levels; the concurrent scheme gets one curve per level.
    pub inr_db: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub schemes: Vec<SchemeId>,
    pub axis: SweepAxis,
    pub fixed: FixedParams,
    pub trials: usize,
    pub master_seed: u64,
    pub topology: Topology<f64>,
    pub channel: ChannelParams<f64>,
    pub optimizer: AoSettings,
    /// Share of the power budget given to the source in the concurrent scheme.
    pub source_power_fraction: f64,
}

impl SweepConfig {
    /// Defaults used by every preset: reference topology, K = 10 dB, σ² = 1,
    /// equal power split, 50 iterations at `1e-3`.
    pub fn with_axis(schemes: Vec<SchemeId>, axis: SweepAxis, fixed: FixedParams) -> Self {
        Self {
            schemes,
            axis,
            fixed,
            trials: 500,
            master_seed: 1,
            topology: Topology::reference(),
            channel: ChannelParams::default(),
            optimizer: AoSettings::default(),
            source_power_fraction: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.axis.is_empty() {
            return bad(format!("sweep axis `{}` has no values", self.axis.name()));
        }
        let values = self.axis.values();
        if values.iter().any(|v| !v.is_finite()) {
            return bad("sweep values must be finite".into());
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return bad("sweep values must be strictly increasing".into());
        }
        if let SweepAxis::ElementsPerRis(ms) = &self.axis {
            if ms.contains(&0) {
                return bad("element counts must be at least 1".into());
            }
        }
        if self.fixed.elements == 0 {
            return bad("fixed element count must be at least 1".into());
        }
        if !self.fixed.snr_db.is_finite() {
            return bad("fixed SNR must be finite".into());
        }
        if self.fixed.inr_db.iter().any(|v| !v.is_finite()) {
            return bad("INR levels must be finite".into());
        }
        if self.schemes.contains(&SchemeId::Enhanced)
            && !matches!(self.axis, SweepAxis::InrDb(_))
            && self.fixed.inr_db.is_empty()
        {
            return bad("the enhanced scheme needs at least one INR level".into());
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return bad(format!("scheme `{s}` listed twice"));
            }
            if s.needs_mid_relay() && self.topology.mid_relay.is_none() {
                return bad(format!("scheme `{s}` needs a mid relay in the topology"));
            }
            if s.needs_relay_pair() && self.topology.relay_pair.is_none() {
                return bad(format!("scheme `{s}` needs a relay pair in the topology"));
            }
        }
        if !(0.0..=1.0).contains(&self.source_power_fraction) {
            return bad("source power fraction must lie in [0, 1]".into());
        }
        self.topology.validate()?;
        ChannelParams::new(self.channel.rician_k, self.channel.path, self.channel.noise_power)?;
        self.optimizer.validate()?;
        Ok(())
    }

    /// Curves in report order: schemes in config order, the concurrent scheme
    /// expanded over the fixed INR levels unless INR is the sweep axis.
    pub fn curve_keys(&self) -> Vec<CurveKey> {
        let mut keys = Vec::new();
        for &scheme in &self.schemes {
            if scheme == SchemeId::Enhanced && !matches!(self.axis, SweepAxis::InrDb(_)) {
                keys.extend(self.fixed.inr_db.iter().map(|&inr| CurveKey {
                    scheme,
                    inr_db: Some(inr),
                }));
            } else {
                keys.push(CurveKey {
                    scheme,
                    inr_db: None,
                });
            }
        }
        keys
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveKey {
    pub scheme: SchemeId,
    /// Fixed INR of a concurrent-scheme curve.
    pub inr_db: Option<f64>,
}

impl CurveKey {
    pub fn scheme(scheme: SchemeId) -> Self {
        Self {
            scheme,
            inr_db: None,
        }
    }

    pub fn label(&self) -> String {
        match self.inr_db {
            Some(inr) => format!("{} inr_db={inr}", self.scheme),
            None => self.scheme.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointStats {
    pub axis_value: f64,
    pub mean_rate: f64,
    pub std_err: f64,
    pub trials: usize,
    pub mean_iters: f64,
    /// Fraction of drops limited by each hop, in hop order.
    pub bottleneck: Vec<(Hop, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub key: CurveKey,
    pub points: Vec<PointStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub curves: Vec<Curve>,
    pub wall_time: Duration,
}

impl SweepReport {
    pub fn curve(&self, key: &CurveKey) -> Option<&Curve> {
        self.curves.iter().find(|c| c.key == *key)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Sample {
    rate: f64,
    bottleneck: Hop,
    iters: usize,
}

impl From<&SchemeResult<f64>> for Sample {
    fn from(r: &SchemeResult<f64>) -> Self {
        Self {
            rate: r.rate_bps_hz,
            bottleneck: r.bottleneck,
            iters: r.total_iters(),
        }
    }
}

/// Samples for one drop at one transmit SNR: one per non-concurrent scheme
/// (config order) and one per requested INR level for the concurrent scheme.
struct DropSamples {
    plain: Vec<(SchemeId, Sample)>,
    enhanced: Vec<Sample>,
}

fn evaluate_drop(
    config: &SweepConfig,
    drop: &ChannelRealization<f64>,
    snr_db: f64,
    inr_levels_db: &[f64],
) -> Result<DropSamples> {
    let sigma2 = config.channel.noise_power;
    let rho = db_to_linear(snr_db);
    let settings = &config.optimizer;
    let mut second: Option<SecondHopSolution<f64>> = None;
    let mut second_hop = |drop: &ChannelRealization<f64>| -> Result<SecondHopSolution<f64>> {
        if second.is_none() {
            second = Some(second_hop_two_relay(drop, rho, settings)?);
        }
        Ok(second.clone().expect("just filled"))
    };

    let mut plain = Vec::new();
    let mut enhanced = Vec::new();
    for &scheme in &config.schemes {
        match scheme {
            SchemeId::RisOnly => plain.push((scheme, (&eval_ris_only(drop, rho, settings)?).into())),
            SchemeId::SingleRelay => {
                plain.push((scheme, (&eval_single_relay(drop, rho, settings)?).into()))
            }
            SchemeId::TwoRelay => {
                let hop = second_hop(drop)?;
                plain.push((scheme, (&eval_two_relay_with(drop, rho, &hop)?).into()));
            }
            SchemeId::Enhanced => {
                let hop = second_hop(drop)?;
                let power = PowerSplit::with_source_fraction(rho * sigma2, config.source_power_fraction)?;
                let levels = inr_levels_db
                    .iter()
                    .map(|&db| InterferenceParams::new(db_to_linear(db)))
                    .collect::<Result<Vec<_>>>()?;
                enhanced = eval_enhanced_with(drop, power, sigma2, &levels, &hop, settings)?
                    .iter()
                    .map(Sample::from)
                    .collect();
            }
        }
    }
    Ok(DropSamples { plain, enhanced })
}

/// Samples of one drop in curve order.
fn curve_samples(keys: &[CurveKey], samples: &DropSamples, enhanced_index: Option<usize>) -> Vec<Sample> {
    let mut enhanced = samples.enhanced.iter();
    keys.iter()
        .map(|key| match key.scheme {
            SchemeId::Enhanced => match enhanced_index {
                Some(i) => samples.enhanced[i],
                None => *enhanced.next().expect("one concurrent sample per level"),
            },
            scheme => {
                samples
                    .plain
                    .iter()
                    .find(|(s, _)| *s == scheme)
                    .expect("every plain scheme evaluated")
                    .1
            }
        })
        .collect()
}

fn drop_at(config: &SweepConfig, m: usize, index: usize) -> Result<ChannelRealization<f64>> {
    realize_drop(
        &config.topology,
        m,
        &config.channel,
        DropSeed::new(config.master_seed, index as u64),
    )
}

/// Runs every trial at every axis point and reduces to per-curve statistics.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let start = Instant::now();
    let keys = config.curve_keys();
    let fixed = &config.fixed;

    // samples[point][drop][curve]
    let samples: Vec<Vec<Vec<Sample>>> = match &config.axis {
        SweepAxis::TransmitSnrDb(snrs) => {
            let per_drop: Vec<Vec<Vec<Sample>>> = (0..config.trials)
                .into_par_iter()
                .map(|i| {
                    let drop = drop_at(config, fixed.elements, i)?;
                    snrs.iter()
                        .map(|&snr| {
                            let s = evaluate_drop(config, &drop, snr, &fixed.inr_db)?;
                            Ok(curve_samples(&keys, &s, None))
                        })
                        .collect()
                })
                .collect::<Result<_>>()?;
            transpose(per_drop, snrs.len())
        }
        SweepAxis::ElementsPerRis(ms) => ms
            .iter()
            .map(|&m| {
                (0..config.trials)
                    .into_par_iter()
                    .map(|i| {
                        let drop = drop_at(config, m, i)?;
                        let s = evaluate_drop(config, &drop, fixed.snr_db, &fixed.inr_db)?;
                        Ok(curve_samples(&keys, &s, None))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?,
        SweepAxis::InrDb(inrs) => {
            let per_drop: Vec<Vec<Vec<Sample>>> = (0..config.trials)
                .into_par_iter()
                .map(|i| {
                    let drop = drop_at(config, fixed.elements, i)?;
                    let s = evaluate_drop(config, &drop, fixed.snr_db, inrs)?;
                    Ok((0..inrs.len())
                        .map(|k| curve_samples(&keys, &s, Some(k)))
                        .collect())
                })
                .collect::<Result<_>>()?;
            transpose(per_drop, inrs.len())
        }
    };

    let axis_values = config.axis.values();
    let curves = keys
        .iter()
        .enumerate()
        .map(|(c, &key)| Curve {
            key,
            points: samples
                .iter()
                .zip(&axis_values)
                .map(|(drops, &x)| summarize(x, drops.iter().map(|d| d[c])))
                .collect(),
        })
        .collect();

    Ok(SweepReport {
        config: config.clone(),
        curves,
        wall_time: start.elapsed(),
    })
}

fn transpose(per_drop: Vec<Vec<Vec<Sample>>>, points: usize) -> Vec<Vec<Vec<Sample>>> {
    let mut out: Vec<Vec<Vec<Sample>>> = (0..points).map(|_| Vec::with_capacity(per_drop.len())).collect();
    for drop in per_drop {
        for (p, s) in drop.into_iter().enumerate() {
            out[p].push(s);
        }
    }
    out
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn summarize(axis_value: f64, samples: impl Iterator<Item = Sample> + Clone) -> PointStats {
    let n = samples.clone().count();
    let mut total = CompensatedSum::default();
    let mut iters = CompensatedSum::default();
    let mut hops: Vec<(Hop, usize)> = Vec::new();
    for s in samples.clone() {
        total.add(s.rate);
        iters.add(s.iters as f64);
        match hops.iter_mut().find(|(h, _)| *h == s.bottleneck) {
            Some((_, count)) => *count += 1,
            None => hops.push((s.bottleneck, 1)),
        }
    }
    let mean = total.value() / n as f64;
    let std_err = if n > 1 {
        let mut sq = CompensatedSum::default();
        for s in samples {
            sq.add((s.rate - mean).powi(2));
        }
        (sq.value() / (n - 1) as f64).sqrt() / (n as f64).sqrt()
    } else {
        0.0
    };
    hops.sort_by_key(|&(h, _)| h);
    PointStats {
        axis_value,
        mean_rate: mean,
        std_err,
        trials: n,
        mean_iters: iters.value() / n as f64,
        bottleneck: hops
            .into_iter()
            .map(|(h, c)| (h, c as f64 / n as f64))
            .collect(),
    }
}

/// Where a curve first reaches a target rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossing {
    /// Linearly interpolated axis value; the first axis value when the curve starts at or above the target.
    At(f64),
    NotReached,
}

/// First crossing of `target` by the piecewise-linear curve `(xs, ys)`.
pub fn crossing_point(xs: &[f64], ys: &[f64], target: f64) -> Crossing {
    let mut prev: Option<(f64, f64)> = None;
    for (&x, &y) in xs.iter().zip(ys) {
        if y >= target {
            return match prev {
                None => Crossing::At(x),
                Some((x0, y0)) => Crossing::At(x0 + (target - y0) * (x - x0) / (y - y0)),
            };
        }
        prev = Some((x, y));
    }
    Crossing::NotReached
}

/// Axis value at which the mean rate of `key` first reaches `target_rate`.
pub fn threshold_crossing(report: &SweepReport, key: &CurveKey, target_rate: f64) -> Result<Crossing> {
    let curve = report
        .curve(key)
        .ok_or_else(|| Error::Config(format!("report has no curve `{}`", key.label())))?;
    let xs: Vec<f64> = curve.points.iter().map(|p| p.axis_value).collect();
    let ys: Vec<f64> = curve.points.iter().map(|p| p.mean_rate).collect();
    Ok(crossing_point(&xs, &ys, target_rate))
}
