//! Flat `key = value` experiment configs and the built-in presets.
//!
//! Keys are dotted (`fixed.snr_db`); a `[section]` header prefixes the keys
//! below it. `#` starts a comment. Lists are comma separated, and numeric
//! lists also accept `start:step:stop`. Keys under `manifest.` are ignored so
//! a run manifest can be fed back in as a config.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use dris_core::geometry::{PathLossParams, Point2D, Topology};
use dris_core::phaseopt::{AoInit, StopMetric};
use dris_core::scalar::db_to_linear;
use dris_core::schemes::SchemeId;
use dris_core::simulate::{FixedParams, SweepAxis, SweepConfig};
use dris_core::ChannelParams64;

pub const PRESETS: [&str; 3] = ["fig2", "fig3", "appendix-props"];

/// Surface sizes of the `fig3` preset.
pub const FIG3_ELEMENTS: [usize; 15] = [
    100, 150, 200, 250, 300, 350, 400, 500, 600, 700, 800, 900, 1000, 1100, 1200,
];

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: key `{key}`: {msg}")]
    Key {
        line: usize,
        key: String,
        msg: String,
    },
    #[error("unknown preset `{0}` (expected one of fig2, fig3, appendix-props)")]
    UnknownPreset(String),
    #[error("invalid config: {0}")]
    Invalid(#[from] dris_core::Error),
}

/// A named preset with the reference geometry and channel.
pub fn preset(name: &str) -> Result<SweepConfig, ConfigError> {
    let all = SchemeId::ALL.to_vec();
    let config = match name {
        "fig2" => SweepConfig::with_axis(
            all,
            SweepAxis::TransmitSnrDb((0..=14).map(|k| -10.0 + 5.0 * k as f64).collect()),
            FixedParams {
                elements: 128,
                snr_db: 50.0,
                inr_db: vec![0.0, 10.0, 20.0],
            },
        ),
        "fig3" => SweepConfig::with_axis(
            all,
            SweepAxis::ElementsPerRis(FIG3_ELEMENTS.to_vec()),
            FixedParams {
                elements: 128,
                snr_db: 50.0,
                inr_db: vec![0.0],
            },
        ),
        "appendix-props" => {
            let mut c = SweepConfig::with_axis(
                vec![SchemeId::Enhanced],
                SweepAxis::ElementsPerRis(vec![1, 2, 4, 8, 16]),
                FixedParams {
                    elements: 16,
                    snr_db: 30.0,
                    inr_db: vec![0.0, 10.0],
                },
            );
            c.trials = 200;
            c
        }
        other => return Err(ConfigError::UnknownPreset(other.to_string())),
    };
    Ok(config)
}

struct Entry {
    line: usize,
    key: String,
    value: String,
}

fn tokenize(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut section = String::new();
    let mut entries: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                line,
                msg: format!("unterminated section header `{content}`"),
            })?;
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            msg: format!("expected `key = value`, got `{content}`"),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                msg: "empty key".into(),
            });
        }
        let key = if section.is_empty() {
            key.to_string()
        } else {
            format!("{section}.{key}")
        };
        if let Some(prev) = entries.iter().find(|e| e.key == key) {
            return Err(ConfigError::Key {
                line,
                key,
                msg: format!("already set on line {}", prev.line),
            });
        }
        entries.push(Entry {
            line,
            key,
            value: value.trim().to_string(),
        });
    }
    Ok(entries)
}

/// Parses config text. Without a `preset` key the `fig2` preset is the base.
pub fn parse_config_str(text: &str) -> Result<SweepConfig, ConfigError> {
    let entries = tokenize(text)?;
    let mut config = match entries.iter().find(|e| e.key == "preset") {
        Some(e) => preset(&e.value)?,
        None => preset("fig2")?,
    };
    let mut axis_kind: Option<&Entry> = None;
    let mut axis_values: Option<&Entry> = None;
    let mut relay1: Option<(usize, Option<Point2D<f64>>)> = None;
    let mut relay2: Option<(usize, Option<Point2D<f64>>)> = None;

    for e in &entries {
        let key_err = |msg: String| ConfigError::Key {
            line: e.line,
            key: e.key.clone(),
            msg,
        };
        let v = e.value.as_str();
        match e.key.as_str() {
            "preset" => {}
            k if k.starts_with("manifest.") => {}
            "schemes" => config.schemes = parse_schemes(v).map_err(key_err)?,
            "trials" => config.trials = parse_num(v).map_err(key_err)?,
            "seed" => config.master_seed = parse_num(v).map_err(key_err)?,
            "sweep.axis" => axis_kind = Some(e),
            "sweep.values" => axis_values = Some(e),
            "fixed.elements" => config.fixed.elements = parse_num(v).map_err(key_err)?,
            "fixed.snr_db" => config.fixed.snr_db = parse_num(v).map_err(key_err)?,
            "fixed.inr_db" => config.fixed.inr_db = parse_f64_list(v).map_err(key_err)?,
            "channel.rician_k" => config.channel.rician_k = parse_num(v).map_err(key_err)?,
            "channel.rician_k_db" => {
                config.channel.rician_k = db_to_linear(parse_num::<f64>(v).map_err(key_err)?)
            }
            "channel.los_exponent" => {
                config.channel.path.los_exponent = parse_num(v).map_err(key_err)?
            }
            "channel.nlos_exponent" => {
                config.channel.path.nlos_exponent = parse_num(v).map_err(key_err)?
            }
            "channel.noise_power" => config.channel.noise_power = parse_num(v).map_err(key_err)?,
            "power.source_fraction" => {
                config.source_power_fraction = parse_num(v).map_err(key_err)?
            }
            "optimizer.max_iters" => config.optimizer.max_iters = parse_num(v).map_err(key_err)?,
            "optimizer.rel_tol" => config.optimizer.rel_tol = parse_num(v).map_err(key_err)?,
            "optimizer.init" => config.optimizer.init = parse_init(v).map_err(key_err)?,
            "optimizer.stop_on" => {
                config.optimizer.stop_on = match v {
                    "rate" => StopMetric::Rate,
                    "snr" => StopMetric::Snr,
                    _ => return Err(key_err(format!("expected `rate` or `snr`, got `{v}`"))),
                }
            }
            "topology.s" => config.topology.s = parse_point(v).map_err(key_err)?,
            "topology.i1" => config.topology.i1 = parse_point(v).map_err(key_err)?,
            "topology.i2" => config.topology.i2 = parse_point(v).map_err(key_err)?,
            "topology.d" => config.topology.d = parse_point(v).map_err(key_err)?,
            "topology.relay" => config.topology.mid_relay = parse_opt_point(v).map_err(key_err)?,
            "topology.relay1" => relay1 = Some((e.line, parse_opt_point(v).map_err(key_err)?)),
            "topology.relay2" => relay2 = Some((e.line, parse_opt_point(v).map_err(key_err)?)),
            _ => return Err(key_err("unknown key".into())),
        }
    }

    if relay1.is_some() || relay2.is_some() {
        let current = config.topology.relay_pair;
        let r1 = relay1.map_or(current.map(|p| p.0), |r| r.1);
        let r2 = relay2.map_or(current.map(|p| p.1), |r| r.1);
        config.topology.relay_pair = match (r1, r2) {
            (Some(a), Some(b)) => Some((a, b)),
            (None, None) => None,
            _ => {
                let line = relay1.or(relay2).map_or(0, |r| r.0);
                return Err(ConfigError::Key {
                    line,
                    key: "topology.relay1".into(),
                    msg: "relay1 and relay2 must both be set or both be `none`".into(),
                });
            }
        };
    }

    if axis_kind.is_some() || axis_values.is_some() {
        config.axis = parse_axis(&config.axis, axis_kind, axis_values)?;
    }

    // Channel constructors hold the range checks.
    let path = PathLossParams::new(config.channel.path.los_exponent, config.channel.path.nlos_exponent)?;
    ChannelParams64::new(config.channel.rician_k, path, config.channel.noise_power)?;
    config.validate()?;
    Ok(config)
}

pub fn parse_config_file(path: &Path) -> Result<SweepConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}

fn parse_axis(
    current: &SweepAxis,
    kind: Option<&Entry>,
    values: Option<&Entry>,
) -> Result<SweepAxis, ConfigError> {
    let name = kind.map_or(current.name(), |e| e.value.as_str());
    let Some(values) = values else {
        let e = kind.expect("one of the two is set");
        if e.value == current.name() {
            return Ok(current.clone());
        }
        return Err(ConfigError::Key {
            line: e.line,
            key: e.key.clone(),
            msg: "changing the sweep axis requires `sweep.values`".into(),
        });
    };
    let err = |msg: String| ConfigError::Key {
        line: values.line,
        key: values.key.clone(),
        msg,
    };
    match name {
        "snr_db" => Ok(SweepAxis::TransmitSnrDb(parse_f64_list(&values.value).map_err(err)?)),
        "inr_db" => Ok(SweepAxis::InrDb(parse_f64_list(&values.value).map_err(err)?)),
        "elements" => Ok(SweepAxis::ElementsPerRis(parse_usize_list(&values.value).map_err(err)?)),
        other => {
            let e = kind.expect("name differs from current only when given");
            Err(ConfigError::Key {
                line: e.line,
                key: e.key.clone(),
                msg: format!("expected `snr_db`, `elements` or `inr_db`, got `{other}`"),
            })
        }
    }
}

fn parse_num<N: std::str::FromStr>(v: &str) -> Result<N, String> {
    v.parse().map_err(|_| format!("cannot parse `{v}` as a number"))
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_f64_list(v: &str) -> Result<Vec<f64>, String> {
    if let Some((start, step, stop)) = parse_range(v)? {
        let (a, s, b): (f64, f64, f64) = (parse_num(start)?, parse_num(step)?, parse_num(stop)?);
        if !(s > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(format!("bad range `{v}`"));
        }
        let n = ((b - a) / s + 1e-9).floor();
        if n < 0.0 {
            return Err(format!("empty range `{v}`"));
        }
        return Ok((0..=n as usize).map(|k| a + s * k as f64).collect());
    }
    split_list(v).map(parse_num).collect()
}

fn parse_usize_list(v: &str) -> Result<Vec<usize>, String> {
    if let Some((start, step, stop)) = parse_range(v)? {
        let (a, s, b): (usize, usize, usize) = (parse_num(start)?, parse_num(step)?, parse_num(stop)?);
        if s == 0 || b < a {
            return Err(format!("bad range `{v}`"));
        }
        return Ok((a..=b).step_by(s).collect());
    }
    split_list(v).map(parse_num).collect()
}

fn parse_range(v: &str) -> Result<Option<(&str, &str, &str)>, String> {
    if !v.contains(':') {
        return Ok(None);
    }
    let parts: Vec<&str> = v.split(':').map(str::trim).collect();
    match parts[..] {
        [a, s, b] => Ok(Some((a, s, b))),
        _ => Err(format!("range must be `start:step:stop`, got `{v}`")),
    }
}

fn parse_schemes(v: &str) -> Result<Vec<SchemeId>, String> {
    split_list(v)
        .map(|s| s.parse::<SchemeId>().map_err(|e| e.to_string()))
        .collect()
}

fn parse_init(v: &str) -> Result<AoInit, String> {
    match v {
        "ones" => return Ok(AoInit::AllOnes),
        "dominant" => return Ok(AoInit::Dominant),
        _ => {}
    }
    match v.strip_prefix("seeded:") {
        Some(seed) => Ok(AoInit::Seeded(parse_num(seed.trim())?)),
        None => Err(format!("expected `dominant`, `ones` or `seeded:<u64>`, got `{v}`")),
    }
}

fn parse_point(v: &str) -> Result<Point2D<f64>, String> {
    let coords: Vec<f64> = split_list(v).map(parse_num).collect::<Result<_, _>>()?;
    match coords[..] {
        [x, y] => Ok(Point2D::new(x, y)),
        _ => Err(format!("expected `x, y`, got `{v}`")),
    }
}

fn parse_opt_point(v: &str) -> Result<Option<Point2D<f64>>, String> {
    if v == "none" {
        Ok(None)
    } else {
        parse_point(v).map(Some)
    }
}

fn join<I: IntoIterator<Item = S>, S: ToString>(items: I) -> String {
    items
        .into_iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn point(p: Point2D<f64>) -> String {
    format!("{}, {}", p.x, p.y)
}

fn opt_point(p: Option<Point2D<f64>>) -> String {
    p.map_or_else(|| "none".to_string(), point)
}

/// Canonical text form; parsing it gives back an equal config.
pub fn render_config(config: &SweepConfig) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    kv("schemes", join(config.schemes.iter()));
    kv("trials", config.trials.to_string());
    kv("seed", config.master_seed.to_string());
    kv("sweep.axis", config.axis.name().to_string());
    let values = match &config.axis {
        SweepAxis::TransmitSnrDb(v) | SweepAxis::InrDb(v) => join(v),
        SweepAxis::ElementsPerRis(v) => join(v),
    };
    kv("sweep.values", values);
    kv("fixed.elements", config.fixed.elements.to_string());
    kv("fixed.snr_db", config.fixed.snr_db.to_string());
    kv("fixed.inr_db", join(&config.fixed.inr_db));
    kv("channel.rician_k", config.channel.rician_k.to_string());
    kv("channel.los_exponent", config.channel.path.los_exponent.to_string());
    kv("channel.nlos_exponent", config.channel.path.nlos_exponent.to_string());
    kv("channel.noise_power", config.channel.noise_power.to_string());
    kv("power.source_fraction", config.source_power_fraction.to_string());
    kv("optimizer.max_iters", config.optimizer.max_iters.to_string());
    kv("optimizer.rel_tol", config.optimizer.rel_tol.to_string());
    kv(
        "optimizer.init",
        match config.optimizer.init {
            AoInit::AllOnes => "ones".to_string(),
            AoInit::Dominant => "dominant".to_string(),
            AoInit::Seeded(s) => format!("seeded:{s}"),
        },
    );
    kv(
        "optimizer.stop_on",
        match config.optimizer.stop_on {
            StopMetric::Rate => "rate",
            StopMetric::Snr => "snr",
        }
        .to_string(),
    );
    let t: &Topology<f64> = &config.topology;
    kv("topology.s", point(t.s));
    kv("topology.i1", point(t.i1));
    kv("topology.i2", point(t.i2));
    kv("topology.d", point(t.d));
    kv("topology.relay", opt_point(t.mid_relay));
    kv("topology.relay1", opt_point(t.relay_pair.map(|p| p.0)));
    kv("topology.relay2", opt_point(t.relay_pair.map(|p| p.1)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_fig2() {
        let c = parse_config_str("").unwrap();
        assert_eq!(c, preset("fig2").unwrap());
        assert_eq!(c.fixed.elements, 128);
        assert_eq!(c.fixed.inr_db, [0.0, 10.0, 20.0]);
        assert_eq!(c.axis.values().first(), Some(&-10.0));
        assert_eq!(c.axis.values().last(), Some(&60.0));
    }

    #[test]
    fn fig3_preset() {
        let c = parse_config_str("preset = fig3").unwrap();
        assert_eq!(c.fixed.snr_db, 50.0);
        assert_eq!(c.fixed.inr_db, [0.0]);
        assert!(matches!(c.axis, SweepAxis::ElementsPerRis(_)));
    }

    #[test]
    fn sections_comments_and_ranges() {
        let c = parse_config_str(
            "preset = fig3\n# comment\n[sweep]\naxis = snr_db\nvalues = 0:10:30 # trailing\n[channel]\nrician_k_db = 0\n",
        )
        .unwrap();
        assert_eq!(c.axis, SweepAxis::TransmitSnrDb(vec![0.0, 10.0, 20.0, 30.0]));
        assert_eq!(c.channel.rician_k, 1.0);
        let c = parse_config_str("sweep.axis = elements\nsweep.values = 2:2:7").unwrap();
        assert_eq!(c.axis, SweepAxis::ElementsPerRis(vec![2, 4, 6]));
    }

    #[test]
    fn errors_name_key_and_line() {
        let err = parse_config_str("trials = 5\nbogus.key = 1").unwrap_err();
        assert!(matches!(&err, ConfigError::Key { line: 2, key, .. } if key == "bogus.key"), "{err}");
        let err = parse_config_str("\n\ntrials = many").unwrap_err();
        assert!(matches!(&err, ConfigError::Key { line: 3, .. }), "{err}");
        assert!(matches!(parse_config_str("trials = 0"), Err(ConfigError::Invalid(_))));
        assert!(matches!(parse_config_str("just text"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(parse_config_str("seed = 1\nseed = 2"), Err(ConfigError::Key { line: 2, .. })));
        assert!(parse_config_str("preset = fig9").is_err());
        assert!(parse_config_str("channel.rician_k = -1").is_err());
        assert!(parse_config_str("sweep.axis = inr_db").is_err());
        assert!(parse_config_str("topology.relay1 = none").is_err());
    }

    #[test]
    fn relays_can_be_removed() {
        let c = parse_config_str("schemes = ris_only\ntopology.relay = none\ntopology.relay1 = none\ntopology.relay2 = none")
            .unwrap();
        assert_eq!(c.topology.mid_relay, None);
        assert_eq!(c.topology.relay_pair, None);
        assert!(parse_config_str("topology.relay = none").is_err());
    }

    #[test]
    fn render_round_trips() {
        for name in PRESETS {
            let c = preset(name).unwrap();
            assert_eq!(parse_config_str(&render_config(&c)).unwrap(), c, "{name}");
        }
        let mut c = preset("fig2").unwrap();
        c.schemes = vec![SchemeId::RisOnly];
        c.axis = SweepAxis::InrDb(vec![-3.25, 0.1, 7.0]);
        c.channel.rician_k = db_to_linear(7.3);
        c.optimizer.init = AoInit::Seeded(99);
        c.optimizer.stop_on = StopMetric::Snr;
        assert_eq!(parse_config_str(&render_config(&c)).unwrap(), c);
        c.optimizer.init = AoInit::AllOnes;
        c.optimizer.rel_tol = 1e-7;
        c.topology.mid_relay = None;
        c.topology.relay_pair = None;
        c.topology.s = Point2D::new(0.1 + 0.2, -1e-3);
        c.source_power_fraction = 1.0 / 3.0;
        c.fixed.inr_db.clear();
        c.master_seed = u64::MAX;
        assert_eq!(parse_config_str(&render_config(&c)).unwrap(), c);
    }

    #[test]
    fn manifest_keys_are_ignored() {
        let c = parse_config_str("manifest.tool_version = 9\nmanifest.outputs = a.csv").unwrap();
        assert_eq!(c, preset("fig2").unwrap());
    }
}
