//! Seeded generation of every channel in one network drop.
//!
//! Links touching a surface are Rician: a deterministic-magnitude LoS part
//! with an i.i.d. uniform phase per entry, plus Rayleigh scatter. Links
//! between active nodes are pure Rayleigh. Each link of each drop draws
//! from its own ChaCha substream keyed by `(master_seed, link)` with
//! `drop_index` as the stream id, so a drop is reproducible in isolation
//! and shared links are identical whichever relays are present.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{distance, path_gain, PathLossParams, Point2D, Topology};
use crate::linalg::CMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams<T> {
    /// Rician K-factor, linear. `inf` gives LoS-only links.
    pub rician_k: T,
    pub path: PathLossParams<T>,
    /// Receiver noise power σ², linear.
    pub noise_power: T,
}

impl<T: Real> ChannelParams<T> {
    pub fn new(rician_k: T, path: PathLossParams<T>, noise_power: T) -> Result<Self> {
        if !(rician_k >= T::zero()) {
            return Err(Error::InvalidParameter {
                name: "rician_k",
                reason: format!("must be non-negative, got {rician_k}"),
            });
        }
        if !(noise_power > T::zero()) || !noise_power.is_finite() {
            return Err(Error::InvalidParameter {
                name: "noise_power",
                reason: format!("must be positive and finite, got {noise_power}"),
            });
        }
        Ok(Self {
            rician_k,
            path,
            noise_power,
        })
    }

    /// Amplitude weights `(sqrt(K/(K+1)), sqrt(1/(K+1)))`.
    pub fn rician_weights(&self) -> (T, T) {
        let k = self.rician_k;
        if k.is_infinite() {
            (T::one(), T::zero())
        } else {
            ((k / (k + T::one())).sqrt(), (T::one() / (k + T::one())).sqrt())
        }
    }

    /// Mean power `E|h|^2` of a Rician entry at distance `d`.
    pub fn rician_mean_power(&self, d: T) -> Result<T> {
        let (wl, wn) = self.rician_weights();
        Ok(wl * wl * path_gain(d, self.path.los_exponent)?
            + wn * wn * path_gain(d, self.path.nlos_exponent)?)
    }

    pub fn rayleigh_mean_power(&self, d: T) -> Result<T> {
        path_gain(d, self.path.nlos_exponent)
    }
}

impl<T: Real> Default for ChannelParams<T> {
    /// K = 10 dB, default exponents, σ² = 1.
    fn default() -> Self {
        Self {
            rician_k: T::lit(10.0),
            path: PathLossParams::default(),
            noise_power: T::one(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DropSeed {
    pub master_seed: u64,
    pub drop_index: u64,
}

impl DropSeed {
    pub fn new(master_seed: u64, drop_index: u64) -> Self {
        Self {
            master_seed,
            drop_index,
        }
    }
}

/// Every channel that can appear in a drop; used to key RNG substreams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    I1S,
    I1I2,
    I2D,
    I1R,
    I2R,
    SR,
    RD,
    I1R1,
    I1R2,
    I2R1,
    I2R2,
    SR1,
    R1R2,
    R2D,
}

impl Link {
    fn tag(self) -> u64 {
        self as u64 + 1
    }

    /// Dedicated generator for this link in this drop.
    pub fn rng(self, seed: DropSeed) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(
            seed.master_seed ^ splitmix64(self.tag()),
        ));
        rng.set_stream(seed.drop_index);
        rng
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn check_draw<T: Real>(d: T, m: usize) -> Result<()> {
    if !(d > T::zero()) || !d.is_finite() {
        return Err(Error::InvalidDistance(d.as_f64()));
    }
    if m == 0 {
        return Err(Error::NoElements);
    }
    Ok(())
}

/// Circular complex Gaussian with the given variance.
#[inline]
fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R, variance: T) -> Complex<T> {
    let s = (variance / T::lit(2.0)).sqrt();
    let re = T::sample_standard_normal(rng);
    let im = T::sample_standard_normal(rng);
    Complex::new(re * s, im * s)
}

/// Per-entry Rician sampler. Draw order per entry: LoS phase, NLoS real, NLoS imaginary.
struct RicianEntry<T> {
    los_amp: T,
    nlos_var: T,
    w_los: T,
    w_nlos: T,
}

impl<T: Real> RicianEntry<T> {
    fn new(d: T, params: &ChannelParams<T>) -> Result<Self> {
        let (w_los, w_nlos) = params.rician_weights();
        Ok(Self {
            los_amp: path_gain(d, params.path.los_exponent)?.sqrt(),
            nlos_var: path_gain(d, params.path.nlos_exponent)?,
            w_los,
            w_nlos,
        })
    }

    #[inline]
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex<T> {
        let angle = T::sample_unit(rng) * T::TAU();
        let (s, c) = angle.sin_cos();
        let los = Complex::new(c * self.los_amp, s * self.los_amp);
        let nlos = complex_gaussian(rng, self.nlos_var);
        los * self.w_los + nlos * self.w_nlos
    }
}

/// Rician vector of length `m` for a link of length `d`.
pub fn draw_rician_vector<T: Real, R: Rng + ?Sized>(
    d: T,
    m: usize,
    params: &ChannelParams<T>,
    rng: &mut R,
) -> Result<Vec<Complex<T>>> {
    check_draw(d, m)?;
    let entry = RicianEntry::new(d, params)?;
    Ok((0..m).map(|_| entry.draw(rng)).collect())
}

/// Rician `m x m` matrix, entries drawn row-major with the vector's per-entry law.
pub fn draw_rician_matrix<T: Real, R: Rng + ?Sized>(
    d: T,
    m: usize,
    params: &ChannelParams<T>,
    rng: &mut R,
) -> Result<CMatrix<T>> {
    check_draw(d, m)?;
    let entry = RicianEntry::new(d, params)?;
    let data = (0..m * m).map(|_| entry.draw(rng)).collect();
    Ok(CMatrix::from_row_major(m, m, data))
}

/// Rayleigh scalar `CN(0, d^-nlos_exponent)`.
pub fn draw_rayleigh_scalar<T: Real, R: Rng + ?Sized>(
    d: T,
    params: &ChannelParams<T>,
    rng: &mut R,
) -> Result<Complex<T>> {
    check_draw(d, 1)?;
    Ok(complex_gaussian(rng, params.rayleigh_mean_power(d)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleRelayLinks<T> {
    pub h_i1r: Vec<Complex<T>>,
    pub h_i2r: Vec<Complex<T>>,
    pub h_sr: Complex<T>,
    pub h_rd: Complex<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoRelayLinks<T> {
    pub h_i1r1: Vec<Complex<T>>,
    pub h_i1r2: Vec<Complex<T>>,
    pub h_i2r1: Vec<Complex<T>>,
    pub h_i2r2: Vec<Complex<T>>,
    pub h_sr1: Complex<T>,
    pub h_r1r2: Complex<T>,
    pub h_r2d: Complex<T>,
}

/// One random drop of every channel in the network. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization<T> {
    pub m: usize,
    pub h_i1s: Vec<Complex<T>>,
    pub h_i2d: Vec<Complex<T>>,
    /// Inter-surface channel, I1 to I2.
    pub g: CMatrix<T>,
    pub single: Option<SingleRelayLinks<T>>,
    pub pair: Option<TwoRelayLinks<T>>,
}

impl<T: Real> ChannelRealization<T> {
    pub fn single_relay(&self) -> Result<&SingleRelayLinks<T>> {
        self.single
            .as_ref()
            .ok_or_else(|| Error::Config("drop has no mid relay channels".into()))
    }

    pub fn two_relay(&self) -> Result<&TwoRelayLinks<T>> {
        self.pair
            .as_ref()
            .ok_or_else(|| Error::Config("drop has no relay pair channels".into()))
    }

    /// Checks dimensions and finiteness of every populated channel.
    pub fn validate(&self) -> Result<()> {
        use crate::error::check_len;
        let m = self.m;
        check_len("h_i1s", m, self.h_i1s.len())?;
        check_len("h_i2d", m, self.h_i2d.len())?;
        check_len("g rows", m, self.g.rows())?;
        check_len("g cols", m, self.g.cols())?;
        let mut vectors: Vec<&[Complex<T>]> = vec![&self.h_i1s, &self.h_i2d, self.g.as_slice()];
        if let Some(s) = &self.single {
            check_len("h_i1r", m, s.h_i1r.len())?;
            check_len("h_i2r", m, s.h_i2r.len())?;
            vectors.extend([&s.h_i1r[..], &s.h_i2r[..]]);
        }
        if let Some(p) = &self.pair {
            for (name, v) in [
                ("h_i1r1", &p.h_i1r1),
                ("h_i1r2", &p.h_i1r2),
                ("h_i2r1", &p.h_i2r1),
                ("h_i2r2", &p.h_i2r2),
            ] {
                check_len(name, m, v.len())?;
                vectors.push(v);
            }
        }
        let finite = |z: &Complex<T>| z.re.is_finite() && z.im.is_finite();
        if vectors.iter().all(|v| v.iter().all(finite)) {
            Ok(())
        } else {
            Err(Error::Config("non-finite channel entry".into()))
        }
    }
}

/// Draws every channel whose endpoints exist in `topology`.
pub fn realize_drop<T: Real>(
    topology: &Topology<T>,
    m: usize,
    params: &ChannelParams<T>,
    seed: DropSeed,
) -> Result<ChannelRealization<T>> {
    if m == 0 {
        return Err(Error::NoElements);
    }
    let rician = |link: Link, a: Point2D<T>, b: Point2D<T>| {
        draw_rician_vector(distance(a, b), m, params, &mut link.rng(seed))
    };
    let rayleigh = |link: Link, a: Point2D<T>, b: Point2D<T>| {
        draw_rayleigh_scalar(distance(a, b), params, &mut link.rng(seed))
    };
    let t = topology;

    let single = match t.mid_relay {
        Some(r) => Some(SingleRelayLinks {
            h_i1r: rician(Link::I1R, t.i1, r)?,
            h_i2r: rician(Link::I2R, t.i2, r)?,
            h_sr: rayleigh(Link::SR, t.s, r)?,
            h_rd: rayleigh(Link::RD, r, t.d)?,
        }),
        None => None,
    };
    let pair = match t.relay_pair {
        Some((r1, r2)) => Some(TwoRelayLinks {
            h_i1r1: rician(Link::I1R1, t.i1, r1)?,
            h_i1r2: rician(Link::I1R2, t.i1, r2)?,
            h_i2r1: rician(Link::I2R1, t.i2, r1)?,
            h_i2r2: rician(Link::I2R2, t.i2, r2)?,
            h_sr1: rayleigh(Link::SR1, t.s, r1)?,
            h_r1r2: rayleigh(Link::R1R2, r1, r2)?,
            h_r2d: rayleigh(Link::R2D, r2, t.d)?,
        }),
        None => None,
    };

    Ok(ChannelRealization {
        m,
        h_i1s: rician(Link::I1S, t.s, t.i1)?,
        h_i2d: rician(Link::I2D, t.i2, t.d)?,
        g: draw_rician_matrix(distance(t.i1, t.i2), m, params, &mut Link::I1I2.rng(seed))?,
        single,
        pair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k: f64) -> ChannelParams<f64> {
        ChannelParams::new(k, PathLossParams::default(), 1.0).unwrap()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn los_only_limit_has_deterministic_magnitude() {
        let p = params(f64::INFINITY);
        let d: f64 = 63.0;
        let amp = d.powf(-2.3 / 2.0);
        for z in draw_rician_vector(d, 32, &p, &mut rng()).unwrap() {
            assert!((z.norm() / amp - 1.0).abs() < 1e-12);
        }
        let g = draw_rician_matrix(180.0, 8, &p, &mut rng()).unwrap();
        let amp = 180f64.powf(-1.15);
        assert!(g.as_slice().iter().all(|z| (z.norm() / amp - 1.0).abs() < 1e-12));
    }

    #[test]
    fn matrix_of_size_one_matches_vector_draw() {
        let p = params(10.0);
        let v = draw_rician_vector(50.0, 1, &p, &mut rng()).unwrap();
        let g = draw_rician_matrix(50.0, 1, &p, &mut rng()).unwrap();
        assert_eq!(v[0], g.get(0, 0));
    }

    #[test]
    fn invalid_draws_are_rejected() {
        let p = params(10.0);
        assert!(draw_rician_vector(0.0, 4, &p, &mut rng()).is_err());
        assert_eq!(draw_rician_vector(1.0, 0, &p, &mut rng()), Err(Error::NoElements));
        assert!(draw_rician_matrix(-2.0, 4, &p, &mut rng()).is_err());
        assert!(draw_rayleigh_scalar(f64::INFINITY, &p, &mut rng()).is_err());
        assert!(ChannelParams::new(-1.0, PathLossParams::default(), 1.0).is_err());
        assert!(ChannelParams::new(1.0, PathLossParams::default(), 0.0).is_err());
    }

    #[test]
    fn k_zero_unit_distance_variance_is_one() {
        let p = params(0.0);
        let v = draw_rician_vector(1.0, 100_000, &p, &mut rng()).unwrap();
        let var = v.iter().map(|z| z.norm_sqr()).sum::<f64>() / v.len() as f64;
        assert!((var - 1.0).abs() < 0.02, "variance {var}");
    }

    #[test]
    fn k_ten_unit_distance_second_moment_is_one() {
        let p = params(10.0);
        let v = draw_rician_vector(1.0, 100_000, &p, &mut rng()).unwrap();
        let power = v.iter().map(|z| z.norm_sqr()).sum::<f64>() / v.len() as f64;
        assert!((power - 1.0).abs() < 0.02, "power {power}");
    }

    #[test]
    fn rayleigh_moments() {
        let p = params(10.0);
        let mut r = rng();
        let n = 100_000;
        let draws: Vec<_> = (0..n)
            .map(|_| draw_rayleigh_scalar(1.0, &p, &mut r).unwrap())
            .collect();
        let var = draws.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
        assert!((var - 1.0).abs() < 0.02);
        let mean = draws.iter().sum::<Complex<f64>>() / n as f64;
        // Each component has std sqrt(1/2); 3-sigma band on the sample mean.
        let band = 3.0 * (0.5f64 / n as f64).sqrt();
        assert!(mean.re.abs() < band && mean.im.abs() < band, "mean {mean}");

        let target = 90f64.powf(-3.5);
        let var = (0..n)
            .map(|_| draw_rayleigh_scalar(90.0, &p, &mut r).unwrap().norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((var / target - 1.0).abs() < 0.02);
    }

    #[test]
    fn k_zero_matrix_variance_follows_nlos_law() {
        let p = params(0.0);
        let g = draw_rician_matrix(2.0, 300, &p, &mut rng()).unwrap();
        let var = g.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>() / (300.0 * 300.0);
        assert!((var / 2f64.powf(-3.5) - 1.0).abs() < 0.02);
    }

    #[test]
    fn drop_is_deterministic_and_populates_by_topology() {
        let p = params(10.0);
        let t = Topology::reference();
        let a = realize_drop(&t, 8, &p, DropSeed::new(3, 5)).unwrap();
        let b = realize_drop(&t, 8, &p, DropSeed::new(3, 5)).unwrap();
        assert_eq!(a, b);
        a.validate().unwrap();
        let c = realize_drop(&t, 8, &p, DropSeed::new(3, 6)).unwrap();
        assert_ne!(a.h_i1s, c.h_i1s);

        let mut pair_only = t;
        pair_only.mid_relay = None;
        let d = realize_drop(&pair_only, 8, &p, DropSeed::new(3, 5)).unwrap();
        assert!(d.single.is_none());
        assert!(d.single_relay().is_err());
        assert_eq!(d.pair, a.pair);
        // Shared links do not depend on which relays exist.
        assert_eq!(d.g, a.g);
        assert_eq!(d.h_i1s, a.h_i1s);

        let mut mid_only = t;
        mid_only.relay_pair = None;
        let e = realize_drop(&mid_only, 8, &p, DropSeed::new(3, 5)).unwrap();
        assert!(e.two_relay().is_err());
        assert_eq!(e.single, a.single);

        assert_eq!(realize_drop(&t, 0, &p, DropSeed::new(3, 5)), Err(Error::NoElements));
    }
}
