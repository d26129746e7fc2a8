//! Node placement and distance-based path gains.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A node position in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2D<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point2D<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Euclidean distance in meters.
pub fn distance<T: Real>(a: Point2D<T>, b: Point2D<T>) -> T {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Power-domain path gain `d^-exponent`.
pub fn path_gain<T: Real>(d: T, exponent: T) -> Result<T> {
    if !(d > T::zero()) || !d.is_finite() {
        return Err(Error::InvalidDistance(d.as_f64()));
    }
    Ok(d.powf(-exponent))
}

/// LoS and NLoS path-loss exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossParams<T> {
    pub los_exponent: T,
    pub nlos_exponent: T,
}

impl<T: Real> PathLossParams<T> {
    pub fn new(los_exponent: T, nlos_exponent: T) -> Result<Self> {
        for (name, v) in [("los_exponent", los_exponent), ("nlos_exponent", nlos_exponent)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive and finite, got {v}"),
                });
            }
        }
        Ok(Self {
            los_exponent,
            nlos_exponent,
        })
    }
}

impl<T: Real> Default for PathLossParams<T> {
    fn default() -> Self {
        Self {
            los_exponent: T::lit(2.3),
            nlos_exponent: T::lit(3.5),
        }
    }
}

/// Source, both surfaces, destination and whichever relays are deployed.
///
/// The single mid relay and the relay pair may coexist so that every
/// architecture can be evaluated on one shared drop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Topology<T> {
    pub s: Point2D<T>,
    pub i1: Point2D<T>,
    pub i2: Point2D<T>,
    pub d: Point2D<T>,
    pub mid_relay: Option<Point2D<T>>,
    pub relay_pair: Option<(Point2D<T>, Point2D<T>)>,
}

impl<T: Real> Topology<T> {
    /// The reference placement: S at the origin, surfaces at (60, 20) and
    /// (240, 20), D at (300, 0), R at (150, 0), R1 at (60, 0), R2 at (240, 0).
    pub fn reference() -> Self {
        let p = |x: f64, y: f64| Point2D::new(T::lit(x), T::lit(y));
        Self {
            s: p(0.0, 0.0),
            i1: p(60.0, 20.0),
            i2: p(240.0, 20.0),
            d: p(300.0, 0.0),
            mid_relay: Some(p(150.0, 0.0)),
            relay_pair: Some((p(60.0, 0.0), p(240.0, 0.0))),
        }
    }

    pub fn without_relays(mut self) -> Self {
        self.mid_relay = None;
        self.relay_pair = None;
        self
    }

    /// Every node pair that some channel is drawn between.
    pub fn links(&self) -> Vec<(&'static str, Point2D<T>, Point2D<T>)> {
        let mut out = vec![
            ("S-I1", self.s, self.i1),
            ("I1-I2", self.i1, self.i2),
            ("I2-D", self.i2, self.d),
        ];
        if let Some(r) = self.mid_relay {
            out.extend([
                ("I1-R", self.i1, r),
                ("I2-R", self.i2, r),
                ("S-R", self.s, r),
                ("R-D", r, self.d),
            ]);
        }
        if let Some((r1, r2)) = self.relay_pair {
            out.extend([
                ("I1-R1", self.i1, r1),
                ("I1-R2", self.i1, r2),
                ("I2-R1", self.i2, r1),
                ("I2-R2", self.i2, r2),
                ("S-R1", self.s, r1),
                ("R1-R2", r1, r2),
                ("R2-D", r2, self.d),
            ]);
        }
        out
    }

    /// Checks finiteness and that every used distance is positive.
    pub fn validate(&self) -> Result<()> {
        for (name, a, b) in self.links() {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::Config(format!("link {name} has non-finite coordinates")));
            }
            let d = distance(a, b);
            if !(d > T::zero()) {
                return Err(Error::Config(format!("link {name} has zero length")));
            }
        }
        Ok(())
    }
}
