//! Random flight simulation and Kolmogorov-Smirnov comparison.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::moments::PhysParams;
use crate::quadrature::integrate_breaks;

/// Samples per independent substream in batch runs.
pub const CHUNK: usize = 4096;

/// Seed and stream id of a reproducible generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngStream { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Substream `k` for chunked parallel runs.
    pub fn child(&self, k: u64) -> RngStream {
        RngStream {
            seed: self.seed,
            stream: self.stream.wrapping_add(k.wrapping_add(1) << 32),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlightSample {
    pub radius: f64,
    pub collisions: u32,
    pub t: f64,
}

/// Uniform point on the unit sphere.
pub fn sample_direction<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let s = (1.0 - z * z).max(0.0).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

/// Flight of duration t with exactly c collisions at uniform times.
pub fn sample_flight_conditional<R: Rng + ?Sized>(
    c: u32,
    t: f64,
    v: f64,
    rng: &mut R,
) -> FlightSample {
    let vt = v * t;
    if c == 0 {
        return FlightSample {
            radius: vt,
            collisions: 0,
            t,
        };
    }
    let mut times: Vec<f64> = (0..c).map(|_| rng.random::<f64>() * t).collect();
    times.sort_by(f64::total_cmp);
    let mut pos = [0.0; 3];
    let mut last = 0.0;
    for &tc in times.iter().chain(std::iter::once(&t)) {
        let d = sample_direction(rng);
        let len = v * (tc - last);
        for k in 0..3 {
            pos[k] += len * d[k];
        }
        last = tc;
    }
    let radius = (pos[0] * pos[0] + pos[1] * pos[1] + pos[2] * pos[2])
        .sqrt()
        .min(vt);
    FlightSample {
        radius,
        collisions: c,
        t,
    }
}

/// Flight with a Poisson(lt) number of collisions.
pub fn sample_flight_poisson<R: Rng + ?Sized>(t: f64, p: &PhysParams, rng: &mut R) -> FlightSample {
    let lt = p.lambda * t;
    let c = Poisson::new(lt).map(|d| d.sample(rng)).unwrap_or(0.0) as u32;
    sample_flight_conditional(c, t, p.v, rng)
}

fn batch<F: Fn(&mut ChaCha8Rng) -> FlightSample + Sync>(
    n: usize,
    stream: &RngStream,
    f: F,
) -> Vec<FlightSample> {
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|k| {
            let mut rng = stream.child(k as u64).rng();
            let len = CHUNK.min(n - k * CHUNK);
            (0..len).map(|_| f(&mut rng)).collect::<Vec<_>>()
        })
        .collect()
}

/// n conditional flights; the result does not depend on the thread count.
pub fn simulate_conditional(
    n: usize,
    c: u32,
    t: f64,
    v: f64,
    stream: &RngStream,
) -> Vec<FlightSample> {
    batch(n, stream, |rng| sample_flight_conditional(c, t, v, rng))
}

/// n full flights; the result does not depend on the thread count.
pub fn simulate_poisson(n: usize, t: f64, p: &PhysParams, stream: &RngStream) -> Vec<FlightSample> {
    batch(n, stream, |rng| sample_flight_poisson(t, p, rng))
}

/// Sup distance between the empirical CDF of `samples` and `cdf` on [lo, hi].
///
/// `cdf` is rescaled to run exactly from 0 to 1 over the interval; it must
/// already do so within 2e-3.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F, lo: f64, hi: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let (c0, c1) = (cdf(lo), cdf(hi));
    if c0.abs() > 2e-3 || (c1 - 1.0).abs() > 2e-3 {
        return Err(Error::InvalidArgument(format!(
            "cdf runs from {c0} to {c1}, not 0 to 1"
        )));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = ((cdf(x.clamp(lo, hi)) - c0) / (c1 - c0)).clamp(0.0, 1.0);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Monotone piecewise-cubic (Fritsch-Carlson) interpolant.
#[derive(Clone, Debug)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n || x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "interpolation needs at least two increasing nodes".into(),
            ));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let s: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = s[0];
            d[1] = s[0];
        } else {
            for i in 1..n - 1 {
                if s[i - 1] * s[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
                }
            }
            d[0] = end_slope(h[0], h[1], s[0], s[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
        }
        Ok(Pchip { x, y, d })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = self.x.partition_point(|&a| a <= t) - 1;
        let h = self.x[i + 1] - self.x[i];
        let u = (t - self.x[i]) / h;
        let (u2, u3) = (u * u, u * u * u);
        (2.0 * u3 - 3.0 * u2 + 1.0) * self.y[i]
            + (u3 - 2.0 * u2 + u) * h * self.d[i]
            + (-2.0 * u3 + 3.0 * u2) * self.y[i + 1]
            + (u3 - u2) * h * self.d[i + 1]
    }
}

fn end_slope(h0: f64, h1: f64, s0: f64, s1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if d * s0 <= 0.0 {
        0.0
    } else if s0 * s1 <= 0.0 && d.abs() > 3.0 * s0.abs() {
        3.0 * s0
    } else {
        d
    }
}

/// CDF of a density on [lo, hi], integrated cell by cell on a uniform grid.
pub fn cdf_from_density<F: Fn(f64) -> f64>(
    density: F,
    lo: f64,
    hi: f64,
    cells: usize,
    breaks: &[f64],
) -> Result<Pchip> {
    if cells == 0 || !(hi > lo) {
        return Err(Error::InvalidArgument("empty CDF grid".into()));
    }
    let xs: Vec<f64> = (0..=cells)
        .map(|i| lo + (hi - lo) * i as f64 / cells as f64)
        .collect();
    let mut ys = vec![0.0];
    for w in xs.windows(2) {
        let piece = integrate_breaks(&density, w[0], w[1], breaks, 1e-10)?;
        ys.push(ys.last().unwrap() + piece);
    }
    // quadrature noise must not break monotonicity
    for i in 1..ys.len() {
        ys[i] = ys[i].max(ys[i - 1]);
    }
    Pchip::new(xs, ys)
}
