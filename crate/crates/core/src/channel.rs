//! Memoryless channels, cost vectors and the symmetry maps `tau_a`.

use std::f64::consts::PI;

pub use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::ring::{Elem, RingSpec};

/// Magnitude at which log-likelihood ratios are clipped.
pub const LLR_CLIP: f64 = 1e12;

/// Per-position log-likelihood-ratio vectors `log(p(y_i|0) / p(y_i|a))`,
/// stored row-major as `values[i * (q - 1) + (a - 1)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVector {
    q: usize,
    n: usize,
    values: Vec<f64>,
    clipped: bool,
}

impl CostVector {
    /// Wraps raw values, clipping them to `[-LLR_CLIP, LLR_CLIP]`.
    pub fn new(q: usize, values: Vec<f64>) -> Result<Self> {
        if q < 2 || values.len() % (q - 1) != 0 {
            return Err(Error::DimensionMismatch {
                expected: (values.len() / (q - 1).max(1)) * (q - 1).max(1),
                actual: values.len(),
            });
        }
        let mut clipped = false;
        let values = values
            .into_iter()
            .map(|v| {
                let c = if v.is_nan() { 0.0 } else { v.clamp(-LLR_CLIP, LLR_CLIP) };
                clipped |= c != v;
                c
            })
            .collect::<Vec<_>>();
        let n = values.len() / (q - 1);
        Ok(CostVector { q, n, values, clipped })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Cost of symbol `a != 0` at position `i`.
    #[inline]
    pub fn get(&self, i: usize, a: Elem) -> f64 {
        self.values[i * (self.q - 1) + a - 1]
    }

    /// Flat `n(q-1)` view, in the same order as the LP's `f` variables.
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// True when any entry hit the clipping bound (or was NaN).
    pub fn clipped(&self) -> bool {
        self.clipped
    }

    /// `sum_i lambda^{(c_i)}(y_i)`, the linear cost of a word.
    pub fn word_cost(&self, c: &[Elem]) -> f64 {
        c.iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, &v)| self.get(i, v))
            .sum()
    }
}

/// A q-ary input memoryless channel (modulator included) that satisfies the
/// symmetry condition `p(y|b) = p(tau_a(y) | b - a)`.
pub trait Channel: Send + Sync {
    type Symbol: Clone + Send + Sync + std::fmt::Debug;

    fn q(&self) -> usize;

    /// Rejects rings this channel cannot carry.
    fn check_ring(&self, ring: &RingSpec) -> Result<()>;

    /// Maps a word onto channel inputs.
    fn modulate(&self, c: &[Elem]) -> Vec<Self::Symbol>;

    /// Passes a modulated sequence through the channel.
    fn transmit<R: Rng + ?Sized>(&self, input: &[Self::Symbol], rng: &mut R) -> Vec<Self::Symbol>;

    /// `log p(y | b)` (probability or density).
    fn log_likelihood(&self, y: &Self::Symbol, b: Elem) -> f64;

    /// Cost vector `lambda(y)` for a received word.
    fn cost_vector(&self, y: &[Self::Symbol]) -> CostVector;

    /// Symmetry bijection `tau_a` on the output alphabet.
    fn tau(&self, a: Elem, y: &Self::Symbol) -> Self::Symbol;

    /// Symbol-wise maximum-likelihood decision.
    fn hard_decision(&self, y: &Self::Symbol) -> Elem;
}

/// Channel-symbol energy and noise spectral density for a given SNR per
/// information symbol (in dB) and code rate, with `N0 = 1`.
pub fn snr_to_noise(snr_db: f64, rate: f64) -> Result<(f64, f64)> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidChannel(format!("rate must lie in (0, 1], got {rate}")));
    }
    if !snr_db.is_finite() {
        return Err(Error::InvalidChannel(format!("SNR must be finite, got {snr_db}")));
    }
    Ok((rate * 10f64.powf(snr_db / 10.0), 1.0))
}

/// q-ary PSK with points `sqrt(E) exp(2 pi i a / q)` over complex AWGN.
#[derive(Debug, Clone, PartialEq)]
pub struct PskAwgn {
    q: usize,
    energy: f64,
    n0: f64,
    points: Vec<Complex64>,
}

impl PskAwgn {
    pub fn new(q: usize, energy: f64, n0: f64) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidChannel("PSK needs q >= 2".into()));
        }
        if !(energy >= 0.0 && energy.is_finite()) || !(n0 > 0.0 && n0.is_finite()) {
            return Err(Error::InvalidChannel(format!("bad energy {energy} or N0 {n0}")));
        }
        let points = (0..q).map(|a| Complex64::from_polar(1.0, 2.0 * PI * a as f64 / q as f64)).collect();
        Ok(PskAwgn { q, energy, n0, points })
    }

    /// Builds the channel for an SNR per information symbol (dB) and rate.
    pub fn from_snr_db(q: usize, snr_db: f64, rate: f64) -> Result<Self> {
        let (energy, n0) = snr_to_noise(snr_db, rate)?;
        Self::new(q, energy, n0)
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    /// Unit-energy constellation point for symbol `a`.
    pub fn point(&self, a: Elem) -> Complex64 {
        self.points[a]
    }
}

impl Channel for PskAwgn {
    type Symbol = Complex64;

    fn q(&self) -> usize {
        self.q
    }

    fn check_ring(&self, ring: &RingSpec) -> Result<()> {
        // Ring element a must act as rotation index a: the additive group is Z_q.
        let cyclic = ring.q() == self.q
            && (0..self.q).all(|a| (0..self.q).all(|b| ring.add(a, b) == (a + b) % self.q));
        if cyclic {
            Ok(())
        } else {
            Err(Error::SchemeMismatch(format!(
                "{}-PSK needs a ring whose addition is that of Z{}",
                self.q, self.q
            )))
        }
    }

    fn modulate(&self, c: &[Elem]) -> Vec<Complex64> {
        let amp = self.energy.sqrt();
        c.iter().map(|&a| self.points[a] * amp).collect()
    }

    fn transmit<R: Rng + ?Sized>(&self, input: &[Complex64], rng: &mut R) -> Vec<Complex64> {
        let sigma = (self.n0 / 2.0).sqrt();
        input
            .iter()
            .map(|&x| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                x + Complex64::new(sigma * re, sigma * im)
            })
            .collect()
    }

    fn log_likelihood(&self, y: &Complex64, b: Elem) -> f64 {
        let d = y - self.points[b] * self.energy.sqrt();
        -d.norm_sqr() / self.n0 - (PI * self.n0).ln()
    }

    fn cost_vector(&self, y: &[Complex64]) -> CostVector {
        let amp = self.energy.sqrt();
        let s0 = self.points[0] * amp;
        let mut values = Vec::with_capacity(y.len() * (self.q - 1));
        for &yi in y {
            let d0 = (yi - s0).norm_sqr();
            for a in 1..self.q {
                values.push(((yi - self.points[a] * amp).norm_sqr() - d0) / self.n0);
            }
        }
        CostVector::new(self.q, values).expect("shape matches q")
    }

    fn tau(&self, a: Elem, y: &Complex64) -> Complex64 {
        y * self.points[(self.q - a % self.q) % self.q]
    }

    fn hard_decision(&self, y: &Complex64) -> Elem {
        let amp = self.energy.sqrt();
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (a, &p) in self.points.iter().enumerate() {
            let d = (y - p * amp).norm_sqr();
            // Rounding in the constellation must not break exact ties.
            if d < best_d - 1e-12 * (1.0 + best_d.min(d)) {
                best = a;
                best_d = d;
            }
        }
        best
    }
}

/// Discrete memoryless q-ary symmetric channel with crossover probability `eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct QarySymmetric {
    q: usize,
    eps: f64,
    // sub[y * q + a] = y - a in the ring
    sub: Vec<Elem>,
}

impl QarySymmetric {
    pub fn new(q: usize, eps: f64) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidChannel("q-ary symmetric channel needs q >= 2".into()));
        }
        let max = 1.0 - 1.0 / q as f64;
        if !(eps >= 0.0 && eps < max - 1e-12) {
            return Err(Error::InvalidChannel(format!("crossover {eps} outside [0, {max})")));
        }
        let sub = (0..q).flat_map(|y| (0..q).map(move |a| (y + q - a) % q)).collect();
        Ok(QarySymmetric { q, eps, sub })
    }

    /// Uses the ring's own subtraction for `tau`.
    pub fn with_ring(ring: &RingSpec, eps: f64) -> Result<Self> {
        let mut ch = Self::new(ring.q(), eps)?;
        let q = ring.q();
        ch.sub = (0..q).flat_map(|y| (0..q).map(move |a| ring.sub(y, a))).collect();
        Ok(ch)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    fn prob(&self, y: Elem, b: Elem) -> f64 {
        if y == b {
            1.0 - self.eps
        } else {
            self.eps / (self.q - 1) as f64
        }
    }
}

impl Channel for QarySymmetric {
    type Symbol = Elem;

    fn q(&self) -> usize {
        self.q
    }

    fn check_ring(&self, ring: &RingSpec) -> Result<()> {
        if ring.q() == self.q
            && (0..self.q).all(|y| (0..self.q).all(|a| self.sub[y * self.q + a] == ring.sub(y, a)))
        {
            Ok(())
        } else {
            Err(Error::SchemeMismatch(format!(
                "channel alphabet of {} symbols does not match ring {}",
                self.q,
                ring.name()
            )))
        }
    }

    fn modulate(&self, c: &[Elem]) -> Vec<Elem> {
        c.to_vec()
    }

    fn transmit<R: Rng + ?Sized>(&self, input: &[Elem], rng: &mut R) -> Vec<Elem> {
        input
            .iter()
            .map(|&x| {
                if rng.gen::<f64>() < self.eps {
                    let k = rng.gen_range(0..self.q - 1);
                    if k >= x {
                        k + 1
                    } else {
                        k
                    }
                } else {
                    x
                }
            })
            .collect()
    }

    fn log_likelihood(&self, y: &Elem, b: Elem) -> f64 {
        self.prob(*y, b).ln()
    }

    fn cost_vector(&self, y: &[Elem]) -> CostVector {
        let llr = ((1.0 - self.eps) / (self.eps / (self.q - 1) as f64)).ln();
        let mut values = Vec::with_capacity(y.len() * (self.q - 1));
        for &yi in y {
            for a in 1..self.q {
                values.push(if yi == 0 {
                    llr
                } else if yi == a {
                    -llr
                } else {
                    0.0
                });
            }
        }
        CostVector::new(self.q, values).expect("shape matches q")
    }

    fn tau(&self, a: Elem, y: &Elem) -> Elem {
        self.sub[y * self.q + a]
    }

    fn hard_decision(&self, y: &Elem) -> Elem {
        *y
    }
}
