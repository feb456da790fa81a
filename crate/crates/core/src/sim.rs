//! Seeded simulation of the synthetic test beds.
//!
//! All draws come from ChaCha8 keyed by `(seed, stream)`: the seed picks
//! the experiment, the stream picks the instance, so replications can run
//! in any order (or in parallel) and still produce identical series.
//!
//! [`simulate_linear`] draws, for each time step, the noise innovations
//! first and then the feature vector. A series of length `n` is therefore
//! an exact prefix of the series of length `n + n_te` with the same spec,
//! which is how the future test points behind `Err_sto` are obtained.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

pub const DEFAULT_BURN_IN: usize = 500;

/// A reproducible random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub const ALGORITHM: &'static str = "chacha8";

    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmaSpec {
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub innovation_sd: f64,
    pub burn_in: usize,
}

impl Default for ArmaSpec {
    fn default() -> Self {
        Self::white_noise()
    }
}

impl ArmaSpec {
    pub fn white_noise() -> Self {
        Self {
            phi: Vec::new(),
            theta: Vec::new(),
            innovation_sd: 1.0,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    pub fn ar1(phi: f64) -> Self {
        Self {
            phi: vec![phi],
            ..Self::white_noise()
        }
    }

    /// ARMA(1,20) with the wedge-shaped MA weights `0.1, ..., 1, 1, ..., 0.1`.
    pub fn arma1_20(phi: f64) -> Self {
        let mut theta: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
        theta.extend((1..=10).rev().map(|i| i as f64 / 10.0));
        Self {
            phi: vec![phi],
            theta,
            ..Self::white_noise()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.phi.iter().chain(&self.theta).any(|c| !c.is_finite()) {
            return Err(Error::param("arma", "coefficients must be finite"));
        }
        if !(self.innovation_sd > 0.0 && self.innovation_sd.is_finite()) {
            return Err(Error::param("innovation_sd", "must be finite and > 0"));
        }
        Ok(())
    }

    /// True when the AR part has a unit root or worse (only checked for
    /// the single-lag case used by the presets).
    pub fn is_nonstationary(&self) -> bool {
        self.phi.len() == 1 && self.phi[0].abs() >= 1.0
    }
}

/// Stateful ARMA recursion; each call to `next` consumes one innovation.
#[derive(Debug, Clone)]
struct ArmaState {
    spec: ArmaSpec,
    eps: Vec<f64>,
    eta: Vec<f64>,
}

impl ArmaState {
    fn new(spec: &ArmaSpec, rng: &mut RngStream) -> Self {
        let mut s = Self {
            spec: spec.clone(),
            eps: vec![0.0; spec.phi.len()],
            eta: vec![0.0; spec.theta.len()],
        };
        for _ in 0..spec.burn_in {
            s.next(rng);
        }
        s
    }

    fn next(&mut self, rng: &mut RngStream) -> f64 {
        let e = self.spec.innovation_sd * rng.normal();
        let mut v = e;
        for (c, x) in self.spec.phi.iter().zip(&self.eps) {
            v += c * x;
        }
        for (c, x) in self.spec.theta.iter().zip(&self.eta) {
            v += c * x;
        }
        if !self.eps.is_empty() {
            self.eps.rotate_right(1);
            self.eps[0] = v;
        }
        if !self.eta.is_empty() {
            self.eta.rotate_right(1);
            self.eta[0] = e;
        }
        v
    }
}

pub fn gen_arma(spec: &ArmaSpec, n: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::param("n", "must be >= 1"));
    }
    let mut st = ArmaState::new(spec, rng);
    Ok((0..n).map(|_| st.next(rng)).collect())
}

/// ARIMA(1,1,0) level plus independent `N(0, t^exponent)` noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonstationarySpec {
    pub arima_phi: f64,
    pub variance_growth_exponent: f64,
    pub burn_in: usize,
}

impl Default for NonstationarySpec {
    fn default() -> Self {
        Self {
            arima_phi: 0.99,
            variance_growth_exponent: 4.0,
            burn_in: DEFAULT_BURN_IN,
        }
    }
}

impl NonstationarySpec {
    pub fn validate(&self) -> Result<()> {
        if !self.arima_phi.is_finite() {
            return Err(Error::param("arima_phi", "must be finite"));
        }
        if !(self.variance_growth_exponent >= 0.0 && self.variance_growth_exponent.is_finite()) {
            return Err(Error::param("variance_growth_exponent", "must be finite and >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct NonstationaryState {
    spec: NonstationarySpec,
    increment: f64,
    level: f64,
    t: usize,
}

impl NonstationaryState {
    fn new(spec: &NonstationarySpec, rng: &mut RngStream) -> Self {
        let mut increment = 0.0;
        for _ in 0..spec.burn_in {
            increment = spec.arima_phi * increment + rng.normal();
        }
        Self {
            spec: *spec,
            increment,
            level: 0.0,
            t: 0,
        }
    }

    fn next(&mut self, rng: &mut RngStream) -> f64 {
        self.t += 1;
        self.increment = self.spec.arima_phi * self.increment + rng.normal();
        self.level += self.increment;
        let sd = libm::pow(self.t as f64, self.spec.variance_growth_exponent / 2.0);
        self.level + sd * rng.normal()
    }
}

pub fn gen_nonstationary(spec: &NonstationarySpec, n: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut st = NonstationaryState::new(spec, rng);
    Ok((0..n).map(|_| st.next(rng)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSpec {
    Arma(ArmaSpec),
    Nonstationary(NonstationarySpec),
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            NoiseSpec::Arma(a) => a.validate(),
            NoiseSpec::Nonstationary(s) => s.validate(),
        }
    }
}

enum NoiseState {
    Arma(ArmaState),
    Nonstationary(NonstationaryState),
}

impl NoiseState {
    fn new(spec: &NoiseSpec, rng: &mut RngStream) -> Self {
        match spec {
            NoiseSpec::Arma(a) => NoiseState::Arma(ArmaState::new(a, rng)),
            NoiseSpec::Nonstationary(s) => NoiseState::Nonstationary(NonstationaryState::new(s, rng)),
        }
    }

    fn next(&mut self, rng: &mut RngStream) -> f64 {
        match self {
            NoiseState::Arma(s) => s.next(rng),
            NoiseState::Nonstationary(s) => s.next(rng),
        }
    }
}

/// `y_t = x_t . beta + noise_scale * eps_t` with iid standard normal `x_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSpec {
    pub n: usize,
    pub p: usize,
    pub beta: Vec<f64>,
    pub noise: NoiseSpec,
    pub noise_scale: f64,
    pub seed: u64,
}

impl SimSpec {
    /// `p = 20`, `beta = (1, 1, 1, 1, 0, ..., 0)`, AR(1) noise.
    pub fn sparse_linear(n: usize, phi: f64, seed: u64) -> Self {
        let mut beta = vec![0.0; 20];
        beta[..4].iter_mut().for_each(|b| *b = 1.0);
        Self {
            n,
            p: 20,
            beta,
            noise: NoiseSpec::Arma(ArmaSpec::ar1(phi)),
            noise_scale: 1.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("n", "must be >= 1"));
        }
        if self.beta.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: self.beta.len(),
            });
        }
        if self.beta.iter().any(|b| !b.is_finite()) || !self.noise_scale.is_finite() {
            return Err(Error::param("beta", "coefficients must be finite"));
        }
        self.noise.validate()
    }
}

/// Simulates instance `stream` of `spec` (the stream id of [`RngStream`]).
pub fn simulate_linear(spec: &SimSpec, stream: u64) -> Result<TimeSeries> {
    spec.validate()?;
    let mut rng = RngStream::new(spec.seed, stream);
    let mut noise = NoiseState::new(&spec.noise, &mut rng);
    let mut out = TimeSeries::with_capacity(spec.p, spec.n);
    let mut x = vec![0.0; spec.p];
    for _ in 0..spec.n {
        let e = noise.next(&mut rng);
        for v in x.iter_mut() {
            *v = rng.normal();
        }
        let y = x.iter().zip(&spec.beta).map(|(a, b)| a * b).sum::<f64>() + spec.noise_scale * e;
        out.push(&x, y)?;
    }
    Ok(out)
}

/// GARCH(1,1) returns `R_t = sigma_t z_t`, started at the stationary
/// variance and burned in.
pub fn gen_garch11(omega: f64, tau: f64, beta: f64, n: usize, burn_in: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    if !(omega > 0.0 && tau >= 0.0 && beta >= 0.0 && tau + beta < 1.0) {
        return Err(Error::GarchBoundary { omega, tau, beta });
    }
    let mut s2 = omega / (1.0 - tau - beta);
    let mut out = Vec::with_capacity(n);
    for i in 0..burn_in + n {
        let r = libm::sqrt(s2) * rng.normal();
        if i >= burn_in {
            out.push(r);
        }
        s2 = omega + tau * r * r + beta * s2;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_weights() {
        let s = ArmaSpec::arma1_20(0.5);
        assert_eq!(s.theta.len(), 20);
        assert_eq!(s.theta[9], 1.0);
        assert_eq!(s.theta[10], 1.0);
        assert_eq!(s.theta[0], 0.1);
        assert_eq!(s.theta[19], 0.1);
    }

    #[test]
    fn deterministic_and_prefix() {
        let spec = SimSpec::sparse_linear(60, 0.5, 9);
        let a = simulate_linear(&spec, 3).unwrap();
        let b = simulate_linear(&spec, 3).unwrap();
        assert_eq!(a, b);
        let long = simulate_linear(&SimSpec { n: 80, ..spec.clone() }, 3).unwrap();
        assert_eq!(long.prefix(60).unwrap().to_series(), a);
        let other = simulate_linear(&spec, 4).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn zero_signal_zero_noise() {
        let spec = SimSpec {
            beta: vec![0.0; 20],
            noise_scale: 0.0,
            ..SimSpec::sparse_linear(30, 0.5, 1)
        };
        let s = simulate_linear(&spec, 0).unwrap();
        assert!(s.outcomes().iter().all(|&y| y == 0.0));
    }

    #[test]
    fn rejects_bad_coefficients() {
        let mut rng = RngStream::new(0, 0);
        let spec = ArmaSpec {
            phi: vec![f64::NAN],
            ..ArmaSpec::white_noise()
        };
        assert!(gen_arma(&spec, 10, &mut rng).is_err());
    }
}
