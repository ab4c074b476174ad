//! The extended generator of a spectrally positive Lévy process,
//!
//! ```text
//! 𝓛f(x) = b·f′(x) + (σ²/2)·f″(x)
//!          + ∫₀^∞ (f(x+y) − f(x) − f′(x)·y·I(y ∈ (0,1))) ν(dy),
//! ```
//!
//! restricted to the compound-Poisson jump measures the samplers support.
//! Atomic laws are summed exactly; exponential and Pareto laws are
//! integrated with composite Simpson quadrature, split at the compensator
//! kink `y = 1`, and truncated at `jump_truncation`.

use crate::error::{Error, Result};
use crate::levy::{JumpLaw, LevyTriplet};

use super::testfn::TestFunction;

/// Generator evaluation setup for one triplet.
#[derive(Debug, Clone)]
pub struct GeneratorEval {
    pub triplet: LevyTriplet,
    pub quadrature_mesh: f64,
    pub jump_truncation: f64,
}

impl GeneratorEval {
    pub fn new(triplet: LevyTriplet, quadrature_mesh: f64, jump_truncation: f64) -> Result<Self> {
        triplet.check_parameters()?;
        if !(quadrature_mesh > 0.0) || !(jump_truncation > 0.0) {
            return Err(Error::Config(format!(
                "quadrature mesh and jump truncation must be positive, got {quadrature_mesh} and {jump_truncation}"
            )));
        }
        Ok(GeneratorEval { triplet, quadrature_mesh, jump_truncation })
    }

    /// Default quadrature setup: mesh 1e-3, truncation 40 mean jump sizes.
    pub fn with_defaults(triplet: LevyTriplet) -> Result<Self> {
        let reach = triplet.jumps.as_ref().map_or(1.0, |j| 40.0 * j.law.mean());
        GeneratorEval::new(triplet, 1e-3, reach.max(1.0))
    }

    /// Applies the extended generator to `f` at `x ≥ 0`.
    pub fn apply(&self, f: &TestFunction, x: f64) -> Result<f64> {
        let tr = &self.triplet;
        let mut out = tr.drift_b * f.first_derivative(x) + 0.5 * tr.sigma * tr.sigma * f.second_derivative(x);
        if let Some(jumps) = &tr.jumps {
            out += match &jumps.law {
                JumpLaw::FixedSizes { sizes, probabilities } => {
                    let fx = f.value(x);
                    let dfx = f.first_derivative(x);
                    let mut acc = 0.0;
                    for (s, p) in sizes.iter().zip(probabilities) {
                        let compensator = if *s < 1.0 { dfx * s } else { 0.0 };
                        acc += p * (f.value(x + s) - fx - compensator);
                    }
                    jumps.rate * acc
                }
                JumpLaw::Exponential { mean } => {
                    let lambda = 1.0 / mean;
                    self.quadrature(f, x, jumps.rate, 0.0, |y| lambda * (-lambda * y).exp())?
                }
                JumpLaw::Pareto { alpha, scale } => {
                    let (a, s) = (*alpha, *scale);
                    self.quadrature(f, x, jumps.rate, s, move |y| a * s.powf(a) / y.powf(a + 1.0))?
                }
            };
        }
        Ok(out)
    }

    /// `γ·f′(0+) − 𝓛f(0+)`: zero exactly when `f` satisfies the sticky
    /// boundary condition.
    pub fn boundary_defect(&self, f: &TestFunction, gamma: f64) -> Result<f64> {
        Ok(gamma * f.first_derivative(0.0) - self.apply(f, 0.0)?)
    }

    fn quadrature(
        &self,
        f: &TestFunction,
        x: f64,
        rate: f64,
        support_lo: f64,
        density: impl Fn(f64) -> f64,
    ) -> Result<f64> {
        let hi = self.jump_truncation;
        if hi <= support_lo {
            return Err(Error::Config(format!(
                "jump truncation {hi} does not reach the law's support starting at {support_lo}"
            )));
        }
        let fx = f.value(x);
        let dfx = f.first_derivative(x);
        // The compensator cutoff makes the integrand jump at y = 1, so the
        // two segments carry their own one-sided branches; evaluating an
        // indicator pointwise would corrupt the shared endpoint and knock
        // Simpson down to first order.
        let compensated = |y: f64| (f.value(x + y) - fx - dfx * y) * density(y);
        let plain = |y: f64| (f.value(x + y) - fx) * density(y);
        let mut total = 0.0;
        if support_lo < 1.0 {
            total += simpson(&compensated, support_lo, hi.min(1.0), self.quadrature_mesh);
        }
        if hi > 1.0 {
            total += simpson(&plain, support_lo.max(1.0), hi, self.quadrature_mesh);
        }
        Ok(rate * total)
    }
}

fn simpson(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, mesh: f64) -> f64 {
    let mut n = ((hi - lo) / mesh).ceil() as usize;
    if n < 2 {
        n = 2;
    }
    if n % 2 == 1 {
        n += 1;
    }
    let h = (hi - lo) / n as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + i as f64 * h);
    }
    acc * h / 3.0
}
