//! Zero-centered smooth location families.
//!
//! Every family here has a strictly positive density on the whole line, a
//! finite variance and a finite location Fisher information
//! `J = ∫ Φ'(y)² / Φ(y) dy`. The product `var · J` (the Fisher tightness) is
//! at least one, with equality only for the Gaussian.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// Anything the simulator can draw initial offsets or measurement noise from.
///
/// [`DistributionSpec`] is the production implementation; tests plug in
/// degenerate doubles (for instance a source that always draws zero).
pub trait Family: Sync {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;
    fn variance(&self) -> f64;
    fn fisher_information(&self) -> Result<f64>;

    fn fisher_tightness(&self) -> Result<f64> {
        Ok(self.variance() * self.fisher_information()?)
    }
}

/// Distribution kinds, as exposed to callers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Gaussian,
    Logistic,
    GaussianMixture2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Gaussian {
        variance: f64,
    },
    Logistic {
        scale: f64,
    },
    /// Weight `w` at `+2(1-w)·offset`, weight `1-w` at `-2w·offset`, so the
    /// mean is zero and the component centers are `2·offset` apart.
    Mixture2 {
        weight: f64,
        offset: f64,
        component_variance: f64,
    },
}

/// A validated, immutable, zero-centered distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct DistributionSpec(Shape);

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawSpec {
    Gaussian {
        variance: f64,
    },
    Logistic {
        scale: f64,
    },
    Mixture2 {
        weight: f64,
        offset: f64,
        component_variance: f64,
    },
}

impl TryFrom<RawSpec> for DistributionSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        match raw {
            RawSpec::Gaussian { variance } => Self::gaussian(variance),
            RawSpec::Logistic { scale } => Self::logistic(scale),
            RawSpec::Mixture2 {
                weight,
                offset,
                component_variance,
            } => Self::mixture2(weight, offset, component_variance),
        }
    }
}

impl From<DistributionSpec> for RawSpec {
    fn from(spec: DistributionSpec) -> Self {
        match spec.0 {
            Shape::Gaussian { variance } => RawSpec::Gaussian { variance },
            Shape::Logistic { scale } => RawSpec::Logistic { scale },
            Shape::Mixture2 {
                weight,
                offset,
                component_variance,
            } => RawSpec::Mixture2 {
                weight,
                offset,
                component_variance,
            },
        }
    }
}

fn positive_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

#[inline]
fn normal_pdf(x: f64, mean: f64, variance: f64) -> f64 {
    let z = x - mean;
    (-0.5 * z * z / variance).exp() / (2.0 * PI * variance).sqrt()
}

impl DistributionSpec {
    pub fn gaussian(variance: f64) -> Result<Self> {
        positive_finite("variance", variance)?;
        Ok(Self(Shape::Gaussian { variance }))
    }

    pub fn logistic(scale: f64) -> Result<Self> {
        positive_finite("scale", scale)?;
        Ok(Self(Shape::Logistic { scale }))
    }

    pub fn mixture2(weight: f64, offset: f64, component_variance: f64) -> Result<Self> {
        if !(weight > 0.0 && weight < 1.0) {
            return Err(Error::InvalidSpec(format!("weight must lie in (0, 1), got {weight}")));
        }
        if !offset.is_finite() || offset < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "offset must be finite and >= 0, got {offset}"
            )));
        }
        positive_finite("component_variance", component_variance)?;
        Ok(Self(Shape::Mixture2 {
            weight,
            offset,
            component_variance,
        }))
    }

    pub fn kind(&self) -> Kind {
        match self.0 {
            Shape::Gaussian { .. } => Kind::Gaussian,
            Shape::Logistic { .. } => Kind::Logistic,
            Shape::Mixture2 { .. } => Kind::GaussianMixture2,
        }
    }

    /// Component (weight, mean) pairs of the mixture.
    fn mixture_components(weight: f64, offset: f64) -> [(f64, f64); 2] {
        [
            (weight, 2.0 * (1.0 - weight) * offset),
            (1.0 - weight, -2.0 * weight * offset),
        ]
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self.0 {
            Shape::Gaussian { variance } => normal_pdf(x, 0.0, variance),
            Shape::Logistic { scale } => {
                let e = (-(x.abs()) / scale).exp();
                e / (scale * (1.0 + e) * (1.0 + e))
            }
            Shape::Mixture2 {
                weight,
                offset,
                component_variance,
            } => Self::mixture_components(weight, offset)
                .iter()
                .map(|&(w, m)| w * normal_pdf(x, m, component_variance))
                .sum(),
        }
    }

    /// Analytic derivative of the density.
    pub fn pdf_derivative(&self, x: f64) -> f64 {
        match self.0 {
            Shape::Gaussian { variance } => -x / variance * normal_pdf(x, 0.0, variance),
            Shape::Logistic { .. } => self.pdf(x) * self.score(x),
            Shape::Mixture2 {
                weight,
                offset,
                component_variance,
            } => Self::mixture_components(weight, offset)
                .iter()
                .map(|&(w, m)| -w * (x - m) / component_variance * normal_pdf(x, m, component_variance))
                .sum(),
        }
    }

    /// `Φ'(x) / Φ(x)`, evaluated without forming the ratio of two tiny numbers.
    pub fn score(&self, x: f64) -> f64 {
        match self.0 {
            Shape::Gaussian { variance } => -x / variance,
            Shape::Logistic { scale } => -(x / (2.0 * scale)).tanh() / scale,
            Shape::Mixture2 {
                weight,
                offset,
                component_variance,
            } => {
                // Responsibilities in log space.
                let comps = Self::mixture_components(weight, offset);
                let logs = comps.map(|(w, m)| w.ln() - 0.5 * (x - m) * (x - m) / component_variance);
                let top = logs[0].max(logs[1]);
                let r = logs.map(|l| (l - top).exp());
                let total = r[0] + r[1];
                comps
                    .iter()
                    .zip(r)
                    .map(|(&(_, m), ri)| ri / total * (-(x - m) / component_variance))
                    .sum()
            }
        }
    }

    /// Closed-form variance (all supported kinds have one).
    pub fn variance(&self) -> f64 {
        match self.0 {
            Shape::Gaussian { variance } => variance,
            Shape::Logistic { scale } => PI * PI * scale * scale / 3.0,
            Shape::Mixture2 {
                weight,
                offset,
                component_variance,
            } => component_variance + 4.0 * weight * (1.0 - weight) * offset * offset,
        }
    }

    /// Half-width of the symmetric interval outside which every integrand
    /// used here carries less than ~1e-15 of its mass.
    pub fn support_half_width(&self) -> f64 {
        match self.0 {
            Shape::Gaussian { variance } => 12.0 * variance.sqrt(),
            Shape::Logistic { scale } => 45.0 * scale,
            Shape::Mixture2 {
                weight,
                offset,
                component_variance,
            } => {
                let [(_, a), (_, b)] = Self::mixture_components(weight, offset);
                a.abs().max(b.abs()) + 12.0 * component_variance.sqrt()
            }
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, what: &'static str) -> Result<f64> {
        let l = self.support_half_width();
        quad::integrate(f, -l, l, what)
    }

    pub fn quadrature_variance(&self) -> Result<f64> {
        self.integrate(|x| x * x * self.pdf(x), "variance")
    }

    /// Location Fisher information `∫ Φ'²/Φ`, always by quadrature.
    pub fn quadrature_fisher_information(&self) -> Result<f64> {
        self.integrate(
            |x| {
                let s = self.score(x);
                s * s * self.pdf(x)
            },
            "fisher information",
        )
    }

    /// Location Fisher information: analytic for the Gaussian, quadrature otherwise.
    pub fn fisher_information(&self) -> Result<f64> {
        match self.0 {
            Shape::Gaussian { variance } => Ok(1.0 / variance),
            _ => self.quadrature_fisher_information(),
        }
    }

    /// `var · J`. Exactly one for the Gaussian.
    pub fn fisher_tightness(&self) -> Result<f64> {
        match self.0 {
            Shape::Gaussian { .. } => Ok(1.0),
            _ => Ok(self.variance() * self.fisher_information()?),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.0 {
            Shape::Gaussian { variance } => {
                let z: f64 = StandardNormal.sample(rng);
                variance.sqrt() * z
            }
            Shape::Logistic { scale } => {
                // Inverse CDF; u in the open interval (0, 1).
                let u: f64 = loop {
                    let u: f64 = rng.random();
                    if u > 0.0 {
                        break u;
                    }
                };
                scale * (u / (1.0 - u)).ln()
            }
            Shape::Mixture2 {
                weight,
                offset,
                component_variance,
            } => {
                let [(_, plus), (_, minus)] = Self::mixture_components(weight, offset);
                let center = if rng.random::<f64>() < weight { plus } else { minus };
                let z: f64 = StandardNormal.sample(rng);
                center + component_variance.sqrt() * z
            }
        }
    }
}

impl Family for DistributionSpec {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        DistributionSpec::sample(self, rng)
    }

    fn variance(&self) -> f64 {
        DistributionSpec::variance(self)
    }

    fn fisher_information(&self) -> Result<f64> {
        DistributionSpec::fisher_information(self)
    }

    fn fisher_tightness(&self) -> Result<f64> {
        DistributionSpec::fisher_tightness(self)
    }
}

/// The finite family of initial distributions plus the measurement noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyCatalog {
    pub initial: Vec<DistributionSpec>,
    pub noise: DistributionSpec,
}

impl FamilyCatalog {
    pub fn new(initial: Vec<DistributionSpec>, noise: DistributionSpec) -> Result<Self> {
        if initial.is_empty() {
            return Err(Error::InvalidSpec(
                "catalog needs at least one initial distribution".into(),
            ));
        }
        Ok(Self { initial, noise })
    }

    /// Largest Fisher tightness over the initial distributions and the noise.
    pub fn delta0(&self) -> Result<f64> {
        let mut best = self.noise.fisher_tightness()?;
        for spec in &self.initial {
            best = best.max(spec.fisher_tightness()?);
        }
        Ok(best)
    }
}
