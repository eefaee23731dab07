//! Grid-based checks of the Fisher information inequality
//! `1/J(p1 ⊛ p2) ≥ 1/J(p1) + 1/J(p2)`, including the case where `p1` is a
//! joint density whose location variable depends on a second coordinate and
//! the convolution acts on the location variable only.

use crate::dist::DistributionSpec;
use crate::error::{Error, Result};
use crate::quad::trapezoid;

/// Uniform grid `lo + i·h`, `i = 0..points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Grid1D {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo < hi) || points < 64 {
            return Err(Error::GridMismatch(format!(
                "need lo < hi and >= 64 points, got [{lo}, {hi}] x {points}"
            )));
        }
        Ok(Self { lo, hi, points })
    }

    /// Symmetric grid `[-half_width, half_width]` with an odd point count, so
    /// that zero is a grid point and differences of grid points are grid points.
    pub fn symmetric(half_width: f64, points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, points | 1)
    }

    /// Symmetric grid spanning ten standard deviations of `p1 ⊛ p2`.
    pub fn for_pair(p1: &DistributionSpec, p2: &DistributionSpec, points: usize) -> Result<Self> {
        Self::symmetric(10.0 * (p1.variance() + p2.variance()).sqrt(), points)
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.spacing()
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(|i| self.x(i))
    }

    /// Evaluates `f` on the grid.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.xs().map(f).collect()
    }

    /// Grid index of `0`, when the grid is symmetric with an odd point count.
    fn center(&self) -> Option<usize> {
        let c = (self.points - 1) / 2;
        let symmetric = self.points % 2 == 1 && (self.lo + self.hi).abs() <= 1e-12 * self.hi.abs();
        symmetric.then_some(c)
    }
}

/// Fourth-order central difference of uniformly spaced samples; the two
/// outermost points on each side fall back to lower-order stencils.
fn derivative(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut d = vec![0.0; n];
    for i in 2..n - 2 {
        d[i] = (values[i - 2] - 8.0 * values[i - 1] + 8.0 * values[i + 1] - values[i + 2]) / (12.0 * h);
    }
    d[1] = (values[2] - values[0]) / (2.0 * h);
    d[n - 2] = (values[n - 1] - values[n - 3]) / (2.0 * h);
    d[0] = (values[1] - values[0]) / h;
    d[n - 1] = (values[n - 1] - values[n - 2]) / h;
    d
}

/// `Σ (Φ')²/Φ · h` over one row; cells where the density underflowed to zero
/// contribute nothing.
fn fisher_row(values: &[f64], h: f64) -> f64 {
    let d = derivative(values, h);
    let integrand: Vec<f64> = values
        .iter()
        .zip(&d)
        .map(|(&p, &dp)| if p > 0.0 { dp * dp / p } else { 0.0 })
        .collect();
    trapezoid(&integrand, h)
}

/// Location Fisher information of a density sampled on `grid`.
pub fn fi_location_1d(density: &[f64], grid: &Grid1D) -> Result<f64> {
    if let Some(i) = density.iter().position(|&p| !(p > 0.0)) {
        return Err(Error::NonPositiveDensity(i));
    }
    fi_sampled(density, grid)
}

/// As [`fi_location_1d`], but accepts samples that underflowed to exactly
/// zero in the far tails of an analytically evaluated density.
fn fi_sampled(density: &[f64], grid: &Grid1D) -> Result<f64> {
    if density.len() != grid.points {
        return Err(Error::GridMismatch(format!(
            "{} samples on a {}-point grid",
            density.len(),
            grid.points
        )));
    }
    if let Some(i) = density.iter().position(|&p| !(p >= 0.0)) {
        return Err(Error::NonPositiveDensity(i));
    }
    let h = grid.spacing();
    let mass = trapezoid(density, h);
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized(mass));
    }
    Ok(fisher_row(density, h))
}

/// `r(x_i) = Σ_j p1(x_i - x_j) p2(x_j) h`; mass outside the grid is dropped.
fn convolve_row(p1: &[f64], p2: &[f64], center: usize, h: f64, out: &mut [f64]) {
    let n = p1.len();
    for (i, slot) in out.iter_mut().enumerate() {
        // p1 index i - j + center must lie in 0..n
        let j_lo = (i + center).saturating_sub(n - 1);
        let j_hi = (i + center).min(n - 1);
        let mut acc = 0.0;
        for j in j_lo..=j_hi {
            acc += p1[i + center - j] * p2[j];
        }
        *slot = acc * h;
    }
}

/// Density of the sum of two independent variables sampled on `grid`.
pub fn convolve_1d(p1: &[f64], p2: &[f64], grid: &Grid1D) -> Result<Vec<f64>> {
    if p1.len() != grid.points || p2.len() != grid.points {
        return Err(Error::GridMismatch(format!(
            "samples of length {} and {} on a {}-point grid",
            p1.len(),
            p2.len(),
            grid.points
        )));
    }
    let center = grid
        .center()
        .ok_or_else(|| Error::GridMismatch("convolution needs a symmetric grid with an odd point count".into()))?;
    let h = grid.spacing();
    for (name, p) in [("p1", p1), ("p2", p2)] {
        let mass = trapezoid(p, h);
        if (mass - 1.0).abs() > 1e-5 {
            return Err(Error::GridMismatch(format!(
                "{name} is not normalized on this grid (mass {mass})"
            )));
        }
    }
    let mut out = vec![0.0; grid.points];
    convolve_row(p1, p2, center, h, &mut out);
    let mass = trapezoid(&out, h);
    if (mass - 1.0).abs() > 1e-5 {
        return Err(Error::NotNormalized(mass));
    }
    Ok(out)
}

/// Fisher information values entering the inequality and its slack
/// `1/J_r - 1/J_p1 - 1/J_p2` (non-negative when the inequality holds).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiiSlack {
    pub j_p1: f64,
    pub j_p2: f64,
    pub j_r: f64,
    pub slack: f64,
}

impl FiiSlack {
    fn new(j_p1: f64, j_p2: f64, j_r: f64) -> Self {
        Self {
            j_p1,
            j_p2,
            j_r,
            slack: 1.0 / j_r - 1.0 / j_p1 - 1.0 / j_p2,
        }
    }
}

pub const FII_1D_TOL: f64 = 1e-5;

/// One-dimensional inequality for two independent location families.
pub fn check_fii_1d(p1: &DistributionSpec, p2: &DistributionSpec, grid: &Grid1D) -> Result<FiiSlack> {
    let s1 = grid.sample(|x| p1.pdf(x));
    let s2 = grid.sample(|x| p2.pdf(x));
    let r = convolve_1d(&s1, &s2, grid)?;
    Ok(FiiSlack::new(
        fi_sampled(&s1, grid)?,
        fi_sampled(&s2, grid)?,
        fi_sampled(&r, grid)?,
    ))
}

/// Zero-mean bivariate Gaussian over `(x1, x3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateGaussianSpec {
    sigma1_sq: f64,
    sigma3_sq: f64,
    rho: f64,
}

impl BivariateGaussianSpec {
    pub fn new(sigma1_sq: f64, sigma3_sq: f64, rho: f64) -> Result<Self> {
        let ok =
            sigma1_sq.is_finite() && sigma1_sq > 0.0 && sigma3_sq.is_finite() && sigma3_sq > 0.0 && rho.abs() < 1.0;
        if ok {
            Ok(Self {
                sigma1_sq,
                sigma3_sq,
                rho,
            })
        } else {
            Err(Error::NonPositiveDefinite)
        }
    }

    pub fn pdf(&self, x1: f64, x3: f64) -> f64 {
        let (s1, s3) = (self.sigma1_sq.sqrt(), self.sigma3_sq.sqrt());
        let (z1, z3) = (x1 / s1, x3 / s3);
        let one_m = 1.0 - self.rho * self.rho;
        let q = (z1 * z1 - 2.0 * self.rho * z1 * z3 + z3 * z3) / one_m;
        (-0.5 * q).exp() / (2.0 * std::f64::consts::PI * s1 * s3 * one_m.sqrt())
    }

    /// Variance of `x1` given `x3`, i.e. `1/J` of the location family.
    pub fn conditional_variance(&self) -> f64 {
        self.sigma1_sq * (1.0 - self.rho * self.rho)
    }
}

/// Result of the two-dimensional check, with `j_p2` the noise FI.
pub type Fii2d = FiiSlack;

pub const FII_2D_TOL: f64 = 1e-4;

/// Location FI (in `x1`) of a joint density sampled row-wise: `rows[k][i]` is
/// the density at `(x1_i, x3_k)`.
fn fisher_2d(rows: &[Vec<f64>], g1: &Grid1D, g3: &Grid1D) -> f64 {
    let per_row: Vec<f64> = rows.iter().map(|r| fisher_row(r, g1.spacing())).collect();
    trapezoid(&per_row, g3.spacing())
}

/// Inequality for the family `p1(x1 - τ, x3)` convolved with `noise` along
/// `x1`, for an arbitrary joint density `joint(x1, x3)`.
pub fn check_fii_2d_density(
    joint: impl Fn(f64, f64) -> f64,
    noise: &DistributionSpec,
    g1: &Grid1D,
    g3: &Grid1D,
) -> Result<Fii2d> {
    if g1.points < 256 || g3.points < 256 {
        return Err(Error::GridMismatch(
            "two-dimensional checks need at least 256 points per axis".into(),
        ));
    }
    let center = g1
        .center()
        .ok_or_else(|| Error::GridMismatch("the x1 axis must be symmetric with an odd point count".into()))?;
    let h1 = g1.spacing();
    let rows: Vec<Vec<f64>> = g3.xs().map(|x3| g1.sample(|x1| joint(x1, x3))).collect();
    let mass = trapezoid(&rows.iter().map(|r| trapezoid(r, h1)).collect::<Vec<_>>(), g3.spacing());
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized(mass));
    }

    let noise_samples = g1.sample(|x| noise.pdf(x));
    let j_noise = fi_sampled(&noise_samples, g1)?;
    let j_p1 = fisher_2d(&rows, g1, g3);

    let convolved: Vec<Vec<f64>> = rows
        .iter()
        .map(|row| {
            let mut out = vec![0.0; g1.points];
            convolve_row(row, &noise_samples, center, h1, &mut out);
            out
        })
        .collect();
    let j_r = fisher_2d(&convolved, g1, g3);
    Ok(FiiSlack::new(j_p1, j_noise, j_r))
}

/// Default axes for a bivariate Gaussian convolved with `noise` along `x1`.
pub fn default_grids_2d(
    p1: &BivariateGaussianSpec,
    noise: &DistributionSpec,
    points: usize,
) -> Result<(Grid1D, Grid1D)> {
    let g1 = Grid1D::symmetric(10.0 * (p1.sigma1_sq + noise.variance()).sqrt(), points)?;
    let g3 = Grid1D::symmetric(10.0 * p1.sigma3_sq.sqrt(), points)?;
    Ok((g1, g3))
}

pub fn check_fii_2d_dependent(
    p1: &BivariateGaussianSpec,
    noise: &DistributionSpec,
    g1: &Grid1D,
    g3: &Grid1D,
) -> Result<Fii2d> {
    check_fii_2d_density(|x1, x3| p1.pdf(x1, x3), noise, g1, g3)
}
