//! Periodic 2D Gaussian random fields by the spectral representation method,
//! log-normal translation, and mapping onto fiber meso-meshes.
//!
//! The unit centered homogeneous Gaussian field G(x) carries the triangle
//! power spectral density
//!
//! ```text
//!   S(k1, k2) = (1/ku^2) L(k1/ku) L(k2/ku),   L(u) = 1 - |u| for |u| <= 1
//! ```
//!
//! whose autocorrelation is sinc^2(ku z1 / 2pi) sinc^2(ku z2 / 2pi). The
//! digitized field is synthesized in the FFT form of the spectral
//! representation method with two random-phase harmonic families covering the
//! half-plane k1 >= 0. Amplitudes follow the ergodic variant: the DC term is
//! dropped and the second family is zeroed on both frequency axes, so each
//! spatial cosine pattern appears exactly once. Every realization then has
//! sample mean exactly zero and deterministic sample variance 1 - 1/N^2 over
//! one period, which is what makes macro responses objective for small
//! correlation lengths.
//!
//! The yield-stress field is the pointwise translation exp(mG + sG * G) with
//! (mG, sG) fixed by the target log-normal mean and standard deviation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use std::f64::consts::{PI, TAU};

use crate::error::{ModelError, Result};

/// Discretization of the spectral representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSpec {
    corr_length: f64,
    n_modes: usize,
    grid_size: usize,
}

impl FieldSpec {
    /// `corr_length` > 0, `n_modes` = N wave-number divisions per axis,
    /// `grid_size` = M grid points per side with the sampling condition
    /// M >= 2N.
    pub fn new(corr_length: f64, n_modes: usize, grid_size: usize) -> Result<Self> {
        if !(corr_length > 0.0) || !corr_length.is_finite() {
            return Err(ModelError::Domain(format!(
                "correlation length must be positive, got {corr_length}"
            )));
        }
        if n_modes == 0 {
            return Err(ModelError::Config("N must be at least 1".into()));
        }
        if grid_size < 2 * n_modes {
            return Err(ModelError::Config(format!(
                "grid size M = {grid_size} violates the sampling condition M >= 2N = {}",
                2 * n_modes
            )));
        }
        Ok(Self {
            corr_length,
            n_modes,
            grid_size,
        })
    }

    /// Paper defaults N = 10, M = 64.
    pub fn with_defaults(corr_length: f64) -> Result<Self> {
        Self::new(corr_length, 10, 64)
    }

    pub fn corr_length(&self) -> f64 {
        self.corr_length
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// Cutoff wave number ku = 2 pi / lc.
    pub fn cutoff_wave_number(&self) -> f64 {
        TAU / self.corr_length
    }

    /// Wave-number increment dk = ku / N.
    pub fn wave_increment(&self) -> f64 {
        self.cutoff_wave_number() / self.n_modes as f64
    }

    /// Grid spacing dx = L0 / M.
    pub fn grid_step(&self) -> f64 {
        self.period() / self.grid_size as f64
    }

    /// Period L0 = 2 pi / dk = N * lc.
    pub fn period(&self) -> f64 {
        self.n_modes as f64 * self.corr_length
    }
}

/// Triangle power spectral density, Eq. of the product form above.
///
/// Nonnegative, unit integral over the plane, zero outside |ki| <= ku.
pub fn triangle_psd(kappa1: f64, kappa2: f64, cutoff: f64) -> Result<f64> {
    if !(cutoff > 0.0) {
        return Err(ModelError::Domain(format!(
            "cutoff wave number must be positive, got {cutoff}"
        )));
    }
    Ok(triangle(kappa1 / cutoff) * triangle(kappa2 / cutoff) / (cutoff * cutoff))
}

fn triangle(u: f64) -> f64 {
    let a = u.abs();
    if a <= 1.0 {
        1.0 - a
    } else {
        0.0
    }
}

/// Autocorrelation paired with the triangle PSD:
/// sinc^2(ku z1 / 2pi) * sinc^2(ku z2 / 2pi).
pub fn autocorrelation(zeta1: f64, zeta2: f64, cutoff: f64) -> Result<f64> {
    if !(cutoff > 0.0) {
        return Err(ModelError::Domain(format!(
            "cutoff wave number must be positive, got {cutoff}"
        )));
    }
    let s1 = sinc(cutoff * zeta1 / TAU);
    let s2 = sinc(cutoff * zeta2 / TAU);
    Ok(s1 * s1 * s2 * s2)
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// One digitized realization of the unit Gaussian field on an M x M grid.
#[derive(Debug, Clone)]
pub struct GaussianFieldGrid {
    values: Vec<f64>,
    spec: FieldSpec,
    seed: u64,
}

impl GaussianFieldGrid {
    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Value at grid indices, wrapped periodically.
    pub fn value(&self, i1: usize, i2: usize) -> f64 {
        let m = self.spec.grid_size;
        self.values[(i1 % m) * m + (i2 % m)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Synthesizes a realization: deterministic given (spec, seed).
///
/// Phase angles are drawn as 2 M^2 uniforms on [0, 2pi) in fixed order: the
/// phi grid row-major over (n1, n2), then the psi grid row-major.
pub fn generate_gaussian_field(spec: &FieldSpec, seed: u64) -> Result<GaussianFieldGrid> {
    let m = spec.grid_size;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut phi = vec![0.0f64; m * m];
    for p in phi.iter_mut() {
        *p = rng.gen::<f64>() * TAU;
    }
    let mut psi = vec![0.0f64; m * m];
    for p in psi.iter_mut() {
        *p = rng.gen::<f64>() * TAU;
    }
    let values = synthesize(spec, &phi, &psi)?;
    Ok(GaussianFieldGrid {
        values,
        spec: *spec,
        seed,
    })
}

/// Core synthesis given explicit phase grids (row-major M x M each).
pub(crate) fn synthesize(spec: &FieldSpec, phi: &[f64], psi: &[f64]) -> Result<Vec<f64>> {
    let m = spec.grid_size;
    let n = spec.n_modes;
    if phi.len() != m * m || psi.len() != m * m {
        return Err(ModelError::Config("phase grid size mismatch".into()));
    }
    let ku = spec.cutoff_wave_number();
    let dk = spec.wave_increment();

    // Complex spectral amplitudes scattered on the M x M frequency grid. The
    // first family B occupies the first quadrant; the second family B~ is
    // folded onto negative k2 via index M - n2. B~ vanishes on both axes and
    // there is no DC term, so every spatial pattern is represented once.
    let mut freq = vec![Complex::new(0.0, 0.0); m * m];
    for n1 in 0..=n {
        for n2 in 0..=n {
            let s = triangle_psd(n1 as f64 * dk, n2 as f64 * dk, ku)?;
            if s == 0.0 {
                continue;
            }
            let amp = 2.0 * dk * s.sqrt();
            if n1 + n2 > 0 {
                let p = phi[n1 * m + n2];
                freq[n1 * m + n2] += Complex::from_polar(amp, p);
            }
            if n1 >= 1 && n2 >= 1 {
                let p = psi[n1 * m + n2];
                freq[n1 * m + (m - n2)] += Complex::from_polar(amp, p);
            }
        }
    }

    inverse_fft_2d(&mut freq, m);
    Ok(freq.iter().map(|c| c.re).collect())
}

/// Unnormalized inverse 2D DFT in place (row-major M x M).
fn inverse_fft_2d(data: &mut [Complex<f64>], m: usize) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(m);
    for row in data.chunks_exact_mut(m) {
        fft.process(row);
    }
    transpose(data, m);
    for row in data.chunks_exact_mut(m) {
        fft.process(row);
    }
    transpose(data, m);
}

fn transpose(data: &mut [Complex<f64>], m: usize) {
    for i in 0..m {
        for j in (i + 1)..m {
            data.swap(i * m + j, j * m + i);
        }
    }
}

/// Target log-normal marginal of the yield-stress field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalSpec {
    mean: f64,
    std_dev: f64,
}

impl MarginalSpec {
    pub fn new(mean: f64, std_dev: f64) -> Result<Self> {
        if !(mean > 0.0) || !mean.is_finite() {
            return Err(ModelError::Domain(format!(
                "marginal mean must be positive, got {mean}"
            )));
        }
        if !(std_dev >= 0.0) || !std_dev.is_finite() {
            return Err(ModelError::Domain(format!(
                "marginal standard deviation must be nonnegative, got {std_dev}"
            )));
        }
        Ok(Self { mean, std_dev })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn std_dev(&self) -> f64 {
        self.std_dev
    }

    /// sG = sqrt(ln(1 + s^2/m^2)).
    pub fn gaussian_std(&self) -> f64 {
        let r = self.std_dev / self.mean;
        (1.0 + r * r).ln().sqrt()
    }

    /// mG = -ln(sqrt(1 + s^2/m^2) / m), i.e. exp(mG) = m / sqrt(1 + s^2/m^2).
    pub fn gaussian_mean(&self) -> f64 {
        let r = self.std_dev / self.mean;
        self.mean.ln() - 0.5 * (1.0 + r * r).ln()
    }

    /// Pointwise translation of a standard Gaussian value.
    pub fn transform(&self, g: f64) -> f64 {
        (self.gaussian_mean() + self.gaussian_std() * g).exp()
    }
}

/// Strictly positive yield-stress field on the same grid as its source.
#[derive(Debug, Clone)]
pub struct YieldField {
    values: Vec<f64>,
    spec: FieldSpec,
    marginal: MarginalSpec,
    seed: u64,
}

impl YieldField {
    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn marginal(&self) -> &MarginalSpec {
        &self.marginal
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn value(&self, i1: usize, i2: usize) -> f64 {
        let m = self.spec.grid_size;
        self.values[(i1 % m) * m + (i2 % m)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Maps grid values onto the centroids of the N_f^2 meshes tiling a
    /// square fiber section of edge `d` by bilinear interpolation with
    /// periodic continuation.
    pub fn map_to_fiber_mesh(&self, edge: f64) -> Result<FiberYieldAssignment> {
        let period = self.spec.period();
        if !(edge > 0.0) {
            return Err(ModelError::Domain(format!(
                "fiber edge must be positive, got {edge}"
            )));
        }
        if edge > period * (1.0 + 1e-12) {
            return Err(ModelError::Config(format!(
                "fiber edge d = {edge} exceeds the field period L0 = {period}; \
                 the fiber section must fit inside one period"
            )));
        }
        let dx = self.spec.grid_step();
        let n_f = fiber_mesh_count(edge, dx);
        let m = self.spec.grid_size;
        let mesh = edge / n_f as f64;
        let mut yields = Vec::with_capacity(n_f * n_f);
        for k1 in 0..n_f {
            let x1 = (k1 as f64 + 0.5) * mesh;
            let (i1, f1) = cell_coord(x1, dx, m);
            for k2 in 0..n_f {
                let x2 = (k2 as f64 + 0.5) * mesh;
                let (i2, f2) = cell_coord(x2, dx, m);
                let j1 = (i1 + 1) % m;
                let j2 = (i2 + 1) % m;
                let v = (1.0 - f1) * (1.0 - f2) * self.values[i1 * m + i2]
                    + f1 * (1.0 - f2) * self.values[j1 * m + i2]
                    + (1.0 - f1) * f2 * self.values[i1 * m + j2]
                    + f1 * f2 * self.values[j1 * m + j2];
                yields.push(v);
            }
        }
        Ok(FiberYieldAssignment {
            edge,
            n_f,
            yields,
        })
    }
}

fn cell_coord(x: f64, dx: f64, m: usize) -> (usize, f64) {
    let u = x / dx;
    let i = u.floor();
    let frac = u - i;
    ((i as usize) % m, frac)
}

/// Number of meshes per side: Int(d/dx) when d is an exact multiple of dx,
/// otherwise Int(d/dx) + 1.
pub fn fiber_mesh_count(edge: f64, dx: f64) -> usize {
    let ratio = edge / dx;
    let nearest = ratio.round();
    if (ratio - nearest).abs() < 1e-9 * ratio.max(1.0) {
        nearest as usize
    } else {
        ratio.ceil() as usize
    }
}

/// Pointwise log-normal translation exp(mG + sG * G) of a Gaussian grid.
pub fn lognormal_transform(grid: &GaussianFieldGrid, marginal: &MarginalSpec) -> YieldField {
    let m_g = marginal.gaussian_mean();
    let s_g = marginal.gaussian_std();
    let values = grid
        .values
        .iter()
        .map(|&g| (m_g + s_g * g).exp())
        .collect();
    YieldField {
        values,
        spec: grid.spec,
        marginal: *marginal,
        seed: grid.seed,
    }
}

/// Yield stresses at fiber mesh centroids.
#[derive(Debug, Clone)]
pub struct FiberYieldAssignment {
    edge: f64,
    n_f: usize,
    yields: Vec<f64>,
}

impl FiberYieldAssignment {
    pub fn edge(&self) -> f64 {
        self.edge
    }

    pub fn mesh_count(&self) -> usize {
        self.n_f
    }

    pub fn value(&self, k1: usize, k2: usize) -> f64 {
        self.yields[k1 * self.n_f + k2]
    }

    pub fn values(&self) -> &[f64] {
        &self.yields
    }
}

/// Spatial correlation structure of the yield field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorrelationModel {
    /// Finite correlation length: spectral synthesis, translation, mapping.
    Spectral(FieldSpec),
    /// Vanishing correlation length: i.i.d. values drawn directly at the
    /// mesh centroids (the FFT synthesis cannot represent white noise).
    WhiteNoise { n_f: usize },
}

/// Builds the yield assignment for a fiber of edge `d` under either
/// correlation model; deterministic given the seed.
pub fn build_yield_assignment(
    model: &CorrelationModel,
    marginal: &MarginalSpec,
    edge: f64,
    seed: u64,
) -> Result<FiberYieldAssignment> {
    match model {
        CorrelationModel::Spectral(spec) => {
            let grid = generate_gaussian_field(spec, seed)?;
            lognormal_transform(&grid, marginal).map_to_fiber_mesh(edge)
        }
        CorrelationModel::WhiteNoise { n_f } => {
            if *n_f == 0 {
                return Err(ModelError::Config("N_f must be at least 1".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let yields = (0..n_f * n_f)
                .map(|_| marginal.transform(rng.sample(StandardNormal)))
                .collect();
            Ok(FiberYieldAssignment {
                edge,
                n_f: *n_f,
                yields,
            })
        }
    }
}
