//! Planar antenna array: geometry, wave vectors, steering vectors, and
//! array-factor evaluation.
//!
//! Elements sit on an M x N lattice in the z = 0 plane with spacings given in
//! wavelengths. Complex weights and steering vectors are flattened
//! column-major: all rows of column 1, then column 2, and so on.

use crate::error::{Error, Result};
use crate::geom::ArrivalDirection;
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Slack allowed on the L1 weight constraint.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// M x N planar lattice with spacings in wavelengths; all elements at z = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    m_rows: usize,
    n_cols: usize,
    dx_wavelengths: f64,
    dy_wavelengths: f64,
}

impl ArrayGeometry {
    pub fn new(m_rows: usize, n_cols: usize, dx_wavelengths: f64, dy_wavelengths: f64) -> Result<Self> {
        if m_rows == 0 || n_cols == 0 {
            return Err(Error::InvalidGeometry("element counts must be at least 1".into()));
        }
        if !(dx_wavelengths > 0.0) || !(dy_wavelengths > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "spacings must be positive, got dx = {dx_wavelengths}, dy = {dy_wavelengths}"
            )));
        }
        Ok(Self {
            m_rows,
            n_cols,
            dx_wavelengths,
            dy_wavelengths,
        })
    }

    /// Half-wavelength lattice.
    pub fn half_wavelength(m_rows: usize, n_cols: usize) -> Result<Self> {
        Self::new(m_rows, n_cols, 0.5, 0.5)
    }

    pub fn m_rows(&self) -> usize {
        self.m_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn dx_wavelengths(&self) -> f64 {
        self.dx_wavelengths
    }

    pub fn dy_wavelengths(&self) -> f64 {
        self.dy_wavelengths
    }

    pub fn num_elements(&self) -> usize {
        self.m_rows * self.n_cols
    }

    /// Element offset in wavelengths for 0-based row `m`, column `n`.
    fn offset_wavelengths(&self, m: usize, n: usize) -> (f64, f64) {
        (m as f64 * self.dx_wavelengths, n as f64 * self.dy_wavelengths)
    }
}

/// Plane-wave vector (rad/m); magnitude 2*pi/lambda.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveVector {
    pub kx: f64,
    pub ky: f64,
    pub kz: f64,
}

impl WaveVector {
    pub fn magnitude(&self) -> f64 {
        (self.kx * self.kx + self.ky * self.ky + self.kz * self.kz).sqrt()
    }
}

/// Complex per-element excitations, flattened column-major.
///
/// [`WeightVector::new`] enforces the L1 feasibility constraint
/// sum |w| <= 1 used by the weight optimizer. Pattern-analysis code that
/// needs unnormalized excitations can use [`WeightVector::unconstrained`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<Complex64>,
}

impl WeightVector {
    pub fn new(weights: Vec<Complex64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("weight vector is empty".into()));
        }
        if weights.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
            return Err(Error::InvalidWeights("weights must be finite".into()));
        }
        let l1: f64 = weights.iter().map(|w| w.norm()).sum();
        if l1 > 1.0 + WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidWeights(format!(
                "sum of |w| = {l1} exceeds 1"
            )));
        }
        Ok(Self { weights })
    }

    /// Builds a weight vector without the L1 constraint check.
    pub fn unconstrained(weights: Vec<Complex64>) -> Self {
        Self { weights }
    }

    /// Uniform amplitudes 1/(MN) with zero phases.
    pub fn uniform(num_elements: usize) -> Self {
        let a = 1.0 / num_elements as f64;
        Self {
            weights: vec![Complex64::new(a, 0.0); num_elements],
        }
    }

    pub fn from_polar(amplitudes: &[f64], phases_rad: &[f64]) -> Result<Self> {
        if amplitudes.len() != phases_rad.len() {
            return Err(Error::DimensionMismatch {
                expected: amplitudes.len(),
                got: phases_rad.len(),
            });
        }
        Self::new(
            amplitudes
                .iter()
                .zip(phases_rad)
                .map(|(&a, &p)| Complex64::from_polar(a, p))
                .collect(),
        )
    }

    /// Conjugate-match to a steering vector, scaled so that sum |w| = 1.
    /// Maximizes the plain-product array factor |sum w_i v_i|.
    pub fn conjugate_match(steering: &[Complex64]) -> Result<Self> {
        let l1: f64 = steering.iter().map(|v| v.norm()).sum();
        if l1 <= 0.0 {
            return Err(Error::InvalidWeights("steering vector is zero".into()));
        }
        Self::new(steering.iter().map(|v| v.conj() / l1).collect())
    }

    /// Matched filter for conjugate combining, scaled so that sum |w| = 1.
    /// Maximizes |W^H v|; the conjugation happens in the combiner, so the
    /// weights copy the steering phases.
    pub fn matched_filter(steering: &[Complex64]) -> Result<Self> {
        let l1: f64 = steering.iter().map(|v| v.norm()).sum();
        if l1 <= 0.0 {
            return Err(Error::InvalidWeights("steering vector is zero".into()));
        }
        Self::new(steering.iter().map(|v| v / l1).collect())
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn l1_norm(&self) -> f64 {
        self.weights.iter().map(|w| w.norm()).sum()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.weights.iter().map(|w| w.norm_sqr()).sum()
    }

    pub fn amplitudes(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w.norm()).collect()
    }

    /// Phases reduced to the canonical range [0, 2*pi).
    pub fn phases_rad(&self) -> Vec<f64> {
        self.weights
            .iter()
            .map(|w| {
                let p = w.arg().rem_euclid(TAU);
                if p == TAU {
                    0.0
                } else {
                    p
                }
            })
            .collect()
    }

    /// True when the L1 constraint holds.
    pub fn is_feasible(&self) -> bool {
        self.l1_norm() <= 1.0 + WEIGHT_SUM_TOLERANCE
    }
}

/// Wave vector for a plane wave arriving from `direction`:
/// k = (2*pi/lambda) (sin t cos p, sin t sin p, cos t).
pub fn wave_vector(direction: &ArrivalDirection, wavelength_m: f64) -> WaveVector {
    let k = TAU / wavelength_m;
    let (s_th, c_th) = direction.off_nadir_rad.sin_cos();
    let (s_ph, c_ph) = direction.azimuth_rad.sin_cos();
    WaveVector {
        kx: k * s_th * c_ph,
        ky: k * s_th * s_ph,
        kz: k * c_th,
    }
}

/// Steering vector: per-element propagation phases exp(-j k . r), flattened
/// column-major to match [`WeightVector`]. All entries have unit modulus.
pub fn steering_vector(
    geometry: &ArrayGeometry,
    direction: &ArrivalDirection,
    wavelength_m: f64,
) -> Vec<Complex64> {
    let k = wave_vector(direction, wavelength_m);
    let mut out = Vec::with_capacity(geometry.num_elements());
    for n in 0..geometry.n_cols() {
        for m in 0..geometry.m_rows() {
            let (x_wl, y_wl) = geometry.offset_wavelengths(m, n);
            // z = 0 for every element, so k_z never enters.
            let phase = k.kx * x_wl * wavelength_m + k.ky * y_wl * wavelength_m;
            out.push(Complex64::from_polar(1.0, -phase));
        }
    }
    out
}

/// Array factor: the weighted sum of per-element phase terms for the given
/// arrival direction. Equals the inner product of the weights with the
/// steering vector.
pub fn array_factor(
    geometry: &ArrayGeometry,
    weights: &WeightVector,
    direction: &ArrivalDirection,
    wavelength_m: f64,
) -> Result<Complex64> {
    if weights.len() != geometry.num_elements() {
        return Err(Error::DimensionMismatch {
            expected: geometry.num_elements(),
            got: weights.len(),
        });
    }
    let s_th = direction.off_nadir_rad.sin();
    let (s_ph, c_ph) = direction.azimuth_rad.sin_cos();
    let u = s_th * c_ph;
    let v = s_th * s_ph;
    let k = TAU / wavelength_m;
    let mut sum = Complex64::new(0.0, 0.0);
    let w = weights.as_slice();
    for n in 0..geometry.n_cols() {
        for m in 0..geometry.m_rows() {
            let (x_wl, y_wl) = geometry.offset_wavelengths(m, n);
            let phase = k * (x_wl * wavelength_m * u + y_wl * wavelength_m * v);
            sum += w[n * geometry.m_rows() + m] * Complex64::from_polar(1.0, -phase);
        }
    }
    Ok(sum)
}

/// Total field: element factor times array factor. Elements are isotropic
/// here (element factor 1), so this is the array factor; kept as the seam
/// for non-isotropic element patterns.
pub fn total_field(
    geometry: &ArrayGeometry,
    weights: &WeightVector,
    direction: &ArrivalDirection,
    wavelength_m: f64,
) -> Result<Complex64> {
    const ELEMENT_FACTOR: f64 = 1.0;
    array_factor(geometry, weights, direction, wavelength_m).map(|af| af * ELEMENT_FACTOR)
}

/// Array output Y = W^T X for element inputs flattened in weight order.
pub fn array_output(weights: &WeightVector, inputs: &[Complex64]) -> Result<Complex64> {
    if weights.len() != inputs.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: inputs.len(),
        });
    }
    Ok(weights
        .as_slice()
        .iter()
        .zip(inputs)
        .map(|(w, x)| w * x)
        .sum())
}
