//! Channel, SINR, and capacity computation.
//!
//! The channel between a ground emitter and the satellite array composes the
//! free-space amplitude loss lambda/(4 pi rho) with the steering vector for
//! the arrival direction, so that |W^H H|^2 carries exactly one power-domain
//! FSPL factor. SINR uses the expected-power form: interference powers sum
//! and the noise term enters through its variance scaled by ||W||^2.

use crate::array::{steering_vector, ArrayGeometry, WeightVector};
use crate::error::{Error, Result};
use crate::geom::ArrivalDirection;
use num_complex::Complex64;

/// Boltzmann constant (J/K).
pub const BOLTZMANN_J_PER_K: f64 = 1.38e-23;

/// Speed of light (m/s).
pub const SPEED_OF_LIGHT_M_S: f64 = 2.997_924_58e8;

/// Receiver link budget; noise power is always recomputed from kappa*B*T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub carrier_frequency_hz: f64,
    pub bandwidth_hz: f64,
    pub noise_temperature_k: f64,
}

impl LinkBudget {
    pub fn new(carrier_frequency_hz: f64, bandwidth_hz: f64, noise_temperature_k: f64) -> Result<Self> {
        for (name, v) in [
            ("carrier_frequency_hz", carrier_frequency_hz),
            ("bandwidth_hz", bandwidth_hz),
            ("noise_temperature_k", noise_temperature_k),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidBudget(format!("{name} = {v} must be positive")));
            }
        }
        Ok(Self {
            carrier_frequency_hz,
            bandwidth_hz,
            noise_temperature_k,
        })
    }

    /// L-band defaults: 1.575 GHz carrier, 20 MHz bandwidth, 290 K.
    pub fn l_band_default() -> Self {
        Self {
            carrier_frequency_hz: 1.575e9,
            bandwidth_hz: 20e6,
            noise_temperature_k: 290.0,
        }
    }

    pub fn noise_power_w(&self) -> f64 {
        BOLTZMANN_J_PER_K * self.bandwidth_hz * self.noise_temperature_k
    }

    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT_M_S / self.carrier_frequency_hz
    }
}

/// Single-stream or per-user-stream beamforming.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeamformingMode {
    Analog,
    Digital,
}

impl BeamformingMode {
    /// Capacity prefactor: 1/K for analog beamforming, 1 for digital.
    pub fn lambda_factor(&self, num_users: usize) -> f64 {
        match self {
            BeamformingMode::Analog => 1.0 / num_users as f64,
            BeamformingMode::Digital => 1.0,
        }
    }
}

/// Free-space amplitude loss lambda/(4 pi rho); its square is the
/// power-domain FSPL.
pub fn fspl_amplitude(wavelength_m: f64, range_m: f64) -> f64 {
    wavelength_m / (4.0 * std::f64::consts::PI * range_m)
}

/// Channel vector: FSPL amplitude times the unit-modulus steering vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector {
    pub fspl_amplitude: f64,
    steering: Vec<Complex64>,
}

impl ChannelVector {
    pub fn len(&self) -> usize {
        self.steering.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steering.is_empty()
    }

    pub fn steering(&self) -> &[Complex64] {
        &self.steering
    }

    /// Full channel entries h_i = L_amp * v_i.
    pub fn entries(&self) -> Vec<Complex64> {
        self.steering.iter().map(|v| v * self.fspl_amplitude).collect()
    }

    /// Combined response W^H H.
    pub fn combine(&self, weights: &WeightVector) -> Complex64 {
        let dot: Complex64 = weights
            .as_slice()
            .iter()
            .zip(&self.steering)
            .map(|(w, v)| w.conj() * v)
            .sum();
        dot * self.fspl_amplitude
    }

    /// Combined power |W^H H|^2.
    pub fn combined_power(&self, weights: &WeightVector) -> f64 {
        self.combine(weights).norm_sqr()
    }
}

/// Builds the channel vector for an emitter seen at `direction`.
pub fn channel(
    geometry: &ArrayGeometry,
    direction: &ArrivalDirection,
    wavelength_m: f64,
) -> ChannelVector {
    let range_m = direction.range_km * 1e3;
    ChannelVector {
        fspl_amplitude: fspl_amplitude(wavelength_m, range_m),
        steering: steering_vector(geometry, direction, wavelength_m),
    }
}

/// An emitter as seen by the receiver: its channel and EIRP.
#[derive(Debug, Clone)]
pub struct Emitter {
    pub channel: ChannelVector,
    pub power_w: f64,
}

/// Expected-power SINR for one user stream:
/// gamma = P_k |W^H H_k|^2 / (sum_j P_j |W^H H_j|^2 + sigma^2 ||W||^2).
///
/// A zero weight vector yields gamma = 0.
pub fn sinr(
    weights: &WeightVector,
    user: &Emitter,
    interferers: &[Emitter],
    noise_power_w: f64,
) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::InvalidWeights("weight vector is empty".into()));
    }
    if user.power_w < 0.0 || interferers.iter().any(|i| i.power_w < 0.0) {
        return Err(Error::InvalidWorld("emitter powers must be non-negative".into()));
    }
    let w_norm_sq = weights.l2_norm_sq();
    if w_norm_sq == 0.0 {
        return Ok(0.0);
    }
    let signal = user.power_w * user.channel.combined_power(weights);
    let interference: f64 = interferers
        .iter()
        .map(|i| i.power_w * i.channel.combined_power(weights))
        .sum();
    let denom = interference + noise_power_w * w_norm_sq;
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(signal / denom)
}

/// Shannon throughput B * log2(1 + gamma) in bit/s.
pub fn throughput_bps(gamma: f64, bandwidth_hz: f64) -> f64 {
    bandwidth_hz * (1.0 + gamma).log2()
}

/// Total capacity Lambda * sum_k C_k.
pub fn total_capacity_bps(mode: BeamformingMode, per_user_bps: &[f64]) -> Result<f64> {
    if per_user_bps.is_empty() {
        return Err(Error::InvalidWorld("no users to sum capacity over".into()));
    }
    let sum: f64 = per_user_bps.iter().sum();
    Ok(mode.lambda_factor(per_user_bps.len()) * sum)
}

/// Linear ratio to dB.
pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn dir(azimuth_rad: f64, off_nadir_rad: f64, range_km: f64) -> ArrivalDirection {
        ArrivalDirection::new(azimuth_rad, off_nadir_rad, range_km).unwrap()
    }

    #[test]
    fn fspl_amplitude_normalization_case() {
        assert_abs_diff_eq!(fspl_amplitude(4.0 * PI, 1.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn fspl_matches_decibel_formula() {
        // Standard oracle: FSPL(dB) = 20 log10(d) + 20 log10(f) - 147.55.
        let f = 1.575e9;
        let lambda = SPEED_OF_LIGHT_M_S / f;
        let d = 800e3;
        let power = fspl_amplitude(lambda, d).powi(2);
        let fspl_db = 20.0 * d.log10() + 20.0 * f.log10() - 147.55;
        assert_relative_eq!(-to_db(power), fspl_db, max_relative = 1e-3);
        // Order of magnitude: about 3.6e-16 (-154.5 dB) at L-band over 800 km.
        assert_relative_eq!(power, 3.57e-16, max_relative = 0.01);
    }

    #[test]
    fn doubling_range_costs_six_db() {
        let a = fspl_amplitude(0.19, 800e3).powi(2);
        let b = fspl_amplitude(0.19, 1600e3).powi(2);
        assert_relative_eq!(to_db(a) - to_db(b), 6.0206, max_relative = 1e-4);
    }

    #[test]
    fn channel_is_scaled_steering_vector() {
        let geom = ArrayGeometry::half_wavelength(4, 4).unwrap();
        let d = dir(1.1, 0.4, 900.0);
        let lambda = 0.19;
        let h = channel(&geom, &d, lambda);
        let v = steering_vector(&geom, &d, lambda);
        let amp = fspl_amplitude(lambda, 900e3);
        assert_relative_eq!(h.fspl_amplitude, amp, max_relative = 1e-12);
        for (hi, vi) in h.entries().iter().zip(&v) {
            assert_abs_diff_eq!((hi - vi * amp).norm(), 0.0, epsilon = 1e-24);
            assert_relative_eq!(hi.norm(), amp, max_relative = 1e-12);
        }
    }

    #[test]
    fn boresight_channel_entries_are_real_and_equal() {
        let geom = ArrayGeometry::half_wavelength(4, 4).unwrap();
        let h = channel(&geom, &dir(0.0, 0.0, 800.0), 0.19);
        let first = h.entries()[0];
        for e in h.entries() {
            assert_abs_diff_eq!((e - first).norm(), 0.0, epsilon = 1e-18);
        }
    }

    #[test]
    fn matched_filter_sinr_matches_scalar_budget() {
        let geom = ArrayGeometry::half_wavelength(4, 4).unwrap();
        let budget = LinkBudget::l_band_default();
        let lambda = budget.wavelength_m();
        let d = dir(0.7, 0.3, 850.0);
        let h = channel(&geom, &d, lambda);
        let w = WeightVector::matched_filter(h.steering()).unwrap();
        let p = 10.0;
        let got = sinr(&w, &Emitter { channel: h, power_w: p }, &[], budget.noise_power_w()).unwrap();
        // Scalar oracle: P * L_pwr * MN / sigma^2 at the matched filter.
        let l_pwr = fspl_amplitude(lambda, 850e3).powi(2);
        let expected = p * l_pwr * 16.0 / budget.noise_power_w();
        assert_relative_eq!(got, expected, max_relative = 1e-9);
    }

    #[test]
    fn null_weight_gives_zero_sinr() {
        let geom = ArrayGeometry::half_wavelength(2, 1).unwrap();
        let d = dir(0.0, 0.0, 800.0);
        let h = channel(&geom, &d, 0.19);
        // Boresight steering is (1, 1); (0.5, -0.5) is orthogonal to it.
        let w = WeightVector::new(vec![Complex64::new(0.5, 0.0), Complex64::new(-0.5, 0.0)]).unwrap();
        let gamma = sinr(&w, &Emitter { channel: h, power_w: 10.0 }, &[], 1e-12).unwrap();
        assert_abs_diff_eq!(gamma, 0.0, epsilon = 1e-30);
    }

    #[test]
    fn colocated_equal_power_interferer_pins_sinr_at_unity() {
        let geom = ArrayGeometry::half_wavelength(4, 4).unwrap();
        let d = dir(0.9, 0.2, 800.0);
        let h = channel(&geom, &d, 0.19);
        let user = Emitter { channel: h.clone(), power_w: 10.0 };
        let interferer = Emitter { channel: h, power_w: 10.0 };
        let w = WeightVector::uniform(16);
        let gamma = sinr(&w, &user, &[interferer], 0.0).unwrap();
        assert_relative_eq!(gamma, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_weights_define_zero_sinr() {
        let geom = ArrayGeometry::half_wavelength(2, 2).unwrap();
        let h = channel(&geom, &dir(0.0, 0.1, 800.0), 0.19);
        let w = WeightVector::new(vec![Complex64::new(0.0, 0.0); 4]).unwrap();
        assert_eq!(sinr(&w, &Emitter { channel: h, power_w: 5.0 }, &[], 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn sinr_invariant_under_global_weight_scaling() {
        let geom = ArrayGeometry::half_wavelength(4, 4).unwrap();
        let lambda = 0.19;
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let user = Emitter {
                channel: channel(&geom, &dir(rng.gen_range(0.0..6.0), rng.gen_range(0.0..1.0), 800.0), lambda),
                power_w: 10.0,
            };
            let ints: Vec<Emitter> = (0..2)
                .map(|_| Emitter {
                    channel: channel(&geom, &dir(rng.gen_range(0.0..6.0), rng.gen_range(0.0..1.0), 850.0), lambda),
                    power_w: 20.0,
                })
                .collect();
            let w: Vec<Complex64> = (0..16)
                .map(|_| Complex64::from_polar(rng.gen_range(0.0..0.0625), rng.gen_range(0.0..2.0 * PI)))
                .collect();
            let alpha = Complex64::from_polar(rng.gen_range(0.01..0.9), rng.gen_range(0.0..2.0 * PI));
            let w1 = WeightVector::unconstrained(w.clone());
            let w2 = WeightVector::unconstrained(w.iter().map(|c| c * alpha).collect());
            let g1 = sinr(&w1, &user, &ints, 1e-13).unwrap();
            let g2 = sinr(&w2, &user, &ints, 1e-13).unwrap();
            assert_relative_eq!(g1, g2, max_relative = 1e-9);
        }
    }

    #[test]
    fn sinr_monotone_in_interferer_power() {
        let geom = ArrayGeometry::half_wavelength(4, 4).unwrap();
        let user = Emitter {
            channel: channel(&geom, &dir(0.3, 0.2, 800.0), 0.19),
            power_w: 10.0,
        };
        let int_channel = channel(&geom, &dir(2.0, 0.5, 850.0), 0.19);
        let w = WeightVector::uniform(16);
        let mut last = f64::INFINITY;
        for p in [0.0, 1.0, 10.0, 100.0, 1000.0] {
            let g = sinr(
                &w,
                &user,
                &[Emitter { channel: int_channel.clone(), power_w: p }],
                1e-13,
            )
            .unwrap();
            assert!(g <= last, "SINR rose from {last} to {g} as interference grew");
            last = g;
        }
    }

    #[test]
    fn matched_filter_dominates_random_feasible_weights() {
        let geom = ArrayGeometry::half_wavelength(4, 4).unwrap();
        let d = dir(0.8, 0.35, 820.0);
        let h = channel(&geom, &d, 0.19);
        let user = Emitter { channel: h.clone(), power_w: 10.0 };
        let noise = 1e-13;
        let matched = WeightVector::matched_filter(h.steering()).unwrap();
        let bound = sinr(&matched, &user, &[], noise).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..10_000 {
            let raw: Vec<Complex64> = (0..16)
                .map(|_| Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..2.0 * PI)))
                .collect();
            let l1: f64 = raw.iter().map(|c| c.norm()).sum();
            let w = WeightVector::new(raw.into_iter().map(|c| c / l1).collect()).unwrap();
            let g = sinr(&w, &user, &[], noise).unwrap();
            assert!(g <= bound * (1.0 + 1e-9), "random weights beat the matched bound: {g} > {bound}");
        }
    }

    #[test]
    fn throughput_trivial_points() {
        assert_eq!(throughput_bps(0.0, 5e6), 0.0);
        assert_relative_eq!(throughput_bps(1.0, 1e6), 1e6, max_relative = 1e-12);
        assert_relative_eq!(throughput_bps(15.0, 20e6), 80e6, max_relative = 1e-12);
    }

    #[test]
    fn total_capacity_applies_lambda_factor() {
        assert_relative_eq!(
            total_capacity_bps(BeamformingMode::Analog, &[3e6]).unwrap(),
            total_capacity_bps(BeamformingMode::Digital, &[3e6]).unwrap(),
            max_relative = 1e-15
        );
        let c = 4.2e6;
        assert_relative_eq!(
            total_capacity_bps(BeamformingMode::Analog, &[c, c]).unwrap(),
            c,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            total_capacity_bps(BeamformingMode::Digital, &[c, c]).unwrap(),
            2.0 * c,
            max_relative = 1e-12
        );
        let caps = [1.5e6, 2.5e6, 8.0e5];
        assert_relative_eq!(
            total_capacity_bps(BeamformingMode::Digital, &caps).unwrap(),
            caps.iter().sum::<f64>(),
            max_relative = 1e-12
        );
        assert!(total_capacity_bps(BeamformingMode::Analog, &[]).is_err());
    }

    #[test]
    fn digital_lambda_never_below_analog() {
        for k in 1..6 {
            assert!(
                BeamformingMode::Digital.lambda_factor(k) >= BeamformingMode::Analog.lambda_factor(k)
            );
        }
    }

    #[test]
    fn budget_noise_power_is_kappa_b_t() {
        let b = LinkBudget::new(1.575e9, 20e6, 290.0).unwrap();
        assert_relative_eq!(b.noise_power_w(), 1.38e-23 * 20e6 * 290.0, max_relative = 1e-15);
        assert!(LinkBudget::new(0.0, 20e6, 290.0).is_err());
    }
}
