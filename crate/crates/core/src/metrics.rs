//! SINRs, capacities and secrecy capacity of the wiretap link.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelSet;
use crate::{CMatrix, CVector, Error, Result};

/// Linear-scale powers and noise variances.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    pub p_s: f64,
    pub p_j: f64,
    pub sigma2_l: f64,
    pub sigma2_e: f64,
}

impl PowerConfig {
    /// Unit noise variances with powers given in dB.
    pub fn from_db(p_s_db: f64, p_j_db: f64) -> Self {
        PowerConfig {
            p_s: crate::db_to_linear(p_s_db),
            p_j: crate::db_to_linear(p_j_db),
            sigma2_l: 1.0,
            sigma2_e: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = |field: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(field, "must be finite and non-negative"))
            }
        };
        let pos = |field: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(field, "must be finite and positive"))
            }
        };
        nonneg("p_s", self.p_s)?;
        nonneg("p_j", self.p_j)?;
        pos("sigma2_l", self.sigma2_l)?;
        pos("sigma2_e", self.sigma2_e)
    }
}

/// Combiners at the two receivers and precoders at source and jammer.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamformerState {
    pub w_l: CVector,
    pub w_e: CVector,
    pub f_s: CVector,
    pub f_j: CVector,
}

impl BeamformerState {
    pub fn check_dims(&self, ch: &ChannelSet) -> Result<()> {
        let (n_rx, n_tx) = (ch.n_rx(), ch.n_tx());
        for (name, v, n) in [
            ("w_l", &self.w_l, n_rx),
            ("w_e", &self.w_e, n_rx),
            ("f_s", &self.f_s, n_tx),
            ("f_j", &self.f_j, n_tx),
        ] {
            if v.len() != n {
                return Err(Error::Dimension(format!(
                    "{name} has length {}, channel needs {n}",
                    v.len()
                )));
            }
        }
        Ok(())
    }

    pub fn vectors(&self) -> [(&'static str, &CVector); 4] {
        [
            ("w_l", &self.w_l),
            ("w_e", &self.w_e),
            ("f_s", &self.f_s),
            ("f_j", &self.f_j),
        ]
    }

    /// Largest deviation from the unit-norm and constant-amplitude
    /// constraints over all four vectors.
    pub fn constraint_violation(&self) -> f64 {
        self.vectors()
            .iter()
            .map(|(_, v)| {
                let target = 1.0 / (v.len() as f64).sqrt();
                let norm_err = (v.norm() - 1.0).abs();
                let ca_err = v
                    .iter()
                    .map(|z| (z.norm() - target).abs())
                    .fold(0.0, f64::max);
                norm_err.max(ca_err)
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecrecySnapshot {
    pub gamma_l: f64,
    pub gamma_e: f64,
    pub c_l: f64,
    pub c_e: f64,
    pub c_s: f64,
}

impl SecrecySnapshot {
    /// `c_l - c_e` before clamping at zero. This is the smooth quantity the
    /// optimizer climbs.
    pub fn raw_secrecy(&self) -> f64 {
        self.c_l - self.c_e
    }
}

/// `w^H H f`.
pub(crate) fn bilinear(w: &CVector, h: &CMatrix, f: &CVector) -> Complex64 {
    w.dotc(&(h * f))
}

#[allow(clippy::too_many_arguments)]
fn sinr(
    w: &CVector,
    h_signal: &CMatrix,
    h_jam: &CMatrix,
    f_s: &CVector,
    f_j: &CVector,
    p_s: f64,
    p_j: f64,
    sigma2: f64,
) -> f64 {
    let signal = p_s * bilinear(w, h_signal, f_s).norm_sqr();
    let noise = w.norm_squared() * sigma2;
    let jam = p_j * bilinear(w, h_jam, f_j).norm_sqr();
    signal / (noise + jam)
}

pub fn sinr_legitimate(ch: &ChannelSet, bf: &BeamformerState, pw: &PowerConfig) -> Result<f64> {
    bf.check_dims(ch)?;
    Ok(sinr(
        &bf.w_l, &ch.h_sl, &ch.h_jl, &bf.f_s, &bf.f_j, pw.p_s, pw.p_j, pw.sigma2_l,
    ))
}

pub fn sinr_eavesdropper(ch: &ChannelSet, bf: &BeamformerState, pw: &PowerConfig) -> Result<f64> {
    bf.check_dims(ch)?;
    Ok(sinr(
        &bf.w_e, &ch.h_se, &ch.h_je, &bf.f_s, &bf.f_j, pw.p_s, pw.p_j, pw.sigma2_e,
    ))
}

/// Shannon capacity in bps/Hz.
pub fn capacity(gamma: f64) -> f64 {
    gamma.ln_1p() / std::f64::consts::LN_2
}

pub fn secrecy_capacity(
    ch: &ChannelSet,
    bf: &BeamformerState,
    pw: &PowerConfig,
) -> Result<SecrecySnapshot> {
    let gamma_l = sinr_legitimate(ch, bf, pw)?;
    let gamma_e = sinr_eavesdropper(ch, bf, pw)?;
    if !(gamma_l.is_finite() && gamma_e.is_finite()) {
        return Err(Error::NonFinite(format!(
            "SINR (legitimate {gamma_l}, eavesdropper {gamma_e})"
        )));
    }
    let c_l = capacity(gamma_l);
    let c_e = capacity(gamma_e);
    Ok(SecrecySnapshot {
        gamma_l,
        gamma_e,
        c_l,
        c_e,
        c_s: (c_l - c_e).max(0.0),
    })
}

/// Unclamped `c_l - c_e`.
pub fn secrecy_difference(ch: &ChannelSet, bf: &BeamformerState, pw: &PowerConfig) -> Result<f64> {
    secrecy_capacity(ch, bf, pw).map(|s| s.raw_secrecy())
}

/// Largest and smallest singular values.
pub fn extreme_singular_values(h: &CMatrix) -> (f64, f64) {
    let sv = h.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    (max, if min.is_finite() { min } else { 0.0 })
}

/// Singular-value diagnostic built from the strongest legitimate link, the
/// weakest jamming leak into the legitimate receiver, the weakest source leak
/// into the eavesdropper, and the strongest jamming of the eavesdropper.
///
/// When `literal` is set, the jammer power is left out of the first
/// denominator. The value is not clamped and can be negative.
pub fn svd_upper_bound(ch: &ChannelSet, pw: &PowerConfig, literal: bool) -> Result<f64> {
    let (sl_max, _) = extreme_singular_values(&ch.h_sl);
    let (_, jl_min) = extreme_singular_values(&ch.h_jl);
    let (_, se_min) = extreme_singular_values(&ch.h_se);
    let (je_max, _) = extreme_singular_values(&ch.h_je);
    let jl_power = if literal { 1.0 } else { pw.p_j };
    let legit = capacity(pw.p_s * sl_max.powi(2) / (pw.sigma2_l + jl_power * jl_min.powi(2)));
    let eve = capacity(pw.p_s * se_min.powi(2) / (pw.sigma2_e + pw.p_j * je_max.powi(2)));
    let bound = legit - eve;
    if !bound.is_finite() {
        return Err(Error::NonFinite("SVD bound".into()));
    }
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn scalar_set(sl: f64, se: f64, jl: f64, je: f64) -> ChannelSet {
        let m = |x: f64| CMatrix::from_element(1, 1, c(x));
        ChannelSet::new(m(sl), m(se), m(jl), m(je)).unwrap()
    }

    fn unit_state(n_rx: usize, n_tx: usize) -> BeamformerState {
        let v = |n: usize| CVector::from_element(n, c(1.0 / (n as f64).sqrt()));
        BeamformerState {
            w_l: v(n_rx),
            w_e: v(n_rx),
            f_s: v(n_tx),
            f_j: v(n_tx),
        }
    }

    fn powers(p_s: f64, p_j: f64) -> PowerConfig {
        PowerConfig {
            p_s,
            p_j,
            sigma2_l: 1.0,
            sigma2_e: 1.0,
        }
    }

    #[test]
    fn legitimate_sinr_scalar_cases() {
        let bf = unit_state(1, 1);
        let g = sinr_legitimate(&scalar_set(1.0, 0.0, 0.0, 0.0), &bf, &powers(10.0, 10.0)).unwrap();
        assert!((g - 10.0).abs() < 1e-12);
        let g = sinr_legitimate(&scalar_set(1.0, 0.0, 0.0, 0.0), &bf, &powers(0.0, 10.0)).unwrap();
        assert_eq!(g, 0.0);
        let g = sinr_legitimate(&scalar_set(1.0, 0.0, 1.0, 0.0), &bf, &powers(10.0, 10.0)).unwrap();
        assert!((g - 10.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn eavesdropper_sinr_scalar_cases() {
        let bf = unit_state(1, 1);
        let g = sinr_eavesdropper(&scalar_set(1.0, 0.0, 0.0, 1.0), &bf, &powers(10.0, 1.0)).unwrap();
        assert_eq!(g, 0.0);
        let g = sinr_eavesdropper(&scalar_set(0.0, 1.0, 0.0, 0.0), &bf, &powers(10.0, 1.0)).unwrap();
        assert!((g - 10.0).abs() < 1e-12);
        let g = sinr_eavesdropper(&scalar_set(0.0, 1.0, 0.0, 3.0), &bf, &powers(1.0, 1.0)).unwrap();
        assert!((g - 0.1).abs() < 1e-12);
    }

    #[test]
    fn capacity_values() {
        assert_eq!(capacity(0.0), 0.0);
        assert!((capacity(1.0) - 1.0).abs() < 1e-15);
        assert!((capacity(3.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn secrecy_is_difference_when_positive() {
        // gamma_l = 2^2.5 - 1, gamma_e = 1 -> c_s = 1.5
        let gl = 2f64.powf(2.5) - 1.0;
        let ch = scalar_set(gl.sqrt(), 1.0, 0.0, 0.0);
        let s = secrecy_capacity(&ch, &unit_state(1, 1), &powers(1.0, 0.0)).unwrap();
        assert!((s.c_l - 2.5).abs() < 1e-12);
        assert!((s.c_e - 1.0).abs() < 1e-12);
        assert!((s.c_s - 1.5).abs() < 1e-12);
    }

    #[test]
    fn symmetric_links_give_zero_secrecy() {
        let ch = scalar_set(0.7, 0.7, 0.3, 0.3);
        let s = secrecy_capacity(&ch, &unit_state(1, 1), &powers(10.0, 10.0)).unwrap();
        assert_eq!(s.c_s, 0.0);
    }

    #[test]
    fn eavesdropper_advantage_clamps_to_zero() {
        let ch = scalar_set(0.5, 2.0, 0.0, 0.0);
        let s = secrecy_capacity(&ch, &unit_state(1, 1), &powers(10.0, 10.0)).unwrap();
        assert!(s.c_l < s.c_e);
        assert_eq!(s.c_s, 0.0);
        assert!(s.raw_secrecy() < 0.0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let ch = scalar_set(1.0, 1.0, 1.0, 1.0);
        let bf = unit_state(2, 1);
        assert!(matches!(
            secrecy_capacity(&ch, &bf, &powers(1.0, 1.0)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn svd_bound_scalar_hand_value() {
        // log2(1 + 4/2) - log2(1 + 1/10)
        let ch = scalar_set(2.0, 1.0, 1.0, 3.0);
        let b = svd_upper_bound(&ch, &powers(1.0, 1.0), false).unwrap();
        assert!((b - (3f64.log2() - 1.1f64.log2())).abs() < 1e-12);
        assert!((b - 1.4475).abs() < 1e-4);
    }

    #[test]
    fn svd_bound_literal_drops_jammer_power_in_first_term() {
        let ch = scalar_set(2.0, 1.0, 1.0, 3.0);
        let pw = powers(1.0, 4.0);
        let literal = svd_upper_bound(&ch, &pw, true).unwrap();
        let expected = (1.0f64 + 4.0 / 2.0).log2() - (1.0f64 + 1.0 / 37.0).log2();
        assert!((literal - expected).abs() < 1e-12);
        let fixed = svd_upper_bound(&ch, &pw, false).unwrap();
        assert!(fixed < literal);
    }

    #[test]
    fn svd_bound_edge_cases() {
        let ch = scalar_set(2.0, 0.0, 1.0, 3.0);
        let pw = powers(1.0, 1.0);
        let b = svd_upper_bound(&ch, &pw, false).unwrap();
        assert!((b - 3f64.log2()).abs() < 1e-12);
        let b = svd_upper_bound(&scalar_set(2.0, 1.0, 1.0, 3.0), &powers(0.0, 1.0), false).unwrap();
        assert_eq!(b, 0.0);
    }

    #[test]
    fn extreme_singular_values_of_diagonal() {
        let h = CMatrix::from_diagonal(&CVector::from_vec(vec![c(3.0), c(-0.5)]));
        let (max, min) = extreme_singular_values(&h);
        assert!((max - 3.0).abs() < 1e-12);
        assert!((min - 0.5).abs() < 1e-12);
    }

    fn arb_complex() -> impl Strategy<Value = Complex64> {
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Complex64::new(re, im))
    }

    fn arb_instance() -> impl Strategy<Value = (ChannelSet, BeamformerState)> {
        let mat = || prop::collection::vec(arb_complex(), 6).prop_map(|v| CMatrix::from_vec(2, 3, v));
        let vec = |n| {
            prop::collection::vec(0.0..std::f64::consts::TAU, n).prop_map(move |ph| {
                let a = 1.0 / (n as f64).sqrt();
                CVector::from_iterator(n, ph.into_iter().map(|p| Complex64::from_polar(a, p)))
            })
        };
        (mat(), mat(), mat(), mat(), vec(2), vec(2), vec(3), vec(3)).prop_map(
            |(sl, se, jl, je, w_l, w_e, f_s, f_j)| {
                (
                    ChannelSet::new(sl, se, jl, je).unwrap(),
                    BeamformerState { w_l, w_e, f_s, f_j },
                )
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn secrecy_is_nonnegative_and_finite((ch, bf) in arb_instance(), p_s in 0.0..100.0f64, p_j in 0.0..100.0f64) {
            let s = secrecy_capacity(&ch, &bf, &powers(p_s, p_j)).unwrap();
            prop_assert!(s.c_s >= 0.0 && s.c_s.is_finite());
            prop_assert_eq!(s.c_s, (s.c_l - s.c_e).max(0.0));
        }

        #[test]
        fn jammer_power_never_helps_eavesdropper((ch, bf) in arb_instance(), p_j in 0.0..50.0f64, extra in 0.0..50.0f64) {
            let lo = sinr_eavesdropper(&ch, &bf, &powers(10.0, p_j)).unwrap();
            let hi = sinr_eavesdropper(&ch, &bf, &powers(10.0, p_j + extra)).unwrap();
            prop_assert!(hi <= lo * (1.0 + 1e-12) + 1e-300);
        }

        #[test]
        fn combiner_phase_does_not_change_sinr((ch, bf) in arb_instance(), alpha in 0.0..std::f64::consts::TAU) {
            let pw = powers(10.0, 10.0);
            let g0 = sinr_legitimate(&ch, &bf, &pw).unwrap();
            let rotated = BeamformerState { w_l: &bf.w_l * Complex64::from_polar(1.0, alpha), ..bf.clone() };
            let g1 = sinr_legitimate(&ch, &rotated, &pw).unwrap();
            prop_assert!((g0 - g1).abs() <= 1e-12 * g0.max(1.0));
        }

        #[test]
        fn unit_norm_combiner_noise_term_is_sigma((_ch, bf) in arb_instance(), sigma2 in 0.1..10.0f64) {
            prop_assert!((bf.w_l.norm_squared() * sigma2 - sigma2).abs() < 1e-9);
        }
    }
}
