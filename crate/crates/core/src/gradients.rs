//! Conjugate (Wirtinger) gradients of the secrecy rate.
//!
//! Every gradient here is `d(c_l - c_e) / d v*` for one beamformer `v`, with
//! capacities in bits, so the `1/ln 2` factor of `log2` is included. The
//! difference is taken before the clamp at zero: the clamp is flat wherever
//! it is active and would stall the ascent.
//!
//! The precoder gradient for the source uses the source-side quantities
//! (`P_s`, `H_sl`, `H_se`, `f_s`) throughout. Writing the same expression with
//! jammer-side factors, as it sometimes appears in print, does not match the
//! finite-difference derivative of the objective.

use std::f64::consts::LN_2;

use num_complex::Complex64;

use crate::channel::ChannelSet;
use crate::metrics::{secrecy_difference, BeamformerState, PowerConfig};
use crate::{CMatrix, CVector, Error, Result};

/// Default central-difference step on each real coordinate.
pub const FD_STEP: f64 = 1e-6;

/// Squared bilinear forms `|w^H H f|^2` for the four links.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadForms {
    pub psi_jl: f64,
    pub psi_sl: f64,
    pub psi_je: f64,
    pub psi_se: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradientBundle {
    pub g_wl: CVector,
    pub g_fj: CVector,
    pub g_fs: CVector,
    /// Only filled when the eavesdropper combiner is being optimized.
    pub g_we: Option<CVector>,
}

impl GradientBundle {
    pub fn is_finite(&self) -> bool {
        let finite = |v: &CVector| v.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        finite(&self.g_wl)
            && finite(&self.g_fj)
            && finite(&self.g_fs)
            && self.g_we.as_ref().is_none_or(finite)
    }
}

/// Optimization variable selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Beam {
    Wl,
    We,
    Fs,
    Fj,
}

impl Beam {
    pub const ALL: [Beam; 4] = [Beam::Wl, Beam::We, Beam::Fs, Beam::Fj];

    pub fn name(self) -> &'static str {
        match self {
            Beam::Wl => "w_l",
            Beam::We => "w_e",
            Beam::Fs => "f_s",
            Beam::Fj => "f_j",
        }
    }

    pub fn get(self, bf: &BeamformerState) -> &CVector {
        match self {
            Beam::Wl => &bf.w_l,
            Beam::We => &bf.w_e,
            Beam::Fs => &bf.f_s,
            Beam::Fj => &bf.f_j,
        }
    }

    pub fn get_mut(self, bf: &mut BeamformerState) -> &mut CVector {
        match self {
            Beam::Wl => &mut bf.w_l,
            Beam::We => &mut bf.w_e,
            Beam::Fs => &mut bf.f_s,
            Beam::Fj => &mut bf.f_j,
        }
    }
}

/// Shared intermediate quantities of one receiver.
struct Receiver<'a> {
    w: &'a CVector,
    h_sig: &'a CMatrix,
    h_jam: &'a CMatrix,
    /// `H_sig f_s`
    a_sig: CVector,
    /// `H_jam f_j`
    a_jam: CVector,
    /// `w^H H_sig f_s`
    u_sig: Complex64,
    /// `w^H H_jam f_j`
    u_jam: Complex64,
    sigma2: f64,
    /// Interference plus noise.
    denom: f64,
    /// Signal plus interference plus noise.
    total: f64,
}

impl<'a> Receiver<'a> {
    fn new(
        w: &'a CVector,
        h_sig: &'a CMatrix,
        h_jam: &'a CMatrix,
        bf: &BeamformerState,
        p_s: f64,
        p_j: f64,
        sigma2: f64,
    ) -> Self {
        let a_sig = h_sig * &bf.f_s;
        let a_jam = h_jam * &bf.f_j;
        let u_sig = w.dotc(&a_sig);
        let u_jam = w.dotc(&a_jam);
        let denom = w.norm_squared() * sigma2 + p_j * u_jam.norm_sqr();
        let total = denom + p_s * u_sig.norm_sqr();
        Receiver {
            w,
            h_sig,
            h_jam,
            a_sig,
            a_jam,
            u_sig,
            u_jam,
            sigma2,
            denom,
            total,
        }
    }

    /// `d log2(total/denom) / d w*`.
    fn combiner_gradient(&self, p_s: f64, p_j: f64) -> CVector {
        let interference = self.w * Complex64::from(self.sigma2) + &self.a_jam * (self.u_jam.conj() * p_j);
        let full = &interference + &self.a_sig * (self.u_sig.conj() * p_s);
        (full / Complex64::from(self.total) - interference / Complex64::from(self.denom))
            / Complex64::from(LN_2)
    }

    /// `d log2(total/denom) / d f_j*`.
    fn jammer_gradient(&self, p_j: f64) -> CVector {
        let scale = p_j * (1.0 / self.total - 1.0 / self.denom) / LN_2;
        self.h_jam.ad_mul(self.w) * (self.u_jam * scale)
    }

    /// `d log2(total/denom) / d f_s*`.
    fn source_gradient(&self, p_s: f64) -> CVector {
        let scale = p_s / self.total / LN_2;
        self.h_sig.ad_mul(self.w) * (self.u_sig * scale)
    }
}

fn receivers<'a>(
    ch: &'a ChannelSet,
    bf: &'a BeamformerState,
    pw: &PowerConfig,
) -> Result<(Receiver<'a>, Receiver<'a>)> {
    bf.check_dims(ch)?;
    let legit = Receiver::new(&bf.w_l, &ch.h_sl, &ch.h_jl, bf, pw.p_s, pw.p_j, pw.sigma2_l);
    let eve = Receiver::new(&bf.w_e, &ch.h_se, &ch.h_je, bf, pw.p_s, pw.p_j, pw.sigma2_e);
    Ok((legit, eve))
}

pub fn quad_forms(ch: &ChannelSet, bf: &BeamformerState) -> Result<QuadForms> {
    bf.check_dims(ch)?;
    let psi = |w: &CVector, h: &CMatrix, f: &CVector| crate::metrics::bilinear(w, h, f).norm_sqr();
    Ok(QuadForms {
        psi_jl: psi(&bf.w_l, &ch.h_jl, &bf.f_j),
        psi_sl: psi(&bf.w_l, &ch.h_sl, &bf.f_s),
        psi_je: psi(&bf.w_e, &ch.h_je, &bf.f_j),
        psi_se: psi(&bf.w_e, &ch.h_se, &bf.f_s),
    })
}

/// Only the legitimate capacity depends on `w_l`.
pub fn grad_wl(ch: &ChannelSet, bf: &BeamformerState, pw: &PowerConfig) -> Result<CVector> {
    let (legit, _) = receivers(ch, bf, pw)?;
    Ok(legit.combiner_gradient(pw.p_s, pw.p_j))
}

pub fn grad_fj(ch: &ChannelSet, bf: &BeamformerState, pw: &PowerConfig) -> Result<CVector> {
    let (legit, eve) = receivers(ch, bf, pw)?;
    Ok(legit.jammer_gradient(pw.p_j) - eve.jammer_gradient(pw.p_j))
}

pub fn grad_fs(ch: &ChannelSet, bf: &BeamformerState, pw: &PowerConfig) -> Result<CVector> {
    let (legit, eve) = receivers(ch, bf, pw)?;
    Ok(legit.source_gradient(pw.p_s) - eve.source_gradient(pw.p_s))
}

/// Only the eavesdropper capacity depends on `w_e`, with a negative sign.
pub fn grad_we(ch: &ChannelSet, bf: &BeamformerState, pw: &PowerConfig) -> Result<CVector> {
    let (_, eve) = receivers(ch, bf, pw)?;
    Ok(-eve.combiner_gradient(pw.p_s, pw.p_j))
}

/// All gradients at one state, sharing the intermediate products.
pub fn gradient_bundle(
    ch: &ChannelSet,
    bf: &BeamformerState,
    pw: &PowerConfig,
    with_we: bool,
) -> Result<GradientBundle> {
    let (legit, eve) = receivers(ch, bf, pw)?;
    let bundle = GradientBundle {
        g_wl: legit.combiner_gradient(pw.p_s, pw.p_j),
        g_fj: legit.jammer_gradient(pw.p_j) - eve.jammer_gradient(pw.p_j),
        g_fs: legit.source_gradient(pw.p_s) - eve.source_gradient(pw.p_s),
        g_we: with_we.then(|| -eve.combiner_gradient(pw.p_s, pw.p_j)),
    };
    if !bundle.is_finite() {
        return Err(Error::NonFinite("gradient".into()));
    }
    Ok(bundle)
}

/// Central-difference conjugate gradient `1/2 (d/dRe + j d/dIm)` of a real
/// objective of one complex vector.
pub fn fd_gradient<F>(objective: F, point: &CVector, h: f64) -> Result<CVector>
where
    F: Fn(&CVector) -> Result<f64>,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid("h", "finite-difference step must be positive"));
    }
    let mut probe = point.clone();
    let eval = |probe: &CVector| -> Result<f64> {
        let v = objective(probe)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite("objective at finite-difference probe".into()))
        }
    };
    let mut grad = CVector::zeros(point.len());
    for k in 0..point.len() {
        let mut partial = |delta: Complex64| -> Result<f64> {
            probe[k] = point[k] + delta;
            let plus = eval(&probe)?;
            probe[k] = point[k] - delta;
            let minus = eval(&probe)?;
            probe[k] = point[k];
            Ok((plus - minus) / (2.0 * h))
        };
        let d_re = partial(Complex64::new(h, 0.0))?;
        let d_im = partial(Complex64::new(0.0, h))?;
        grad[k] = Complex64::new(d_re, d_im) * 0.5;
    }
    Ok(grad)
}

/// Finite-difference gradient of the unclamped secrecy rate with respect to
/// one beamformer, all others held fixed.
pub fn fd_secrecy_gradient(
    ch: &ChannelSet,
    bf: &BeamformerState,
    pw: &PowerConfig,
    beam: Beam,
    h: f64,
) -> Result<CVector> {
    let objective = |v: &CVector| {
        let mut probe = bf.clone();
        *beam.get_mut(&mut probe) = v.clone();
        secrecy_difference(ch, &probe, pw)
    };
    fd_gradient(objective, beam.get(bf), h)
}

/// Norm below which [`relative_error`] stops dividing by the vector size.
/// Structurally zero gradients (a single-antenna combiner, for instance) come
/// back from finite differences as round-off of order `1e-10`.
pub const ERROR_SCALE_FLOOR: f64 = 1e-3;

/// `||a - b|| / max(||a||, ||b||, ERROR_SCALE_FLOOR)`.
pub fn relative_error(a: &CVector, b: &CVector) -> f64 {
    let scale = a.norm().max(b.norm()).max(ERROR_SCALE_FLOOR);
    (a - b).norm() / scale
}
