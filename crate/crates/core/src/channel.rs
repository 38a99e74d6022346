//! Clustered geometric MIMO channels.
//!
//! A channel is the normalized sum over `n_clusters * n_rays` paths of a
//! complex gain times the outer product of the receive response and the
//! conjugated transmit response:
//!
//! ```text
//! H = sqrt(N_R N_T / (N_cl N_ray)) * sum_{i,j} beta_ij a_R(aoa_ij) a_T(aod_ij)^H
//! ```
//!
//! Both ends use a half-wavelength uniform linear array, so only the azimuth
//! enters the response. Elevations are drawn and carried for completeness.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{CMatrix, CVector, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CarrierBand {
    Sub6,
    MmWave,
}

impl std::fmt::Display for CarrierBand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CarrierBand::Sub6 => f.write_str("sub6"),
            CarrierBand::MmWave => f.write_str("mmwave"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub n_clusters: usize,
    pub n_rays: usize,
    pub n_rx: usize,
    pub n_tx: usize,
    /// Per-ray angular spread around the cluster center, in degrees.
    pub angular_spread_deg: f64,
    pub band: CarrierBand,
}

impl ChannelParams {
    /// 64 transmit antennas, 4 receive antennas, 4 clusters of 15 rays.
    pub fn mmwave() -> Self {
        ChannelParams {
            n_clusters: 4,
            n_rays: 15,
            n_rx: 4,
            n_tx: 64,
            angular_spread_deg: 10.0,
            band: CarrierBand::MmWave,
        }
    }

    /// 16 transmit antennas, 4 receive antennas, 10 clusters of 20 rays.
    pub fn sub6() -> Self {
        ChannelParams {
            n_clusters: 10,
            n_rays: 20,
            n_rx: 4,
            n_tx: 16,
            angular_spread_deg: 10.0,
            band: CarrierBand::Sub6,
        }
    }

    pub fn n_paths(&self) -> usize {
        self.n_clusters * self.n_rays
    }

    pub fn validate(&self) -> Result<()> {
        for (field, value) in [
            ("n_clusters", self.n_clusters),
            ("n_rays", self.n_rays),
            ("n_rx", self.n_rx),
            ("n_tx", self.n_tx),
        ] {
            if value == 0 {
                return Err(Error::invalid(field, "must be at least 1"));
            }
        }
        if !(self.angular_spread_deg.is_finite() && self.angular_spread_deg >= 0.0) {
            return Err(Error::invalid(
                "angular_spread_deg",
                "must be finite and non-negative",
            ));
        }
        Ok(())
    }
}

/// One ray of one cluster.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathComponent {
    pub gain: Complex64,
    pub aoa_azimuth: f64,
    pub aoa_elevation: f64,
    pub aod_azimuth: f64,
    pub aod_elevation: f64,
}

/// The four links of one realization. All matrices are `n_rx x n_tx`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSet {
    /// Source to legitimate receiver.
    pub h_sl: CMatrix,
    /// Source to eavesdropper.
    pub h_se: CMatrix,
    /// Jammer to legitimate receiver.
    pub h_jl: CMatrix,
    /// Jammer to eavesdropper.
    pub h_je: CMatrix,
}

impl ChannelSet {
    /// Builds a set after checking that the four links share one shape.
    pub fn new(h_sl: CMatrix, h_se: CMatrix, h_jl: CMatrix, h_je: CMatrix) -> Result<Self> {
        let shape = h_sl.shape();
        for (name, h) in [("h_se", &h_se), ("h_jl", &h_jl), ("h_je", &h_je)] {
            if h.shape() != shape {
                return Err(Error::Dimension(format!(
                    "{name} is {:?}, h_sl is {:?}",
                    h.shape(),
                    shape
                )));
            }
        }
        Ok(ChannelSet {
            h_sl,
            h_se,
            h_jl,
            h_je,
        })
    }

    pub fn n_rx(&self) -> usize {
        self.h_sl.nrows()
    }

    pub fn n_tx(&self) -> usize {
        self.h_sl.ncols()
    }
}

/// Half-wavelength ULA response with unit 2-norm.
pub fn steering_vector(n_antennas: usize, azimuth: f64) -> CVector {
    let scale = 1.0 / (n_antennas as f64).sqrt();
    let phase_step = PI * azimuth.sin();
    CVector::from_fn(n_antennas, |k, _| {
        Complex64::from_polar(scale, phase_step * k as f64)
    })
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Draws `n_clusters * n_rays` paths, cluster by cluster.
///
/// Gains are CN(0, 1). Cluster-center azimuths are uniform on `[0, 2pi)` and
/// elevations uniform on `[-pi/2, pi/2)`, independently at each end. Each ray
/// adds a zero-mean Gaussian offset with the configured angular spread.
pub fn draw_paths<R: Rng + ?Sized>(params: &ChannelParams, rng: &mut R) -> Vec<PathComponent> {
    let sigma = params.angular_spread_deg.to_radians();
    let mut paths = Vec::with_capacity(params.n_paths());
    for _ in 0..params.n_clusters {
        let centers = ClusterCenter::draw(rng);
        for _ in 0..params.n_rays {
            let gain = complex_gaussian(rng);
            paths.push(PathComponent {
                gain,
                aoa_azimuth: centers.aoa_azimuth + offset_with(rng, sigma),
                aoa_elevation: centers.aoa_elevation + offset_with(rng, sigma),
                aod_azimuth: centers.aod_azimuth + offset_with(rng, sigma),
                aod_elevation: centers.aod_elevation + offset_with(rng, sigma),
            });
        }
    }
    paths
}

struct ClusterCenter {
    aoa_azimuth: f64,
    aoa_elevation: f64,
    aod_azimuth: f64,
    aod_elevation: f64,
}

impl ClusterCenter {
    fn draw<R: Rng + ?Sized>(rng: &mut R) -> Self {
        ClusterCenter {
            aoa_azimuth: rng.random_range(0.0..2.0 * PI),
            aoa_elevation: rng.random_range(-FRAC_PI_2..FRAC_PI_2),
            aod_azimuth: rng.random_range(0.0..2.0 * PI),
            aod_elevation: rng.random_range(-FRAC_PI_2..FRAC_PI_2),
        }
    }
}

fn offset_with<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    let z: f64 = StandardNormal.sample(rng);
    sigma * z
}

/// Sums the path contributions into an `n_rx x n_tx` matrix.
pub fn build_channel(params: &ChannelParams, paths: &[PathComponent]) -> Result<CMatrix> {
    if paths.len() != params.n_paths() {
        return Err(Error::Dimension(format!(
            "expected {} paths ({} clusters x {} rays), got {}",
            params.n_paths(),
            params.n_clusters,
            params.n_rays,
            paths.len()
        )));
    }
    let norm = ((params.n_rx * params.n_tx) as f64 / params.n_paths() as f64).sqrt();
    let mut h = CMatrix::zeros(params.n_rx, params.n_tx);
    for path in paths {
        let a_rx = steering_vector(params.n_rx, path.aoa_azimuth) * path.gain;
        let a_tx = steering_vector(params.n_tx, path.aod_azimuth);
        // h += a_rx * a_tx^H
        h.gerc(Complex64::new(1.0, 0.0), &a_rx, &a_tx, Complex64::new(1.0, 0.0));
    }
    h *= Complex64::new(norm, 0.0);
    if h.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite("channel entry".into()));
    }
    Ok(h)
}

/// Draws the four links of one realization independently.
pub fn draw_channel_set<R: Rng + ?Sized>(params: &ChannelParams, rng: &mut R) -> Result<ChannelSet> {
    params.validate()?;
    let draw = |rng: &mut R| build_channel(params, &draw_paths(params, rng));
    let h_sl = draw(rng)?;
    let h_se = draw(rng)?;
    let h_jl = draw(rng)?;
    let h_je = draw(rng)?;
    ChannelSet::new(h_sl, h_se, h_jl, h_je)
}
