//! Analytic gradients against central finite differences on random
//! instances.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use secrecy_ascent::channel::{draw_channel_set, ChannelParams};
use secrecy_ascent::gradients::{fd_secrecy_gradient, gradient_bundle, relative_error, Beam, FD_STEP};
use secrecy_ascent::metrics::PowerConfig;
use secrecy_ascent::optimizer::warm_start;
use secrecy_ascent::CVector;

/// Passing threshold on the relative 2-norm error.
pub const TOLERANCE: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq)]
pub struct GradcheckReport {
    /// Worst relative error per beamformer, in `Beam::ALL` order.
    pub max_errors: Vec<(Beam, f64)>,
}

impl GradcheckReport {
    pub fn passed(&self) -> bool {
        self.max_errors.iter().all(|(_, e)| *e < TOLERANCE)
    }
}

/// Checks every gradient on `instances` random channel/beamformer draws of
/// size `n_rx x n_tx`. `corrupt` perturbs the source-precoder gradient as a
/// negative control.
pub fn run_gradcheck(
    n_rx: usize,
    n_tx: usize,
    seed: u64,
    instances: usize,
    corrupt: bool,
) -> secrecy_ascent::Result<GradcheckReport> {
    let params = ChannelParams {
        n_rx,
        n_tx,
        ..ChannelParams::sub6()
    };
    params.validate()?;
    let pw = PowerConfig::from_db(10.0, 10.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_errors: Vec<(Beam, f64)> = Beam::ALL.iter().map(|b| (*b, 0.0)).collect();
    for _ in 0..instances {
        let ch = draw_channel_set(&params, &mut rng)?;
        let bf = warm_start(&params, &mut rng);
        let mut bundle = gradient_bundle(&ch, &bf, &pw, true)?;
        if corrupt {
            bundle.g_fs *= num_complex::Complex64::new(1.01, 0.0);
        }
        for (beam, worst) in max_errors.iter_mut() {
            let analytic: &CVector = match beam {
                Beam::Wl => &bundle.g_wl,
                Beam::We => bundle.g_we.as_ref().expect("requested"),
                Beam::Fs => &bundle.g_fs,
                Beam::Fj => &bundle.g_fj,
            };
            let fd = fd_secrecy_gradient(&ch, &bf, &pw, *beam, FD_STEP)?;
            *worst = worst.max(relative_error(analytic, &fd));
        }
    }
    Ok(GradcheckReport { max_errors })
}
