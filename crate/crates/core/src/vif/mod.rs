//! Quality-aware information features: a GSM fitted to Haar detail
//! subbands of each frame and of each frame difference.

pub mod features;
pub mod gsm;
pub mod haar;

pub use features::{vif_features, vif_names};
pub use gsm::{gsm_fit, subband_information, GsmModel};
pub use haar::{wavelet_subbands, SubbandPyramid};

pub const DEFAULT_SIGMA_N_SQ: f64 = 2.0;
/// Number of decomposition levels.
pub const SCALES: usize = 4;
/// Coefficients per 3x3 neighborhood.
pub const M: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VifConfig {
    pub sigma_n_sq: f64,
}

impl Default for VifConfig {
    fn default() -> Self {
        Self {
            sigma_n_sq: DEFAULT_SIGMA_N_SQ,
        }
    }
}
