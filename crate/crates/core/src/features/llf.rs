//! Assembly of the LLF1 (93) and LLF2 (96) vectors.
//!
//! Name order: GLCM (32), TC (8), SI (8), TI (8), CTI (8), CF (4), CI (16),
//! DCT texture (9), then for LLF2 the bitrate-DCT texture (3).

use std::borrow::Cow;

use super::{color, dct, glcm, spatial, temporal_coherence};
use super::{FeatureConfig, FeatureError, FeatureSetId, FeatureVector};
use crate::video::{resize_video, FrameYuv};

fn prepare<'a>(video: &'a [FrameYuv], cfg: &FeatureConfig) -> Cow<'a, [FrameYuv]> {
    match cfg.target {
        Some(t) if video.iter().any(|f| f.width() != t.width as usize || f.height() != t.height as usize) => {
            Cow::Owned(resize_video(video, Some(t)))
        }
        _ => Cow::Borrowed(video),
    }
}

/// Extracts LLF1 or LLF2. `set_id` must be one of the two low-level sets.
pub fn extract_llf(
    video: &[FrameYuv],
    set_id: FeatureSetId,
    bitrate_kbps: Option<f64>,
    cfg: &FeatureConfig,
) -> Result<FeatureVector, FeatureError> {
    assert!(set_id != FeatureSetId::Viff, "extract_llf handles LLF1/LLF2 only");
    let bitrate = match (set_id, bitrate_kbps) {
        (FeatureSetId::Llf2, None) => return Err(FeatureError::MissingBitrate),
        (_, b) => b,
    };
    if video.is_empty() {
        return Err(FeatureError::NoFrames);
    }
    let video = prepare(video, cfg);
    let video = video.as_ref();

    let mut values = Vec::with_capacity(set_id.dimension());
    values.extend(glcm::glcm_features(video)?);
    values.extend(temporal_coherence::temporal_coherence(video)?);
    values.extend(spatial::si(video)?);
    values.extend(spatial::ti(video)?);
    values.extend(spatial::cti(video)?);
    values.extend(color::colorfulness(video)?);
    values.extend(color::chroma_intensity(video)?);
    let texture = dct::dct_texture(video, cfg.dct_weights.as_deref())?;
    values.extend(texture.to_feature_order());
    if set_id == FeatureSetId::Llf2 {
        let b = bitrate.expect("checked above");
        values.extend(dct::bitrate_dct_texture(&texture, b)?);
    }
    Ok(FeatureVector::new(set_id, llf_names(set_id), values))
}

pub fn llf_names(set_id: FeatureSetId) -> Vec<String> {
    let mut n = glcm::names();
    n.extend(temporal_coherence::names());
    n.extend(spatial::si_names());
    n.extend(spatial::ti_names());
    n.extend(spatial::cti_names());
    n.extend(color::cf_names());
    n.extend(color::ci_names());
    n.extend(dct::names());
    if set_id == FeatureSetId::Llf2 {
        n.extend(dct::bitrate_names());
    }
    n
}
