//! Source manifest: a TOML list of `[[video]]` entries.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::media::SourceRef;
use crate::video::ChromaFormat;

pub const MAX_FRAMES: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("manifest lists no videos")]
    Empty,
    #[error("duplicate video_id `{0}`")]
    Duplicate(String),
    #[error("{id}: {message}")]
    Entry { id: String, message: String },
}

fn default_frame_limit() -> usize {
    MAX_FRAMES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub video_id: String,
    pub path: PathBuf,
    pub width: u32,
    pub height: u32,
    pub fps: f64,
    pub pix_fmt: String,
    pub bit_depth: u8,
    #[serde(default = "default_frame_limit")]
    pub frame_limit: usize,
}

impl ManifestEntry {
    pub fn source(&self) -> SourceRef {
        SourceRef {
            video_id: self.video_id.clone(),
            path: self.path.clone(),
            width: self.width,
            height: self.height,
            fps: self.fps,
            pix_fmt: self.pix_fmt.clone(),
            frame_limit: self.frame_limit,
        }
    }

    fn check(&self) -> Result<(), ManifestError> {
        let bad = |message: String| {
            Err(ManifestError::Entry {
                id: self.video_id.clone(),
                message,
            })
        };
        if self.video_id.is_empty() || self.video_id.contains([',', '"', '\n']) {
            return bad("video_id must be non-empty without commas or quotes".into());
        }
        if self.width == 0 || self.height == 0 {
            return bad("zero frame size".into());
        }
        if !(self.fps > 0.0 && self.fps.is_finite()) {
            return bad(format!("fps {}", self.fps));
        }
        if self.frame_limit == 0 || self.frame_limit > MAX_FRAMES {
            return bad(format!("frame_limit {} outside 1..={MAX_FRAMES}", self.frame_limit));
        }
        match ChromaFormat::from_pix_fmt(&self.pix_fmt) {
            Ok((_, depth)) if depth == self.bit_depth => Ok(()),
            Ok((_, depth)) => bad(format!("bit_depth {} but {} is {depth}-bit", self.bit_depth, self.pix_fmt)),
            Err(e) => bad(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(rename = "video", default)]
    pub videos: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self, ManifestError> {
        let m: Manifest = toml::from_str(text).map_err(|e| ManifestError::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        m.validate()?;
        Ok(m)
    }

    /// Reads a manifest; relative source paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let text = std::fs::read_to_string(path).map_err(|source| ManifestError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut m = Self::from_toml(&text, &path.display().to_string())?;
        let base = path.parent().unwrap_or(Path::new("."));
        for v in &mut m.videos {
            if v.path.is_relative() {
                v.path = base.join(&v.path);
            }
        }
        Ok(m)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serializes")
    }

    pub fn validate(&self) -> Result<(), ManifestError> {
        if self.videos.is_empty() {
            return Err(ManifestError::Empty);
        }
        let mut seen = BTreeSet::new();
        for v in &self.videos {
            v.check()?;
            if !seen.insert(v.video_id.as_str()) {
                return Err(ManifestError::Duplicate(v.video_id.clone()));
            }
        }
        Ok(())
    }

    pub fn ids(&self) -> Vec<String> {
        self.videos.iter().map(|v| v.video_id.clone()).collect()
    }

    pub fn sources(&self) -> HashMap<String, SourceRef> {
        self.videos.iter().map(|v| (v.video_id.clone(), v.source())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: &str = r#"
[[video]]
video_id = "a"
path = "a.yuv"
width = 64
height = 36
fps = 30.0
pix_fmt = "yuv420p"
bit_depth = 8
"#;

    #[test]
    fn parses_with_default_frame_limit() {
        let m = Manifest::from_toml(ONE, "m").unwrap();
        assert_eq!(m.videos[0].frame_limit, 64);
        assert_eq!(m.ids(), vec!["a"]);
        assert_eq!(Manifest::from_toml(&m.to_toml(), "m").unwrap(), m);
    }

    #[test]
    fn rejects_duplicates_and_limits() {
        let twice = format!("{ONE}{ONE}");
        assert!(matches!(Manifest::from_toml(&twice, "m"), Err(ManifestError::Duplicate(id)) if id == "a"));
        let long = format!("{ONE}frame_limit = 65\n");
        assert!(matches!(Manifest::from_toml(&long, "m"), Err(ManifestError::Entry { .. })));
        let depth = ONE.replace("bit_depth = 8", "bit_depth = 10");
        assert!(matches!(Manifest::from_toml(&depth, "m"), Err(ManifestError::Entry { .. })));
        assert!(matches!(Manifest::from_toml("", "m"), Err(ManifestError::Empty)));
    }

    #[test]
    fn relative_paths_follow_the_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.toml");
        std::fs::write(&p, ONE).unwrap();
        let m = Manifest::load(&p).unwrap();
        assert_eq!(m.videos[0].path, dir.path().join("a.yuv"));
    }
}
