//! Regression samples from RQ records joined with per-video features.

use std::collections::BTreeMap;

use crate::features::dct::{bitrate_dct_texture, bitrate_names, DctTextureStats};
use crate::features::FeatureVector;
use crate::regression::Samples;
use crate::types::{CompressionStats, RqRecord};

pub const METADATA_NAMES: [&str; 3] = ["bitrate_kbps", "width", "height"];

const DCT_COLUMNS: [&str; 9] = [
    "dct_e_y_mean", "dct_h_y_mean", "dct_l_y_mean", "dct_e_u_mean", "dct_h_u_mean", "dct_l_u_mean",
    "dct_e_v_mean", "dct_h_v_mean", "dct_l_v_mean",
];

/// Per-video feature values under one shared column layout.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureTable {
    pub names: Vec<String>,
    pub rows: BTreeMap<String, Vec<f64>>,
    /// Column indices of the DCT texture statistics; when set, the three
    /// bitrate-normalized texture terms are appended per encode.
    pub bitrate_dct: Option<[usize; 9]>,
}

impl FeatureTable {
    pub fn from_vectors<'a>(rows: impl IntoIterator<Item = (&'a str, &'a FeatureVector)>) -> Self {
        let mut table = FeatureTable::default();
        for (id, fv) in rows {
            if table.names.is_empty() {
                table.names = fv.names.clone();
            }
            table.rows.insert(id.to_string(), fv.values.clone());
        }
        table
    }

    /// Enables the per-encode bitrate texture terms if every DCT column is
    /// present.
    pub fn with_bitrate_dct(mut self) -> Self {
        let idx: Option<Vec<usize>> = DCT_COLUMNS
            .iter()
            .map(|c| self.names.iter().position(|n| n == c))
            .collect();
        self.bitrate_dct = idx.map(|v| v.try_into().expect("nine columns"));
        self
    }

    /// Column-wise concatenation over the videos present in both tables.
    pub fn concat(&self, other: &FeatureTable) -> FeatureTable {
        let offset = self.names.len();
        let mut names = self.names.clone();
        names.extend(other.names.iter().cloned());
        let rows = self
            .rows
            .iter()
            .filter_map(|(id, a)| {
                let b = other.rows.get(id)?;
                let mut v = a.clone();
                v.extend_from_slice(b);
                Some((id.clone(), v))
            })
            .collect();
        let bitrate_dct = self
            .bitrate_dct
            .or_else(|| other.bitrate_dct.map(|ix| ix.map(|i| i + offset)));
        FeatureTable {
            names,
            rows,
            bitrate_dct,
        }
    }

    pub fn column_names(&self, with_stats: bool) -> Vec<String> {
        let mut n = self.names.clone();
        if self.bitrate_dct.is_some() {
            n.extend(bitrate_names());
        }
        n.extend(METADATA_NAMES.iter().map(|s| s.to_string()));
        if with_stats {
            n.extend(CompressionStats::NAMES.iter().map(|s| s.to_string()));
        }
        n
    }

    /// Input row for one encode, or `None` when the video has no features.
    pub fn row(&self, rec: &RqRecord, with_stats: bool) -> Option<Vec<f64>> {
        let base = if self.names.is_empty() {
            &[][..]
        } else {
            self.rows.get(&rec.point.job.video_id)?.as_slice()
        };
        let mut row = base.to_vec();
        if let Some(ix) = self.bitrate_dct {
            let d = ix.map(|i| base[i]);
            let stats = DctTextureStats {
                e_y: d[0],
                h_y: d[1],
                l_y: d[2],
                e_u: d[3],
                h_u: d[4],
                l_u: d[5],
                e_v: d[6],
                h_v: d[7],
                l_v: d[8],
            };
            row.extend(bitrate_dct_texture(&stats, rec.point.bitrate).ok()?);
        }
        row.push(rec.point.bitrate);
        row.push(f64::from(rec.point.job.width));
        row.push(f64::from(rec.point.job.height));
        if with_stats {
            row.extend(rec.stats.to_array());
        }
        Some(row)
    }

    /// Samples with VMAF targets; records lacking features are skipped.
    pub fn samples<'a>(&self, records: impl IntoIterator<Item = &'a RqRecord>, with_stats: bool) -> Samples {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for rec in records {
            if let Some(row) = self.row(rec, with_stats) {
                x.push(row);
                y.push(rec.point.quality);
            }
        }
        Samples::new(self.column_names(with_stats), x, y)
    }
}
