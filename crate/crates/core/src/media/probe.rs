//! Per-frame-type statistics from a stream probe (`ffprobe -show_frames`).

use std::path::Path;
use std::process::Command;

use serde::Deserialize;

use super::{excerpt, find_tool, MediaError};
use crate::types::CompressionStats;

/// One decoded frame as reported by the probe.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePacket {
    pub pict_type: char,
    pub size_bytes: u64,
    pub qp: Option<f64>,
}

/// Mean packet size per type times `fps` (kbps) and mean QP per type when
/// every frame of that type carries one.
pub fn frame_stats(packets: &[FramePacket], fps: f64) -> CompressionStats {
    let mut stats = CompressionStats::absent();
    for (t, qp_slot, br_slot) in [
        ('I', &mut stats.qp_i, &mut stats.br_i),
        ('P', &mut stats.qp_p, &mut stats.br_p),
        ('B', &mut stats.qp_b, &mut stats.br_b),
    ] {
        let of_type: Vec<&FramePacket> = packets.iter().filter(|p| p.pict_type == t).collect();
        if of_type.is_empty() {
            continue;
        }
        let n = of_type.len() as f64;
        let mean_bytes = of_type.iter().map(|p| p.size_bytes as f64).sum::<f64>() / n;
        *br_slot = mean_bytes * fps * 8.0 / 1000.0;
        let qps: Option<Vec<f64>> = of_type.iter().map(|p| p.qp).collect();
        if let Some(qps) = qps {
            *qp_slot = qps.iter().sum::<f64>() / n;
        }
    }
    stats
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumOrString {
    Num(f64),
    Str(String),
}

impl NumOrString {
    fn value(&self) -> Option<f64> {
        match self {
            NumOrString::Num(v) => Some(*v),
            NumOrString::Str(s) => s.trim().parse().ok(),
        }
    }
}

#[derive(Deserialize)]
struct ProbeFrame {
    pict_type: Option<String>,
    pkt_size: Option<NumOrString>,
    qp: Option<NumOrString>,
}

#[derive(Deserialize)]
struct ProbeStream {
    avg_frame_rate: Option<String>,
    r_frame_rate: Option<String>,
}

#[derive(Deserialize)]
struct ProbeOutput {
    #[serde(default)]
    frames: Vec<ProbeFrame>,
    #[serde(default)]
    streams: Vec<ProbeStream>,
}

fn parse_rate(rate: &str) -> Option<f64> {
    let (n, d) = match rate.split_once('/') {
        Some((n, d)) => (n.trim().parse::<f64>().ok()?, d.trim().parse::<f64>().ok()?),
        None => (rate.trim().parse::<f64>().ok()?, 1.0),
    };
    (d > 0.0 && n > 0.0).then_some(n / d)
}

/// Parses probe JSON into frames and the stream frame rate (if reported).
pub fn parse_ffprobe_json(text: &str) -> Result<(Vec<FramePacket>, Option<f64>), MediaError> {
    let out: ProbeOutput = serde_json::from_str(text).map_err(|e| MediaError::ProbeFailed(e.to_string()))?;
    let fps = out.streams.first().and_then(|s| {
        s.avg_frame_rate
            .as_deref()
            .and_then(parse_rate)
            .or_else(|| s.r_frame_rate.as_deref().and_then(parse_rate))
    });
    let mut packets = Vec::with_capacity(out.frames.len());
    for f in out.frames {
        let pict_type = f
            .pict_type
            .as_deref()
            .and_then(|s| s.chars().next())
            .ok_or_else(|| MediaError::ProbeFailed("frame without pict_type".into()))?;
        let size = f
            .pkt_size
            .as_ref()
            .and_then(NumOrString::value)
            .ok_or_else(|| MediaError::ProbeFailed("frame without pkt_size".into()))?;
        packets.push(FramePacket {
            pict_type,
            size_bytes: size as u64,
            qp: f.qp.as_ref().and_then(NumOrString::value),
        });
    }
    if packets.is_empty() {
        return Err(MediaError::ProbeFailed("probe reported no frames".into()));
    }
    Ok((packets, fps))
}

/// Runs `ffprobe` on a bitstream. `fps` overrides the stream's frame rate.
pub fn probe_frame_stats(probe_bin: &str, bitstream: &Path, fps: Option<f64>) -> Result<CompressionStats, MediaError> {
    let bin = find_tool(probe_bin)?;
    let output = Command::new(bin)
        .args(["-v", "error", "-select_streams", "v:0", "-show_frames", "-show_entries"])
        .arg("frame=pict_type,pkt_size:stream=avg_frame_rate,r_frame_rate")
        .args(["-of", "json"])
        .arg(bitstream)
        .output()
        .map_err(|e| MediaError::ProbeFailed(e.to_string()))?;
    if !output.status.success() {
        return Err(MediaError::ProbeFailed(excerpt(&String::from_utf8_lossy(&output.stderr), 10)));
    }
    let (packets, stream_fps) = parse_ffprobe_json(&String::from_utf8_lossy(&output.stdout))?;
    let fps = fps
        .or(stream_fps)
        .ok_or_else(|| MediaError::ProbeFailed("frame rate unknown".into()))?;
    Ok(frame_stats(&packets, fps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pkt(t: char, size: u64) -> FramePacket {
        FramePacket {
            pict_type: t,
            size_bytes: size,
            qp: None,
        }
    }

    #[test]
    fn two_i_packets_at_one_fps() {
        let s = frame_stats(&[pkt('I', 1000), pkt('I', 3000)], 1.0);
        assert_eq!(s.br_i, 16.0);
        assert_eq!(s.qp_i, -1.0);
        for v in [s.qp_p, s.br_p, s.qp_b, s.br_b] {
            assert_eq!(v, -1.0);
        }
    }

    #[test]
    fn no_b_frames_gives_sentinels() {
        let s = frame_stats(&[pkt('I', 5000), pkt('P', 800), pkt('P', 900)], 30.0);
        assert_eq!((s.qp_b, s.br_b), (-1.0, -1.0));
        assert!((s.br_p - 850.0 * 30.0 * 8.0 / 1000.0).abs() < 1e-9);
    }

    #[test]
    fn qp_is_averaged_when_present() {
        let mut a = pkt('P', 100);
        a.qp = Some(20.0);
        let mut b = pkt('P', 300);
        b.qp = Some(26.0);
        let s = frame_stats(&[a, b.clone()], 25.0);
        assert_eq!(s.qp_p, 23.0);
        let s = frame_stats(&[pkt('P', 100), b], 25.0);
        assert_eq!(s.qp_p, -1.0);
    }

    #[test]
    fn parses_probe_json() {
        let text = r#"{
            "frames": [
                {"pict_type": "I", "pkt_size": "4000"},
                {"pict_type": "B", "pkt_size": "500", "qp": "31"},
                {"pict_type": "P", "pkt_size": 1200}
            ],
            "streams": [{"avg_frame_rate": "30000/1001"}]
        }"#;
        let (packets, fps) = parse_ffprobe_json(text).unwrap();
        assert_eq!(packets.len(), 3);
        assert_eq!(packets[1].qp, Some(31.0));
        assert_eq!(packets[2].size_bytes, 1200);
        assert!((fps.unwrap() - 29.97002997).abs() < 1e-6);
        assert!(parse_ffprobe_json(r#"{"frames": []}"#).is_err());
        assert!(parse_ffprobe_json("not json").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn weighted_type_rates_sum_to_stream_rate(
                frames in proptest::collection::vec((0usize..3, 1u64..200_000), 1..80),
                fps in 1.0f64..120.0,
            ) {
                let packets: Vec<FramePacket> = frames
                    .iter()
                    .map(|&(t, s)| pkt(['I', 'P', 'B'][t], s))
                    .collect();
                let s = frame_stats(&packets, fps);
                let mut weighted = 0.0;
                for (t, br) in [('I', s.br_i), ('P', s.br_p), ('B', s.br_b)] {
                    let n = packets.iter().filter(|p| p.pict_type == t).count();
                    if n > 0 {
                        weighted += n as f64 * br;
                    }
                }
                let total: f64 = packets.iter().map(|p| p.size_bytes as f64).sum::<f64>() / packets.len() as f64 * fps * 8.0 / 1000.0;
                prop_assert!((weighted / packets.len() as f64 - total).abs() <= 0.01 * total);
            }
        }
    }
}
