//! Per-frame-type summary lines of the x265 encoder log.

use std::sync::OnceLock;

use regex::Regex;

use super::MediaError;
use crate::types::CompressionStats;

fn summary_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"frame ([IPB]):\s*(\d+),\s*Avg QP:\s*([-\d.]+)\s+kb/s:\s*([\d.]+)").expect("static regex")
    })
}

/// Extracts average QP and kb/s of I, P and B frames. Frame types without a
/// summary line keep the absence sentinel.
pub fn parse_x265_log(log: &str) -> Result<CompressionStats, MediaError> {
    let mut stats = CompressionStats::absent();
    let mut found = false;
    for caps in summary_re().captures_iter(log) {
        let num = |i: usize| {
            caps[i]
                .parse::<f64>()
                .map_err(|_| MediaError::ParseFailed(format!("bad number `{}`", &caps[i])))
        };
        let (qp, kbps) = (num(3)?, num(4)?);
        match &caps[1] {
            "I" => (stats.qp_i, stats.br_i) = (qp, kbps),
            "P" => (stats.qp_p, stats.br_p) = (qp, kbps),
            _ => (stats.qp_b, stats.br_b) = (qp, kbps),
        }
        found = true;
    }
    if !found {
        return Err(MediaError::ParseFailed("no x265 frame summary lines".into()));
    }
    Ok(stats)
}

/// Renders summary lines in the x265 layout. `counts` holds I/P/B frame
/// counts; types whose fields are absent are omitted.
pub fn render_x265_log(stats: &CompressionStats, counts: [usize; 3]) -> String {
    let rows = [
        ('I', stats.qp_i, stats.br_i, counts[0]),
        ('P', stats.qp_p, stats.br_p, counts[1]),
        ('B', stats.qp_b, stats.br_b, counts[2]),
    ];
    let mut out = String::from("x265 [info]: HEVC encoder version 3.5\n");
    for (t, qp, br, n) in rows {
        if qp == CompressionStats::ABSENT || br == CompressionStats::ABSENT {
            continue;
        }
        out.push_str(&format!("x265 [info]: frame {t}: {n:6}, Avg QP:{qp}  kb/s: {br}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "\
x265 [info]: HEVC encoder version 3.5+1-f0c1022b6
x265 [info]: build info [Linux][GCC 11.2.0][64 bit] 8bit+10bit+12bit
x265 [info]: frame I:      1, Avg QP:21.50  kb/s: 9050.11
x265 [info]: frame P:     16, Avg QP:24.10  kb/s: 3100.42
x265 [info]: frame B:     47, Avg QP:28.77  kb/s: 812.03
x265 [info]: consecutive B-frames: 6.2% 0.0% 12.5% 81.2%
encoded 64 frames in 3.21s (19.94 fps), 1375.02 kb/s, Avg QP:27.41
";

    #[test]
    fn parses_reference_fixture() {
        let s = parse_x265_log(FIXTURE).unwrap();
        assert_eq!(s.to_array(), [21.50, 24.10, 28.77, 9050.11, 3100.42, 812.03]);
    }

    #[test]
    fn missing_types_are_absent() {
        let s = parse_x265_log("x265 [info]: frame I:      2, Avg QP:30.00  kb/s: 500.5\n").unwrap();
        assert_eq!(s.qp_i, 30.0);
        assert_eq!(s.br_i, 500.5);
        for v in [s.qp_p, s.qp_b, s.br_p, s.br_b] {
            assert_eq!(v, -1.0);
        }
    }

    #[test]
    fn empty_log_fails() {
        assert!(matches!(parse_x265_log(""), Err(MediaError::ParseFailed(_))));
        assert!(parse_x265_log("encoded 64 frames, Avg QP:27.41").is_err());
    }

    #[test]
    fn render_round_trips() {
        let s = CompressionStats::from_array([21.5, 24.125, 28.770000001, 9050.11, 3100.4, 812.0]);
        assert_eq!(parse_x265_log(&render_x265_log(&s, [1, 16, 47])).unwrap(), s);
        let no_b = CompressionStats::from_array([20.0, 23.0, -1.0, 4000.0, 900.0, -1.0]);
        assert_eq!(parse_x265_log(&render_x265_log(&no_b, [1, 63, 0])).unwrap(), no_b);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn round_trip_is_identity(qp in proptest::array::uniform3(0.0f64..60.0),
                                      br in proptest::array::uniform3(0.0f64..1e5),
                                      has_b in any::<bool>()) {
                let mut a = [qp[0], qp[1], qp[2], br[0], br[1], br[2]];
                if !has_b {
                    a[2] = -1.0;
                    a[5] = -1.0;
                }
                let s = CompressionStats::from_array(a);
                prop_assert_eq!(parse_x265_log(&render_x265_log(&s, [1, 20, 43])).unwrap(), s);
            }
        }
    }
}
