//! Top-Bottom monotonicity correction.
//!
//! The top pass walks from the highest step down and clips each entry to the
//! one above it (suffix minimum); the bottom pass walks up and lifts each
//! entry to the one below it (prefix maximum). Both passes are evaluated on
//! the input and the result that changes fewer entries is kept, with ties
//! going to the top pass. Either result is monotone, and the choice keeps
//! a lone dip or spike from being propagated to the end of the ladder.

use super::BitrateLadder;
use crate::types::Resolution;

pub fn top_pass(r: &[Resolution]) -> Vec<Resolution> {
    let mut out = r.to_vec();
    for i in (0..out.len().saturating_sub(1)).rev() {
        out[i] = out[i].min(out[i + 1]);
    }
    out
}

pub fn bottom_pass(r: &[Resolution]) -> Vec<Resolution> {
    let mut out = r.to_vec();
    for i in 1..out.len() {
        out[i] = out[i].max(out[i - 1]);
    }
    out
}

fn changes(a: &[Resolution], b: &[Resolution]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

pub fn correct_resolutions(r: &[Resolution]) -> Vec<Resolution> {
    let top = top_pass(r);
    let bottom = bottom_pass(r);
    if changes(r, &bottom) < changes(r, &top) {
        bottom
    } else {
        top
    }
}

pub fn top_bottom_correction(ladder: &BitrateLadder) -> BitrateLadder {
    let fixed = correct_resolutions(&ladder.resolutions());
    BitrateLadder::from_parts(&ladder.bitrates(), &fixed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::STANDARD_RESOLUTIONS;
    use proptest::prelude::*;

    const P540: Resolution = Resolution::P540;
    const P720: Resolution = Resolution::P720;
    const P1080: Resolution = Resolution::P1080;

    fn monotone(r: &[Resolution]) -> bool {
        r.windows(2).all(|w| w[0] <= w[1])
    }

    #[test]
    fn hand_traced_examples() {
        assert_eq!(correct_resolutions(&[P1080, P720, P1080]), vec![P720, P720, P1080]);
        assert_eq!(correct_resolutions(&[P540, P720, P1080]), vec![P540, P720, P1080]);
        assert_eq!(correct_resolutions(&[P720; 4]), vec![P720; 4]);
        // a trailing dip is lifted rather than pulling every step down
        assert_eq!(
            correct_resolutions(&[P720, P1080, P1080, P1080, P540]),
            vec![P720, P1080, P1080, P1080, P1080]
        );
    }

    /// Longest non-decreasing subsequence length.
    fn lnds(r: &[Resolution]) -> usize {
        let mut best = vec![1usize; r.len()];
        for i in 0..r.len() {
            for j in 0..i {
                if r[j] <= r[i] {
                    best[i] = best[i].max(best[j] + 1);
                }
            }
        }
        best.into_iter().max().unwrap_or(0)
    }

    #[test]
    fn minimal_on_single_violations_brute_force() {
        // all sequences of length <= 6 over the 5 standard resolutions whose
        // minimum edit distance to a monotone sequence is at most one
        let res: Vec<Resolution> = STANDARD_RESOLUTIONS.iter().rev().copied().collect();
        for len in 1..=6usize {
            let total = res.len().pow(len as u32);
            for code in 0..total {
                let mut c = code;
                let seq: Vec<Resolution> = (0..len)
                    .map(|_| {
                        let r = res[c % res.len()];
                        c /= res.len();
                        r
                    })
                    .collect();
                let min_changes = len - lnds(&seq);
                if min_changes > 1 {
                    continue;
                }
                let out = correct_resolutions(&seq);
                assert!(monotone(&out), "{seq:?}");
                assert_eq!(changes(&seq, &out), min_changes, "{seq:?} -> {out:?}");
            }
        }
    }

    fn arb_ladder() -> impl Strategy<Value = Vec<Resolution>> {
        prop::collection::vec(prop::sample::select(STANDARD_RESOLUTIONS.to_vec()), 1..30)
    }

    proptest! {
        #[test]
        fn output_is_monotone_and_idempotent(r in arb_ladder()) {
            let once = correct_resolutions(&r);
            prop_assert!(monotone(&once));
            prop_assert_eq!(correct_resolutions(&once), once);
        }

        #[test]
        fn monotone_input_is_fixed(mut r in arb_ladder()) {
            r.sort();
            prop_assert_eq!(correct_resolutions(&r), r);
        }
    }
}
