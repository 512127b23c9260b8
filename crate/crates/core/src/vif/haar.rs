//! Separable orthonormal Haar decomposition.

use super::SCALES;
use crate::video::Plane;

/// Detail subbands per scale: `scales[k][0]` is LH (b = 1, horizontal
/// low-pass, vertical high-pass), `scales[k][1]` is HL (b = 2).
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandPyramid {
    pub scales: Vec<[Plane; 2]>,
}

/// Output of one analysis step.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarStep {
    pub ll: Plane,
    pub lh: Plane,
    pub hl: Plane,
    pub hh: Plane,
}

/// Pads by edge replication up to multiples of `m` in each dimension.
pub fn pad_to_multiple(p: &Plane, m: usize) -> Plane {
    let w = p.width.div_ceil(m) * m;
    let h = p.height.div_ceil(m) * m;
    if w == p.width && h == p.height {
        return p.clone();
    }
    Plane::from_fn(w, h, |x, y| p.at(x.min(p.width - 1), y.min(p.height - 1)))
}

/// One level on a plane with even dimensions.
pub fn haar_step(p: &Plane) -> HaarStep {
    assert!(p.width.is_multiple_of(2) && p.height.is_multiple_of(2), "haar_step needs even dimensions");
    let (w, h) = (p.width / 2, p.height / 2);
    let mut ll = Vec::with_capacity(w * h);
    let mut lh = Vec::with_capacity(w * h);
    let mut hl = Vec::with_capacity(w * h);
    let mut hh = Vec::with_capacity(w * h);
    for y in 0..h {
        let top = p.row(2 * y);
        let bottom = p.row(2 * y + 1);
        for x in 0..w {
            let (a, b) = (top[2 * x], top[2 * x + 1]);
            let (c, d) = (bottom[2 * x], bottom[2 * x + 1]);
            ll.push((a + b + c + d) * 0.5);
            lh.push((a + b - c - d) * 0.5);
            hl.push((a - b + c - d) * 0.5);
            hh.push((a - b - c + d) * 0.5);
        }
    }
    HaarStep {
        ll: Plane::new(w, h, ll),
        lh: Plane::new(w, h, lh),
        hl: Plane::new(w, h, hl),
        hh: Plane::new(w, h, hh),
    }
}

/// Four-level cascade keeping LH and HL at each scale.
pub fn wavelet_subbands(luma: &Plane) -> SubbandPyramid {
    let mut ll = pad_to_multiple(luma, 1 << SCALES);
    let mut scales = Vec::with_capacity(SCALES);
    for _ in 0..SCALES {
        let s = haar_step(&ll);
        scales.push([s.lh, s.hl]);
        ll = s.ll;
    }
    SubbandPyramid { scales }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn energy(p: &Plane) -> f64 {
        p.data.iter().map(|v| v * v).sum()
    }

    #[test]
    fn constant_frame_has_no_detail() {
        let pyr = wavelet_subbands(&Plane::filled(50, 34, 0.6));
        assert_eq!(pyr.scales.len(), 4);
        for s in &pyr.scales {
            for b in s {
                assert!(b.data.iter().all(|&v| v == 0.0));
            }
        }
        assert_eq!((pyr.scales[0][0].width, pyr.scales[0][0].height), (32, 24));
    }

    #[test]
    fn vertical_edge_lands_in_hl() {
        // step between columns 7 and 8 is invisible to pairs (6,7),(8,9); use an odd edge
        let p = Plane::from_fn(32, 32, |x, _| if x < 7 { 0.0 } else { 1.0 });
        let pyr = wavelet_subbands(&p);
        let [lh, hl] = &pyr.scales[0];
        assert_eq!(energy(lh), 0.0);
        // direct filtering: only column pair (6,7) responds, (a - b + c - d)/2 = -1 per row pair
        assert!((energy(hl) - 16.0).abs() < 1e-12);
    }

    #[test]
    fn parseval_on_white_noise() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let p = Plane::from_fn(64, 48, |_, _| rng.random::<f64>() - 0.5);
        let mut total = 0.0;
        let mut ll = p.clone();
        for _ in 0..4 {
            let s = haar_step(&ll);
            total += energy(&s.lh) + energy(&s.hl) + energy(&s.hh);
            ll = s.ll;
        }
        total += energy(&ll);
        assert!((total - energy(&p)).abs() < 1e-6);
    }

    #[test]
    fn padding_replicates_edges() {
        let p = Plane::from_fn(3, 2, |x, y| (x + 10 * y) as f64);
        let q = pad_to_multiple(&p, 4);
        assert_eq!((q.width, q.height), (4, 4));
        assert_eq!(q.at(3, 3), p.at(2, 1));
        assert_eq!(q.at(1, 0), p.at(1, 0));
    }
}
