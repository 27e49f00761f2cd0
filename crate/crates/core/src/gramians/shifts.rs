use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::C64;

/// Number of boundary points scanned per shift selection.
pub const SHIFT_CANDIDATES: usize = 2000;

const EXCLUDE_REL: f64 = 1e-8;
const REAL_REL: f64 = 1e-10;

fn mirror(z: C64) -> C64 {
    C64::new(z.re.abs(), z.im)
}

fn normalize(s: C64) -> C64 {
    let s = if s.im < 0.0 { s.conj() } else { s };
    if s.im.abs() <= REAL_REL * s.norm() {
        C64::new(s.re, 0.0)
    } else {
        s
    }
}

fn excluded(c: C64, shifts: &[C64]) -> bool {
    shifts
        .iter()
        .any(|s| (c - s).norm() <= EXCLUDE_REL * s.norm().max(c.norm()).max(f64::MIN_POSITIVE))
}

/// Next pole: mirror image of the maximizer of `|r(x)| = prod |x - z_j| / prod |x - s_j|^m`
/// over the boundary of the convex hull of the Ritz values `z_j` (the real interval
/// they span when `symmetric`). Candidates are scanned in mirrored form
/// `c = -conj(x)`, where `|r| = prod |c + conj(z_j)| / prod |c + conj(s_j)|^m`.
/// `shifts` are the finite poles already used, conjugates included. Candidates
/// coinciding with a previous pole are skipped. `extra` adds points (spectral
/// bound estimates) to the hull without entering `r`. Returns `Im >= 0`.
pub fn adaptive_shift(
    ritz: &[C64],
    shifts: &[C64],
    extra: &[C64],
    m: usize,
    symmetric: bool,
) -> Result<C64> {
    if ritz.is_empty() {
        return Err(Error::DegenerateHull);
    }
    let mirrored: Vec<C64> = ritz
        .iter()
        .chain(extra)
        .map(|&z| {
            if symmetric {
                C64::new(z.re.abs(), 0.0)
            } else {
                mirror(z)
            }
        })
        .collect();
    let scale = mirrored.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let boundary = if symmetric {
        let lo = mirrored.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        let hi = mirrored.iter().map(|z| z.re).fold(0.0, f64::max);
        polyline(&[C64::new(lo, 0.0), C64::new(hi, 0.0)], false)
    } else {
        let hull = convex_hull(&mirrored);
        match hull.len() {
            0 | 1 => Vec::new(),
            2 => polyline(&hull, false),
            _ => polyline(&hull, true),
        }
    };
    let spread = boundary
        .iter()
        .map(|c| (c - boundary[0]).norm())
        .fold(0.0, f64::max);
    if boundary.is_empty() || spread <= 1e-12 * scale {
        return Err(Error::DegenerateHull);
    }
    let mult = m.max(1) as f64;
    let mut best: Option<(f64, C64)> = None;
    for &c in &boundary {
        if excluded(c, shifts) {
            continue;
        }
        let num: f64 = ritz.iter().map(|z| libm::log((c + z.conj()).norm())).sum();
        let den: f64 = shifts.iter().map(|s| libm::log((c + s.conj()).norm())).sum();
        let f = num - mult * den;
        if f.is_nan() {
            continue;
        }
        if best.map_or(true, |(bf, _)| f > bf) {
            best = Some((f, c));
        }
    }
    match best {
        Some((_, c)) => Ok(normalize(c)),
        None => Err(Error::DegenerateHull),
    }
}

/// Fallback when the hull is degenerate: the mirrored Ritz centroid, pushed
/// outward until it avoids every previous pole.
pub(crate) fn fallback_shift(ritz: &[C64], shifts: &[C64]) -> C64 {
    let mut c = if ritz.is_empty() {
        C64::new(1.0, 0.0)
    } else {
        ritz.iter().map(|&z| mirror(z)).sum::<C64>() / ritz.len() as f64
    };
    if c.norm() == 0.0 {
        c = C64::new(1.0, 0.0);
    }
    let mut s = normalize(c);
    while excluded(s, shifts) || excluded(s.conj(), shifts) {
        s *= 1.25;
    }
    s
}

fn polyline(vertices: &[C64], closed: bool) -> Vec<C64> {
    let edges: Vec<(C64, C64)> = if closed {
        (0..vertices.len())
            .map(|i| (vertices[i], vertices[(i + 1) % vertices.len()]))
            .collect()
    } else {
        vertices.windows(2).map(|w| (w[0], w[1])).collect()
    };
    let total: f64 = edges.iter().map(|(a, b)| (b - a).norm()).sum();
    if total == 0.0 {
        return vertices.to_vec();
    }
    let count = if closed {
        SHIFT_CANDIDATES
    } else {
        SHIFT_CANDIDATES - 1
    };
    let step = total / count as f64;
    let mut out = Vec::with_capacity(SHIFT_CANDIDATES + vertices.len());
    out.extend_from_slice(vertices);
    let mut pos = 0.0;
    for (a, b) in edges {
        let len = (b - a).norm();
        let mut t = pos;
        while t < len {
            out.push(a + (b - a) * (t / len));
            t += step;
        }
        pos = t - len;
    }
    out
}

fn cross(o: C64, a: C64, b: C64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Convex hull vertices in counter-clockwise order (monotone chain). Collinear
/// input yields its two extreme points.
fn convex_hull(points: &[C64]) -> Vec<C64> {
    let mut p: Vec<C64> = points.to_vec();
    p.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let scale = p.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = 1e-14 * scale * scale;
    p.dedup_by(|a, b| (*a - *b).norm() <= 1e-14 * scale);
    if p.len() < 3 {
        return p;
    }
    let mut hull: Vec<C64> = Vec::with_capacity(2 * p.len());
    for &pt in &p {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= tol {
            hull.pop();
        }
        hull.push(pt);
    }
    let lower = hull.len() + 1;
    for &pt in p.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= tol {
            hull.pop();
        }
        hull.push(pt);
    }
    hull.pop();
    hull
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn real_interval_example() {
        // |(x + 1)(x + 3)| on [-3, -1] peaks at x = -2
        let s = adaptive_shift(&[c(-1.0, 0.0), c(-3.0, 0.0)], &[], &[], 1, false).unwrap();
        assert!((s - c(2.0, 0.0)).norm() < 2e-3);
        let s = adaptive_shift(&[c(-1.0, 0.0), c(-3.0, 0.0)], &[], &[], 1, true).unwrap();
        assert!((s - c(2.0, 0.0)).norm() < 2e-3);
    }

    #[test]
    fn excludes_previous_pole() {
        let s = adaptive_shift(&[c(-1.0, 0.0), c(-3.0, 0.0)], &[c(2.0, 0.0)], &[], 1, true).unwrap();
        assert!(s.re >= 1.0 && s.re <= 3.0 && s.im == 0.0 && s.re != 2.0);
    }

    #[test]
    fn bound_estimates_widen_the_region() {
        let s = adaptive_shift(&[c(-100.0, 0.0), c(-200.0, 0.0)], &[], &[c(-1.0, 0.0)], 1, true).unwrap();
        assert!((s.re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn symmetric_gives_real_shifts() {
        let mut g = ChaCha8Rng::seed_from_u64(3);
        let ritz: Vec<C64> = (0..6).map(|_| c(-g.gen_range(0.1..20.0), 0.0)).collect();
        let mut shifts = Vec::new();
        for _ in 0..10 {
            let s = adaptive_shift(&ritz, &shifts, &[], 1, true).unwrap();
            assert_eq!(s.im, 0.0);
            shifts.push(s);
        }
    }

    #[test]
    fn complex_pair_hull() {
        let ritz = [c(-0.1, 5.0), c(-0.1, -5.0), c(-2.0, 0.0)];
        let s = adaptive_shift(&ritz, &[], &[], 1, false).unwrap();
        assert!(s.im >= 0.0 && s.re > 0.0);
    }

    #[test]
    fn degenerate_hull() {
        assert_eq!(
            adaptive_shift(&[c(-2.0, 0.0), c(-2.0, 0.0)], &[], &[], 1, false).unwrap_err(),
            Error::DegenerateHull
        );
        let f = fallback_shift(&[c(-2.0, 0.0)], &[c(2.0, 0.0)]);
        assert!(f.re > 2.0 && f.im == 0.0);
    }

    #[test]
    fn never_repeats_a_shift() {
        let mut g = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let k = g.gen_range(2..8);
            let mut ritz = Vec::new();
            for _ in 0..k {
                let re = -g.gen_range(0.05..10.0);
                if g.gen_bool(0.5) {
                    let im = g.gen_range(0.1..10.0);
                    ritz.push(c(re, im));
                    ritz.push(c(re, -im));
                } else {
                    ritz.push(c(re, 0.0));
                }
            }
            let mut shifts: Vec<C64> = Vec::new();
            for _ in 0..8 {
                let s = adaptive_shift(&ritz, &shifts, &[], 1, false)
                    .unwrap_or_else(|_| fallback_shift(&ritz, &shifts));
                assert!(!excluded(s, &shifts));
                shifts.push(s);
                if s.im != 0.0 {
                    shifts.push(s.conj());
                }
            }
        }
    }
}
