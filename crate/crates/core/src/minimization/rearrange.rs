//! Energy-lowering moves on in-phase profiles.

use super::profile::{h_inphase, RhoProfile};
use super::MinimizationError;

/// One side of the induction: makes `w[c..]` non-increasing by a sequence
/// of permutations, each of which strictly raises `Σ ρ_j ρ_{j−1}`.
///
/// At position `n + 1`, if some later entry is strictly larger, let `k ≥ n + 2`
/// index the largest one. The block `n+1..=k+1` is rewritten as
/// `ρ_k, x, ρ_{n+1}, …, ρ_{k−2}, y` where `(x, y) = (ρ_{k+1}, ρ_{k−1})` if
/// `ρ_{k+1} ≥ ρ_{k−1}` and `(ρ_{k−1}, ρ_{k+1})` otherwise. `w` must end in a
/// zero so that `k + 1` is always in range.
fn sweep_right(w: &mut [f64], c: usize) {
    let len = w.len();
    let mut n = c;
    while n + 2 < len {
        let next = w[n + 1];
        let mut k = None;
        let mut best = next;
        for (j, &v) in w.iter().enumerate().skip(n + 2) {
            if v > best {
                best = v;
                k = Some(j);
            }
        }
        if let Some(k) = k {
            let (lo, hi) = (w[k - 1], w[k + 1]);
            let (x, y) = if hi >= lo { (hi, lo) } else { (lo, hi) };
            let mut block = Vec::with_capacity(k - n + 1);
            block.push(w[k]);
            block.push(x);
            block.extend_from_slice(&w[n + 1..k - 1]);
            block.push(y);
            w[n + 1..=k + 1].copy_from_slice(&block);
        }
        n += 1;
    }
}

/// The induction sweep on both sides of the first maximum. Profiles that are
/// already non-increasing away from the maximum are returned unchanged.
pub fn monotone_sweep(p: &RhoProfile) -> RhoProfile {
    let c = p.argmax() + 1;
    let mut w = Vec::with_capacity(p.len() + 2);
    w.push(0.0);
    w.extend_from_slice(p.rho());
    w.push(0.0);
    sweep_right(&mut w, c);
    w.reverse();
    let c = w.len() - 1 - c;
    sweep_right(&mut w, c);
    w.reverse();
    debug_assert!(w[0] == 0.0 && w[w.len() - 1] == 0.0);
    RhoProfile::new(w[1..w.len() - 1].to_vec()).expect("permutation of a valid profile")
}

/// Values sorted in decreasing order, the largest at the middle of the window
/// and the rest placed alternately right and left of it.
pub fn organ_pipe(p: &RhoProfile) -> RhoProfile {
    let mut vals = p.rho().to_vec();
    vals.sort_by(|a, b| b.total_cmp(a));
    let len = vals.len();
    let mid = (len - 1) / 2;
    let mut out = vec![0.0; len];
    let (mut right, mut left) = (mid + 1, mid as isize - 1);
    out[mid] = vals[0];
    for (i, &v) in vals.iter().enumerate().skip(1) {
        let go_right = (i % 2 == 1 && right < len) || left < 0;
        if go_right {
            out[right] = v;
            right += 1;
        } else {
            out[left as usize] = v;
            left -= 1;
        }
    }
    RhoProfile::new(out).expect("permutation of a valid profile")
}

/// Rearrangement that is non-increasing away from its maximum and never
/// raises the in-phase energy.
///
/// Runs [`monotone_sweep`] and then switches to the [`organ_pipe`] arrangement
/// when that is strictly lower in energy. The result is a permutation of the
/// input values on the same window.
pub fn rearrange_nonincreasing(p: &RhoProfile) -> RhoProfile {
    let swept = monotone_sweep(p);
    let pipe = organ_pipe(p);
    let (hs, hp) = (h_inphase(&swept), h_inphase(&pipe));
    if hp < hs - 1e-15 * (1.0 + hs.abs()) {
        pipe
    } else {
        swept
    }
}

/// Non-increasing moving away from the first maximum on both sides.
pub fn is_unimodal(p: &RhoProfile) -> bool {
    let r = p.rho();
    let c = p.argmax();
    r[..=c].windows(2).all(|w| w[0] <= w[1]) && r[c..].windows(2).all(|w| w[0] >= w[1])
}

/// `ρ_c ≤ (5/6)(ρ_{c−1} + ρ_{c+1})` at the first maximum `c`.
pub fn check_5over3(p: &RhoProfile) -> bool {
    check_5over3_at(p, p.argmax())
}

/// As [`check_5over3`] at a designated center index.
pub fn check_5over3_at(p: &RhoProfile, center: usize) -> bool {
    let c = center as isize;
    p.get(c) <= 5.0 / 6.0 * (p.get(c - 1) + p.get(c + 1)) + 1e-12
}

/// Removes the two sites at distance `W` from the maximum `c` (the larger of
/// the support's reach to either side; for a plateau of maximal values `c`
/// is its middle, rounding left) and moves their mass to the middle:
/// `ρ_{c−1} += ½ρ_{c−W}`, `ρ_c += ½(ρ_{c−W} + ρ_{c+W})`, `ρ_{c+1} += ½ρ_{c+W}`.
pub fn five_mode_reduction(p: &RhoProfile) -> Result<RhoProfile, MinimizationError> {
    let (first, last) = p.support().ok_or(MinimizationError::SupportTooSmall { len: 0 })?;
    let len = last - first + 1;
    if len < 6 {
        return Err(MinimizationError::SupportTooSmall { len });
    }
    if !is_unimodal(p) {
        return Err(MinimizationError::NotUnimodal);
    }
    let r = p.rho();
    let top = r[p.argmax()];
    let plateau_end = p.argmax() + r[p.argmax()..].iter().take_while(|&&v| v == top).count() - 1;
    let c = ((p.argmax() + plateau_end) / 2) as isize;
    let w = (c - first as isize).max(last as isize - c);
    let (left, right) = (p.get(c - w), p.get(c + w));
    let mut out = p.rho().to_vec();
    let mut set = |i: isize, v: f64| match usize::try_from(i).ok().filter(|&i| i < out.len()) {
        Some(i) => out[i] = v,
        // Only reachable when the far site is itself outside the window.
        None => debug_assert_eq!(v, 0.0),
    };
    set(c - w, 0.0);
    set(c + w, 0.0);
    set(c - 1, p.get(c - 1) + 0.5 * left);
    set(c, p.get(c) + 0.5 * (left + right));
    set(c + 1, p.get(c + 1) + 0.5 * right);
    RhoProfile::new(out)
}
