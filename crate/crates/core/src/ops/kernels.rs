//! In-place bit-indexed kernels on amplitude slices of length `2^L`.

use num_complex::Complex64 as C64;

/// `out += Σ_i σˣ_i v` over the first `n_sites` bits.
#[inline]
pub fn add_transverse_sum(v: &[C64], out: &mut [C64], n_sites: usize) {
    debug_assert_eq!(v.len(), out.len());
    // the three lowest sites stay inside blocks of eight amplitudes
    if n_sites >= 3 {
        for (vc, oc) in v.chunks_exact(8).zip(out.chunks_exact_mut(8)) {
            for (z, o) in oc.iter_mut().enumerate() {
                *o += vc[z ^ 1] + vc[z ^ 2] + vc[z ^ 4];
            }
        }
    }
    let first = if n_sites >= 3 { 3 } else { 0 };
    for site in first..n_sites {
        let stride = 1usize << site;
        for (vc, oc) in v.chunks_exact(2 * stride).zip(out.chunks_exact_mut(2 * stride)) {
            let (v_lo, v_hi) = vc.split_at(stride);
            let (o_lo, o_hi) = oc.split_at_mut(stride);
            for (o, &x) in o_lo.iter_mut().zip(v_hi) {
                *o += x;
            }
            for (o, &x) in o_hi.iter_mut().zip(v_lo) {
                *o += x;
            }
        }
    }
}

/// Applies a 2×2 matrix `[[a, b], [c, d]]` (basis order ↑, ↓) to `site`.
#[inline]
pub fn apply_single_site(amps: &mut [C64], site: usize, gate: &[[C64; 2]; 2]) {
    let stride = 1usize << site;
    let [[a, b], [c, d]] = *gate;
    for chunk in amps.chunks_exact_mut(2 * stride) {
        let (lo, hi) = chunk.split_at_mut(stride);
        for (x0, x1) in lo.iter_mut().zip(hi.iter_mut()) {
            let (u, v) = (*x0, *x1);
            *x0 = a * u + b * v;
            *x1 = c * u + d * v;
        }
    }
}

/// Controlled-Z between two distinct sites: phase −1 when both bits are set.
#[inline]
pub fn apply_cz(amps: &mut [C64], site_a: usize, site_b: usize) {
    let mask = (1usize << site_a) | (1usize << site_b);
    for (z, x) in amps.iter_mut().enumerate() {
        if z & mask == mask {
            *x = -*x;
        }
    }
}

/// Spin value `+1` (bit clear) or `−1` (bit set) of `site` in basis state `z`.
#[inline]
pub fn spin(z: usize, site: usize) -> f64 {
    if (z >> site) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}
