//! Row kernels: `dst += c * src` and `dst *= c` over GF(2^8) byte slices.
//!
//! On x86_64 with AVX2 the multiply uses two 16-entry nibble tables and
//! `pshufb`; everywhere else it falls back to the full product table.

use super::gf256::{mul, mul_table};

/// `dst[i] ^= c * src[i]` for every `i`. Slices must have equal length.
pub fn mul_add(dst: &mut [u8], src: &[u8], c: u8) {
    assert_eq!(dst.len(), src.len(), "row length mismatch");
    match c {
        0 => {}
        1 => dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= s),
        _ => {
            #[cfg(target_arch = "x86_64")]
            if dst.len() >= 32 && has_avx2() {
                // SAFETY: feature presence checked at runtime.
                unsafe { avx2::mul_add(dst, src, c) };
                return;
            }
            mul_add_scalar(dst, src, c);
        }
    }
}

/// `dst[i] = c * dst[i]`.
pub fn scale(dst: &mut [u8], c: u8) {
    match c {
        1 => {}
        0 => dst.fill(0),
        _ => {
            let row = &mul_table()[c as usize];
            dst.iter_mut().for_each(|d| *d = row[*d as usize]);
        }
    }
}

pub fn mul_add_scalar(dst: &mut [u8], src: &[u8], c: u8) {
    let row = &mul_table()[c as usize];
    dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= row[*s as usize]);
}

fn nibble_tables(c: u8) -> ([u8; 16], [u8; 16]) {
    let mut lo = [0u8; 16];
    let mut hi = [0u8; 16];
    for i in 0..16u8 {
        lo[i as usize] = mul(c, i);
        hi[i as usize] = mul(c, i << 4);
    }
    (lo, hi)
}

#[cfg(target_arch = "x86_64")]
fn has_avx2() -> bool {
    use std::sync::OnceLock;
    static HAS: OnceLock<bool> = OnceLock::new();
    *HAS.get_or_init(|| std::arch::is_x86_feature_detected!("avx2"))
}

#[cfg(target_arch = "x86_64")]
mod avx2 {
    use std::arch::x86_64::*;

    #[target_feature(enable = "avx2")]
    pub(super) unsafe fn mul_add(dst: &mut [u8], src: &[u8], c: u8) {
        let (lo, hi) = super::nibble_tables(c);
        let lo128 = _mm_loadu_si128(lo.as_ptr() as *const __m128i);
        let hi128 = _mm_loadu_si128(hi.as_ptr() as *const __m128i);
        let tlo = _mm256_broadcastsi128_si256(lo128);
        let thi = _mm256_broadcastsi128_si256(hi128);
        let mask = _mm256_set1_epi8(0x0F);
        let n = dst.len();
        let chunks = n / 32;
        for i in 0..chunks {
            let off = i * 32;
            let s = _mm256_loadu_si256(src.as_ptr().add(off) as *const __m256i);
            let d = _mm256_loadu_si256(dst.as_ptr().add(off) as *const __m256i);
            let sl = _mm256_and_si256(s, mask);
            let sh = _mm256_and_si256(_mm256_srli_epi64(s, 4), mask);
            let p = _mm256_xor_si256(_mm256_shuffle_epi8(tlo, sl), _mm256_shuffle_epi8(thi, sh));
            _mm256_storeu_si256(dst.as_mut_ptr().add(off) as *mut __m256i, _mm256_xor_si256(d, p));
        }
        let tail = chunks * 32;
        super::mul_add_scalar(&mut dst[tail..], &src[tail..], c);
    }
}
