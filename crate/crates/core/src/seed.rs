//! Deterministic derivation of child seeds from a master seed.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the task identified by `keys` under `master`.
///
/// Depends only on its arguments, never on evaluation order.
pub fn derive(master: u64, keys: &[u64]) -> u64 {
    keys.iter()
        .fold(mix(master), |h, &k| mix(h ^ mix(k.wrapping_add(GOLDEN))))
}
