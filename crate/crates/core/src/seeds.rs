//! Seed splitting.
//!
//! A child seed is `splitmix64` folded over the master seed and each path
//! component in turn: `h = splitmix64(master); h = splitmix64(h ^ part)`.
//! Child seeds depend only on the master seed and the path, never on the
//! order in which children are drawn.

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(master), |h, &part| splitmix64(h ^ part))
}
