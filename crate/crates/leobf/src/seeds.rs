//! Deterministic seed derivation.
//!
//! Every random stream in the crate is derived from a single master seed by
//! mixing tag values through the SplitMix64 finalizer. Derivation is pure, so
//! any component (solver run, REM error draw, sweep cell) can be reproduced
//! in isolation from its (master, tags) coordinates.

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `base` and a stream tag.
pub fn derive(base: u64, tag: u64) -> u64 {
    mix64(base ^ mix64(tag))
}

/// Derives a child seed from `base` and two stream tags (e.g. component, index).
pub fn derive2(base: u64, tag_a: u64, tag_b: u64) -> u64 {
    derive(derive(base, tag_a), tag_b)
}

/// Derives a child seed from `base` and three stream tags.
pub fn derive3(base: u64, tag_a: u64, tag_b: u64, tag_c: u64) -> u64 {
    derive(derive2(base, tag_a, tag_b), tag_c)
}
