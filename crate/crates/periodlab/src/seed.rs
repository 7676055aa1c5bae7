//! Deterministic seed derivation.
//!
//! Every stochastic component takes an explicit root seed and derives child
//! seeds by position, so results are reproducible regardless of how work is
//! batched or partitioned.

/// One round of the splitmix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for logical stream `stream`, element `index`, under `root`.
pub fn child_seed(root: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(root ^ splitmix64(stream)).wrapping_add(index))
}
