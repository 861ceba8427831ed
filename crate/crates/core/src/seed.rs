/// Derives a child seed from a master seed and a stream index.
///
/// SplitMix64 finalizer over the xored inputs. Stable across platforms and
/// releases, unlike `DefaultHasher`, so pipeline outputs stay reproducible.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
