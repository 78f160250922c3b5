/// splitmix64, fixed bit-for-bit so that every consumer (tensor generator,
/// verification harness, word sampler) produces identical streams for a
/// given seed on any platform.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform-enough draw in 0..m for tiny m; bias is irrelevant for test
    /// sampling and the mod-based rule keeps the stream easy to reproduce.
    pub fn below(&mut self, m: u64) -> u64 {
        self.next_u64() % m
    }
}
