//! Fixed, platform-stable pseudorandom generator.
//!
//! All stochastic operations in this crate (mixture sampling, Rademacher
//! draws, test instance generation) run on xoshiro256++ seeded through
//! splitmix64, so a given 64-bit seed produces bit-identical streams on
//! every platform and in every build. Nothing here depends on the system
//! RNG or on external crates.

/// splitmix64 step; used to expand a 64-bit seed into generator state.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// xoshiro256++ generator (Blackman & Vigna).
#[derive(Debug, Clone)]
pub struct Xoshiro256PlusPlus {
    s: [u64; 4],
}

impl Xoshiro256PlusPlus {
    /// Seed the full 256-bit state from a single 64-bit seed via splitmix64.
    pub fn seed_from_u64(seed: u64) -> Self {
        let mut sm = seed;
        let s = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        Self { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[0]
            .wrapping_add(s[3])
            .rotate_left(23)
            .wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform in [0, 1), 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform in (0, 1]; safe as a logarithm argument.
    pub fn next_unit_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform in [lo, hi).
    pub fn next_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in [0, n); n must be positive.
    /// Multiply-shift bounded draw: unbiased enough for instance generation
    /// (bias < 2^-53 for the small n used here) and branch-free.
    pub fn next_below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_f64() * n as f64) as usize).min(n - 1)
    }

    /// One standard normal via Box–Muller (cosine branch).
    /// `fill_gaussian` is preferred when several values are needed since it
    /// consumes both branches of each pair.
    pub fn next_gaussian(&mut self) -> f64 {
        let (z, _) = self.gaussian_pair();
        z
    }

    fn gaussian_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_unit_open();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        (r * theta.cos(), r * theta.sin())
    }

    /// Fill a slice with independent standard normals via Box–Muller.
    /// For odd lengths the sine branch of the final pair is discarded, so
    /// the stream consumed depends only on the slice length.
    pub fn fill_gaussian(&mut self, out: &mut [f64]) {
        let mut i = 0;
        while i + 1 < out.len() {
            let (a, b) = self.gaussian_pair();
            out[i] = a;
            out[i + 1] = b;
            i += 2;
        }
        if i < out.len() {
            let (a, _) = self.gaussian_pair();
            out[i] = a;
        }
    }

    /// Fill a slice with independent ±1 signs, 64 per generator word.
    pub fn fill_signs(&mut self, out: &mut [f64]) {
        let mut word = 0u64;
        let mut bits_left = 0u32;
        for v in out.iter_mut() {
            if bits_left == 0 {
                word = self.next_u64();
                bits_left = 64;
            }
            *v = if word & 1 == 1 { 1.0 } else { -1.0 };
            word >>= 1;
            bits_left -= 1;
        }
    }
}
