//! Counter-based random draws.
//!
//! Every uniform is a pure function of `(seed, repetition, stream, kind)`, so
//! draws can be generated in any order or on any thread and still come out
//! identical. Mixing uses the SplitMix64 finalizer.

/// What a draw is used for. Part of the key so that, e.g., the breach draw
/// of a repetition never collides with its audit draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum DrawKind {
    Type = 0,
    Claim = 1,
    Breach = 2,
    Audit = 3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CounterRng {
    seed: u64,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng {
            seed: mix64(seed.wrapping_add(GOLDEN)),
        }
    }

    /// An independent generator keyed by `index` (e.g. a sweep point).
    pub fn split(&self, index: u64) -> CounterRng {
        CounterRng {
            seed: mix64(
                self.seed
                    ^ mix64(
                        index
                            .wrapping_mul(GOLDEN)
                            .wrapping_add(0x5851_F42D_4C95_7F2D),
                    ),
            ),
        }
    }

    pub fn seed_value(&self) -> u64 {
        self.seed
    }

    pub fn u64_at(&self, repetition: u64, stream: u32, kind: DrawKind) -> u64 {
        let mut h = mix64(self.seed ^ repetition.wrapping_mul(GOLDEN));
        h = mix64(h ^ (((stream as u64) << 8) | kind as u64).wrapping_add(GOLDEN));
        mix64(h.wrapping_add(GOLDEN))
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn uniform(&self, repetition: u64, stream: u32, kind: DrawKind) -> f64 {
        (self.u64_at(repetition, stream, kind) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli draw. `p <= 0` never fires and `p >= 1` always does.
    pub fn bernoulli(&self, p: f64, repetition: u64, stream: u32, kind: DrawKind) -> bool {
        self.uniform(repetition, stream, kind) < p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_pure_functions_of_the_key() {
        let rng = CounterRng::new(42);
        let a = rng.uniform(7, 3, DrawKind::Audit);
        let b = CounterRng::new(42).uniform(7, 3, DrawKind::Audit);
        assert_eq!(a, b);
        assert_ne!(a, rng.uniform(7, 3, DrawKind::Breach));
        assert_ne!(a, rng.uniform(7, 4, DrawKind::Audit));
        assert_ne!(a, rng.uniform(8, 3, DrawKind::Audit));
        assert_ne!(a, CounterRng::new(43).uniform(7, 3, DrawKind::Audit));
    }

    #[test]
    fn bernoulli_extremes() {
        let rng = CounterRng::new(0);
        for rep in 0..1000 {
            assert!(rng.bernoulli(1.0, rep, 0, DrawKind::Type));
            assert!(!rng.bernoulli(0.0, rep, 0, DrawKind::Type));
        }
    }

    #[test]
    fn uniform_moments_and_buckets() {
        let rng = CounterRng::new(2024);
        let n = 200_000u64;
        let mut buckets = [0u64; 10];
        let mut sum = 0.0;
        for rep in 0..n {
            let x = rng.uniform(rep, 1, DrawKind::Claim);
            assert!((0.0..1.0).contains(&x));
            sum += x;
            buckets[(x * 10.0) as usize] += 1;
        }
        assert!((sum / n as f64 - 0.5).abs() < 0.005);
        // chi-square with 9 dof; 27.88 is the 0.999 quantile
        let expected = n as f64 / 10.0;
        let chi2: f64 = buckets
            .iter()
            .map(|&b| (b as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 27.88, "chi2 = {chi2}");
    }

    #[test]
    fn neighbouring_streams_are_uncorrelated() {
        let rng = CounterRng::new(1);
        let n = 100_000u64;
        let (mut sxy, mut sx, mut sy) = (0.0, 0.0, 0.0);
        for rep in 0..n {
            let x = rng.uniform(rep, 0, DrawKind::Audit);
            let y = rng.uniform(rep, 1, DrawKind::Audit);
            sxy += x * y;
            sx += x;
            sy += y;
        }
        let nf = n as f64;
        let cov = sxy / nf - (sx / nf) * (sy / nf);
        // sd of the sample covariance is about 1/(12 sqrt(n)) ~ 2.6e-4
        assert!(cov.abs() < 1.5e-3, "cov = {cov}");
    }

    #[test]
    fn split_changes_the_stream() {
        let rng = CounterRng::new(9);
        assert_ne!(rng.split(0).seed_value(), rng.split(1).seed_value());
        assert_ne!(rng.split(0).seed_value(), rng.seed_value());
    }
}
