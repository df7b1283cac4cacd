use rand::Rng;
use rand_distr::{Distribution, Exp1};

// --- channel realization ---

/// One Rayleigh-fading draw: the grant-based user's squared channel
/// gain and the grant-free users' squared gains sorted ascending.
///
/// Unit-variance complex Gaussian channels give unit-mean exponential
/// squared magnitudes; the ascending order matches the index
/// convention used everywhere else (user 0 is the weakest).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// Grant-based squared gain `|g|^2`.
    pub g2: f64,
    /// Grant-free squared gains `|h_1|^2 ..= |h_M|^2`, nondecreasing.
    pub h2: Vec<f64>,
}

impl ChannelRealization {
    /// Preallocates a zeroed realization for `m_users` grant-free
    /// users, for use with [`resample`] in sampling loops.
    pub fn zeroed(m_users: usize) -> Self {
        Self { g2: 0.0, h2: vec![0.0; m_users] }
    }
}

/// Draws a fresh realization: `g2` and the `m_users` entries of `h2`
/// are i.i.d. unit-mean exponentials, with `h2` sorted ascending.
pub fn sample_channels<R: Rng + ?Sized>(m_users: usize, rng: &mut R) -> ChannelRealization {
    let mut ch = ChannelRealization::zeroed(m_users);
    resample(&mut ch, rng);
    ch
}

/// Refills an existing realization in place; identical distribution to
/// [`sample_channels`] without the per-draw allocation.
pub fn resample<R: Rng + ?Sized>(ch: &mut ChannelRealization, rng: &mut R) {
    ch.g2 = Exp1.sample(rng);
    for h in ch.h2.iter_mut() {
        *h = Exp1.sample(rng);
    }
    ch.h2.sort_unstable_by(f64::total_cmp);
}

// --- tests ---

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn draws_are_sorted_and_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let ch = sample_channels(5, &mut rng);
            assert!(ch.g2 >= 0.0, "g2 must be nonnegative");
            for w in ch.h2.windows(2) {
                assert!(w[0] <= w[1], "h2 must be nondecreasing, got {:?}", ch.h2);
            }
            assert!(ch.h2[0] >= 0.0, "h2 entries must be nonnegative");
        }
    }

    #[test]
    fn strongest_gain_matches_harmonic_mean_value() {
        // E[max of 3 unit exponentials] = 1 + 1/2 + 1/3.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trials = 1_000_000usize;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..trials {
            let ch = sample_channels(3, &mut rng);
            let top = ch.h2[2];
            sum += top;
            sumsq += top * top;
        }
        let mean = sum / trials as f64;
        let var = (sumsq - sum * sum / trials as f64) / (trials as f64 - 1.0);
        let stderr = (var / trials as f64).sqrt();
        let expected = 1.0 + 0.5 + 1.0 / 3.0;
        assert!(
            (mean - expected).abs() <= 3.0 * stderr,
            "sample mean {mean} not within 3 stderr ({stderr}) of {expected}"
        );
    }

    #[test]
    fn fixed_seed_reproduces_draws() {
        let mut a = ChaCha8Rng::seed_from_u64(42);
        let mut b = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            assert_eq!(
                sample_channels(4, &mut a),
                sample_channels(4, &mut b),
                "same seed must give identical realizations"
            );
        }
    }

    #[test]
    fn resample_matches_fresh_sampling() {
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let mut b = ChaCha8Rng::seed_from_u64(3);
        let mut reused = ChannelRealization::zeroed(6);
        for _ in 0..50 {
            resample(&mut reused, &mut a);
            let fresh = sample_channels(6, &mut b);
            assert_eq!(reused, fresh, "in-place refill must equal a fresh draw");
        }
    }
}
