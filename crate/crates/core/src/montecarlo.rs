//! Monte Carlo estimators over sampled channel realizations.
//!
//! Trials are split into fixed-size blocks, each seeded from the
//! master seed plus the block index as the generator's stream number.
//! Blocks may be evaluated on any number of workers; partial results
//! are merged in block order, so every estimate is bit-identical
//! regardless of parallelism. Sampling consumes the same random
//! variates for every scheme and power level, which makes paired
//! comparisons common-random-number comparisons by construction.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{resample, ChannelRealization};
use crate::error::Error;
use crate::params::SystemParams;
use crate::scheme::{run, run_oma_baseline, run_proposed, Scheme};

const BLOCK_SIZE: u64 = 1 << 16;

// --- result types ---

/// A Monte Carlo statistic with enough context to reproduce it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Estimated admission distribution of the proposed scheme:
/// `probs[k]` is the probability that the user with the k-th smallest
/// gain is the one admitted. Exactly one user is admitted per trial,
/// so `counts` sums to `trials`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissionDistribution {
    pub probs: Vec<f64>,
    pub stderrs: Vec<f64>,
    pub counts: Vec<u64>,
    pub trials: u64,
    pub seed: u64,
}

/// Mean and standard error of a paired per-trial difference, plus the
/// number of trials where the difference was negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffStat {
    pub mean: f64,
    pub stderr: f64,
    pub negative_trials: u64,
}

/// One shared sampling pass over all four schemes. Ordering follows
/// [`Scheme::ALL`]; the paired difference entries compare the proposed
/// scheme against Scheme I and Scheme II in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeComparison {
    pub outage: Vec<Estimate>,
    pub ergodic: Vec<Estimate>,
    pub outage_diff: Vec<DiffStat>,
    pub rate_diff: Vec<DiffStat>,
    pub transparency_violations: u64,
    pub trials: u64,
    pub seed: u64,
}

// --- block engine ---

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

fn check_trials(trials: u64) -> Result<(), Error> {
    if trials == 0 {
        Err(Error::InvalidParameter("trials must be at least 1".to_string()))
    } else {
        Ok(())
    }
}

/// Runs `per_block(block_index, trials_in_block)` over the block grid
/// in parallel and returns the partial results in block order.
fn map_blocks<A, F>(trials: u64, per_block: F) -> Vec<A>
where
    A: Send,
    F: Fn(u64, u64) -> A + Sync,
{
    let blocks = trials.div_ceil(BLOCK_SIZE);
    (0..blocks)
        .into_par_iter()
        .map(|block| {
            let start = block * BLOCK_SIZE;
            let len = BLOCK_SIZE.min(trials - start);
            per_block(block, len)
        })
        .collect()
}

fn binomial_estimate(successes: u64, trials: u64, seed: u64) -> Estimate {
    let value = successes as f64 / trials as f64;
    Estimate {
        value,
        stderr: (value * (1.0 - value) / trials as f64).sqrt(),
        trials,
        seed,
    }
}

fn mean_estimate(sum: f64, sumsq: f64, trials: u64, seed: u64) -> Estimate {
    let n = trials as f64;
    let mean = sum / n;
    let var = if trials > 1 {
        ((sumsq - sum * sum / n) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Estimate { value: mean, stderr: (var / n).sqrt(), trials, seed }
}

// --- single-scheme estimators ---

/// Fraction of trials in which the scheme's admitted grant-free
/// transmission misses the target rate.
pub fn estimate_outage(
    scheme: Scheme,
    params: &SystemParams,
    trials: u64,
    seed: u64,
) -> Result<Estimate, Error> {
    check_trials(trials)?;
    let partials = map_blocks(trials, |block, len| {
        let mut rng = block_rng(seed, block);
        let mut ch = ChannelRealization::zeroed(params.m_users);
        let mut hits = 0u64;
        for _ in 0..len {
            resample(&mut ch, &mut rng);
            if run(scheme, &ch, params).gf_outage {
                hits += 1;
            }
        }
        hits
    });
    Ok(binomial_estimate(partials.into_iter().sum(), trials, seed))
}

/// Sample mean of the admitted grant-free user's achievable rate
/// (zero when nobody is admitted).
pub fn estimate_ergodic_rate(
    scheme: Scheme,
    params: &SystemParams,
    trials: u64,
    seed: u64,
) -> Result<Estimate, Error> {
    check_trials(trials)?;
    let partials = map_blocks(trials, |block, len| {
        let mut rng = block_rng(seed, block);
        let mut ch = ChannelRealization::zeroed(params.m_users);
        let (mut sum, mut sumsq) = (0.0f64, 0.0f64);
        for _ in 0..len {
            resample(&mut ch, &mut rng);
            let rate = run(scheme, &ch, params).gf_rate;
            sum += rate;
            sumsq += rate * rate;
        }
        (sum, sumsq)
    });
    let (sum, sumsq) = partials
        .into_iter()
        .fold((0.0, 0.0), |(s, q), (bs, bq)| (s + bs, q + bq));
    Ok(mean_estimate(sum, sumsq, trials, seed))
}

/// Fraction of trials in which the grant-based user's own decoding
/// fails under the given scheme.
pub fn estimate_gb_failure(
    scheme: Scheme,
    params: &SystemParams,
    trials: u64,
    seed: u64,
) -> Result<Estimate, Error> {
    check_trials(trials)?;
    let partials = map_blocks(trials, |block, len| {
        let mut rng = block_rng(seed, block);
        let mut ch = ChannelRealization::zeroed(params.m_users);
        let mut fails = 0u64;
        for _ in 0..len {
            resample(&mut ch, &mut rng);
            if !run(scheme, &ch, params).gb_success {
                fails += 1;
            }
        }
        fails
    });
    Ok(binomial_estimate(partials.into_iter().sum(), trials, seed))
}

// --- admission distribution ---

fn admission_from_counts(counts: Vec<u64>, trials: u64, seed: u64) -> AdmissionDistribution {
    let n = trials as f64;
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    let stderrs: Vec<f64> = probs.iter().map(|&p| (p * (1.0 - p) / n).sqrt()).collect();
    AdmissionDistribution { probs, stderrs, counts, trials, seed }
}

fn merge_counts(partials: Vec<Vec<u64>>, m_users: usize) -> Vec<u64> {
    partials.into_iter().fold(vec![0u64; m_users], |mut acc, part| {
        for (a, p) in acc.iter_mut().zip(part) {
            *a += p;
        }
        acc
    })
}

/// Admission distribution of the proposed scheme at finite power.
pub fn estimate_admission(
    params: &SystemParams,
    trials: u64,
    seed: u64,
) -> Result<AdmissionDistribution, Error> {
    check_trials(trials)?;
    let partials = map_blocks(trials, |block, len| {
        let mut rng = block_rng(seed, block);
        let mut ch = ChannelRealization::zeroed(params.m_users);
        let mut counts = vec![0u64; params.m_users];
        for _ in 0..len {
            resample(&mut ch, &mut rng);
            let user = run_proposed(&ch, params)
                .admitted_user
                .expect("the proposed scheme always admits a user");
            counts[user] += 1;
        }
        counts
    });
    Ok(admission_from_counts(merge_counts(partials, params.m_users), trials, seed))
}

/// Admission distribution in the matched-power high-SNR limit, where
/// the contest reduces to locating the grant-based gain among the
/// scaled order statistics: user `k < M-1` is admitted exactly when
/// `h2[k] < g2/eps0 < h2[k+1]`, and the strongest user absorbs the
/// two boundary events. Sampled directly, so it shares no derivation
/// with the finite-power path.
pub fn estimate_admission_limit(
    params: &SystemParams,
    trials: u64,
    seed: u64,
) -> Result<AdmissionDistribution, Error> {
    check_trials(trials)?;
    let eps0 = f64::exp2(params.r0) - 1.0;
    let partials = map_blocks(trials, |block, len| {
        let mut rng = block_rng(seed, block);
        let mut ch = ChannelRealization::zeroed(params.m_users);
        let mut counts = vec![0u64; params.m_users];
        for _ in 0..len {
            resample(&mut ch, &mut rng);
            let pivot = ch.g2 / eps0;
            let below = ch.h2.partition_point(|&h| h < pivot);
            let user = if below >= 1 { below - 1 } else { params.m_users - 1 };
            counts[user] += 1;
        }
        counts
    });
    Ok(admission_from_counts(merge_counts(partials, params.m_users), trials, seed))
}

// --- transparency audits ---

/// True when the scheme's grant-based success indicator matches the
/// interference-free baseline on every sampled realization.
pub fn audit_transparency_for(
    scheme: Scheme,
    params: &SystemParams,
    trials: u64,
    seed: u64,
) -> Result<bool, Error> {
    check_trials(trials)?;
    let partials = map_blocks(trials, |block, len| {
        let mut rng = block_rng(seed, block);
        let mut ch = ChannelRealization::zeroed(params.m_users);
        let mut violations = 0u64;
        for _ in 0..len {
            resample(&mut ch, &mut rng);
            let sch = run(scheme, &ch, params);
            let oma = run_oma_baseline(&ch, params);
            if sch.gb_success != oma.gb_success {
                violations += 1;
            }
        }
        violations
    });
    Ok(partials.into_iter().sum::<u64>() == 0)
}

/// Transparency audit of the proposed scheme: admitting a grant-free
/// user must never flip the grant-based user's success.
pub fn audit_transparency(params: &SystemParams, trials: u64, seed: u64) -> Result<bool, Error> {
    audit_transparency_for(Scheme::Proposed, params, trials, seed)
}

// --- shared comparison pass ---

#[derive(Clone, Copy, Default)]
struct CompareBlock {
    outage: [u64; 4],
    rate_sum: [f64; 4],
    rate_sumsq: [f64; 4],
    outage_diff_sum: [i64; 2],
    outage_diff_abs: [u64; 2],
    outage_diff_neg: [u64; 2],
    rate_diff_sum: [f64; 2],
    rate_diff_sumsq: [f64; 2],
    rate_diff_neg: [u64; 2],
    transparency_violations: u64,
}

/// Evaluates all four schemes on one shared stream of realizations,
/// producing per-scheme outage and ergodic-rate estimates plus paired
/// difference statistics (proposed minus Scheme I, proposed minus
/// Scheme II) and a transparency violation count. One call here sees
/// exactly the same realizations as the single-scheme estimators with
/// the same seed.
pub fn compare_schemes(
    params: &SystemParams,
    trials: u64,
    seed: u64,
) -> Result<SchemeComparison, Error> {
    check_trials(trials)?;
    let pos = |wanted: Scheme| {
        Scheme::ALL
            .iter()
            .position(|&s| s == wanted)
            .expect("every scheme is listed")
    };
    let proposed_at = pos(Scheme::Proposed);
    let oma_at = pos(Scheme::OmaBaseline);
    let baseline_at = [pos(Scheme::SchemeI), pos(Scheme::SchemeII)];

    let partials = map_blocks(trials, |block, len| {
        let mut rng = block_rng(seed, block);
        let mut ch = ChannelRealization::zeroed(params.m_users);
        let mut acc = CompareBlock::default();
        for _ in 0..len {
            resample(&mut ch, &mut rng);
            let outcomes = Scheme::ALL.map(|scheme| run(scheme, &ch, params));
            for (s, out) in outcomes.iter().enumerate() {
                acc.outage[s] += u64::from(out.gf_outage);
                acc.rate_sum[s] += out.gf_rate;
                acc.rate_sumsq[s] += out.gf_rate * out.gf_rate;
            }
            let prop = &outcomes[proposed_at];
            for (b, &at) in baseline_at.iter().enumerate() {
                let base = &outcomes[at];
                let d = i64::from(prop.gf_outage) - i64::from(base.gf_outage);
                acc.outage_diff_sum[b] += d;
                acc.outage_diff_abs[b] += d.unsigned_abs();
                acc.outage_diff_neg[b] += u64::from(d < 0);
                let rd = prop.gf_rate - base.gf_rate;
                acc.rate_diff_sum[b] += rd;
                acc.rate_diff_sumsq[b] += rd * rd;
                acc.rate_diff_neg[b] += u64::from(rd < 0.0);
            }
            acc.transparency_violations +=
                u64::from(prop.gb_success != outcomes[oma_at].gb_success);
        }
        acc
    });

    let mut total = CompareBlock::default();
    for part in partials {
        for s in 0..4 {
            total.outage[s] += part.outage[s];
            total.rate_sum[s] += part.rate_sum[s];
            total.rate_sumsq[s] += part.rate_sumsq[s];
        }
        for b in 0..2 {
            total.outage_diff_sum[b] += part.outage_diff_sum[b];
            total.outage_diff_abs[b] += part.outage_diff_abs[b];
            total.outage_diff_neg[b] += part.outage_diff_neg[b];
            total.rate_diff_sum[b] += part.rate_diff_sum[b];
            total.rate_diff_sumsq[b] += part.rate_diff_sumsq[b];
            total.rate_diff_neg[b] += part.rate_diff_neg[b];
        }
        total.transparency_violations += part.transparency_violations;
    }

    let n = trials as f64;
    let outage = (0..4)
        .map(|s| binomial_estimate(total.outage[s], trials, seed))
        .collect();
    let ergodic = (0..4)
        .map(|s| mean_estimate(total.rate_sum[s], total.rate_sumsq[s], trials, seed))
        .collect();
    let outage_diff = (0..2)
        .map(|b| {
            let sum = total.outage_diff_sum[b] as f64;
            let sumsq = total.outage_diff_abs[b] as f64;
            let var = if trials > 1 {
                ((sumsq - sum * sum / n) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            DiffStat {
                mean: sum / n,
                stderr: (var / n).sqrt(),
                negative_trials: total.outage_diff_neg[b],
            }
        })
        .collect();
    let rate_diff = (0..2)
        .map(|b| {
            let sum = total.rate_diff_sum[b];
            let sumsq = total.rate_diff_sumsq[b];
            let var = if trials > 1 {
                ((sumsq - sum * sum / n) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            DiffStat {
                mean: sum / n,
                stderr: (var / n).sqrt(),
                negative_trials: total.rate_diff_neg[b],
            }
        })
        .collect();

    Ok(SchemeComparison {
        outage,
        ergodic,
        outage_diff,
        rate_diff,
        transparency_violations: total.transparency_violations,
        trials,
        seed,
    })
}

// --- tests ---
