//! Realization-level invariants of the transmission schemes, checked
//! on large seeded batches of random channels.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sgf_core::channel::{sample_channels, ChannelRealization};
use sgf_core::params::SystemParams;
use sgf_core::scheme::{
    classify_groups, run_oma_baseline, run_proposed, run_scheme_i, run_scheme_ii, threshold_tau,
    SicStage,
};

fn random_params(rng: &mut ChaCha8Rng, m_users: usize) -> SystemParams {
    SystemParams::new(
        10f64.powf(rng.random_range(-1.0..3.0)),
        10f64.powf(rng.random_range(-1.0..3.0)),
        rng.random_range(0.1..2.0),
        rng.random_range(0.1..2.0),
        m_users,
    )
    .expect("generated parameters are valid")
}

#[test]
fn sampled_gains_stay_sorted_and_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for round in 0..100_000 {
        let m_users = 1 + round % 8;
        let ch = sample_channels(m_users, &mut rng);
        assert!(ch.g2 >= 0.0, "grant-based gain must be nonnegative");
        for pair in ch.h2.windows(2) {
            assert!(pair[0] <= pair[1], "gains must come out ascending: {:?}", ch.h2);
        }
        assert!(ch.h2.first().copied().unwrap_or(0.0) >= 0.0);
    }
}

#[test]
fn second_stage_rate_dominates_first_stage_rate_per_user() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for round in 0..100_000 {
        let m_users = 1 + round % 6;
        let params = random_params(&mut rng, m_users);
        let ch = sample_channels(m_users, &mut rng);
        for &h in &ch.h2 {
            let clean = (1.0 + params.ps * h).log2();
            let interfered = (1.0 + params.ps * h / (params.p0 * ch.g2 + 1.0)).log2();
            assert!(
                clean >= interfered,
                "interference-free decoding cannot be slower: {clean} vs {interfered}"
            );
        }
    }
}

#[test]
fn proposed_scheme_is_transparent_on_every_draw() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for round in 0..100_000 {
        let m_users = 1 + round % 6;
        let params = random_params(&mut rng, m_users);
        let ch = sample_channels(m_users, &mut rng);
        let prop = run_proposed(&ch, &params);
        let oma = run_oma_baseline(&ch, &params);
        assert_eq!(
            prop.gb_success, oma.gb_success,
            "admission must never flip the grant-based outcome (g2={}, h2={:?})",
            ch.g2, ch.h2
        );
    }
}

#[test]
fn scheme_i_sacrifices_the_grant_based_user_near_its_margin() {
    // p0*g2 = 1.1 clears the interference-free threshold eps0 = 1, but
    // with ps*h2[0] = 0.5 of interference the stage-1 SINR drops to
    // 1.1/1.5 < 1.
    let params = SystemParams::new(10.0, 10.0, 1.0, 0.9, 2).unwrap();
    let ch = ChannelRealization { g2: 0.11, h2: vec![0.05, 0.4] };
    let scheme_i = run_scheme_i(&ch, &params);
    let oma = run_oma_baseline(&ch, &params);
    assert!(oma.gb_success, "the grant-based link is fine on its own");
    assert!(!scheme_i.gb_success, "Scheme I trades the grant-based decode away");
}

#[test]
fn two_candidate_rule_matches_brute_force_over_users_and_stages() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for round in 0..100_000 {
        let m_users = 1 + round % 8;
        let params = random_params(&mut rng, m_users);
        let ch = sample_channels(m_users, &mut rng);
        let tau = threshold_tau(ch.g2, &params);

        // Any user may be admitted for first-stage decoding (its rate
        // adapts to the interfered SINR); second-stage decoding is
        // only transparent for users under the power threshold.
        let mut best = 0.0f64;
        for &h in &ch.h2 {
            let first_stage = (1.0 + params.ps * h / (params.p0 * ch.g2 + 1.0)).log2();
            best = best.max(first_stage);
            if params.ps * h < tau {
                let second_stage = (1.0 + params.ps * h).log2();
                best = best.max(second_stage);
            }
        }

        let outcome = run_proposed(&ch, &params);
        assert_eq!(
            outcome.gf_rate, best,
            "two-candidate shortcut missed the optimum (g2={}, h2={:?})",
            ch.g2, ch.h2
        );
    }
}

#[test]
fn proposed_rate_never_drops_while_the_grouping_is_preserved() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    for round in 0..20_000 {
        let m_users = 1 + round % 6;
        let params = random_params(&mut rng, m_users);
        let ch = sample_channels(m_users, &mut rng);
        let tau = threshold_tau(ch.g2, &params);
        let before = run_proposed(&ch, &params).gf_rate;
        for k in 0..m_users {
            // Nudge one gain upward without crossing its neighbor (the
            // sorted order keeps its meaning) and without crossing the
            // admission threshold (the user keeps its group).
            let mut target = if k + 1 < m_users {
                ch.h2[k] + (ch.h2[k + 1] - ch.h2[k]) * 0.5
            } else {
                ch.h2[k] + 0.5
            };
            if params.ps * ch.h2[k] < tau {
                target = target.min(tau / params.ps * (1.0 - 1e-9));
            }
            if target <= ch.h2[k] {
                continue;
            }
            let mut bumped = ch.clone();
            bumped.h2[k] = target;
            let after = run_proposed(&bumped, &params).gf_rate;
            assert!(
                after >= before,
                "improving h2[{k}] dropped the rate: {before} -> {after} (g2={}, h2={:?})",
                ch.g2, ch.h2
            );
        }
    }
}

#[test]
fn proposed_rate_drops_only_when_a_user_crosses_the_threshold() {
    // A gain improvement can push a user past tau, costing it the
    // interference-free decoding slot; that boundary is the only place
    // the selected rate is allowed to fall.
    let mut rng = ChaCha8Rng::seed_from_u64(49);
    let mut observed_drop = false;
    for round in 0..20_000 {
        let m_users = 1 + round % 6;
        let params = random_params(&mut rng, m_users);
        let ch = sample_channels(m_users, &mut rng);
        let tau = threshold_tau(ch.g2, &params);
        let before = run_proposed(&ch, &params).gf_rate;
        for k in 0..m_users {
            let room = if k + 1 < m_users {
                (ch.h2[k + 1] - ch.h2[k]) * 0.5
            } else {
                0.5
            };
            if room == 0.0 {
                continue;
            }
            let mut bumped = ch.clone();
            bumped.h2[k] += room;
            let after = run_proposed(&bumped, &params).gf_rate;
            if after < before {
                observed_drop = true;
                assert!(
                    params.ps * ch.h2[k] < tau && params.ps * bumped.h2[k] >= tau,
                    "rate fell without a threshold crossing: {before} -> {after} \
                     (k={k}, g2={}, h2={:?})",
                    ch.g2, ch.h2
                );
            }
        }
    }
    assert!(observed_drop, "the boundary case should appear in 20k draws");
}

#[test]
fn group_membership_is_contiguous_at_the_threshold() {
    let mut rng = ChaCha8Rng::seed_from_u64(46);
    for round in 0..100_000 {
        let m_users = 1 + round % 6;
        let params = random_params(&mut rng, m_users);
        let ch = sample_channels(m_users, &mut rng);
        let grouping = classify_groups(&ch, &params);
        for (k, &h) in ch.h2.iter().enumerate() {
            if k < grouping.group2_count {
                assert!(params.ps * h < grouping.tau, "user {k} misfiled into Group 2");
            } else {
                assert!(params.ps * h >= grouping.tau, "user {k} misfiled into Group 1");
            }
        }
    }
}

#[test]
fn proposed_rate_dominates_both_baselines_per_realization() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    for round in 0..100_000 {
        let m_users = 1 + round % 6;
        let params = random_params(&mut rng, m_users);
        let ch = sample_channels(m_users, &mut rng);
        let prop = run_proposed(&ch, &params);
        let one = run_scheme_i(&ch, &params);
        let two = run_scheme_ii(&ch, &params);
        assert!(
            prop.gf_rate >= one.gf_rate && prop.gf_rate >= two.gf_rate,
            "proposed rate {} fell below a baseline ({}, {})",
            prop.gf_rate, one.gf_rate, two.gf_rate
        );
    }
}

#[test]
fn admission_and_stage_fields_stay_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(48);
    for round in 0..50_000 {
        let m_users = 1 + round % 6;
        let params = random_params(&mut rng, m_users);
        let ch = sample_channels(m_users, &mut rng);
        for outcome in [
            run_scheme_i(&ch, &params),
            run_scheme_ii(&ch, &params),
            run_proposed(&ch, &params),
            run_oma_baseline(&ch, &params),
        ] {
            match outcome.admitted_user {
                Some(user) => {
                    assert!(user < m_users, "admitted index in range");
                    assert_ne!(outcome.sic_stage, SicStage::NotAdmitted);
                }
                None => {
                    assert_eq!(outcome.sic_stage, SicStage::NotAdmitted);
                    assert_eq!(outcome.gf_rate, 0.0, "no admission, no rate");
                }
            }
            assert!(outcome.gf_rate >= 0.0);
        }
    }
}
