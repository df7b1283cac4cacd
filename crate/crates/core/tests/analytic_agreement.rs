//! Cross-validation of the three independent outage computation paths:
//! closed-form families, conditional quadrature, and Monte Carlo.

use sgf_core::analytic::{
    outage_conditional, outage_exact, outage_highsnr, outage_quadrature, outage_upper_bound,
};
use sgf_core::montecarlo::estimate_outage;
use sgf_core::params::{derive_constants, DerivedConstants, SystemParams};
use sgf_core::quadrature::integrate;
use sgf_core::scheme::Scheme;

const POWERS: [f64; 5] = [1.0, 10.0, 100.0, 1000.0, 10000.0];
const USER_COUNTS: [usize; 5] = [1, 2, 3, 5, 8];

fn setup(power: f64, m_users: usize) -> (SystemParams, DerivedConstants) {
    let params = SystemParams::new(power, power, 1.0, 0.9, m_users).unwrap();
    let consts = derive_constants(&params);
    (params, consts)
}

#[test]
fn exact_and_quadrature_agree_across_the_grid() {
    for &power in &POWERS {
        for &m_users in &USER_COUNTS {
            let (params, consts) = setup(power, m_users);
            let exact = outage_exact(&params, &consts).unwrap();
            let quad = outage_quadrature(&params, &consts).unwrap();
            let gap = (exact.total - quad).abs();
            assert!(
                gap < 1e-8,
                "closed form and quadrature split by {gap:.3e} at power={power}, M={m_users} \
                 (exact {}, quad {quad})",
                exact.total
            );
        }
    }
}

#[test]
fn monte_carlo_agrees_with_the_closed_form_across_the_grid() {
    let trials = 1_000_000u64;
    for &power in &POWERS {
        for &m_users in &USER_COUNTS {
            let (params, consts) = setup(power, m_users);
            let exact = outage_exact(&params, &consts).unwrap().total;
            let mc = estimate_outage(Scheme::Proposed, &params, trials, 90).unwrap();
            let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
            assert!(
                (mc.value - exact).abs() <= 3.0 * sigma,
                "MC {} vs exact {exact} exceeds 3 sigma ({:.3e}) at power={power}, M={m_users}",
                mc.value,
                3.0 * sigma
            );
        }
    }
}

#[test]
fn breakdown_terms_are_probabilities_that_sum_to_the_total() {
    for &power in &POWERS {
        for &m_users in &USER_COUNTS {
            let (params, consts) = setup(power, m_users);
            let exact = outage_exact(&params, &consts).unwrap();
            assert_eq!(exact.q.len(), m_users + 2, "one term per event family");
            let mut sum = 0.0;
            for (idx, &term) in exact.q.iter().enumerate() {
                assert!(
                    (0.0..=1.0).contains(&term),
                    "q[{idx}] = {term} escaped [0,1] at power={power}, M={m_users}"
                );
                sum += term;
            }
            assert!(
                (sum - exact.total).abs() <= 1e-12 * sum.max(1e-300),
                "family sum {sum} disagrees with total {}",
                exact.total
            );
        }
    }
}

#[test]
fn weak_grant_based_region_reproduces_the_last_family() {
    // Restricting the conditional integral to g2 < alpha0 isolates the
    // event "grant-based link fails outright", which the closed form
    // carries as its final term.
    for &power in &[1.0, 10.0, 100.0] {
        for &m_users in &USER_COUNTS {
            let (params, consts) = setup(power, m_users);
            let exact = outage_exact(&params, &consts).unwrap();
            let f = |g: f64| outage_conditional(g, &params, &consts) * (-g).exp();
            let restricted = integrate(&f, 0.0, consts.alpha0, 1e-12).unwrap().value;
            let last = *exact.q.last().unwrap();
            assert!(
                (restricted - last).abs() < 1e-8,
                "restricted integral {restricted} vs closed-form term {last} \
                 at power={power}, M={m_users}"
            );
        }
    }
}

#[test]
fn upper_bound_dominates_the_exact_value_across_the_grid() {
    for &power in &POWERS {
        for &m_users in &USER_COUNTS {
            let (params, consts) = setup(power, m_users);
            let exact = outage_exact(&params, &consts).unwrap().total;
            let bound = outage_upper_bound(&params, &consts).unwrap();
            assert!(
                bound >= exact,
                "bound {bound} fell below exact {exact} at power={power}, M={m_users}"
            );
        }
    }
}

#[test]
fn log_log_slope_reaches_the_diversity_order() {
    for m_users in 1..=3usize {
        let (params_a, consts_a) = setup(10_000.0, m_users);
        let (params_b, consts_b) = setup(100_000.0, m_users);
        let pa = outage_exact(&params_a, &consts_a).unwrap().total;
        let pb = outage_exact(&params_b, &consts_b).unwrap().total;
        let slope = (pb.ln() - pa.ln()) / (100_000f64.ln() - 10_000f64.ln());
        assert!(
            (slope + m_users as f64).abs() <= 0.3,
            "slope {slope} should be near -{m_users}"
        );
    }
}

#[test]
fn high_snr_expansion_converges_to_the_exact_value() {
    for m_users in 1..=3usize {
        let (params, consts) = setup(100_000.0, m_users);
        let exact = outage_exact(&params, &consts).unwrap().total;
        let approx = outage_highsnr(&params, &consts).unwrap();
        let ratio = approx / exact;
        assert!(
            (0.95..=1.05).contains(&ratio),
            "expansion/exact ratio {ratio} strayed at M={m_users}"
        );
    }
}

#[test]
fn floor_regime_quadrature_settles_onto_the_limiting_level() {
    // With r0=1.5, rs=1 the product eps0*epss exceeds 1: the closed
    // form has no valid domain, but the conditional integral still
    // converges, decreasing toward the limiting level
    //   integral of (e^{-g/eps0} - e^{-g})^M e^{-g} dg
    // as both powers grow.
    let limit = 0.00018621393819493902;
    let mut previous_gap = f64::INFINITY;
    for &power in &[1000.0, 10_000.0, 100_000.0] {
        let params = SystemParams::new(power, power, 1.5, 1.0, 5).unwrap();
        let consts = derive_constants(&params);
        assert!(consts.floor_regime(), "this rate pair has an error floor");
        assert!(outage_exact(&params, &consts).is_err(), "closed form must refuse");
        assert!(outage_highsnr(&params, &consts).is_err(), "expansion must refuse");
        let quad = outage_quadrature(&params, &consts).unwrap();
        let gap = quad - limit;
        assert!(gap > 0.0, "outage {quad} must stay above the floor {limit}");
        assert!(
            gap < previous_gap,
            "gap to the floor must shrink with power: {gap} after {previous_gap}"
        );
        previous_gap = gap;
    }
    let reference = [0.00019507185923565458, 0.00018708393157689928];
    for (&power, &expected) in [1000.0, 10_000.0].iter().zip(&reference) {
        let params = SystemParams::new(power, power, 1.5, 1.0, 5).unwrap();
        let consts = derive_constants(&params);
        let quad = outage_quadrature(&params, &consts).unwrap();
        assert!(
            (quad - expected).abs() <= 1e-12,
            "floor-regime quadrature drifted at power={power}: {quad} vs {expected}"
        );
    }
}
