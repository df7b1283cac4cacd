use crate::channel::ChannelRealization;
use crate::params::SystemParams;

// --- outcome types ---

/// Admission policy under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Open contention: every grant-free user may transmit and the
    /// weakest one is admitted for second-stage decoding.
    SchemeI,
    /// Closed contention: only the strongest grant-free user is
    /// admitted and is decoded first, treating the grant-based signal
    /// as noise.
    SchemeII,
    /// Hybrid: a grant-based-channel-dependent power threshold splits
    /// users into groups and the better of two candidates is admitted.
    Proposed,
    /// No grant-free admission at all; reference point for the
    /// grant-based user's baseline outage.
    OmaBaseline,
}

impl Scheme {
    pub const ALL: [Scheme; 4] =
        [Scheme::SchemeI, Scheme::SchemeII, Scheme::Proposed, Scheme::OmaBaseline];

    /// Stable name used in CSV output and CLI arguments.
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::SchemeI => "SchemeI",
            Scheme::SchemeII => "SchemeII",
            Scheme::Proposed => "Proposed",
            Scheme::OmaBaseline => "OmaBaseline",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Which decoding slot the admitted grant-free user occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SicStage {
    /// Decoded before the grant-based user, treating it as noise.
    FirstStage,
    /// Decoded after the grant-based user, interference-free.
    SecondStage,
    /// No grant-free transmission reached the decoder.
    NotAdmitted,
}

/// Result of running one scheme on one channel realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionOutcome {
    pub scheme: Scheme,
    /// Ascending-order index of the admitted grant-free user, if any.
    pub admitted_user: Option<usize>,
    pub sic_stage: SicStage,
    /// Achieved grant-free rate in bits per channel use (0 if none).
    pub gf_rate: f64,
    /// Whether the grant-based user decodes at its target rate.
    pub gb_success: bool,
    /// Whether the admitted grant-free rate missed its target.
    pub gf_outage: bool,
}

/// Threshold split of the grant-free users for one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupingOutcome {
    /// Received-power threshold `tau(|g|^2)`.
    pub tau: f64,
    /// Number of users whose received power falls below `tau`
    /// (Group 2); ordering makes them exactly indices `0..group2_count`.
    pub group2_count: usize,
}

// --- scheme logic ---

fn rate(sinr: f64) -> f64 {
    (1.0 + sinr).log2()
}

fn outcome(
    scheme: Scheme,
    admitted_user: Option<usize>,
    sic_stage: SicStage,
    gf_rate: f64,
    gb_success: bool,
    params: &SystemParams,
) -> TransmissionOutcome {
    TransmissionOutcome {
        scheme,
        admitted_user,
        sic_stage,
        gf_rate,
        gb_success,
        gf_outage: gf_rate < params.rs,
    }
}

/// Largest interference power the grant-based link can absorb while
/// still meeting its target rate: `max{0, p0*g2/eps0 - 1}`.
///
/// Whenever the returned value is positive, an interferer at exactly
/// this received power leaves the grant-based SINR at `eps0`, so
/// `log2(1 + p0*g2/(tau+1)) >= r0` holds.
pub fn threshold_tau(g2: f64, params: &SystemParams) -> f64 {
    let eps0 = f64::exp2(params.r0) - 1.0;
    (params.p0 * g2 / eps0 - 1.0).max(0.0)
}

/// Splits the grant-free users around `threshold_tau`; the first
/// `group2_count` (weakest) users are the ones below it.
pub fn classify_groups(ch: &ChannelRealization, params: &SystemParams) -> GroupingOutcome {
    let tau = threshold_tau(ch.g2, params);
    let group2_count = ch.h2.partition_point(|&h| params.ps * h < tau);
    GroupingOutcome { tau, group2_count }
}

/// Scheme I: the weakest user transmits alongside the grant-based one
/// and is decoded second, but only if the grant-based signal survives
/// the interference; a failed first stage wipes out both links.
pub fn run_scheme_i(ch: &ChannelRealization, params: &SystemParams) -> TransmissionOutcome {
    let eps0 = f64::exp2(params.r0) - 1.0;
    let weakest = ch.h2[0];
    let gb_success = params.p0 * ch.g2 > eps0 * (params.ps * weakest + 1.0);
    if gb_success {
        let gf_rate = rate(params.ps * weakest);
        outcome(Scheme::SchemeI, Some(0), SicStage::SecondStage, gf_rate, true, params)
    } else {
        outcome(Scheme::SchemeI, None, SicStage::NotAdmitted, 0.0, false, params)
    }
}

/// Scheme II: the strongest user is admitted and decoded first against
/// grant-based interference; the grant-based user then sees a clean
/// channel because the admitted rate is adapted to its own stage-1
/// SINR.
pub fn run_scheme_ii(ch: &ChannelRealization, params: &SystemParams) -> TransmissionOutcome {
    let eps0 = f64::exp2(params.r0) - 1.0;
    let top = ch.h2[params.m_users - 1];
    let gf_rate = rate(params.ps * top / (params.p0 * ch.g2 + 1.0));
    let gb_success = params.p0 * ch.g2 >= eps0;
    outcome(Scheme::SchemeII, Some(params.m_users - 1), SicStage::FirstStage, gf_rate, gb_success, params)
}

/// Proposed hybrid: at most two users can win (the strongest below the
/// threshold, decoded second; or the strongest overall, decoded first)
/// and the one with the larger achievable rate is admitted. Either way
/// the grant-based user decodes exactly as it would under OMA.
pub fn run_proposed(ch: &ChannelRealization, params: &SystemParams) -> TransmissionOutcome {
    let eps0 = f64::exp2(params.r0) - 1.0;
    let m_users = params.m_users;
    let grouping = classify_groups(ch, params);
    let m = grouping.group2_count;
    let gb_success = params.p0 * ch.g2 >= eps0;

    let rate_a = if m >= 1 { Some(rate(params.ps * ch.h2[m - 1])) } else { None };
    let rate_b = if m < m_users {
        Some(rate(params.ps * ch.h2[m_users - 1] / (params.p0 * ch.g2 + 1.0)))
    } else {
        None
    };

    // Ties go to the second-stage candidate; they have probability
    // zero under continuous fading but a fixed rule keeps runs
    // deterministic.
    match (rate_a, rate_b) {
        (Some(a), Some(b)) if a >= b => {
            outcome(Scheme::Proposed, Some(m - 1), SicStage::SecondStage, a, gb_success, params)
        }
        (Some(a), None) => {
            outcome(Scheme::Proposed, Some(m - 1), SicStage::SecondStage, a, gb_success, params)
        }
        (_, Some(b)) => {
            outcome(Scheme::Proposed, Some(m_users - 1), SicStage::FirstStage, b, gb_success, params)
        }
        (None, None) => unreachable!("m_users >= 1 guarantees at least one candidate"),
    }
}

/// Pure grant-based transmission with the resource block kept to its
/// owner; the comparison point for grant-based transparency.
pub fn run_oma_baseline(ch: &ChannelRealization, params: &SystemParams) -> TransmissionOutcome {
    let eps0 = f64::exp2(params.r0) - 1.0;
    let gb_success = params.p0 * ch.g2 >= eps0;
    outcome(Scheme::OmaBaseline, None, SicStage::NotAdmitted, 0.0, gb_success, params)
}

/// Dispatches one realization through the selected scheme.
pub fn run(scheme: Scheme, ch: &ChannelRealization, params: &SystemParams) -> TransmissionOutcome {
    match scheme {
        Scheme::SchemeI => run_scheme_i(ch, params),
        Scheme::SchemeII => run_scheme_ii(ch, params),
        Scheme::Proposed => run_proposed(ch, params),
        Scheme::OmaBaseline => run_oma_baseline(ch, params),
    }
}

// --- tests ---
