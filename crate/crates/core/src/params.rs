use crate::error::Error;

// --- system parameters ---

/// Transmit powers and target rates for one uplink configuration.
///
/// Powers are linear and noise-normalized (the receiver noise variance
/// is one throughout, so `p0` and `ps` double as transmit SNRs).
/// Rates are in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Grant-based user's transmit power.
    pub p0: f64,
    /// Common transmit power of the grant-free users.
    pub ps: f64,
    /// Grant-based user's target rate.
    pub r0: f64,
    /// Grant-free users' target rate.
    pub rs: f64,
    /// Number of grant-free users contending for admission.
    pub m_users: usize,
}

impl SystemParams {
    /// Builds a parameter set, enforcing the type invariants
    /// `p0 > 0`, `ps > 0`, `r0 > 0`, `rs >= 0`, `m_users >= 1`.
    ///
    /// The per-realization scheme functions are total and also accept
    /// directly constructed values outside these ranges (for example
    /// `ps = 0` to model silenced grant-free users), but every
    /// estimator and analytic routine assumes a set built here.
    pub fn new(p0: f64, ps: f64, r0: f64, rs: f64, m_users: usize) -> Result<Self, Error> {
        let params = Self { p0, ps, r0, rs, m_users };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.p0.is_finite() && self.p0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "p0 must be finite and positive, got {}",
                self.p0
            )));
        }
        if !(self.ps.is_finite() && self.ps > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ps must be finite and positive, got {}",
                self.ps
            )));
        }
        if !(self.r0.is_finite() && self.r0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "r0 must be finite and positive, got {}",
                self.r0
            )));
        }
        if !(self.rs.is_finite() && self.rs >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rs must be finite and nonnegative, got {}",
                self.rs
            )));
        }
        if self.m_users == 0 {
            return Err(Error::InvalidParameter(
                "m_users must be at least 1".to_string(),
            ));
        }
        Ok(())
    }
}

// --- derived constants ---

/// SINR thresholds and integration limits computed once per parameter
/// set and shared by every analytic routine.
///
/// `alpha2` and `alpha2_tilde` only exist when `eps0 * epss < 1`; in
/// the complementary error-floor regime they are `None` and the
/// closed-form outage expressions are unavailable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    /// `2^r0 - 1`, the grant-based SINR threshold.
    pub eps0: f64,
    /// `2^rs - 1`, the grant-free SINR threshold.
    pub epss: f64,
    /// `eps0 / p0`.
    pub alpha0: f64,
    /// `epss / ps`.
    pub alphas: f64,
    /// `(1 + epss) * alpha0`.
    pub alpha1: f64,
    /// `eps0 * (epss + 1) / ((1 - eps0 * epss) * p0)`.
    pub alpha2: Option<f64>,
    /// `(epss + 1) / (1 - eps0 * epss)`, so `alpha2 = alpha0 * alpha2_tilde`.
    pub alpha2_tilde: Option<f64>,
}

impl DerivedConstants {
    /// True in the error-floor regime `eps0 * epss >= 1`, where the
    /// grant-based and grant-free targets cannot both be met once the
    /// grant-based channel is weak enough to force first-stage decoding.
    pub fn floor_regime(&self) -> bool {
        self.alpha2.is_none()
    }
}

/// Evaluates the threshold constants for one parameter set.
pub fn derive_constants(params: &SystemParams) -> DerivedConstants {
    let eps0 = f64::exp2(params.r0) - 1.0;
    let epss = f64::exp2(params.rs) - 1.0;
    let alpha0 = eps0 / params.p0;
    let alphas = epss / params.ps;
    let alpha1 = (1.0 + epss) * alpha0;
    let (alpha2, alpha2_tilde) = if eps0 * epss < 1.0 {
        let tilde = (epss + 1.0) / (1.0 - eps0 * epss);
        (Some(alpha0 * tilde), Some(tilde))
    } else {
        (None, None)
    };
    DerivedConstants { eps0, epss, alpha0, alphas, alpha1, alpha2, alpha2_tilde }
}

// --- tests ---

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
        assert!(
            (actual - expected).abs() <= tol,
            "{what}: got {actual}, expected {expected}"
        );
    }

    #[test]
    fn constants_match_reference_values() {
        let params = SystemParams::new(10.0, 10.0, 1.0, 0.9, 2).unwrap();
        let c = derive_constants(&params);
        assert_close(c.eps0, 1.0, 0.0, "eps0");
        assert_close(c.epss, 0.8660659830736148, 1e-16, "epss");
        assert_close(c.alpha0, 0.1, 0.0, "alpha0");
        assert_close(c.alphas, 0.08660659830736148, 1e-17, "alphas");
        assert_close(c.alpha1, 0.18660659830736148, 1e-16, "alpha1");
        assert_close(c.alpha2.unwrap(), 1.3932726172912966, 1e-14, "alpha2");
        assert_close(c.alpha2_tilde.unwrap(), 13.932726172912966, 1e-13, "alpha2_tilde");
        assert!(!c.floor_regime(), "eps0*epss < 1 must not set the floor flag");
    }

    #[test]
    fn zero_rate_target_collapses_thresholds() {
        let params = SystemParams::new(4.0, 7.0, 1.7, 0.0, 3).unwrap();
        let c = derive_constants(&params);
        assert_eq!(c.epss, 0.0, "rs=0 gives epss=0");
        assert_eq!(c.alphas, 0.0, "rs=0 gives alphas=0");
        assert_eq!(c.alpha1, c.alpha0, "alpha1 collapses onto alpha0");
        assert_eq!(c.alpha2, Some(c.alpha0), "alpha2 collapses onto alpha0");
    }

    #[test]
    fn floor_regime_disables_alpha2() {
        let params = SystemParams::new(10.0, 10.0, 1.5, 1.0, 5).unwrap();
        let c = derive_constants(&params);
        assert!(c.eps0 * c.epss >= 1.0, "this setting must sit in the floor regime");
        assert!(c.floor_regime());
        assert_eq!(c.alpha2, None);
        assert_eq!(c.alpha2_tilde, None);
    }

    #[test]
    fn threshold_chain_is_ordered() {
        let params = SystemParams::new(3.0, 12.0, 1.2, 0.4, 4).unwrap();
        let c = derive_constants(&params);
        assert!(c.alpha0 <= c.alpha1, "alpha0 <= alpha1");
        assert!(c.alpha1 <= c.alpha2.unwrap(), "alpha1 <= alpha2");
        for v in [c.eps0, c.epss, c.alpha0, c.alphas, c.alpha1, c.alpha2.unwrap()] {
            assert!(v >= 0.0, "derived constants are nonnegative, got {v}");
        }
    }

    #[test]
    fn validation_rejects_bad_fields() {
        assert!(SystemParams::new(0.0, 1.0, 1.0, 0.9, 1).is_err(), "p0=0 rejected");
        assert!(SystemParams::new(1.0, 0.0, 1.0, 0.9, 1).is_err(), "ps=0 rejected");
        assert!(SystemParams::new(1.0, 1.0, 0.0, 0.9, 1).is_err(), "r0=0 rejected");
        assert!(SystemParams::new(1.0, 1.0, 1.0, -0.1, 1).is_err(), "rs<0 rejected");
        assert!(SystemParams::new(1.0, 1.0, 1.0, 0.9, 0).is_err(), "m_users=0 rejected");
        assert!(SystemParams::new(f64::NAN, 1.0, 1.0, 0.9, 1).is_err(), "NaN rejected");
        assert!(SystemParams::new(1.0, 1.0, 1.0, 0.0, 1).is_ok(), "rs=0 accepted");
    }
}
