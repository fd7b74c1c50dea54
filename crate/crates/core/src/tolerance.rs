use crate::error::Error;

/// Every numerical threshold used by the crate.
///
/// Values are passed explicitly to each operation that needs them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Eigenvalue floor for positivity tests.
    pub eps_psd: f64,
    /// Frobenius residual threshold (hermiticity, reconstruction, commutators).
    pub eps_residual: f64,
    /// Relative eigenvalue cutoff for the pseudoinverse.
    pub eps_rank: f64,
    /// Normality threshold, relative to `max(1, ||S||_F^2)`.
    pub eps_sppt: f64,
    /// Allowed deviation of the trace from 1.
    pub eps_trace: f64,
    /// Frobenius bound on the off-diagonal blocks of a classical-quantum state.
    pub eps_cq: f64,
    /// Minimum eigenvalue gap of `rho_A` for the eigenbasis route in `cq_detect`.
    pub eps_degenerate: f64,
    /// Outcome probabilities at or below this contribute no entropy.
    pub eps_prob: f64,
    /// Absolute slack on optimized discord values.
    pub eps_opt: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eps_psd: 1e-9,
            eps_residual: 1e-8,
            eps_rank: 1e-10,
            eps_sppt: 1e-7,
            eps_trace: 1e-10,
            eps_cq: 1e-7,
            eps_degenerate: 1e-8,
            eps_prob: 1e-12,
            eps_opt: 1e-4,
        }
    }
}

impl Tolerance {
    pub fn validate(&self) -> Result<(), Error> {
        let fields = [
            ("eps_psd", self.eps_psd),
            ("eps_residual", self.eps_residual),
            ("eps_rank", self.eps_rank),
            ("eps_sppt", self.eps_sppt),
            ("eps_trace", self.eps_trace),
            ("eps_cq", self.eps_cq),
            ("eps_degenerate", self.eps_degenerate),
            ("eps_prob", self.eps_prob),
            ("eps_opt", self.eps_opt),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidTolerance(name));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_positive() {
        Tolerance::default().validate().unwrap();
        let bad = Tolerance {
            eps_sppt: 0.0,
            ..Tolerance::default()
        };
        assert_eq!(bad.validate(), Err(Error::InvalidTolerance("eps_sppt")));
    }
}
