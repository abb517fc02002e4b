use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalar model and cost constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemParams {
    pub mu: f64,
    pub nu: f64,
    pub eps: f64,
    pub l_u: f64,
    pub l_v: f64,
    pub m_eta: f64,
    pub m_theta: f64,
    pub m_u: f64,
    pub m_v: f64,
    /// Horizon `T`.
    pub horizon: f64,
    /// Stand-in for the `V ↪ L⁴` embedding constant; any upper bound is safe.
    #[serde(default = "default_c_emb")]
    pub c_emb: f64,
}

fn default_c_emb() -> f64 {
    2.0
}

impl Default for ProblemParams {
    /// μ = ν = 1, ε = 0.5, unit weights, T = 1, C_emb = 2.
    fn default() -> Self {
        ProblemParams {
            mu: 1.0,
            nu: 1.0,
            eps: 0.5,
            l_u: 1.0,
            l_v: 1.0,
            m_eta: 1.0,
            m_theta: 1.0,
            m_u: 1.0,
            m_v: 1.0,
            horizon: 1.0,
            c_emb: 2.0,
        }
    }
}

impl ProblemParams {
    /// Checks signs and the control coupling: `L·M = 0` forces `L = M = 0`
    /// for each control.
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("mu", self.mu),
            ("nu", self.nu),
            ("eps", self.eps),
            ("l_u", self.l_u),
            ("l_v", self.l_v),
            ("m_eta", self.m_eta),
            ("m_theta", self.m_theta),
            ("m_u", self.m_u),
            ("m_v", self.m_v),
            ("horizon", self.horizon),
            ("c_emb", self.c_emb),
        ];
        if let Some((name, v)) = all.iter().find(|(_, v)| !v.is_finite() || *v < 0.0) {
            return Err(Error::Params(format!("{name} = {v} must be finite and nonnegative")));
        }
        for (name, v) in [("mu", self.mu), ("nu", self.nu), ("horizon", self.horizon), ("c_emb", self.c_emb)] {
            if v <= 0.0 {
                return Err(Error::Params(format!("{name} must be strictly positive")));
            }
        }
        for (name, l, m) in [("u", self.l_u, self.m_u), ("v", self.l_v, self.m_v)] {
            if l * m == 0.0 && l + m > 0.0 {
                return Err(Error::Params(format!(
                    "control {name}: L = {l} and M = {m} must vanish together"
                )));
            }
        }
        Ok(())
    }

    /// `1 ∧ δ ∧ μ² ∧ ν²`.
    pub fn coercivity(&self, delta: f64) -> f64 {
        1f64.min(delta).min(self.mu * self.mu).min(self.nu * self.nu)
    }
}
