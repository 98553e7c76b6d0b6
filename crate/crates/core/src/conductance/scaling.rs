//! Order-of-growth predictions for mobile conductance.
//!
//! Every term is reported with constant 1; compare classes through ratios
//! across parameter sweeps, never as absolute values.

use serde::Serialize;

use crate::mobility::MobilitySpec;

/// `n r^2` below this counts as the sparse (disconnected) regime.
pub const SPARSE_LIMIT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    Sparse,
    Dense,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingTerm {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingClass {
    pub regime: Regime,
    pub terms: Vec<ScalingTerm>,
}

impl ScalingClass {
    pub fn value(&self) -> f64 {
        self.terms.iter().map(|t| t.value).sum()
    }

    pub fn label(&self) -> String {
        if self.terms.is_empty() {
            return "Θ(0)".to_string();
        }
        let inner: Vec<&str> = self.terms.iter().map(|t| t.label.as_str()).collect();
        format!("Θ({})", inner.join(" + "))
    }
}

fn term(label: impl Into<String>, value: f64) -> ScalingTerm {
    ScalingTerm {
        label: label.into(),
        value,
    }
}

/// Static-plus-mobile structure shared by the partially random and
/// one-dimensional laws: `w_s * (n r^3 | r) + (mobile_pairs / n) * (r^2 | 1/n)`.
fn two_part(sparse: bool, n: f64, r: f64, static_weight: f64, mobile_pairs: f64, static_w: &str, mobile_w: &str) -> Vec<ScalingTerm> {
    let mut terms = Vec::new();
    if static_weight > 0.0 {
        if sparse {
            terms.push(term(format!("{static_w} n r^3"), static_weight * n * r.powi(3)));
        } else {
            terms.push(term(format!("{static_w} r"), static_weight * r));
        }
    }
    if mobile_pairs > 0.0 {
        if sparse {
            terms.push(term(format!("{mobile_w}/n r^2"), mobile_pairs / n * r * r));
        } else {
            terms.push(term(format!("{mobile_w}/n^2"), mobile_pairs / (n * n)));
        }
    }
    terms
}

/// Predicted conductance order for `spec` at `(n, r)`.
pub fn scaling_class(spec: &MobilitySpec, n: usize, r: f64) -> ScalingClass {
    let nf = n as f64;
    let nr2 = nf * r * r;
    let sparse = nr2 < SPARSE_LIMIT;
    let regime = if sparse { Regime::Sparse } else { Regime::Dense };
    let terms = match *spec {
        MobilitySpec::FullyRandom => {
            if sparse {
                vec![term("n r^2", nr2)]
            } else {
                vec![term("1", 1.0)]
            }
        }
        MobilitySpec::VelocityConstrained { v_max, .. } => match (sparse, v_max >= r) {
            (true, true) => vec![term("n r^2 v_max", nr2 * v_max)],
            (true, false) => vec![term("n r^3", nr2 * r)],
            (false, true) => vec![term("v_max", v_max)],
            (false, false) => vec![term("r", r)],
        },
        MobilitySpec::PartiallyRandom { mobile } => {
            let k = mobile as f64;
            let w = ((nf - k) / nf).powi(2);
            two_part(sparse, nf, r, w, k * (2.0 * nf - k), "((n-k)/n)^2", "k(2n-k)")
        }
        MobilitySpec::OneDimensional { vertical, horizontal } => {
            let (v, h) = (vertical as f64, horizontal as f64);
            let w = (v * v + h * h) / (nf * nf);
            two_part(sparse, nf, r, w, v * h, "((n_V^2+n_H^2)/n^2)", "n_V n_H")
        }
        MobilitySpec::Static => two_part(sparse, nf, r, 1.0, 0.0, "", ""),
    };
    ScalingClass { regime, terms }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fully_random_sparse() {
        let n = 100;
        let r = (0.01f64 / 100.0).sqrt();
        let c = scaling_class(&MobilitySpec::FullyRandom, n, r);
        assert_eq!(c.regime, Regime::Sparse);
        assert_eq!(c.label(), "Θ(n r^2)");
        assert!((c.value() - 0.01).abs() < 1e-15);
        let dense = scaling_class(&MobilitySpec::FullyRandom, 1000, 0.1);
        assert_eq!((dense.regime, dense.value()), (Regime::Dense, 1.0));
    }

    #[test]
    fn partially_random_without_mobiles_is_static_term() {
        let c = scaling_class(&MobilitySpec::PartiallyRandom { mobile: 0 }, 400, 0.01);
        assert_eq!(c.terms.len(), 1);
        assert!(c.terms[0].label.ends_with("n r^3"));
        assert!((c.value() - 400.0 * 1e-6).abs() < 1e-15);
    }

    #[test]
    fn slow_velocity_falls_back_to_radius() {
        let c = scaling_class(&MobilitySpec::velocity(0.005), 400, 0.01);
        assert_eq!(c.label(), "Θ(n r^3)");
        let fast = scaling_class(&MobilitySpec::velocity(0.2), 400, 0.01);
        assert!((fast.value() - 400.0 * 1e-4 * 0.2).abs() < 1e-15);
    }

    #[test]
    fn one_dimensional_terms() {
        let spec = MobilitySpec::OneDimensional { vertical: 200, horizontal: 200 };
        let c = scaling_class(&spec, 400, 0.01);
        let expect = 0.5 * 400.0 * 1e-6 + 200.0 * 200.0 / 400.0 * 1e-4;
        assert!((c.value() - expect).abs() < 1e-15);
        let all_v = scaling_class(&MobilitySpec::OneDimensional { vertical: 400, horizontal: 0 }, 400, 0.01);
        assert_eq!(all_v.terms.len(), 1);
    }
}
