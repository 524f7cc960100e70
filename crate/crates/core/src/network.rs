//! Two-port, frequency-dependent scattering networks.
//!
//! Convention: output annihilation operators are `c = U(ω)·a`, and a chain
//! `[e₁, e₂, …, eₙ]` (listed input to output) has transfer `U = Mₙ ⋯ M₂·M₁`.
//! With this convention `[RelativeDelay(τ), BalancedBS]` reproduces the
//! standard HOM input-output relation exactly, and the modified HOM chain
//! reproduces its compact closed form without any extra global phase.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rates::LossParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum OpticalElement {
    /// 50:50 beam splitter `[[1,1],[1,−1]]/√2`.
    BalancedBs,
    /// `diag(e^{−iωτ}, e^{+iωτ})`; total relative delay between the ports is `2τ`.
    RelativeDelay { tau: f64 },
    /// Frequency-independent phase `e^{iθ}` on port 2.
    AchromaticPhase { theta: f64 },
    /// Flat (white-noise) absorption amplitudes, one per port.
    ScalarLoss {
        #[serde(with = "crate::amp_serde")]
        amp1: Complex64,
        #[serde(with = "crate::amp_serde")]
        amp2: Complex64,
    },
}

impl OpticalElement {
    pub fn scalar_loss(amp1: Complex64, amp2: Complex64) -> Result<Self> {
        for (name, a) in [("amp1", amp1), ("amp2", amp2)] {
            if !(a.re.is_finite() && a.im.is_finite()) || a.norm() > 1.0 {
                return Err(Error::invalid(name, format!("loss amplitude must satisfy |a| <= 1, got {a}")));
            }
        }
        Ok(OpticalElement::ScalarLoss { amp1, amp2 })
    }

    fn validate(&self) -> Result<()> {
        match *self {
            OpticalElement::ScalarLoss { amp1, amp2 } => Self::scalar_loss(amp1, amp2).map(|_| ()),
            OpticalElement::RelativeDelay { tau } if !tau.is_finite() => Err(Error::invalid("tau", "must be finite")),
            OpticalElement::AchromaticPhase { theta } if !theta.is_finite() => {
                Err(Error::invalid("theta", "must be finite"))
            }
            _ => Ok(()),
        }
    }

    pub fn is_lossless(&self) -> bool {
        !matches!(self, OpticalElement::ScalarLoss { .. })
    }
}

/// 2×2 complex scattering matrix at one frequency; `m[i][j]` couples input
/// port `j` into output port `i` (zero-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix(pub [[Complex64; 2]; 2]);

impl TransferMatrix {
    pub const IDENTITY: TransferMatrix = TransferMatrix([
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ]);

    pub fn diag(a: Complex64, b: Complex64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        TransferMatrix([[a, z], [z, b]])
    }

    /// One-based accessor matching the usual `S₁₁, S₁₂, …` notation.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.0[row - 1][col - 1]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        TransferMatrix([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint() * *self;
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p.0[i][j] - target).norm());
            }
        }
        worst
    }

    /// Singular values, largest first.
    pub fn singular_values(&self) -> [f64; 2] {
        let m = &self.0;
        let frob = m.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>();
        let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm_sqr();
        let disc = (frob * frob / 4.0 - det).max(0.0).sqrt();
        let hi = frob / 2.0 + disc;
        let lo = (frob / 2.0 - disc).max(0.0);
        [hi.sqrt(), lo.sqrt()]
    }

    /// Entrywise distance to `other` after removing the best common phase.
    pub fn distance_up_to_phase(&self, other: &TransferMatrix) -> f64 {
        let overlap: Complex64 = self.0.iter().flatten().zip(other.0.iter().flatten()).map(|(a, b)| b.conj() * a).sum();
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
        self.0.iter().flatten().zip(other.0.iter().flatten()).map(|(a, b)| (a - b * phase).norm()).fold(0.0, f64::max)
    }
}

impl Mul for TransferMatrix {
    type Output = TransferMatrix;

    fn mul(self, rhs: TransferMatrix) -> TransferMatrix {
        let a = &self.0;
        let b = &rhs.0;
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        TransferMatrix(out)
    }
}

pub fn element_matrix(e: &OpticalElement, w: f64) -> TransferMatrix {
    match *e {
        OpticalElement::BalancedBs => {
            let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
            TransferMatrix([[h, h], [h, -h]])
        }
        OpticalElement::RelativeDelay { tau } => {
            let phase = Complex64::from_polar(1.0, -w * tau);
            TransferMatrix::diag(phase, phase.conj())
        }
        OpticalElement::AchromaticPhase { theta } => {
            TransferMatrix::diag(Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, theta))
        }
        OpticalElement::ScalarLoss { amp1, amp2 } => TransferMatrix::diag(amp1, amp2),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<OpticalElement>", into = "Vec<OpticalElement>")]
pub struct OpticalNetwork {
    elements: Vec<OpticalElement>,
}

impl TryFrom<Vec<OpticalElement>> for OpticalNetwork {
    type Error = Error;
    fn try_from(elements: Vec<OpticalElement>) -> Result<Self> {
        Self::new(elements)
    }
}

impl From<OpticalNetwork> for Vec<OpticalElement> {
    fn from(n: OpticalNetwork) -> Self {
        n.elements
    }
}

impl OpticalNetwork {
    pub fn new(elements: Vec<OpticalElement>) -> Result<Self> {
        elements.iter().try_for_each(OpticalElement::validate)?;
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[OpticalElement] {
        &self.elements
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &OpticalNetwork) -> OpticalNetwork {
        let mut elements = self.elements.clone();
        elements.extend_from_slice(&next.elements);
        OpticalNetwork { elements }
    }

    pub fn transfer_at(&self, w: f64) -> TransferMatrix {
        self.elements.iter().fold(TransferMatrix::IDENTITY, |acc, e| element_matrix(e, w) * acc)
    }

    pub fn is_lossless(&self) -> bool {
        self.elements.iter().all(OpticalElement::is_lossless)
    }

    /// `∑|τ|` over delay elements; bounds the oscillation rate of any rate
    /// integrand in frequency.
    pub fn total_delay(&self) -> f64 {
        self.elements
            .iter()
            .map(|e| match e {
                OpticalElement::RelativeDelay { tau } => tau.abs(),
                _ => 0.0,
            })
            .sum()
    }
}

/// Standard HOM: `[Delay(τ), BS]`.
pub fn hom_network(tau: f64) -> OpticalNetwork {
    OpticalNetwork { elements: vec![OpticalElement::RelativeDelay { tau }, OpticalElement::BalancedBs] }
}

/// Modified HOM: `[Loss(ξ)?, Delay(τ₁), BS, Loss(χ)?, Delay(τ₂), Phase(θ), BS]`.
pub fn mhom_network(tau1: f64, tau2: f64, theta: f64, loss: Option<&LossParams>) -> OpticalNetwork {
    let mut elements = Vec::with_capacity(7);
    if let Some(lp) = loss {
        elements.push(OpticalElement::ScalarLoss { amp1: lp.xi1(), amp2: lp.xi2() });
    }
    elements.push(OpticalElement::RelativeDelay { tau: tau1 });
    elements.push(OpticalElement::BalancedBs);
    if let Some(lp) = loss {
        elements.push(OpticalElement::ScalarLoss { amp1: lp.chi1(), amp2: lp.chi2() });
    }
    elements.push(OpticalElement::RelativeDelay { tau: tau2 });
    elements.push(OpticalElement::AchromaticPhase { theta });
    elements.push(OpticalElement::BalancedBs);
    OpticalNetwork { elements }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Closed-form modified-HOM coefficients, written out independently.
    fn mhom_closed_form(tau1: f64, tau2: f64, theta: f64, w: f64) -> TransferMatrix {
        let x = w * tau2 + theta / 2.0;
        let i = c(0.0, 1.0);
        let e_minus = Complex64::from_polar(1.0, -(w * tau1 - theta / 2.0));
        let e_plus = Complex64::from_polar(1.0, w * tau1 + theta / 2.0);
        TransferMatrix([[x.cos() * e_minus, -i * x.sin() * e_plus], [-i * x.sin() * e_minus, x.cos() * e_plus]])
    }

    #[test]
    fn element_library() {
        let bs = element_matrix(&OpticalElement::BalancedBs, 3.3);
        let h = FRAC_1_SQRT_2;
        assert_eq!(bs, TransferMatrix([[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]));
        assert_eq!(element_matrix(&OpticalElement::RelativeDelay { tau: 0.0 }, 7.0), TransferMatrix::IDENTITY);
        let qwp = element_matrix(&OpticalElement::AchromaticPhase { theta: FRAC_PI_2 }, 1.0);
        assert!((qwp.entry(2, 2) - c(0.0, 1.0)).norm() < 1e-16);
        assert_eq!(qwp.entry(1, 1), c(1.0, 0.0));
    }

    #[test]
    fn hom_matches_input_output_relation() {
        let tau = 0.37;
        let w = PI / 3.0 / tau;
        let u = hom_network(tau).transfer_at(w);
        let e = Complex64::from_polar(FRAC_1_SQRT_2, -PI / 3.0);
        let expected = TransferMatrix([[e, e.conj()], [e, -e.conj()]]);
        for i in 1..=2 {
            for j in 1..=2 {
                assert!((u.entry(i, j) - expected.entry(i, j)).norm() < 1e-15);
            }
        }
        assert_eq!(hom_network(0.0).transfer_at(4.0), element_matrix(&OpticalElement::BalancedBs, 0.0));
    }

    #[test]
    fn mhom_zero_delays_is_identity() {
        let u = mhom_network(0.0, 0.0, 0.0, None).transfer_at(5.0);
        assert!(u.distance_up_to_phase(&TransferMatrix::IDENTITY) < 1e-15);
    }

    #[test]
    fn mhom_convention_lock() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(26);
        for _ in 0..100 {
            let (t1, t2, th, w) = (
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
                rng.gen_range(0.0..2.0 * PI),
                rng.gen_range(0.0..10.0),
            );
            let u = mhom_network(t1, t2, th, None).transfer_at(w);
            let closed = mhom_closed_form(t1, t2, th, w);
            assert!(u.distance_up_to_phase(&closed) <= 1e-12);
        }
    }

    #[test]
    fn lossy_column_norms_bounded() {
        let lp = LossParams::new(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let u = mhom_network(0.4, -1.1, 0.3, Some(&lp)).transfer_at(2.0);
        for j in 1..=2 {
            let col = u.entry(1, j).norm_sqr() + u.entry(2, j).norm_sqr();
            assert!(col <= 1.0 + 1e-12);
        }
        assert!(!mhom_network(0.0, 0.0, 0.0, Some(&lp)).is_lossless());
    }

    #[test]
    fn rejects_active_loss() {
        assert!(OpticalElement::scalar_loss(c(1.2, 0.0), c(1.0, 0.0)).is_err());
        let json = r#"[{"type":"scalar_loss","amp1":1.5,"amp2":0.5}]"#;
        assert!(serde_json::from_str::<OpticalNetwork>(json).is_err());
    }

    #[test]
    fn deserializes_tagged_elements() {
        let json = r#"[{"type":"relative_delay","tau":0.5},{"type":"balanced_bs"},
                       {"type":"scalar_loss","amp1":[0.6,0.0],"amp2":0.9},
                       {"type":"achromatic_phase","theta":1.0}]"#;
        let net: OpticalNetwork = serde_json::from_str(json).unwrap();
        assert_eq!(net.elements().len(), 4);
        assert_eq!(net.total_delay(), 0.5);
        let back = serde_json::to_string(&net).unwrap();
        assert_eq!(serde_json::from_str::<OpticalNetwork>(&back).unwrap(), net);
        assert!(serde_json::from_str::<OpticalNetwork>(r#"[{"type":"mirror"}]"#).is_err());
    }

    proptest! {
        #[test]
        fn lossless_chains_are_unitary(t1 in -5.0f64..5.0, t2 in -5.0f64..5.0, th in 0.0f64..6.3, w in 0.0f64..50.0) {
            let u = mhom_network(t1, t2, th, None).transfer_at(w);
            prop_assert!(u.unitarity_defect() <= 1e-12);
            let col = u.entry(1, 1).norm_sqr() + u.entry(2, 1).norm_sqr();
            prop_assert!((col - 1.0).abs() <= 1e-12);
            prop_assert!(hom_network(t1).transfer_at(w).unitarity_defect() <= 1e-12);
        }

        #[test]
        fn lossy_chains_are_passive(a in 0.0f64..1.0, b in 0.0f64..1.0, p in 0.0f64..6.3,
                                   t1 in -3.0f64..3.0, t2 in -3.0f64..3.0, w in 0.0f64..20.0) {
            let lp = LossParams::new(Complex64::from_polar(a, p), c(b, 0.0), c(1.0, 0.0), Complex64::from_polar(b, -p)).unwrap();
            let sv = mhom_network(t1, t2, 0.7, Some(&lp)).transfer_at(w).singular_values();
            prop_assert!(sv[0] <= 1.0 + 1e-12);
            prop_assert!(sv[1] >= 0.0);
        }

        #[test]
        fn composition_is_product(t1 in -3.0f64..3.0, t2 in -3.0f64..3.0, w in 0.0f64..20.0) {
            let a = hom_network(t1);
            let b = mhom_network(t2, t1, 0.4, None);
            let joined = a.then(&b).transfer_at(w);
            let product = b.transfer_at(w) * a.transfer_at(w);
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((joined.0[i][j] - product.0[i][j]).norm() <= 1e-14);
                }
            }
        }
    }
}
