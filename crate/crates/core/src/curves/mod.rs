//! Monomial curves `{0 < α_1 < … < α_m < δ}`: principal determinants,
//! discriminants, the reduced scalar equation and its monodromy.

mod monodromy;
mod ode;
mod poly;
mod resultant;

pub use monodromy::{
    beukers_generators, charpoly, numeric_generators, numeric_monodromy, CMatrix, LoopKind, LoopMonodromy,
    MonodromyGenerators, MonodromyInvariants, MonodromyReport, StepPolicy,
};
pub use ode::{certify_ode, ode_from_system, OdeCertificate, ScalarOde};
pub use poly::{gcd, MPoly};
pub use resultant::{
    bareiss_det, check_restriction, curve_family, discriminant_curve, principal_determinant_curve, secondary_vertices,
    verify_factorization, FaceExponent, FactorizationReport, RestrictionReport, DEFAULT_BUDGET,
};

use num_integer::Integer;

use crate::config::PointConfiguration;
use crate::error::{Error, Result};

/// Exponents `0 = α_0 < α_1 < … < α_{m+1} = δ` with `gcd = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialCurveConfig {
    exponents: Vec<i64>,
}

impl MonomialCurveConfig {
    pub fn new(exponents: &[i64]) -> Result<Self> {
        if exponents.len() < 2 {
            return Err(Error::Empty("curve needs at least the exponents 0 and δ"));
        }
        if exponents[0] != 0 {
            return Err(Error::Hypothesis("curve exponents must start at 0".into()));
        }
        if exponents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Hypothesis("curve exponents must be strictly increasing".into()));
        }
        if exponents.iter().fold(0i64, |g, x| g.gcd(x)) != 1 {
            return Err(Error::Hypothesis("curve exponents must have gcd 1".into()));
        }
        Ok(MonomialCurveConfig { exponents: exponents.to_vec() })
    }

    /// `{0, 1, δ}`, the three-point curve with the same saturation.
    pub fn triple(delta: i64) -> Result<Self> {
        if delta == 1 {
            return Self::new(&[0, 1]);
        }
        Self::new(&[0, 1, delta])
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }

    pub fn delta(&self) -> i64 {
        *self.exponents.last().expect("at least two exponents")
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    /// The homogenized `2 x (m+2)` configuration with columns `(1, α_j)`.
    pub fn configuration(&self) -> Result<PointConfiguration> {
        PointConfiguration::curve(&self.exponents)
    }
}
