//! The scalar equation of the three-point curve `A' = {0, 1, δ}`.
//!
//! Solutions of `H_{A'}(β)` have the form `y^e φ(t)` with `A e = β`,
//! `e = (β_1 - β_2, β_2, 0)`, and the invariant `t = y_0^{δ-1} y_2 / y_1^δ`
//! (the monomial of the kernel vector `w = (δ-1, -δ, 1)`). The box operator
//! of `w`, multiplied by `y^{w+} y^{w-}`, becomes `P(θ) φ = t Q(θ) φ` with
//! `θ = t d/dt`, because `θ_j` acts on `y^e φ(t)` as `e_j + w_j θ` and
//! `y^γ ∂^γ` is the falling factorial of `θ`:
//!
//! `P(θ) = θ Π_{s=0}^{δ-2} ((δ-1)θ + e_0 - s)`,
//! `Q(θ) = Π_{s=0}^{δ-1} (e_1 - δθ - s)`.

use num_traits::{One, Zero};

use super::MonomialCurveConfig;
use crate::error::{Error, Result};
use crate::hyper::{gamma_series_at, is_nonresonant};
use crate::matrix::{rat, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarOde {
    pub delta: i64,
    pub beta: Vec<Rat>,
    /// Exponent `e` of the prefactor `y^e`.
    pub prefactor: Vec<Rat>,
    /// Coefficients of `P` in increasing powers of `θ`.
    pub p: Vec<Rat>,
    /// Coefficients of `Q` in increasing powers of `θ`.
    pub q: Vec<Rat>,
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_eval(p: &[Rat], x: &Rat) -> Rat {
    p.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
}

/// Stirling numbers of the second kind `S(i, j)`, `0 <= i, j <= n`.
fn stirling2(n: usize) -> Vec<Vec<Rat>> {
    let mut s = vec![vec![Rat::zero(); n + 1]; n + 1];
    s[0][0] = Rat::one();
    for i in 1..=n {
        for j in 1..=i {
            s[i][j] = &s[i - 1][j - 1] + rat(j as i64, 1) * &s[i - 1][j];
        }
    }
    s
}

impl ScalarOde {
    pub fn order(&self) -> usize {
        self.delta as usize
    }

    pub fn eval_p(&self, x: &Rat) -> Rat {
        poly_eval(&self.p, x)
    }

    pub fn eval_q(&self, x: &Rat) -> Rat {
        poly_eval(&self.q, x)
    }

    /// The nonzero finite singular point, where the leading coefficient
    /// `p_δ - t q_δ` vanishes.
    pub fn discriminant_point(&self) -> Rat {
        let d = self.order();
        &self.p[d] / &self.q[d]
    }

    /// `L = Σ_j a_j(t) (d/dt)^j` with `a_j` in increasing powers of `t`,
    /// from `θ^i = Σ_j S(i, j) t^j (d/dt)^j`.
    pub fn derivative_form(&self) -> Vec<Vec<Rat>> {
        let d = self.order();
        let s = stirling2(d);
        (0..=d)
            .map(|j| {
                let mut a = vec![Rat::zero(); j + 2];
                for i in j..=d {
                    a[j] += &s[i][j] * &self.p[i];
                    a[j + 1] -= &s[i][j] * &self.q[i];
                }
                a
            })
            .collect()
    }

    /// Local exponents at `t = 0`: the roots of `P`.
    pub fn exponents_at_zero(&self) -> Vec<Rat> {
        let d = self.delta;
        let e0 = &self.prefactor[0];
        let mut out = vec![Rat::zero()];
        out.extend((0..d - 1).map(|s| (rat(s, 1) - e0) / rat(d - 1, 1)));
        out
    }

    /// Local exponents at infinity: `φ ~ t^{-ρ}` with `Q(ρ) = 0`.
    pub fn exponents_at_infinity(&self) -> Vec<Rat> {
        let d = self.delta;
        (0..d).map(|s| (&self.prefactor[1] - rat(s, 1)) / rat(d, 1)).collect()
    }
}

/// Builds the scalar equation for toric degree `δ` in `2..=5` and checks
/// nonresonance of `β` for `{0, 1, δ}`.
pub fn ode_from_system(delta: i64, beta: &[Rat]) -> Result<ScalarOde> {
    if !(2..=5).contains(&delta) {
        return Err(Error::Unsupported(format!("scalar equation for toric degree {delta} (supported: 2..=5)")));
    }
    if beta.len() != 2 {
        return Err(Error::Dimension { expected: 2, got: beta.len() });
    }
    let cfg = MonomialCurveConfig::triple(delta)?;
    if let Some(w) = is_nonresonant(&cfg.configuration()?, beta)?.witness {
        return Err(Error::Resonance(format!("β is resonant for the vertex {:?}", w.facet.indices)));
    }
    let e0 = &beta[0] - &beta[1];
    let e1 = beta[1].clone();
    let mut p = vec![Rat::zero(), Rat::one()];
    for s in 0..delta - 1 {
        p = poly_mul(&p, &[&e0 - rat(s, 1), rat(delta - 1, 1)]);
    }
    let mut q = vec![Rat::one()];
    for s in 0..delta {
        q = poly_mul(&q, &[&e1 - rat(s, 1), rat(-delta, 1)]);
    }
    Ok(ScalarOde { delta, beta: beta.to_vec(), prefactor: vec![e0, e1, Rat::zero()], p, q })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OdeCertificate {
    /// Exponents `r` of the substituted series `t^r Σ c_s t^s`.
    pub exponents: Vec<Rat>,
    /// Number of residual coefficients checked per series.
    pub order: usize,
    pub checked: usize,
    /// `(series, power)` of the first nonzero residual.
    pub first_failure: Option<(usize, usize)>,
}

impl OdeCertificate {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none() && self.exponents.len() == self.checked / (self.order + 1)
    }
}

/// Substitutes the `δ` Γ-series of the triangulation `{[0,1], [1,δ]}`
/// (pulled back to `φ(t)`) into the equation and checks that the residual
/// vanishes up to `t^{r+order}`.
pub fn certify_ode(ode: &ScalarOde, order: usize) -> Result<OdeCertificate> {
    let d = ode.delta;
    let a = MonomialCurveConfig::triple(d)?.configuration()?;
    let (b1, b2) = (&ode.beta[0], &ode.beta[1]);
    let mut bases = vec![vec![b1 - b2, b2.clone(), Rat::zero()]];
    for k in 0..d - 1 {
        let v2 = (b2 - b1 + rat(k, 1)) / rat(d - 1, 1);
        let v1 = b1 - rat(k, 1) - &v2;
        bases.push(vec![rat(k, 1), v1, v2]);
    }
    let w = [d - 1, -d, 1];
    let radius = (2 * d as usize) * (order + 2);
    let mut cert = OdeCertificate { exponents: Vec::new(), order, checked: 0, first_failure: None };
    for (idx, v) in bases.iter().enumerate() {
        let series = gamma_series_at(a.matrix(), v, radius)?;
        let r = v[2].clone();
        let coeff = |s: i64| -> Result<Rat> {
            let u: Vec<i64> = w.iter().map(|x| x * s).collect();
            if !series.is_known(&u) {
                return Err(Error::Numeric(format!("series coefficient {s} outside the truncation")));
            }
            Ok(series.coefficient(&u))
        };
        for s in 0..=order as i64 {
            let x = &r + rat(s, 1);
            let res = ode.eval_p(&x) * coeff(s)? - ode.eval_q(&(&x - Rat::one())) * coeff(s - 1)?;
            cert.checked += 1;
            if !res.is_zero() && cert.first_failure.is_none() {
                cert.first_failure = Some((idx, s as usize));
            }
        }
        cert.exponents.push(r);
    }
    Ok(cert)
}
