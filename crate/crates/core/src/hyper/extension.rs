//! Extension of a solution for `A_k` (column `k` deleted) to a solution for
//! `A`, as the power series `F = Σ_ℓ y_k^ℓ / ℓ! · ∂^{-ū}ψ` where `A u = 0` and
//! `u_k = ℓ`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::series::{antiderivative, apply_operator, KnownRegion, OperatorSpec, TruncatedSeries};
use super::{is_nonresonant, to_i64};
use crate::config::PointConfiguration;
use crate::error::{Error, Result};
use crate::lattice::{hermite_normal_form, integer_kernel};
use crate::matrix::{Int, IntMatrix, Rat};

#[derive(Clone, Debug)]
pub struct Extension {
    pub series: TruncatedSeries,
    pub column: usize,
    /// The representative `ū` used for each power `ℓ`, or `None` when no
    /// kernel vector has `u_k = ℓ` (the slice is then zero).
    pub representatives: Vec<Option<Vec<i64>>>,
}

/// One integer solution of `M x = b`, or `None`.
fn integer_solve(m: &IntMatrix, b: &[Int]) -> Option<Vec<Int>> {
    let (h, u) = hermite_normal_form(m);
    let mut x = vec![Int::zero(); m.cols()];
    for j in 0..h.cols() {
        let Some(p) = (0..h.rows()).find(|&r| !h[(r, j)].is_zero()) else { break };
        let partial: Int = (0..j).map(|i| &h[(p, i)] * &x[i]).sum();
        let rest = &b[p] - partial;
        if (&rest % &h[(p, j)]) != Int::zero() {
            return None;
        }
        x[j] = rest / &h[(p, j)];
    }
    if h.mul_vec(&x) != b {
        return None;
    }
    Some(u.mul_vec(&x))
}

/// Solutions `ū` of `A_k ū = -ℓ α_k` that only integrate (have positive
/// entries) in coordinates where `integrable` holds, sorted by 1-norm.
///
/// Integrating term by term is only the inverse of differentiation when no
/// integration constant is lost, i.e. when the exponents in that coordinate
/// are never integers. Returns `None` when the system has no integer
/// solution at all.
pub fn admissible_representatives(
    a_k: &IntMatrix,
    alpha_k: &[Int],
    ell: i64,
    integrable: &[bool],
    limit: usize,
) -> Result<Option<Vec<Vec<i64>>>> {
    let b: Vec<Int> = alpha_k.iter().map(|x| -x * Int::from(ell)).collect();
    let Some(p) = integer_solve(a_k, &b) else { return Ok(None) };
    let p = to_i64(&p)?;
    let kernel: Vec<Vec<i64>> = integer_kernel(a_k).columns().iter().map(|c| to_i64(c)).collect::<Result<_>>()?;
    let admissible = |u: &[i64]| u.iter().zip(integrable).all(|(&x, &ok)| x <= 0 || ok);
    let norm = |u: &[i64]| u.iter().map(|x| x.abs()).sum::<i64>();
    let search = |radius: i64| {
        let m = kernel.len();
        let mut found = Vec::new();
        let mut lambda = vec![-radius; m];
        loop {
            let u: Vec<i64> =
                (0..p.len()).map(|r| p[r] + kernel.iter().zip(&lambda).map(|(v, l)| v[r] * l).sum::<i64>()).collect();
            if admissible(&u) {
                found.push(u);
            }
            let mut i = 0;
            while i < m && lambda[i] == radius {
                lambda[i] = -radius;
                i += 1;
            }
            if i == m {
                break;
            }
            lambda[i] += 1;
        }
        found
    };
    let mut radius = 1;
    let max_radius = 16 + 4 * ell.abs();
    loop {
        let mut found = search(radius);
        if !found.is_empty() || radius >= max_radius {
            if !found.is_empty() {
                // a second, wider pass so that the minimum is not an artifact of the box
                found = search(2 * radius + 2);
            }
            found.sort_by(|x, y| norm(x).cmp(&norm(y)).then_with(|| x.cmp(y)));
            found.dedup();
            found.truncate(limit);
            return Ok(Some(found));
        }
        radius *= 2;
    }
}

/// `∂^{-ū}ψ`: integrate by `ū+` and differentiate by `ū-`.
pub fn shifted_solution(psi: &TruncatedSeries, rep: &[i64]) -> Result<TruncatedSeries> {
    let plus: Vec<i64> = rep.iter().map(|&x| x.max(0)).collect();
    let minus: Vec<i64> = rep.iter().map(|&x| (-x).max(0)).collect();
    let integrated = antiderivative(psi, &plus)?;
    apply_operator(&integrated, &OperatorSpec::Derivative(minus))
}

fn factorial(n: i64) -> Rat {
    (1..=n).fold(Rat::one(), |acc, t| acc * Rat::from_integer(Int::from(t)))
}

/// Extends a solution `ψ` of `H_{A_k}(β)` to a formal solution of `H_A(β)`
/// whose restriction to `y_k = 0` is `ψ`, keeping powers `y_k^ℓ` for
/// `ℓ <= order`.
///
/// Requires that column `k` is not a vertex, that deleting it does not shrink
/// `Z_A`, and that `β` is nonresonant.
pub fn extend_solution(
    psi: &TruncatedSeries,
    a: &PointConfiguration,
    k: usize,
    beta: &[Rat],
    order: usize,
) -> Result<Extension> {
    if k >= a.len() {
        return Err(Error::InvalidColumn(k));
    }
    if a.is_vertex(k) {
        return Err(Error::Hypothesis(format!("column {k} is a vertex of the Newton polytope")));
    }
    let a_k = a.remove(k)?;
    if a_k.lattice() != a.lattice() {
        return Err(Error::Hypothesis(format!("deleting column {k} changes the lattice Z_A")));
    }
    if psi.matrix() != a_k.matrix() {
        return Err(Error::Hypothesis("ψ is not a series for the configuration with column k deleted".into()));
    }
    if !psi.is_zero() && psi.beta() != beta {
        return Err(Error::Hypothesis("ψ does not have parameter β".into()));
    }
    if let Some(w) = is_nonresonant(a, beta)?.witness {
        return Err(Error::Resonance(format!("β is resonant for the facet on columns {:?}", w.facet.indices)));
    }
    let alpha_k = a.column(k);
    let integrable: Vec<bool> = psi.base().iter().map(|v| !v.is_integer()).collect();

    let mut terms = BTreeMap::new();
    let mut slices = Vec::with_capacity(order + 1);
    let mut representatives = Vec::with_capacity(order + 1);
    for ell in 0..=order as i64 {
        let reps = admissible_representatives(a_k.matrix(), &alpha_k, ell, &integrable, 1)?;
        let rep = match reps {
            None => {
                slices.push(None);
                representatives.push(None);
                continue;
            }
            Some(r) => r.into_iter().next().ok_or_else(|| {
                Error::Unsupported(format!("no representative for y_k^{ell} avoids integrating an integer exponent"))
            })?,
        };
        let psi_ell = shifted_solution(psi, &rep)?;
        let f = factorial(ell);
        for (u, c) in psi_ell.terms() {
            let mut full = u.clone();
            full.insert(k, ell);
            terms.insert(full, c / &f);
        }
        slices.push(Some(psi_ell.known().clone()));
        representatives.push(Some(rep));
    }
    let mut base = psi.base().to_vec();
    base.insert(k, Rat::zero());
    let known = KnownRegion::Slices { col: k, slices };
    let series = TruncatedSeries::from_terms(a.matrix().clone(), base, terms, psi.order(), known)?;
    Ok(Extension { series, column: k, representatives })
}

/// The restriction `y_k = 0`: keeps the terms with exponent zero in `y_k`.
pub fn restrict_to_hyperplane(f: &TruncatedSeries, k: usize) -> Result<TruncatedSeries> {
    let m = f.matrix();
    if k >= m.cols() {
        return Err(Error::InvalidColumn(k));
    }
    let bk = &f.base()[k];
    if !bk.is_integer() {
        return Err(Error::Unsupported("restriction of a series with non-integer exponent in y_k".into()));
    }
    let target = -bk.to_integer();
    let keep: Vec<usize> = (0..m.cols()).filter(|&j| j != k).collect();
    let terms: BTreeMap<Vec<i64>, Rat> = f
        .terms()
        .iter()
        .filter(|(u, _)| Int::from(u[k]) == target)
        .map(|(u, c)| {
            let mut v = u.clone();
            v.remove(k);
            (v, c.clone())
        })
        .collect();
    let mut base = f.base().to_vec();
    base.remove(k);
    let known = match f.known() {
        KnownRegion::All => KnownRegion::All,
        inner => KnownRegion::Restricted { inner: Box::new(inner.clone()), col: k },
    };
    TruncatedSeries::from_terms(m.select_cols(&keep), base, terms, f.order(), known)
}
