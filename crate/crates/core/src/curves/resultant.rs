//! Principal determinants and discriminants of monomial curves through the
//! univariate Sylvester resultant of `f` and `z f'`.

use super::poly::MPoly;
use super::MonomialCurveConfig;
use crate::config::{multiplicity_table, PointConfiguration};
use crate::error::{Error, Result};
use crate::matrix::Int;
use crate::polytope::convex_hull;
use crate::secondary::secondary_polytope;

/// Largest toric degree expanded symbolically unless overridden.
pub const DEFAULT_BUDGET: i64 = 6;

fn check_budget(delta: i64, budget: i64) -> Result<()> {
    if delta > budget {
        return Err(Error::Budget(format!("toric degree {delta} exceeds the symbolic budget {budget}")));
    }
    Ok(())
}

/// Determinant by fraction-free Gaussian elimination with row pivoting.
pub fn bareiss_det(mut m: Vec<Vec<MPoly>>, nvars: usize) -> MPoly {
    let n = m.len();
    if n == 0 {
        return MPoly::one(nvars);
    }
    let mut negate = false;
    let mut prev = MPoly::one(nvars);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return MPoly::zero(nvars),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -&d
    } else {
        d
    }
}

/// Sylvester matrix of two univariate polynomials given by coefficient lists
/// in increasing degree.
fn sylvester(f: &[MPoly], g: &[MPoly], nvars: usize) -> Vec<Vec<MPoly>> {
    let (m, n) = (f.len() - 1, g.len() - 1);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for (poly, shifts) in [(f, n), (g, m)] {
        for s in 0..shifts {
            let mut row = vec![MPoly::zero(nvars); size];
            for (i, c) in poly.iter().rev().enumerate() {
                row[s + i] = c.clone();
            }
            rows.push(row);
        }
    }
    rows
}

/// `Res(f, z f')` for `f = Σ y_{vars[j]} z^{exponents[j]}`, in a ring of
/// `nvars` variables. The exponents may share a common factor.
pub(crate) fn sylvester_principal(exponents: &[i64], vars: &[usize], nvars: usize) -> MPoly {
    let delta = *exponents.last().expect("nonempty support") as usize;
    let mut f = vec![MPoly::zero(nvars); delta + 1];
    let mut g = vec![MPoly::zero(nvars); delta + 1];
    for (&e, &v) in exponents.iter().zip(vars) {
        f[e as usize] = MPoly::var(nvars, v);
        g[e as usize] = MPoly::var(nvars, v).scale(&Int::from(e));
    }
    bareiss_det(sylvester(&f, &g, nvars), nvars).normalized()
}

/// The principal determinant `E_A` in the variables `y_0, …, y_{m+1}`,
/// normalized to coprime integer coefficients and positive leading term.
pub fn principal_determinant_curve(cfg: &MonomialCurveConfig, budget: i64) -> Result<MPoly> {
    check_budget(cfg.delta(), budget)?;
    let n = cfg.len();
    Ok(sylvester_principal(cfg.exponents(), &(0..n).collect::<Vec<_>>(), n))
}

/// The non-coordinate squarefree factor of `E_A`: the `A`-discriminant, or
/// the constant 1 when `A` is defective.
pub fn discriminant_curve(cfg: &MonomialCurveConfig, budget: i64) -> Result<MPoly> {
    let e = principal_determinant_curve(cfg, budget)?;
    Ok(strip_monomial(&e).squarefree_part())
}

fn strip_monomial(p: &MPoly) -> MPoly {
    p.divide_monomial(&p.monomial_factor()).expect("monomial factor divides")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceExponent {
    /// Columns of the face.
    pub face: Vec<usize>,
    /// `m(A, Γ) = i(A, Γ) v(A, Γ)` from the lattice computation.
    pub expected: Int,
    /// Exponent read off the factorization of `E_A`; `None` when the face
    /// discriminant is trivial (defective face) and the exponent is invisible.
    pub found: Option<u32>,
}

#[derive(Clone, Debug)]
pub struct FactorizationReport {
    pub principal: MPoly,
    pub discriminant: MPoly,
    pub faces: Vec<FaceExponent>,
    /// Exponents of the coordinates `y_i` that are not vertices (all zero
    /// when the factorization is consistent).
    pub stray_coordinates: Vec<(usize, u32)>,
    pub newton_vertices: Vec<Vec<Int>>,
    pub secondary_vertices: Vec<Vec<Int>>,
}

impl FactorizationReport {
    pub fn multiplicities_match(&self) -> bool {
        self.stray_coordinates.is_empty()
            && self.faces.iter().all(|f| f.found.map_or(self.discriminant.is_constant(), |x| Int::from(x) == f.expected))
    }

    pub fn newton_matches_secondary(&self) -> bool {
        self.newton_vertices == self.secondary_vertices
    }

    pub fn holds(&self) -> bool {
        self.multiplicities_match() && self.newton_matches_secondary()
    }
}

/// Exponent `e` with `p = ± d^e`, if any.
fn exact_power(p: &MPoly, d: &MPoly) -> Option<u32> {
    let mut e = 0;
    let mut rest = p.normalized();
    while !rest.is_constant() {
        rest = rest.div_exact(d)?.normalized();
        e += 1;
    }
    Some(e)
}

fn newton_vertices(p: &MPoly) -> Result<Vec<Vec<Int>>> {
    let pts: Vec<Vec<Int>> = p.exponents().iter().map(|e| e.iter().map(|&x| Int::from(x)).collect()).collect();
    let hull = convex_hull(&pts)?;
    let mut v: Vec<Vec<Int>> = hull.vertices().into_iter().map(|i| pts[i].clone()).collect();
    v.sort();
    Ok(v)
}

/// Factors `E_A` into coordinate powers and a discriminant power, compares
/// the exponents with the multiplicities of the configuration, and compares
/// the Newton polytope of `E_A` with the secondary polytope.
pub fn verify_factorization(cfg: &MonomialCurveConfig, budget: i64) -> Result<FactorizationReport> {
    let principal = principal_determinant_curve(cfg, budget)?;
    let mono = principal.monomial_factor();
    let rest = strip_monomial(&principal);
    let discriminant = rest.squarefree_part();
    let a = cfg.configuration()?;
    let last = cfg.len() - 1;

    let mut faces = Vec::new();
    for rec in multiplicity_table(&a)? {
        let found = match rec.face.indices.as_slice() {
            [i] => Some(mono[*i]),
            _ if discriminant.is_constant() => None,
            _ => exact_power(&rest, &discriminant),
        };
        faces.push(FaceExponent { face: rec.face.indices.clone(), expected: rec.mult_m, found });
    }
    let stray_coordinates: Vec<(usize, u32)> =
        (1..last).filter(|&i| mono[i] > 0).map(|i| (i, mono[i])).collect();
    if discriminant.is_constant() && !rest.is_constant() {
        return Err(Error::Hypothesis("principal determinant has a non-monomial factor with trivial radical".into()));
    }
    let newton = newton_vertices(&principal)?;
    let secondary = secondary_vertices(&a)?;
    Ok(FactorizationReport {
        principal,
        discriminant,
        faces,
        stray_coordinates,
        newton_vertices: newton,
        secondary_vertices: secondary,
    })
}

#[derive(Clone, Debug)]
pub struct RestrictionReport {
    pub column: usize,
    /// Squarefree part of `E_A` restricted to `y_i = 0`.
    pub restricted_radical: MPoly,
    /// `E_{A_i}` in the variables of `A` (without `y_i`).
    pub deleted: MPoly,
    pub divides: bool,
}

/// Restricts `E_A` to the coordinate hyperplane `y_i = 0` of a non-vertex
/// column and checks that every irreducible factor divides `E_{A_i}`.
/// Distinct irreducible factors are coprime, so this is the same as the
/// squarefree part of the restriction dividing `E_{A_i}`.
pub fn check_restriction(cfg: &MonomialCurveConfig, i: usize, budget: i64) -> Result<RestrictionReport> {
    let n = cfg.len();
    if i >= n {
        return Err(Error::InvalidColumn(i));
    }
    if i == 0 || i == n - 1 {
        return Err(Error::Hypothesis(format!("column {i} is a vertex")));
    }
    let e = principal_determinant_curve(cfg, budget)?;
    let restricted = e.substitute_zero(i);
    if restricted.is_zero() {
        return Err(Error::Hypothesis("restriction of the principal determinant vanishes".into()));
    }
    let radical = restricted.squarefree_part();
    let (exps, vars): (Vec<i64>, Vec<usize>) =
        cfg.exponents().iter().enumerate().filter(|&(j, _)| j != i).map(|(j, &x)| (x, j)).unzip();
    let deleted = sylvester_principal(&exps, &vars, n);
    let divides = radical.divides(&deleted);
    Ok(RestrictionReport { column: i, restricted_radical: radical, deleted, divides })
}

/// Curve configurations on `{0, …, δ}` containing both endpoints, with
/// coprime exponents, for `1 <= δ <= max_delta`.
pub fn curve_family(max_delta: i64) -> Vec<MonomialCurveConfig> {
    let mut out = Vec::new();
    for delta in 1..=max_delta {
        let inner: Vec<i64> = (1..delta).collect();
        for mask in 0u32..(1 << inner.len()) {
            let mut e = vec![0];
            e.extend(inner.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &x)| x));
            e.push(delta);
            if let Ok(c) = MonomialCurveConfig::new(&e) {
                out.push(c);
            }
        }
    }
    out
}

/// Vertices of the secondary polytope, sorted.
pub fn secondary_vertices(a: &PointConfiguration) -> Result<Vec<Vec<Int>>> {
    let sec = secondary_polytope(a)?;
    let mut v: Vec<Vec<Int>> = sec.vertices().into_iter().map(|i| sec.points()[i].clone()).collect();
    v.sort();
    Ok(v)
}
