//! Truncated series `Σ c_u y^{v+u}` with exact coefficients, and the Weyl
//! algebra operators that act on them term by term.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{toric_kernel_basis, KernelBasis};
use crate::error::{Error, Result};
use crate::matrix::{rat, rat_from_int, rat_solve, Int, IntMatrix, Rat};

/// The offsets at which a truncated object agrees with the infinite series
/// it approximates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KnownRegion {
    /// The object is exact (finitely supported).
    All,
    /// A truncated series over the kernel of `matrix`: coefficients off the
    /// kernel are zero, and kernel points of 1-norm at most `radius` are stored.
    Ball { matrix: IntMatrix, radius: i64 },
    /// Known at `z` iff `inner` is known at `z + s` for every shift `s`.
    Shifted { inner: Box<KnownRegion>, shifts: Vec<Vec<i64>> },
    /// Known where both are known.
    Both(Box<KnownRegion>, Box<KnownRegion>),
    /// A power series in the coordinate `col`: slice `ℓ` is the region of the
    /// coefficient of `y_col^ℓ`. `None` marks an exactly zero slice; negative
    /// powers are zero and powers beyond the last slice are unknown.
    Slices { col: usize, slices: Vec<Option<KnownRegion>> },
    /// Known at `z` iff `inner` is known at `z` with a zero inserted at `col`.
    Restricted { inner: Box<KnownRegion>, col: usize },
}

fn insert_at(z: &[i64], col: usize, value: i64) -> Vec<i64> {
    let mut out = z.to_vec();
    out.insert(col, value);
    out
}

impl KnownRegion {
    pub fn contains(&self, z: &[i64]) -> bool {
        match self {
            KnownRegion::All => true,
            KnownRegion::Ball { matrix, radius } => {
                let zi: Vec<Int> = z.iter().map(|&x| Int::from(x)).collect();
                let in_kernel = matrix.mul_vec(&zi).iter().all(|x| x.is_zero());
                !in_kernel || z.iter().map(|x| x.abs()).sum::<i64>() <= *radius
            }
            KnownRegion::Shifted { inner, shifts } => {
                shifts.iter().all(|s| inner.contains(&z.iter().zip(s).map(|(a, b)| a + b).collect::<Vec<_>>()))
            }
            KnownRegion::Both(a, b) => a.contains(z) && b.contains(z),
            KnownRegion::Slices { col, slices } => {
                let ell = z[*col];
                if ell < 0 {
                    return true;
                }
                match slices.get(ell as usize) {
                    None => false,
                    Some(None) => true,
                    Some(Some(r)) => {
                        let mut rest = z.to_vec();
                        rest.remove(*col);
                        r.contains(&rest)
                    }
                }
            }
            KnownRegion::Restricted { inner, col } => inner.contains(&insert_at(z, *col, 0)),
        }
    }

    fn shifted(self, shifts: Vec<Vec<i64>>) -> KnownRegion {
        match self {
            KnownRegion::All => KnownRegion::All,
            inner => KnownRegion::Shifted { inner: Box::new(inner), shifts },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    matrix: IntMatrix,
    base: Vec<Rat>,
    terms: BTreeMap<Vec<i64>, Rat>,
    order: usize,
    known: KnownRegion,
}

impl TruncatedSeries {
    /// Builds a series from explicit terms; zero coefficients are dropped.
    pub fn from_terms(
        matrix: IntMatrix,
        base: Vec<Rat>,
        terms: BTreeMap<Vec<i64>, Rat>,
        order: usize,
        known: KnownRegion,
    ) -> Result<Self> {
        if base.len() != matrix.cols() {
            return Err(Error::Dimension { expected: matrix.cols(), got: base.len() });
        }
        if let Some(u) = terms.keys().find(|u| u.len() != matrix.cols()) {
            return Err(Error::Dimension { expected: matrix.cols(), got: u.len() });
        }
        let terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(TruncatedSeries { matrix, base, terms, order, known })
    }

    pub fn zero(matrix: IntMatrix, base: Vec<Rat>) -> Self {
        TruncatedSeries { matrix, base, terms: BTreeMap::new(), order: 0, known: KnownRegion::All }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// The exponent `v` with `A v = β`.
    pub fn base(&self) -> &[Rat] {
        &self.base
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, Rat> {
        &self.terms
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn known(&self) -> &KnownRegion {
        &self.known
    }

    pub fn is_known(&self, u: &[i64]) -> bool {
        self.known.contains(u)
    }

    pub fn coefficient(&self, u: &[i64]) -> Rat {
        self.terms.get(u).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `A v`, the parameter of the series when its offsets lie in the kernel.
    pub fn beta(&self) -> Vec<Rat> {
        self.matrix.to_rat_rows().iter().map(|r| r.iter().zip(&self.base).map(|(a, b)| a * b).sum()).collect()
    }

    /// The exponent `v + u` of a term.
    pub fn exponent(&self, u: &[i64]) -> Vec<Rat> {
        self.base.iter().zip(u).map(|(v, &x)| v + rat(x, 1)).collect()
    }

    pub fn scale(&self, c: &Rat) -> TruncatedSeries {
        let terms = self.terms.iter().map(|(u, x)| (u.clone(), x * c)).filter(|(_, x)| !x.is_zero()).collect();
        TruncatedSeries { terms, ..self.clone() }
    }

    /// Sum of two series with the same matrix and base exponent.
    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        if self.matrix != other.matrix || self.base != other.base {
            return Err(Error::Unsupported("adding series with different base exponents".into()));
        }
        let mut terms = self.terms.clone();
        for (u, c) in &other.terms {
            *terms.entry(u.clone()).or_insert_with(Rat::zero) += c;
        }
        terms.retain(|_, c| !c.is_zero());
        let known = if self.known == other.known {
            self.known.clone()
        } else {
            KnownRegion::Both(Box::new(self.known.clone()), Box::new(other.known.clone()))
        };
        Ok(TruncatedSeries { terms, order: self.order.max(other.order), known, ..self.clone() })
    }

    /// Replaces one coefficient, keeping the known region.
    pub fn with_coefficient(&self, u: Vec<i64>, c: Rat) -> TruncatedSeries {
        let mut out = self.clone();
        if c.is_zero() {
            out.terms.remove(&u);
        } else {
            out.terms.insert(u, c);
        }
        out
    }
}

/// `c_u / c_0` for the Γ-series in one coordinate: `Γ(v+1) / Γ(v+t+1)`.
fn gamma_ratio(v: &Rat, t: i64) -> Option<Rat> {
    let mut out = Rat::one();
    if t >= 0 {
        for s in 1..=t {
            let f = v + rat(s, 1);
            if f.is_zero() {
                return None;
            }
            out /= f;
        }
    } else {
        for s in 0..(-t) {
            out *= v - rat(s, 1);
        }
    }
    Some(out)
}

/// Kernel points of 1-norm at most `radius`, via the echelon shape of the
/// canonical kernel basis: each basis vector has a pivot row below the
/// pivots of the previous ones, so the coefficients can be bounded one at a
/// time.
fn kernel_ball(basis: &KernelBasis, k: usize, radius: i64) -> Vec<Vec<i64>> {
    let m = basis.rank();
    let pivots: Vec<usize> = basis.vectors.iter().map(|v| v.iter().position(|&x| x != 0).expect("nonzero basis vector")).collect();
    let mut out = Vec::new();
    let mut lambda = vec![0i64; m];
    fn rec(
        j: usize,
        basis: &KernelBasis,
        pivots: &[usize],
        lambda: &mut Vec<i64>,
        k: usize,
        radius: i64,
        out: &mut Vec<Vec<i64>>,
    ) {
        if j == pivots.len() {
            let u: Vec<i64> =
                (0..k).map(|r| basis.vectors.iter().zip(lambda.iter()).map(|(v, l)| v[r] * l).sum()).collect();
            if u.iter().map(|x| x.abs()).sum::<i64>() <= radius {
                out.push(u);
            }
            return;
        }
        let p = pivots[j];
        let partial: i64 = (0..j).map(|i| basis.vectors[i][p] * lambda[i]).sum();
        let piv = basis.vectors[j][p];
        // need |partial + piv * l| <= radius
        let lo = num_integer::Integer::div_ceil(&(-radius - partial), &piv.abs());
        let hi = num_integer::Integer::div_floor(&(radius - partial), &piv.abs());
        for l in lo..=hi {
            lambda[j] = if piv > 0 { l } else { -l };
            rec(j + 1, basis, pivots, lambda, k, radius, out);
        }
        lambda[j] = 0;
    }
    rec(0, basis, &pivots, &mut lambda, k, radius, &mut out);
    out.sort();
    out
}

/// The Γ-series `Σ_u Π_j Γ(v_j+1)/Γ(v_j+u_j+1) y^{v+u}` over kernel points of
/// 1-norm at most `order`, normalized so that `c_0 = 1`.
pub fn gamma_series_at(matrix: &IntMatrix, v: &[Rat], order: usize) -> Result<TruncatedSeries> {
    if v.len() != matrix.cols() {
        return Err(Error::Dimension { expected: matrix.cols(), got: v.len() });
    }
    let basis = toric_kernel_basis(matrix)?;
    let radius = order as i64;
    let mut terms = BTreeMap::new();
    for u in kernel_ball(&basis, matrix.cols(), radius) {
        let mut c = Rat::one();
        for (vj, &uj) in v.iter().zip(&u) {
            match gamma_ratio(vj, uj) {
                Some(r) => c *= r,
                None => {
                    let exps: Vec<String> = v.iter().zip(&u).map(|(a, &b)| (a + rat(b, 1)).to_string()).collect();
                    return Err(Error::Resonance(format!(
                        "exponent product vanishes at the integer translate u = {u:?} (exponent [{}])",
                        exps.join(", ")
                    )));
                }
            }
            if c.is_zero() {
                break;
            }
        }
        if !c.is_zero() {
            terms.insert(u, c);
        }
    }
    let known = KnownRegion::Ball { matrix: matrix.clone(), radius };
    TruncatedSeries::from_terms(matrix.clone(), v.to_vec(), terms, order, known)
}

/// Γ-series attached to the simplex `sigma`: `v` solves `A v = β` with
/// `v_j = 0` off `sigma`.
pub fn gamma_series(matrix: &IntMatrix, beta: &[Rat], sigma: &[usize], order: usize) -> Result<TruncatedSeries> {
    if beta.len() != matrix.rows() {
        return Err(Error::Dimension { expected: matrix.rows(), got: beta.len() });
    }
    if let Some(&j) = sigma.iter().find(|&&j| j >= matrix.cols()) {
        return Err(Error::InvalidColumn(j));
    }
    let sub = matrix.select_cols(sigma);
    if sub.rank() != sigma.len() || sigma.len() != matrix.rank() {
        return Err(Error::Hypothesis(format!("columns {sigma:?} do not form a maximal simplex")));
    }
    let rows: Vec<Vec<Rat>> = sub.to_rat_rows();
    let vs = rat_solve(&rows, beta).map_err(|_| Error::Hypothesis("β is outside the span of the configuration".into()))?;
    let mut v = vec![Rat::zero(); matrix.cols()];
    for (&j, x) in sigma.iter().zip(vs) {
        v[j] = x;
    }
    gamma_series_at(matrix, &v, order)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OperatorSpec {
    /// `∂^{u+} - ∂^{u-}`.
    Box(Vec<i64>),
    /// `Σ_j a_ij y_j ∂_j - β_i`.
    Euler { row: usize, beta: Rat },
    /// `∂^γ` for `γ ∈ N^k`.
    Derivative(Vec<i64>),
}

/// Falling factorial `e (e-1) … (e-n+1)`.
fn falling(e: &Rat, n: i64) -> Rat {
    (0..n).fold(Rat::one(), |acc, s| acc * (e - rat(s, 1)))
}

fn derivative_raw(s: &TruncatedSeries, gamma: &[i64]) -> BTreeMap<Vec<i64>, Rat> {
    let mut out = BTreeMap::new();
    for (u, c) in &s.terms {
        let e = s.exponent(u);
        let f = e.iter().zip(gamma).fold(Rat::one(), |acc, (x, &g)| acc * falling(x, g));
        let z: Vec<i64> = u.iter().zip(gamma).map(|(a, b)| a - b).collect();
        *out.entry(z).or_insert_with(Rat::zero) += c * f;
    }
    out
}

fn positive_part(u: &[i64]) -> Vec<i64> {
    u.iter().map(|&x| x.max(0)).collect()
}

fn negative_part(u: &[i64]) -> Vec<i64> {
    u.iter().map(|&x| (-x).max(0)).collect()
}

fn validate(s: &TruncatedSeries, op: &OperatorSpec) -> Result<()> {
    let k = s.matrix.cols();
    match op {
        OperatorSpec::Box(u) => {
            if u.len() != k {
                return Err(Error::Dimension { expected: k, got: u.len() });
            }
            let ui: Vec<Int> = u.iter().map(|&x| Int::from(x)).collect();
            if !s.matrix.mul_vec(&ui).iter().all(|x| x.is_zero()) {
                return Err(Error::Hypothesis(format!("box vector {u:?} is not in the kernel")));
            }
        }
        OperatorSpec::Euler { row, .. } => {
            if *row >= s.matrix.rows() {
                return Err(Error::InvalidColumn(*row));
            }
        }
        OperatorSpec::Derivative(g) => {
            if g.len() != k {
                return Err(Error::Dimension { expected: k, got: g.len() });
            }
            if g.iter().any(|&x| x < 0) {
                return Err(Error::Hypothesis("derivative orders must be nonnegative".into()));
            }
        }
    }
    Ok(())
}

/// Applies the operator and keeps zero coefficients, so that every offset
/// reached by some stored term is reported. Returns the image terms and the
/// shifts `s` such that the image at `z` depends on the input at `z + s`.
fn apply_raw(s: &TruncatedSeries, op: &OperatorSpec) -> Result<(BTreeMap<Vec<i64>, Rat>, Vec<Vec<i64>>)> {
    validate(s, op)?;
    Ok(match op {
        OperatorSpec::Euler { row, beta } => {
            let a = s.matrix.row(*row);
            let terms = s
                .terms
                .iter()
                .map(|(u, c)| {
                    let e = s.exponent(u);
                    let m: Rat = a.iter().zip(&e).map(|(x, y)| rat_from_int(x) * y).sum::<Rat>() - beta;
                    (u.clone(), c * m)
                })
                .collect();
            (terms, vec![vec![0; s.matrix.cols()]])
        }
        OperatorSpec::Derivative(g) => (derivative_raw(s, g), vec![g.clone()]),
        OperatorSpec::Box(u) => {
            let (p, n) = (positive_part(u), negative_part(u));
            let mut terms = derivative_raw(s, &p);
            for (z, c) in derivative_raw(s, &n) {
                *terms.entry(z).or_insert_with(Rat::zero) -= c;
            }
            (terms, vec![p, n])
        }
    })
}

/// Exact term-wise action of a Weyl algebra operator. The base exponent is
/// kept; derivatives shift the offsets.
pub fn apply_operator(s: &TruncatedSeries, op: &OperatorSpec) -> Result<TruncatedSeries> {
    let (terms, shifts) = apply_raw(s, op)?;
    let known = s.known.clone().shifted(shifts);
    TruncatedSeries::from_terms(s.matrix.clone(), s.base.clone(), terms, s.order, known)
}

/// Term-wise inverse of `∂^γ`: `y^e -> y^{e+γ} / ((e+1)…(e+γ))`.
pub fn antiderivative(s: &TruncatedSeries, gamma: &[i64]) -> Result<TruncatedSeries> {
    validate(s, &OperatorSpec::Derivative(gamma.to_vec()))?;
    let mut terms = BTreeMap::new();
    for (u, c) in &s.terms {
        let e = s.exponent(u);
        let mut d = Rat::one();
        for (x, &g) in e.iter().zip(gamma) {
            for t in 1..=g {
                d *= x + rat(t, 1);
            }
        }
        if d.is_zero() {
            return Err(Error::Resonance(format!("antiderivative divides by zero at offset {u:?}")));
        }
        let z: Vec<i64> = u.iter().zip(gamma).map(|(a, b)| a + b).collect();
        terms.insert(z, c / d);
    }
    let back: Vec<i64> = gamma.iter().map(|g| -g).collect();
    let known = s.known.clone().shifted(vec![back]);
    TruncatedSeries::from_terms(s.matrix.clone(), s.base.clone(), terms, s.order, known)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnihilationFailure {
    pub operator: OperatorSpec,
    pub offset: Vec<i64>,
    pub value: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnihilationReport {
    /// Fully determined image coefficients that vanish.
    pub vanishing: usize,
    /// Image coefficients with a preimage outside the stored region.
    pub indeterminate: usize,
    pub failures: Vec<AnnihilationFailure>,
}

impl AnnihilationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Applies every Euler operator `E_i - β_i` and the box operators of the
/// kernel basis (and of pairwise sums and differences), checking that every
/// fully determined coefficient of each image vanishes.
pub fn annihilation_check(s: &TruncatedSeries, beta: &[Rat]) -> Result<AnnihilationReport> {
    if beta.len() != s.matrix.rows() {
        return Err(Error::Dimension { expected: s.matrix.rows(), got: beta.len() });
    }
    let mut ops: Vec<OperatorSpec> =
        beta.iter().enumerate().map(|(row, b)| OperatorSpec::Euler { row, beta: b.clone() }).collect();
    let basis = toric_kernel_basis(&s.matrix)?.vectors;
    for (i, w) in basis.iter().enumerate() {
        ops.push(OperatorSpec::Box(w.clone()));
        for w2 in &basis[i + 1..] {
            ops.push(OperatorSpec::Box(w.iter().zip(w2).map(|(a, b)| a + b).collect()));
            ops.push(OperatorSpec::Box(w.iter().zip(w2).map(|(a, b)| a - b).collect()));
        }
    }
    let mut report = AnnihilationReport { vanishing: 0, indeterminate: 0, failures: Vec::new() };
    for op in ops {
        let (terms, shifts) = apply_raw(s, &op)?;
        let region = s.known.clone().shifted(shifts);
        for (z, c) in terms {
            if !region.contains(&z) {
                report.indeterminate += 1;
            } else if c.is_zero() {
                report.vanishing += 1;
            } else {
                report.failures.push(AnnihilationFailure { operator: op.clone(), offset: z, value: c });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PointConfiguration;
    use proptest::prelude::*;

    fn cubic() -> IntMatrix {
        PointConfiguration::curve(&[0, 1, 3]).unwrap().matrix().clone()
    }

    fn half() -> Vec<Rat> {
        vec![rat(0, 1), rat(1, 2)]
    }

    /// Replays the contiguity recurrence from `c_0 = 1` outward along the
    /// generator `w` and its negative, independently of the closed form.
    fn contiguity_replay(v: &[Rat], w: &[i64], steps: i64) -> BTreeMap<Vec<i64>, Rat> {
        let mut out = BTreeMap::new();
        out.insert(vec![0; v.len()], Rat::one());
        for dir in [1i64, -1] {
            let step: Vec<i64> = w.iter().map(|x| x * dir).collect();
            let mut u = vec![0i64; v.len()];
            let mut c = Rat::one();
            for _ in 0..steps {
                // c_{u+w} Π_{w_j>0} Π_{t=1..w_j} (v_j+u_j+t) = c_u Π_{w_j<0} Π_{t=1..-w_j} (v_j+u_j+t-(-w_j))
                let mut num = Rat::one();
                let mut den = Rat::one();
                for j in 0..v.len() {
                    let e = &v[j] + rat(u[j], 1);
                    if step[j] > 0 {
                        for t in 1..=step[j] {
                            den *= &e + rat(t, 1);
                        }
                    } else {
                        for t in 0..(-step[j]) {
                            num *= &e - rat(t, 1);
                        }
                    }
                }
                c = c * num / den;
                for j in 0..v.len() {
                    u[j] += step[j];
                }
                if !c.is_zero() {
                    out.insert(u.clone(), c.clone());
                }
            }
        }
        out
    }

    #[test]
    fn cubic_gamma_series_matches_recurrence() {
        let s = gamma_series(&cubic(), &half(), &[0, 2], 24).unwrap();
        assert_eq!(s.base(), &[rat(-1, 6), rat(0, 1), rat(1, 6)]);
        let replay = contiguity_replay(s.base(), &[2, -3, 1], 4);
        assert_eq!(s.terms(), &replay);
        assert_eq!(s.beta(), half());
    }

    #[test]
    fn simplex_series_is_single_term() {
        let m = IntMatrix::from_i64_rows(&[&[1, 1], &[0, 1]]);
        let s = gamma_series(&m, &half(), &[0, 1], 5).unwrap();
        assert_eq!(s.terms().len(), 1);
        assert_eq!(s.coefficient(&[0, 0]), Rat::one());
        assert_eq!(s.base(), &[rat(-1, 2), rat(1, 2)]);
    }

    #[test]
    fn resonant_parameter_is_detected() {
        // β = (-1, 0) on the simplex {0, 3} gives v = (-1, 0, 0), and the
        // product (v_0 + 1) vanishes at the translate u = (2, -3, 1).
        let err = gamma_series(&cubic(), &[rat(-1, 1), rat(0, 1)], &[0, 2], 6).unwrap_err();
        assert!(matches!(err, Error::Resonance(_)));
    }

    #[test]
    fn gamma_series_is_annihilated() {
        let s = gamma_series(&cubic(), &half(), &[0, 2], 12).unwrap();
        let rep = annihilation_check(&s, &half()).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert!(rep.vanishing > 0 && rep.indeterminate > 0);
        for op in [OperatorSpec::Euler { row: 0, beta: rat(0, 1) }, OperatorSpec::Euler { row: 1, beta: rat(1, 2) }] {
            assert!(apply_operator(&s, &op).unwrap().is_zero());
        }
    }

    #[test]
    fn perturbed_series_fails_at_located_term() {
        let s = gamma_series(&cubic(), &half(), &[0, 2], 12).unwrap();
        let bumped = s.with_coefficient(vec![0, 0, 0], rat(2, 1));
        let rep = annihilation_check(&bumped, &half()).unwrap();
        assert!(!rep.passed());
        assert!(rep.failures.iter().any(|f| f.offset == vec![-2, 0, -1] || f.offset == vec![0, -3, 0]));
    }

    #[test]
    fn zero_series_passes() {
        let z = TruncatedSeries::zero(cubic(), vec![rat(0, 1); 3]);
        assert!(annihilation_check(&z, &half()).unwrap().passed());
    }

    #[test]
    fn box_on_non_solution_is_nonzero() {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0, 0, 0], Rat::one());
        let s = TruncatedSeries::from_terms(cubic(), vec![rat(1, 3), rat(1, 5), rat(1, 7)], terms, 0, KnownRegion::All)
            .unwrap();
        let img = apply_operator(&s, &OperatorSpec::Box(vec![2, -3, 1])).unwrap();
        assert!(!img.is_zero());
    }

    #[test]
    fn single_term_antiderivative() {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0, 0, 0], Rat::one());
        let s =
            TruncatedSeries::from_terms(cubic(), vec![rat(1, 3), rat(0, 1), rat(0, 1)], terms, 0, KnownRegion::All).unwrap();
        let a = antiderivative(&s, &[1, 0, 0]).unwrap();
        assert_eq!(a.terms().len(), 1);
        assert_eq!(a.coefficient(&[1, 0, 0]), rat(3, 4));
    }

    #[test]
    fn kernel_shift_acts_as_identity() {
        // ∂^u with A u = 0: differentiate by u- then integrate by u+, on a
        // series whose integrated coordinates carry non-integer exponents.
        let s = gamma_series(&cubic(), &half(), &[0, 2], 24).unwrap();
        let u = [2i64, -3, 1];
        let d = apply_operator(&s, &OperatorSpec::Derivative(negative_part(&u))).unwrap();
        let back = antiderivative(&d, &positive_part(&u)).unwrap();
        let mut compared = 0;
        for (z, c) in s.terms() {
            if back.is_known(z) {
                assert_eq!(&back.coefficient(z), c);
                compared += 1;
            }
        }
        for (z, c) in back.terms() {
            if s.is_known(z) && back.is_known(z) {
                assert_eq!(&s.coefficient(z), c);
            }
        }
        assert!(compared > 3);
    }

    fn random_series() -> impl Strategy<Value = TruncatedSeries> {
        let offsets = proptest::collection::btree_map(
            proptest::collection::vec(-3i64..=3, 3),
            (-5i64..=5, 1i64..=4).prop_map(|(p, q)| rat(p, q)),
            0..8,
        );
        let base = proptest::collection::vec((1i64..=9, 2i64..=5).prop_map(|(p, q)| rat(2 * p + 1, 2 * q)), 3);
        (offsets, base).prop_map(|(t, b)| TruncatedSeries::from_terms(cubic(), b, t, 3, KnownRegion::All).unwrap())
    }

    proptest! {
        #[test]
        fn derivative_antiderivative_roundtrip(s in random_series(), g in proptest::collection::vec(0i64..=3, 3)) {
            let up = antiderivative(&s, &g).unwrap();
            let down = apply_operator(&up, &OperatorSpec::Derivative(g.clone())).unwrap();
            prop_assert_eq!(down.terms(), s.terms());
            let d = apply_operator(&s, &OperatorSpec::Derivative(g.clone())).unwrap();
            let back = antiderivative(&d, &g).unwrap();
            prop_assert_eq!(back.terms(), s.terms());
        }

        #[test]
        fn euler_kills_series_with_matching_exponents(order in 0usize..10, p in 1i64..7, q in 2i64..9) {
            let beta = vec![rat(0, 1), rat(2 * p + 1, 2 * q)];
            if let Ok(s) = gamma_series(&cubic(), &beta, &[0, 2], order) {
                for row in 0..2 {
                    let op = OperatorSpec::Euler { row, beta: beta[row].clone() };
                    prop_assert!(apply_operator(&s, &op).unwrap().is_zero());
                }
                prop_assert!(annihilation_check(&s, &beta).unwrap().passed());
            }
        }
    }
}
