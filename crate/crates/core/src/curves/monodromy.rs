//! Monodromy of the reduced curve equation: the δ = 3 generators as printed
//! in the literature, and numerical analytic continuation by Taylor steps.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use super::ode::{ode_from_system, ScalarOde};
use crate::error::{Error, Result};
use crate::matrix::Rat;

type C = Complex64;

/// A dense square complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![C::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = C::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "square matrix");
        CMatrix { n, data: rows.concat() }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<C>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn mul(&self, o: &CMatrix) -> CMatrix {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                for j in 0..n {
                    out.data[i * n + j] += a * o.get(k, j);
                }
            }
        }
        out
    }

    pub fn scale(&self, c: C) -> CMatrix {
        CMatrix { n: self.n, data: self.data.iter().map(|x| x * c).collect() }
    }

    /// Gauss–Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<CMatrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| a.get(x, col).norm().total_cmp(&a.get(y, col).norm()))
                .expect("nonempty range");
            if a.get(piv, col).norm() < 1e-300 {
                return Err(Error::Numeric("singular monodromy matrix".into()));
            }
            for j in 0..n {
                a.data.swap(col * n + j, piv * n + j);
                inv.data.swap(col * n + j, piv * n + j);
            }
            let p = a.get(col, col);
            for j in 0..n {
                a.data[col * n + j] /= p;
                inv.data[col * n + j] /= p;
            }
            for i in 0..n {
                if i != col {
                    let f = a.get(i, col);
                    for j in 0..n {
                        let (x, y) = (a.get(col, j), inv.get(col, j));
                        a.data[i * n + j] -= f * x;
                        inv.data[i * n + j] -= f * y;
                    }
                }
            }
        }
        Ok(inv)
    }

    pub fn trace(&self) -> C {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs_diff(&self, o: &CMatrix) -> f64 {
        self.data.iter().zip(&o.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.rows() {
            let cells: Vec<String> = r.iter().map(|z| format!("{:.6}{:+.6}i", z.re, z.im)).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Coefficients `c_0, …, c_n` of `det(λ I - M) = Σ c_i λ^i` by the
/// Faddeev–LeVerrier recursion.
pub fn charpoly(m: &CMatrix) -> Vec<C> {
    let n = m.size();
    let mut c = vec![C::zero(); n + 1];
    c[n] = C::new(1.0, 0.0);
    let mut mk = CMatrix::zeros(n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = m.mul(&mk);
        for i in 0..n {
            let v = next.get(i, i) + c[n - k + 1];
            next.set(i, i, v);
        }
        mk = next;
        c[n - k] = -m.mul(&mk).trace() / (k as f64);
    }
    c
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonodromyInvariants {
    pub trace: C,
    pub det: C,
    /// `c_0, …, c_n` of the characteristic polynomial.
    pub charpoly: Vec<C>,
}

impl MonodromyInvariants {
    pub fn of(m: &CMatrix) -> Self {
        let cp = charpoly(m);
        let n = m.size();
        let det = if n.is_multiple_of(2) { cp[0] } else { -cp[0] };
        MonodromyInvariants { trace: m.trace(), det, charpoly: cp }
    }

    pub fn max_diff(&self, o: &MonodromyInvariants) -> f64 {
        self.charpoly.iter().zip(&o.charpoly).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

/// `exp(2πi x)`, reducing `x` modulo 1 exactly first.
pub(crate) fn root_of_unity(x: &Rat) -> C {
    let frac = x - x.floor();
    let f = frac.to_f64().expect("finite rational");
    C::from_polar(1.0, 2.0 * PI * f)
}

#[derive(Clone, Debug)]
pub struct MonodromyGenerators {
    pub delta: i64,
    pub beta: Vec<Rat>,
    pub matrices: Vec<CMatrix>,
    /// Entry-wise accuracy of the matrices.
    pub tolerance: f64,
}

impl MonodromyGenerators {
    /// Characteristic polynomials of each generator, then of the pairwise
    /// products `g_i g_j` (`i < j`), then of the product of all generators.
    pub fn invariants(&self) -> Vec<MonodromyInvariants> {
        let g = &self.matrices;
        let mut out: Vec<MonodromyInvariants> = g.iter().map(MonodromyInvariants::of).collect();
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                out.push(MonodromyInvariants::of(&g[i].mul(&g[j])));
            }
        }
        if let Some((first, rest)) = g.split_first() {
            out.push(MonodromyInvariants::of(&rest.iter().fold(first.clone(), |acc, m| acc.mul(m))));
        }
        out
    }
}

/// The three generators for toric degree 3, transcribed entry by entry:
/// `e(β_1) I`, the cyclic matrix with entries `1, e(β_2 - β_1), e(β_1)`, and
/// the matrix with first row `(-1, 1, 1)` and diagonal `(-1, e(β_1), e(β_1))`,
/// where `e(x) = exp(2πi x)`.
pub fn beukers_generators(delta: i64, beta: &[Rat]) -> Result<MonodromyGenerators> {
    if delta != 3 {
        return Err(Error::Unsupported(format!("closed-form generators are only available for δ = 3, not {delta}")));
    }
    if beta.len() != 2 {
        return Err(Error::Dimension { expected: 2, got: beta.len() });
    }
    let (z, one) = (C::zero(), C::new(1.0, 0.0));
    let e1 = root_of_unity(&beta[0]);
    let e21 = root_of_unity(&(&beta[1] - &beta[0]));
    let g1 = CMatrix::from_rows(&[vec![e1, z, z], vec![z, e1, z], vec![z, z, e1]]);
    let g2 = CMatrix::from_rows(&[vec![z, one, z], vec![z, z, e21], vec![e1, z, z]]);
    let g3 = CMatrix::from_rows(&[vec![-one, one, one], vec![z, e1, z], vec![z, z, e1]]);
    Ok(MonodromyGenerators { delta, beta: beta.to_vec(), matrices: vec![g1, g2, g3], tolerance: 1e-15 })
}

/// Step control for the Taylor integrator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepPolicy {
    /// Step length as a fraction of the distance to the nearest singularity.
    pub radius_fraction: f64,
    /// Local error target per step.
    pub tolerance: f64,
    /// Number of Taylor coefficients.
    pub terms: usize,
    /// Halvings allowed before reporting step-size underflow.
    pub max_halvings: usize,
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy { radius_fraction: 0.5, tolerance: 1e-12, terms: 60, max_halvings: 40 }
    }
}

/// Loops based at the common base point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LoopKind {
    /// Counterclockwise around `t = 0` only.
    Origin,
    /// Counterclockwise around the discriminant point only.
    Discriminant,
    /// Counterclockwise around both finite singular points.
    Infinity,
    /// Out and back along a segment; homotopically trivial.
    Trivial,
}

impl LoopKind {
    pub fn name(&self) -> &'static str {
        match self {
            LoopKind::Origin => "origin",
            LoopKind::Discriminant => "discriminant",
            LoopKind::Infinity => "infinity",
            LoopKind::Trivial => "trivial",
        }
    }
}

struct Integrator {
    /// `a_j(t)` with complex coefficients in increasing powers of `t`.
    coeffs: Vec<Vec<C>>,
    singular: Vec<C>,
    policy: StepPolicy,
    steps: usize,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn falling(x: usize, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (x - i) as f64)
}

impl Integrator {
    fn new(ode: &ScalarOde, policy: StepPolicy) -> Self {
        let coeffs: Vec<Vec<C>> = ode
            .derivative_form()
            .iter()
            .map(|a| a.iter().map(|r| C::new(r.to_f64().expect("finite"), 0.0)).collect())
            .collect();
        let td = ode.discriminant_point().to_f64().expect("finite");
        Integrator { coeffs, singular: vec![C::zero(), C::new(td, 0.0)], policy, steps: 0 }
    }

    fn distance_to_singularity(&self, t: C) -> f64 {
        self.singular.iter().map(|s| (t - s).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Taylor coefficients at `tc` of the solution with the given state
    /// `(φ, φ', …, φ^{(δ-1)})`.
    fn taylor(&self, tc: C, state: &[C]) -> Vec<C> {
        let d = self.coeffs.len() - 1;
        let n_terms = self.policy.terms;
        // a_j(tc + τ) in powers of τ
        let shifted: Vec<Vec<C>> = self
            .coeffs
            .iter()
            .map(|a| {
                (0..a.len())
                    .map(|m| (m..a.len()).map(|i| a[i] * binomial(i, m) * tc.powu((i - m) as u32)).sum())
                    .collect()
            })
            .collect();
        let mut c = vec![C::zero(); n_terms + d];
        let mut fact = 1.0;
        for k in 0..d {
            if k > 0 {
                fact *= k as f64;
            }
            c[k] = state[k] / fact;
        }
        for n in 0..n_terms {
            let mut sum = C::zero();
            for (j, a) in shifted.iter().enumerate() {
                for (m, am) in a.iter().enumerate() {
                    if m > n || (j == d && m == 0) {
                        continue;
                    }
                    let idx = n - m + j;
                    sum += am * falling(idx, j) * c[idx];
                }
            }
            c[n + d] = -sum / (shifted[d][0] * falling(n + d, d));
        }
        c
    }

    fn evaluate(c: &[C], h: C, d: usize) -> Vec<C> {
        (0..d)
            .map(|j| {
                (j..c.len()).rev().fold(C::zero(), |acc, n| acc * h + c[n] * falling(n, j))
            })
            .collect()
    }

    /// Advances every column of the fundamental matrix from `from` to `to`.
    fn segment(&mut self, from: C, to: C, states: &mut [Vec<C>]) -> Result<()> {
        let d = self.coeffs.len() - 1;
        let mut t = from;
        let mut guard = 0;
        while (to - t).norm() > 1e-15 {
            guard += 1;
            if guard > 100_000 {
                return Err(Error::Numeric("too many steps".into()));
            }
            let dist = self.distance_to_singularity(t);
            let remaining = to - t;
            let max_len = self.policy.radius_fraction * dist;
            let mut h = if remaining.norm() <= max_len { remaining } else { remaining / remaining.norm() * max_len };
            let mut halvings = 0;
            loop {
                let coeffs: Vec<Vec<C>> = states.iter().map(|s| self.taylor(t, s)).collect();
                let scale = states.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
                let len = coeffs[0].len();
                let err = coeffs
                    .iter()
                    .flat_map(|c| (len - 3..len).map(move |n| c[n].norm() * h.norm().powi(n as i32)))
                    .fold(0.0, f64::max);
                if err <= self.policy.tolerance * scale {
                    for (s, c) in states.iter_mut().zip(&coeffs) {
                        *s = Self::evaluate(c, h, d);
                    }
                    break;
                }
                halvings += 1;
                if halvings > self.policy.max_halvings {
                    return Err(Error::Numeric(format!("step size underflow near t = {t}")));
                }
                h /= 2.0;
            }
            self.steps += 1;
            t += h;
        }
        Ok(())
    }

    fn continue_along(&mut self, path: &[C]) -> Result<CMatrix> {
        let d = self.coeffs.len() - 1;
        let mut states: Vec<Vec<C>> = (0..d).map(|i| (0..d).map(|j| if i == j { C::new(1.0, 0.0) } else { C::zero() }).collect()).collect();
        for w in path.windows(2) {
            self.segment(w[0], w[1], &mut states)?;
        }
        // column i holds the continued state of the i-th basis solution
        let mut m = CMatrix::zeros(d);
        for (i, s) in states.iter().enumerate() {
            for (j, v) in s.iter().enumerate() {
                m.set(j, i, *v);
            }
        }
        Ok(m)
    }
}

fn circle(center: C, start: C, pieces: usize) -> Vec<C> {
    (0..=pieces).map(|k| center + (start - center) * C::from_polar(1.0, 2.0 * PI * k as f64 / pieces as f64)).collect()
}

/// Base point and loops for the equation with discriminant point `td`.
fn loop_path(kind: LoopKind, td: C, base: C) -> Vec<C> {
    let r = td.norm();
    match kind {
        LoopKind::Origin => circle(C::zero(), base, 96),
        LoopKind::Discriminant => {
            let p = td + (base - td) / (base - td).norm() * (0.5 * r);
            let mut path = vec![base];
            path.extend(circle(td, p, 96));
            path.push(base);
            path
        }
        LoopKind::Infinity => {
            let p = base / base.norm() * (2.0 * r);
            let mut path = vec![base];
            path.extend(circle(C::zero(), p, 192));
            path.push(base);
            path
        }
        LoopKind::Trivial => {
            let p = td + (base - td) / (base - td).norm() * (0.5 * r);
            vec![base, p, base]
        }
    }
}

#[derive(Clone, Debug)]
pub struct LoopMonodromy {
    pub kind: LoopKind,
    /// Action on the basis of solutions with `φ^{(j)}(t_0) = δ_ij`: column
    /// `i` is the continued state of the `i`-th solution.
    pub matrix: CMatrix,
    pub invariants: MonodromyInvariants,
    pub steps: usize,
}

#[derive(Clone, Debug)]
pub struct MonodromyReport {
    pub ode: ScalarOde,
    pub basepoint: C,
    pub loops: Vec<LoopMonodromy>,
    pub policy: StepPolicy,
}

impl MonodromyReport {
    pub fn matrix(&self, kind: LoopKind) -> Option<&CMatrix> {
        self.loops.iter().find(|l| l.kind == kind).map(|l| &l.matrix)
    }
}

/// Continues a local solution basis of the reduced equation around the
/// requested loops. The base point is `t_0 = (t_D / 2) e^{iπ/5}` where `t_D`
/// is the discriminant point.
pub fn numeric_monodromy(delta: i64, beta: &[Rat], loops: &[LoopKind], policy: StepPolicy) -> Result<MonodromyReport> {
    if !(2..=3).contains(&delta) {
        return Err(Error::Unsupported(format!("numeric monodromy for toric degree {delta} (supported: 2, 3)")));
    }
    let ode = ode_from_system(delta, beta)?;
    let td = C::new(ode.discriminant_point().to_f64().expect("finite"), 0.0);
    let base = td * 0.5 * C::from_polar(1.0, PI / 5.0);
    let mut out = Vec::new();
    for &kind in loops {
        let mut integ = Integrator::new(&ode, policy);
        let matrix = integ.continue_along(&loop_path(kind, td, base))?;
        out.push(LoopMonodromy { kind, invariants: MonodromyInvariants::of(&matrix), matrix, steps: integ.steps });
    }
    Ok(MonodromyReport { ode, basepoint: base, loops: out, policy })
}

/// Numerical generators in the order of [`beukers_generators`]:
///
/// * `g_1 = e(β_1) I`, the torus loop `y -> e^{2πiτ} y`, which only moves the
///   prefactor `y^e` and multiplies every solution by `e(β_1)`;
/// * `g_2` is the loop enclosing both finite singular points counterclockwise;
/// * `g_3 = e(β_1) M_D^{-1}` with `M_D` the counterclockwise loop around the
///   discriminant point, that is the clockwise loop composed with the torus
///   action.
pub fn numeric_generators(delta: i64, beta: &[Rat], policy: StepPolicy) -> Result<MonodromyGenerators> {
    let report = numeric_monodromy(delta, beta, &[LoopKind::Discriminant, LoopKind::Infinity], policy)?;
    let scalar = root_of_unity(&beta[0]);
    let d = delta as usize;
    let g1 = CMatrix::identity(d).scale(scalar);
    let g2 = report.matrix(LoopKind::Infinity).expect("computed").clone();
    let g3 = report.matrix(LoopKind::Discriminant).expect("computed").inverse()?.scale(scalar);
    Ok(MonodromyGenerators { delta, beta: beta.to_vec(), matrices: vec![g1, g2, g3], tolerance: 1e-9 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::rat;
    use proptest::prelude::*;

    fn all_loops() -> Vec<LoopKind> {
        vec![LoopKind::Origin, LoopKind::Discriminant, LoopKind::Infinity, LoopKind::Trivial]
    }

    #[test]
    fn charpoly_of_diagonal() {
        let m = CMatrix::from_rows(&[
            vec![C::new(2.0, 0.0), C::zero()],
            vec![C::zero(), C::new(0.0, 1.0)],
        ]);
        // (λ - 2)(λ - i) = λ² - (2 + i)λ + 2i
        let cp = charpoly(&m);
        assert!((cp[0] - C::new(0.0, 2.0)).norm() < 1e-14);
        assert!((cp[1] + C::new(2.0, 1.0)).norm() < 1e-14);
        let inv = m.inverse().unwrap();
        assert!(inv.mul(&m).max_abs_diff(&CMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn trivial_loop_and_unit_determinants() {
        let beta = [rat(1, 5), rat(1, 3)];
        let rep = numeric_monodromy(3, &beta, &all_loops(), StepPolicy::default()).unwrap();
        let triv = rep.matrix(LoopKind::Trivial).unwrap();
        assert!(triv.max_abs_diff(&CMatrix::identity(3)) < 1e-9);
        for l in &rep.loops {
            assert!((l.invariants.det.norm() - 1.0).abs() < 1e-9, "{:?}", l.kind);
        }
        // local exponents at 0 are 0 and (s - e_0)/2, e_0 = -2/15
        let origin = &rep.loops[0].invariants;
        let expected: C = [rat(0, 1), rat(1, 15), rat(17, 30)].iter().map(root_of_unity).sum();
        assert!((origin.trace - expected).norm() < 1e-9);
    }

    #[test]
    fn beukers_structure() {
        let beta = [rat(1, 5), rat(1, 3)];
        let g = beukers_generators(3, &beta).unwrap().matrices;
        let c = root_of_unity(&beta[0]);
        let cube = g[1].mul(&g[1]).mul(&g[1]);
        assert!(cube.max_abs_diff(&CMatrix::identity(3).scale(root_of_unity(&beta[1]))) < 1e-12);
        assert!((g[0].trace() - c * 3.0).norm() < 1e-12);
        let g0 = beukers_generators(3, &[rat(0, 1), rat(1, 3)]).unwrap();
        assert!((g0.matrices[2].trace() - C::new(1.0, 0.0)).norm() < 1e-12);
        assert!(beukers_generators(2, &beta).is_err());
    }

    #[test]
    fn numeric_matches_closed_form() {
        for beta in [[rat(1, 5), rat(1, 3)], [rat(2, 7), rat(-1, 4)], [rat(1, 2), rat(1, 9)]] {
            let num = numeric_generators(3, &beta, StepPolicy::default()).unwrap().invariants();
            let exact = beukers_generators(3, &beta).unwrap().invariants();
            assert_eq!(num.len(), 7);
            for (a, b) in num.iter().zip(&exact) {
                assert!(a.max_diff(b) < 1e-6, "{beta:?}: {a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn quadratic_equation_monodromy() {
        let rep = numeric_monodromy(2, &[rat(1, 3), rat(1, 7)], &all_loops(), StepPolicy::default()).unwrap();
        let inf = &rep.matrix(LoopKind::Infinity).unwrap().clone();
        let o = rep.matrix(LoopKind::Origin).unwrap();
        let d = rep.matrix(LoopKind::Discriminant).unwrap();
        // the loop around both points is the product of the two simple loops
        let prod = MonodromyInvariants::of(&o.mul(d));
        assert!(prod.max_diff(&MonodromyInvariants::of(inf)) < 1e-9);
        assert!(numeric_monodromy(4, &[rat(1, 3), rat(1, 7)], &all_loops(), StepPolicy::default()).is_err());
    }

    #[test]
    fn resonant_parameters_are_rejected() {
        assert!(matches!(numeric_generators(3, &[rat(0, 1), rat(0, 1)], StepPolicy::default()), Err(Error::Resonance(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn conjugation_invariants_are_basepoint_free(p in 1i64..9, q in 1i64..9) {
            let beta = [rat(p, 11), rat(q, 13)];
            let num = numeric_generators(3, &beta, StepPolicy::default()).unwrap().invariants();
            let exact = beukers_generators(3, &beta).unwrap().invariants();
            for (a, b) in num.iter().zip(&exact) {
                prop_assert!(a.max_diff(b) < 1e-6);
            }
        }
    }
}
