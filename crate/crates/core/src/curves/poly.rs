//! Sparse multivariate polynomials with integer coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::{Int, Rat};

/// A polynomial in `y_0, …, y_{n-1}`, stored as exponent vector -> coefficient.
/// Exponent vectors are ordered lexicographically, which is a monomial order,
/// so the last entry is the leading term.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Int>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Int) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Int::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, Int::one())
    }

    pub fn monomial(nvars: usize, exps: Vec<u32>, c: Int) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        MPoly { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Int)>) -> Self {
        let mut p = MPoly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: Int) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(Int::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Int> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn leading(&self) -> Option<(&Vec<u32>, &Int)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn exponents(&self) -> Vec<Vec<u32>> {
        self.terms.keys().cloned().collect()
    }

    pub fn scale(&self, c: &Int) -> MPoly {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> MPoly {
        (0..n).fold(MPoly::one(self.nvars), |acc, _| &acc * self)
    }

    pub fn derivative(&self, i: usize) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, c * Int::from(e[i]));
            }
        }
        out
    }

    /// Sets `y_i = 0`.
    pub fn substitute_zero(&self, i: usize) -> MPoly {
        MPoly { nvars: self.nvars, terms: self.terms.iter().filter(|(e, _)| e[i] == 0).map(|(e, c)| (e.clone(), c.clone())).collect() }
    }

    /// Gcd of the integer coefficients (zero for the zero polynomial).
    pub fn content(&self) -> Int {
        self.terms.values().fold(Int::zero(), |g, c| g.gcd(c))
    }

    /// Divides by the integer content and makes the leading coefficient positive.
    pub fn normalized(&self) -> MPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().map(|(_, c)| c.is_negative()).unwrap_or(false) {
            g = -g;
        }
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), c / &g)).collect() }
    }

    /// Largest monomial dividing the polynomial, as an exponent vector.
    pub fn monomial_factor(&self) -> Vec<u32> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else { return vec![0; self.nvars] };
        it.fold(first.clone(), |acc, e| acc.iter().zip(e).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn divide_monomial(&self, m: &[u32]) -> Option<MPoly> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e.iter().zip(m).any(|(a, b)| a < b) {
                return None;
            }
            terms.insert(e.iter().zip(m).map(|(a, b)| a - b).collect(), c.clone());
        }
        Some(MPoly { nvars: self.nvars, terms })
    }

    /// Exact division, or `None` when `d` does not divide `self` in `Z[y]`.
    pub fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        let (dl, dc) = d.leading()?;
        let (dl, dc) = (dl.clone(), dc.clone());
        let mut q = MPoly::zero(self.nvars);
        let mut r = self.clone();
        while let Some((rl, rc)) = r.leading() {
            if rl.iter().zip(&dl).any(|(a, b)| a < b) || !rc.is_multiple_of(&dc) {
                return None;
            }
            let t = MPoly::monomial(self.nvars, rl.iter().zip(&dl).map(|(a, b)| a - b).collect(), rc / &dc);
            r = &r - &(&t * d);
            q = &q + &t;
        }
        Some(q)
    }

    pub fn divides(&self, other: &MPoly) -> bool {
        other.div_exact(self).is_some()
    }

    /// Coefficients of `y_v^0, y_v^1, …` as polynomials free of `y_v`.
    fn coefficients_in(&self, v: usize) -> Vec<MPoly> {
        let mut out = vec![MPoly::zero(self.nvars); self.degree_in(v) as usize + 1];
        for (e, c) in &self.terms {
            let mut f = e.clone();
            let d = f[v] as usize;
            f[v] = 0;
            out[d].add_term(f, c.clone());
        }
        out
    }

    fn content_in(&self, v: usize) -> MPoly {
        self.coefficients_in(v).iter().fold(MPoly::zero(self.nvars), |g, c| gcd(&g, c))
    }

    fn primitive_in(&self, v: usize) -> MPoly {
        let c = self.content_in(v);
        self.div_exact(&c).expect("content divides")
    }

    fn highest_var(&self) -> Option<usize> {
        (0..self.nvars).rev().find(|&i| self.degree_in(i) > 0)
    }

    /// Product of the distinct irreducible factors (up to an integer constant):
    /// `p / gcd(p, ∂p/∂y_0, …, ∂p/∂y_{n-1})`.
    pub fn squarefree_part(&self) -> MPoly {
        if self.is_zero() || self.is_constant() {
            return MPoly::one(self.nvars);
        }
        if self.squarefree_by_specialization() {
            return self.normalized();
        }
        let g = (0..self.nvars).fold(self.clone(), |g, i| gcd(&g, &self.derivative(i)));
        self.div_exact(&g).expect("gcd divides").normalized()
    }

    /// Univariate image in `y_v` after substituting `point` for the other
    /// variables.
    fn specialize(&self, v: usize, point: &[Int]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.degree_in(v) as usize + 1];
        for (e, c) in &self.terms {
            let mut val = c.clone();
            for (i, &x) in e.iter().enumerate() {
                if i != v {
                    val *= num_traits::pow(point[i].clone(), x as usize);
                }
            }
            out[e[v] as usize] += Rat::from_integer(val);
        }
        out
    }

    /// Sufficient test: if for every variable some degree-preserving integer
    /// specialization of the others is squarefree, no repeated factor can
    /// involve that variable. Returns `false` when inconclusive.
    fn squarefree_by_specialization(&self) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5f);
        if !self.content().is_one() {
            return false;
        }
        (0..self.nvars).all(|v| {
            let d = self.degree_in(v) as usize;
            if d == 0 {
                return true;
            }
            (0..8).any(|_| {
                let point: Vec<Int> = (0..self.nvars).map(|_| Int::from(rng.gen_range(-40i64..=40))).collect();
                let f = self.specialize(v, &point);
                if f[d].is_zero() {
                    return false;
                }
                let df: Vec<Rat> = f.iter().enumerate().skip(1).map(|(k, c)| c * Rat::from_integer(Int::from(k))).collect();
                univariate_gcd_degree(f, df) == 0
            })
        })
    }

    /// Renames variable `i` to `map[i]` in a ring with `nvars` variables.
    pub fn embed(&self, map: &[usize], nvars: usize) -> MPoly {
        MPoly::from_terms(
            nvars,
            self.terms.iter().map(|(e, c)| {
                let mut f = vec![0; nvars];
                for (i, &x) in e.iter().enumerate() {
                    f[map[i]] += x;
                }
                (f, c.clone())
            }),
        )
    }
}

fn trim(mut p: Vec<Rat>) -> Vec<Rat> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn univariate_gcd_degree(a: Vec<Rat>, b: Vec<Rat>) -> usize {
    let (mut a, mut b) = (trim(a), trim(b));
    while !b.is_empty() {
        while a.len() >= b.len() {
            let f = a.last().expect("nonempty") / b.last().expect("nonempty");
            let shift = a.len() - b.len();
            for (i, c) in b.iter().enumerate() {
                a[i + shift] -= &f * c;
            }
            a = trim(a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Pseudo-remainder of `f` by `g` as polynomials in `y_v`.
fn pseudo_remainder(f: &MPoly, g: &MPoly, v: usize) -> MPoly {
    let dg = g.degree_in(v);
    let lc = g.coefficients_in(v).pop().expect("nonzero divisor");
    let mut r = f.clone();
    while !r.is_zero() && r.degree_in(v) >= dg {
        let dr = r.degree_in(v);
        let lr = r.coefficients_in(v).pop().expect("nonzero");
        let mut shift = vec![0; f.nvars];
        shift[v] = dr - dg;
        let x = MPoly::monomial(f.nvars, shift, Int::one());
        r = &(&lc * &r) - &(&(&lr * &x) * g);
    }
    r
}

/// Greatest common divisor in `Z[y]`, normalized, by recursive primitive
/// remainder sequences.
pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return b.normalized();
    }
    if b.is_zero() {
        return a.normalized();
    }
    let v = match (a.highest_var(), b.highest_var()) {
        (None, None) => return MPoly::constant(a.nvars, a.content().gcd(&b.content())),
        (x, y) => x.max(y).expect("some variable"),
    };
    let (ca, cb) = (a.content_in(v), b.content_in(v));
    let c = gcd(&ca, &cb);
    let (pa, pb) = (a.div_exact(&ca).expect("content divides"), b.div_exact(&cb).expect("content divides"));
    let (mut f, mut g) = if pa.degree_in(v) >= pb.degree_in(v) { (pa, pb) } else { (pb, pa) };
    let g = loop {
        if g.degree_in(v) == 0 {
            break MPoly::one(a.nvars);
        }
        let r = pseudo_remainder(&f, &g, v);
        if r.is_zero() {
            break g.primitive_in(v);
        }
        f = g;
        g = r.primitive_in(v);
    };
    (&c * &g).normalized()
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, o: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, o: &MPoly) -> MPoly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(&-Int::one())
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, o: &MPoly) -> MPoly {
        let mut out = MPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            for (f, d) in &o.terms {
                out.add_term(e.iter().zip(f).map(|(a, b)| a + b).collect(), c * d);
            }
        }
        out
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| if x == 1 { format!("y{i}") } else { format!("y{i}^{x}") })
                .collect();
            let (neg, mag) = (c.is_negative(), c.abs());
            let sign = match (first, neg) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            let body = if mono.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                mono.join("*")
            } else {
                format!("{mag}*{}", mono.join("*"))
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
