//! Integer lattices: Hermite and Smith normal forms, spans, indices and quotients.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::{int, primitive_integer, rat_from_int, IntMatrix, Int, Rat};

/// Column Hermite normal form.
///
/// Returns `(H, U)` with `H = M U`, `U` unimodular and `H` lower triangular
/// in the column sense: each nonzero column starts with a positive pivot
/// strictly below the previous column's pivot, entries to the left of a
/// pivot lie in `[0, pivot)`, and zero columns come last.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let rows = m.rows();
    let cols = m.cols();
    let mut h = m.clone();
    let mut u = IntMatrix::identity(cols);
    let mut r = 0;
    for i in 0..rows {
        if r == cols {
            break;
        }
        for j in r + 1..cols {
            if h[(i, j)].is_zero() {
                continue;
            }
            if h[(i, r)].is_zero() {
                h.swap_cols(r, j);
                u.swap_cols(r, j);
                continue;
            }
            let a = h[(i, r)].clone();
            let b = h[(i, j)].clone();
            let eg = a.extended_gcd(&b);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let p = -(&b / &g);
            let q = &a / &g;
            // (col_r, col_j) <- (x col_r + y col_j, p col_r + q col_j), det = 1
            h.combine_cols(r, j, &x, &y, &p, &q);
            u.combine_cols(r, j, &x, &y, &p, &q);
        }
        if h[(i, r)].is_zero() {
            continue;
        }
        if h[(i, r)].is_negative() {
            h.negate_col(r);
            u.negate_col(r);
        }
        let pivot = h[(i, r)].clone();
        for j in 0..r {
            let f = -h[(i, j)].div_floor(&pivot);
            h.add_col_multiple(j, r, &f);
            u.add_col_multiple(j, r, &f);
        }
        r += 1;
    }
    (h, u)
}

/// Number of leading nonzero columns of a matrix in column HNF.
fn hnf_rank(h: &IntMatrix) -> usize {
    (0..h.cols()).take_while(|&j| (0..h.rows()).any(|i| !h[(i, j)].is_zero())).count()
}

/// Nonzero invariant factors of `m`, forming a divisibility chain.
pub fn smith_normal_form(m: &IntMatrix) -> Vec<Int> {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[(i, j)].is_zero()
                    && best.is_none_or(|(bi, bj)| a[(i, j)].abs() < a[(bi, bj)].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap_rows(t, bi);
        a.swap_cols(t, bj);
        let piv = a[(t, t)].clone();
        let mut dirty = false;
        for i in t + 1..rows {
            let q = a[(i, t)].div_floor(&piv);
            a.add_row_multiple(i, t, &-q);
            dirty |= !a[(i, t)].is_zero();
        }
        for j in t + 1..cols {
            let q = a[(t, j)].div_floor(&piv);
            a.add_col_multiple(j, t, &-q);
            dirty |= !a[(t, j)].is_zero();
        }
        if dirty {
            continue;
        }
        let bad_row = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[(i, j)].is_multiple_of(&piv)));
        if let Some(i) = bad_row {
            a.add_row_multiple(t, i, &Int::one());
            continue;
        }
        out.push(piv.abs());
        t += 1;
    }
    out
}

/// Canonical basis (columns) of the integer kernel `{x in Z^n : M x = 0}`.
pub fn integer_kernel(m: &IntMatrix) -> IntMatrix {
    let (h, u) = hermite_normal_form(m);
    let r = hnf_rank(&h);
    let kernel: Vec<Vec<Int>> = (r..m.cols()).map(|j| u.col(j)).collect();
    canonical_basis(m.cols(), &kernel)
}

fn canonical_basis(ambient: usize, gens: &[Vec<Int>]) -> IntMatrix {
    let g = IntMatrix::from_cols(ambient, gens).expect("generators share the ambient dimension");
    let (h, _) = hermite_normal_form(&g);
    let r = hnf_rank(&h);
    h.select_cols(&(0..r).collect::<Vec<_>>())
}

/// A lattice in `Z^n` given by a canonical HNF column basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    ambient_dim: usize,
    basis: IntMatrix,
}

impl Lattice {
    pub fn from_generators(ambient_dim: usize, gens: &[Vec<Int>]) -> Result<Self> {
        for g in gens {
            if g.len() != ambient_dim {
                return Err(Error::Dimension { expected: ambient_dim, got: g.len() });
            }
        }
        Ok(Lattice { ambient_dim, basis: canonical_basis(ambient_dim, gens) })
    }

    pub fn full(n: usize) -> Self {
        Lattice { ambient_dim: n, basis: IntMatrix::identity(n) }
    }

    pub fn zero(n: usize) -> Self {
        Lattice { ambient_dim: n, basis: IntMatrix::zeros(n, 0) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn generators(&self) -> Vec<Vec<Int>> {
        self.basis.columns()
    }

    fn pivot_rows(&self) -> Vec<usize> {
        (0..self.rank())
            .map(|j| (0..self.ambient_dim).find(|&i| !self.basis[(i, j)].is_zero()).expect("nonzero column"))
            .collect()
    }

    /// Coordinates over Q of a vector in the rational span, if it lies there.
    pub fn rat_coords(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        if v.len() != self.ambient_dim {
            return None;
        }
        let piv = self.pivot_rows();
        let mut c: Vec<Rat> = Vec::with_capacity(self.rank());
        for (j, &p) in piv.iter().enumerate() {
            let mut acc = v[p].clone();
            for (i, ci) in c.iter().enumerate() {
                acc -= ci * rat_from_int(&self.basis[(p, i)]);
            }
            c.push(acc / rat_from_int(&self.basis[(p, j)]));
        }
        let back = self.basis.mul_rat_vec(&c);
        (back.as_slice() == v).then_some(c)
    }

    /// Integer coordinates in the basis, if `v` is a lattice vector.
    pub fn coords(&self, v: &[Int]) -> Option<Vec<Int>> {
        let c = self.rat_coords(&crate::matrix::to_rat_vec(v))?;
        c.iter().all(|x| x.is_integer()).then(|| c.iter().map(|x| x.to_integer()).collect())
    }

    pub fn contains(&self, v: &[Int]) -> bool {
        self.coords(v).is_some()
    }

    pub fn in_span(&self, v: &[Int]) -> bool {
        self.rat_coords(&crate::matrix::to_rat_vec(v)).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.generators().iter().all(|g| self.contains(g))
    }

    /// Reduces `v` modulo the lattice to the canonical coset representative.
    pub fn reduce(&self, v: &[Int]) -> Vec<Int> {
        let mut out = v.to_vec();
        for (j, p) in self.pivot_rows().into_iter().enumerate() {
            let q = out[p].div_floor(&self.basis[(p, j)]);
            for (i, o) in out.iter_mut().enumerate() {
                *o -= &q * &self.basis[(i, j)];
            }
        }
        out
    }

    /// All lattice vectors lying in the rational span of `vectors`.
    pub fn intersect_span(&self, vectors: &[Vec<Int>]) -> Result<Lattice> {
        let r = self.rank();
        let mut local: Vec<Vec<Int>> = Vec::new();
        for v in vectors {
            let c = self
                .rat_coords(&crate::matrix::to_rat_vec(v))
                .ok_or_else(|| Error::NotContained("vector outside the rational span".into()))?;
            local.push(primitive_integer(&c));
        }
        let sat = saturate_generators(r, &local);
        let gens: Vec<Vec<Int>> = sat.generators().iter().map(|c| self.basis.mul_vec(c)).collect();
        Lattice::from_generators(self.ambient_dim, &gens)
    }

    /// The saturation `Z^n ∩ span(self)`.
    pub fn saturation(&self) -> Lattice {
        saturate_generators(self.ambient_dim, &self.generators())
    }
}

/// `Z^n ∩ span_Q(gens)`, computed as a double integer kernel.
fn saturate_generators(n: usize, gens: &[Vec<Int>]) -> Lattice {
    if gens.is_empty() {
        return Lattice::zero(n);
    }
    let b = IntMatrix::from_cols(n, gens).expect("shared ambient");
    let orth = integer_kernel(&b.transpose());
    if orth.cols() == 0 {
        return Lattice::full(n);
    }
    let sat = integer_kernel(&orth.transpose());
    Lattice { ambient_dim: n, basis: sat }
}

/// An affine lattice `anchor + direction`, with the anchor reduced to its
/// canonical coset representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineLattice {
    anchor: Vec<Int>,
    direction: Lattice,
}

impl AffineLattice {
    pub fn new(anchor: &[Int], direction: Lattice) -> Self {
        AffineLattice { anchor: direction.reduce(anchor), direction }
    }

    pub fn anchor(&self) -> &[Int] {
        &self.anchor
    }

    pub fn direction(&self) -> &Lattice {
        &self.direction
    }

    pub fn rank(&self) -> usize {
        self.direction.rank()
    }

    pub fn contains(&self, p: &[Int]) -> bool {
        p.len() == self.anchor.len() && {
            let d: Vec<Int> = p.iter().zip(&self.anchor).map(|(a, b)| a - b).collect();
            self.direction.contains(&d)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpanMode {
    Affine,
    Linear,
}

/// Affine span (differences anchored at the first point) or linear span.
/// The linear span is returned with a zero anchor.
pub fn lattice_span(points: &[Vec<Int>], mode: SpanMode) -> Result<AffineLattice> {
    let first = points.first().ok_or(Error::Empty("point list"))?;
    let n = first.len();
    match mode {
        SpanMode::Affine => {
            let diffs: Vec<Vec<Int>> =
                points[1..].iter().map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect()).collect();
            Ok(AffineLattice::new(first, Lattice::from_generators(n, &diffs)?))
        }
        SpanMode::Linear => Ok(AffineLattice::new(&vec![Int::zero(); n], Lattice::from_generators(n, points)?)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Index {
    Finite(Int),
    Infinite,
}

impl Index {
    pub fn finite(&self) -> Option<&Int> {
        match self {
            Index::Finite(v) => Some(v),
            Index::Infinite => None,
        }
    }
}

/// `[sup : sub]`.
pub fn lattice_index(sup: &Lattice, sub: &Lattice) -> Result<Index> {
    let mut cols = Vec::new();
    for g in sub.generators() {
        cols.push(sup.coords(&g).ok_or_else(|| Error::NotContained(format!("{g:?} not in the larger lattice")))?);
    }
    if sub.rank() != sup.rank() {
        return Ok(Index::Infinite);
    }
    let m = IntMatrix::from_cols(sup.rank(), &cols)?;
    Ok(Index::Finite(m.det()?.abs()))
}

/// `source / kernel` with an integer projection in source coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientLattice {
    pub source: Lattice,
    pub kernel: Lattice,
    /// `quotient_rank x source.rank()`, acting on source coordinates.
    pub projection: IntMatrix,
    pub quotient_rank: usize,
    /// Invariant factors greater than one of the torsion part.
    pub torsion: Vec<Int>,
    section: IntMatrix,
}

impl QuotientLattice {
    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// Image of an ambient vector of the source lattice.
    pub fn project(&self, v: &[Int]) -> Result<Vec<Int>> {
        let c = self.source.coords(v).ok_or_else(|| Error::NotContained(format!("{v:?} not in source")))?;
        Ok(self.projection.mul_vec(&c))
    }

    /// Image of a vector in the rational span of the source.
    pub fn project_rat(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        let c = self.source.rat_coords(v).ok_or_else(|| Error::NotContained("outside source span".into()))?;
        Ok(self.projection.mul_rat_vec(&c))
    }

    /// An ambient vector of the source lattice that projects to `q`.
    pub fn lift(&self, q: &[Int]) -> Vec<Int> {
        self.source.basis().mul_vec(&self.section.mul_vec(q))
    }
}

pub fn quotient(source: &Lattice, kernel: &Lattice, require_torsion_free: bool) -> Result<QuotientLattice> {
    let mut kc = Vec::new();
    for g in kernel.generators() {
        kc.push(source.coords(&g).ok_or_else(|| Error::NotContained(format!("{g:?} not in source")))?);
    }
    let r = source.rank();
    let kmat = IntMatrix::from_cols(r, &kc)?;
    let torsion: Vec<Int> = smith_normal_form(&kmat).into_iter().filter(|d| !d.is_one()).collect();
    if require_torsion_free && !torsion.is_empty() {
        return Err(Error::Torsion(torsion.iter().map(ToString::to_string).collect()));
    }
    let left = integer_kernel(&kmat.transpose());
    let projection = left.transpose();
    let q = projection.rows();
    let (h, u) = hermite_normal_form(&projection);
    debug_assert!((0..q).all(|i| h[(i, i)].is_one()));
    let section = u.select_cols(&(0..q).collect::<Vec<_>>());
    Ok(QuotientLattice {
        source: source.clone(),
        kernel: kernel.clone(),
        projection,
        quotient_rank: q,
        torsion,
        section,
    })
}

/// Volume of a simplex normalized so that a unimodular simplex of `lattice`
/// has volume one. The vertices must lie in an affine translate of the
/// lattice's rational span, and their count must be `rank + 1`.
pub fn simplex_volume(lattice: &Lattice, vertices: &[Vec<Int>]) -> Result<Rat> {
    let first = vertices.first().ok_or(Error::Empty("simplex vertices"))?;
    if vertices.len() != lattice.rank() + 1 {
        return Err(Error::Dimension { expected: lattice.rank() + 1, got: vertices.len() });
    }
    let mut rows = Vec::new();
    for v in &vertices[1..] {
        let d: Vec<Rat> = v.iter().zip(first).map(|(a, b)| rat_from_int(&(a - b))).collect();
        rows.push(lattice.rat_coords(&d).ok_or_else(|| Error::NotContained("vertex outside the span".into()))?);
    }
    Ok(crate::matrix::rat_det(&rows).abs())
}

/// Convenience for tests and callers holding small literals.
pub fn ivec(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| int(x)).collect()
}
