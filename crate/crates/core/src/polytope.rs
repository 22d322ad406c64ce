//! Exact convex hulls and face posets of small integer point sets.
//!
//! Hulls are computed in intrinsic coordinates: the points are expressed in
//! the affine lattice they span, which makes the polytope full-dimensional.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{lattice_span, simplex_volume, AffineLattice, Lattice, SpanMode};
use crate::matrix::{dot_int, primitive_integer, rat_from_int, to_rat_vec, Int, IntMatrix, Rat};

/// A facet `h.x <= c` together with the input points achieving equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    pub normal: Vec<Int>,
    pub offset: Int,
    pub indices: Vec<usize>,
    local_normal: Vec<Int>,
    local_offset: Int,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    /// Input points lying on the face, sorted.
    pub indices: Vec<usize>,
    pub dim: usize,
    /// `(h, c)` with `h.x = c` on the face and `h.x < c` on other input
    /// points. `None` for the whole polytope.
    pub supporting: Option<(Vec<Int>, Int)>,
}

impl Face {
    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn is_subface_of(&self, other: &Face) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }
}

#[derive(Clone, Debug)]
pub struct Polytope {
    points: Vec<Vec<Int>>,
    hull: AffineLattice,
    local: Vec<Vec<Int>>,
    dim: usize,
    facets: Vec<Facet>,
    faces: Vec<Face>,
}

#[derive(Clone, Debug)]
pub struct FacePoset {
    pub faces: Vec<Face>,
    /// `(i, j)`: face `i` is a facet of face `j`.
    pub covers: Vec<(usize, usize)>,
}

impl FacePoset {
    pub fn top(&self) -> &Face {
        self.faces.last().expect("nonempty poset")
    }

    pub fn of_dim(&self, d: usize) -> impl Iterator<Item = &Face> {
        self.faces.iter().filter(move |f| f.dim == d)
    }
}

/// Generalized cross product: the vector orthogonal to the rows of a
/// `(d-1) x d` matrix, via signed maximal minors.
fn cross(rows: &[Vec<Int>], d: usize) -> Vec<Int> {
    (0..d)
        .map(|k| {
            let minor: Vec<Vec<Int>> =
                rows.iter().map(|r| r.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, x)| x.clone()).collect()).collect();
            let det = if minor.is_empty() { Int::one() } else { IntMatrix::from_rows(&minor).unwrap().det().unwrap() };
            if k % 2 == 0 {
                det
            } else {
                -det
            }
        })
        .collect()
}

fn primitive(v: Vec<Int>) -> Vec<Int> {
    let g = v.iter().fold(Int::zero(), |a, x| a.gcd(x));
    if g.is_zero() || g.is_one() {
        v
    } else {
        v.into_iter().map(|x| x / &g).collect()
    }
}

fn affine_rank(points: &[&Vec<Int>]) -> usize {
    match points.split_first() {
        None => 0,
        Some((first, rest)) => {
            let rows: Vec<Vec<Rat>> =
                rest.iter().map(|p| p.iter().zip(first.iter()).map(|(a, b)| rat_from_int(&(a - b))).collect()).collect();
            crate::matrix::rat_rank(&rows)
        }
    }
}

pub fn convex_hull(points: &[Vec<Int>]) -> Result<Polytope> {
    let hull = lattice_span(points, SpanMode::Affine)?;
    let dir = hull.direction().clone();
    let local: Vec<Vec<Int>> = points
        .iter()
        .map(|p| {
            let d: Vec<Int> = p.iter().zip(hull.anchor()).map(|(a, b)| a - b).collect();
            dir.coords(&d).expect("point lies in its own span")
        })
        .collect();
    let dim = dir.rank();
    let mut facets: Vec<Facet> = Vec::new();
    if dim > 0 {
        let n = points.len();
        let mut on_facet: Vec<Vec<bool>> = Vec::new();
        for subset in (0..n).combinations(dim) {
            if on_facet.iter().any(|mask| subset.iter().all(|&i| mask[i])) {
                continue;
            }
            let base = &local[subset[0]];
            let diffs: Vec<Vec<Int>> =
                subset[1..].iter().map(|&i| local[i].iter().zip(base).map(|(a, b)| a - b).collect()).collect();
            let g = primitive(cross(&diffs, dim));
            if g.iter().all(Zero::is_zero) {
                continue;
            }
            let c = dot_int(&g, base);
            let vals: Vec<Int> = local.iter().map(|y| dot_int(&g, y)).collect();
            let (g, c) = if vals.iter().all(|v| *v <= c) {
                (g, c)
            } else if vals.iter().all(|v| *v >= c) {
                (g.into_iter().map(|x| -x).collect(), -c)
            } else {
                continue;
            };
            let mask: Vec<bool> = local.iter().map(|y| dot_int(&g, y) == c).collect();
            let indices: Vec<usize> = (0..n).filter(|&i| mask[i]).collect();
            let (normal, offset) = ambient_functional(&hull, &g, &c);
            on_facet.push(mask);
            facets.push(Facet { normal, offset, indices, local_normal: g, local_offset: c });
        }
        facets.sort_by(|a, b| a.indices.cmp(&b.indices));
    }
    let mut p = Polytope { points: points.to_vec(), hull, local, dim, facets, faces: Vec::new() };
    p.faces = p.enumerate_faces();
    Ok(p)
}

/// Lifts a functional on intrinsic coordinates to a primitive integer
/// functional on the ambient space agreeing (up to positive scaling and a
/// constant) on the affine hull.
fn ambient_functional(hull: &AffineLattice, g: &[Int], c: &Int) -> (Vec<Int>, Int) {
    let dir = hull.direction();
    let n = dir.ambient_dim();
    let b = dir.basis();
    // pivot rows make the basis an invertible lower-triangular block
    let piv: Vec<usize> = (0..dir.rank()).map(|j| (0..n).find(|&i| !b[(i, j)].is_zero()).unwrap()).collect();
    let t: Vec<Vec<Rat>> = piv.iter().map(|&i| (0..dir.rank()).map(|j| rat_from_int(&b[(i, j)])).collect()).collect();
    let tinv = crate::matrix::rat_inverse(&t).expect("triangular with nonzero pivots");
    let mut h = vec![Rat::zero(); n];
    for (k, &row) in piv.iter().enumerate() {
        let mut acc = Rat::zero();
        for (j, gj) in g.iter().enumerate() {
            acc += rat_from_int(gj) * &tinv[j][k];
        }
        h[row] = acc;
    }
    let hi = primitive_integer(&h);
    // scale factor s with hi = s * h
    let s = h
        .iter()
        .zip(&hi)
        .find(|(a, _)| !a.is_zero())
        .map(|(a, b)| rat_from_int(b) / a)
        .unwrap_or_else(Rat::one);
    let off = (s * rat_from_int(c) + rat_from_int(&dot_int(&hi, hull.anchor()))).to_integer();
    (hi, off)
}

impl Polytope {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<Int>] {
        &self.points
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn affine_hull(&self) -> &AffineLattice {
        &self.hull
    }

    /// Intrinsic integer coordinates of the input points.
    pub fn local_points(&self) -> &[Vec<Int>] {
        &self.local
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Faces of dimension zero, one representative index each.
    pub fn vertices(&self) -> Vec<usize> {
        self.faces.iter().filter(|f| f.dim == 0).map(|f| f.indices[0]).sorted().collect()
    }

    pub fn is_vertex(&self, i: usize) -> bool {
        self.faces.iter().any(|f| f.dim == 0 && f.contains(i))
    }

    fn enumerate_faces(&self) -> Vec<Face> {
        let all: Vec<usize> = (0..self.points.len()).collect();
        let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut frontier: Vec<Vec<usize>> = self.facets.iter().map(|f| f.indices.clone()).collect();
        sets.extend(frontier.iter().cloned());
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for s in &frontier {
                for f in &self.facets {
                    let inter: Vec<usize> = s.iter().copied().filter(|i| f.indices.binary_search(i).is_ok()).collect();
                    if !inter.is_empty() && sets.insert(inter.clone()) {
                        next.push(inter);
                    }
                }
            }
            frontier = next;
        }
        let mut faces: Vec<Face> = sets
            .into_iter()
            .map(|s| {
                let pts: Vec<&Vec<Int>> = s.iter().map(|&i| &self.local[i]).collect();
                let dim = affine_rank(&pts);
                let supporting = Some(self.supporting_for(&s));
                Face { indices: s, dim, supporting }
            })
            .collect();
        faces.push(Face { indices: all, dim: self.dim, supporting: None });
        faces.sort_by(|a, b| (a.dim, &a.indices).cmp(&(b.dim, &b.indices)));
        faces
    }

    fn supporting_for(&self, set: &[usize]) -> (Vec<Int>, Int) {
        let containing: Vec<&Facet> =
            self.facets.iter().filter(|f| set.iter().all(|i| f.indices.binary_search(i).is_ok())).collect();
        let mut g = vec![Int::zero(); self.dim];
        let mut c = Int::zero();
        for f in &containing {
            for (a, b) in g.iter_mut().zip(&f.local_normal) {
                *a += b;
            }
            c += &f.local_offset;
        }
        ambient_functional(&self.hull, &g, &c)
    }

    pub fn face_poset(&self) -> FacePoset {
        let mut covers = Vec::new();
        for (i, a) in self.faces.iter().enumerate() {
            for (j, b) in self.faces.iter().enumerate() {
                if b.dim == a.dim + 1 && a.is_subface_of(b) {
                    covers.push((i, j));
                }
            }
        }
        FacePoset { faces: self.faces.clone(), covers }
    }

    /// Intrinsic rational coordinates of an ambient point, if it lies on the
    /// affine hull.
    fn local_coords(&self, p: &[Int]) -> Option<Vec<Rat>> {
        let d: Vec<Rat> = p.iter().zip(self.hull.anchor()).map(|(a, b)| rat_from_int(&(a - b))).collect();
        self.hull.direction().rat_coords(&d)
    }

    fn tight_facets(&self, p: &[Int]) -> Result<Vec<usize>> {
        let y = self.local_coords(p).ok_or(Error::OutsidePolytope)?;
        let mut tight = Vec::new();
        for (k, f) in self.facets.iter().enumerate() {
            let v = crate::matrix::dot_rat(&to_rat_vec(&f.local_normal), &y);
            let c = rat_from_int(&f.local_offset);
            if v > c {
                return Err(Error::OutsidePolytope);
            }
            if v == c {
                tight.push(k);
            }
        }
        Ok(tight)
    }

    pub fn contains(&self, p: &[Int]) -> bool {
        self.tight_facets(p).is_ok()
    }

    /// Index into `faces()` of the face whose relative interior contains `p`.
    pub fn minimal_face_index(&self, p: &[Int]) -> Result<usize> {
        let tight = self.tight_facets(p)?;
        if tight.is_empty() {
            return Ok(self.faces.len() - 1);
        }
        let mut set: Vec<usize> = self.facets[tight[0]].indices.clone();
        for &k in &tight[1..] {
            set.retain(|i| self.facets[k].indices.binary_search(i).is_ok());
        }
        self.faces.iter().position(|f| f.indices == set && f.supporting.is_some()).ok_or(Error::OutsidePolytope)
    }

    pub fn minimal_face_containing(&self, p: &[Int]) -> Result<&Face> {
        Ok(&self.faces[self.minimal_face_index(p)?])
    }

    /// Points of an affine lattice lying in the face (closed).
    pub fn lattice_points_in_face(&self, face: &Face, lattice: &AffineLattice) -> Result<Vec<Vec<Int>>> {
        let dir = lattice.direction();
        let anchor = lattice.anchor();
        let mut lo: Vec<Option<Int>> = vec![None; dir.rank()];
        let mut hi: Vec<Option<Int>> = vec![None; dir.rank()];
        for &i in &face.indices {
            let d: Vec<Rat> = self.points[i].iter().zip(anchor).map(|(a, b)| rat_from_int(&(a - b))).collect();
            let c = dir.rat_coords(&d).ok_or_else(|| Error::NotContained("face outside lattice span".into()))?;
            for (k, ck) in c.iter().enumerate() {
                let f = ck.floor().to_integer();
                let cl = ck.ceil().to_integer();
                if lo[k].as_ref().is_none_or(|l| f < *l) {
                    lo[k] = Some(f);
                }
                if hi[k].as_ref().is_none_or(|h| cl > *h) {
                    hi[k] = Some(cl);
                }
            }
        }
        let ranges: Vec<Vec<Int>> = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| {
                let (l, h) = (l.clone().unwrap(), h.clone().unwrap());
                num_iter_range(&l, &h)
            })
            .collect();
        let mut out = Vec::new();
        let combos: Box<dyn Iterator<Item = Vec<Int>>> =
            if ranges.is_empty() { Box::new(std::iter::once(Vec::new())) } else { Box::new(ranges.into_iter().multi_cartesian_product()) };
        for c in combos {
            let off = dir.basis().mul_vec(&c);
            let p: Vec<Int> = anchor.iter().zip(&off).map(|(a, b)| a + b).collect();
            if let Ok(tight) = self.tight_facets(&p) {
                if face.supporting.is_none() || face_contains_point(self, face, &tight) {
                    out.push(p);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Lattice points strictly inside a face; a vertex is its own interior.
    pub fn relative_interior_lattice_points(&self, face: &Face, lattice: &AffineLattice) -> Result<Vec<Vec<Int>>> {
        let target = self.faces.iter().position(|f| f == face).ok_or(Error::NotAFace)?;
        let mut out = Vec::new();
        for p in self.lattice_points_in_face(face, lattice)? {
            if self.minimal_face_index(&p)? == target {
                out.push(p);
            }
        }
        Ok(out)
    }

    /// Pulling triangulation: cells are index sets of `dim + 1` vertices.
    pub fn triangulate(&self) -> Vec<Vec<usize>> {
        let top = self.faces.len() - 1;
        let mut cells = self.pull(top);
        for c in cells.iter_mut() {
            c.sort_unstable();
        }
        cells.sort();
        cells
    }

    fn pull(&self, f: usize) -> Vec<Vec<usize>> {
        let face = &self.faces[f];
        let v = self
            .faces
            .iter()
            .filter(|g| g.dim == 0 && g.is_subface_of(face))
            .map(|g| g.indices[0])
            .min()
            .expect("faces have vertices");
        if face.dim == 0 {
            return vec![vec![v]];
        }
        let mut out = Vec::new();
        for (g, sub) in self.faces.iter().enumerate() {
            if sub.dim + 1 == face.dim && sub.is_subface_of(face) && !sub.contains(v) {
                for mut cell in self.pull(g) {
                    cell.push(v);
                    out.push(cell);
                }
            }
        }
        out
    }

    /// Volume normalized to a direction lattice of rank `dim`.
    pub fn volume_in(&self, lattice: &Lattice) -> Result<Rat> {
        if self.dim != lattice.rank() {
            return Err(Error::Dimension { expected: lattice.rank(), got: self.dim });
        }
        let mut total = Rat::zero();
        for cell in self.triangulate() {
            let vs: Vec<Vec<Int>> = cell.iter().map(|&i| self.points[i].clone()).collect();
            total += simplex_volume(lattice, &vs)?;
        }
        Ok(total)
    }

    /// Volume normalized to the lattice spanned by the input points.
    pub fn normalized_volume(&self) -> Rat {
        self.volume_in(self.hull.direction()).expect("own lattice has matching rank")
    }
}

fn face_contains_point(p: &Polytope, face: &Face, tight: &[usize]) -> bool {
    // the point lies on the face iff it is tight at every facet containing the face
    p.facets
        .iter()
        .enumerate()
        .filter(|(_, f)| face.indices.iter().all(|i| f.indices.binary_search(i).is_ok()))
        .all(|(k, _)| tight.contains(&k))
}

fn num_iter_range(lo: &Int, hi: &Int) -> Vec<Int> {
    let mut out = Vec::new();
    let mut x = lo.clone();
    while x <= *hi {
        out.push(x.clone());
        x += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ivec;
    use crate::matrix::int;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn marked_triangle() -> Vec<Vec<Int>> {
        vec![ivec(&[1, 0, 0]), ivec(&[1, 3, 0]), ivec(&[1, 0, 3]), ivec(&[1, 1, 0]), ivec(&[1, 0, 2])]
    }

    #[test]
    fn triangle_hull() {
        let p = convex_hull(&marked_triangle()).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.facets().len(), 3);
        assert_eq!(p.vertices(), vec![0, 1, 2]);
        for f in p.facets() {
            for (i, x) in p.points().iter().enumerate() {
                let v = dot_int(&f.normal, x);
                assert!(v <= f.offset);
                assert_eq!(v == f.offset, f.indices.contains(&i));
            }
        }
        let poset = p.face_poset();
        assert_eq!(poset.of_dim(0).count(), 3);
        assert_eq!(poset.of_dim(1).count(), 3);
        assert_eq!(poset.of_dim(2).count(), 1);
    }

    #[test]
    fn degenerate_hulls() {
        let p = convex_hull(&[ivec(&[1, 2])]).unwrap();
        assert_eq!((p.dim(), p.facets().len(), p.faces().len()), (0, 0, 1));
        let p = convex_hull(&[ivec(&[1, 0]), ivec(&[1, 1]), ivec(&[1, 3])]).unwrap();
        assert_eq!((p.dim(), p.facets().len()), (1, 2));
        assert_eq!(p.face_poset().faces.len(), 3);
        assert_eq!(p.normalized_volume(), Rat::from_integer(int(3)));
    }

    #[test]
    fn minimal_faces() {
        let p = convex_hull(&marked_triangle()).unwrap();
        assert_eq!(p.minimal_face_containing(&ivec(&[1, 3, 0])).unwrap().indices, vec![1]);
        let e = p.minimal_face_containing(&ivec(&[1, 1, 0])).unwrap();
        assert_eq!((e.dim, e.indices.clone()), (1, vec![0, 1, 3]));
        assert_eq!(p.minimal_face_containing(&ivec(&[1, 1, 1])).unwrap().dim, 2);
        assert!(p.minimal_face_containing(&ivec(&[1, 4, 0])).is_err());
        assert!(p.minimal_face_containing(&ivec(&[2, 0, 0])).is_err());
    }

    #[test]
    fn interior_points() {
        let p = convex_hull(&marked_triangle()).unwrap();
        let bottom = p.minimal_face_containing(&ivec(&[1, 1, 0])).unwrap().clone();
        let step1 = lattice_span(&[ivec(&[1, 0, 0]), ivec(&[1, 1, 0])], SpanMode::Affine).unwrap();
        assert_eq!(p.relative_interior_lattice_points(&bottom, &step1).unwrap(), vec![ivec(&[1, 1, 0]), ivec(&[1, 2, 0])]);
        let diag = p.faces().iter().find(|f| f.indices == vec![1, 2]).unwrap().clone();
        let step3 = lattice_span(&[ivec(&[1, 3, 0]), ivec(&[1, 0, 3])], SpanMode::Affine).unwrap();
        assert!(p.relative_interior_lattice_points(&diag, &step3).unwrap().is_empty());
        let top = p.faces().last().unwrap().clone();
        let z = AffineLattice::new(&ivec(&[1, 0, 0]), Lattice::from_generators(3, &[ivec(&[0, 1, 0]), ivec(&[0, 0, 1])]).unwrap());
        assert_eq!(p.relative_interior_lattice_points(&top, &z).unwrap(), vec![ivec(&[1, 1, 1])]);
        let v = p.faces().iter().find(|f| f.indices == vec![0]).unwrap().clone();
        assert_eq!(p.relative_interior_lattice_points(&v, &z).unwrap(), vec![ivec(&[1, 0, 0])]);
    }

    #[test]
    fn triangle_volume() {
        let p = convex_hull(&marked_triangle()).unwrap();
        let z = Lattice::from_generators(3, &[ivec(&[0, 1, 0]), ivec(&[0, 0, 1])]).unwrap();
        assert_eq!(p.volume_in(&z).unwrap(), Rat::from_integer(int(9)));
    }

    fn point_cloud() -> impl Strategy<Value = Vec<Vec<Int>>> {
        proptest::collection::vec(proptest::collection::vec(-3i64..=3, 3), 1..9)
            .prop_map(|v| v.into_iter().map(|p| ivec(&p)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn hull_invariants(pts in point_cloud()) {
            let p = convex_hull(&pts).unwrap();
            let d = p.dim();
            for f in p.faces() {
                if let Some((h, c)) = &f.supporting {
                    for (i, x) in pts.iter().enumerate() {
                        let v = dot_int(h, x);
                        prop_assert!(v <= *c);
                        prop_assert_eq!(v == *c, f.contains(i));
                    }
                }
            }
            for a in p.faces() {
                for b in p.faces() {
                    let inter: Vec<usize> = a.indices.iter().copied().filter(|i| b.contains(*i)).collect();
                    if !inter.is_empty() {
                        prop_assert!(p.faces().iter().any(|f| f.indices == inter));
                    }
                }
            }
            // Euler relation over proper faces
            let chi: i64 = (0..d).map(|k| {
                let n = p.faces().iter().filter(|f| f.dim == k).count() as i64;
                if k % 2 == 0 { n } else { -n }
            }).sum();
            if d > 0 {
                prop_assert_eq!(chi, 1 - if d.is_multiple_of(2) { 1 } else { -1 });
            }
            // triangulation volume is additive over the cells and positive
            let total = p.normalized_volume();
            prop_assert!(d == 0 || total.is_positive());
        }
    }
}
