//! Point configurations and their face lattices.

mod mults;
mod reduction;
mod saturation;

pub use mults::{
    index_i, multiplicity, multiplicity_table, quotient_generators, subdiagram_volume, subdiagram_volume_oracle,
    MultiplicityRecord,
};
pub use reduction::{
    check_aux_point, dim2_interior_witness, is_lattice_redundant, is_pyramid, reduction_chain, AuxCertificate,
    AuxOutcome, ChainStep, Dim2Witness, FaceJustification, RedundancyReport, ReductionChain,
};
pub use saturation::{saturate, SaturationMode, SaturationResult};

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::lattice::{lattice_span, AffineLattice, Lattice, SpanMode};
use crate::matrix::{rat_solve, to_rat_vec, Int, IntMatrix, Rat};
use crate::polytope::{convex_hull, Face, Polytope};

/// Solves `h . alpha_i = 1` for every column.
pub fn check_homogeneous(matrix: &IntMatrix) -> Result<Vec<Rat>> {
    if matrix.cols() == 0 {
        return Err(Error::Empty("configuration"));
    }
    let rows: Vec<Vec<Rat>> = matrix.columns().iter().map(|c| to_rat_vec(c)).collect();
    let ones = vec![Rat::from_integer(Int::from(1)); matrix.cols()];
    rat_solve(&rows, &ones).map_err(|_| Error::Inhomogeneous)
}

/// A finite homogeneous collection of integer characters, stored as columns.
#[derive(Clone, Debug)]
pub struct PointConfiguration {
    matrix: IntMatrix,
    labels: Vec<String>,
    homogeneity: Vec<Rat>,
    z_a: Lattice,
    polytope: Polytope,
}

impl PartialEq for PointConfiguration {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix && self.labels == other.labels
    }
}

impl PointConfiguration {
    pub fn new(matrix: IntMatrix, labels: Option<Vec<String>>) -> Result<Self> {
        let cols = matrix.columns();
        if cols.is_empty() {
            return Err(Error::Empty("configuration"));
        }
        let mut seen = BTreeSet::new();
        for (i, c) in cols.iter().enumerate() {
            if !seen.insert(c.clone()) {
                return Err(Error::RepeatedColumn(i));
            }
        }
        let labels = match labels {
            Some(l) if l.len() != cols.len() => return Err(Error::Dimension { expected: cols.len(), got: l.len() }),
            Some(l) => l,
            None => (1..=cols.len()).map(|i| format!("a{i}")).collect(),
        };
        let homogeneity = check_homogeneous(&matrix)?;
        let z_a = Lattice::from_generators(matrix.rows(), &cols)?;
        let polytope = convex_hull(&cols)?;
        Ok(PointConfiguration { matrix, labels, homogeneity, z_a, polytope })
    }

    pub fn from_columns(cols: &[Vec<Int>]) -> Result<Self> {
        let n = cols.first().ok_or(Error::Empty("configuration"))?.len();
        Self::new(IntMatrix::from_cols(n, cols)?, None)
    }

    pub fn from_i64_columns(cols: &[&[i64]]) -> Result<Self> {
        let v: Vec<Vec<Int>> = cols.iter().map(|c| crate::lattice::ivec(c)).collect();
        Self::from_columns(&v)
    }

    /// Homogenized monomial curve `{(1, e)}` for the given exponents.
    pub fn curve(exponents: &[i64]) -> Result<Self> {
        let cols: Vec<Vec<Int>> = exponents.iter().map(|&e| crate::lattice::ivec(&[1, e])).collect();
        Self::from_columns(&cols)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn homogeneity(&self) -> &[Rat] {
        &self.homogeneity
    }

    pub fn len(&self) -> usize {
        self.matrix.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ambient_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn column(&self, i: usize) -> Vec<Int> {
        self.matrix.col(i)
    }

    pub fn columns(&self) -> Vec<Vec<Int>> {
        self.matrix.columns()
    }

    pub fn position(&self, p: &[Int]) -> Option<usize> {
        (0..self.len()).find(|&i| self.matrix.col(i) == p)
    }

    /// The lattice `Z_A` generated by the columns.
    pub fn lattice(&self) -> &Lattice {
        &self.z_a
    }

    /// `Z_A ∩ {h = 0}`, the lattice in which polytope volumes are measured.
    pub fn direction_lattice(&self) -> &Lattice {
        self.polytope.affine_hull().direction()
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    pub fn faces(&self) -> &[Face] {
        self.polytope.faces()
    }

    pub fn top_face(&self) -> &Face {
        self.faces().last().expect("polytope has a top face")
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    pub fn is_vertex(&self, i: usize) -> bool {
        self.polytope.is_vertex(i)
    }

    pub fn columns_on(&self, face: &Face) -> Vec<Vec<Int>> {
        face.indices.iter().map(|&i| self.column(i)).collect()
    }

    pub fn check_face(&self, face: &Face) -> Result<()> {
        if self.faces().contains(face) {
            Ok(())
        } else {
            Err(Error::NotAFace)
        }
    }

    /// Affine lattice spanned by the columns on a face.
    pub fn face_lattice(&self, face: &Face) -> Result<AffineLattice> {
        self.check_face(face)?;
        lattice_span(&self.columns_on(face), SpanMode::Affine)
    }

    /// The smallest face of this configuration's polytope containing all the
    /// given points, which must be columns.
    pub fn face_containing(&self, points: &[Vec<Int>]) -> Result<&Face> {
        let idx: Vec<usize> = points.iter().map(|p| self.position(p).ok_or(Error::NotAFace)).collect::<Result<_>>()?;
        self.faces()
            .iter()
            .filter(|f| idx.iter().all(|&i| f.contains(i)))
            .min_by_key(|f| f.indices.len())
            .ok_or(Error::NotAFace)
    }

    /// The face of `self` matching a face of another configuration with the
    /// same Newton polytope, identified through the vertices.
    pub fn corresponding_face(&self, other: &PointConfiguration, face: &Face) -> Result<&Face> {
        let verts: Vec<Vec<Int>> =
            face.indices.iter().filter(|&&i| other.is_vertex(i)).map(|&i| other.column(i)).collect();
        let f = self.face_containing(&verts)?;
        if f.dim != face.dim {
            return Err(Error::NotAFace);
        }
        Ok(f)
    }

    /// Configuration with column `i` removed.
    pub fn remove(&self, i: usize) -> Result<PointConfiguration> {
        if i >= self.len() {
            return Err(Error::InvalidColumn(i));
        }
        let keep: Vec<usize> = (0..self.len()).filter(|&j| j != i).collect();
        let labels = keep.iter().map(|&j| self.labels[j].clone()).collect();
        PointConfiguration::new(self.matrix.select_cols(&keep), Some(labels))
    }

    /// Configuration with extra columns appended after the existing ones.
    pub fn extend(&self, points: &[Vec<Int>]) -> Result<PointConfiguration> {
        let mut cols = self.columns();
        let mut labels = self.labels.clone();
        for p in points {
            cols.push(p.clone());
            labels.push(point_label(p));
        }
        PointConfiguration::new(IntMatrix::from_cols(self.ambient_dim(), &cols)?, Some(labels))
    }

    /// Index of the face whose relative interior contains column `i`.
    pub fn minimal_face_of(&self, i: usize) -> usize {
        self.polytope.minimal_face_index(&self.column(i)).expect("columns lie in their hull")
    }

    /// Faces whose relative interior meets the configuration, closed downward.
    pub fn face_int_semiideal(&self) -> Vec<Face> {
        let gens: BTreeSet<usize> = (0..self.len()).map(|i| self.minimal_face_of(i)).collect();
        self.faces()
            .iter()
            .filter(|f| gens.iter().any(|&g| f.is_subface_of(&self.faces()[g])))
            .cloned()
            .collect()
    }
}

pub fn point_label(p: &[Int]) -> String {
    let s: Vec<String> = p.iter().map(ToString::to_string).collect();
    format!("[{}]", s.join(","))
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn marked_triangle() -> PointConfiguration {
        PointConfiguration::from_i64_columns(&[&[1, 0, 0], &[1, 3, 0], &[1, 0, 3], &[1, 1, 0], &[1, 0, 2]]).unwrap()
    }

    pub fn seven_points() -> PointConfiguration {
        PointConfiguration::from_i64_columns(&[
            &[1, 0, 1, 0],
            &[1, 1, 2, 0],
            &[1, 2, 0, 0],
            &[1, 1, 1, 0],
            &[1, 2, 0, 2],
            &[1, 1, 0, 3],
            &[1, 0, 0, 4],
        ])
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::lattice::ivec;
    use crate::matrix::rat;

    #[test]
    fn homogeneity() {
        let h = check_homogeneous(&IntMatrix::from_i64_rows(&[&[1, 1, 1], &[0, 1, 3]])).unwrap();
        assert_eq!(h, vec![rat(1, 1), rat(0, 1)]);
        let h = check_homogeneous(&IntMatrix::from_i64_rows(&[&[2, 0], &[0, 2]])).unwrap();
        assert_eq!(h, vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(check_homogeneous(&IntMatrix::from_i64_rows(&[&[1, 2], &[0, 0]])), Err(Error::Inhomogeneous));
        assert!(matches!(
            PointConfiguration::from_i64_columns(&[&[1, 0], &[1, 0]]),
            Err(Error::RepeatedColumn(1))
        ));
    }

    #[test]
    fn face_lattices_of_example() {
        let a = marked_triangle();
        assert_eq!(a.lattice(), &Lattice::full(3));
        let bottom = a.face_containing(&[ivec(&[1, 0, 0]), ivec(&[1, 3, 0])]).unwrap().clone();
        assert_eq!(a.face_lattice(&bottom).unwrap().direction().generators(), vec![ivec(&[0, 1, 0])]);
        let diag = a.face_containing(&[ivec(&[1, 3, 0]), ivec(&[1, 0, 3])]).unwrap().clone();
        let dl = a.face_lattice(&diag).unwrap();
        assert_eq!(dl.direction(), &Lattice::from_generators(3, &[ivec(&[0, -3, 3])]).unwrap());
        let top = a.top_face().clone();
        let tl = a.face_lattice(&top).unwrap();
        assert!(tl.contains(&ivec(&[1, 0, 0])));
        assert_eq!(tl.direction(), &Lattice::from_generators(3, &[ivec(&[0, 1, 0]), ivec(&[0, 0, 1])]).unwrap());
    }

    #[test]
    fn semiideal_of_example() {
        let a = marked_triangle();
        let fint = a.face_int_semiideal();
        let dims: Vec<usize> = fint.iter().map(|f| f.dim).collect();
        assert_eq!(dims, vec![0, 0, 0, 1, 1]);
        assert!(fint.iter().all(|f| f.indices != vec![1, 2]));
        let simplex = PointConfiguration::from_i64_columns(&[&[1, 0, 0], &[1, 1, 0], &[1, 0, 1]]).unwrap();
        assert_eq!(simplex.face_int_semiideal().len(), 3);
        let inner = PointConfiguration::from_i64_columns(&[&[1, 0, 0], &[1, 3, 0], &[1, 0, 3], &[1, 1, 1]]).unwrap();
        assert_eq!(inner.face_int_semiideal().len(), inner.faces().len());
    }

    #[test]
    fn seven_point_faces() {
        let a = seven_points();
        let g1 = a.face_containing(&[a.column(0), a.column(1), a.column(2)]).unwrap();
        assert_eq!((g1.dim, g1.indices.clone()), (2, vec![0, 1, 2, 3]));
        let g2 = a.face_containing(&[a.column(4), a.column(6)]).unwrap();
        assert_eq!((g2.dim, g2.indices.clone()), (1, vec![4, 5, 6]));
        assert_eq!(a.minimal_face_of(3), a.faces().iter().position(|f| f == g1).unwrap());
    }
}
