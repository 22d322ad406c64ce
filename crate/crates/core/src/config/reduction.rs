//! Lattice redundancy, auxiliary-point certificates and reduction chains.

use std::collections::BTreeSet;

use num_traits::Zero;

use super::mults::multiplicity;
use super::{saturate, PointConfiguration, SaturationMode};
use crate::error::{Error, Result};
use crate::lattice::{lattice_span, Lattice, SpanMode};
use crate::matrix::{rat_from_int, rat_rank, Int, Rat};
use crate::polytope::Face;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedundancyReport {
    pub column: usize,
    pub redundant: bool,
    pub is_vertex: bool,
    /// For each face: does its lattice survive removing the column?
    pub per_face: Vec<(Face, bool)>,
}

pub fn is_lattice_redundant(a: &PointConfiguration, i: usize) -> Result<RedundancyReport> {
    if i >= a.len() {
        return Err(Error::InvalidColumn(i));
    }
    if a.is_vertex(i) {
        return Ok(RedundancyReport { column: i, redundant: false, is_vertex: true, per_face: Vec::new() });
    }
    let mut per_face = Vec::new();
    for f in a.faces() {
        let same = if f.contains(i) {
            let rest: Vec<Vec<Int>> = f.indices.iter().filter(|&&j| j != i).map(|&j| a.column(j)).collect();
            let before = a.face_lattice(f)?;
            let after = lattice_span(&rest, SpanMode::Affine)?;
            before == after
        } else {
            true
        };
        per_face.push((f.clone(), same));
    }
    let redundant = per_face.iter().all(|(_, s)| *s);
    Ok(RedundancyReport { column: i, redundant, is_vertex: false, per_face })
}

/// A point set is a pyramid if it has at least two points and one of them
/// lies off the affine span of the others.
pub fn is_pyramid(points: &[Vec<Int>]) -> bool {
    if points.len() < 2 {
        return false;
    }
    let rank = |pts: &[&Vec<Int>]| -> usize {
        let Some((first, rest)) = pts.split_first() else { return 0 };
        let rows: Vec<Vec<Rat>> =
            rest.iter().map(|p| p.iter().zip(first.iter()).map(|(x, y)| rat_from_int(&(x - y))).collect()).collect();
        rat_rank(&rows)
    };
    let all: Vec<&Vec<Int>> = points.iter().collect();
    let full = rank(&all);
    (0..points.len()).any(|k| {
        let others: Vec<&Vec<Int>> = points.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, p)| p).collect();
        rank(&others) < full
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FaceJustification {
    EqualMultiplicity(Int),
    /// `α_k` lies in the group generated by the other columns on the face,
    /// so the quotient semigroups agree.
    LatticeMembership,
    /// The face configuration is a pyramid, hence defective.
    Pyramid,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxCertificate {
    pub k: usize,
    pub a: usize,
    /// The minimal face of `α_a`.
    pub gamma1: Face,
    /// One entry per face containing `α_a`.
    pub faces: Vec<(Face, FaceJustification)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AuxOutcome {
    Certified(AuxCertificate),
    Rejected(String),
}

impl AuxOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, AuxOutcome::Certified(_))
    }
}

/// Checks whether `α_a` can serve as auxiliary point for removing `α_k`:
/// `α_k` must be lattice redundant, every face containing `α_k` must
/// contain `α_a`, and every face containing `α_a` must keep its
/// multiplicity (or be certified by lattice membership or as a pyramid).
pub fn check_aux_point(a: &PointConfiguration, k: usize, aux: usize) -> Result<AuxOutcome> {
    if k >= a.len() {
        return Err(Error::InvalidColumn(k));
    }
    if aux >= a.len() || aux == k {
        return Err(Error::InvalidColumn(aux));
    }
    let red = is_lattice_redundant(a, k)?;
    if !red.redundant {
        let why = if red.is_vertex { "is a vertex" } else { "is not lattice redundant" };
        return Ok(AuxOutcome::Rejected(format!("column {k} {why}")));
    }
    let gamma1 = a.faces()[a.minimal_face_of(aux)].clone();
    if let Some(f) = a.faces().iter().find(|f| f.contains(k) && !f.contains(aux)) {
        return Ok(AuxOutcome::Rejected(format!(
            "face {:?} contains column {k} but not the auxiliary column {aux}",
            f.indices
        )));
    }
    let ak = a.remove(k)?;
    let pk = a.column(k);
    let mut faces = Vec::new();
    for f in a.faces().iter().filter(|f| f.contains(aux)) {
        let fk = ak.corresponding_face(a, f)?;
        let m = multiplicity(a, f)?.mult_m;
        let mk = multiplicity(&ak, fk)?.mult_m;
        let why = if m == mk {
            FaceJustification::EqualMultiplicity(m)
        } else if f.contains(k) && Lattice::from_generators(a.ambient_dim(), &ak.columns_on(fk))?.contains(&pk) {
            FaceJustification::LatticeMembership
        } else if is_pyramid(&a.columns_on(f)) {
            FaceJustification::Pyramid
        } else {
            return Ok(AuxOutcome::Rejected(format!(
                "face {:?}: multiplicity {m} with column {k} versus {mk} without it",
                f.indices
            )));
        };
        faces.push((f.clone(), why));
    }
    Ok(AuxOutcome::Certified(AuxCertificate { k, a: aux, gamma1, faces }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainStep {
    pub added: Vec<Int>,
    /// The face of the semi-ideal containing the added point.
    pub face: Face,
    /// A relative interior point of that face, used as auxiliary point.
    pub witness: Vec<Int>,
    pub certificate: AuxCertificate,
}

#[derive(Clone, Debug)]
pub struct ReductionChain {
    pub mode: SaturationMode,
    pub start: PointConfiguration,
    pub end: PointConfiguration,
    pub steps: Vec<ChainStep>,
    /// Target points that could not be added, if the search got stuck.
    pub obstruction: Option<Vec<Vec<Int>>>,
}

impl ReductionChain {
    pub fn is_complete(&self) -> bool {
        self.obstruction.is_none()
    }
}

fn try_step(current: &PointConfiguration, alpha: &[Int]) -> Result<Option<ChainStep>> {
    let next = current.extend(&[alpha.to_vec()])?;
    let k = next.len() - 1;
    if !is_lattice_redundant(&next, k)?.redundant {
        return Ok(None);
    }
    let mut fint = current.face_int_semiideal();
    fint.sort_by(|x, y| (x.dim, &x.indices).cmp(&(y.dim, &y.indices)));
    for f in &fint {
        let fnext = next.corresponding_face(current, f)?;
        if !fnext.contains(k) {
            continue;
        }
        let fnext_idx = next.faces().iter().position(|g| g == fnext).expect("face of next");
        for aux in 0..k {
            if next.minimal_face_of(aux) != fnext_idx {
                continue;
            }
            if let AuxOutcome::Certified(cert) = check_aux_point(&next, k, aux)? {
                return Ok(Some(ChainStep {
                    added: alpha.to_vec(),
                    face: fnext.clone(),
                    witness: next.column(aux),
                    certificate: cert,
                }));
            }
        }
    }
    Ok(None)
}

/// Greedily adds the saturation points one at a time, each step certified by
/// an auxiliary point of a face of the current semi-ideal.
pub fn reduction_chain(a: &PointConfiguration, mode: SaturationMode) -> Result<ReductionChain> {
    let target = saturate(a, mode)?.added_points;
    let mut remaining: BTreeSet<Vec<Int>> = target.into_iter().collect();
    let mut current = a.clone();
    let mut steps = Vec::new();
    'outer: while !remaining.is_empty() {
        for alpha in remaining.clone() {
            if let Some(step) = try_step(&current, &alpha)? {
                current = current.extend(std::slice::from_ref(&alpha))?;
                remaining.remove(&alpha);
                steps.push(step);
                continue 'outer;
            }
        }
        break;
    }
    let obstruction = (!remaining.is_empty()).then(|| remaining.into_iter().collect());
    Ok(ReductionChain { mode, start: a.clone(), end: current, steps, obstruction })
}

#[derive(Clone, Debug)]
pub struct Dim2Witness {
    pub vertex: usize,
    pub neighbours: (usize, usize),
    pub lengths: (Int, Int),
    pub point: Vec<Int>,
    pub certificate: AuxOutcome,
}

/// For a two-dimensional configuration, finds a vertex `α1` with edge
/// neighbours `α2, α3` such that
/// `α' = α1 + (α2 - α1)/ℓ2 + (α3 - α1)/ℓ3` is interior, where `ℓi` is the
/// lattice length of the edge in its face lattice. Returns `None` exactly
/// when `N` has no interior points of `Z_A`.
pub fn dim2_interior_witness(a: &PointConfiguration) -> Result<Option<Dim2Witness>> {
    if a.dim() != 2 {
        return Err(Error::WrongDimension(format!("expected a two-dimensional configuration, got {}", a.dim())));
    }
    let top = a.faces().len() - 1;
    for v in a.polytope().vertices() {
        let edges: Vec<&Face> = a.faces().iter().filter(|f| f.dim == 1 && f.contains(v)).collect();
        if edges.len() != 2 {
            continue;
        }
        let mut steps = Vec::new();
        let mut nbrs = Vec::new();
        let mut lens = Vec::new();
        for e in &edges {
            let other = *e.indices.iter().find(|&&j| j != v && a.is_vertex(j)).expect("edge has two vertices");
            let lat = a.face_lattice(e)?;
            let diff: Vec<Int> = a.column(other).iter().zip(a.column(v)).map(|(x, y)| x - y).collect();
            let c = lat.direction().coords(&diff).expect("edge vector lies in its lattice");
            let len = c[0].clone();
            let len = if len < Int::zero() { -len } else { len };
            steps.push(diff.iter().map(|x| x / &len).collect::<Vec<Int>>());
            nbrs.push(other);
            lens.push(len);
        }
        let point: Vec<Int> = a.column(v).iter().zip(&steps[0]).zip(&steps[1]).map(|((p, s), t)| p + s + t).collect();
        if a.polytope().contains(&point) && a.polytope().minimal_face_index(&point)? == top {
            let ext = if a.position(&point).is_some() { a.clone() } else { a.extend(std::slice::from_ref(&point))? };
            let k = ext.position(&point).unwrap();
            let certificate = if k == v { AuxOutcome::Rejected("witness coincides with vertex".into()) } else { check_aux_point(&ext, k, v)? };
            return Ok(Some(Dim2Witness {
                vertex: v,
                neighbours: (nbrs[0], nbrs[1]),
                lengths: (lens[0].clone(), lens[1].clone()),
                point,
                certificate,
            }));
        }
    }
    let lat = lattice_span(&a.columns(), SpanMode::Affine)?;
    let interior = a.polytope().relative_interior_lattice_points(a.top_face(), &lat)?;
    if interior.is_empty() {
        Ok(None)
    } else {
        Err(Error::Hypothesis(format!("interior points {interior:?} exist but no vertex produces one")))
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use crate::lattice::ivec;

    #[test]
    fn redundancy_examples() {
        let a = marked_triangle();
        assert!(!is_lattice_redundant(&a, 3).unwrap().redundant);
        assert!(is_lattice_redundant(&a, 0).unwrap().is_vertex);
        let s = seven_points().extend(&[ivec(&[1, 1, 1, 1])]).unwrap();
        assert!(is_lattice_redundant(&s, 7).unwrap().redundant);
        assert!(matches!(is_lattice_redundant(&a, 9), Err(Error::InvalidColumn(9))));
    }

    #[test]
    fn pyramids() {
        assert!(!is_pyramid(&[ivec(&[1, 0])]));
        assert!(is_pyramid(&[ivec(&[1, 0]), ivec(&[1, 1])]));
        assert!(!is_pyramid(&[ivec(&[1, 0]), ivec(&[1, 1]), ivec(&[1, 2])]));
        assert!(is_pyramid(&[ivec(&[1, 0, 0]), ivec(&[1, 1, 0]), ivec(&[1, 2, 0]), ivec(&[1, 0, 1])]));
    }

    #[test]
    fn aux_point_examples() {
        let a = marked_triangle().extend(&[ivec(&[1, 0, 1])]).unwrap();
        let k = a.len() - 1;
        let aux = a.position(&ivec(&[1, 0, 2])).unwrap();
        assert!(check_aux_point(&a, k, aux).unwrap().is_certified());
        assert!(!check_aux_point(&a, 0, aux).unwrap().is_certified());

        let s = seven_points().extend(&[ivec(&[1, 1, 1, 1])]).unwrap();
        for aux in 0..7 {
            match check_aux_point(&s, 7, aux).unwrap() {
                AuxOutcome::Rejected(why) => assert!(why.contains("multiplicity"), "{why}"),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn chains() {
        let a = marked_triangle();
        let chain = reduction_chain(&a, SaturationMode::P).unwrap();
        assert!(chain.is_complete());
        let added: Vec<Vec<Int>> = chain.steps.iter().map(|s| s.added.clone()).collect();
        assert_eq!(added, vec![ivec(&[1, 0, 1]), ivec(&[1, 2, 0])]);
        let again = reduction_chain(&chain.end, SaturationMode::P).unwrap();
        assert!(again.steps.is_empty() && again.is_complete());
        let stuck = reduction_chain(&seven_points(), SaturationMode::S).unwrap();
        assert_eq!(stuck.obstruction, Some(vec![ivec(&[1, 1, 1, 1])]));
    }

    #[test]
    fn dim2_witness() {
        let p = saturate(&marked_triangle(), SaturationMode::P).unwrap().result;
        let w = dim2_interior_witness(&p).unwrap().unwrap();
        assert_eq!(w.point, ivec(&[1, 1, 1]));
        assert!(w.certificate.is_certified());
        let unimodular = PointConfiguration::from_i64_columns(&[&[1, 0, 0], &[1, 1, 0], &[1, 0, 1]]).unwrap();
        assert!(dim2_interior_witness(&unimodular).unwrap().is_none());
        let seg = PointConfiguration::curve(&[0, 1, 3]).unwrap();
        assert!(matches!(dim2_interior_witness(&seg), Err(Error::WrongDimension(_))));
    }
}
