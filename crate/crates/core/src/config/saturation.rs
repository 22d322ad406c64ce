//! Face saturations.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::PointConfiguration;
use crate::error::{Error, Result};
use crate::lattice::{lattice_span, SpanMode};
use crate::matrix::Int;
use crate::polytope::Face;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SaturationMode {
    /// Saturate every face.
    S,
    /// Saturate only the faces of the semi-ideal `F_int`.
    P,
    /// All points of `N ∩ Z_A`.
    Full,
}

impl FromStr for SaturationMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s" => Ok(SaturationMode::S),
            "p" => Ok(SaturationMode::P),
            "full" => Ok(SaturationMode::Full),
            other => Err(Error::Unsupported(format!("saturation mode {other:?}"))),
        }
    }
}

impl fmt::Display for SaturationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SaturationMode::S => "s",
            SaturationMode::P => "p",
            SaturationMode::Full => "full",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SaturationResult {
    pub mode: SaturationMode,
    /// New points in lexicographic order.
    pub added_points: Vec<Vec<Int>>,
    /// The input columns followed by the added points.
    pub result: PointConfiguration,
}

fn face_points(a: &PointConfiguration, faces: &[Face]) -> Result<BTreeSet<Vec<Int>>> {
    let mut out = BTreeSet::new();
    for f in faces {
        let lat = a.face_lattice(f)?;
        out.extend(a.polytope().relative_interior_lattice_points(f, &lat)?);
    }
    Ok(out)
}

pub fn saturate(a: &PointConfiguration, mode: SaturationMode) -> Result<SaturationResult> {
    let found: BTreeSet<Vec<Int>> = match mode {
        SaturationMode::S => face_points(a, a.faces())?,
        SaturationMode::P => face_points(a, &a.face_int_semiideal())?,
        SaturationMode::Full => {
            let lat = lattice_span(&a.columns(), SpanMode::Affine)?;
            a.polytope().lattice_points_in_face(a.top_face(), &lat)?.into_iter().collect()
        }
    };
    let existing: BTreeSet<Vec<Int>> = a.columns().into_iter().collect();
    let added_points: Vec<Vec<Int>> = found.difference(&existing).cloned().collect();
    let result = a.extend(&added_points)?;
    Ok(SaturationResult { mode, added_points, result })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use crate::lattice::ivec;
    use proptest::prelude::*;

    #[test]
    fn marked_triangle_saturations() {
        let a = marked_triangle();
        let p = saturate(&a, SaturationMode::P).unwrap();
        assert_eq!(p.added_points, vec![ivec(&[1, 0, 1]), ivec(&[1, 2, 0])]);
        let s = saturate(&a, SaturationMode::S).unwrap();
        assert_eq!(s.added_points, vec![ivec(&[1, 0, 1]), ivec(&[1, 1, 1]), ivec(&[1, 2, 0])]);
        let full = saturate(&a, SaturationMode::Full).unwrap();
        assert_eq!(full.result.len(), 10);
    }

    #[test]
    fn seven_point_saturation() {
        let s = saturate(&seven_points(), SaturationMode::S).unwrap();
        assert_eq!(s.added_points, vec![ivec(&[1, 1, 1, 1])]);
    }

    /// Brute-force saturation oracle for planar configurations `(1, x, y)`:
    /// enumerate the integer box, test membership of each face's relative
    /// interior directly via barycentric sign tests, and membership of each
    /// face lattice by solving small systems.
    fn planar_oracle(pts: &[(i64, i64)], mode: SaturationMode) -> BTreeSet<(i64, i64)> {
        let a = PointConfiguration::from_columns(&pts.iter().map(|&(x, y)| ivec(&[1, x, y])).collect::<Vec<_>>()).unwrap();
        let mut out = BTreeSet::new();
        let (lo, hi) = (-6, 6);
        let faces: Vec<Face> = match mode {
            SaturationMode::P => a.face_int_semiideal(),
            _ => a.faces().to_vec(),
        };
        for x in lo..=hi {
            for y in lo..=hi {
                let p = ivec(&[1, x, y]);
                for f in &faces {
                    let fl = a.face_lattice(f).unwrap();
                    let inside = match &f.supporting {
                        None => a.polytope().facets().iter().all(|fc| crate::matrix::dot_int(&fc.normal, &p) < fc.offset),
                        Some((h, c)) => {
                            crate::matrix::dot_int(h, &p) == *c
                                && a.polytope().facets().iter().all(|fc| {
                                    let v = crate::matrix::dot_int(&fc.normal, &p);
                                    let on_face = f.indices.iter().all(|&i| crate::matrix::dot_int(&fc.normal, &a.column(i)) == fc.offset);
                                    if on_face { v == fc.offset } else { v < fc.offset }
                                })
                        }
                    };
                    let inside = inside || (f.dim == 0 && p == a.column(f.indices[0]));
                    if inside && fl.contains(&p) && a.polytope().contains(&p) {
                        out.insert((x, y));
                    }
                }
            }
        }
        for &q in pts {
            out.remove(&q);
        }
        out
    }

    #[test]
    fn planar_oracle_agrees_on_example() {
        let pts = [(0, 0), (3, 0), (0, 3), (1, 0), (0, 2)];
        for mode in [SaturationMode::S, SaturationMode::P] {
            let got: BTreeSet<(i64, i64)> = saturate(&marked_triangle(), mode)
                .unwrap()
                .added_points
                .iter()
                .map(|p| (i64::try_from(&p[1]).unwrap(), i64::try_from(&p[2]).unwrap()))
                .collect();
            assert_eq!(got, planar_oracle(&pts, mode));
        }
    }

    fn planar_config() -> impl Strategy<Value = Vec<(i64, i64)>> {
        proptest::collection::btree_set((-3i64..=3, -3i64..=3), 3..7).prop_map(|s| s.into_iter().collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn saturation_properties(pts in planar_config()) {
            let cols: Vec<Vec<Int>> = pts.iter().map(|&(x, y)| ivec(&[1, x, y])).collect();
            let a = PointConfiguration::from_columns(&cols).unwrap();
            let p = saturate(&a, SaturationMode::P).unwrap();
            let s = saturate(&a, SaturationMode::S).unwrap();
            let full = saturate(&a, SaturationMode::Full).unwrap();
            let ps: BTreeSet<_> = p.result.columns().into_iter().collect();
            let ss: BTreeSet<_> = s.result.columns().into_iter().collect();
            let fs: BTreeSet<_> = full.result.columns().into_iter().collect();
            prop_assert!(ps.is_subset(&ss) && ss.is_subset(&fs));
            prop_assert_eq!(s.result.polytope().vertices().len(), a.polytope().vertices().len());
            for mode in [SaturationMode::S, SaturationMode::P, SaturationMode::Full] {
                let once = saturate(&a, mode).unwrap().result;
                prop_assert!(saturate(&once, mode).unwrap().added_points.is_empty());
            }
            // face lattices of A^s coincide with those of A
            for f in a.faces() {
                let g = s.result.corresponding_face(&a, f).unwrap();
                prop_assert_eq!(a.face_lattice(f).unwrap(), s.result.face_lattice(g).unwrap());
            }
            if a.dim() == 2 {
                let oracle: BTreeSet<(i64, i64)> = planar_oracle(&pts, SaturationMode::S);
                let got: BTreeSet<(i64, i64)> = s.added_points.iter().map(|p| (i64::try_from(&p[1]).unwrap(), i64::try_from(&p[2]).unwrap())).collect();
                prop_assert_eq!(got, oracle);
            }
        }
    }

    #[test]
    fn full_saturation_counts_lattice_points() {
        // Pick's theorem oracle on the marked triangle: area 9/2,
        // boundary points 9, so 9/2 - 9/2 + 1 = 1 interior and 10 total.
        let full = saturate(&marked_triangle(), SaturationMode::Full).unwrap().result;
        let boundary = full.columns().iter().filter(|p| full.polytope().minimal_face_index(p).unwrap() != full.faces().len() - 1).count();
        assert_eq!(boundary, 9);
        assert_eq!(full.len() - boundary, 1);
        assert_eq!(full.len(), 10);
    }
}
