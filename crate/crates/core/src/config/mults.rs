//! Indices, subdiagram volumes and multiplicities of faces.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::PointConfiguration;
use crate::error::{Error, Result};
use crate::lattice::{lattice_index, quotient, Index, Lattice, QuotientLattice};
use crate::matrix::{dot_int, rat_from_int, Int, Rat};
use crate::polytope::{convex_hull, Face};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityRecord {
    pub face: Face,
    pub index_i: Int,
    pub subvol_v: Int,
    pub mult_m: Int,
}

/// `[Z_A ∩ span(Γ) : Z_{A∩Γ}]`, with `Z_{A∩Γ}` the group generated by the
/// face's columns.
pub fn index_i(a: &PointConfiguration, face: &Face) -> Result<Int> {
    a.check_face(face)?;
    let cols = a.columns_on(face);
    let sub = Lattice::from_generators(a.ambient_dim(), &cols)?;
    let sup = a.lattice().intersect_span(&cols)?;
    match lattice_index(&sup, &sub)? {
        Index::Finite(v) => Ok(v),
        Index::Infinite => Err(Error::Hypothesis("face lattice has smaller rank than its span".into())),
    }
}

/// The quotient `Z_A / (Z_A ∩ span Γ)` and the distinct images of the
/// columns off the face.
pub fn quotient_generators(a: &PointConfiguration, face: &Face) -> Result<(QuotientLattice, Vec<Vec<Int>>)> {
    a.check_face(face)?;
    let kernel = a.lattice().intersect_span(&a.columns_on(face))?;
    let q = quotient(a.lattice(), &kernel, true)?;
    let mut gens = BTreeSet::new();
    for i in (0..a.len()).filter(|&i| !face.contains(i)) {
        let g = q.project(&a.column(i))?;
        debug_assert!(g.iter().any(|x| !x.is_zero()), "off-face columns leave the face span");
        gens.insert(g);
    }
    Ok((q, gens.into_iter().collect()))
}

/// Lattice volume of `cone(G) \ conv(S \ 0)` for the semigroup `S` of the
/// quotient, which equals one for the whole polytope.
///
/// For `S` generated by `G`, every nonzero element is `g + s` with `g ∈ G`
/// and `s ∈ S`, so `S \ 0 = ∪_g (g + S)` and hence
/// `conv(S \ 0) ⊆ conv(G) + cone(G)`. Conversely `conv(S \ 0)` contains
/// `G`, is convex, and is stable under adding any `g ∈ G`; stability under
/// integer multiples plus convexity gives stability under `t g` for real
/// `t ≥ 0`, so it contains `conv(G) + cone(G)`. Thus
/// `conv(S \ 0) = conv(G) + cone(G) =: Q`.
///
/// Let `ℓ` be the sum of the inward facet normals of the pointed cone
/// `cone(G)`; it is positive on `cone(G) \ 0`. If `x ∈ cone(G)` and
/// `ℓ(x) ≥ max_G ℓ`, write `x = Σ μ_g g` with `μ ≥ 0`; then
/// `Σ μ_g ≥ 1`, and `x = c + (Σμ - 1) c` with `c = x / Σμ ∈ conv(G)`, so
/// `x ∈ Q`. Hence the difference region lies below level `max ℓ`, and
/// truncating both sets at `ℓ ≤ M = 1 + max ℓ` leaves it intact:
/// `v = vol(P1) - vol(P2)` with `P1 = cone(G) ∩ {ℓ ≤ M}` and
/// `P2 = Q ∩ {ℓ ≤ M}`. `P1` is the hull of `0` and the points `g M / ℓ(g)`.
/// The vertices of `P2` are vertices of `conv(G)` or crossings of the
/// unbounded edges `g_i + t r` (`r` an extreme ray) with `ℓ = M`; bounded
/// edges stay below `M`.
pub fn subdiagram_volume(a: &PointConfiguration, face: &Face) -> Result<Int> {
    a.check_face(face)?;
    if face.supporting.is_none() {
        return Ok(Int::one());
    }
    let (_, gens) = quotient_generators(a, face)?;
    semigroup_subdiagram_volume(&gens)
}

/// Inward facet normals of the pointed cone generated by `gens`, and the
/// indices of the generators spanning extreme rays.
fn cone_facets(gens: &[Vec<Int>]) -> Result<(Vec<Vec<Int>>, Vec<usize>)> {
    let q = gens[0].len();
    let mut pts = vec![vec![Int::zero(); q]];
    pts.extend(gens.iter().cloned());
    let hull = convex_hull(&pts)?;
    if hull.dim() != q {
        return Err(Error::Hypothesis("quotient generators do not span".into()));
    }
    let mut normals = Vec::new();
    for f in hull.facets() {
        if f.offset.is_zero() && f.indices.contains(&0) {
            normals.push(f.normal.iter().map(|x| -x).collect::<Vec<Int>>());
        }
    }
    // a generator spans an extreme ray iff it is tight on q - 1 independent cone facets
    let mut rays = Vec::new();
    let mut seen: BTreeSet<Vec<Rat>> = BTreeSet::new();
    for (i, g) in gens.iter().enumerate() {
        let tight: Vec<Vec<Rat>> = normals
            .iter()
            .filter(|n| dot_int(n, g).is_zero())
            .map(|n| crate::matrix::to_rat_vec(n))
            .collect();
        if q == 1 || crate::matrix::rat_rank(&tight) == q - 1 {
            let l1: Int = g.iter().map(|x| x.abs()).sum();
            let dir: Vec<Rat> = g.iter().map(|x| Rat::new(x.clone(), l1.clone())).collect();
            if seen.insert(dir) {
                rays.push(i);
            }
        }
    }
    Ok((normals, rays))
}

fn scaled_volume(points: &[Vec<Rat>]) -> Result<Rat> {
    let q = points[0].len();
    let den = points.iter().flatten().fold(Int::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<Vec<Int>> =
        points.iter().map(|p| p.iter().map(|x| (x * rat_from_int(&den)).to_integer()).collect()).collect();
    let mut uniq: Vec<Vec<Int>> = scaled;
    uniq.sort();
    uniq.dedup();
    let hull = convex_hull(&uniq)?;
    if hull.dim() < q {
        return Ok(Rat::zero());
    }
    let vol = hull.volume_in(&Lattice::full(q))?;
    Ok(vol / rat_from_int(&num_traits::pow(den, q)))
}

pub(crate) fn semigroup_subdiagram_volume(gens: &[Vec<Int>]) -> Result<Int> {
    if gens.is_empty() {
        return Ok(Int::one());
    }
    let (normals, rays) = cone_facets(gens)?;
    let mut ell = vec![Int::zero(); gens[0].len()];
    for n in &normals {
        for (e, x) in ell.iter_mut().zip(n) {
            *e += x;
        }
    }
    let levels: Vec<Int> = gens.iter().map(|g| dot_int(&ell, g)).collect();
    let m = levels.iter().max().cloned().unwrap() + Int::one();
    let mr = rat_from_int(&m);
    let to_rat = |g: &Vec<Int>| -> Vec<Rat> { g.iter().map(rat_from_int).collect() };
    let mut p1 = vec![vec![Rat::zero(); gens[0].len()]];
    for (g, l) in gens.iter().zip(&levels) {
        let s = &mr / rat_from_int(l);
        p1.push(g.iter().map(|x| rat_from_int(x) * &s).collect());
    }
    let mut p2: Vec<Vec<Rat>> = gens.iter().map(to_rat).collect();
    for (g, l) in gens.iter().zip(&levels) {
        for &j in &rays {
            let t = (&mr - rat_from_int(l)) / rat_from_int(&levels[j]);
            p2.push(g.iter().zip(&gens[j]).map(|(a, b)| rat_from_int(a) + &t * rat_from_int(b)).collect());
        }
    }
    let v = scaled_volume(&p1)? - scaled_volume(&p2)?;
    if !v.is_integer() || !v.is_positive() {
        return Err(Error::Hypothesis(format!("subdiagram volume {v} is not a positive integer")));
    }
    Ok(v.to_integer())
}

/// Independent computation of the subdiagram volume for quotient rank one
/// (semigroup enumeration) and two (box enumeration and planar hulls).
pub fn subdiagram_volume_oracle(a: &PointConfiguration, face: &Face) -> Result<Int> {
    if face.supporting.is_none() {
        return Ok(Int::one());
    }
    let (q, gens) = quotient_generators(a, face)?;
    let small: Vec<Vec<i64>> = gens
        .iter()
        .map(|g| g.iter().map(|x| i64::try_from(x).map_err(|_| Error::Unsupported("large quotient".into()))).collect())
        .collect::<Result<_>>()?;
    match q.quotient_rank {
        1 => Ok(Int::from(numerical_semigroup_min(&small))),
        2 => Ok(Int::from(planar_semigroup_volume(&small))),
        r => Err(Error::Unsupported(format!("oracle handles quotient rank 1 or 2, got {r}"))),
    }
}

/// Smallest positive element of the semigroup generated by integers of one
/// sign, by enumerating reachable values up to the largest generator.
fn numerical_semigroup_min(gens: &[Vec<i64>]) -> i64 {
    let vals: Vec<i64> = gens.iter().map(|g| g[0].abs()).collect();
    let top = *vals.iter().max().unwrap() as usize;
    let mut reach = vec![false; top + 1];
    reach[0] = true;
    for x in 0..=top {
        if reach[x] {
            for &v in &vals {
                if x + v as usize <= top {
                    reach[x + v as usize] = true;
                }
            }
        }
    }
    (1..=top).find(|&x| reach[x]).unwrap() as i64
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i128 {
    (a.0 - o.0) as i128 * (b.1 - o.1) as i128 - (a.1 - o.1) as i128 * (b.0 - o.0) as i128
}

fn monotone_chain(mut pts: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    pts.sort_unstable();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn twice_area(poly: &[(i64, i64)]) -> i128 {
    let n = poly.len();
    let s: i128 = (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a.0 as i128 * b.1 as i128 - b.0 as i128 * a.1 as i128
        })
        .sum();
    s.abs()
}

/// Normalized area between the hulls of the semigroup and of its nonzero
/// part, both cut off by a box large enough to contain the difference.
fn planar_semigroup_volume(gens: &[Vec<i64>]) -> i64 {
    let bound: i64 = 2 * (0..2).map(|c| gens.iter().map(|g| g[c].abs()).max().unwrap()).sum::<i64>();
    let side = (2 * bound + 1) as usize;
    let idx = |x: i64, y: i64| ((x + bound) as usize) * side + (y + bound) as usize;
    let mut reach = vec![false; side * side];
    reach[idx(0, 0)] = true;
    let mut stack = vec![(0i64, 0i64)];
    while let Some((x, y)) = stack.pop() {
        for g in gens {
            let (nx, ny) = (x + g[0], y + g[1]);
            if nx.abs() <= bound && ny.abs() <= bound && !reach[idx(nx, ny)] {
                reach[idx(nx, ny)] = true;
                stack.push((nx, ny));
            }
        }
    }
    let mut all = Vec::new();
    for x in -bound..=bound {
        for y in -bound..=bound {
            if reach[idx(x, y)] {
                all.push((x, y));
            }
        }
    }
    let nonzero: Vec<(i64, i64)> = all.iter().copied().filter(|&p| p != (0, 0)).collect();
    (twice_area(&monotone_chain(all)) - twice_area(&monotone_chain(nonzero))) as i64
}

pub fn multiplicity(a: &PointConfiguration, face: &Face) -> Result<MultiplicityRecord> {
    let index_i = index_i(a, face)?;
    let subvol_v = subdiagram_volume(a, face)?;
    let mult_m = &index_i * &subvol_v;
    Ok(MultiplicityRecord { face: face.clone(), index_i, subvol_v, mult_m })
}

pub fn multiplicity_table(a: &PointConfiguration) -> Result<Vec<MultiplicityRecord>> {
    a.faces().iter().map(|f| multiplicity(a, f)).collect()
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;
    use crate::lattice::ivec;
    use crate::matrix::int;
    use proptest::prelude::*;

    fn vertex(a: &PointConfiguration, p: &[i64]) -> Face {
        a.face_containing(&[ivec(p)]).unwrap().clone()
    }

    #[test]
    fn curve_multiplicities() {
        let a = PointConfiguration::curve(&[0, 1, 3]).unwrap();
        let v3 = vertex(&a, &[1, 3]);
        let v0 = vertex(&a, &[1, 0]);
        assert_eq!(subdiagram_volume(&a, &v3).unwrap(), int(2));
        assert_eq!(subdiagram_volume_oracle(&a, &v3).unwrap(), int(2));
        assert_eq!(subdiagram_volume(&a, &v0).unwrap(), int(1));
        assert_eq!(index_i(&a, &v0).unwrap(), int(1));
        assert_eq!(index_i(&a, &v3).unwrap(), int(1));
        assert_eq!(multiplicity(&a, &v3).unwrap().mult_m, int(2));
        let top = multiplicity(&a, a.top_face()).unwrap();
        assert_eq!((top.index_i, top.subvol_v, top.mult_m), (int(1), int(1), int(1)));
    }

    #[test]
    fn diagonal_edge_index() {
        let a = marked_triangle();
        let diag = a.face_containing(&[ivec(&[1, 3, 0]), ivec(&[1, 0, 3])]).unwrap().clone();
        assert_eq!(index_i(&a, &diag).unwrap(), int(3));
        for r in multiplicity_table(&a).unwrap() {
            assert!(r.mult_m >= Int::one());
        }
    }

    #[test]
    fn oracle_pieces() {
        assert_eq!(numerical_semigroup_min(&[vec![2], vec![3]]), 2);
        assert_eq!(numerical_semigroup_min(&[vec![1]]), 1);
        assert_eq!(planar_semigroup_volume(&[vec![1, 0], vec![0, 1]]), 1);
        // cone over (2,0),(0,2),(1,1): region below the segment from (2,0) to (0,2)
        assert_eq!(planar_semigroup_volume(&[vec![2, 0], vec![0, 2], vec![1, 1]]), 4);
        assert_eq!(
            semigroup_subdiagram_volume(&[ivec(&[2, 0]), ivec(&[0, 2]), ivec(&[1, 1])]).unwrap(),
            int(4)
        );
    }

    #[test]
    fn redundant_point_lowers_subdiagram_volumes() {
        let a = seven_points();
        let s = a.extend(&[ivec(&[1, 1, 1, 1])]).unwrap();
        let g1 = a.face_containing(&[a.column(0), a.column(1), a.column(2)]).unwrap().clone();
        let g2 = a.face_containing(&[a.column(4), a.column(6)]).unwrap().clone();
        for g in [g1, g2] {
            let gs = s.corresponding_face(&a, &g).unwrap().clone();
            let va = subdiagram_volume(&a, &g).unwrap();
            let vs = subdiagram_volume(&s, &gs).unwrap();
            assert!(va > vs, "{va} > {vs}");
        }
    }

    fn random_planar_gens() -> impl Strategy<Value = Vec<Vec<Int>>> {
        proptest::collection::vec((0i64..=4, -4i64..=4), 2..6).prop_map(|v| {
            // keep generators in the open half-plane x > 0 or on the ray (0, 1)
            v.into_iter().map(|(x, y)| if x == 0 { ivec(&[0, 1 + y.abs()]) } else { ivec(&[x, y]) }).collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn planar_main_matches_enumeration(g in random_planar_gens()) {
            let rank = crate::matrix::rat_rank(&g.iter().map(|x| crate::matrix::to_rat_vec(x)).collect::<Vec<_>>());
            prop_assume!(rank == 2);
            let small: Vec<Vec<i64>> = g.iter().map(|x| x.iter().map(|v| i64::try_from(v).unwrap()).collect()).collect();
            prop_assert_eq!(semigroup_subdiagram_volume(&g).unwrap(), Int::from(planar_semigroup_volume(&small)));
        }
    }
}
