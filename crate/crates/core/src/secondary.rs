//! Regular triangulations, GKZ vectors and secondary polytopes.

use std::collections::{BTreeSet, VecDeque};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::PointConfiguration;
use crate::error::{Error, Result};
use crate::lp::{maximize, Constraint, LpOutcome, Relation};
use crate::matrix::{dot_rat, primitive_integer, rat_from_int, rat_solve, to_rat_vec, Int, IntMatrix, Rat};
use crate::polytope::{convex_hull, Polytope};

pub const DEFAULT_CAP: usize = 12;
const SEED_RETRIES: u64 = 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triangulation {
    /// Maximal simplices as sorted column-index sets, sorted.
    pub cells: Vec<Vec<usize>>,
    /// Lattice volume of each cell, normalized to `Z_A`.
    pub volumes: Vec<Int>,
}

impl Triangulation {
    pub fn used_points(&self) -> BTreeSet<usize> {
        self.cells.iter().flatten().copied().collect()
    }
}

/// Volume of a cell in the intrinsic coordinates of the configuration.
fn cell_volume(a: &PointConfiguration, cell: &[usize]) -> Int {
    let y = a.polytope().local_points();
    let rows: Vec<Vec<Int>> =
        cell[1..].iter().map(|&i| y[i].iter().zip(&y[cell[0]]).map(|(p, q)| p - q).collect()).collect();
    if rows.is_empty() {
        return Int::one();
    }
    IntMatrix::from_rows(&rows).unwrap().det().unwrap().abs()
}

fn build(a: &PointConfiguration, mut cells: Vec<Vec<usize>>) -> Triangulation {
    for c in cells.iter_mut() {
        c.sort_unstable();
    }
    cells.sort();
    let volumes = cells.iter().map(|c| cell_volume(a, c)).collect();
    Triangulation { cells, volumes }
}

/// Projects the lower hull of the lifted points `(y_i, ω_i)`.
pub fn regular_triangulation(a: &PointConfiguration, heights: &[Rat]) -> Result<Triangulation> {
    if heights.len() != a.len() {
        return Err(Error::Dimension { expected: a.len(), got: heights.len() });
    }
    let d = a.dim();
    let den = heights.iter().fold(Int::one(), |acc, h| acc.lcm(h.denom()));
    let y = a.polytope().local_points();
    let lifted: Vec<Vec<Int>> = y
        .iter()
        .zip(heights)
        .map(|(p, h)| {
            let mut v = p.clone();
            v.push((h * rat_from_int(&den)).to_integer());
            v
        })
        .collect();
    let hull = convex_hull(&lifted)?;
    let cells: Vec<Vec<usize>> = if hull.dim() == d {
        vec![(0..a.len()).collect()]
    } else {
        hull.facets().iter().filter(|f| f.normal[d].is_negative()).map(|f| f.indices.clone()).collect()
    };
    if let Some(c) = cells.iter().find(|c| c.len() != d + 1) {
        return Err(Error::DegenerateHeights { points: c.len() });
    }
    Ok(build(a, cells))
}

pub fn gkz_vector(a: &PointConfiguration, t: &Triangulation) -> Vec<Int> {
    let mut phi = vec![Int::zero(); a.len()];
    for (c, v) in t.cells.iter().zip(&t.volumes) {
        for &i in c {
            phi[i] += v;
        }
    }
    phi
}

/// Affine coordinates of intrinsic point `j` with respect to a cell.
fn barycentric(a: &PointConfiguration, cell: &[usize], j: usize) -> Vec<Rat> {
    let y = a.polytope().local_points();
    let d = a.dim();
    let mut rows: Vec<Vec<Rat>> = (0..d).map(|r| cell.iter().map(|&v| rat_from_int(&y[v][r])).collect()).collect();
    rows.push(vec![Rat::one(); cell.len()]);
    let mut rhs = to_rat_vec(&y[j]);
    rhs.push(Rat::one());
    rat_solve(&rows, &rhs).expect("cells are affinely independent")
}

/// Inequalities `g . ω > 0` cutting out the open secondary cone of `t`:
/// local folding conditions across interior walls, plus one condition per
/// unused point with respect to a cell containing it.
fn chamber_inequalities(a: &PointConfiguration, t: &Triangulation) -> Vec<Vec<Int>> {
    let n = a.len();
    let d = a.dim();
    let mut out: BTreeSet<Vec<Int>> = BTreeSet::new();
    let mut push = |cell: &[usize], j: usize| {
        let lam = barycentric(a, cell, j);
        let mut g = vec![Rat::zero(); n];
        g[j] = Rat::one();
        for (&v, l) in cell.iter().zip(&lam) {
            g[v] -= l;
        }
        out.insert(primitive_integer(&g));
    };
    for (x, cx) in t.cells.iter().enumerate() {
        for cy in t.cells.iter().skip(x + 1) {
            let shared = cx.iter().filter(|i| cy.contains(i)).count();
            if shared == d {
                let j = *cy.iter().find(|i| !cx.contains(i)).unwrap();
                push(cx, j);
            }
        }
    }
    let used = t.used_points();
    for j in (0..n).filter(|j| !used.contains(j)) {
        let host = t
            .cells
            .iter()
            .find(|c| barycentric(a, c, j).iter().all(|l| !l.is_negative()))
            .expect("triangulation covers the polytope");
        push(host, j);
    }
    out.into_iter().collect()
}

/// A point in the relative interior of the wall `g = 0` of the chamber,
/// with the minimum slack of the other inequalities, if the wall is a facet.
fn wall_point(ineqs: &[Vec<Int>], g: &[Int]) -> Option<(Vec<Rat>, Rat)> {
    let n = g.len();
    let mut cons = Vec::new();
    let mut eq = to_rat_vec(g);
    eq.push(Rat::zero());
    cons.push(Constraint::new(eq, Relation::Eq, Rat::zero()));
    for h in ineqs.iter().filter(|h| h.as_slice() != g) {
        let mut row = to_rat_vec(h);
        row.push(-Rat::one());
        cons.push(Constraint::new(row, Relation::Ge, Rat::zero()));
    }
    let mut cap = vec![Rat::zero(); n];
    cap.push(Rat::one());
    cons.push(Constraint::new(cap.clone(), Relation::Le, Rat::one()));
    match maximize(&cap, &cons) {
        LpOutcome::Optimal { value, mut point } if value.is_positive() => {
            point.pop();
            Some((point, value))
        }
        _ => None,
    }
}

fn satisfies_closed(ineqs: &[Vec<Int>], w: &[Rat]) -> bool {
    ineqs.iter().all(|g| !dot_rat(&to_rat_vec(g), w).is_negative())
}

fn random_heights(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rat> {
    (0..n).map(|_| Rat::from_integer(Int::from(rng.gen_range(0..1_000_000i64)))).collect()
}

fn random_triangulation(a: &PointConfiguration, rng: &mut ChaCha8Rng) -> Result<Triangulation> {
    for _ in 0..64 {
        match regular_triangulation(a, &random_heights(rng, a.len())) {
            Err(Error::DegenerateHeights { .. }) => continue,
            other => return other,
        }
    }
    Err(Error::Numeric("could not find generic heights".into()))
}

pub fn enumerate_regular_triangulations(a: &PointConfiguration) -> Result<Vec<Triangulation>> {
    enumerate_regular_triangulations_capped(a, DEFAULT_CAP)
}

/// Walks the chambers of the secondary fan: from each triangulation, every
/// facet of its secondary cone is crossed to reach the neighbour.
pub fn enumerate_regular_triangulations_capped(a: &PointConfiguration, cap: usize) -> Result<Vec<Triangulation>> {
    if a.len() > cap {
        return Err(Error::CapExceeded { size: a.len(), cap });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let start = random_triangulation(a, &mut rng)?;
    let mut seen: BTreeSet<Triangulation> = BTreeSet::new();
    let mut queue = VecDeque::from([start.clone()]);
    seen.insert(start);
    while let Some(t) = queue.pop_front() {
        let ineqs = chamber_inequalities(a, &t);
        for g in &ineqs {
            let Some((w0, slack)) = wall_point(&ineqs, g) else { continue };
            let gr = to_rat_vec(g);
            let spread = ineqs
                .iter()
                .map(|h| dot_rat(&to_rat_vec(h), &gr).abs())
                .fold(Rat::one(), |m, x| if x > m { x } else { m });
            let mut eps = slack / (spread * Rat::from_integer(Int::from(2)));
            let mut found = None;
            for _ in 0..40 {
                let w1: Vec<Rat> = w0.iter().zip(&gr).map(|(w, x)| w - &eps * x).collect();
                match regular_triangulation(a, &w1) {
                    Ok(t1) if t1 != t && satisfies_closed(&chamber_inequalities(a, &t1), &w0) => {
                        found = Some(t1);
                        break;
                    }
                    Ok(_) | Err(Error::DegenerateHeights { .. }) => eps /= Rat::from_integer(Int::from(2)),
                    Err(e) => return Err(e),
                }
            }
            let t1 = found.ok_or_else(|| Error::Numeric("could not cross a wall of the secondary fan".into()))?;
            if seen.insert(t1.clone()) {
                queue.push_back(t1);
            }
        }
    }
    for seed in 0..SEED_RETRIES {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let t = random_triangulation(a, &mut r)?;
        if !seen.contains(&t) {
            return Err(Error::Hypothesis(format!("seed {seed} reached a triangulation missed by the walk")));
        }
    }
    Ok(seen.into_iter().collect())
}

pub fn secondary_polytope(a: &PointConfiguration) -> Result<Polytope> {
    let ts = enumerate_regular_triangulations(a)?;
    let vecs: BTreeSet<Vec<Int>> = ts.iter().map(|t| gkz_vector(a, t)).collect();
    convex_hull(&vecs.into_iter().collect::<Vec<_>>())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacetRestrictionReport {
    pub column: usize,
    /// GKZ vertices of `Σ_A` with vanishing coordinate `i`.
    pub face_vertices: Vec<Vec<Int>>,
    /// GKZ vertices of `Σ_{A_i}` with a zero inserted at position `i`.
    pub restricted_vertices: Vec<Vec<Int>>,
    pub holds: bool,
}

pub fn check_facet_restriction(a: &PointConfiguration, i: usize) -> Result<FacetRestrictionReport> {
    if i >= a.len() {
        return Err(Error::InvalidColumn(i));
    }
    if a.is_vertex(i) {
        return Err(Error::Hypothesis(format!("column {i} is a vertex")));
    }
    let ai = a.remove(i)?;
    if ai.lattice() != a.lattice() {
        return Err(Error::Hypothesis(format!("removing column {i} shrinks the lattice")));
    }
    let full: BTreeSet<Vec<Int>> = enumerate_regular_triangulations(a)?.iter().map(|t| gkz_vector(a, t)).collect();
    let face_vertices: Vec<Vec<Int>> = full.into_iter().filter(|v| v[i].is_zero()).collect();
    let restricted: BTreeSet<Vec<Int>> = enumerate_regular_triangulations(&ai)?
        .iter()
        .map(|t| {
            let mut v = gkz_vector(&ai, t);
            v.insert(i, Int::zero());
            v
        })
        .collect();
    let restricted_vertices: Vec<Vec<Int>> = restricted.into_iter().collect();
    let holds = face_vertices == restricted_vertices;
    Ok(FacetRestrictionReport { column: i, face_vertices, restricted_vertices, holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ivec;
    use crate::matrix::{int, rat};
    use proptest::prelude::*;

    fn r(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat(x, 1)).collect()
    }

    #[test]
    fn curve_triangulations() {
        let a = PointConfiguration::curve(&[0, 1, 3]).unwrap();
        let t = regular_triangulation(&a, &r(&[0, 1, 0])).unwrap();
        assert_eq!(t.cells, vec![vec![0, 2]]);
        assert_eq!(gkz_vector(&a, &t), ivec(&[3, 0, 3]));
        let t = regular_triangulation(&a, &r(&[0, -1, 0])).unwrap();
        assert_eq!(t.cells, vec![vec![0, 1], vec![1, 2]]);
        assert_eq!(gkz_vector(&a, &t), ivec(&[1, 3, 2]));
        assert!(matches!(regular_triangulation(&a, &r(&[0, 1, 3])), Err(Error::DegenerateHeights { points: 3 })));
    }

    #[test]
    fn enumeration_counts() {
        let a = PointConfiguration::curve(&[0, 1, 3]).unwrap();
        assert_eq!(enumerate_regular_triangulations(&a).unwrap().len(), 2);
        let b = PointConfiguration::curve(&[0, 1, 2]).unwrap();
        assert_eq!(enumerate_regular_triangulations(&b).unwrap().len(), 2);
        let s = PointConfiguration::from_i64_columns(&[&[1, 0, 0], &[1, 1, 0], &[1, 0, 1]]).unwrap();
        let ts = enumerate_regular_triangulations(&s).unwrap();
        assert_eq!(ts.len(), 1);
        assert_eq!(gkz_vector(&s, &ts[0]), ivec(&[1, 1, 1]));
        // a square has two triangulations, a convex pentagon five
        let sq = PointConfiguration::from_i64_columns(&[&[1, 0, 0], &[1, 1, 0], &[1, 0, 1], &[1, 1, 1]]).unwrap();
        assert_eq!(enumerate_regular_triangulations(&sq).unwrap().len(), 2);
        let pent = PointConfiguration::from_i64_columns(&[&[1, 0, 0], &[1, 2, 0], &[1, 3, 2], &[1, 1, 3], &[1, -1, 2]]).unwrap();
        assert_eq!(enumerate_regular_triangulations(&pent).unwrap().len(), 5);
        let big = PointConfiguration::curve(&(0..13).collect::<Vec<_>>()).unwrap();
        assert!(matches!(enumerate_regular_triangulations(&big), Err(Error::CapExceeded { size: 13, cap: 12 })));
    }

    #[test]
    fn secondary_polytopes() {
        let a = PointConfiguration::curve(&[0, 1, 3]).unwrap();
        let sp = secondary_polytope(&a).unwrap();
        assert_eq!(sp.points(), &[ivec(&[1, 3, 2]), ivec(&[3, 0, 3])]);
        assert_eq!(sp.dim(), 1);
        let b = PointConfiguration::curve(&[0, 1, 2]).unwrap();
        assert_eq!(secondary_polytope(&b).unwrap().points(), &[ivec(&[1, 2, 1]), ivec(&[2, 0, 2])]);
        let s = PointConfiguration::from_i64_columns(&[&[1, 0, 0], &[1, 1, 0], &[1, 0, 1]]).unwrap();
        assert_eq!(secondary_polytope(&s).unwrap().dim(), 0);
    }

    #[test]
    fn facet_restriction() {
        let a = PointConfiguration::curve(&[0, 1, 2, 3]).unwrap();
        let rep = check_facet_restriction(&a, 2).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.face_vertices, vec![ivec(&[1, 3, 0, 2]), ivec(&[3, 0, 0, 3])]);
        let b = PointConfiguration::curve(&[0, 1, 2]).unwrap();
        assert!(matches!(check_facet_restriction(&b, 1), Err(Error::Hypothesis(_))));
        let ex = PointConfiguration::from_i64_columns(&[&[1, 0, 0], &[1, 3, 0], &[1, 0, 3], &[1, 1, 0], &[1, 0, 2]]).unwrap();
        assert!(matches!(check_facet_restriction(&ex, 3), Err(Error::Hypothesis(_))));
        assert!(matches!(check_facet_restriction(&a, 0), Err(Error::Hypothesis(_))));
    }

    /// Brute-force count of triangulations of points on a line: any subset
    /// of interior points together with both endpoints, all regular.
    #[test]
    fn curve_count_matches_subsets() {
        for exps in [vec![0, 1], vec![0, 2, 3], vec![0, 1, 2, 4], vec![0, 1, 3, 4, 7]] {
            let a = PointConfiguration::curve(&exps).unwrap();
            let n = enumerate_regular_triangulations(&a).unwrap().len();
            assert_eq!(n, 1 << (exps.len() - 2));
        }
    }

    fn planar() -> impl Strategy<Value = Vec<(i64, i64)>> {
        proptest::collection::btree_set((0i64..=3, 0i64..=3), 3..7).prop_map(|s| s.into_iter().collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn gkz_sum_and_affine_invariance(pts in planar(), seed in 0u64..1000) {
            let cols: Vec<Vec<Int>> = pts.iter().map(|&(x, y)| ivec(&[1, x, y])).collect();
            let a = PointConfiguration::from_columns(&cols).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_triangulation(&a, &mut rng).unwrap();
            let vol = a.polytope().normalized_volume().to_integer();
            let total: Int = gkz_vector(&a, &t).iter().sum();
            prop_assert_eq!(total, int(a.dim() as i64 + 1) * &vol);
            let vsum: Int = t.volumes.iter().sum();
            prop_assert_eq!(vsum, vol);
            let h = random_heights(&mut ChaCha8Rng::seed_from_u64(seed), a.len());
            if let Ok(t0) = regular_triangulation(&a, &h) {
                let shifted: Vec<Rat> = h.iter().zip(&pts).map(|(w, &(x, y))| w + rat(3 * x - 7 * y + 11, 1)).collect();
                prop_assert_eq!(regular_triangulation(&a, &shifted).unwrap(), t0);
            }
        }
    }
}
