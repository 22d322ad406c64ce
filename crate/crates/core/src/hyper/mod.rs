//! A-hypergeometric systems on truncated series: toric kernels, parameters,
//! Γ-series, operator actions, and the extension of solutions across a
//! lattice-redundant column.

mod extension;
mod series;

pub use extension::{admissible_representatives, extend_solution, restrict_to_hyperplane, shifted_solution, Extension};
pub use series::{
    annihilation_check, antiderivative, apply_operator, gamma_series, gamma_series_at, AnnihilationFailure,
    AnnihilationReport, KnownRegion, OperatorSpec, TruncatedSeries,
};

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use num_traits::Zero;

use crate::config::PointConfiguration;
use crate::error::{Error, Result};
use crate::lattice::integer_kernel;
use crate::matrix::{rat_from_int, Int, IntMatrix, Rat};
use crate::polytope::Face;

/// An exact rational parameter `β`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParameterVector(Vec<Rat>);

impl ParameterVector {
    pub fn new(entries: Vec<Rat>) -> Self {
        ParameterVector(entries)
    }

    /// Parses entries written as `"p/q"` or `"p"`.
    pub fn parse<S: AsRef<str>>(entries: &[S]) -> Result<Self> {
        entries
            .iter()
            .map(|s| {
                let s = s.as_ref().trim();
                Rat::from_str(s).map_err(|_| Error::Unsupported(format!("not an exact rational: {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(ParameterVector)
    }

    pub fn entries(&self) -> &[Rat] {
        &self.0
    }

    pub fn check_len(&self, a: &PointConfiguration) -> Result<()> {
        if self.0.len() != a.ambient_dim() {
            return Err(Error::Dimension { expected: a.ambient_dim(), got: self.0.len() });
        }
        Ok(())
    }
}

impl Deref for ParameterVector {
    type Target = [Rat];
    fn deref(&self) -> &[Rat] {
        &self.0
    }
}

impl fmt::Display for ParameterVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|r| r.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A basis of `{u in Z^k : A u = 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelBasis {
    pub vectors: Vec<Vec<i64>>,
}

impl KernelBasis {
    pub fn rank(&self) -> usize {
        self.vectors.len()
    }
}

pub(crate) fn to_i64(v: &[Int]) -> Result<Vec<i64>> {
    v.iter().map(|x| i64::try_from(x).map_err(|_| Error::Unsupported("kernel entry exceeds 64 bits".into()))).collect()
}

pub fn toric_kernel_basis(a: &IntMatrix) -> Result<KernelBasis> {
    let k = integer_kernel(a);
    let vectors = k.columns().iter().map(|c| to_i64(c)).collect::<Result<Vec<_>>>()?;
    Ok(KernelBasis { vectors })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResonanceWitness {
    pub facet: Face,
    /// Basis of the primitive integer functionals vanishing on the facet span.
    pub functionals: Vec<Vec<Int>>,
    /// Their values at `β`, all integers.
    pub values: Vec<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonresonanceReport {
    pub nonresonant: bool,
    pub witness: Option<ResonanceWitness>,
}

/// Functionals cutting out the linear span of a face: a basis of the
/// saturated lattice `{h in Z^{1+n} : h . alpha = 0 for alpha in the face}`.
pub(crate) fn span_functionals(a: &PointConfiguration, face: &Face) -> Result<Vec<Vec<Int>>> {
    let rows = a.columns_on(face);
    let m = IntMatrix::from_rows(&rows)?;
    Ok(integer_kernel(&m).columns())
}

/// `β` is resonant iff some integer translate `β - γ` lies in the span of a
/// facet. With `h_1, …, h_s` a basis of the integer functionals vanishing on
/// that span, the map `x -> (h_i(x))` sends `Z^{1+n}` onto `Z^s` (the basis
/// extends to a basis of the dual lattice), so the condition is exactly
/// `h_i(β) ∈ Z` for all `i`. For full-rank `A` this is the single primitive
/// facet functional.
pub fn is_nonresonant(a: &PointConfiguration, beta: &[Rat]) -> Result<NonresonanceReport> {
    if beta.len() != a.ambient_dim() {
        return Err(Error::Dimension { expected: a.ambient_dim(), got: beta.len() });
    }
    let d = a.dim();
    if d == 0 {
        return Ok(NonresonanceReport { nonresonant: true, witness: None });
    }
    for face in a.faces().iter().filter(|f| f.dim + 1 == d) {
        let functionals = span_functionals(a, face)?;
        let values: Vec<Rat> = functionals
            .iter()
            .map(|h| h.iter().zip(beta).fold(Rat::zero(), |acc, (x, b)| acc + rat_from_int(x) * b))
            .collect();
        if values.iter().all(|v| v.is_integer()) {
            return Ok(NonresonanceReport {
                nonresonant: false,
                witness: Some(ResonanceWitness { facet: face.clone(), functionals, values }),
            });
        }
    }
    Ok(NonresonanceReport { nonresonant: true, witness: None })
}

/// Normalized volume of the Newton polytope with respect to `Z_A`, which is
/// the holonomic rank for nonresonant parameters.
pub fn rank_volume(a: &PointConfiguration) -> Int {
    a.polytope().normalized_volume().to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::fixtures::marked_triangle;
    use crate::config::{saturate, SaturationMode};
    use crate::lattice::ivec;
    use crate::matrix::{rat, rat_nullspace, to_rat_vec};
    use proptest::prelude::*;
    use std::collections::HashSet;

    #[test]
    fn kernels() {
        let c = PointConfiguration::curve(&[0, 1, 3]).unwrap();
        let k = toric_kernel_basis(c.matrix()).unwrap();
        assert_eq!(k.vectors, vec![vec![2, -3, 1]]);
        let prod = c.matrix().mul_vec(&ivec(&k.vectors[0]));
        assert!(prod.iter().all(|x| x.is_zero()));
        let sq = PointConfiguration::from_i64_columns(&[&[1, 0, 0], &[1, 1, 0], &[1, 0, 1], &[1, 1, 1]]).unwrap();
        assert_eq!(toric_kernel_basis(sq.matrix()).unwrap().rank(), 1);
        let simplex = PointConfiguration::from_i64_columns(&[&[1, 0], &[1, 1]]).unwrap();
        assert_eq!(toric_kernel_basis(simplex.matrix()).unwrap().rank(), 0);
    }

    #[test]
    fn nonresonance_on_cubic_curve() {
        let c = PointConfiguration::curve(&[0, 1, 3]).unwrap();
        assert!(is_nonresonant(&c, &[rat(0, 1), rat(1, 2)]).unwrap().nonresonant);
        let r = is_nonresonant(&c, &[rat(0, 1), rat(0, 1)]).unwrap();
        assert!(!r.nonresonant);
        assert!(r.witness.unwrap().values.iter().all(|v| v.is_zero()));
        let r = is_nonresonant(&c, &[rat(1, 3), rat(1, 1)]).unwrap();
        assert!(!r.nonresonant);
        assert_eq!(r.witness.unwrap().functionals, vec![ivec(&[0, 1])]);
    }

    #[test]
    fn parameter_parsing() {
        let b = ParameterVector::parse(&["0", "1/2", "-3/6"]).unwrap();
        assert_eq!(b.entries(), &[rat(0, 1), rat(1, 2), rat(-1, 2)]);
        assert!(ParameterVector::parse(&["x"]).is_err());
        assert_eq!(b.to_string(), "(0, 1/2, -1/2)");
    }

    #[test]
    fn rank_volumes() {
        assert_eq!(rank_volume(&PointConfiguration::curve(&[0, 1, 3]).unwrap()), Int::from(3));
        assert_eq!(rank_volume(&PointConfiguration::curve(&[0, 2, 4]).unwrap()), Int::from(2));
        assert_eq!(rank_volume(&PointConfiguration::from_i64_columns(&[&[1, 0, 0], &[1, 1, 0], &[1, 0, 1]]).unwrap()), Int::from(1));
        assert_eq!(rank_volume(&marked_triangle()), Int::from(9));
    }

    /// Brute-force resonance test: `β - γ` in the rational span of a facet for
    /// some `γ` in the box `[-5, 5]^{1+n}`. Span membership is tested with a
    /// rational basis of the annihilator, so the two sides share no code.
    pub(crate) struct ResonanceOracle {
        facets: Vec<(Vec<Vec<Rat>>, HashSet<Vec<Rat>>)>,
    }

    impl ResonanceOracle {
        pub(crate) fn new(a: &PointConfiguration) -> Self {
            let n = a.ambient_dim();
            let d = a.dim();
            let mut facets = Vec::new();
            for f in a.faces().iter().filter(|f| d > 0 && f.dim + 1 == d) {
                let rows: Vec<Vec<Rat>> = a.columns_on(f).iter().map(|c| to_rat_vec(c)).collect();
                let ann = rat_nullspace(&rows, n);
                let mut images = HashSet::new();
                let mut g = vec![-5i64; n];
                loop {
                    let gr: Vec<Rat> = g.iter().map(|&x| rat(x, 1)).collect();
                    images.insert(ann.iter().map(|h| h.iter().zip(&gr).map(|(a, b)| a * b).sum()).collect::<Vec<Rat>>());
                    let mut i = 0;
                    while i < n && g[i] == 5 {
                        g[i] = -5;
                        i += 1;
                    }
                    if i == n {
                        break;
                    }
                    g[i] += 1;
                }
                facets.push((ann, images));
            }
            ResonanceOracle { facets }
        }

        pub(crate) fn resonant(&self, beta: &[Rat]) -> bool {
            self.facets.iter().any(|(ann, images)| {
                let v: Vec<Rat> = ann.iter().map(|h| h.iter().zip(beta).map(|(a, b)| a * b).sum()).collect();
                images.contains(&v)
            })
        }
    }

    fn small_config() -> impl Strategy<Value = Vec<(i64, i64)>> {
        proptest::collection::btree_set((-2i64..=2, -2i64..=2), 3..6).prop_map(|s| s.into_iter().collect())
    }

    fn beta3() -> impl Strategy<Value = Vec<Rat>> {
        proptest::collection::vec((-4i64..=4, prop_oneof![Just(1i64), Just(2), Just(3)]), 3)
            .prop_map(|v| v.into_iter().map(|(p, q)| rat(p, q)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]
        #[test]
        fn nonresonance_matches_oracle(pts in small_config(), betas in proptest::collection::vec(beta3(), 10)) {
            let cols: Vec<Vec<Int>> = pts.iter().map(|&(x, y)| ivec(&[1, x, y])).collect();
            let a = PointConfiguration::from_columns(&cols).unwrap();
            let oracle = ResonanceOracle::new(&a);
            for b in betas {
                prop_assert_eq!(is_nonresonant(&a, &b).unwrap().nonresonant, !oracle.resonant(&b));
            }
        }

        #[test]
        fn rank_volume_invariant_under_saturation(pts in small_config()) {
            let cols: Vec<Vec<Int>> = pts.iter().map(|&(x, y)| ivec(&[1, x, y])).collect();
            let a = PointConfiguration::from_columns(&cols).unwrap();
            for mode in [SaturationMode::S, SaturationMode::P, SaturationMode::Full] {
                prop_assert_eq!(rank_volume(&saturate(&a, mode).unwrap().result), rank_volume(&a));
            }
        }
    }
}
