//! Inputs shared by the benchmarks.

use gkzkit::config::PointConfiguration;
use gkzkit::matrix::IntMatrix;

/// The triangle with vertices `0, 3e_1, 3e_2` marked with `e_1` and `2e_2`.
pub fn marked_triangle() -> PointConfiguration {
    PointConfiguration::from_i64_columns(&[&[1, 0, 0], &[1, 3, 0], &[1, 0, 3], &[1, 1, 0], &[1, 0, 2]])
        .expect("valid configuration")
}

/// A seven-point configuration in dimension three with a lattice-redundant
/// saturation point.
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
    .expect("valid configuration")
}

/// An `n x n` integer matrix with small, deterministic, fairly dense entries.
pub fn dense_matrix(n: usize) -> IntMatrix {
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| ((i * 7 + j * 13 + i * j) % 11) as i64 - 5).collect())
        .collect();
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    IntMatrix::from_i64_rows(&refs)
}
