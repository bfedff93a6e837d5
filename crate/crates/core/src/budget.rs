/// Caps on the exhaustive searches performed by the library.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Largest `(m+1)^n` the stable matching oracle will enumerate.
    pub max_assignments: u128,
    /// Largest worker count for brute-force demand type extraction.
    pub max_bruteforce_workers: usize,
    /// Largest square submatrix order examined by determinant enumeration.
    pub max_minor_order: usize,
    /// Largest number of square submatrices examined by determinant enumeration.
    pub max_submatrices: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_assignments: 1 << 20,
            max_bruteforce_workers: 16,
            max_minor_order: 12,
            max_submatrices: 1 << 24,
        }
    }
}
