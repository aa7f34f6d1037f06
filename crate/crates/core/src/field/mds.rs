use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gf256::inv;
use super::FieldError;

/// Dense `rows x cols` coefficient matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdsMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<u8>,
}

impl MdsMatrix {
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Square submatrix on the given row and column indices.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<u8>> {
        rows.iter()
            .map(|&i| cols.iter().map(|&j| self.get(i, j)).collect())
            .collect()
    }
}

/// Cauchy matrix with entry `(i, j) = 1 / (x_i + y_j)`, `x_i = i`,
/// `y_j = r + j`. All `r + c` points are distinct, so every square
/// submatrix is nonsingular.
pub fn cauchy_mds(r: usize, c: usize) -> Result<MdsMatrix, FieldError> {
    if r + c > 256 {
        return Err(FieldError::CauchyTooLarge { rows: r, cols: c });
    }
    let mut entries = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            let x = i as u8;
            let y = (r + j) as u8;
            entries.push(inv(x ^ y));
        }
    }
    Ok(MdsMatrix { rows: r, cols: c, entries })
}

/// Supplies combination matrices for MDS-style expansions.
///
/// Shapes that fit in GF(2^8) (`r + c <= 256`) get the Cauchy matrix. Longer
/// expansions cannot be MDS over this field, so they get seeded uniformly
/// random nonzero coefficients; any fixed square submatrix is then singular
/// with probability about 1/255.
#[derive(Debug, Clone)]
pub struct CoefficientSource {
    rng: ChaCha8Rng,
}

impl CoefficientSource {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn matrix(&mut self, r: usize, c: usize) -> MdsMatrix {
        match cauchy_mds(r, c) {
            Ok(m) => m,
            Err(_) => MdsMatrix {
                rows: r,
                cols: c,
                entries: (0..r * c).map(|_| self.rng.gen_range(1..=255u8)).collect(),
            },
        }
    }
}
