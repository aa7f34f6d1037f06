use super::mds::CoefficientSource;
use super::row::{combine, CoeffRow};
use super::FieldError;

/// Incrementally built row-echelon basis.
///
/// Each stored row is zero left of its pivot and has a 1 at the pivot.
#[derive(Debug, Clone)]
pub struct Echelon {
    width: usize,
    pivot_of: Vec<Option<u32>>,
    rows: Vec<CoeffRow>,
    pivot_cols: Vec<usize>,
}

impl Echelon {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            pivot_of: vec![None; width],
            rows: Vec::new(),
            pivot_cols: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Pivot columns in insertion order.
    pub fn pivot_columns(&self) -> &[usize] {
        &self.pivot_cols
    }

    // next nonzero column of `row` at or after `from`
    fn next_nonzero(row: &CoeffRow, from: usize) -> Option<usize> {
        let (_, hi) = row.span();
        if from >= hi {
            return None;
        }
        row.as_slice()[from..hi].iter().position(|&b| b != 0).map(|p| from + p)
    }

    /// Adds `row` to the basis. Returns the new pivot column, or `None` if
    /// the row was already in the span.
    pub fn insert(&mut self, mut row: CoeffRow) -> Option<usize> {
        assert_eq!(row.len(), self.width, "row width mismatch");
        let mut col = row.span().0;
        while let Some(c) = Self::next_nonzero(&row, col) {
            match self.pivot_of[c] {
                Some(p) => {
                    let f = row.get(c);
                    row.add_scaled(&self.rows[p as usize], f);
                    col = c + 1;
                }
                None => {
                    row.scale(super::gf256::inv(row.get(c)));
                    self.pivot_of[c] = Some(self.rows.len() as u32);
                    self.rows.push(row);
                    self.pivot_cols.push(c);
                    return Some(c);
                }
            }
        }
        None
    }

    /// Reduces `row` against every pivot; zero iff `row` is in the span.
    pub fn reduce(&self, row: &mut CoeffRow) {
        let mut col = row.span().0;
        while let Some(c) = Self::next_nonzero(row, col) {
            if let Some(p) = self.pivot_of[c] {
                let f = row.get(c);
                row.add_scaled(&self.rows[p as usize], f);
            }
            col = c + 1;
        }
    }

    pub fn contains(&self, row: &CoeffRow) -> bool {
        let mut r = row.clone();
        self.reduce(&mut r);
        r.is_zero()
    }
}

/// Rank over GF(2^8). All rows must share one length.
pub fn rank(rows: &[CoeffRow]) -> usize {
    let Some(first) = rows.first() else { return 0 };
    let mut e = Echelon::new(first.len());
    for r in rows {
        e.insert(r.clone());
    }
    e.rank()
}

/// Rank of a small dense matrix given as nested vectors.
pub fn matrix_rank(m: &[Vec<u8>]) -> usize {
    let rows: Vec<CoeffRow> = m.iter().map(|r| CoeffRow::from_vec(r.clone())).collect();
    rank(&rows)
}

/// `out_count` combinations of `rows`, coefficients drawn from `src`
/// (Cauchy when the shape allows it). No rank check.
pub fn expand_rows(rows: &[CoeffRow], out_count: usize, src: &mut CoefficientSource) -> Vec<CoeffRow> {
    if out_count == 0 {
        return Vec::new();
    }
    let len = rows.first().map_or(0, CoeffRow::len);
    let m = src.matrix(out_count, rows.len());
    (0..out_count).map(|i| combine(rows, m.row(i), len)).collect()
}

/// Distills `out_count` rows from `received` that stay jointly uniform to
/// anyone missing at least `out_count` dimensions of `received`.
pub fn privacy_amplify(received: &[CoeffRow], out_count: usize) -> Result<Vec<CoeffRow>, FieldError> {
    privacy_amplify_with(received, out_count, &mut CoefficientSource::new(0))
}

pub fn privacy_amplify_with(
    received: &[CoeffRow],
    out_count: usize,
    src: &mut CoefficientSource,
) -> Result<Vec<CoeffRow>, FieldError> {
    let available = rank(received);
    if out_count > available {
        return Err(FieldError::AmplifyTooMany {
            requested: out_count,
            rank: available,
        });
    }
    Ok(expand_rows(received, out_count, src))
}

/// True iff `outputs` add `outputs.len()` fresh dimensions on top of
/// `known`, i.e. they look uniform and independent to whoever holds `known`.
pub fn independent_of(known: &[CoeffRow], outputs: &[CoeffRow]) -> bool {
    let mut all = known.to_vec();
    all.extend_from_slice(outputs);
    rank(&all) == rank(known) + outputs.len()
}
