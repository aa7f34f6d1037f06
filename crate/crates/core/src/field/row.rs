use super::gf256::Gf256;
use super::kernel;

/// A packet's coefficient vector over the run's basis.
///
/// Dense storage plus a cached `[lo, hi)` bound on the nonzero entries, so
/// unit and short-support rows cost almost nothing in elimination.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CoeffRow {
    coeffs: Vec<u8>,
    lo: usize,
    hi: usize,
}

impl std::fmt::Debug for CoeffRow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CoeffRow[{}; {}..{}]", self.coeffs.len(), self.lo, self.hi)
    }
}

impl CoeffRow {
    pub fn zeros(len: usize) -> Self {
        Self {
            coeffs: vec![0; len],
            lo: 0,
            hi: 0,
        }
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut r = Self::zeros(len);
        r.coeffs[index] = 1;
        r.lo = index;
        r.hi = index + 1;
        r
    }

    pub fn from_vec(coeffs: Vec<u8>) -> Self {
        let mut r = Self { coeffs, lo: 0, hi: 0 };
        r.refresh_span_from(0, usize::MAX);
        r
    }

    pub fn from_elements(coeffs: &[Gf256]) -> Self {
        Self::from_vec(coeffs.iter().map(|c| c.0).collect())
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.lo == self.hi
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.coeffs
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.coeffs
    }

    pub fn get(&self, i: usize) -> u8 {
        self.coeffs[i]
    }

    /// `[lo, hi)` containing every nonzero entry; empty for the zero row.
    pub fn span(&self) -> (usize, usize) {
        (self.lo, self.hi)
    }

    pub fn set(&mut self, i: usize, v: u8) {
        self.coeffs[i] = v;
        if v != 0 {
            if self.is_zero() {
                self.lo = i;
                self.hi = i + 1;
            } else {
                self.lo = self.lo.min(i);
                self.hi = self.hi.max(i + 1);
            }
        } else if i == self.lo || i + 1 == self.hi {
            self.refresh_span_from(self.lo, self.hi);
        }
    }

    /// First nonzero column.
    pub fn leading(&self) -> Option<usize> {
        (!self.is_zero()).then_some(self.lo)
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &CoeffRow, c: u8) {
        debug_assert_eq!(self.len(), other.len());
        if c == 0 || other.is_zero() {
            return;
        }
        let (olo, ohi) = other.span();
        if ohi - olo <= 8 {
            let t = &super::gf256::mul_table()[c as usize];
            for i in olo..ohi {
                self.coeffs[i] ^= t[other.coeffs[i] as usize];
            }
        } else {
            kernel::mul_add(&mut self.coeffs[olo..ohi], &other.coeffs[olo..ohi], c);
        }
        let (lo, hi) = if self.is_zero() {
            (olo, ohi)
        } else {
            (self.lo.min(olo), self.hi.max(ohi))
        };
        self.refresh_span_from(lo, hi);
    }

    pub fn scale(&mut self, c: u8) {
        if c == 0 {
            self.coeffs.fill(0);
            self.lo = 0;
            self.hi = 0;
        } else {
            let (lo, hi) = self.span();
            kernel::scale(&mut self.coeffs[lo..hi], c);
        }
    }

    /// Copy with columns reordered: output column `j` is input `map[j]`.
    pub fn gather(&self, map: &[usize]) -> CoeffRow {
        CoeffRow::from_vec(map.iter().map(|&i| self.coeffs[i]).collect())
    }

    /// Grows the row to `len` with trailing zeros.
    pub fn pad_to(&mut self, len: usize) {
        if self.coeffs.len() < len {
            self.coeffs.resize(len, 0);
        }
    }

    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(self.coeffs.len() * 2);
        for b in &self.coeffs {
            s.push_str(&format!("{b:02x}"));
        }
        s
    }

    pub fn from_hex(s: &str) -> Option<CoeffRow> {
        if s.len() % 2 != 0 || !s.is_ascii() {
            return None;
        }
        let bytes = (0..s.len() / 2)
            .map(|i| u8::from_str_radix(&s[2 * i..2 * i + 2], 16).ok())
            .collect::<Option<Vec<u8>>>()?;
        Some(CoeffRow::from_vec(bytes))
    }

    // shrinks the cached span to the true support inside [lo, hi)
    fn refresh_span_from(&mut self, lo: usize, hi: usize) {
        let hi = hi.min(self.coeffs.len());
        let window = &self.coeffs[lo.min(hi)..hi];
        match window.iter().position(|&b| b != 0) {
            None => {
                self.lo = 0;
                self.hi = 0;
            }
            Some(first) => {
                let last = window.iter().rposition(|&b| b != 0).expect("nonzero present");
                self.lo = lo + first;
                self.hi = lo + last + 1;
            }
        }
    }
}

/// Linear combination `sum_j coeffs[j] * rows[j]`.
pub fn combine(rows: &[CoeffRow], coeffs: &[u8], len: usize) -> CoeffRow {
    debug_assert_eq!(rows.len(), coeffs.len());
    let mut out = CoeffRow::zeros(len);
    for (r, &c) in rows.iter().zip(coeffs) {
        out.add_scaled(r, c);
    }
    out
}
