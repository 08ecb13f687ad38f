//! Matrices over a prime field F_p and their rank.
//!
//! Over F_2 rows are packed into `u64` words and elimination is word-wise
//! XOR; for odd p a byte per entry is used. Rank is computed by folding
//! rows one at a time into a reduced basis keyed by pivot column, so the
//! full matrix is never eliminated in place.

use rayon::prelude::*;

use crate::error::{Error, Result};

const PAR_CHUNK: usize = 4096;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

/// Storage behind a [`PrimeMatrix`].
#[derive(Debug, Clone, PartialEq, Eq)]
enum Storage {
    /// Row-major packed bits, `words` u64 per row.
    Bits { words: usize, data: Vec<u64> },
    /// Row-major entries in `[0, p)`.
    Bytes { data: Vec<u8> },
}

/// A matrix with entries in F_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    storage: Storage,
}

impl PrimeMatrix {
    /// Empty binary matrix with `cols` columns.
    pub fn new_binary(cols: usize) -> Self {
        PrimeMatrix {
            p: 2,
            rows: 0,
            cols,
            storage: Storage::Bits {
                words: words_for(cols),
                data: Vec::new(),
            },
        }
    }

    /// Empty matrix over F_p. Binary storage is used when `p == 2`.
    pub fn new(p: u32, cols: usize) -> Result<Self> {
        if !crate::field::is_prime(p) || p > 251 {
            return Err(Error::Field(format!("unsupported prime {p}")));
        }
        if p == 2 {
            return Ok(Self::new_binary(cols));
        }
        Ok(PrimeMatrix {
            p,
            rows: 0,
            cols,
            storage: Storage::Bytes { data: Vec::new() },
        })
    }

    /// Builds a matrix from dense rows, rejecting entries `>= p`.
    pub fn from_rows(p: u32, cols: usize, rows: &[Vec<u32>]) -> Result<Self> {
        let mut m = Self::new(p, cols)?;
        for row in rows {
            m.push_row(row)?;
        }
        Ok(m)
    }

    /// 0/1 incidence matrix: one row per support set.
    pub fn from_supports<S: AsRef<[u32]>>(p: u32, cols: usize, supports: &[S]) -> Result<Self> {
        let mut m = Self::new(p, cols)?;
        for s in supports {
            m.push_support(s.as_ref())?;
        }
        Ok(m)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn push_row(&mut self, row: &[u32]) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::InvalidDesign(format!(
                "row of length {} in a matrix with {} columns",
                row.len(),
                self.cols
            )));
        }
        if let Some((col, &entry)) = row.iter().enumerate().find(|(_, &e)| e >= self.p) {
            return Err(Error::EntryOutOfField {
                entry,
                p: self.p,
                row: self.rows,
                col,
            });
        }
        match &mut self.storage {
            Storage::Bits { words, data } => {
                let start = data.len();
                data.resize(start + *words, 0);
                for (c, &e) in row.iter().enumerate() {
                    if e == 1 {
                        data[start + c / 64] |= 1 << (c % 64);
                    }
                }
            }
            Storage::Bytes { data } => data.extend(row.iter().map(|&e| e as u8)),
        }
        self.rows += 1;
        Ok(())
    }

    /// Appends a 0/1 row with ones at `support`.
    pub fn push_support(&mut self, support: &[u32]) -> Result<()> {
        if let Some(&c) = support.iter().find(|&&c| c as usize >= self.cols) {
            return Err(Error::InvalidDesign(format!(
                "column index {c} out of range for {} columns",
                self.cols
            )));
        }
        match &mut self.storage {
            Storage::Bits { words, data } => {
                let start = data.len();
                data.resize(start + *words, 0);
                for &c in support {
                    data[start + c as usize / 64] |= 1 << (c % 64);
                }
            }
            Storage::Bytes { data } => {
                let start = data.len();
                data.resize(start + self.cols, 0);
                for &c in support {
                    data[start + c as usize] = 1;
                }
            }
        }
        self.rows += 1;
        Ok(())
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u32 {
        match &self.storage {
            Storage::Bits { words, data } => {
                ((data[row * words + col / 64] >> (col % 64)) & 1) as u32
            }
            Storage::Bytes { data } => data[row * self.cols + col] as u32,
        }
    }

    pub fn row(&self, row: usize) -> Vec<u32> {
        (0..self.cols).map(|c| self.get(row, c)).collect()
    }

    /// Packed words of a binary row.
    pub fn bit_row(&self, row: usize) -> Option<&[u64]> {
        match &self.storage {
            Storage::Bits { words, data } => Some(&data[row * words..(row + 1) * words]),
            Storage::Bytes { .. } => None,
        }
    }

    /// Indices of the nonzero entries of a row.
    pub fn support(&self, row: usize) -> Vec<u32> {
        (0..self.cols)
            .filter(|&c| self.get(row, c) != 0)
            .map(|c| c as u32)
            .collect()
    }

    pub fn row_weight(&self, row: usize) -> usize {
        match self.bit_row(row) {
            Some(w) => w.iter().map(|x| x.count_ones() as usize).sum(),
            None => self.support(row).len(),
        }
    }

    /// Max entry, used to validate against a smaller field.
    fn max_entry(&self) -> Option<(u32, usize, usize)> {
        let mut best: Option<(u32, usize, usize)> = None;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let e = self.get(r, c);
                if best.is_none_or(|(b, _, _)| e > b) {
                    best = Some((e, r, c));
                }
            }
        }
        best
    }
}

/// Reduced basis over F_2, rows indexed by their lowest set bit.
#[derive(Debug, Clone)]
pub struct XorBasis {
    words: usize,
    pivot_of_col: Vec<Option<u32>>,
    rows: Vec<u64>,
}

impl XorBasis {
    pub fn new(cols: usize) -> Self {
        XorBasis {
            words: words_for(cols),
            pivot_of_col: vec![None; cols],
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len() / self.words.max(1)
    }

    /// Reduces `row` in place against the basis; true if it became zero.
    pub fn reduce(&self, row: &mut [u64]) -> bool {
        let w = self.words;
        let mut i = 0;
        while i < w {
            let x = row[i];
            if x == 0 {
                i += 1;
                continue;
            }
            let col = i * 64 + x.trailing_zeros() as usize;
            match self.pivot_of_col[col] {
                Some(b) => {
                    let base = &self.rows[b as usize * w..(b as usize + 1) * w];
                    for (dst, src) in row[i..].iter_mut().zip(&base[i..]) {
                        *dst ^= src;
                    }
                }
                None => return false,
            }
        }
        true
    }

    /// Folds a row into the basis; returns true if it was independent.
    pub fn insert(&mut self, row: &[u64]) -> bool {
        let mut buf = row.to_vec();
        if self.words == 0 || self.reduce(&mut buf) {
            return false;
        }
        let col = buf
            .iter()
            .enumerate()
            .find(|(_, &x)| x != 0)
            .map(|(i, x)| i * 64 + x.trailing_zeros() as usize)
            .expect("nonzero after reduction");
        self.pivot_of_col[col] = Some(self.rank() as u32);
        self.rows.extend_from_slice(&buf);
        true
    }

    fn merge(mut self, other: XorBasis) -> XorBasis {
        let w = self.words;
        for r in 0..other.rank() {
            self.insert(&other.rows[r * w..(r + 1) * w]);
        }
        self
    }
}

fn rank_binary(words: usize, cols: usize, data: &[u64]) -> usize {
    if words == 0 {
        return 0;
    }
    data.par_chunks(words * PAR_CHUNK)
        .map(|chunk| {
            let mut basis = XorBasis::new(cols);
            for row in chunk.chunks(words) {
                basis.insert(row);
            }
            basis
        })
        .reduce(|| XorBasis::new(cols), XorBasis::merge)
        .rank()
}

fn rank_dense(p: u32, cols: usize, rows: impl Iterator<Item = Vec<u32>>) -> usize {
    let inv: Vec<u32> = (0..p)
        .map(|a| (1..p).find(|&b| a * b % p == 1).unwrap_or(0))
        .collect();
    // basis rows normalised so the pivot entry is 1
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut basis: Vec<Vec<u32>> = Vec::new();
    for mut row in rows {
        let mut c = 0;
        while c < cols {
            let e = row[c];
            if e == 0 {
                c += 1;
                continue;
            }
            match pivot_of_col[c] {
                Some(b) => {
                    let base = &basis[b];
                    for j in c..cols {
                        row[j] = (row[j] + (p - e) * base[j]) % p;
                    }
                }
                None => {
                    let s = inv[e as usize];
                    for x in row.iter_mut().skip(c) {
                        *x = *x * s % p;
                    }
                    pivot_of_col[c] = Some(basis.len());
                    basis.push(row);
                    break;
                }
            }
        }
    }
    basis.len()
}

/// Rank of `m` over F_p.
pub fn matrix_rank_p(m: &PrimeMatrix, p: u32) -> Result<usize> {
    if !crate::field::is_prime(p) {
        return Err(Error::Field(format!("{p} is not prime")));
    }
    if p < m.p {
        if let Some((entry, row, col)) = m.max_entry().filter(|&(e, _, _)| e >= p) {
            return Err(Error::EntryOutOfField { entry, p, row, col });
        }
    }
    match (&m.storage, p) {
        (Storage::Bits { words, data }, 2) => Ok(rank_binary(*words, m.cols, data)),
        (Storage::Bytes { .. }, 2) => {
            let mut bin = PrimeMatrix::new_binary(m.cols);
            for r in 0..m.rows {
                bin.push_support(&m.support(r))?;
            }
            matrix_rank_p(&bin, 2)
        }
        _ => Ok(rank_dense(p, m.cols, (0..m.rows).map(|r| m.row(r)))),
    }
}

/// Basis of the right null space of a binary matrix, as packed rows of
/// length `cols`.
pub fn binary_null_space(m: &PrimeMatrix) -> Result<Vec<Vec<u64>>> {
    if m.p != 2 {
        return Err(Error::Unsupported(
            "null space is only implemented over F_2".into(),
        ));
    }
    let cols = m.cols;
    let words = words_for(cols);
    // full RREF of the row space
    let mut basis = XorBasis::new(cols);
    for r in 0..m.rows {
        basis.insert(m.bit_row(r).unwrap());
    }
    let rank = basis.rank();
    let mut rows: Vec<Vec<u64>> = (0..rank)
        .map(|i| basis.rows[i * words..(i + 1) * words].to_vec())
        .collect();
    let mut pivots: Vec<usize> = rows
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .find(|(_, &x)| x != 0)
                .map(|(i, x)| i * 64 + x.trailing_zeros() as usize)
                .unwrap()
        })
        .collect();
    let mut order: Vec<usize> = (0..rank).collect();
    order.sort_by_key(|&i| pivots[i]);
    rows = order.iter().map(|&i| rows[i].clone()).collect();
    pivots = order.iter().map(|&i| pivots[i]).collect();
    for i in (0..rank).rev() {
        for j in 0..rank {
            if j != i && (rows[j][pivots[i] / 64] >> (pivots[i] % 64)) & 1 == 1 {
                let src = rows[i].clone();
                for (d, s) in rows[j].iter_mut().zip(&src) {
                    *d ^= s;
                }
            }
        }
    }
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut out = Vec::new();
    for f in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u64; words];
        v[f / 64] |= 1 << (f % 64);
        for (row, &pc) in rows.iter().zip(&pivots) {
            if (row[f / 64] >> (f % 64)) & 1 == 1 {
                v[pc / 64] |= 1 << (pc % 64);
            }
        }
        out.push(v);
    }
    Ok(out)
}

/// Parses the `pmatrix rows=.. cols=.. p=..` text format.
pub fn parse_pmatrix(text: &str) -> Result<PrimeMatrix> {
    use crate::error::parse_err;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty matrix file"))?;
    let kv = crate::io::header_fields(hline, header, "pmatrix")?;
    let rows = kv.get_usize("rows")?;
    let cols = kv.get_usize("cols")?;
    let p = kv.get_u32("p")?;
    if p > 10 {
        return Err(parse_err(
            hline,
            format!("p = {p} cannot be written as single digits"),
        ));
    }
    let mut m = PrimeMatrix::new(p, cols)?;
    for (ln, line) in lines {
        let row: Vec<u32> = line
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .ok_or_else(|| parse_err(ln, format!("bad digit {c:?}")))
            })
            .collect::<Result<_>>()?;
        if row.len() != cols {
            return Err(parse_err(
                ln,
                format!("expected {cols} digits, found {}", row.len()),
            ));
        }
        m.push_row(&row).map_err(|e| parse_err(ln, e.to_string()))?;
    }
    if m.rows() != rows {
        return Err(parse_err(
            hline,
            format!("header says {rows} rows, found {}", m.rows()),
        ));
    }
    Ok(m)
}

pub fn emit_pmatrix(m: &PrimeMatrix) -> String {
    let mut out = format!("pmatrix rows={} cols={} p={}\n", m.rows, m.cols, m.p);
    for r in 0..m.rows {
        for c in 0..m.cols {
            out.push(char::from_digit(m.get(r, c), 10).unwrap_or('?'));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Plain Gaussian elimination on a copy of the whole matrix.
    fn naive_rank(p: u32, rows: &[Vec<u32>]) -> usize {
        let mut a: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| x as i64).collect())
            .collect();
        let p = p as i64;
        let ncols = a.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..ncols {
            let Some(piv) = (rank..a.len()).find(|&r| a[r][c] % p != 0) else {
                continue;
            };
            a.swap(rank, piv);
            let inv = (1..p).find(|&b| a[rank][c] * b % p == 1).unwrap();
            for x in a[rank].iter_mut() {
                *x = *x * inv % p;
            }
            for r in 0..a.len() {
                if r != rank && a[r][c] != 0 {
                    let f = a[r][c];
                    let pivot_row = a[rank].clone();
                    for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                        *x = ((*x - f * y) % p + p) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn fano_rows() -> Vec<Vec<u32>> {
        let lines = [
            [0, 1, 2],
            [0, 3, 4],
            [0, 5, 6],
            [1, 3, 5],
            [1, 4, 6],
            [2, 3, 6],
            [2, 4, 5],
        ];
        lines
            .iter()
            .map(|l| {
                let mut r = vec![0; 7];
                for &i in l {
                    r[i] = 1;
                }
                r
            })
            .collect()
    }

    #[test]
    fn fano_rank_is_four() {
        let rows = fano_rows();
        assert_eq!(naive_rank(2, &rows), 4);
        let m = PrimeMatrix::from_rows(2, 7, &rows).unwrap();
        assert_eq!(matrix_rank_p(&m, 2).unwrap(), 4);
        assert_eq!(matrix_rank_p(&m, 3).unwrap(), naive_rank(3, &rows));
    }

    #[test]
    fn identity_and_zero() {
        for p in [2, 3, 5] {
            let id: Vec<Vec<u32>> = (0..9)
                .map(|i| (0..9).map(|j| u32::from(i == j)).collect())
                .collect();
            let m = PrimeMatrix::from_rows(p, 9, &id).unwrap();
            assert_eq!(matrix_rank_p(&m, p).unwrap(), 9);
            let z = PrimeMatrix::from_rows(p, 9, &vec![vec![0; 9]; 4]).unwrap();
            assert_eq!(matrix_rank_p(&z, p).unwrap(), 0);
        }
        assert_eq!(matrix_rank_p(&PrimeMatrix::new_binary(0), 2).unwrap(), 0);
    }

    #[test]
    fn entry_outside_field_rejected() {
        assert!(matches!(
            PrimeMatrix::from_rows(3, 2, &[vec![0, 3]]),
            Err(Error::EntryOutOfField { entry: 3, .. })
        ));
        let m = PrimeMatrix::from_rows(3, 2, &[vec![0, 2]]).unwrap();
        assert!(matches!(
            matrix_rank_p(&m, 2),
            Err(Error::EntryOutOfField {
                entry: 2,
                p: 2,
                row: 0,
                col: 1
            })
        ));
    }

    #[test]
    fn null_space_is_orthogonal_and_complete() {
        let m = PrimeMatrix::from_rows(2, 7, &fano_rows()).unwrap();
        let ns = binary_null_space(&m).unwrap();
        assert_eq!(ns.len(), 3);
        for v in &ns {
            for r in 0..m.rows() {
                let par: u32 = m
                    .bit_row(r)
                    .unwrap()
                    .iter()
                    .zip(v)
                    .map(|(a, b)| (a & b).count_ones())
                    .sum();
                assert_eq!(par % 2, 0);
            }
        }
    }

    #[test]
    fn pmatrix_roundtrip() {
        let m = PrimeMatrix::from_rows(3, 3, &[vec![0, 1, 2], vec![2, 2, 0]]).unwrap();
        let text = emit_pmatrix(&m);
        assert_eq!(text, "pmatrix rows=2 cols=3 p=3\n012\n220\n");
        let back = parse_pmatrix(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(emit_pmatrix(&back), text);
        assert!(parse_pmatrix("pmatrix rows=1 cols=2 p=2\n12\n").is_err());
        assert!(parse_pmatrix("pmatrix rows=2 cols=2 p=2\n10\n").is_err());
    }

    fn arb_matrix(p: u32) -> impl Strategy<Value = (usize, Vec<Vec<u32>>)> {
        (1usize..=64, 1usize..=64).prop_flat_map(move |(r, c)| {
            (
                Just(c),
                prop::collection::vec(prop::collection::vec(0..p, c), r),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rank_matches_naive_gf2((cols, rows) in arb_matrix(2)) {
            let m = PrimeMatrix::from_rows(2, cols, &rows).unwrap();
            let r = matrix_rank_p(&m, 2).unwrap();
            prop_assert_eq!(r, naive_rank(2, &rows));
            prop_assert!(r <= rows.len().min(cols));
        }

        #[test]
        fn rank_matches_naive_gf3((cols, rows) in arb_matrix(3)) {
            let m = PrimeMatrix::from_rows(3, cols, &rows).unwrap();
            let r = matrix_rank_p(&m, 3).unwrap();
            prop_assert_eq!(r, naive_rank(3, &rows));
            prop_assert!(r <= rows.len().min(cols));
        }

        #[test]
        fn rank_is_row_order_invariant((cols, rows) in arb_matrix(2), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut shuffled = rows.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let a = matrix_rank_p(&PrimeMatrix::from_rows(2, cols, &rows).unwrap(), 2).unwrap();
            let b = matrix_rank_p(&PrimeMatrix::from_rows(2, cols, &shuffled).unwrap(), 2).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}
