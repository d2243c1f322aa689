//! Dense linear algebra over GF(2) on packed `u64` words.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length bit vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Option<Self> {
        let bits: Option<Vec<bool>> = s
            .chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect();
        bits.map(|b| Self::from_bools(&b))
    }

    /// The low `len` bits of `value`, bit `i` of the vector being bit `i` of
    /// the integer.
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= WORD, "at most 64 bits");
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = if len == WORD {
                value
            } else {
                value & ((1 << len) - 1)
            };
        }
        v
    }

    /// Packs `words` little-endian into `len` bits; excess bits are cleared.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        if !len.is_multiple_of(WORD) {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (len % WORD)) - 1;
            }
        }
        Self { len, words }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index out of range");
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index out of range");
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index out of range");
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        assert_eq!(self.len, other.len, "length mismatch");
        BitVec {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Parity of the inner product.
    pub fn dot(&self, other: &BitVec) -> bool {
        self.and(other).count_ones() % 2 == 1
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// Bits `start..start + len` as a new vector.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        assert!(start + len <= self.len, "slice out of range");
        let mut out = BitVec::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }

    /// Grows or truncates to `len`; new bits are zero.
    pub fn resized(&self, len: usize) -> BitVec {
        let mut out = BitVec::zeros(len);
        for i in self.ones().take_while(|&i| i < len) {
            out.set(i, true);
        }
        out
    }

    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = self.resized(self.len + other.len);
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Lowercase hex, most significant nibble first, of the bits read as a
    /// big-endian string (bit 0 is the leftmost bit).
    pub fn to_hex(&self) -> String {
        let mut s = String::new();
        for chunk in 0..self.len.div_ceil(4) {
            let mut nibble = 0u8;
            for k in 0..4 {
                let i = chunk * 4 + k;
                nibble <<= 1;
                if i < self.len && self.get(i) {
                    nibble |= 1;
                }
            }
            s.push(char::from_digit(u32::from(nibble), 16).expect("nibble"));
        }
        s
    }

    /// Inverse of [`BitVec::to_hex`] for a known bit length.
    pub fn from_hex(len: usize, hex: &str) -> Option<BitVec> {
        if hex.len() != len.div_ceil(4) {
            return None;
        }
        let mut out = BitVec::zeros(len);
        for (chunk, c) in hex.chars().enumerate() {
            let nibble = c.to_digit(16)?;
            for k in 0..4 {
                let i = chunk * 4 + k;
                let bit = nibble >> (3 - k) & 1 == 1;
                if i < len {
                    out.set(i, bit);
                } else if bit {
                    return None;
                }
            }
        }
        Some(out)
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A `rows x cols` matrix over GF(2), stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Gf2Matrix {
    cols: usize,
    rows: Vec<BitVec>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            rows: (0..n).map(|i| BitVec::unit(n, i)).collect(),
        }
    }

    /// Panics if the rows do not all have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "row length mismatch");
        Self { cols, rows }
    }

    /// Rows given as `0`/`1` strings.
    pub fn parse_rows(rows: &[&str]) -> Option<Self> {
        let parsed: Vec<BitVec> = rows
            .iter()
            .map(|r| BitVec::parse(r))
            .collect::<Option<_>>()?;
        let cols = parsed.first().map_or(0, BitVec::len);
        parsed
            .iter()
            .all(|r| r.len() == cols)
            .then(|| Self::from_rows(cols, parsed))
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    pub fn push_row(&mut self, row: BitVec) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.rows.push(row);
    }

    /// Stacks `other` below `self`.
    pub fn stack(&mut self, other: &Gf2Matrix) {
        assert_eq!(self.cols, other.cols, "column count mismatch");
        self.rows.extend(other.rows.iter().cloned());
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVec::is_zero)
    }

    /// Indices of columns holding at least one 1.
    pub fn nonzero_columns(&self) -> Vec<usize> {
        let mut any = BitVec::zeros(self.cols);
        for r in &self.rows {
            for (a, b) in any.words.iter_mut().zip(&r.words) {
                *a |= b;
            }
        }
        any.ones().collect()
    }

    /// The submatrix formed by the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Gf2Matrix {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut out = BitVec::zeros(cols.len());
                for (k, &c) in cols.iter().enumerate() {
                    if r.get(c) {
                        out.set(k, true);
                    }
                }
                out
            })
            .collect();
        Gf2Matrix {
            cols: cols.len(),
            rows,
        }
    }

    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.cols, "length mismatch");
        let mut out = BitVec::zeros(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(x) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut t = Gf2Matrix::zeros(self.cols, self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.ones() {
                t.rows[j].set(i, true);
            }
        }
        t
    }

    /// Reduced row echelon form and its pivot columns; zero rows are dropped.
    pub fn rref(&self) -> (Gf2Matrix, Vec<usize>) {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            let Some(p) = (next..rows.len()).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(next, p);
            let pivot = rows[next].clone();
            for (i, r) in rows.iter_mut().enumerate() {
                if i != next && r.get(c) {
                    r.xor_assign(&pivot);
                }
            }
            pivots.push(c);
            next += 1;
            if next == rows.len() {
                break;
            }
        }
        rows.truncate(next);
        (
            Gf2Matrix {
                cols: self.cols,
                rows,
            },
            pivots,
        )
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for r in 0..rows.len() {
            let Some(c) = rows[r].first_one() else {
                continue;
            };
            rank += 1;
            let pivot = rows[r].clone();
            for other in rows.iter_mut().skip(r + 1) {
                if other.get(c) {
                    other.xor_assign(&pivot);
                }
            }
        }
        rank
    }

    /// A basis of `{x : M x = 0}`.
    pub fn nullspace(&self) -> Vec<BitVec> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|free| {
                let mut x = BitVec::unit(self.cols, free);
                for (row, &p) in r.rows.iter().zip(&pivots) {
                    if row.get(free) {
                        x.set(p, true);
                    }
                }
                x
            })
            .collect()
    }

    /// Whether `v` lies in the span of the rows.
    pub fn row_space_contains(&self, v: &BitVec) -> bool {
        let mut m = self.clone();
        let before = m.rank();
        m.push_row(v.clone());
        m.rank() == before
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows.iter()).finish()
    }
}

pub fn rank_gf2(m: &Gf2Matrix) -> usize {
    m.rank()
}

/// Linear equations over GF(2) whose unknowns are bit strings of a common
/// length (`symbol_bits`): each equation says the XOR of the selected unknowns
/// equals the right-hand side.
#[derive(Clone, Debug)]
pub struct SymbolSystem {
    unknowns: usize,
    symbol_bits: usize,
    equations: Vec<(BitVec, BitVec)>,
}

impl SymbolSystem {
    pub fn new(unknowns: usize, symbol_bits: usize) -> Self {
        Self {
            unknowns,
            symbol_bits,
            equations: Vec::new(),
        }
    }

    pub fn add_equation(&mut self, coeffs: BitVec, rhs: BitVec) {
        assert_eq!(coeffs.len(), self.unknowns, "coefficient length mismatch");
        assert_eq!(rhs.len(), self.symbol_bits, "symbol length mismatch");
        self.equations.push((coeffs, rhs));
    }

    /// Values of every unknown the equations determine uniquely (`None` for
    /// the rest), or `Err(())` if the system is inconsistent.
    #[allow(clippy::result_unit_err)]
    pub fn solve(&self) -> Result<Vec<Option<BitVec>>, ()> {
        let mut eqs = self.equations.clone();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut next = 0;
        for c in 0..self.unknowns {
            let Some(p) = (next..eqs.len()).find(|&i| eqs[i].0.get(c)) else {
                continue;
            };
            eqs.swap(next, p);
            let (pc, pr) = eqs[next].clone();
            for (i, (coef, rhs)) in eqs.iter_mut().enumerate() {
                if i != next && coef.get(c) {
                    coef.xor_assign(&pc);
                    rhs.xor_assign(&pr);
                }
            }
            pivots.push((next, c));
            next += 1;
        }
        if eqs[next..].iter().any(|(_, rhs)| !rhs.is_zero()) {
            return Err(());
        }
        let mut out = vec![None; self.unknowns];
        for (row, c) in pivots {
            // Determined iff no free unknown remains in the reduced row.
            if eqs[row].0.count_ones() == 1 {
                out[c] = Some(eqs[row].1.clone());
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&str]) -> Gf2Matrix {
        Gf2Matrix::parse_rows(rows).unwrap()
    }

    #[test]
    fn ranks() {
        assert_eq!(rank_gf2(&Gf2Matrix::identity(3)), 3);
        assert_eq!(rank_gf2(&m(&["11", "11"])), 1);
        // u1+u3+u4, u2+u4+u5, u1+u2+u6
        let ex2 = m(&["101100", "010110", "110001"]);
        assert_eq!(rank_gf2(&ex2), 3);
        assert_eq!(ex2.select_columns(&[1, 2, 4]).rank(), 3);
        assert_eq!(ex2.select_columns(&[1, 2]).rank(), 2);
        assert_eq!(rank_gf2(&Gf2Matrix::zeros(4, 5)), 0);
        assert_eq!(rank_gf2(&Gf2Matrix::zeros(0, 0)), 0);
    }

    #[test]
    fn nullspace_is_annihilated() {
        let a = m(&["1011", "0110", "1101"]);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 4 - a.rank());
        for v in &ns {
            assert!(a.mul_vec(v).is_zero());
        }
    }

    #[test]
    fn row_space_membership() {
        let a = m(&["110", "011"]);
        assert!(a.row_space_contains(&BitVec::parse("101").unwrap()));
        assert!(!a.row_space_contains(&BitVec::parse("100").unwrap()));
    }

    #[test]
    fn hex_round_trip() {
        let v = BitVec::parse("1011001").unwrap();
        assert_eq!(v.to_hex(), "b2");
        assert_eq!(BitVec::from_hex(7, "b2"), Some(v));
        assert_eq!(BitVec::from_hex(7, "b3"), None);
        assert_eq!(BitVec::zeros(0).to_hex(), "");
    }

    #[test]
    fn long_vectors() {
        let mut v = BitVec::zeros(130);
        v.set(129, true);
        v.set(64, true);
        assert_eq!(v.first_one(), Some(64));
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![64, 129]);
        assert_eq!(v.slice(64, 2), BitVec::parse("10").unwrap());
        assert_eq!(v.resized(65).count_ones(), 1);
    }

    #[test]
    fn symbol_system() {
        // a ^ b = 10, b = 01, c free
        let mut s = SymbolSystem::new(3, 2);
        s.add_equation(BitVec::parse("110").unwrap(), BitVec::parse("10").unwrap());
        s.add_equation(BitVec::parse("010").unwrap(), BitVec::parse("01").unwrap());
        let sol = s.solve().unwrap();
        assert_eq!(sol[0], BitVec::parse("11"));
        assert_eq!(sol[1], BitVec::parse("01"));
        assert_eq!(sol[2], None);
        s.add_equation(BitVec::parse("100").unwrap(), BitVec::parse("00").unwrap());
        assert!(s.solve().is_err());
    }
}
