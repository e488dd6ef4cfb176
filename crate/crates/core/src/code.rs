//! Nonbinary LDPC code machinery: the sparse parity-check matrix with its
//! row/column index sets, alist file I/O, systematic encoding by Gaussian
//! elimination, syndrome computation, and the structural check for
//! majority-logic decodability.

use std::collections::HashSet;
use std::path::Path;
use std::sync::Arc;

use rand::Rng as _;
use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf::{FieldTable, Symbol};

/// A length-N vector over F_q. Produced by [`Encoder::encode`], in which case
/// its syndrome is zero.
pub type Codeword = Vec<Symbol>;

/// H = [h_{i,j}] over F_q, stored as row and column adjacency lists.
///
/// `rows[i]` is the sorted support of row i (the index set N_i with values),
/// `cols[j]` the sorted support of column j (M_j with values). Immutable
/// after construction.
#[derive(Debug, Clone)]
pub struct SparseParityMatrix {
    field: Arc<FieldTable>,
    num_rows: usize,
    num_cols: usize,
    rows: Vec<Vec<(usize, Symbol)>>,
    cols: Vec<Vec<(usize, Symbol)>>,
}

impl SparseParityMatrix {
    /// Builds a matrix from `(row, col, value)` entries. Values must be
    /// nonzero, indices in range, and no position may repeat.
    pub fn from_entries(
        field: Arc<FieldTable>,
        num_rows: usize,
        num_cols: usize,
        entries: &[(usize, usize, Symbol)],
    ) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, Symbol)>> = vec![Vec::new(); num_rows];
        let mut cols: Vec<Vec<(usize, Symbol)>> = vec![Vec::new(); num_cols];
        let mut seen = HashSet::new();
        for &(i, j, h) in entries {
            if i >= num_rows || j >= num_cols {
                return Err(Error::Code(format!(
                    "entry ({i}, {j}) outside a {num_rows}x{num_cols} matrix"
                )));
            }
            if h == 0 || h as usize >= field.q() {
                return Err(Error::Code(format!(
                    "entry ({i}, {j}) has value {h} outside [1, {})",
                    field.q()
                )));
            }
            if !seen.insert((i, j)) {
                return Err(Error::Code(format!("duplicate entry at ({i}, {j})")));
            }
            rows[i].push((j, h));
            cols[j].push((i, h));
        }
        for r in &mut rows {
            r.sort_unstable_by_key(|&(j, _)| j);
        }
        for c in &mut cols {
            c.sort_unstable_by_key(|&(i, _)| i);
        }
        Ok(SparseParityMatrix {
            field,
            num_rows,
            num_cols,
            rows,
            cols,
        })
    }

    pub fn field(&self) -> &Arc<FieldTable> {
        &self.field
    }

    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    pub fn num_cols(&self) -> usize {
        self.num_cols
    }

    /// Support of row i: sorted `(column, value)` pairs.
    pub fn row(&self, i: usize) -> &[(usize, Symbol)] {
        &self.rows[i]
    }

    /// Support of column j: sorted `(row, value)` pairs.
    pub fn col(&self, j: usize) -> &[(usize, Symbol)] {
        &self.cols[j]
    }

    /// δ, the number of nonzero entries.
    pub fn num_entries(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Symbol)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |&(j, h)| (i, j, h)))
    }

    /// s_i = Σ_{j ∈ N_i} h_{i,j} · v̂_j over F_q.
    pub fn syndrome(&self, v: &[Symbol]) -> Vec<Symbol> {
        assert_eq!(v.len(), self.num_cols, "estimate length must equal N");
        let f = &self.field;
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .fold(0, |acc, &(j, h)| f.add(acc, f.mul(h, v[j])))
            })
            .collect()
    }

    /// True iff no two rows share more than one nonzero position and no two
    /// columns share more than one nonzero position (equivalently, the Tanner
    /// graph has no 4-cycle).
    pub fn is_majority_logic_decodable(&self) -> bool {
        // A repeated column pair across rows and a repeated row pair across
        // columns are both witnessed by a 2x2 all-nonzero submatrix, so each
        // scan below would find any violation; both run because they are cheap.
        let mut col_pairs = HashSet::new();
        for row in &self.rows {
            for a in 0..row.len() {
                for b in a + 1..row.len() {
                    if !col_pairs.insert((row[a].0, row[b].0)) {
                        return false;
                    }
                }
            }
        }
        let mut row_pairs = HashSet::new();
        for col in &self.cols {
            for a in 0..col.len() {
                for b in a + 1..col.len() {
                    if !row_pairs.insert((col[a].0, col[b].0)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Writes the matrix in the nonbinary alist format (see [`load_alist`]).
    pub fn save_alist(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let max_col = self.cols.iter().map(Vec::len).max().unwrap_or(0);
        let max_row = self.rows.iter().map(Vec::len).max().unwrap_or(0);
        let mut out = String::new();
        out.push_str(&format!(
            "{} {} {}\n",
            self.num_cols,
            self.num_rows,
            self.field.q()
        ));
        out.push_str(&format!("{max_col} {max_row}\n"));
        let col_weights: Vec<String> = self.cols.iter().map(|c| c.len().to_string()).collect();
        out.push_str(&col_weights.join(" "));
        out.push('\n');
        let row_weights: Vec<String> = self.rows.iter().map(|r| r.len().to_string()).collect();
        out.push_str(&row_weights.join(" "));
        out.push('\n');
        for col in &self.cols {
            let mut tokens = Vec::with_capacity(2 * max_col);
            for &(i, h) in col {
                tokens.push((i + 1).to_string());
                tokens.push(h.to_string());
            }
            for _ in col.len()..max_col {
                tokens.push("0".into());
                tokens.push("0".into());
            }
            out.push_str(&tokens.join(" "));
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
    }
}

/// Reads a matrix in the nonbinary alist format:
///
/// ```text
/// N M q
/// max_col_weight max_row_weight
/// <N column weights>
/// <M row weights>
/// <N per-column lines of "row_index value" pairs, 1-based, padded with "0 0">
/// ```
///
/// The field size declared in the file must match `field.q()`.
pub fn load_alist(path: impl AsRef<Path>, field: Arc<FieldTable>) -> Result<SparseParityMatrix> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_alist(&path.display().to_string(), &text, Some(field))
}

/// Like [`load_alist`] but builds the field from the q declared in the file,
/// using the default defining polynomial.
pub fn load_alist_with_default_field(path: impl AsRef<Path>) -> Result<SparseParityMatrix> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_alist(&path.display().to_string(), &text, None)
}

fn parse_alist(
    path: &str,
    text: &str,
    field: Option<Arc<FieldTable>>,
) -> Result<SparseParityMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(idx, l)| (idx + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let mut next_ints = |expect: &str| -> Result<(usize, Vec<i64>)> {
        let (no, line) = lines
            .next()
            .ok_or_else(|| Error::parse(path, text.lines().count() + 1, format!("missing {expect}")))?;
        let vals = line
            .split_whitespace()
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|_| Error::parse(path, no, format!("bad integer `{t}` in {expect}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((no, vals))
    };

    let (no, header) = next_ints("header `N M q`")?;
    if header.len() != 3 || header.iter().any(|&v| v <= 0) {
        return Err(Error::parse(path, no, "header must be three positive integers `N M q`"));
    }
    let (n, m_rows, q) = (header[0] as usize, header[1] as usize, header[2] as usize);
    let field = match field {
        Some(f) => {
            if f.q() != q {
                return Err(Error::parse(
                    path,
                    no,
                    format!("file declares q = {q} but the configured field has q = {}", f.q()),
                ));
            }
            f
        }
        None => {
            if !q.is_power_of_two() || q < 2 || q > 256 {
                return Err(Error::parse(path, no, format!("unsupported field size q = {q}")));
            }
            Arc::new(FieldTable::with_default_poly(q.trailing_zeros())?)
        }
    };

    let (no, maxes) = next_ints("`max_col_weight max_row_weight`")?;
    if maxes.len() != 2 || maxes.iter().any(|&v| v < 0) {
        return Err(Error::parse(path, no, "expected `max_col_weight max_row_weight`"));
    }
    let max_col = maxes[0] as usize;

    let (no, col_weights) = next_ints("column weights")?;
    if col_weights.len() != n {
        return Err(Error::parse(
            path,
            no,
            format!("expected {n} column weights, found {}", col_weights.len()),
        ));
    }
    let (no, row_weights) = next_ints("row weights")?;
    if row_weights.len() != m_rows {
        return Err(Error::parse(
            path,
            no,
            format!("expected {m_rows} row weights, found {}", row_weights.len()),
        ));
    }

    let mut entries = Vec::new();
    for j in 0..n {
        let (no, vals) = next_ints(&format!("entries for column {}", j + 1))?;
        if vals.len() % 2 != 0 {
            return Err(Error::parse(path, no, "column entries must be `row value` pairs"));
        }
        let declared = col_weights[j] as usize;
        if vals.len() != 2 * declared && vals.len() != 2 * max_col {
            return Err(Error::parse(
                path,
                no,
                format!(
                    "column {} declares weight {declared} but the line has {} pairs",
                    j + 1,
                    vals.len() / 2
                ),
            ));
        }
        let mut weight = 0;
        for pair in vals.chunks(2) {
            let (r, v) = (pair[0], pair[1]);
            if r == 0 && v == 0 {
                continue;
            }
            if r < 1 || r > m_rows as i64 {
                return Err(Error::parse(path, no, format!("row index {r} outside [1, {m_rows}]")));
            }
            if v < 1 || v >= q as i64 {
                return Err(Error::parse(path, no, format!("value {v} outside [1, {})", q)));
            }
            entries.push((r as usize - 1, j, v as Symbol));
            weight += 1;
        }
        if weight != declared {
            return Err(Error::parse(
                path,
                no,
                format!("column {} declares weight {declared} but has {weight} entries", j + 1),
            ));
        }
    }

    let matrix = SparseParityMatrix::from_entries(field, m_rows, n, &entries)
        .map_err(|e| Error::parse(path, 1, e.to_string()))?;
    for (i, row) in matrix.rows.iter().enumerate() {
        if row.len() != row_weights[i] as usize {
            return Err(Error::parse(
                path,
                4,
                format!(
                    "row {} declares weight {} but has {} entries",
                    i + 1,
                    row_weights[i],
                    row.len()
                ),
            ));
        }
    }
    Ok(matrix)
}

/// Systematic encoder derived from H by Gauss-Jordan elimination with column
/// pivoting. Message symbols occupy the non-pivot columns, so codewords come
/// out in H's own column order.
#[derive(Debug, Clone)]
pub struct Encoder {
    n: usize,
    rank: usize,
    /// Non-pivot columns, in ascending order; message symbols land here.
    message_cols: Vec<usize>,
    /// Pivot column of each reduced row.
    parity_cols: Vec<usize>,
    /// Reduced rows restricted to the message columns (rank x K).
    coeffs: Vec<Vec<Symbol>>,
    field: Arc<FieldTable>,
}

impl Encoder {
    /// Effective message length K = N − rank(H).
    pub fn message_len(&self) -> usize {
        self.n - self.rank
    }

    pub fn codeword_len(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Column indices carrying the message symbols.
    pub fn message_cols(&self) -> &[usize] {
        &self.message_cols
    }

    /// Maps a length-K message to the unique codeword agreeing with it on the
    /// message columns.
    pub fn encode(&self, u: &[Symbol]) -> Codeword {
        assert_eq!(u.len(), self.message_len(), "message length must equal K");
        let f = &self.field;
        let mut v = vec![0; self.n];
        for (k, &j) in self.message_cols.iter().enumerate() {
            v[j] = u[k];
        }
        for (r, &j) in self.parity_cols.iter().enumerate() {
            let mut acc = 0;
            for (k, &c) in self.coeffs[r].iter().enumerate() {
                acc = f.add(acc, f.mul(c, u[k]));
            }
            // Row r reads v[pivot] + Σ coeffs·u = 0; in characteristic 2 the
            // pivot value equals the sum itself.
            v[j] = acc;
        }
        v
    }
}

/// Reduces H to reduced row-echelon form over F_q and returns the systematic
/// encoder. Rank-deficient matrices are fine: redundant rows drop out of the
/// encoder (K = N − rank) while H itself keeps them for decoding.
pub fn build_encoder(h: &SparseParityMatrix) -> Result<Encoder> {
    let f = h.field().clone();
    let (m_rows, n) = (h.num_rows(), h.num_cols());
    let mut a: Vec<Vec<Symbol>> = vec![vec![0; n]; m_rows];
    for (i, j, v) in h.entries() {
        a[i][j] = v;
    }

    let mut parity_cols = Vec::new();
    let mut rank = 0;
    for j in 0..n {
        let Some(pivot) = (rank..m_rows).find(|&r| a[r][j] != 0) else {
            continue;
        };
        a.swap(rank, pivot);
        let scale = f.inv(a[rank][j]).expect("pivot is nonzero");
        for x in a[rank].iter_mut() {
            *x = f.mul(scale, *x);
        }
        for r in 0..m_rows {
            if r != rank && a[r][j] != 0 {
                let factor = a[r][j];
                for c in 0..n {
                    let sub = f.mul(factor, a[rank][c]);
                    a[r][c] = f.add(a[r][c], sub);
                }
            }
        }
        parity_cols.push(j);
        rank += 1;
        if rank == m_rows {
            break;
        }
    }

    let pivot_set: HashSet<usize> = parity_cols.iter().copied().collect();
    let message_cols: Vec<usize> = (0..n).filter(|j| !pivot_set.contains(j)).collect();
    let coeffs: Vec<Vec<Symbol>> = (0..rank)
        .map(|r| message_cols.iter().map(|&j| a[r][j]).collect())
        .collect();

    Ok(Encoder {
        n,
        rank,
        message_cols,
        parity_cols,
        coeffs,
        field: f,
    })
}

/// Draws a random (col_weight, row_weight)-regular matrix with girth >= 6,
/// nonzero values uniform over F_q \ {0}, deterministically from `seed`.
///
/// Columns are filled greedily with rows that have remaining capacity and
/// would not close a 4-cycle; a dead end restarts the whole matrix. Fails
/// after a bounded number of restarts.
pub fn random_regular_code(
    n: usize,
    col_weight: usize,
    row_weight: usize,
    field: Arc<FieldTable>,
    seed: u64,
) -> Result<SparseParityMatrix> {
    if n == 0 || col_weight == 0 || row_weight == 0 {
        return Err(Error::Code("code dimensions must be positive".into()));
    }
    if (n * col_weight) % row_weight != 0 {
        return Err(Error::Code(format!(
            "N * col_weight = {} is not divisible by row_weight = {row_weight}",
            n * col_weight
        )));
    }
    let m_rows = n * col_weight / row_weight;
    if col_weight > m_rows {
        return Err(Error::Code(format!(
            "col_weight {col_weight} exceeds the {m_rows} available rows"
        )));
    }

    const MAX_ATTEMPTS: u64 = 500;
    'attempt: for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut row_load = vec![0usize; m_rows];
        let mut used_pairs: HashSet<(usize, usize)> = HashSet::new();
        let mut entries: Vec<(usize, usize, Symbol)> = Vec::with_capacity(n * col_weight);
        for j in 0..n {
            let mut picked: Vec<usize> = Vec::with_capacity(col_weight);
            for _ in 0..col_weight {
                let candidates: Vec<usize> = (0..m_rows)
                    .filter(|&i| {
                        row_load[i] < row_weight
                            && !picked.contains(&i)
                            && picked.iter().all(|&r| {
                                !used_pairs.contains(&(i.min(r), i.max(r)))
                            })
                    })
                    .collect();
                if candidates.is_empty() {
                    continue 'attempt;
                }
                let i = candidates[rng.random_range(0..candidates.len())];
                for &r in &picked {
                    used_pairs.insert((i.min(r), i.max(r)));
                }
                picked.push(i);
                row_load[i] += 1;
            }
            for &i in &picked {
                let value = rng.random_range(1..field.q()) as Symbol;
                entries.push((i, j, value));
            }
        }
        return SparseParityMatrix::from_entries(field, m_rows, n, &entries);
    }
    Err(Error::Code(format!(
        "no girth-6 ({col_weight}, {row_weight})-regular matrix found for N = {n} after {MAX_ATTEMPTS} attempts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf4() -> Arc<FieldTable> {
        Arc::new(FieldTable::with_default_poly(2).unwrap())
    }

    fn gf16() -> Arc<FieldTable> {
        Arc::new(FieldTable::with_default_poly(4).unwrap())
    }

    /// 3x6 GF(4) matrix used across the tests.
    fn small_matrix() -> SparseParityMatrix {
        let entries = [
            (0, 0, 1),
            (0, 2, 2),
            (0, 4, 3),
            (1, 1, 1),
            (1, 2, 1),
            (1, 5, 2),
            (2, 0, 3),
            (2, 3, 1),
            (2, 5, 1),
        ];
        SparseParityMatrix::from_entries(gf4(), 3, 6, &entries).unwrap()
    }

    fn syndrome_by_double_loop(h: &SparseParityMatrix, v: &[Symbol]) -> Vec<Symbol> {
        let f = h.field();
        let mut dense = vec![vec![0; h.num_cols()]; h.num_rows()];
        for (i, j, val) in h.entries() {
            dense[i][j] = val;
        }
        (0..h.num_rows())
            .map(|i| {
                (0..h.num_cols()).fold(0, |acc, j| f.add(acc, f.mul(dense[i][j], v[j])))
            })
            .collect()
    }

    #[test]
    fn entry_validation() {
        let f = gf4();
        assert!(SparseParityMatrix::from_entries(f.clone(), 2, 2, &[(0, 0, 0)]).is_err());
        assert!(SparseParityMatrix::from_entries(f.clone(), 2, 2, &[(0, 0, 4)]).is_err());
        assert!(SparseParityMatrix::from_entries(f.clone(), 2, 2, &[(2, 0, 1)]).is_err());
        assert!(
            SparseParityMatrix::from_entries(f, 2, 2, &[(0, 0, 1), (0, 0, 2)]).is_err(),
            "duplicate positions must be rejected"
        );
    }

    #[test]
    fn syndrome_matches_double_loop_on_random_vectors() {
        let h = small_matrix();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let v: Vec<Symbol> = (0..6).map(|_| rng.random_range(0..4) as Symbol).collect();
            assert_eq!(h.syndrome(&v), syndrome_by_double_loop(&h, &v));
        }
    }

    #[test]
    fn syndrome_is_linear_in_single_symbol_changes() {
        let h = small_matrix();
        let f = h.field().clone();
        let v = vec![1, 2, 3, 0, 1, 2];
        let base = h.syndrome(&v);
        for j in 0..6 {
            for delta in 1..4u8 {
                let mut w = v.clone();
                w[j] = f.add(w[j], delta);
                let s = h.syndrome(&w);
                for i in 0..3 {
                    let expected = match h.col(j).iter().find(|&&(r, _)| r == i) {
                        Some(&(_, hij)) => f.add(base[i], f.mul(hij, delta)),
                        None => base[i],
                    };
                    assert_eq!(s[i], expected, "row {i}, column {j}, delta {delta}");
                }
            }
        }
    }

    #[test]
    fn encoder_produces_the_null_space_exactly() {
        let h = small_matrix();
        let enc = build_encoder(&h).unwrap();
        assert_eq!(enc.rank(), 3);
        assert_eq!(enc.message_len(), 3);

        assert_eq!(enc.encode(&[0, 0, 0]), vec![0; 6], "zero message encodes to zero");

        // Enumerate the null space of H directly over all 4^6 vectors.
        let mut null_space: Vec<Vec<Symbol>> = Vec::new();
        for idx in 0..4096u32 {
            let v: Vec<Symbol> = (0..6).map(|j| ((idx >> (2 * j)) & 3) as Symbol).collect();
            if h.syndrome(&v).iter().all(|&s| s == 0) {
                null_space.push(v);
            }
        }
        let mut encoded: Vec<Vec<Symbol>> = Vec::new();
        for idx in 0..64u32 {
            let u: Vec<Symbol> = (0..3).map(|k| ((idx >> (2 * k)) & 3) as Symbol).collect();
            let v = enc.encode(&u);
            assert!(h.syndrome(&v).iter().all(|&s| s == 0), "encode must satisfy H");
            encoded.push(v);
        }
        null_space.sort();
        encoded.sort();
        assert_eq!(encoded, null_space, "the encoder image must be the whole null space");
    }

    #[test]
    fn rank_deficient_matrix_reports_effective_k() {
        // Row 2 is a multiple of row 0, so the rank is 2, not 3.
        let f = gf4();
        let entries = [
            (0, 0, 1),
            (0, 1, 2),
            (1, 2, 1),
            (1, 3, 3),
            (2, 0, 2),
            (2, 1, 3),
        ];
        let h = SparseParityMatrix::from_entries(f, 3, 4, &entries).unwrap();
        let enc = build_encoder(&h).unwrap();
        assert_eq!(enc.rank(), 2);
        assert_eq!(enc.message_len(), 2, "K must be N - rank, not N - M");
        let v = enc.encode(&[3, 1]);
        assert!(h.syndrome(&v).iter().all(|&s| s == 0));
    }

    /// Brute-force pair scan straight off the definition.
    fn mld_by_pair_scan(h: &SparseParityMatrix) -> bool {
        let supp_row = |i: usize| -> Vec<usize> { h.row(i).iter().map(|&(j, _)| j).collect() };
        let supp_col = |j: usize| -> Vec<usize> { h.col(j).iter().map(|&(i, _)| i).collect() };
        for a in 0..h.num_rows() {
            for b in a + 1..h.num_rows() {
                let (ra, rb) = (supp_row(a), supp_row(b));
                if ra.iter().filter(|j| rb.contains(j)).count() > 1 {
                    return false;
                }
            }
        }
        for a in 0..h.num_cols() {
            for b in a + 1..h.num_cols() {
                let (ca, cb) = (supp_col(a), supp_col(b));
                if ca.iter().filter(|i| cb.contains(i)).count() > 1 {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn majority_logic_check_on_known_structures() {
        let f = gf4();
        // Disjoint supports: trivially decodable.
        let disjoint = SparseParityMatrix::from_entries(
            f.clone(),
            2,
            4,
            &[(0, 0, 1), (0, 1, 2), (1, 2, 1), (1, 3, 3)],
        )
        .unwrap();
        assert!(disjoint.is_majority_logic_decodable());
        assert!(mld_by_pair_scan(&disjoint));

        // Two identical weight-2 rows overlap in two positions.
        let twin = SparseParityMatrix::from_entries(
            f.clone(),
            2,
            2,
            &[(0, 0, 1), (0, 1, 1), (1, 0, 2), (1, 1, 2)],
        )
        .unwrap();
        assert!(!twin.is_majority_logic_decodable());
        assert!(!mld_by_pair_scan(&twin));

        // Circulant incidence of the 7-point projective plane: rows are cyclic
        // shifts of {0, 1, 3}, a perfect difference set mod 7.
        let mut entries = Vec::new();
        for i in 0..7 {
            for off in [0, 1, 3] {
                entries.push((i, (i + off) % 7, 1));
            }
        }
        let fano = SparseParityMatrix::from_entries(f, 7, 7, &entries).unwrap();
        assert!(fano.is_majority_logic_decodable());
        assert!(mld_by_pair_scan(&fano));
    }

    #[test]
    fn majority_logic_check_agrees_with_pair_scan_on_random_codes() {
        for seed in 0..8 {
            let h = random_regular_code(24, 2, 4, gf16(), seed).unwrap();
            assert_eq!(h.is_majority_logic_decodable(), mld_by_pair_scan(&h));
        }
    }

    #[test]
    fn random_codes_are_regular_reproducible_and_four_cycle_free() {
        let h = random_regular_code(16, 2, 4, gf16(), 1).unwrap();
        assert_eq!(h.num_entries(), 32);
        assert_eq!(h.num_rows(), 8);
        for j in 0..16 {
            assert_eq!(h.col(j).len(), 2);
        }
        for i in 0..8 {
            assert_eq!(h.row(i).len(), 4);
        }
        // Girth >= 6: no two columns share two rows.
        for a in 0..16 {
            for b in a + 1..16 {
                let ca: Vec<usize> = h.col(a).iter().map(|&(i, _)| i).collect();
                let overlap = h.col(b).iter().filter(|&&(i, _)| ca.contains(&i)).count();
                assert!(overlap <= 1, "columns {a} and {b} close a 4-cycle");
            }
        }

        let again = random_regular_code(16, 2, 4, gf16(), 1).unwrap();
        let a: Vec<_> = h.entries().collect();
        let b: Vec<_> = again.entries().collect();
        assert_eq!(a, b, "same seed must reproduce the same matrix");

        let other = random_regular_code(16, 2, 4, gf16(), 2).unwrap();
        let c: Vec<_> = other.entries().collect();
        assert_ne!(a, c, "different seeds should differ");
    }

    #[test]
    fn random_code_rejects_bad_shapes() {
        assert!(random_regular_code(10, 3, 4, gf4(), 1).is_err(), "30 not divisible by 4");
    }

    #[test]
    fn alist_round_trip_preserves_entries() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("code.alist");
        let h = random_regular_code(16, 2, 4, gf16(), 3).unwrap();
        h.save_alist(&path).unwrap();
        let back = load_alist(&path, gf16()).unwrap();
        assert_eq!(
            h.entries().collect::<Vec<_>>(),
            back.entries().collect::<Vec<_>>()
        );
        let via_default = load_alist_with_default_field(&path).unwrap();
        assert_eq!(via_default.field().q(), 16);
        assert_eq!(
            h.entries().collect::<Vec<_>>(),
            via_default.entries().collect::<Vec<_>>()
        );
    }

    #[test]
    fn alist_rejects_bad_files() {
        let dir = tempfile::tempdir().unwrap();

        // Value 4 is out of range for GF(4).
        let bad_value = dir.path().join("bad_value.alist");
        std::fs::write(&bad_value, "2 2 4\n1 1\n1 1\n1 1\n1 4\n2 1\n").unwrap();
        let err = load_alist(&bad_value, gf4()).unwrap_err();
        assert!(err.to_string().contains("outside [1, 4)"), "got: {err}");

        // Field mismatch.
        let mismatch = dir.path().join("mismatch.alist");
        std::fs::write(&mismatch, "2 2 16\n1 1\n1 1\n1 1\n1 3\n2 5\n").unwrap();
        assert!(load_alist(&mismatch, gf4()).is_err());

        // Declared column weight disagrees with the entries.
        let inconsistent = dir.path().join("inconsistent.alist");
        std::fs::write(&inconsistent, "2 2 4\n2 2\n2 1\n2 1\n1 1\n2 1\n").unwrap();
        let err = load_alist(&inconsistent, gf4()).unwrap_err();
        assert!(err.to_string().contains("weight"), "got: {err}");
    }

    #[test]
    fn alist_count_preservation() {
        // A 2x4 GF(4) file declaring 6 entries loads with δ = 6.
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("six.alist");
        std::fs::write(
            &path,
            "4 2 4\n2 3\n2 2 1 1\n3 3\n1 1 2 2\n1 3 2 1\n1 2 0 0\n2 3 0 0\n",
        )
        .unwrap();
        let h = load_alist(&path, gf4()).unwrap();
        assert_eq!(h.num_entries(), 6);
    }
}
