//! Sparse rank by right-looking Gaussian elimination.
//!
//! Pivots are picked by a one-step Markowitz search: the sparsest live column
//! and the shortest live row each nominate a pivot, and the cheaper of the two
//! (by `(row_len - 1) * (col_count - 1)`) is eliminated. Once the live
//! submatrix has filled in past a density threshold it is gathered into a
//! dense buffer and handed to [`Field::dense_rank`].

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::exactalg::matrix::Matrix;
use crate::field::{Field, FieldTag};

/// Matrices with at most this many potential entries skip the sparse phase.
pub const DIRECT_DENSE_AREA: usize = 1_000_000;

/// Upper bound on the bytes a dense Schur complement may occupy.
const DENSE_BYTES_BUDGET: usize = 3 << 30;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankStrategy {
    /// Go dense immediately when `rows * cols` is at most this.
    pub direct_dense_area: usize,
    /// Switch to dense once live nonzeros exceed this fraction of the live area.
    pub densify_ratio: f64,
    /// Switch to dense once the cheapest pivot costs more than this many updates.
    pub densify_cost: u64,
}

impl RankStrategy {
    pub fn for_field(tag: FieldTag) -> Self {
        match tag {
            FieldTag::Prime(_) => RankStrategy {
                direct_dense_area: DIRECT_DENSE_AREA,
                densify_ratio: 0.02,
                densify_cost: 20_000,
            },
            // Dense rational elimination suffers coefficient growth; stay sparse.
            FieldTag::Rational => RankStrategy {
                direct_dense_area: 2_500,
                densify_ratio: 0.5,
                densify_cost: u64::MAX,
            },
        }
    }
}

/// How a rank was obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RankStats {
    pub rank: usize,
    pub sparse_pivots: usize,
    pub dense_rows: usize,
    pub dense_cols: usize,
}

pub fn rank<F: Field>(m: &Matrix<F>) -> usize {
    rank_with_stats(m, RankStrategy::for_field(m.field().tag())).rank
}

pub fn rank_with_stats<F: Field>(m: &Matrix<F>, strategy: RankStrategy) -> RankStats {
    if m.nnz() == 0 {
        return RankStats::default();
    }
    // Eliminate along the shorter side; the rank never exceeds it.
    let (rows, ncols) = if m.rows() <= m.cols() {
        (m.row_vectors(), m.cols())
    } else {
        (m.column_vectors(), m.rows())
    };
    let nrows = rows.len();
    if nrows.saturating_mul(ncols) <= strategy.direct_dense_area {
        let f = m.field();
        let mut data = vec![f.zero(); nrows * ncols];
        for (r, row) in rows.into_iter().enumerate() {
            for (c, v) in row {
                data[r * ncols + c as usize] = v;
            }
        }
        return RankStats {
            rank: f.dense_rank(data, nrows, ncols),
            sparse_pivots: 0,
            dense_rows: nrows,
            dense_cols: ncols,
        };
    }
    Elimination::new(m.field(), rows, ncols).run(strategy)
}

struct Elimination<'a, F: Field> {
    f: &'a F,
    rows: Vec<Vec<(u32, F::Elem)>>,
    row_alive: Vec<bool>,
    col_rows: Vec<Vec<u32>>,
    col_count: Vec<u32>,
    col_alive: Vec<bool>,
    row_heap: BinaryHeap<Reverse<(u32, u32)>>,
    col_heap: BinaryHeap<Reverse<(u32, u32)>>,
    nnz: usize,
    live_rows: usize,
    live_cols: usize,
    rank: usize,
}

enum Step {
    Pivot(usize, usize, u64),
    Done,
}

impl<'a, F: Field> Elimination<'a, F> {
    fn new(f: &'a F, rows: Vec<Vec<(u32, F::Elem)>>, ncols: usize) -> Self {
        let mut col_rows = vec![Vec::new(); ncols];
        let mut nnz = 0;
        for (r, row) in rows.iter().enumerate() {
            nnz += row.len();
            for (c, _) in row {
                col_rows[*c as usize].push(r as u32);
            }
        }
        let col_count: Vec<u32> = col_rows.iter().map(|v| v.len() as u32).collect();
        let row_alive: Vec<bool> = rows.iter().map(|r| !r.is_empty()).collect();
        let col_alive: Vec<bool> = col_count.iter().map(|&c| c > 0).collect();
        let row_heap = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_empty())
            .map(|(i, r)| Reverse((r.len() as u32, i as u32)))
            .collect();
        let col_heap = col_count
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| Reverse((c, i as u32)))
            .collect();
        Elimination {
            f,
            live_rows: row_alive.iter().filter(|&&a| a).count(),
            live_cols: col_alive.iter().filter(|&&a| a).count(),
            rows,
            row_alive,
            col_rows,
            col_count,
            col_alive,
            row_heap,
            col_heap,
            nnz,
            rank: 0,
        }
    }

    fn run(mut self, strategy: RankStrategy) -> RankStats {
        let elem_bytes = std::mem::size_of::<F::Elem>().max(1);
        let max_area = DENSE_BYTES_BUDGET / elem_bytes;
        let mut pivots = 0;
        loop {
            if self.live_rows == 0 || self.live_cols == 0 {
                break;
            }
            let area = self.live_rows * self.live_cols;
            let dense_ok = area <= max_area;
            if dense_ok
                && (area <= strategy.direct_dense_area
                    || self.nnz as f64 >= strategy.densify_ratio * area as f64)
            {
                break;
            }
            match self.choose_pivot() {
                Step::Done => break,
                Step::Pivot(r, c, cost) => {
                    if dense_ok && cost > strategy.densify_cost {
                        break;
                    }
                    self.eliminate(r, c);
                    pivots += 1;
                }
            }
        }
        self.finish_dense(pivots)
    }

    /// Live rows of column `c`, with stale and duplicate entries removed.
    fn clean_column(&mut self, c: usize) {
        let rows = &self.rows;
        let alive = &self.row_alive;
        let list = &mut self.col_rows[c];
        list.retain(|&r| {
            alive[r as usize]
                && rows[r as usize]
                    .binary_search_by_key(&(c as u32), |e| e.0)
                    .is_ok()
        });
        list.sort_unstable();
        list.dedup();
        debug_assert_eq!(list.len(), self.col_count[c] as usize);
    }

    fn kill_col(&mut self, c: usize) {
        if self.col_alive[c] {
            self.col_alive[c] = false;
            self.live_cols -= 1;
            self.col_rows[c] = Vec::new();
        }
    }

    fn choose_pivot(&mut self) -> Step {
        let col_cand = loop {
            let Some(&Reverse((cnt, c))) = self.col_heap.peek() else {
                break None;
            };
            let c = c as usize;
            if !self.col_alive[c] || self.col_count[c] != cnt {
                self.col_heap.pop();
                continue;
            }
            if cnt == 0 {
                self.col_heap.pop();
                self.kill_col(c);
                continue;
            }
            break Some((cnt as u64, c));
        };
        let row_cand = loop {
            let Some(&Reverse((len, r))) = self.row_heap.peek() else {
                break None;
            };
            let r = r as usize;
            if !self.row_alive[r] || self.rows[r].len() as u32 != len {
                self.row_heap.pop();
                continue;
            }
            break Some((len as u64, r));
        };
        let (Some((cnt, c)), Some((len, r))) = (col_cand, row_cand) else {
            return Step::Done;
        };

        self.clean_column(c);
        let (best_row, best_len) = self.col_rows[c]
            .iter()
            .map(|&r| (r as usize, self.rows[r as usize].len() as u64))
            .min_by_key(|&(r, l)| (l, r))
            .expect("live column has a live row");
        let col_cost = (cnt - 1) * (best_len - 1);

        let (best_col, best_cnt) = self.rows[r]
            .iter()
            .map(|(c, _)| (*c as usize, self.col_count[*c as usize] as u64))
            .min_by_key(|&(c, n)| (n, c))
            .expect("live row is nonempty");
        let row_cost = (len - 1) * (best_cnt - 1);

        if col_cost <= row_cost {
            Step::Pivot(best_row, c, col_cost)
        } else {
            Step::Pivot(r, best_col, row_cost)
        }
    }

    fn eliminate(&mut self, r: usize, c: usize) {
        let f = self.f;
        self.clean_column(c);
        let targets: Vec<u32> = self.col_rows[c]
            .iter()
            .copied()
            .filter(|&s| s as usize != r)
            .collect();

        let pivot = std::mem::take(&mut self.rows[r]);
        self.row_alive[r] = false;
        self.live_rows -= 1;
        self.rank += 1;
        self.nnz -= pivot.len();
        for (pc, _) in &pivot {
            self.col_count[*pc as usize] -= 1;
        }
        let pos = pivot
            .binary_search_by_key(&(c as u32), |e| e.0)
            .expect("pivot entry present");
        let inv = f.inv(&pivot[pos].1);

        for s in targets {
            let s = s as usize;
            let row = std::mem::take(&mut self.rows[s]);
            let sv = &row[row
                .binary_search_by_key(&(c as u32), |e| e.0)
                .expect("target row has pivot column")]
            .1;
            let factor = f.mul(sv, &inv);
            let old_len = row.len();
            let mut merged = Vec::with_capacity(row.len() + pivot.len());
            let (mut i, mut j) = (0, 0);
            while i < row.len() || j < pivot.len() {
                let take_row = j >= pivot.len() || (i < row.len() && row[i].0 < pivot[j].0);
                let take_piv = i >= row.len() || (j < pivot.len() && pivot[j].0 < row[i].0);
                if take_row {
                    merged.push(row[i].clone());
                    i += 1;
                } else if take_piv {
                    let col = pivot[j].0;
                    let v = f.neg(&f.mul(&factor, &pivot[j].1));
                    self.col_count[col as usize] += 1;
                    self.col_rows[col as usize].push(s as u32);
                    merged.push((col, v));
                    j += 1;
                } else {
                    let col = row[i].0;
                    let v = if col as usize == c {
                        f.zero()
                    } else {
                        f.sub_mul(&row[i].1, &factor, &pivot[j].1)
                    };
                    if f.is_zero(&v) {
                        self.col_count[col as usize] -= 1;
                    } else {
                        merged.push((col, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
            self.nnz = self.nnz - old_len + merged.len();
            if merged.is_empty() {
                self.row_alive[s] = false;
                self.live_rows -= 1;
            } else {
                self.row_heap.push(Reverse((merged.len() as u32, s as u32)));
            }
            self.rows[s] = merged;
        }

        debug_assert_eq!(self.col_count[c], 0);
        self.kill_col(c);
        for (pc, _) in &pivot {
            let pc = *pc as usize;
            if pc != c && self.col_alive[pc] {
                self.col_heap.push(Reverse((self.col_count[pc], pc as u32)));
            }
        }
    }

    fn finish_dense(self, pivots: usize) -> RankStats {
        let f = self.f;
        let mut col_index = vec![u32::MAX; self.col_alive.len()];
        let mut ncols = 0usize;
        for (c, &alive) in self.col_alive.iter().enumerate() {
            if alive && self.col_count[c] > 0 {
                col_index[c] = ncols as u32;
                ncols += 1;
            }
        }
        let live: Vec<usize> = (0..self.rows.len())
            .filter(|&r| self.row_alive[r] && !self.rows[r].is_empty())
            .collect();
        let nrows = live.len();
        let mut dense_rank = 0;
        if nrows > 0 && ncols > 0 {
            let mut data = vec![f.zero(); nrows * ncols];
            let mut rows = self.rows;
            for (i, &r) in live.iter().enumerate() {
                for (c, v) in std::mem::take(&mut rows[r]) {
                    let ci = col_index[c as usize];
                    debug_assert!(ci != u32::MAX);
                    data[i * ncols + ci as usize] = v;
                }
            }
            drop(rows);
            dense_rank = f.dense_rank(data, nrows, ncols);
        }
        RankStats {
            rank: self.rank + dense_rank,
            sparse_pivots: pivots,
            dense_rows: nrows,
            dense_cols: ncols,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::dense::generic_rank;
    use crate::field::{PrimeField, Rationals};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sparse(f: PrimeField, rows: usize, cols: usize, per_row: usize, seed: u64) -> Matrix<PrimeField> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Vec::new();
        for r in 0..rows {
            for _ in 0..per_row {
                t.push((r, rng.random_range(0..cols), rng.random_range(1..f.modulus())));
            }
        }
        Matrix::from_triplets(f, rows, cols, t).unwrap()
    }

    fn dense_reference<F: Field>(m: &Matrix<F>) -> usize {
        let data: Vec<F::Elem> = m.to_dense().into_iter().flatten().collect();
        generic_rank(m.field(), data, m.rows(), m.cols())
    }

    #[test]
    fn sparse_phase_agrees_with_dense_reference() {
        let f = PrimeField::new(101).unwrap();
        let all_sparse = RankStrategy {
            direct_dense_area: 0,
            densify_ratio: 2.0,
            densify_cost: u64::MAX,
        };
        let mixed = RankStrategy {
            direct_dense_area: 0,
            densify_ratio: 0.05,
            densify_cost: 50,
        };
        for seed in 0..20 {
            let rows = 30 + (seed as usize * 7) % 50;
            let cols = 25 + (seed as usize * 13) % 60;
            let m = random_sparse(f, rows, cols, 1 + seed as usize % 4, seed);
            let expected = dense_reference(&m);
            assert_eq!(rank_with_stats(&m, all_sparse).rank, expected, "seed {seed}");
            assert_eq!(rank_with_stats(&m, mixed).rank, expected, "seed {seed}");
            assert_eq!(rank(&m), expected);
        }
    }

    #[test]
    fn rational_sparse_elimination() {
        let q = Rationals;
        let mut t = Vec::new();
        // Path-graph incidence matrix: rank = vertices - 1.
        for e in 0..60 {
            t.push((e, e, q.from_i64(1)));
            t.push((e, e + 1, q.from_i64(-1)));
        }
        let m = Matrix::from_triplets(q, 60, 61, t).unwrap();
        assert_eq!(rank(&m), 60);
        assert_eq!(rank(&m.transpose()), 60);
    }

    #[test]
    fn trivial_shapes() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(rank(&Matrix::identity(f, 5)), 5);
        assert_eq!(rank(&Matrix::zero(f, 3, 4)), 0);
        assert_eq!(rank(&Matrix::zero(f, 0, 4)), 0);
    }
}
