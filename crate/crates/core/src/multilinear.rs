//! Monomial and exterior bases, and the Koszul differentials as sparse matrices.
//!
//! Monomials of degree `q` in `v_1, ..., v_n` are ordered by their sorted
//! variable sequences `i_1 <= ... <= i_q`, lexicographically; for exponent
//! vectors this is descending lexicographic order, so `v_1^q` comes first.
//! Exterior bases use lexicographic order on increasing index tuples.
//! Indices are 0-based throughout.

use crate::error::{Error, Result};
use crate::exactalg::{Matrix, SubspaceBasis};
use crate::field::Field;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// The monomial basis of `Sym^q` of an `n`-dimensional space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    n: usize,
    degree: usize,
    /// Exponent vectors, flattened with stride `n`.
    exponents: Vec<u8>,
    /// `multisets[k][s]`: number of size-`s` multisets from `k` symbols.
    multisets: Vec<Vec<usize>>,
}

pub fn sym_basis(n: usize, q: usize) -> MonomialBasis {
    MonomialBasis::new(n, q)
}

impl MonomialBasis {
    pub fn new(n: usize, degree: usize) -> Self {
        assert!(n >= 1, "need at least one variable");
        assert!(degree < u8::MAX as usize, "degree {degree} too large");
        let multisets = (0..=n)
            .map(|k| {
                (0..=degree)
                    .map(|s| if k == 0 { usize::from(s == 0) } else { binomial(k + s - 1, s) })
                    .collect()
            })
            .collect();
        let size = binomial(n + degree - 1, degree);
        let mut exponents = Vec::with_capacity(size * n);
        let mut seq = vec![0usize; degree];
        loop {
            let start = exponents.len();
            exponents.resize(start + n, 0);
            for &i in &seq {
                exponents[start + i] += 1;
            }
            // Next non-decreasing sequence.
            let Some(t) = (0..degree).rev().find(|&t| seq[t] + 1 < n) else {
                break;
            };
            let v = seq[t] + 1;
            for x in seq[t..].iter_mut() {
                *x = v;
            }
        }
        debug_assert_eq!(exponents.len(), size * n);
        MonomialBasis {
            n,
            degree,
            exponents,
            multisets,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn len(&self) -> usize {
        self.exponents.len() / self.n
    }
    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self, index: usize) -> &[u8] {
        &self.exponents[index * self.n..(index + 1) * self.n]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u8]> {
        self.exponents.chunks(self.n)
    }

    /// Position of an exponent vector, or `None` if it is not of this degree.
    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        if exps.len() != self.n || exps.iter().map(|&e| e as usize).sum::<usize>() != self.degree {
            return None;
        }
        let mut rank = 0;
        let mut remaining = self.degree;
        let mut prev = 0;
        for (var, &e) in exps.iter().enumerate() {
            for _ in 0..e {
                for v in prev..var {
                    rank += self.multisets[self.n - v][remaining - 1];
                }
                prev = var;
                remaining -= 1;
            }
        }
        Some(rank)
    }

    /// Index of `m * v_var` in `target`, where `m` is this basis's element `index`.
    pub fn times_variable(&self, index: usize, var: usize, target: &MonomialBasis, scratch: &mut Vec<u8>) -> usize {
        scratch.clear();
        scratch.extend_from_slice(self.exponents(index));
        scratch[var] += 1;
        target.index_of(scratch).expect("degree shifts by one")
    }
}

/// Lexicographic basis of `∧^d` of an `n`-dimensional space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExteriorBasis {
    n: usize,
    degree: usize,
    entries: Vec<Vec<usize>>,
}

impl ExteriorBasis {
    pub fn new(n: usize, degree: usize) -> Self {
        let mut entries = Vec::with_capacity(binomial(n, degree));
        let mut tuple: Vec<usize> = (0..degree).collect();
        if degree <= n {
            loop {
                entries.push(tuple.clone());
                let Some(t) = (0..degree).rev().find(|&t| tuple[t] < n - degree + t) else {
                    break;
                };
                tuple[t] += 1;
                for s in t + 1..degree {
                    tuple[s] = tuple[s - 1] + 1;
                }
            }
        }
        ExteriorBasis { n, degree, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn len(&self) -> usize {
        self.entries.len()
    }
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
    pub fn entries(&self) -> &[Vec<usize>] {
        &self.entries
    }

    /// Position of a strictly increasing tuple.
    pub fn index_of(&self, tuple: &[usize]) -> Option<usize> {
        if tuple.len() != self.degree
            || tuple.windows(2).any(|w| w[0] >= w[1])
            || tuple.last().is_some_and(|&x| x >= self.n)
        {
            return None;
        }
        let d = self.degree;
        let mut rank = 0;
        let mut next = 0;
        for (t, &c) in tuple.iter().enumerate() {
            for v in next..c {
                rank += binomial(self.n - 1 - v, d - t - 1);
            }
            next = c + 1;
        }
        Some(rank)
    }

    /// Position and permutation sign of an arbitrary tuple; `None` when an index repeats.
    pub fn signed_index(&self, tuple: &[usize]) -> Option<(usize, bool)> {
        let mut sorted = tuple.to_vec();
        let mut odd = false;
        for i in 1..sorted.len() {
            let mut j = i;
            while j > 0 && sorted[j - 1] > sorted[j] {
                sorted.swap(j - 1, j);
                odd = !odd;
                j -= 1;
            }
        }
        self.index_of(&sorted).map(|idx| (idx, odd))
    }
}

/// Index of `v_i ∧ v_j` (`i < j`) in the lexicographic basis of `∧^2` of an `n`-space.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

fn signed<F: Field>(f: &F, v: F::Elem, negate: bool) -> F::Elem {
    if negate {
        f.neg(&v)
    } else {
        v
    }
}

/// Multiplication `V ⊗ Sym^{q+1} → Sym^{q+2}`. Column `i * dim Sym^{q+1} + m` is `v_i ⊗ m`.
pub fn delta1_matrix<F: Field>(field: F, n: usize, q: usize) -> Matrix<F> {
    let src = MonomialBasis::new(n, q + 1);
    let dst = MonomialBasis::new(n, q + 2);
    let mut scratch = Vec::new();
    let mut columns = Vec::with_capacity(n * src.len());
    for i in 0..n {
        for m in 0..src.len() {
            columns.push(vec![(src.times_variable(m, i, &dst, &mut scratch), field.one())]);
        }
    }
    Matrix::from_columns(field, dst.len(), columns)
}

/// `(v_i ∧ v_j) ⊗ f ↦ v_j ⊗ v_i f − v_i ⊗ v_j f`, from `∧^2 V ⊗ Sym^q` to `V ⊗ Sym^{q+1}`.
pub fn delta2_matrix<F: Field>(field: F, n: usize, q: usize) -> Matrix<F> {
    let wedge = ExteriorBasis::new(n, 2);
    let src = MonomialBasis::new(n, q);
    let dst = MonomialBasis::new(n, q + 1);
    let minus_one = field.neg(&field.one());
    let mut scratch = Vec::new();
    let mut columns = Vec::with_capacity(wedge.len() * src.len());
    for pair in wedge.entries() {
        let (i, j) = (pair[0], pair[1]);
        for f in 0..src.len() {
            columns.push(vec![
                (j * dst.len() + src.times_variable(f, i, &dst, &mut scratch), field.one()),
                (i * dst.len() + src.times_variable(f, j, &dst, &mut scratch), minus_one.clone()),
            ]);
        }
    }
    Matrix::from_columns(field, n * dst.len(), columns)
}

/// Row selection for [`delta2_on_k`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Delta2Rows {
    /// All of `V ⊗ Sym^{q+1}`.
    Full,
    /// Drops the row `v_l ⊗ M/v_l` for each monomial `M` of degree `q+2`, where
    /// `v_l` is the largest variable dividing `M`. Projection onto the kept rows
    /// is injective on `ker δ1`, so ranks of maps into `ker δ1` are unchanged.
    Reduced,
}

fn check_wedge_ambient<F: Field>(n: usize, s: &SubspaceBasis<F>, what: &str) -> Result<()> {
    let expected = binomial(n, 2);
    if s.ambient_dim() != expected {
        return Err(Error::AmbientMismatch(format!(
            "{what} lives in a space of dimension {}, but ∧^2 of a {n}-space has dimension {expected}",
            s.ambient_dim()
        )));
    }
    Ok(())
}

/// `δ2` restricted to `K ⊗ Sym^q`, one column per (basis vector of `K`, monomial).
pub fn delta2_on_k<F: Field>(n: usize, q: usize, k: &SubspaceBasis<F>, rows: Delta2Rows) -> Result<Matrix<F>> {
    check_wedge_ambient(n, k, "K")?;
    let field = k.field().clone();
    let wedge = ExteriorBasis::new(n, 2);
    let src = MonomialBasis::new(n, q);
    let dst = MonomialBasis::new(n, q + 1);

    let row_map: Vec<Option<usize>> = match rows {
        Delta2Rows::Full => (0..n * dst.len()).map(Some).collect(),
        Delta2Rows::Reduced => {
            let mut map = Vec::with_capacity(n * dst.len());
            let mut next = 0;
            for l in 0..n {
                for g in dst.iter() {
                    let dropped = g[l + 1..].iter().all(|&e| e == 0);
                    map.push(if dropped {
                        None
                    } else {
                        next += 1;
                        Some(next - 1)
                    });
                }
            }
            map
        }
    };
    let nrows = row_map.iter().flatten().count();

    let sparse_k: Vec<Vec<(usize, usize, F::Elem)>> = k
        .basis()
        .iter()
        .map(|v| {
            v.iter()
                .enumerate()
                .filter(|(_, x)| !field.is_zero(x))
                .map(|(p, x)| (wedge.entries()[p][0], wedge.entries()[p][1], x.clone()))
                .collect()
        })
        .collect();

    let mut scratch = Vec::new();
    let mut columns = Vec::with_capacity(k.dim() * src.len());
    for kv in &sparse_k {
        for f in 0..src.len() {
            let mut col = Vec::with_capacity(2 * kv.len());
            for (i, j, c) in kv {
                let plus = row_map[j * dst.len() + src.times_variable(f, *i, &dst, &mut scratch)];
                let minus = row_map[i * dst.len() + src.times_variable(f, *j, &dst, &mut scratch)];
                if let Some(r) = plus {
                    col.push((r, c.clone()));
                }
                if let Some(r) = minus {
                    col.push((r, field.neg(c)));
                }
            }
            columns.push(col);
        }
    }
    Ok(Matrix::from_columns(field, nrows, columns))
}

/// The map `∧^3 V ⊗ Sym^{q-1} → (∧^2 V / K) ⊗ Sym^q` induced by the Koszul
/// differential. The quotient is realized on the free (non-pivot) coordinates
/// of `K`'s echelon basis; row `r * dim Sym^q + g` is free coordinate `r`.
pub fn delta3_tilde_matrix<F: Field>(n: usize, q: usize, k: &SubspaceBasis<F>) -> Result<Matrix<F>> {
    check_wedge_ambient(n, k, "K")?;
    let field = k.field().clone();
    let dst = MonomialBasis::new(n, q);
    let free = k.free_coordinates();
    let nrows = free.len() * dst.len();
    if q == 0 {
        return Ok(Matrix::zero(field, nrows, 0));
    }
    let src = MonomialBasis::new(n, q - 1);
    let triples = ExteriorBasis::new(n, 3);

    // Image of each ∧^2 coordinate vector in the quotient, as (free position, coefficient).
    let mut projection: Vec<Vec<(usize, F::Elem)>> = vec![Vec::new(); binomial(n, 2)];
    let mut free_pos = vec![usize::MAX; binomial(n, 2)];
    for (pos, &c) in free.iter().enumerate() {
        free_pos[c] = pos;
        projection[c].push((pos, field.one()));
    }
    for (row, &p) in k.basis().iter().zip(k.pivots()) {
        projection[p] = free
            .iter()
            .enumerate()
            .filter(|(_, &c)| !field.is_zero(&row[c]))
            .map(|(pos, &c)| (pos, field.neg(&row[c])))
            .collect();
    }

    let mut scratch = Vec::new();
    let mut columns = Vec::with_capacity(triples.len() * src.len());
    for t in triples.entries() {
        let (a, b, c) = (t[0], t[1], t[2]);
        // δ3(a∧b∧c ⊗ f) = (b∧c) ⊗ a f − (a∧c) ⊗ b f + (a∧b) ⊗ c f
        let terms = [
            (pair_index(n, b, c), a, false),
            (pair_index(n, a, c), b, true),
            (pair_index(n, a, b), c, false),
        ];
        for f in 0..src.len() {
            let mut col = Vec::new();
            for &(pair, var, negate) in &terms {
                let g = src.times_variable(f, var, &dst, &mut scratch);
                for (pos, x) in &projection[pair] {
                    col.push((pos * dst.len() + g, signed(&field, x.clone(), negate)));
                }
            }
            columns.push(col);
        }
    }
    Ok(Matrix::from_columns(field, nrows, columns))
}

/// The dual map `K^⊥ ⊗ Sym^q(V)^∨ → ∧^3 V^∨ ⊗ Sym^{q-1}(V)^∨`,
/// `(u∧v) ⊗ F ↦ Σ_i (u∧v∧e_i) ⊗ ∂_i F`. Its kernel has dimension `dim W_q`.
pub fn d3_dual_matrix<F: Field>(n: usize, q: usize, kperp: &SubspaceBasis<F>) -> Result<Matrix<F>> {
    check_wedge_ambient(n, kperp, "K^⊥")?;
    let field = kperp.field().clone();
    let src = MonomialBasis::new(n, q);
    let ncols = kperp.dim() * src.len();
    if q == 0 {
        return Ok(Matrix::zero(field, 0, ncols));
    }
    let dst = MonomialBasis::new(n, q - 1);
    let wedge = ExteriorBasis::new(n, 2);
    let triples = ExteriorBasis::new(n, 3);
    let multiples: Vec<F::Elem> = (0..=q as i64).map(|e| field.from_i64(e)).collect();

    let mut scratch = Vec::with_capacity(n);
    let mut columns = Vec::with_capacity(ncols);
    for b in kperp.basis() {
        let terms: Vec<(usize, usize, &F::Elem)> = b
            .iter()
            .enumerate()
            .filter(|(_, x)| !field.is_zero(x))
            .map(|(p, x)| (wedge.entries()[p][0], wedge.entries()[p][1], x))
            .collect();
        for alpha in src.iter() {
            let mut col = Vec::new();
            for i in (0..n).filter(|&i| alpha[i] > 0) {
                scratch.clear();
                scratch.extend_from_slice(alpha);
                scratch[i] -= 1;
                let g = dst.index_of(&scratch).expect("degree drops by one");
                let scale = &multiples[alpha[i] as usize];
                for &(u, v, x) in &terms {
                    if let Some((t, odd)) = triples.signed_index(&[u, v, i]) {
                        col.push((t * dst.len() + g, signed(&field, field.mul(x, scale), odd)));
                    }
                }
            }
            columns.push(col);
        }
    }
    Ok(Matrix::from_columns(field, triples.len() * dst.len(), columns))
}

/// Wedge product in `∧^2` coordinates: `(u∧v)_{ij} = u_i v_j − u_j v_i`.
pub fn wedge2<F: Field>(f: &F, u: &[F::Elem], v: &[F::Elem]) -> Vec<F::Elem> {
    let n = u.len();
    let mut out = Vec::with_capacity(binomial(n, 2));
    for i in 0..n {
        for j in i + 1..n {
            out.push(f.sub(&f.mul(&u[i], &v[j]), &f.mul(&u[j], &v[i])));
        }
    }
    out
}

/// Wedge product `∧^2 × ∧^1 → ∧^3` in lexicographic coordinates.
pub fn wedge21<F: Field>(f: &F, n: usize, w: &[F::Elem], v: &[F::Elem]) -> Vec<F::Elem> {
    let triples = ExteriorBasis::new(n, 3);
    let pairs = ExteriorBasis::new(n, 2);
    let mut out = vec![f.zero(); triples.len()];
    for (p, x) in w.iter().enumerate().filter(|(_, x)| !f.is_zero(x)) {
        let (a, b) = (pairs.entries()[p][0], pairs.entries()[p][1]);
        for (i, y) in v.iter().enumerate().filter(|(_, y)| !f.is_zero(y)) {
            if let Some((t, odd)) = triples.signed_index(&[a, b, i]) {
                let term = signed(f, f.mul(x, y), odd);
                out[t] = f.add(&out[t], &term);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rank;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn monomial_bases_are_indexed_consistently() {
        assert_eq!(sym_basis(3, 0).len(), 1);
        assert_eq!(sym_basis(3, 0).exponents(0), &[0, 0, 0]);
        assert_eq!(sym_basis(3, 2).len(), 6);
        assert_eq!(sym_basis(10, 6).len(), 5005);
        let b = sym_basis(2, 2);
        let listed: Vec<&[u8]> = b.iter().collect();
        assert_eq!(listed, vec![&[2, 0][..], &[1, 1], &[0, 2]]);
        for (n, q) in [(1, 4), (4, 3), (6, 4)] {
            let b = sym_basis(n, q);
            for (i, e) in b.iter().enumerate() {
                assert_eq!(b.index_of(e), Some(i));
            }
        }
        assert_eq!(b.index_of(&[1, 0]), None);
    }

    #[test]
    fn exterior_bases_track_signs() {
        let e = ExteriorBasis::new(4, 2);
        assert_eq!(e.len(), 6);
        for (i, t) in e.entries().iter().enumerate() {
            assert_eq!(e.index_of(t), Some(i));
            assert_eq!(pair_index(4, t[0], t[1]), i);
        }
        let t = ExteriorBasis::new(5, 3);
        assert_eq!(t.len(), 10);
        assert_eq!(t.signed_index(&[2, 0, 1]), Some((0, false)));
        assert_eq!(t.signed_index(&[1, 0, 2]), Some((0, true)));
        assert_eq!(t.signed_index(&[1, 1, 2]), None);
        assert_eq!(t.index_of(&[2, 3, 4]), Some(9));
        assert!(ExteriorBasis::new(2, 3).is_empty());
    }

    #[test]
    fn multiplication_is_surjective() {
        let f = PrimeField::new(32003).unwrap();
        let m = delta1_matrix(f, 2, 0);
        assert_eq!((m.rows(), m.cols()), (3, 4));
        assert_eq!(rank(&m), 3);
        assert_eq!(rank(&delta1_matrix(f, 3, 0)), 6);
        assert_eq!(rank(&delta1_matrix(f, 1, 3)), 1);
    }

    #[test]
    fn koszul_composites_vanish() {
        let f = PrimeField::new(32003).unwrap();
        for n in 1..=5 {
            for q in 0..=3 {
                let prod = delta1_matrix(f, n, q).mul(&delta2_matrix(f, n, q)).unwrap();
                assert!(prod.is_zero(), "n={n} q={q}");
            }
        }
    }

    #[test]
    fn delta2_small_cases() {
        let q = Rationals;
        let m = delta2_matrix(q, 2, 0);
        assert_eq!(m.cols(), 1);
        assert_eq!(m.nnz(), 2);
        // v_1 ∧ v_2 ↦ v_2 ⊗ v_1 − v_1 ⊗ v_2; V ⊗ Sym^1 rows are (l, monomial).
        assert_eq!(m.to_dense(), vec![vec![q.zero()], vec![q.from_i64(-1)], vec![q.one()], vec![q.zero()]]);
        assert_eq!(rank(&delta2_matrix(q, 3, 0)), 3);
        // n = 4, q = 1: kernel is the image of ∧^3 V, of dimension 4.
        let d = delta2_matrix(PrimeField::new(32003).unwrap(), 4, 1);
        assert_eq!(d.cols() - rank(&d), 4);
    }

    #[test]
    fn reduced_rows_preserve_rank() {
        let f = PrimeField::new(32003).unwrap();
        for (n, q, m, seed) in [(4, 1, 3, 1), (5, 2, 6, 2), (6, 1, 9, 3)] {
            let k = crate::exactalg::random_subspace(f, binomial(n, 2), m, seed).unwrap();
            let full = delta2_on_k(n, q, &k, Delta2Rows::Full).unwrap();
            let reduced = delta2_on_k(n, q, &k, Delta2Rows::Reduced).unwrap();
            assert_eq!(
                reduced.rows(),
                n * binomial(n + q, q + 1) - binomial(n + q + 1, q + 2)
            );
            assert_eq!(rank(&full), rank(&reduced));
        }
    }

    #[test]
    fn delta3_tilde_edge_cases() {
        let f = PrimeField::new(32003).unwrap();
        let all = SubspaceBasis::full(f, 6);
        assert_eq!(delta3_tilde_matrix(4, 2, &all).unwrap().rows(), 0);
        let zero = SubspaceBasis::zero(f, 3);
        let m = delta3_tilde_matrix(3, 1, &zero).unwrap();
        assert_eq!((m.rows(), m.cols()), (9, 1));
        assert_eq!(rank(&m), 1);
        assert!(matches!(
            delta3_tilde_matrix(4, 1, &zero),
            Err(Error::AmbientMismatch(_))
        ));
    }

    #[test]
    fn d3_dual_small_case() {
        let q = Rationals;
        let kperp = SubspaceBasis::span(q, 3, vec![vec![q.one(), q.zero(), q.zero()]]).unwrap();
        let d = d3_dual_matrix(3, 1, &kperp).unwrap();
        assert_eq!((d.rows(), d.cols()), (1, 3));
        // Only (e1∧e2) ⊗ x3 reaches ∧^3.
        assert_eq!(rank(&d), 1);
    }

    #[test]
    fn wedge_helpers() {
        let f = Rationals;
        let e = |i: usize| (0..4).map(|j| f.from_i64((i == j) as i64)).collect::<Vec<_>>();
        let w = wedge2(&f, &e(0), &e(1));
        assert_eq!(w[0], f.one());
        assert!(w[1..].iter().all(|x| f.is_zero(x)));
        let t = wedge21(&f, 4, &w, &e(2));
        assert_eq!(t[0], f.one());
        let back = wedge21(&f, 4, &wedge2(&f, &e(1), &e(0)), &e(2));
        assert_eq!(back[0], f.from_i64(-1));
    }
}
