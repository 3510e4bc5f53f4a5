use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exactalg::matrix::Matrix;
use crate::field::Field;

/// Identifier of the generator behind [`random_subspace`], recorded in reports.
pub const PRNG_NAME: &str = "rand_chacha::ChaCha8Rng/seed_from_u64";

const MAX_SAMPLING_ATTEMPTS: usize = 16;

/// A subspace of `F^ambient` stored as its reduced row echelon basis.
///
/// Pivots are scaled to one and cleared above and below, so two bases of the
/// same subspace compare equal.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis<F: Field> {
    field: F,
    ambient: usize,
    rows: Vec<Vec<F::Elem>>,
    pivots: Vec<usize>,
}

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref<F: Field>(f: &F, mut rows: Vec<Vec<F::Elem>>, ncols: usize) -> (Vec<Vec<F::Elem>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !f.is_zero(&rows[r][c])) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = f.inv(&rows[rank][c]);
        for x in rows[rank][c..].iter_mut() {
            *x = f.mul(x, &inv);
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || f.is_zero(&row[c]) {
                continue;
            }
            let factor = row[c].clone();
            for j in c..ncols {
                if !f.is_zero(&pivot_row[j]) {
                    row[j] = f.sub_mul(&row[j], &factor, &pivot_row[j]);
                }
            }
        }
        pivots.push(c);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    (rows, pivots)
}

impl<F: Field> SubspaceBasis<F> {
    pub fn zero(field: F, ambient: usize) -> Self {
        SubspaceBasis {
            field,
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: F, ambient: usize) -> Self {
        let rows = (0..ambient)
            .map(|i| {
                let mut v = vec![field.zero(); ambient];
                v[i] = field.one();
                v
            })
            .collect();
        SubspaceBasis {
            field,
            ambient,
            rows,
            pivots: (0..ambient).collect(),
        }
    }

    /// The span of arbitrary (possibly dependent) vectors.
    pub fn span(field: F, ambient: usize, vectors: Vec<Vec<F::Elem>>) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient) {
            return Err(Error::AmbientMismatch(format!(
                "vector of length {} in a space of dimension {ambient}",
                v.len()
            )));
        }
        let (rows, pivots) = rref(&field, vectors, ambient);
        Ok(SubspaceBasis {
            field,
            ambient,
            rows,
            pivots,
        })
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.rows.len()
    }
    pub fn basis(&self) -> &[Vec<F::Elem>] {
        &self.rows
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates not used as pivots; they index a complement of the subspace.
    pub fn free_coordinates(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient).filter(|&i| !is_pivot[i]).collect()
    }

    /// The basis as a `dim x ambient` matrix.
    pub fn to_matrix(&self) -> Matrix<F> {
        let triplets = self
            .rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().enumerate().map(move |(c, v)| (r, c, v.clone())))
            .collect();
        Matrix::from_triplets(self.field.clone(), self.rows.len(), self.ambient, triplets)
            .expect("entries lie inside the basis matrix")
    }

    fn check_ambient(&self, other_ambient: usize) -> Result<()> {
        if self.ambient != other_ambient {
            return Err(Error::AmbientMismatch(format!(
                "subspaces of F^{} and F^{other_ambient}",
                self.ambient
            )));
        }
        Ok(())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        self.check_ambient(other.ambient)?;
        if self.field != other.field {
            return Err(Error::AmbientMismatch(format!(
                "subspaces over {} and {}",
                self.field.tag(),
                other.field.tag()
            )));
        }
        Ok(())
    }

    /// Remainder of `v` after clearing every pivot coordinate.
    pub fn reduce(&self, v: &[F::Elem]) -> Result<Vec<F::Elem>> {
        self.check_ambient(v.len())?;
        let f = &self.field;
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = out[p].clone();
            if f.is_zero(&c) {
                continue;
            }
            for (x, b) in out.iter_mut().zip(row) {
                if !f.is_zero(b) {
                    *x = f.sub_mul(x, &c, b);
                }
            }
        }
        Ok(out)
    }

    /// Image of `v` in the quotient by this subspace, in free coordinates.
    pub fn quotient_coordinates(&self, v: &[F::Elem]) -> Result<Vec<F::Elem>> {
        let r = self.reduce(v)?;
        Ok(self.free_coordinates().into_iter().map(|i| r[i].clone()).collect())
    }

    pub fn contains_vector(&self, v: &[F::Elem]) -> Result<bool> {
        Ok(self.reduce(v)?.iter().all(|x| self.field.is_zero(x)))
    }

    /// Coefficients of `v` in the echelon basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[F::Elem]) -> Result<Option<Vec<F::Elem>>> {
        if !self.contains_vector(v)? {
            return Ok(None);
        }
        Ok(Some(self.pivots.iter().map(|&p| v[p].clone()).collect()))
    }

    /// Whether `other` is a subspace of `self`.
    pub fn contains(&self, other: &Self) -> Result<bool> {
        self.check_same(other)?;
        for v in &other.rows {
            if !self.contains_vector(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let vectors = self.rows.iter().chain(&other.rows).cloned().collect();
        Self::span(self.field.clone(), self.ambient, vectors)
    }

    /// Intersection by the Zassenhaus construction: reduce the rows `(a, a)`
    /// and `(b, 0)`; the rows whose left half vanishes carry `a ∩ b`.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let f = &self.field;
        let n = self.ambient;
        let mut stacked = Vec::with_capacity(self.dim() + other.dim());
        for a in &self.rows {
            let mut row = a.clone();
            row.extend(a.iter().cloned());
            stacked.push(row);
        }
        for b in &other.rows {
            let mut row = b.clone();
            row.extend(std::iter::repeat_n(f.zero(), n));
            stacked.push(row);
        }
        let (reduced, pivots) = rref(f, stacked, 2 * n);
        let meet = reduced
            .into_iter()
            .zip(pivots)
            .filter(|(_, p)| *p >= n)
            .map(|(row, _)| row[n..].to_vec())
            .collect();
        Self::span(f.clone(), n, meet)
    }

    /// Orthogonal complement under the coordinate pairing `<x, y> = Σ x_i y_i`.
    pub fn annihilator(&self) -> Self {
        kernel_of_rows(&self.field, &self.rows, self.ambient)
    }
}

fn kernel_of_rows<F: Field>(f: &F, rows: &[Vec<F::Elem>], ncols: usize) -> SubspaceBasis<F> {
    let (reduced, pivots) = rref(f, rows.to_vec(), ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let vectors = (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![f.zero(); ncols];
            v[free] = f.one();
            for (row, &p) in reduced.iter().zip(&pivots) {
                v[p] = f.neg(&row[free]);
            }
            v
        })
        .collect();
    SubspaceBasis::span(f.clone(), ncols, vectors).expect("lengths match")
}

/// Reduced basis of the right null space of `m`.
pub fn kernel_basis<F: Field>(m: &Matrix<F>) -> SubspaceBasis<F> {
    kernel_of_rows(m.field(), &m.to_dense(), m.cols())
}

/// A uniformly random `dim`-dimensional subspace of `F^ambient`.
///
/// The same `(ambient, dim, field, seed)` always yields the same basis: the
/// generator is [`PRNG_NAME`], and rank-deficient draws are resampled from the
/// continuing stream.
pub fn random_subspace<F: Field>(field: F, ambient: usize, dim: usize, seed: u64) -> Result<SubspaceBasis<F>> {
    if dim > ambient {
        return Err(Error::Invalid(format!(
            "cannot sample a {dim}-dimensional subspace of F^{ambient}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_SAMPLING_ATTEMPTS {
        let vectors = (0..dim)
            .map(|_| (0..ambient).map(|_| field.random(&mut rng)).collect())
            .collect();
        let s = SubspaceBasis::span(field.clone(), ambient, vectors)?;
        if s.dim() == dim {
            return Ok(s);
        }
    }
    Err(Error::RetriesExhausted(MAX_SAMPLING_ATTEMPTS))
}
