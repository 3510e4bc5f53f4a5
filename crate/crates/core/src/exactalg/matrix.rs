use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::field::{Field, FieldTag};

/// A sparse matrix in coordinate form.
///
/// Entries are kept sorted column-major with no explicit zeros and no
/// duplicate coordinates; every constructor normalizes to that form.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, F::Elem)>,
}

impl<F: Field> Matrix<F> {
    pub fn zero(field: F, rows: usize, cols: usize) -> Self {
        Matrix {
            field,
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn identity(field: F, n: usize) -> Self {
        let one = field.one();
        let entries = (0..n).map(|i| (i, i, one.clone())).collect();
        Matrix {
            field,
            rows: n,
            cols: n,
            entries,
        }
    }

    /// Builds from arbitrary `(row, col, value)` triples; duplicates are summed.
    pub fn from_triplets(
        field: F,
        rows: usize,
        cols: usize,
        mut triplets: Vec<(usize, usize, F::Elem)>,
    ) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|(r, c, _)| *r >= rows || *c >= cols) {
            return Err(Error::Invalid(format!(
                "entry ({r}, {c}) outside a {rows}x{cols} matrix"
            )));
        }
        triplets.sort_by_key(|&(r, c, _)| (c, r));
        let mut entries: Vec<(usize, usize, F::Elem)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 = field.add(&last.2, &v),
                _ => entries.push((r, c, v)),
            }
        }
        entries.retain(|(_, _, v)| !field.is_zero(v));
        Ok(Matrix {
            field,
            rows,
            cols,
            entries,
        })
    }

    /// Builds from sparse columns. Row indices inside a column may repeat and
    /// appear in any order.
    pub fn from_columns(field: F, rows: usize, columns: Vec<Vec<(usize, F::Elem)>>) -> Self {
        let cols = columns.len();
        let mut entries: Vec<(usize, usize, F::Elem)> = Vec::with_capacity(columns.iter().map(Vec::len).sum());
        for (c, mut col) in columns.into_iter().enumerate() {
            col.sort_by_key(|&(r, _)| r);
            let start = entries.len();
            for (r, v) in col {
                assert!(r < rows, "row index {r} out of range {rows}");
                match entries[start..].last_mut() {
                    Some(last) if last.0 == r => last.2 = field.add(&last.2, &v),
                    _ => entries.push((r, c, v)),
                }
            }
            let mut w = start;
            for i in start..entries.len() {
                if !field.is_zero(&entries[i].2) {
                    entries.swap(w, i);
                    w += 1;
                }
            }
            entries.truncate(w);
        }
        Matrix {
            field,
            rows,
            cols,
            entries,
        }
    }

    pub fn from_dense(field: F, data: &[Vec<F::Elem>]) -> Result<Self> {
        let rows = data.len();
        let cols = data.first().map_or(0, Vec::len);
        if data.iter().any(|r| r.len() != cols) {
            return Err(Error::Invalid("ragged dense matrix".into()));
        }
        let mut triplets = Vec::new();
        for (r, row) in data.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                if !field.is_zero(v) {
                    triplets.push((r, c, v.clone()));
                }
            }
        }
        Self::from_triplets(field, rows, cols, triplets)
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Nonzero entries, column-major.
    pub fn entries(&self) -> &[(usize, usize, F::Elem)] {
        &self.entries
    }

    pub fn to_dense(&self) -> Vec<Vec<F::Elem>> {
        let mut out = vec![vec![self.field.zero(); self.cols]; self.rows];
        for (r, c, v) in &self.entries {
            out[*r][*c] = v.clone();
        }
        out
    }

    /// Sparse rows, each sorted by column.
    pub fn row_vectors(&self) -> Vec<Vec<(u32, F::Elem)>> {
        let mut rows: Vec<Vec<(u32, F::Elem)>> = vec![Vec::new(); self.rows];
        for (r, c, v) in &self.entries {
            rows[*r].push((*c as u32, v.clone()));
        }
        rows
    }

    /// Sparse columns, each sorted by row.
    pub fn column_vectors(&self) -> Vec<Vec<(u32, F::Elem)>> {
        let mut cols: Vec<Vec<(u32, F::Elem)>> = vec![Vec::new(); self.cols];
        for (r, c, v) in &self.entries {
            cols[*c].push((*r as u32, v.clone()));
        }
        cols
    }

    pub fn transpose(&self) -> Self {
        let mut entries: Vec<_> = self
            .entries
            .iter()
            .map(|(r, c, v)| (*c, *r, v.clone()))
            .collect();
        entries.sort_by_key(|&(r, c, _)| (c, r));
        Matrix {
            field: self.field.clone(),
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Matrix<F>) -> Result<Matrix<F>> {
        if self.cols != rhs.rows {
            return Err(Error::AmbientMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = &self.field;
        let lhs_cols = self.column_vectors();
        let columns = rhs
            .column_vectors()
            .into_iter()
            .map(|col| {
                let mut acc = Vec::new();
                for (k, b) in col {
                    for (i, a) in &lhs_cols[k as usize] {
                        acc.push((*i as usize, f.mul(a, &b)));
                    }
                }
                acc
            })
            .collect();
        Ok(Matrix::from_columns(f.clone(), self.rows, columns))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Applies the matrix to a dense vector.
    pub fn apply(&self, x: &[F::Elem]) -> Result<Vec<F::Elem>> {
        if x.len() != self.cols {
            return Err(Error::AmbientMismatch(format!(
                "vector of length {} for a matrix with {} columns",
                x.len(),
                self.cols
            )));
        }
        let f = &self.field;
        let mut y = vec![f.zero(); self.rows];
        for (r, c, v) in &self.entries {
            if !f.is_zero(&x[*c]) {
                y[*r] = f.add(&y[*r], &f.mul(v, &x[*c]));
            }
        }
        Ok(y)
    }

    /// Serializes to the TSV interchange format: a `# rows cols field` header
    /// followed by `row<TAB>col<TAB>value` lines.
    pub fn to_tsv(&self) -> String {
        let mut out = format!("# {} {} {}\n", self.rows, self.cols, self.field.tag());
        for (r, c, v) in &self.entries {
            let _ = writeln!(out, "{r}\t{c}\t{}", self.field.to_scalar(v));
        }
        out
    }

    pub fn from_tsv<R: BufRead>(field: F, reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))??;
        let (rows, cols, tag) = parse_tsv_header(&header)?;
        if tag != field.tag() {
            return Err(Error::AmbientMismatch(format!(
                "matrix is over {tag}, expected {}",
                field.tag()
            )));
        }
        let mut triplets = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split('\t').collect();
            let bad = || Error::Parse(format!("line {}: expected row, col, value", lineno + 2));
            if parts.len() != 3 {
                return Err(bad());
            }
            let r: usize = parts[0].trim().parse().map_err(|_| bad())?;
            let c: usize = parts[1].trim().parse().map_err(|_| bad())?;
            triplets.push((r, c, field.parse_elem(parts[2])?));
        }
        Self::from_triplets(field, rows, cols, triplets)
    }
}

/// Reads the header of a TSV matrix file.
pub fn parse_tsv_header(header: &str) -> Result<(usize, usize, FieldTag)> {
    let bad = || Error::Parse(format!("bad matrix header `{header}`"));
    let body = header.trim().strip_prefix('#').ok_or_else(bad)?;
    let parts: Vec<&str> = body.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let rows = parts[0].parse().map_err(|_| bad())?;
    let cols = parts[1].parse().map_err(|_| bad())?;
    Ok((rows, cols, parts[2].parse()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn normalizes_duplicates_and_zeros() {
        let f = PrimeField::new(7).unwrap();
        let m = Matrix::from_triplets(f, 2, 2, vec![(0, 0, 3), (0, 0, 4), (1, 1, 2), (1, 0, 0)])
            .unwrap();
        assert_eq!(m.entries(), &[(1, 1, 2)]);
        let c = Matrix::from_columns(f, 3, vec![vec![(2, 1), (0, 5), (2, 6)], vec![]]);
        assert_eq!(c.entries(), &[(0, 0, 5)]);
        assert!(Matrix::from_triplets(f, 1, 1, vec![(1, 0, 1)]).is_err());
    }

    #[test]
    fn tsv_round_trip_over_rationals() {
        let q = Rationals;
        let data = vec![
            vec![q.parse_elem("1/2").unwrap(), q.zero()],
            vec![q.from_i64(-3), q.from_i64(7)],
        ];
        let m = Matrix::from_dense(q, &data).unwrap();
        let text = m.to_tsv();
        assert!(text.starts_with("# 2 2 QQ\n"));
        assert!(text.contains("0\t0\t1/2"));
        let back = Matrix::from_tsv(q, text.as_bytes()).unwrap();
        assert_eq!(back, m);
        assert!(Matrix::from_tsv(PrimeField::new(5).unwrap(), text.as_bytes()).is_err());
    }

    #[test]
    fn product_and_transpose() {
        let f = PrimeField::new(11).unwrap();
        let a = Matrix::from_dense(f, &[vec![1, 2], vec![0, 3]]).unwrap();
        let b = Matrix::from_dense(f, &[vec![4, 0], vec![1, 1]]).unwrap();
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.to_dense(), vec![vec![6, 2], vec![3, 3]]);
        assert_eq!(a.transpose().to_dense(), vec![vec![1, 0], vec![2, 3]]);
        assert_eq!(a.apply(&[1, 1]).unwrap(), vec![3, 3]);
    }
}
