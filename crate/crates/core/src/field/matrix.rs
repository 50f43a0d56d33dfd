use std::fmt;

use super::{Elem, FieldError, PrimeField};

/// Dense row-major matrix over a prime field.
///
/// Vectors are passed around as plain `&[Elem]` / `Vec<Elem>`; a matrix is
/// only built when its shape matters.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FieldMatrix(q={}, {}x{})", self.field.modulus(), self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Reduced row-echelon form together with its pivot columns.
struct Echelon {
    m: FieldMatrix,
    pivots: Vec<usize>,
}

impl FieldMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FieldMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.modulus();
        }
        m
    }

    /// Builds a matrix from row-major data, reducing every entry mod `q`.
    pub fn from_vec(field: PrimeField, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self, FieldError> {
        if data.len() != rows * cols {
            return Err(FieldError::Shape(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        let q = field.modulus();
        let data = data.into_iter().map(|e| e % q).collect();
        Ok(FieldMatrix { field, rows, cols, data })
    }

    /// Builds a matrix from signed rows, reducing into `[0, q)`.
    pub fn from_rows<R: AsRef<[i64]>>(field: PrimeField, rows: &[R]) -> Result<Self, FieldError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(FieldError::Shape("ragged rows".into()));
            }
            data.extend(r.iter().map(|&v| field.from_i64(v)));
        }
        Ok(FieldMatrix { field, rows: rows.len(), cols, data })
    }

    /// A single-row matrix.
    pub fn row_vector(field: PrimeField, v: &[Elem]) -> Self {
        Self::from_vec(field, 1, v.len(), v.to_vec()).expect("shape is consistent")
    }

    /// A single-column matrix.
    pub fn column_vector(field: PrimeField, v: &[Elem]) -> Self {
        Self::from_vec(field, v.len(), 1, v.to_vec()).expect("shape is consistent")
    }

    /// Vandermonde matrix with entry `(r, j) = points[j]^r`, `r < num_rows`.
    pub fn vandermonde(field: PrimeField, points: &[Elem], num_rows: usize) -> Result<Self, FieldError> {
        let q = field.modulus();
        let reduced: Vec<Elem> = points.iter().map(|p| p % q).collect();
        for (i, a) in reduced.iter().enumerate() {
            if reduced[..i].contains(a) {
                return Err(FieldError::DegenerateInput(format!("duplicate evaluation point {a}")));
            }
        }
        if num_rows > points.len() {
            return Err(FieldError::DegenerateInput(format!(
                "{num_rows} rows requested from {} points",
                points.len()
            )));
        }
        let mut m = Self::zeros(field, num_rows, points.len());
        for (j, &p) in reduced.iter().enumerate() {
            let mut acc = 1 % q;
            for r in 0..num_rows {
                m.data[r * m.cols + j] = acc;
                acc = field.mul(acc, p);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v % self.field.modulus();
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Elem> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Elem] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&e| e == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    fn check_field(&self, other: &Self) -> Result<(), FieldError> {
        if self.field != other.field {
            return Err(FieldError::Shape(format!(
                "modulus mismatch: {} vs {}",
                self.field.modulus(),
                other.field.modulus()
            )));
        }
        Ok(())
    }

    /// Exact matrix product.
    pub fn mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(FieldError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let ot = other.transpose();
        let mut out = Self::zeros(self.field, self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                out.data[r * other.cols + c] = self.field.dot(self.row(r), ot.row(c));
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Elem]) -> Result<Vec<Elem>, FieldError> {
        if v.len() != self.cols {
            return Err(FieldError::Shape(format!(
                "cannot apply a {}x{} matrix to a length-{} vector",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok(self.mul_vec_unchecked(v))
    }

    /// Matrix-vector product without the length check; `v.len()` must equal `cols`.
    #[inline]
    pub fn mul_vec_unchecked(&self, v: &[Elem]) -> Vec<Elem> {
        (0..self.rows).map(|r| self.field.dot(self.row(r), v)).collect()
    }

    /// Writes `self * v` into `out` (length `rows`).
    #[inline]
    pub fn mul_vec_into(&self, v: &[Elem], out: &mut [Elem]) {
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.field.dot(self.row(r), v);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FieldError> {
        self.check_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(FieldError::Shape("cannot add matrices of different shapes".into()));
        }
        let data = self.field.add_vec(&self.data, &other.data);
        Ok(FieldMatrix { data, ..self.clone() })
    }

    pub fn scale(&self, s: Elem) -> Self {
        let data = self.data.iter().map(|&e| self.field.mul(e, s)).collect();
        FieldMatrix { data, ..self.clone() }
    }

    /// Vertical concatenation.
    pub fn vstack(blocks: &[&FieldMatrix]) -> Result<Self, FieldError> {
        let first = blocks
            .first()
            .ok_or_else(|| FieldError::Shape("nothing to stack".into()))?;
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            first.check_field(b)?;
            if b.cols != first.cols {
                return Err(FieldError::Shape("vstack column mismatch".into()));
            }
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        Ok(FieldMatrix { field: first.field, rows, cols: first.cols, data })
    }

    /// Copies the given columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.field, self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out.data[r * cols.len() + j] = self.get(r, c);
            }
        }
        out
    }

    /// Copies the column range `start..start + len`.
    pub fn column_block(&self, start: usize, len: usize) -> Self {
        let cols: Vec<usize> = (start..start + len).collect();
        self.select_columns(&cols)
    }

    /// Copies the row range `start..start + len`.
    pub fn row_block(&self, start: usize, len: usize) -> Self {
        let data = self.data[start * self.cols..(start + len) * self.cols].to_vec();
        FieldMatrix { field: self.field, rows: len, cols: self.cols, data }
    }

    /// Gauss-Jordan elimination to reduced row-echelon form.
    ///
    /// Pivot rule: columns left to right, and within a column the first row
    /// (top to bottom) at or below the current pivot row holding a nonzero
    /// entry. Results are therefore fully deterministic.
    fn echelon(&self) -> Echelon {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pr = 0;
        for c in 0..m.cols {
            if pr == m.rows {
                break;
            }
            let Some(sel) = (pr..m.rows).find(|&r| m.get(r, c) != 0) else {
                continue;
            };
            if sel != pr {
                for j in 0..m.cols {
                    m.data.swap(sel * m.cols + j, pr * m.cols + j);
                }
            }
            let inv = f.inv(m.get(pr, c)).expect("pivot is nonzero");
            for j in 0..m.cols {
                let idx = pr * m.cols + j;
                m.data[idx] = f.mul(m.data[idx], inv);
            }
            for r in 0..m.rows {
                let factor = m.get(r, c);
                if r == pr || factor == 0 {
                    continue;
                }
                for j in 0..m.cols {
                    let p = m.data[pr * m.cols + j];
                    let idx = r * m.cols + j;
                    m.data[idx] = f.sub(m.data[idx], f.mul(factor, p));
                }
            }
            pivots.push(c);
            pr += 1;
        }
        Echelon { m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Reduced row-echelon form.
    pub fn rref(&self) -> FieldMatrix {
        self.echelon().m
    }

    pub fn inverse(&self) -> Result<Self, FieldError> {
        if self.rows != self.cols {
            return Err(FieldError::Shape(format!(
                "cannot invert a non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut aug = Self::zeros(self.field, n, 2 * n);
        for r in 0..n {
            aug.data[r * 2 * n..r * 2 * n + n].copy_from_slice(self.row(r));
            aug.data[r * 2 * n + n + r] = 1 % self.field.modulus();
        }
        let e = aug.echelon();
        if e.pivots.len() < n || e.pivots[n - 1] >= n {
            return Err(FieldError::SingularMatrix);
        }
        let mut inv = Self::zeros(self.field, n, n);
        for r in 0..n {
            inv.data[r * n..(r + 1) * n].copy_from_slice(&e.m.data[r * 2 * n + n..(r + 1) * 2 * n]);
        }
        Ok(inv)
    }

    /// Solves `A x = b`.
    ///
    /// Underdetermined systems get the particular solution with every free
    /// variable set to zero.
    pub fn solve(&self, b: &[Elem]) -> Result<Vec<Elem>, FieldError> {
        if b.len() != self.rows {
            return Err(FieldError::Shape(format!(
                "right-hand side has length {} but the system has {} rows",
                b.len(),
                self.rows
            )));
        }
        let cols = self.cols + 1;
        let mut aug = Self::zeros(self.field, self.rows, cols);
        for r in 0..self.rows {
            aug.data[r * cols..r * cols + self.cols].copy_from_slice(self.row(r));
            aug.data[r * cols + self.cols] = b[r] % self.field.modulus();
        }
        let e = aug.echelon();
        if e.pivots.last() == Some(&self.cols) {
            return Err(FieldError::NoSolution);
        }
        let mut x = vec![0; self.cols];
        for (r, &c) in e.pivots.iter().enumerate() {
            x[c] = e.m.get(r, self.cols);
        }
        Ok(x)
    }

    /// Basis of the right null space, one vector per free column of the RREF.
    pub fn kernel_basis(&self) -> Vec<Vec<Elem>> {
        let f = self.field;
        let e = self.echelon();
        let free = (0..self.cols).filter(|c| !e.pivots.contains(c));
        free.map(|fc| {
            let mut v = vec![0; self.cols];
            v[fc] = 1 % f.modulus();
            for (r, &pc) in e.pivots.iter().enumerate() {
                v[pc] = f.neg(e.m.get(r, fc));
            }
            v
        })
        .collect()
    }
}
