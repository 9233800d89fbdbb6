use std::fmt;

use super::{Dvr, Scalar};
use crate::error::{Error, Result};

/// Dense matrix over `K`. Row-major; dimensions are explicit so that
/// matrices with zero columns still carry a row count.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Mat {
    pub fn zeros(o: &Dvr, rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![o.zero(); rows * cols],
        }
    }

    pub fn identity(o: &Dvr, n: usize) -> Self {
        let mut m = Mat::zeros(o, n, n);
        for i in 0..n {
            m[(i, i)] = o.one();
        }
        m
    }

    /// Builds a matrix from rows; `cols` is used when `rows` is empty or
    /// the rows are empty.
    pub fn from_rows(rows: Vec<Vec<Scalar>>, cols: usize) -> Result<Self> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Mat { rows: r, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_ints(o: &Dvr, rows: &[&[i64]], cols: usize) -> Self {
        Mat::from_fn(rows.len(), cols, |i, j| o.from_int(rows[i][j]))
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = &Scalar> {
        self.data.iter()
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, o: &Dvr, b: &Mat) -> Mat {
        assert_eq!(self.cols, b.rows, "matrix product dimension mismatch");
        let mut out = Mat::zeros(o, self.rows, b.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..b.cols {
                    let bk = &b[(k, j)];
                    if !bk.is_zero() {
                        out[(i, j)] = out[(i, j)].add(&a.mul(bk));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, o: &Dvr, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(o.zero(), |acc, (a, b)| acc.add(&a.mul(b)))
            })
            .collect()
    }

    /// Horizontal concatenation.
    pub fn hcat(&self, b: &Mat) -> Mat {
        assert_eq!(self.rows, b.rows, "hcat row mismatch");
        Mat::from_fn(self.rows, self.cols + b.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                b[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn select_rows(&self, rows: std::ops::Range<usize>) -> Mat {
        let start = rows.start;
        Mat::from_fn(rows.len(), self.cols, |i, j| self[(start + i, j)].clone())
    }

    pub fn select_cols(&self, cols: std::ops::Range<usize>) -> Mat {
        let start = cols.start;
        Mat::from_fn(self.rows, cols.len(), |i, j| self[(i, start + j)].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn require_integral(&self, o: &Dvr) -> Result<()> {
        self.data.iter().try_for_each(|a| o.require_integral(a))
    }

    /// Minimal valuation over all entries; `None` for the zero matrix.
    pub fn min_valuation(&self, o: &Dvr) -> Option<i64> {
        self.data.iter().filter_map(|a| o.valuation(a)).min()
    }

    /// Row-echelon rank over `K`.
    pub fn rank(&self, o: &Dvr) -> usize {
        let _ = o;
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(piv) = (rank..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(rank, piv);
            let inv = m[(rank, col)].inv();
            for r in rank + 1..m.rows {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let f = m[(r, col)].mul(&inv);
                for c in col..m.cols {
                    let t = m[(rank, c)].mul(&f);
                    m[(r, c)] = m[(r, c)].sub(&t);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Determinant over `K` of a square matrix.
    pub fn det(&self, o: &Dvr) -> Scalar {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut m = self.clone();
        let mut det = o.one();
        for col in 0..m.cols {
            let Some(piv) = (col..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                return o.zero();
            };
            if piv != col {
                m.swap_rows(col, piv);
                det = det.neg();
            }
            let p = m[(col, col)].clone();
            det = det.mul(&p);
            let inv = p.inv();
            for r in col + 1..m.rows {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let f = m[(r, col)].mul(&inv);
                for c in col..m.cols {
                    let t = m[(col, c)].mul(&f);
                    m[(r, c)] = m[(r, c)].sub(&t);
                }
            }
        }
        det
    }

    /// Solves `self * x = b` over `K`. Returns one solution if the system
    /// is consistent (the unique one when columns are independent).
    pub fn solve(&self, o: &Dvr, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(self.rows, b.len(), "solve dimension mismatch");
        let n = self.cols;
        let mut aug = self.hcat(&Mat::from_fn(self.rows, 1, |i, _| b[i].clone()));
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..n {
            let Some(piv) = (r..aug.rows).find(|&i| !aug[(i, col)].is_zero()) else {
                continue;
            };
            aug.swap_rows(r, piv);
            let inv = aug[(r, col)].inv();
            for c in col..=n {
                aug[(r, c)] = aug[(r, c)].mul(&inv);
            }
            for i in 0..aug.rows {
                if i == r || aug[(i, col)].is_zero() {
                    continue;
                }
                let f = aug[(i, col)].clone();
                for c in col..=n {
                    let t = aug[(r, c)].mul(&f);
                    aug[(i, c)] = aug[(i, c)].sub(&t);
                }
            }
            pivots.push(col);
            r += 1;
        }
        if (r..aug.rows).any(|i| !aug[(i, n)].is_zero()) {
            return None;
        }
        let mut x = vec![o.zero(); n];
        for (i, &col) in pivots.iter().enumerate() {
            x[col] = aug[(i, n)].clone();
        }
        Some(x)
    }

    /// Inverse over `K`, or `None` when singular.
    pub fn inverse(&self, o: &Dvr) -> Option<Mat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let e: Vec<Scalar> = (0..n)
                .map(|i| if i == j { o.one() } else { o.zero() })
                .collect();
            cols.push(self.solve(o, &e)?);
        }
        if self.rank(o) < n {
            return None;
        }
        Some(Mat::from_fn(n, n, |i, j| cols[j][i].clone()))
    }

    /// Every entry multiplied by `c`.
    pub fn scale(&self, c: &Scalar) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.mul(c)).collect(),
        }
    }

    /// Multiplies by the power of `pi` that makes the minimal entry
    /// valuation zero; returns the scaled matrix and the exponent used.
    pub fn normalize_valuation(&self, o: &Dvr) -> (Mat, i64) {
        match self.min_valuation(o) {
            None => (self.clone(), 0),
            Some(v) => {
                let f = if v >= 0 {
                    o.pi_pow(v as u32).inv()
                } else {
                    o.pi_pow((-v) as u32)
                };
                (self.scale(&f), -v)
            }
        }
    }

    /// `O`-basis (columns) of the lattice spanned by the columns; entries
    /// may lie in `K`.
    pub fn column_span_basis(&self, o: &Dvr) -> Result<Mat> {
        let (h, shift) = self.normalize_valuation(o);
        let s = h.smith(o)?;
        let unscale = if shift >= 0 {
            o.pi_pow(shift as u32).inv()
        } else {
            o.pi_pow((-shift) as u32)
        };
        let mut basis = s.u_inv.select_cols(0..s.rank);
        for j in 0..s.rank {
            let e = o.pi_pow(s.exponents[j]).mul(&unscale);
            for i in 0..basis.rows {
                basis[(i, j)] = basis[(i, j)].mul(&e);
            }
        }
        Ok(basis)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[dst] -= f * row[src]`
    fn row_axpy(&mut self, dst: usize, src: usize, f: &Scalar) {
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j];
            if s.is_zero() {
                continue;
            }
            let t = s.mul(f);
            let d = &mut self.data[dst * self.cols + j];
            *d = d.sub(&t);
        }
    }

    /// `col[dst] -= f * col[src]`
    fn col_axpy(&mut self, dst: usize, src: usize, f: &Scalar) {
        for i in 0..self.rows {
            let s = &self.data[i * self.cols + src];
            if s.is_zero() {
                continue;
            }
            let t = s.mul(f);
            let d = &mut self.data[i * self.cols + dst];
            *d = d.sub(&t);
        }
    }

    fn scale_row(&mut self, i: usize, f: &Scalar) {
        for j in 0..self.cols {
            let d = &mut self.data[i * self.cols + j];
            *d = d.mul(f);
        }
    }

    fn scale_col(&mut self, j: usize, f: &Scalar) {
        for i in 0..self.rows {
            let d = &mut self.data[i * self.cols + j];
            *d = d.mul(f);
        }
    }

    /// Smith normal form over `O`; see [`Smith`].
    pub fn smith(&self, o: &Dvr) -> Result<Smith> {
        self.require_integral(o)?;
        Ok(Smith::compute(o, self))
    }

    /// An `O`-basis (as columns) of the saturated kernel
    /// `{x in O^cols : self * x = 0}`.
    pub fn kernel_basis(&self, o: &Dvr) -> Result<Mat> {
        let s = self.smith(o)?;
        Ok(s.v.select_cols(s.rank..self.cols))
    }

    /// An `O`-basis (as columns) of `O^rows ∩ K·span(columns)`.
    pub fn saturation_basis(&self, o: &Dvr) -> Result<Mat> {
        let s = self.smith(o)?;
        Ok(s.u_inv.select_cols(0..s.rank))
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|a| a.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Smith normal form `U * A * V = D` over `O`.
///
/// `D` has diagonal entries `pi^{e_1}, ..., pi^{e_rank}` with
/// `e_1 <= ... <= e_rank` and zeros elsewhere. Pivots are chosen by minimal
/// valuation, ties broken by the lowest `(row, column)` index.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: Mat,
    pub u_inv: Mat,
    pub v: Mat,
    pub rank: usize,
    pub exponents: Vec<u32>,
}

impl Smith {
    fn compute(o: &Dvr, a: &Mat) -> Smith {
        let (n, m) = (a.rows, a.cols);
        let mut a = a.clone();
        let mut u = Mat::identity(o, n);
        let mut u_inv = Mat::identity(o, n);
        let mut v = Mat::identity(o, m);
        let mut exponents = Vec::new();
        let mut k = 0;
        while k < n.min(m) {
            let mut best: Option<(i64, usize, usize)> = None;
            for i in k..n {
                for j in k..m {
                    if let Some(val) = o.valuation(&a[(i, j)]) {
                        if best.is_none_or(|(bv, _, _)| val < bv) {
                            best = Some((val, i, j));
                        }
                    }
                }
            }
            let Some((val, pi, pj)) = best else { break };
            a.swap_rows(k, pi);
            u.swap_rows(k, pi);
            u_inv.swap_cols(k, pi);
            a.swap_cols(k, pj);
            v.swap_cols(k, pj);
            let (unit, _) = o.split(&a[(k, k)]);
            let unit_inv = unit.inv();
            a.scale_row(k, &unit_inv);
            u.scale_row(k, &unit_inv);
            u_inv.scale_col(k, &unit);
            let pivot = a[(k, k)].clone();
            for i in k + 1..n {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let f = a[(i, k)].div(&pivot);
                a.row_axpy(i, k, &f);
                u.row_axpy(i, k, &f);
                // U^{-1} picks up the inverse elementary operation
                u_inv.col_axpy(k, i, &f.neg());
            }
            for j in k + 1..m {
                if a[(k, j)].is_zero() {
                    continue;
                }
                let f = a[(k, j)].div(&pivot);
                a.col_axpy(j, k, &f);
                v.col_axpy(j, k, &f);
            }
            exponents.push(val as u32);
            k += 1;
        }
        Smith {
            u,
            u_inv,
            v,
            rank: k,
            exponents,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o5() -> Dvr {
        Dvr::p_adic(5).unwrap()
    }

    #[test]
    fn smith_reconstructs() {
        let o = o5();
        let a = Mat::from_ints(&o, &[&[10, 5, 3], &[25, 50, 0], &[0, 0, 125]], 3);
        let s = a.smith(&o).unwrap();
        let d = s.u.mul(&o, &a).mul(&o, &s.v);
        for i in 0..3 {
            for j in 0..3 {
                if i == j && i < s.rank {
                    assert_eq!(d[(i, j)], o.pi_pow(s.exponents[i]));
                } else {
                    assert!(d[(i, j)].is_zero());
                }
            }
        }
        assert_eq!(s.u.mul(&o, &s.u_inv), Mat::identity(&o, 3));
        assert!(s.exponents.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn kernel_and_solve() {
        let o = o5();
        let a = Mat::from_ints(&o, &[&[1, 2, 3], &[2, 4, 6]], 3);
        let k = a.kernel_basis(&o).unwrap();
        assert_eq!(k.ncols(), 2);
        assert!(a.mul(&o, &k).is_zero());
        let b = vec![o.from_int(2), o.from_int(4)];
        let x = a.solve(&o, &b).unwrap();
        assert_eq!(a.mul_vec(&o, &x), b);
        assert!(a.solve(&o, &[o.from_int(1), o.from_int(1)]).is_none());
    }

    #[test]
    fn determinant() {
        let o = o5();
        let a = Mat::from_ints(&o, &[&[1, 1], &[0, 691]], 2);
        assert_eq!(a.det(&o), o.from_int(691));
        let b = Mat::from_ints(&o, &[&[0, 1], &[1, 0]], 2);
        assert_eq!(b.det(&o), o.from_int(-1));
    }
}
