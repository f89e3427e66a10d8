//! Small dense linear algebra for p x p symmetric systems (p is single digit
//! in every design this crate targets).

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "matrix must be square");
            m.data[i * dim..(i + 1) * dim].copy_from_slice(row);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    /// Adds `scale * x x'` to the lower triangle only.
    #[inline]
    pub(crate) fn add_outer_lower(&mut self, x: &[f64], scale: f64) {
        let d = self.dim;
        for i in 0..d {
            let sx = scale * x[i];
            let row = &mut self.data[i * d..i * d + i + 1];
            for (j, r) in row.iter_mut().enumerate() {
                *r += sx * x[j];
            }
        }
    }

    /// Copies the lower triangle into the upper one.
    pub(crate) fn symmetrize_from_lower(&mut self) {
        for i in 0..self.dim {
            for j in 0..i {
                let v = self.get(i, j);
                self.set(j, i, v);
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|v| *v *= factor);
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|i| dot(&self.data[i * self.dim..(i + 1) * self.dim], v)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    lower: SquareMatrix,
}

/// Relative pivot threshold: a pivot below `PIVOT_TOL * max diagonal` marks
/// the matrix as numerically singular.
pub const PIVOT_TOL: f64 = 1e-12;

impl Cholesky {
    /// Factors `a`, returning `None` when a pivot falls below the threshold.
    pub fn new(a: &SquareMatrix) -> Option<Self> {
        let n = a.dim();
        let max_diag = (0..n).map(|i| a.get(i, i).abs()).fold(0.0, f64::max);
        if !(max_diag > 0.0) || !max_diag.is_finite() {
            return None;
        }
        let threshold = PIVOT_TOL * max_diag;
        let mut l = SquareMatrix::zeros(n);
        for j in 0..n {
            let mut d = a.get(j, j);
            for k in 0..j {
                d -= l.get(j, k) * l.get(j, k);
            }
            if !(d > threshold) {
                return None;
            }
            let ljj = d.sqrt();
            l.set(j, j, ljj);
            for i in j + 1..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, s / ljj);
            }
        }
        Some(Self { lower: l })
    }

    pub fn lower(&self) -> &SquareMatrix {
        &self.lower
    }

    /// Solves `L L' x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lower.dim();
        let l = &self.lower;
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] -= l.get(i, k) * y[k];
            }
            y[i] /= l.get(i, i);
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] -= l.get(k, i) * y[k];
            }
            y[i] /= l.get(i, i);
        }
        y
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_spd_system() {
        let a = SquareMatrix::from_rows(&[
            vec![4.0, 2.0, 0.6],
            vec![2.0, 2.0, 0.5],
            vec![0.6, 0.5, 3.0],
        ]);
        let x = vec![1.0, -2.0, 0.5];
        let b = a.mul_vec(&x);
        let sol = Cholesky::new(&a).unwrap().solve(&b);
        for (s, t) in sol.iter().zip(&x) {
            assert!((s - t).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_singular() {
        let a = SquareMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(Cholesky::new(&a).is_none());
        assert!(Cholesky::new(&SquareMatrix::zeros(2)).is_none());
    }

    #[test]
    fn covariate_block_factor() {
        // det = 0.5 and leading minors 2, 1, 0.5 -> factorizable.
        let sigma = SquareMatrix::from_rows(&[
            vec![2.0, 1.0, -1.0],
            vec![1.0, 1.0, -0.5],
            vec![-1.0, -0.5, 1.0],
        ]);
        let l = Cholesky::new(&sigma).unwrap();
        let det: f64 = (0..3).map(|i| l.lower().get(i, i).powi(2)).product();
        assert!((det - 0.5).abs() < 1e-14);
    }
}
