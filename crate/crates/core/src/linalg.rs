//! Exact rational linear algebra: dense inversion and a sparse Gauss-Jordan
//! solver returning the full affine solution space.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::coeff::Rational;

pub type Matrix = Vec<Vec<Rational>>;

/// Inverse of a square matrix, `None` when singular.
pub fn invert(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = Rational::one() / &a[col][col];
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let d = &a[col][c] * &f;
                    a[r][c] -= d;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn transpose(m: &Matrix) -> Matrix {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mat_vec(m: &Matrix, v: &[Rational]) -> Vec<Rational> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let bt = transpose(b);
    a.iter().map(|row| mat_vec(&bt, row)).collect()
}

pub fn rank(m: &Matrix) -> usize {
    let mut sys = LinearSystem::new(m.first().map_or(0, Vec::len));
    for row in m {
        sys.push_dense(row, Rational::zero());
    }
    sys.pivot_count()
}

/// Basis of the kernel of `m` (as column vectors).
pub fn kernel(m: &Matrix, ncols: usize) -> Vec<Vec<Rational>> {
    let mut sys = LinearSystem::new(ncols);
    for row in m {
        sys.push_dense(row, Rational::zero());
    }
    match sys.solve() {
        Ok(sol) => sol.kernel,
        Err(_) => Vec::new(),
    }
}

/// Sparse row `Σ a_j x_j = rhs`.
pub type SparseRow = BTreeMap<usize, Rational>;

/// Affine solution set `particular + span(kernel)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSolution {
    pub particular: Vec<Rational>,
    pub kernel: Vec<Vec<Rational>>,
    /// Variable index of each kernel direction's free parameter.
    pub free_vars: Vec<usize>,
}

impl AffineSolution {
    /// `particular + Σ params[i] kernel[i]`.
    pub fn point(&self, params: &[Rational]) -> Vec<Rational> {
        let mut x = self.particular.clone();
        for (p, k) in params.iter().zip(&self.kernel) {
            if p.is_zero() {
                continue;
            }
            for (xi, ki) in x.iter_mut().zip(k) {
                *xi += p * ki;
            }
        }
        x
    }
}

/// Inconsistent equation, reported by its insertion index.
#[derive(Clone, Debug, PartialEq)]
pub struct Inconsistent {
    pub row: usize,
    pub residual: Rational,
}

/// Incremental exact Gaussian elimination over sparse rows.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    nvars: usize,
    /// Pivot rows in insertion order: (pivot var, row with pivot coefficient 1, rhs).
    pivots: Vec<(usize, SparseRow, Rational)>,
    pivot_of: BTreeMap<usize, usize>,
    inconsistent: Option<Inconsistent>,
    rows_seen: usize,
}

impl LinearSystem {
    pub fn new(nvars: usize) -> Self {
        LinearSystem {
            nvars,
            pivots: Vec::new(),
            pivot_of: BTreeMap::new(),
            inconsistent: None,
            rows_seen: 0,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn pivot_count(&self) -> usize {
        self.pivots.len()
    }

    pub fn push_dense(&mut self, row: &[Rational], rhs: Rational) {
        let sparse = row
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(j, a)| (j, a.clone()))
            .collect();
        self.push(sparse, rhs);
    }

    pub fn push(&mut self, mut row: SparseRow, mut rhs: Rational) {
        let idx = self.rows_seen;
        self.rows_seen += 1;
        row.retain(|_, a| !a.is_zero());
        // Reduce against existing pivots, earliest first: a pivot row never
        // contains the pivot variable of an earlier row.
        loop {
            let hit = row.keys().filter_map(|j| self.pivot_of.get(j)).min().copied();
            let Some(p) = hit else { break };
            let j = self.pivots[p].0;
            let f = row[&j].clone();
            let (_, prow, prhs) = &self.pivots[p];
            for (k, a) in prow {
                let e = row.entry(*k).or_insert_with(Rational::zero);
                *e -= a * &f;
                if e.is_zero() {
                    row.remove(k);
                }
            }
            rhs -= prhs * &f;
        }
        match row.keys().next().copied() {
            None => {
                if !rhs.is_zero() && self.inconsistent.is_none() {
                    self.inconsistent = Some(Inconsistent { row: idx, residual: rhs });
                }
            }
            Some(pv) => {
                let inv = Rational::one() / &row[&pv];
                for a in row.values_mut() {
                    *a *= &inv;
                }
                rhs *= &inv;
                self.pivot_of.insert(pv, self.pivots.len());
                self.pivots.push((pv, row, rhs));
            }
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.inconsistent.is_none()
    }

    pub fn solve(&self) -> Result<AffineSolution, Inconsistent> {
        if let Some(bad) = &self.inconsistent {
            return Err(bad.clone());
        }
        let free_vars: Vec<usize> =
            (0..self.nvars).filter(|j| !self.pivot_of.contains_key(j)).collect();
        let particular = self.back_substitute(None);
        let kernel = free_vars.iter().map(|&f| self.back_substitute(Some(f))).collect();
        Ok(AffineSolution { particular, kernel, free_vars })
    }

    /// With `free = None`: particular solution (free vars 0). With
    /// `Some(f)`: homogeneous solution with `x_f = 1`.
    fn back_substitute(&self, free: Option<usize>) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.nvars];
        if let Some(f) = free {
            x[f] = Rational::one();
        }
        for (pv, row, rhs) in self.pivots.iter().rev() {
            let mut val = if free.is_some() { Rational::zero() } else { rhs.clone() };
            for (j, a) in row {
                if *j != *pv {
                    val -= a * &x[*j];
                }
            }
            x[*pv] = val;
        }
        x
    }
}
