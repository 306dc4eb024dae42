//! Graded coefficient space with a perfect cyclic pairing.

use std::collections::HashSet;

use crate::coeff::{Additive, Coeff, Rational};
use crate::error::{Error, Result};
use crate::linalg::{invert, transpose, Matrix};
use crate::novikov::{NovVec, Novikov};

#[derive(Clone, Debug, PartialEq)]
pub struct GradedBasis {
    names: Vec<String>,
    degrees: Vec<i32>,
    /// Pairing dimension `n`; pairs degrees `d` and `n - d`.
    dim: i32,
}

impl GradedBasis {
    pub fn new(elements: Vec<(String, i32)>, dim: i32) -> Result<Self> {
        let mut seen = HashSet::new();
        for (name, deg) in &elements {
            if !seen.insert(name.clone()) {
                return Err(Error::Invalid(format!("duplicate basis name {name}")));
            }
            if *deg < 0 || *deg > dim {
                return Err(Error::Invalid(format!("degree {deg} of {name} outside [0, {dim}]")));
            }
        }
        let (names, degrees) = elements.into_iter().unzip();
        Ok(GradedBasis { names, degrees, dim })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn dim(&self) -> i32 {
        self.dim
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    /// Degree after the shift `C[1]`.
    pub fn shifted(&self, i: usize) -> i32 {
        self.degrees[i] - 1
    }

    pub fn of_degree(&self, d: i32) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.degrees[i] == d).collect()
    }
}

/// Matrix `⟨eᵢ, eⱼ⟩` together with the inverse used to turn cyclic tensors
/// back into operations.
#[derive(Clone, Debug, PartialEq)]
pub struct Pairing {
    matrix: Matrix,
    /// `(Pᵀ)⁻¹`: maps a row of pairings `c[i₀] = ⟨m, e_{i₀}⟩` to the coordinates of `m`.
    dual: Option<Matrix>,
}

impl Pairing {
    pub fn new(matrix: Matrix) -> Self {
        let dual = invert(&transpose(&matrix));
        Pairing { matrix, dual }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.matrix[i][j]
    }

    pub fn is_perfect(&self) -> bool {
        self.dual.is_some()
    }

    pub fn dual(&self) -> Result<&Matrix> {
        self.dual.as_ref().ok_or_else(|| Error::Invalid("pairing is degenerate".into()))
    }

    /// Bilinear extension to coefficient vectors.
    pub fn eval(&self, x: &[Rational], y: &[Rational]) -> Result<Rational> {
        let n = self.matrix.len();
        if x.len() != n {
            return Err(Error::Dimension { expected: n, got: x.len() });
        }
        if y.len() != n {
            return Err(Error::Dimension { expected: n, got: y.len() });
        }
        let mut acc = Rational::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                let p = &self.matrix[i][j];
                if !p.is_zero() && !yj.is_zero() {
                    acc += xi * p * yj;
                }
            }
        }
        Ok(acc)
    }

    /// Pairing of Novikov-valued vectors.
    pub fn eval_nov<C: Coeff>(&self, x: &NovVec<C>, y: &NovVec<C>) -> Novikov<C> {
        let mut acc = Novikov::zero(x.emax());
        for i in 0..x.dim() {
            if x.comp(i).is_zero() {
                continue;
            }
            for j in 0..y.dim() {
                let p = &self.matrix[i][j];
                if p.is_zero() || y.comp(j).is_zero() {
                    continue;
                }
                acc.add_assign_ref(&(x.comp(i) * y.comp(j)).scale(p));
            }
        }
        acc
    }

    /// Coordinates of the vector `m` with `⟨m, e_{i₀}⟩ = row[i₀]`.
    pub fn raise<C: Additive>(&self, row: &[C]) -> Result<Vec<C>> {
        let dual = self.dual()?;
        Ok(dual
            .iter()
            .map(|drow| {
                let mut acc = C::zero();
                for (d, r) in drow.iter().zip(row) {
                    if !d.is_zero() && !r.is_zero() {
                        acc.add_assign_ref(&r.scale(d));
                    }
                }
                acc
            })
            .collect())
    }

    /// Row `⟨v, e_{i₀}⟩` for all `i₀`.
    pub fn lower<C: Additive>(&self, v: &[C]) -> Vec<C> {
        let n = self.matrix.len();
        (0..n)
            .map(|i0| {
                let mut acc = C::zero();
                for (j, vj) in v.iter().enumerate() {
                    let p = &self.matrix[j][i0];
                    if !p.is_zero() && !vj.is_zero() {
                        acc.add_assign_ref(&vj.scale(p));
                    }
                }
                acc
            })
            .collect()
    }
}

/// Violations of degree support, graded symmetry and perfectness; an empty
/// list means the pairing is valid.
pub fn validate_pairing(basis: &GradedBasis, pairing: &Pairing) -> Vec<String> {
    let mut out = Vec::new();
    let n = basis.len();
    if pairing.matrix.len() != n || pairing.matrix.iter().any(|r| r.len() != n) {
        out.push(format!("pairing matrix is not {n}×{n}"));
        return out;
    }
    for i in 0..n {
        for j in 0..n {
            let p = &pairing.matrix[i][j];
            if p.is_zero() {
                continue;
            }
            let (di, dj) = (basis.degree(i), basis.degree(j));
            if di + dj != basis.dim() {
                out.push(format!(
                    "degree support: ⟨{}, {}⟩ ≠ 0 with degrees {di}+{dj} ≠ {}",
                    basis.name(i),
                    basis.name(j),
                    basis.dim()
                ));
            }
            let sign = if (di * dj) % 2 == 0 { p.clone() } else { -p.clone() };
            if pairing.matrix[j][i] != sign {
                out.push(format!(
                    "graded symmetry: ⟨{}, {}⟩ = {} but ⟨{}, {}⟩ = {}",
                    basis.name(i),
                    basis.name(j),
                    p,
                    basis.name(j),
                    basis.name(i),
                    pairing.matrix[j][i]
                ));
            }
        }
    }
    if !pairing.is_perfect() {
        out.push("degenerate: pairing matrix is not invertible".into());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::q;

    fn s3() -> (GradedBasis, Pairing) {
        let b = GradedBasis::new(vec![("u".into(), 0), ("p".into(), 3)], 3).unwrap();
        let p = Pairing::new(vec![vec![q(0), q(1)], vec![q(1), q(0)]]);
        (b, p)
    }

    #[test]
    fn s3_pairing_values() {
        let (b, p) = s3();
        assert!(validate_pairing(&b, &p).is_empty());
        assert_eq!(p.eval(&[q(1), q(0)], &[q(0), q(1)]).unwrap(), q(1));
        assert_eq!(p.eval(&[q(1), q(0)], &[q(1), q(0)]).unwrap(), q(0));
        assert_eq!(p.eval(&[q(2), q(1)], &[q(0), q(1)]).unwrap(), q(2));
    }

    #[test]
    fn dimension_mismatch() {
        let (_, p) = s3();
        assert!(matches!(p.eval(&[q(1)], &[q(0), q(1)]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn zero_pairing_is_degenerate() {
        let (b, _) = s3();
        let p = Pairing::new(vec![vec![q(0), q(0)], vec![q(0), q(0)]]);
        let report = validate_pairing(&b, &p);
        assert!(report.iter().any(|v| v.contains("degenerate")));
    }

    #[test]
    fn raise_inverts_lower() {
        let (_, p) = s3();
        let v = vec![q(3), q(-2)];
        assert_eq!(p.raise(&p.lower(&v)).unwrap(), v);
    }

    #[test]
    fn duplicate_names_rejected() {
        let r = GradedBasis::new(vec![("a".into(), 1), ("a".into(), 2)], 3);
        assert!(r.is_err());
    }
}
