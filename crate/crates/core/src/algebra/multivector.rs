use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest supported dimension of the canonical space.
pub const MAX_DIM: usize = 6;

/// Sign picked up when the blades `a` and `b` (bitmasks, ascending order)
/// are concatenated and sorted into canonical order.
pub fn reorder_sign(a: usize, b: usize) -> f64 {
    let mut a = a >> 1;
    let mut swaps = 0u32;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub fn grade_of(mask: usize) -> usize {
    mask.count_ones() as usize
}

/// `(-1)^{k(k-1)/2}`
pub fn reverse_sign(grade: usize) -> f64 {
    if (grade / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Element of the exterior algebra of `ℝⁿ`, stored densely by blade bitmask.
///
/// Bit `i` of an index selects `e_{i+1}`; blades are oriented in ascending
/// index order, so index `0b101` is `e1∧e3`.
#[derive(Clone, PartialEq)]
pub struct Multivector<S = f64> {
    dim: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> Multivector<S> {
    /// # Panics
    ///
    /// Panics if `dim` is 0 or above [`MAX_DIM`].
    pub fn zero(dim: usize) -> Self {
        assert!(
            (1..=MAX_DIM).contains(&dim),
            "dimension {dim} outside 1..={MAX_DIM}"
        );
        Multivector {
            dim,
            coeffs: vec![S::zero(); 1 << dim],
        }
    }

    pub fn from_coeffs(dim: usize, coeffs: Vec<S>) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if coeffs.len() != 1 << dim {
            return Err(Error::DimensionMismatch {
                expected: 1 << dim,
                found: coeffs.len(),
            });
        }
        Ok(Multivector { dim, coeffs })
    }

    pub fn scalar(dim: usize, v: S) -> Self {
        let mut m = Self::zero(dim);
        m.coeffs[0] = v;
        m
    }

    pub fn blade(dim: usize, mask: usize, v: S) -> Self {
        let mut m = Self::zero(dim);
        m.coeffs[mask] = v;
        m
    }

    /// `e_{i+1}`.
    pub fn basis(dim: usize, i: usize) -> Self {
        Self::blade(dim, 1 << i, S::one())
    }

    /// Vector with the given components.
    pub fn vector(components: &[S]) -> Self {
        let mut m = Self::zero(components.len());
        for (i, &c) in components.iter().enumerate() {
            m.coeffs[1 << i] = c;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn get(&self, mask: usize) -> S {
        self.coeffs[mask]
    }

    pub fn set(&mut self, mask: usize, v: S) {
        self.coeffs[mask] = v;
    }

    /// Components of the grade-1 part.
    pub fn vector_part(&self) -> Vec<S> {
        (0..self.dim).map(|i| self.coeffs[1 << i]).collect()
    }

    pub fn scalar_part(&self) -> S {
        self.coeffs[0]
    }

    pub fn map(&self, mut f: impl FnMut(S) -> S) -> Self {
        Multivector {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, mut f: impl FnMut(S, S) -> S) -> Self {
        self.assert_same_dim(other);
        Multivector {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub(crate) fn assert_same_dim(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "multivector dimension mismatch");
    }

    pub fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn scaled(&self, s: S) -> Self {
        self.map(|c| c * s)
    }

    /// `⟨X⟩ₖ`
    pub fn grade(&self, k: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (mask, &c) in self.coeffs.iter().enumerate() {
            if grade_of(mask) == k {
                out.coeffs[mask] = c;
            }
        }
        out
    }

    /// `X̃`
    pub fn reverse(&self) -> Self {
        let mut out = self.clone();
        for (mask, c) in out.coeffs.iter_mut().enumerate() {
            if reverse_sign(grade_of(mask)) < 0.0 {
                *c = -*c;
            }
        }
        out
    }

    /// Parity involution `X̂`.
    pub fn involute(&self) -> Self {
        let mut out = self.clone();
        for (mask, c) in out.coeffs.iter_mut().enumerate() {
            if grade_of(mask) % 2 == 1 {
                *c = -*c;
            }
        }
        out
    }

    /// Blades with a nonzero coefficient (including derivative parts).
    pub fn terms(&self) -> impl Iterator<Item = (usize, S)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.magnitude() != 0.0)
            .map(|(m, &c)| (m, c))
    }

    /// Largest absolute real coefficient.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.value().abs()))
    }

    /// Real parts of all coefficients.
    pub fn values(&self) -> Multivector<f64> {
        Multivector {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|c| c.value()).collect(),
        }
    }

    pub fn lift<T: Scalar>(&self) -> Multivector<T> {
        Multivector {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|c| T::from_f64(c.value())).collect(),
        }
    }

    /// Product of basis blades in a diagonal metric with the given squares.
    pub fn diagonal_product(&self, other: &Self, squares: &[f64]) -> Self {
        self.assert_same_dim(other);
        let mut out = Self::zero(self.dim);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                let mut sign = reorder_sign(a, b);
                let common = a & b;
                for (i, sq) in squares.iter().enumerate() {
                    if common & (1 << i) != 0 {
                        sign *= sq;
                    }
                }
                if sign != 0.0 {
                    out.coeffs[a ^ b] += (ca * cb).scale(sign);
                }
            }
        }
        out
    }

    /// Euclidean geometric product.
    pub fn geometric(&self, other: &Self) -> Self {
        self.diagonal_product(other, &vec![1.0; self.dim])
    }

    /// Exterior product `X∧Y`.
    pub fn wedge(&self, other: &Self) -> Self {
        self.assert_same_dim(other);
        let mut out = Self::zero(self.dim);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                if a & b == 0 {
                    out.coeffs[a | b] += (ca * cb).scale(reorder_sign(a, b));
                }
            }
        }
        out
    }

    /// Euclidean left contraction `X⌟Y`, adjoint to `Z ↦ X̃∧Z` under the
    /// scalar product.
    pub fn left_contract(&self, other: &Self) -> Self {
        self.assert_same_dim(other);
        let mut out = Self::zero(self.dim);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                if a & b == a {
                    out.coeffs[b ^ a] += (ca * cb).scale(reorder_sign(a, b));
                }
            }
        }
        out
    }

    /// Euclidean right contraction `X⌞Y`, adjoint to `Z ↦ Z∧Ỹ` under the
    /// scalar product.
    pub fn right_contract(&self, other: &Self) -> Self {
        self.assert_same_dim(other);
        let mut out = Self::zero(self.dim);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                if a & b == b {
                    out.coeffs[a ^ b] += (ca * cb).scale(reorder_sign(a, b));
                }
            }
        }
        out
    }

    /// Euclidean scalar product `X·Y = ⟨X̃Y⟩₀`, i.e. the coefficient dot
    /// product in the orthonormal blade basis.
    pub fn scalar_product(&self, other: &Self) -> S {
        self.assert_same_dim(other);
        let mut acc = S::zero();
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            acc += *a * *b;
        }
        acc
    }

    /// Euclidean norm, `√(X·X)`, on real parts.
    pub fn norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.value() * c.value())
            .sum::<f64>()
            .sqrt()
    }
}

impl Multivector<f64> {
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim
            && self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

impl<S: Scalar> Add for Multivector<S> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += &rhs;
        self
    }
}

impl<S: Scalar> Add<&Multivector<S>> for &Multivector<S> {
    type Output = Multivector<S>;
    fn add(self, rhs: &Multivector<S>) -> Multivector<S> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<S: Scalar> Sub for Multivector<S> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self -= &rhs;
        self
    }
}

impl<S: Scalar> Sub<&Multivector<S>> for &Multivector<S> {
    type Output = Multivector<S>;
    fn sub(self, rhs: &Multivector<S>) -> Multivector<S> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<S: Scalar> AddAssign<&Multivector<S>> for Multivector<S> {
    fn add_assign(&mut self, rhs: &Multivector<S>) {
        self.assert_same_dim(rhs);
        for (a, &b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl<S: Scalar> SubAssign<&Multivector<S>> for Multivector<S> {
    fn sub_assign(&mut self, rhs: &Multivector<S>) {
        self.assert_same_dim(rhs);
        for (a, &b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl<S: Scalar> Neg for Multivector<S> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|c| -c)
    }
}

impl<S: Scalar> Mul<S> for Multivector<S> {
    type Output = Self;
    fn mul(self, s: S) -> Self {
        self.scaled(s)
    }
}

const BLADE_DIGITS: &str = "123456";

pub fn blade_name(mask: usize) -> String {
    if mask == 0 {
        return "1".into();
    }
    let digits: String = BLADE_DIGITS
        .chars()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, c)| c)
        .collect();
    format!("e{digits}")
}

impl<S: Scalar> fmt::Debug for Multivector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (mask, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{:?} {}", c, blade_name(mask))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
