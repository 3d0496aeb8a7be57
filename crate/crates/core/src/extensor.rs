//! Pointwise linear maps: (1,1)-extensors (matrices in the Euclidean frame),
//! vector-to-bivector (1,2)-extensors, and metric extensors with their gauge
//! factor `g = h†∘η∘h`.

use crate::algebra::{Multivector, Signature};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Relative determinant threshold below which a map counts as singular.
pub const DEGENERACY_THRESHOLD: f64 = 1e-9;

/// Off-diagonal norm at which Jacobi sweeps stop.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 64;

/// Linear map on vectors. `m[i][j] = eᵢ·t(eⱼ)`, so column `j` is the image
/// of `eⱼ`.
#[derive(Clone, PartialEq)]
pub struct Extensor11<S = f64> {
    dim: usize,
    m: Vec<S>,
}

impl<S: Scalar> std::fmt::Debug for Extensor11<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: Vec<Vec<f64>> = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j).value()).collect())
            .collect();
        write!(f, "Extensor11{rows:?}")
    }
}

impl<S: Scalar> Extensor11<S> {
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                m.push(f(i, j));
            }
        }
        Extensor11 { dim, m }
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| S::zero())
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn diagonal(d: &[S]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { S::zero() })
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Ok(Extensor11 {
            dim,
            m: rows.into_iter().flatten().collect(),
        })
    }

    /// Map whose columns are the given images of the frame vectors.
    pub fn from_images(images: &[Vec<S>]) -> Self {
        Self::from_fn(images.len(), |i, j| images[j][i])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.m[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.m[i * self.dim + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        self.m.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn apply_vec(&self, v: &[S]) -> Vec<S> {
        (0..self.dim)
            .map(|i| {
                let mut acc = S::zero();
                for (j, &vj) in v.iter().enumerate() {
                    acc += self.get(i, j) * vj;
                }
                acc
            })
            .collect()
    }

    /// `t(v)` on the grade-1 part of `v`.
    pub fn apply(&self, v: &Multivector<S>) -> Multivector<S> {
        Multivector::vector(&self.apply_vec(&v.vector_part()))
    }

    pub fn image(&self, j: usize) -> Vec<S> {
        (0..self.dim).map(|i| self.get(i, j)).collect()
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| {
            let mut acc = S::zero();
            for k in 0..n {
                acc += self.get(i, k) * other.get(k, j);
            }
            acc
        })
    }

    pub fn map(&self, f: impl FnMut(&S) -> S) -> Self {
        Extensor11 {
            dim: self.dim,
            m: self.m.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn scaled(&self, s: S) -> Self {
        self.map(|&v| v * s)
    }

    /// `t†`, the Euclidean adjoint: `t†(a)·b = a·t(b)`.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i))
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..i {
                worst = worst.max((self.get(i, j).value() - self.get(j, i).value()).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().fold(0.0, |w, v| w.max(v.value().abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.m
            .iter()
            .zip(&other.m)
            .fold(0.0, |w, (a, b)| w.max((a.value() - b.value()).abs()))
    }

    pub fn values(&self) -> Extensor11<f64> {
        Extensor11 {
            dim: self.dim,
            m: self.m.iter().map(|v| v.value()).collect(),
        }
    }

    /// LU factorisation with partial pivoting on real parts. Returns the
    /// determinant and, when requested, the inverse.
    fn eliminate(&self, want_inverse: bool) -> (S, Option<Self>) {
        let n = self.dim;
        let mut a = self.m.clone();
        let mut inv = Self::identity(n).m;
        let mut det = S::one();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| {
                    a[r * n + col]
                        .value()
                        .abs()
                        .total_cmp(&a[s * n + col].value().abs())
                })
                .unwrap_or(col);
            if a[pivot * n + col].value() == 0.0 {
                return (S::zero(), None);
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                    inv.swap(pivot * n + k, col * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            let pinv = p.recip();
            for k in 0..n {
                a[col * n + k] *= pinv;
                inv[col * n + k] *= pinv;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f.magnitude() == 0.0 {
                    continue;
                }
                for k in 0..n {
                    let ac = a[col * n + k];
                    let ic = inv[col * n + k];
                    a[r * n + k] -= f * ac;
                    inv[r * n + k] -= f * ic;
                }
            }
        }
        let inverse = want_inverse.then_some(Extensor11 { dim: n, m: inv });
        (det, inverse)
    }

    pub fn determinant(&self) -> S {
        self.eliminate(false).0
    }

    /// Inverse, failing when `|det| < 1e-9·‖t‖ⁿ`.
    pub fn inverse(&self) -> Result<Self> {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let threshold = DEGENERACY_THRESHOLD * scale.powi(self.dim as i32);
        let (det, inv) = self.eliminate(true);
        match inv {
            Some(inv) if det.value().abs() >= threshold => Ok(inv),
            _ => Err(Error::Degenerate {
                what: "extensor",
                det: det.value(),
                threshold,
            }),
        }
    }

    /// `t* = (t†)⁻¹`, cross-checked against `(t⁻¹)†`.
    pub fn star(&self) -> Result<Self> {
        let a = self.adjoint().inverse()?;
        let b = self.inverse()?.adjoint();
        let residual = a.max_abs_diff(&b);
        let tolerance = 1e-10 * a.max_abs().max(1.0);
        if residual > tolerance {
            return Err(Error::CheckFailed {
                what: "(t†)⁻¹ = (t⁻¹)†",
                residual,
                tolerance,
            });
        }
        Ok(a)
    }

    fn vector_images(&self) -> Vec<Multivector<S>> {
        (0..self.dim)
            .map(|j| Multivector::vector(&self.image(j)))
            .collect()
    }

    /// `t̲(e_I)` for every blade mask `I`.
    pub fn blade_images(&self) -> Vec<Multivector<S>> {
        let n = self.dim;
        let vecs = self.vector_images();
        let mut out: Vec<Multivector<S>> = Vec::with_capacity(1 << n);
        out.push(Multivector::scalar(n, S::one()));
        for mask in 1usize..1 << n {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            out.push(vecs[low].wedge(&out[rest]));
        }
        out
    }

    /// Outermorphism extension `t̲(X)`: `t̲(1) = 1`, `t̲(a∧b) = t(a)∧t(b)`.
    pub fn outermorphism(&self, x: &Multivector<S>) -> Multivector<S> {
        combine(&self.blade_images(), x)
    }

    /// Variation of the outermorphism along `d`: on blades,
    /// `Σⱼ t(a₁)∧…∧d(aⱼ)∧…∧t(a_k)`. With `d = a·∂t` this is `(a·∂t̲)(X)`.
    pub fn outermorphism_variation(&self, d: &Self, x: &Multivector<S>) -> Multivector<S> {
        combine(&self.variation_images(d), x)
    }

    fn variation_images(&self, d: &Self) -> Vec<Multivector<S>> {
        let n = self.dim;
        let t_vecs = self.vector_images();
        let d_vecs = d.vector_images();
        let t_blades = self.blade_images();
        let mut out: Vec<Multivector<S>> = Vec::with_capacity(1 << n);
        out.push(Multivector::zero(n));
        for mask in 1usize..1 << n {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            let v = d_vecs[low].wedge(&t_blades[rest]) + t_vecs[low].wedge(&out[rest]);
            out.push(v);
        }
        out
    }

    /// Derivation extension: the variation of the identity outermorphism,
    /// `a₁∧…∧a_k ↦ Σⱼ a₁∧…∧t(aⱼ)∧…∧a_k`.
    pub fn derivation(&self, x: &Multivector<S>) -> Multivector<S> {
        Self::identity(self.dim).outermorphism_variation(self, x)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.max_asymmetry() <= tol
    }
}

impl Extensor11<f64> {
    pub fn lift<T: Scalar>(&self) -> Extensor11<T> {
        Extensor11 {
            dim: self.dim,
            m: self.m.iter().map(|&v| T::from_f64(v)).collect(),
        }
    }
}

fn combine<S: Scalar>(images: &[Multivector<S>], x: &Multivector<S>) -> Multivector<S> {
    let mut out = Multivector::zero(x.dim());
    for (mask, c) in x.terms() {
        out += &images[mask].scaled(c);
    }
    out
}

/// Outermorphism with its blade images precomputed, for repeated use.
#[derive(Clone, Debug)]
pub struct Outermorphism<S: Scalar = f64> {
    images: Vec<Multivector<S>>,
}

impl<S: Scalar> Outermorphism<S> {
    pub fn new(t: &Extensor11<S>) -> Self {
        Outermorphism {
            images: t.blade_images(),
        }
    }

    pub fn apply(&self, x: &Multivector<S>) -> Multivector<S> {
        combine(&self.images, x)
    }
}

/// Linear map from vectors to bivectors, stored as the images of the frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Extensor12<S: Scalar = f64> {
    images: Vec<Multivector<S>>,
}

impl<S: Scalar> Extensor12<S> {
    pub fn zero(dim: usize) -> Self {
        Extensor12 {
            images: vec![Multivector::zero(dim); dim],
        }
    }

    /// # Panics
    ///
    /// Panics if the number of images differs from their dimension.
    pub fn from_images(images: Vec<Multivector<S>>) -> Self {
        assert!(images.iter().all(|m| m.dim() == images.len()));
        Extensor12 { images }
    }

    pub fn dim(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Multivector<S>] {
        &self.images
    }

    /// `ω(a)` for a vector given by components.
    pub fn apply_vec(&self, a: &[S]) -> Multivector<S> {
        let mut out = Multivector::zero(self.dim());
        for (img, &ai) in self.images.iter().zip(a) {
            if ai.magnitude() != 0.0 {
                out += &img.scaled(ai);
            }
        }
        out
    }

    pub fn apply(&self, a: &Multivector<S>) -> Multivector<S> {
        self.apply_vec(&a.vector_part())
    }

    pub fn add(&self, other: &Self) -> Self {
        Extensor12 {
            images: self
                .images
                .iter()
                .zip(&other.images)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn values(&self) -> Extensor12<f64> {
        Extensor12 {
            images: self.images.iter().map(|m| m.values()).collect(),
        }
    }
}

/// Pointwise metric extensor `g` with its signature and gauge factor `h`.
#[derive(Clone, Debug)]
pub struct MetricExtensor<S: Scalar = f64> {
    gram: Extensor11<S>,
    signature: Signature,
    gauge: Extensor11<S>,
}

impl<S: Scalar> MetricExtensor<S> {
    /// Build from a Gram matrix, computing the gauge by spectral
    /// decomposition.
    pub fn from_gram(gram: Extensor11<S>, signature: Signature) -> Result<Self> {
        let gauge = gauge_decompose(&gram, signature)?;
        Ok(MetricExtensor {
            gram,
            signature,
            gauge,
        })
    }

    /// Build from a gauge factor, `g = h†∘η∘h`.
    pub fn from_gauge(gauge: Extensor11<S>, signature: Signature) -> Result<Self> {
        if gauge.dim() != signature.dim() {
            return Err(Error::DimensionMismatch {
                expected: signature.dim(),
                found: gauge.dim(),
            });
        }
        gauge.inverse()?;
        let eta = signature.eta::<S>();
        let gram = gauge.adjoint().compose(&eta).compose(&gauge);
        Ok(MetricExtensor {
            gram,
            signature,
            gauge,
        })
    }

    pub fn gram(&self) -> &Extensor11<S> {
        &self.gram
    }

    pub fn gauge(&self) -> &Extensor11<S> {
        &self.gauge
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn dim(&self) -> usize {
        self.gram.dim()
    }

    /// `‖h†ηh − g‖∞`
    pub fn reconstruction_residual(&self) -> f64 {
        let eta = self.signature.eta::<S>();
        self.gauge
            .adjoint()
            .compose(&eta)
            .compose(&self.gauge)
            .max_abs_diff(&self.gram)
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Returns
/// eigenvalues and the matrix whose columns are the eigenvectors, both in
/// the (unsorted) order the sweeps leave them.
pub fn jacobi_eigen<S: Scalar>(a: &Extensor11<S>) -> (Vec<S>, Extensor11<S>) {
    let n = a.dim();
    let mut a = a.clone();
    let mut v = Extensor11::<S>::identity(n);
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a.get(p, q).magnitude().powi(2);
            }
        }
        if off.sqrt() <= JACOBI_TOLERANCE * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq.magnitude() <= f64::MIN_POSITIVE {
                    continue;
                }
                let delta = a.get(q, q) - a.get(p, p);
                let sign = if delta.value() < 0.0 { -1.0 } else { 1.0 };
                let root = (delta * delta + apq * apq.scale(4.0)).sqrt();
                let t = apq.scale(2.0) / (delta + root.scale(sign));
                let c = (S::one() + t * t).sqrt().recip();
                let s = t * c;
                // a ← Jᵀ a J with J = I except J_pp = J_qq = c, J_pq = s, J_qp = −s
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
                a.set(p, q, S::zero());
                a.set(q, p, S::zero());
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    ((0..n).map(|i| a.get(i, i)).collect(), v)
}

/// Gauge factor `h` with `h†∘η∘h = gram`.
///
/// Definite signatures get the symmetric square root `h = Σ √|λᵢ| uᵢ⊗uᵢ`.
/// Indefinite signatures get `h = |Λ|^{1/2} Uᵀ` with eigenvalues sorted
/// descending so positive eigenvalues land in η's `+1` slots; each
/// eigenvector is signed so its largest component is positive.
pub fn gauge_decompose<S: Scalar>(gram: &Extensor11<S>, sig: Signature) -> Result<Extensor11<S>> {
    let n = gram.dim();
    if n != sig.dim() {
        return Err(Error::DimensionMismatch {
            expected: sig.dim(),
            found: n,
        });
    }
    let asym = gram.max_asymmetry();
    if asym > 1e-12 * gram.max_abs().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let (vals, vecs) = jacobi_eigen(gram);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[j].value().total_cmp(&vals[i].value()));
    let largest = vals.iter().fold(0.0f64, |m, v| m.max(v.value().abs()));
    let threshold = DEGENERACY_THRESHOLD * largest.max(f64::MIN_POSITIVE);
    if let Some(small) = vals.iter().find(|v| v.value().abs() < threshold) {
        return Err(Error::Degenerate {
            what: "metric (eigenvalue)",
            det: small.value(),
            threshold,
        });
    }
    let found_p = vals.iter().filter(|v| v.value() > 0.0).count();
    if found_p != sig.p {
        return Err(Error::SignatureMismatch {
            expected_p: sig.p,
            expected_q: sig.q,
            found_p,
            found_q: n - found_p,
        });
    }
    let roots: Vec<S> = order.iter().map(|&i| vals[i].abs().sqrt()).collect();
    let columns: Vec<Vec<S>> = order
        .iter()
        .map(|&i| {
            let mut u = vecs.image(i);
            let lead = u
                .iter()
                .max_by(|a, b| a.value().abs().total_cmp(&b.value().abs()))
                .map(|x| x.value())
                .unwrap_or(1.0);
            if lead < 0.0 {
                for x in &mut u {
                    *x = -*x;
                }
            }
            u
        })
        .collect();
    let h = if sig.q == 0 || sig.p == 0 {
        Extensor11::from_fn(n, |i, j| {
            let mut acc = S::zero();
            for k in 0..n {
                acc += columns[k][i] * roots[k] * columns[k][j];
            }
            acc
        })
    } else {
        Extensor11::from_fn(n, |i, j| roots[i] * columns[i][j])
    };
    Ok(h)
}
