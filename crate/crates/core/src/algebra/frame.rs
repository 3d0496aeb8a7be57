use super::Multivector;
use crate::scalar::Scalar;

/// How a frame vector `eᵢ` is combined with `F(eᵢ)` in `∂_a F(a)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameMode {
    /// `Σᵢ eᵢ F(eᵢ)` (Euclidean geometric product)
    Geometric,
    /// `Σᵢ eᵢ⌟F(eᵢ)`
    Dot,
    /// `Σᵢ eᵢ∧F(eᵢ)`
    Wedge,
}

/// Frame sum `∂_a F(a)` over the Euclidean orthonormal frame.
pub fn frame_derivative<S: Scalar>(
    dim: usize,
    mode: FrameMode,
    mut f: impl FnMut(&Multivector<S>) -> Multivector<S>,
) -> Multivector<S> {
    let mut out = Multivector::zero(dim);
    for i in 0..dim {
        let e = Multivector::basis(dim, i);
        let v = f(&e);
        out += &match mode {
            FrameMode::Geometric => e.geometric(&v),
            FrameMode::Dot => e.left_contract(&v),
            FrameMode::Wedge => e.wedge(&v),
        };
    }
    out
}

/// `∂_c∧∂_d G(c,d) = Σᵢⱼ (eᵢ∧eⱼ) G(eᵢ,eⱼ)` for a scalar-valued bilinear `G`,
/// with frame indices passed to `g`. The sum runs over ordered pairs without
/// rescaling, so an antisymmetric `G` contributes `2 G(eᵢ,eⱼ)` per blade.
pub fn frame_wedge_pair<S: Scalar>(
    dim: usize,
    mut g: impl FnMut(usize, usize) -> S,
) -> Multivector<S> {
    let mut out = Multivector::zero(dim);
    for i in 0..dim {
        for j in i + 1..dim {
            let v = g(i, j) - g(j, i);
            out.set((1 << i) | (1 << j), v);
        }
    }
    out
}
