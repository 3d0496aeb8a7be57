//! Forward-mode differentiation with nested dual numbers.
//!
//! A [`Jet`] is a truncated hyper-dual number: a real part plus one
//! nilpotent channel `εₖ` (with `εₖ² = 0`) per active derivative. Nesting
//! `Dual<Dual<f64>>` is algebraically the same object with two channels, so
//! a jet with `k` channels carries every mixed partial of order ≤ `k` along
//! the chosen directions. Coefficients are indexed by the subset of channels
//! they multiply, stored as a bitmask.
//!
//! Directional derivatives open the next free channel above every channel
//! already present in their input, which keeps nested derivatives from
//! confusing one another.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::scalar::Scalar;

/// Maximum nesting depth of derivatives.
pub const MAX_CHANNELS: usize = 4;
const CAP: usize = 1 << MAX_CHANNELS;

#[derive(Clone, Copy)]
pub struct Jet {
    depth: u8,
    c: [f64; CAP],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; CAP];
        c[0] = v;
        Jet { depth: 0, c }
    }

    /// `v + ε_ch`.
    pub fn seeded(v: f64, ch: usize) -> Self {
        Self::constant(v) + Self::epsilon(ch)
    }

    /// The infinitesimal `ε_ch`.
    ///
    /// # Panics
    ///
    /// Panics if `ch >= MAX_CHANNELS`.
    pub fn epsilon(ch: usize) -> Self {
        assert!(
            ch < MAX_CHANNELS,
            "derivative nesting deeper than {MAX_CHANNELS}"
        );
        let mut c = [0.0; CAP];
        c[1 << ch] = 1.0;
        Jet {
            depth: (ch + 1) as u8,
            c,
        }
    }

    /// Number of channels this jet may carry.
    pub fn depth(&self) -> usize {
        self.depth as usize
    }

    pub fn coeff(&self, mask: usize) -> f64 {
        if mask < (1 << self.depth) {
            self.c[mask]
        } else {
            0.0
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c[..1 << self.depth]
    }

    /// Coefficient of `ε_ch`, as a jet over the remaining channels.
    pub fn derivative(&self, ch: usize) -> Jet {
        let d = self.depth as usize;
        if ch >= d {
            return Jet::constant(0.0);
        }
        let low = (1usize << ch) - 1;
        let bit = 1usize << ch;
        let mut out = [0.0; CAP];
        for (s, &v) in self.c[..1 << d].iter().enumerate() {
            if s & bit != 0 {
                let t = (s & low) | ((s >> 1) & !low);
                out[t] = v;
            }
        }
        Jet {
            depth: (d - 1) as u8,
            c: out,
        }
        .trimmed()
    }

    /// Drop trailing channels whose coefficients are all zero.
    fn trimmed(mut self) -> Jet {
        while self.depth > 0 {
            let d = self.depth as usize;
            let top = 1usize << (d - 1);
            if self.c[top..1 << d].iter().all(|&v| v == 0.0) {
                self.depth -= 1;
            } else {
                break;
            }
        }
        self
    }

    /// Compose a scalar function with this jet given its derivatives at the
    /// real part: `derivs[k] = f⁽ᵏ⁾(value)` for `k = 0..=depth`.
    fn compose(self, derivs: &[f64]) -> Jet {
        let d = self.depth as usize;
        let mut out = Jet::constant(derivs[0]);
        if d == 0 {
            return out;
        }
        let mut delta = self;
        delta.c[0] = 0.0;
        let mut power = delta;
        let mut fact = 1.0;
        for (k, &dk) in derivs.iter().enumerate().take(d + 1).skip(1) {
            fact *= k as f64;
            out += power.scale(dk / fact);
            if k < d {
                power *= delta;
            }
        }
        out
    }

    fn order(&self) -> usize {
        self.depth as usize
    }
}

impl Default for Jet {
    fn default() -> Self {
        Jet::constant(0.0)
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.depth == 0 {
            return write!(f, "Jet({})", self.c[0]);
        }
        write!(f, "Jet{:?}", self.coeffs())
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Jet::constant(v)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        let d = self.depth.max(rhs.depth);
        for i in 0..1usize << rhs.depth {
            self.c[i] += rhs.c[i];
        }
        self.depth = d;
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        let d = self.depth.max(rhs.depth);
        for i in 0..1usize << rhs.depth {
            self.c[i] -= rhs.c[i];
        }
        self.depth = d;
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for v in &mut self.c[..1 << self.depth] {
            *v = -*v;
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        if rhs.depth == 0 {
            return self.scale(rhs.c[0]);
        }
        if self.depth == 0 {
            return rhs.scale(self.c[0]);
        }
        let d = self.depth.max(rhs.depth);
        let n = 1usize << d;
        let mut out = [0.0; CAP];
        for (s, slot) in out.iter_mut().enumerate().take(n) {
            // subset convolution: sum over t ⊆ s of a[t]·b[s∖t]
            let mut acc = 0.0;
            let mut t = s;
            loop {
                acc += self.c[t] * rhs.c[s ^ t];
                if t == 0 {
                    break;
                }
                t = (t - 1) & s;
            }
            *slot = acc;
        }
        Jet { depth: d, c: out }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        if rhs.depth == 0 {
            return self.scale(1.0 / rhs.c[0]);
        }
        self * rhs.recip()
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self = *self - rhs;
    }
}

impl MulAssign for Jet {
    fn mul_assign(&mut self, rhs: Jet) {
        *self = *self * rhs;
    }
}

fn power_derivs(x: f64, p: f64, order: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(order + 1);
    let mut coef = 1.0;
    for k in 0..=order {
        out.push(coef * x.powf(p - k as f64));
        coef *= p - k as f64;
    }
    out
}

impl Scalar for Jet {
    fn from_f64(v: f64) -> Self {
        Jet::constant(v)
    }

    fn value(&self) -> f64 {
        self.c[0]
    }

    fn magnitude(&self) -> f64 {
        self.coeffs().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn scale(mut self, s: f64) -> Self {
        for v in &mut self.c[..1 << self.depth] {
            *v *= s;
        }
        self
    }

    fn sin(self) -> Self {
        let (s, c) = self.c[0].sin_cos();
        let cycle = [s, c, -s, -c];
        let d: Vec<f64> = (0..=self.order()).map(|k| cycle[k % 4]).collect();
        self.compose(&d)
    }

    fn cos(self) -> Self {
        let (s, c) = self.c[0].sin_cos();
        let cycle = [c, -s, -c, s];
        let d: Vec<f64> = (0..=self.order()).map(|k| cycle[k % 4]).collect();
        self.compose(&d)
    }

    fn exp(self) -> Self {
        let e = self.c[0].exp();
        self.compose(&vec![e; self.order() + 1])
    }

    fn ln(self) -> Self {
        let x = self.c[0];
        let mut d = vec![x.ln()];
        let mut fact = 1.0;
        for k in 1..=self.order() {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            d.push(sign * fact / x.powi(k as i32));
            fact *= k as f64;
        }
        self.compose(&d)
    }

    fn sqrt(self) -> Self {
        self.compose(&power_derivs(self.c[0], 0.5, self.order()))
    }

    fn sinh(self) -> Self {
        let (s, c) = (self.c[0].sinh(), self.c[0].cosh());
        let d: Vec<f64> = (0..=self.order())
            .map(|k| if k % 2 == 0 { s } else { c })
            .collect();
        self.compose(&d)
    }

    fn cosh(self) -> Self {
        let (s, c) = (self.c[0].sinh(), self.c[0].cosh());
        let d: Vec<f64> = (0..=self.order())
            .map(|k| if k % 2 == 0 { c } else { s })
            .collect();
        self.compose(&d)
    }

    fn recip(self) -> Self {
        let x = self.c[0];
        let mut d = Vec::with_capacity(self.order() + 1);
        let mut coef = 1.0;
        for k in 0..=self.order() {
            d.push(coef / x.powi(k as i32 + 1));
            coef *= -((k + 1) as f64);
        }
        self.compose(&d)
    }
}
