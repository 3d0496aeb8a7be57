use std::fmt;
use std::str::FromStr;

use super::{contract_gammas, rho_tensor_at, DcdoPair};
use crate::error::{Error, Result};
use crate::extensor::Extensor11;
use crate::fields::{derivative_at, lift_point};
use crate::jet::Jet;
use crate::scalar::Scalar;

/// Which operator of the pair acts on a slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

/// Signs for the three argument slots and the output of a covariant
/// derivative of a vector-valued 3-extensor, written `s₁s₂s₃s₄`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignPattern {
    pub slots: [Branch; 3],
    pub output: Branch,
}

impl SignPattern {
    pub const PLUS: SignPattern = SignPattern {
        slots: [Branch::Plus; 3],
        output: Branch::Plus,
    };

    pub fn all() -> Vec<SignPattern> {
        let pick = |bit: usize, k: usize| {
            if bit >> k & 1 == 0 {
                Branch::Plus
            } else {
                Branch::Minus
            }
        };
        (0..16)
            .map(|m| SignPattern {
                slots: [pick(m, 3), pick(m, 2), pick(m, 1)],
                output: pick(m, 0),
            })
            .collect()
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.slots.iter().chain(std::iter::once(&self.output)) {
            f.write_str(match b {
                Branch::Plus => "+",
                Branch::Minus => "-",
            })?;
        }
        Ok(())
    }
}

impl FromStr for SignPattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let signs: Vec<Branch> = s
            .chars()
            .map(|c| match c {
                '+' => Ok(Branch::Plus),
                '-' | '−' => Ok(Branch::Minus),
                _ => Err(Error::UnknownPattern(s.to_string())),
            })
            .collect::<Result<_>>()?;
        match signs[..] {
            [a, b, c, d] => Ok(SignPattern {
                slots: [a, b, c],
                output: d,
            }),
            _ => Err(Error::UnknownPattern(s.to_string())),
        }
    }
}

fn gamma_for(branch: Branch, plus: &Extensor11<Jet>, minus: &Extensor11<Jet>) -> Extensor11<Jet> {
    match branch {
        Branch::Plus => plus.clone(),
        Branch::Minus => minus.clone(),
    }
}

type Tau<'a> = dyn Fn(&[Jet], &[Jet], &[Jet], &[Jet]) -> Result<Vec<Jet>> + 'a;

/// `(∇_d τ)(a,b,c) = D^{s₄}_d(τ(a,b,c)) − τ(D^{s₁}_d a,b,c) − τ(a,D^{s₂}_d b,c) − τ(a,b,D^{s₃}_d c)`
/// at `x`, for constant slot vectors. `tau(x, a, b, c)` must be trilinear in
/// its slots.
#[allow(clippy::too_many_arguments)]
pub fn extensor_cov_derivative(
    pair: &DcdoPair,
    tau: &Tau<'_>,
    x: &[Jet],
    d: &[Jet],
    a: &[Jet],
    b: &[Jet],
    c: &[Jet],
    pattern: SignPattern,
) -> Result<Vec<Jet>> {
    let plus = contract_gammas(&pair.plus_gammas(x)?, d);
    let minus = contract_gammas(&pair.minus_gammas(x)?, d);
    let [s1, s2, s3] = pattern.slots;
    let mut out = derivative_at(pair.cfg(), x, d, |y| tau(y, a, b, c))?;
    let value = tau(x, a, b, c)?;
    let turned = gamma_for(pattern.output, &plus, &minus).apply_vec(&value);
    let da = gamma_for(s1, &plus, &minus).apply_vec(a);
    let db = gamma_for(s2, &plus, &minus).apply_vec(b);
    let dc = gamma_for(s3, &plus, &minus).apply_vec(c);
    let t1 = tau(x, &da, b, c)?;
    let t2 = tau(x, a, &db, c)?;
    let t3 = tau(x, a, b, &dc)?;
    for i in 0..out.len() {
        out[i] = out[i] + turned[i] - t1[i] - t2[i] - t3[i];
    }
    Ok(out)
}

/// Curvature tensor, its derivatives and the connection matrices at one
/// point, enough to evaluate the Bianchi sum for every sign pattern.
#[derive(Clone, Debug)]
pub struct BianchiData {
    n: usize,
    rho: Vec<Extensor11>,
    drho: Vec<Vec<Extensor11>>,
    plus: Vec<Extensor11>,
    minus: Vec<Extensor11>,
}

impl BianchiData {
    pub fn compute(pair: &DcdoPair, x: &[f64]) -> Result<Self> {
        let n = pair.dim();
        let p = lift_point(x);
        let rho = rho_tensor_at(pair, &p)?;
        let drho = (0..n)
            .map(|k| {
                let mut e = vec![Jet::zero(); n];
                e[k] = Jet::one();
                derivative_at(pair.cfg(), &p, &e, |y| rho_tensor_at(pair, y))
            })
            .collect::<Result<Vec<_>>>()?;
        let vals = |v: &[Extensor11<Jet>]| v.iter().map(|m| m.values()).collect::<Vec<_>>();
        Ok(BianchiData {
            n,
            rho: vals(&rho),
            drho: drho.iter().map(|d| vals(d)).collect(),
            plus: vals(&pair.plus_gammas(&p)?),
            minus: vals(&pair.minus_gammas(&p)?),
        })
    }

    fn rho(&self, a: &[f64], b: &[f64], c: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                let w = a[i] * b[j];
                if w != 0.0 {
                    for (o, v) in out.iter_mut().zip(self.rho[i * n + j].apply_vec(c)) {
                        *o += w * v;
                    }
                }
            }
        }
        out
    }

    /// `(∇_{e_d} ρ)(eₐ, e_b, e_c)`
    pub fn cov_rho(
        &self,
        pattern: SignPattern,
        d: usize,
        a: usize,
        b: usize,
        c: usize,
    ) -> Vec<f64> {
        let n = self.n;
        let e = |k: usize| {
            let mut v = vec![0.0; n];
            v[k] = 1.0;
            v
        };
        let g = |br: Branch| match br {
            Branch::Plus => &self.plus[d],
            Branch::Minus => &self.minus[d],
        };
        let (ea, eb, ec) = (e(a), e(b), e(c));
        let mut out = self.drho[d][a * n + b].image(c);
        let turned = g(pattern.output).apply_vec(&self.rho(&ea, &eb, &ec));
        let t1 = self.rho(&g(pattern.slots[0]).image(a), &eb, &ec);
        let t2 = self.rho(&ea, &g(pattern.slots[1]).image(b), &ec);
        let t3 = self.rho(&ea, &eb, &g(pattern.slots[2]).image(c));
        for i in 0..n {
            out[i] += turned[i] - t1[i] - t2[i] - t3[i];
        }
        out
    }

    /// Max over frame vectors of
    /// `|∇_d ρ(a,b,c) + ∇ₐ ρ(b,d,c) + ∇_b ρ(d,a,c)|`.
    pub fn residual(&self, pattern: SignPattern) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for d in 0..n {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let s1 = self.cov_rho(pattern, d, a, b, c);
                        let s2 = self.cov_rho(pattern, a, b, d, c);
                        let s3 = self.cov_rho(pattern, b, d, a, c);
                        for i in 0..n {
                            worst = worst.max((s1[i] + s2[i] + s3[i]).abs());
                        }
                    }
                }
            }
        }
        worst
    }
}

/// Bianchi residual for every sign pattern, maximised over the points.
pub fn bianchi_pattern_search(
    pair: &DcdoPair,
    points: &[Vec<f64>],
) -> Result<Vec<(SignPattern, f64)>> {
    let patterns = SignPattern::all();
    let mut worst = vec![0.0f64; patterns.len()];
    for x in points {
        let data = BianchiData::compute(pair, x)?;
        for (w, p) in worst.iter_mut().zip(&patterns) {
            *w = w.max(data.residual(*p));
        }
    }
    Ok(patterns.into_iter().zip(worst).collect())
}

/// The unique pattern whose residual is below `tol`.
pub fn select_bianchi_pattern(results: &[(SignPattern, f64)], tol: f64) -> Result<SignPattern> {
    let passing: Vec<SignPattern> = results
        .iter()
        .filter(|(_, r)| *r < tol)
        .map(|(p, _)| *p)
        .collect();
    match passing[..] {
        [p] => Ok(p),
        _ => Err(Error::Evaluation(format!(
            "expected exactly one Bianchi sign pattern below {tol:e}, found {}: {}",
            passing.len(),
            passing
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ))),
    }
}
