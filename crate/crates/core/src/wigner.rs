//! Closed-form Wigner and characteristic functions of the real (t = 0) Gaussian
//! `psi ~ exp(-(a11 x1^2 + 2 a12 x1 x2 + a22 x2^2)/4)`, their partial transposes, and
//! Gauss-Hermite quadrature over phase space.
//!
//! With `A = [[a11, a12], [a12, a22]]`:
//!
//! ```text
//! W(q, p)    = (pi hbar)^-2 exp(-q.A.q/2 - 2 p.A^-1.p / hbar^2)
//! chi(Q, P)  = exp(-Q.A.Q/8 - P.A^-1.P / (2 hbar^2))
//! ```
//!
//! where `chi(Q, P) = integral W(q, p) exp(i (Q.p - P.q)/hbar)`. The partial transpose maps
//! `p2 -> -p2` in `W` and `Q2 -> -Q2` in `chi`.

use crate::error::{positive, Error, Result};
use crate::model::{ModelParams, SecondMoments};
use crate::Real;

/// A point `(q1, p1, q2, p2)`; also used for the characteristic variables `(Q1, P1, Q2, P2)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseSpacePoint<T> {
    pub q1: T,
    pub p1: T,
    pub q2: T,
    pub p2: T,
}

impl<T> PhaseSpacePoint<T> {
    pub fn new(q1: T, p1: T, q2: T, p2: T) -> Self {
        Self { q1, p1, q2, p2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerSpec<T> {
    pub a11: T,
    pub a12: T,
    pub a22: T,
    pub hbar: T,
    /// Apply the partial transpose on particle 2.
    pub transposed: bool,
}

impl<T: Real> WignerSpec<T> {
    pub fn new(a11: T, a12: T, a22: T, hbar: T, transposed: bool) -> Result<Self> {
        let s = Self { a11, a12, a22, hbar, transposed };
        s.validate()?;
        Ok(s)
    }

    /// The symmetric state at `t = 0`.
    pub fn from_params(params: &ModelParams<T>, transposed: bool) -> Result<Self> {
        params.validate()?;
        let (a11, a12) = params.initial_coefficients();
        Self::new(a11, a12, a11, params.hbar, transposed)
    }

    pub fn validate(&self) -> Result<()> {
        positive("a11", self.a11)?;
        positive("a22", self.a22)?;
        positive("hbar", self.hbar)?;
        if !(self.det() > T::zero()) {
            return Err(Error::NonNormalizable { a11: self.a11.as_f64(), a12: self.a12.as_f64() });
        }
        Ok(())
    }

    fn det(&self) -> T {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    pub fn with_transpose(mut self, transposed: bool) -> Self {
        self.transposed = transposed;
        self
    }

    /// `(k11, k12, k22)` of the exponent `-(k11 q1^2 + 2 k12 q1 q2 + k22 q2^2)/2` in `W`.
    fn position_form(&self) -> (T, T, T) {
        (self.a11, self.a12, self.a22)
    }

    /// Same for the momenta; the transpose flips the off-diagonal entry.
    fn momentum_form(&self) -> (T, T, T) {
        let k = T::lit(4.0) / (self.hbar * self.hbar * self.det());
        let off = if self.transposed { self.a12 } else { -self.a12 };
        (k * self.a22, k * off, k * self.a11)
    }
}

fn quad<T: Real>((k11, k12, k22): (T, T, T), u: T, v: T) -> T {
    k11 * u * u + T::lit(2.0) * k12 * u * v + k22 * v * v
}

/// `W(q, p)`, or `W^T2(q, p)` when `spec.transposed`.
pub fn wigner_value<T: Real>(spec: &WignerSpec<T>, pt: &PhaseSpacePoint<T>) -> T {
    let norm = (T::PI() * spec.hbar).powi(2).recip();
    let e = quad(spec.position_form(), pt.q1, pt.q2) + quad(spec.momentum_form(), pt.p1, pt.p2);
    norm * (-e / T::lit(2.0)).exp()
}

/// `chi(Q, P)` with `arg = (Q1, P1, Q2, P2)`; transposition flips `a12` in the `Q` block.
pub fn characteristic_value<T: Real>(spec: &WignerSpec<T>, arg: &PhaseSpacePoint<T>) -> T {
    let a12 = if spec.transposed { -spec.a12 } else { spec.a12 };
    let q_form = quad((spec.a11, a12, spec.a22), arg.q1, arg.q2) / T::lit(8.0);
    let det = spec.det();
    let inv = (spec.a22 / det, -spec.a12 / det, spec.a11 / det);
    let p_form = quad(inv, arg.p1, arg.p2) / (T::lit(2.0) * spec.hbar * spec.hbar);
    (-(q_form + p_form)).exp()
}

/// Outcome of the uncertainty test on the partially transposed state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyCheck<T> {
    /// `sqrt(<(x1 - x2)^2> <(p1 + p2)^2>)`.
    pub product: T,
    /// `product >= hbar`; `false` means the transpose is not a valid Wigner function.
    pub passes: bool,
}

/// Transposition turns `<(p1 - p2)^2>` into `<(p1 + p2)^2>`, so a physical transpose needs
/// `sqrt(<(x1 - x2)^2> <(p1 + p2)^2>) >= hbar`.
pub fn pt_uncertainty_check<T: Real>(mom: &SecondMoments<T>, hbar: T) -> UncertaintyCheck<T> {
    let two = T::lit(2.0);
    let dx = mom.xx11 + mom.xx22 - two * mom.xx12;
    let dp = mom.pp11 + mom.pp22 + two * mom.pp12;
    let product = (dx * dp).sqrt();
    UncertaintyCheck { product, passes: product >= hbar }
}

/// Default node count per axis.
pub const QUADRATURE_NODES: usize = 40;

/// Gauss-Hermite nodes and weights for weight `e^(-x^2)`.
pub fn gauss_hermite<T: Real>(nodes: usize) -> Vec<(T, T)> {
    let n = std::num::NonZeroUsize::new(nodes.max(1)).unwrap();
    gauss_quad::GaussHermite::new(n)
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (T::lit(x), T::lit(w)))
        .collect()
}

/// Tensor rule for a 2D Gaussian form: points and weights with the Gaussian factor removed,
/// so `sum w f(z)` approximates `integral f(z) dz` when `f` decays like `exp(-z.K.z/2)`.
fn block_rule<T: Real>(form: (T, T, T), rule: &[(T, T)]) -> Vec<(T, T, T)> {
    let (a, b, c) = form;
    let two = T::lit(2.0);
    let theta = (two * b).atan2(a - c) / two;
    let (sn, cs) = theta.sin_cos();
    let k1 = a * cs * cs + two * b * sn * cs + c * sn * sn;
    let k2 = a * sn * sn - two * b * sn * cs + c * cs * cs;
    let (s1, s2) = ((two / k1).sqrt(), (two / k2).sqrt());
    let jac = s1 * s2;
    let mut out = Vec::with_capacity(rule.len() * rule.len());
    for &(x, wx) in rule {
        for &(y, wy) in rule {
            let (u, v) = (s1 * x, s2 * y);
            out.push((u * cs - v * sn, u * sn + v * cs, jac * wx * wy * (x * x + y * y).exp()));
        }
    }
    out
}

/// `integral f(z) W(z) d^4 z` for `K` integrands at once, on a tensor Gauss-Hermite grid aligned
/// with the principal axes of `W`. `W` itself is evaluated pointwise.
pub fn integrate_many<T: Real, const K: usize, F>(spec: &WignerSpec<T>, nodes: usize, mut f: F) -> [T; K]
where
    F: FnMut(&PhaseSpacePoint<T>) -> [T; K],
{
    let rule = gauss_hermite::<T>(nodes);
    let qs = block_rule(spec.position_form(), &rule);
    let ps = block_rule(spec.momentum_form(), &rule);
    let mut acc = [T::zero(); K];
    for &(q1, q2, wq) in &qs {
        for &(p1, p2, wp) in &ps {
            let pt = PhaseSpacePoint { q1, p1, q2, p2 };
            let w = wq * wp * wigner_value(spec, &pt);
            for (a, v) in acc.iter_mut().zip(f(&pt)) {
                *a = *a + w * v;
            }
        }
    }
    acc
}

pub fn integrate<T: Real, F>(spec: &WignerSpec<T>, nodes: usize, mut f: F) -> T
where
    F: FnMut(&PhaseSpacePoint<T>) -> T,
{
    integrate_many(spec, nodes, |pt| [f(pt)])[0]
}

/// `integral W(q1, p1, q2, p2) dp1 dp2` at fixed positions.
pub fn position_marginal<T: Real>(spec: &WignerSpec<T>, q1: T, q2: T, nodes: usize) -> T {
    let rule = gauss_hermite::<T>(nodes);
    block_rule(spec.momentum_form(), &rule)
        .iter()
        .map(|&(p1, p2, w)| w * wigner_value(spec, &PhaseSpacePoint { q1, p1, q2, p2 }))
        .fold(T::zero(), |a, b| a + b)
}

/// Second moments of `W` by quadrature. For `t != 0`, points are pushed through the free flow
/// `q -> q + p t/m` before the moments are taken.
pub fn quadrature_moments<T: Real>(spec: &WignerSpec<T>, t_over_m: T, nodes: usize) -> SecondMoments<T> {
    let r = integrate_many(spec, nodes, |pt| {
        let x1 = pt.q1 + pt.p1 * t_over_m;
        let x2 = pt.q2 + pt.p2 * t_over_m;
        [x1 * x1, x2 * x2, x1 * x2, pt.p1 * pt.p1, pt.p2 * pt.p2, pt.p1 * pt.p2, x1 * pt.p2, x2 * pt.p1, x1 * pt.p1, x2 * pt.p2]
    });
    let [xx11, xx22, xx12, pp11, pp22, pp12, xp12, xp21, xp11_sym, xp22_sym] = r;
    let mut m = SecondMoments {
        xx11,
        xx22,
        xx12,
        pp11,
        pp22,
        pp12,
        xp12,
        xp21,
        xp11_sym,
        xp22_sym,
        x_rel_sq: T::zero(),
        x_cm_sq: T::zero(),
        p_rel_sq: T::zero(),
        p_cm_sq: T::zero(),
    };
    let (a, b, c, d) = m.relative_from_particles();
    m.x_rel_sq = a;
    m.x_cm_sq = b;
    m.p_rel_sq = c;
    m.p_cm_sq = d;
    m
}
