//! Independent values of `x_1` for Freud-type weights.
//!
//! For the weight `|x|^ρ exp(−(c/4)x⁴ − (K/2)x²)` the initial value is the
//! moment ratio `∫ x² |x|^ρ w / ∫ |x|^ρ w`. With `K = 0` this reduces to
//! `2 c^{−1/2} Γ((ρ+3)/4) / Γ((ρ+1)/4)`; otherwise it is evaluated by
//! tanh-sinh quadrature on `[0, R]` (both integrands are even).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::precision::{check_precision, gamma_rational, RealP};
use crate::recurrence::positive_root;

const GUARD_BITS: u32 = 32;
/// Levels after the first one; each halves the step.
pub const MAX_LEVELS: u32 = 14;
/// Extra nats of tail decay beyond `ln(10/tol)`.
const TAIL_MARGIN: f64 = 20.0;

/// `2Γ(3/4)/Γ(1/4)`: the initial value for `c = 1, K = 0, ρ = 0`.
pub fn freud_x1_closed_form(prec: u32) -> Result<RealP> {
    check_precision(prec)?;
    let wide = prec + GUARD_BITS;
    let ratio = gamma_rational(3, 4, wide) / gamma_rational(1, 4, wide);
    Ok((ratio * 2).with_prec(prec))
}

/// `2 c^{−1/2} Γ((ρ+3)/4) / Γ((ρ+1)/4)`: the `K = 0` moment ratio.
pub fn freud_x1_closed_form_rho(c: &RealP, rho: &RealP, prec: u32) -> Result<RealP> {
    check_precision(prec)?;
    validate(c, rho)?;
    let wide = prec + GUARD_BITS;
    let rho = rho.with_prec(wide);
    let num = ((&rho + 3) / 4).gamma();
    let den = ((&rho + 1) / 4).gamma();
    let scale = c.with_prec(wide).sqrt()?;
    Ok((num / den * 2 / scale).with_prec(prec))
}

fn validate(c: &RealP, rho: &RealP) -> Result<()> {
    if !c.is_positive() {
        return Err(Error::InvalidParameter(format!("c = {c} must be positive")));
    }
    if *rho <= -1 {
        return Err(Error::InvalidParameter(format!("rho = {rho} must exceed -1")));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadratureResult {
    pub value: RealP,
    /// Difference between the last two levels plus a bound on the truncated tails.
    pub est_error: RealP,
    pub cutoff_r: RealP,
    pub levels_used: u32,
}

/// Moment ratio for `ρ = 0`.
pub fn x1_quadrature(c: &RealP, k: &RealP, tol: f64, prec: u32) -> Result<QuadratureResult> {
    x1_quadrature_rho(c, k, &RealP::zero(prec), tol, prec)
}

/// Moment ratio with the `|x|^ρ` factor. For `ρ < 0` the piece `[0, 1]` is
/// integrated in `u = x^{1+ρ}`, which removes the endpoint singularity.
pub fn x1_quadrature_rho(c: &RealP, k: &RealP, rho: &RealP, tol: f64, prec: u32) -> Result<QuadratureResult> {
    check_precision(prec)?;
    validate(c, rho)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    let wp = prec + GUARD_BITS;
    let weight = Weight {
        c4: c.with_prec(wp) / 4,
        k2: k.with_prec(wp) / 2,
        rho: rho.with_prec(wp),
    };
    let cutoff = cutoff(&weight, tol, wp)?;
    let pieces = weight.pieces(&cutoff);
    let tails = (weight.tail_bound(&cutoff, &(&weight.rho + 2)), weight.tail_bound(&cutoff, &weight.rho));
    let tau_max = ((f64::from(wp) * std::f64::consts::LN_2 / 2.0 + 10.0) * 2.0 / std::f64::consts::PI).asinh();

    let mut sums: Vec<(RealP, RealP)> = pieces.iter().map(|_| (RealP::zero(wp), RealP::zero(wp))).collect();
    let mut previous: Option<RealP> = None;
    let mut last_difference = RealP::zero(wp);
    for level in 0..=MAX_LEVELS {
        let h = RealP::pow2(-(level as i32), wp);
        let kmax = (tau_max * f64::from(1u32 << level)).ceil() as i64;
        let stride = if level == 0 { 1 } else { 2 };
        let first = if level == 0 { -kmax } else { -kmax | 1 };
        for (piece, sum) in pieces.iter().zip(sums.iter_mut()) {
            let mut j = first;
            while j <= kmax {
                let tau = &h * &RealP::from_int(j, wp);
                if let Some((num, den)) = piece.node(&weight, &tau) {
                    sum.0 = &sum.0 + &num;
                    sum.1 = &sum.1 + &den;
                }
                j += stride;
            }
        }
        let (num, den) = sums
            .iter()
            .zip(&pieces)
            .fold((RealP::zero(wp), RealP::zero(wp)), |(n, d), (s, p)| {
                (n + &s.0 * &p.scale, d + &s.1 * &p.scale)
            });
        let ratio = &num / &den;
        if let Some(prev) = previous.replace(ratio.clone()) {
            last_difference = (&ratio - &prev).abs();
            // |N/D − N'/D'| ≤ (T_N + (N'/D') T_D) / D' for truncated N' = N − T_N, D' = D − T_D.
            let truncation = (&tails.0 + &(&ratio * &tails.1)) / (&den * &h);
            let est_error = &last_difference + &truncation;
            if level >= 3 && est_error.to_f64() <= tol {
                return Ok(QuadratureResult {
                    value: ratio.with_prec(prec),
                    est_error: est_error.with_prec(prec),
                    cutoff_r: cutoff.with_prec(prec),
                    levels_used: level + 1,
                });
            }
        }
    }
    Err(Error::NoConvergence {
        levels: MAX_LEVELS + 1,
        last_difference: format!("{:e}", last_difference.to_f64()),
    })
}

/// `exp(−(c/4)x⁴ − (K/2)x²)` with the `|x|^ρ` factor.
struct Weight {
    c4: RealP,
    k2: RealP,
    rho: RealP,
}

impl Weight {
    fn exp_part(&self, x: &RealP) -> RealP {
        let x2 = x.square();
        (-(&self.c4 * &x2.square() + &self.k2 * &x2)).exp()
    }

    /// Bound on `∫_R^∞ x^a exp(−f(x)) dx` with `f = (c/4)x⁴ + (K/2)x²`: for
    /// `x ≥ R` the integrand decays at least like `exp(−m(x − R))` with
    /// `m = f'(R) − max(a, 0)/R`. Infinite when `m ≤ 0`.
    fn tail_bound(&self, r: &RealP, a: &RealP) -> RealP {
        let wp = r.prec();
        let r2 = r.square();
        let f = &self.c4 * &r2.square() + &self.k2 * &r2;
        let slope = &(&self.c4 * 4) * &(&r2 * r) + &(&self.k2 * 2) * r;
        let m = slope - a.max(&RealP::zero(wp)) / r;
        if !m.is_positive() || (&self.k2 * 2 + &(&self.c4 * 12) * &r2).is_negative() {
            return RealP::one(wp) / RealP::zero(wp);
        }
        r.pow(a) * (-f).exp() / m
    }

    fn pieces(&self, r: &RealP) -> Vec<Piece> {
        let wp = r.prec();
        if !self.rho.is_negative() {
            return vec![Piece {
                lo: RealP::zero(wp),
                hi: r.clone(),
                inv_power: None,
                scale: RealP::one(wp),
            }];
        }
        let one = RealP::one(wp);
        let split = r.min(&one);
        let power = &self.rho + 1;
        let mut out = vec![Piece {
            lo: RealP::zero(wp),
            hi: split.pow(&power),
            inv_power: Some(power.recip()),
            scale: power.recip(),
        }];
        if *r > one {
            out.push(Piece {
                lo: one,
                hi: r.clone(),
                inv_power: None,
                scale: RealP::one(wp),
            });
        }
        out
    }
}

/// Positive-half integration interval. With `inv_power = Some(1/(1+ρ))` the
/// variable is `u = x^{1+ρ}` and `|x|^ρ dx = du/(1+ρ)` (the `scale`).
struct Piece {
    lo: RealP,
    hi: RealP,
    inv_power: Option<RealP>,
    scale: RealP,
}

impl Piece {
    /// Tanh-sinh node at `τ`: weighted (numerator, denominator) contributions.
    fn node(&self, weight: &Weight, tau: &RealP) -> Option<(RealP, RealP)> {
        let width = &self.hi - &self.lo;
        let z = tau.sinh() * RealP::pi(tau.prec()) / 2;
        let e = (-(z.abs() * 2)).exp();
        let one_plus = &e + 1;
        // Distance to the nearer endpoint, computed without cancellation.
        let dist = &width * &e / &one_plus;
        let w = &width * &RealP::pi(tau.prec()) * &tau.cosh() * &e / one_plus.square();
        if w.is_zero() || dist.is_zero() {
            return None;
        }
        let t = if z.is_negative() { &self.lo + &dist } else { &self.hi - &dist };
        if t <= self.lo || t >= self.hi {
            return None;
        }
        let (x, density) = match &self.inv_power {
            Some(inv) => {
                let x = t.pow(inv);
                let d = weight.exp_part(&x);
                (x, d)
            }
            None => {
                let mut d = weight.exp_part(&t);
                if !weight.rho.is_zero() {
                    d = d * t.pow(&weight.rho);
                }
                (t, d)
            }
        };
        let den = &density * &w;
        let num = &den * &x.square();
        Some((num, den))
    }
}

/// `R` with `(c/4)R⁴ + (K/2)R² = ln(10/tol) + margin`, the margin also
/// absorbing the polynomial factor `x^{2+ρ}` at `R`.
fn cutoff(weight: &Weight, tol: f64, wp: u32) -> Result<RealP> {
    let base = (10.0 / tol).ln() + TAIL_MARGIN;
    let solve = |target: f64| -> Result<RealP> {
        let y = positive_root(&weight.c4, &weight.k2, &RealP::from_f64(target, wp))?;
        y.sqrt()
    };
    let r = solve(base)?;
    let growth = (2.0 + weight.rho.to_f64().max(0.0)) * r.to_f64().max(1.0).ln();
    solve(base + growth)
}
