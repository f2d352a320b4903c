//! Limits of the scaled solution `t_n = x_n / √ℓ_n`.
//!
//! When `p_{±1} = lim σ_{n,±1} √(ℓ_{n±1}/ℓ_n)`, `σ₀ = lim σ_{n,0} > 0` and
//! `q = lim κ_n/√ℓ_n` exist, a positive solution has `t_n → T`, the positive
//! root of `(p₁ + σ₀ + p₋₁) T² + q T − 1 = 0`.

use serde::Serialize;

use crate::coefficients::{CoefficientFamily, FamilyKind, Formula};
use crate::error::{Error, Result};
use crate::precision::RealP;
use crate::recurrence::{positive_root, Trajectory};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum LimitMode {
    ClosedForm,
    TailEstimate { n1: usize, n2: usize },
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum LimitSource {
    ClosedForm,
    /// Values at `n2`; `max_deviation` is the largest distance of any of the
    /// four sampled quantities from its `n2` value over `[n1, n2]`.
    TailEstimate { n1: usize, n2: usize, max_deviation: RealP },
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitParams {
    pub p_plus: RealP,
    pub p_minus: RealP,
    pub sigma0: RealP,
    pub q: RealP,
    pub source: LimitSource,
}

impl LimitParams {
    /// Closed-form parameters with exact inputs.
    pub fn new(p_plus: RealP, p_minus: RealP, sigma0: RealP, q: RealP) -> Result<Self> {
        let params = LimitParams {
            p_plus,
            p_minus,
            sigma0,
            q,
            source: LimitSource::ClosedForm,
        };
        params.validate()?;
        Ok(params)
    }

    fn validate(&self) -> Result<()> {
        if !self.sigma0.is_positive() {
            return Err(Error::InvalidParameter(format!("sigma0 = {} must be positive", self.sigma0)));
        }
        if self.p_plus.is_negative() || self.p_minus.is_negative() {
            return Err(Error::InvalidParameter("p_plus and p_minus must be nonnegative".into()));
        }
        Ok(())
    }

    /// `p₁ + σ₀ + p₋₁`.
    pub fn quadratic_coefficient(&self) -> RealP {
        &self.p_plus + &self.sigma0 + &self.p_minus
    }

    pub fn with_q(&self, q: RealP) -> Self {
        LimitParams { q, ..self.clone() }
    }
}

/// `lim_{n→∞} f(n)`, if finite.
fn formula_limit(f: &Formula, prec: u32) -> Option<RealP> {
    match f.leading(prec) {
        None => Some(RealP::zero(prec)),
        Some(l) if l.degree == 0 => Some(l.coef),
        Some(l) if l.degree < 0 => Some(RealP::zero(prec)),
        Some(_) => None,
    }
}

/// `lim κ_n / √ℓ_n` from the leading terms.
fn ratio_limit(kappa: &Formula, ell: &Formula, prec: u32) -> Result<Option<RealP>> {
    let Some(k) = kappa.leading(prec) else {
        return Ok(Some(RealP::zero(prec)));
    };
    let l = ell.leading(prec).expect("ell is positive");
    Ok(match (2 * k.degree).cmp(&l.degree) {
        std::cmp::Ordering::Less => Some(RealP::zero(prec)),
        std::cmp::Ordering::Equal => Some(k.coef / l.coef.sqrt()?),
        std::cmp::Ordering::Greater => None,
    })
}

fn closed_form_params(family: &CoefficientFamily, prec: u32) -> Result<LimitParams> {
    let no = |why: &str| Error::NoClosedForm(format!("{}: {why}", family.id()));
    let (p_plus, p_minus, sigma0, q) = match family.kind() {
        FamilyKind::FreudQuartic { c, .. } => {
            // ℓ_{n±1}/ℓ_n → 1 and κ_n/√ℓ_n = K/√n → 0.
            let c = c.to_real(prec);
            (c.clone(), c.clone(), c, RealP::zero(prec))
        }
        // σ_{n,±1}√(ℓ_{n±1}/ℓ_n) = 1 exactly for n ≥ 2.
        FamilyKind::SqrtNExample => (RealP::one(prec), RealP::one(prec), RealP::one(prec), RealP::zero(prec)),
        FamilyKind::MiddleOnlyExample => return Err(no("sigma_(n,0) = 0")),
        FamilyKind::Tabulated(_) => return Err(no("tabulated coefficients have no closed-form limits")),
        FamilyKind::GeneralClosedForm(f) => {
            // ℓ_n is a positive power-plus-offset, so ℓ_{n±1}/ℓ_n → 1.
            let p_plus = formula_limit(&f.sigma_right, prec).ok_or_else(|| no("sigma_(n,1) diverges"))?;
            let p_minus = formula_limit(&f.sigma_left, prec).ok_or_else(|| no("sigma_(n,-1) diverges"))?;
            let sigma0 = formula_limit(&f.sigma_mid, prec).ok_or_else(|| no("sigma_(n,0) diverges"))?;
            if !sigma0.is_positive() {
                return Err(no("lim sigma_(n,0) is not positive"));
            }
            let q = ratio_limit(&f.kappa, &f.ell, prec)?.ok_or_else(|| no("kappa_n / sqrt(ell_n) diverges"))?;
            (p_plus, p_minus, sigma0, q)
        }
    };
    LimitParams::new(p_plus, p_minus, sigma0, q)
}

struct Sample {
    p_plus: RealP,
    p_minus: Option<RealP>,
    sigma0: RealP,
    q: RealP,
}

fn sample(family: &CoefficientFamily, n: usize, prec: u32) -> Result<Sample> {
    let c = family.coefficients(n, prec)?;
    let ell_next = family.ell(n + 1, prec)?;
    let p_plus = &c.sigma_right * &(&ell_next / &c.ell).sqrt()?;
    let p_minus = if n >= 2 {
        let ell_prev = family.ell(n - 1, prec)?;
        Some(&c.sigma_left * &(&ell_prev / &c.ell).sqrt()?)
    } else {
        None
    };
    let q = &c.kappa / &c.ell.sqrt()?;
    Ok(Sample {
        p_plus,
        p_minus,
        sigma0: c.sigma_mid,
        q,
    })
}

fn tail_params(family: &CoefficientFamily, n1: usize, n2: usize, prec: u32) -> Result<LimitParams> {
    if n1 < 1 || n2 <= n1 {
        return Err(Error::InvalidParameter(format!("tail window [{n1}, {n2}] needs n2 > n1 >= 1")));
    }
    let end = sample(family, n2, prec)?;
    let p_minus = end.p_minus.clone().expect("n2 >= 2");
    let mut dev = RealP::zero(prec);
    for n in n1..n2 {
        let s = sample(family, n, prec)?;
        dev = dev
            .max(&(&s.p_plus - &end.p_plus).abs())
            .max(&(&s.sigma0 - &end.sigma0).abs())
            .max(&(&s.q - &end.q).abs());
        if let Some(pm) = s.p_minus {
            dev = dev.max(&(&pm - &p_minus).abs());
        }
    }
    let params = LimitParams {
        p_plus: end.p_plus,
        p_minus,
        sigma0: end.sigma0,
        q: end.q,
        source: LimitSource::TailEstimate {
            n1,
            n2,
            max_deviation: dev,
        },
    };
    params.validate()?;
    Ok(params)
}

pub fn limit_params(family: &CoefficientFamily, mode: &LimitMode, prec: u32) -> Result<LimitParams> {
    crate::precision::check_precision(prec)?;
    match *mode {
        LimitMode::ClosedForm => closed_form_params(family, prec),
        LimitMode::TailEstimate { n1, n2 } => tail_params(family, n1, n2, prec),
    }
}

/// Positive root of `(p₁ + σ₀ + p₋₁) T² + q T − 1`.
pub fn predicted_limit_positive(params: &LimitParams) -> RealP {
    let one = RealP::one(params.sigma0.prec());
    positive_root(&params.quadratic_coefficient(), &params.q, &one).expect("a > 0 and c > 0 give a positive root")
}

/// Negative root of the same quadratic: `−T(−q)`.
pub fn predicted_limit_negative(params: &LimitParams) -> RealP {
    -predicted_limit_positive(&params.with_q(-&params.q))
}

/// `t_n = x_n / √ℓ_n` for `n ≥ 1`, at trajectory precision.
#[derive(Clone, Debug, Serialize)]
pub struct ScaledTrajectory {
    /// `t[k]` is `t_{k+1}`.
    pub t: Vec<RealP>,
}

impl ScaledTrajectory {
    pub fn get(&self, n: usize) -> Option<&RealP> {
        self.t.get(n.checked_sub(1)?)
    }

    pub fn last_index(&self) -> usize {
        self.t.len()
    }

    /// CSV with columns `n,t_n`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "t_n"])?;
        for (k, t) in self.t.iter().enumerate() {
            w.write_record([(k + 1).to_string(), t.to_decimal()])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn scaled_trajectory(traj: &Trajectory, family: &CoefficientFamily) -> Result<ScaledTrajectory> {
    if traj.len() < 2 {
        return Err(Error::TooShort {
            len: traj.len(),
            min: 2,
        });
    }
    let prec = traj.precision_bits;
    let t = (1..traj.len())
        .map(|n| Ok(&traj.x[n] / &family.ell(n, prec)?.sqrt()?))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScaledTrajectory { t })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    /// Last index used: the end of the positive part, capped by the certified depth.
    pub tail_index: usize,
    pub t_tail: RealP,
    pub predicted: RealP,
    pub abs_gap: RealP,
    /// Running minimum of `t_n` over `1 ≤ n ≤ tail_index`.
    pub window_min: RealP,
    pub window_max: RealP,
}

/// Compares the scaled trajectory with the predicted limit. Terms past
/// `certified_depth` are ignored: forward instability makes them noise.
pub fn convergence_report(
    traj: &Trajectory,
    family: &CoefficientFamily,
    params: &LimitParams,
    certified_depth: Option<usize>,
) -> Result<ConvergenceReport> {
    let scaled = scaled_trajectory(traj, family)?;
    let mut tail = traj.termination.last_positive().min(scaled.last_index());
    if let Some(d) = certified_depth {
        tail = tail.min(d);
    }
    if tail < 1 {
        return Err(Error::TooShort { len: tail + 1, min: 2 });
    }
    let window = &scaled.t[..tail];
    let window_min = window.iter().skip(1).fold(window[0].clone(), |m, t| m.min(t));
    let window_max = window.iter().skip(1).fold(window[0].clone(), |m, t| m.max(t));
    let t_tail = window[tail - 1].clone();
    let predicted = predicted_limit_positive(params).with_prec(traj.precision_bits);
    Ok(ConvergenceReport {
        tail_index: tail,
        abs_gap: (&t_tail - &predicted).abs(),
        t_tail,
        predicted,
        window_min,
        window_max,
    })
}
