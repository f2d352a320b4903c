//! Sufficient conditions for the positive solution to be unique.
//!
//! Each index `n` is assigned to the star set (`2σ_n ≤ σ_{n,0}`), the dagger
//! set (`σ_n ≤ σ_{n,0} < 2σ_n` plus a signed bound tying `κ_n` to `ℓ_n`), or
//! neither, where `σ_n = max(σ_{n,1}, σ_{n,−1})`. Uniqueness follows when
//! every index is covered, `x_0` satisfies the matching constraint at `n = 1`,
//! and a liminf condition on `ℓ_n` and `κ_n` holds. The liminf condition is
//! asymptotic, so finite windows only give evidence; a certificate is
//! attached for closed-form families where it can be read off the formulas.

use serde::Serialize;

use crate::coefficients::{CoefficientFamily, Coefficients, FamilyKind, Formula};
use crate::error::{Error, Result};
use crate::precision::RealP;
use crate::recurrence::Trajectory;

/// Working precision of the per-index checks.
pub const CHECK_PREC: u32 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Star,
    Dagger,
    Neither,
}

impl Condition {
    pub fn label(self) -> &'static str {
        match self {
            Condition::Star => "star",
            Condition::Dagger => "dagger",
            Condition::Neither => "neither",
        }
    }
}

fn star_holds(c: &Coefficients) -> bool {
    c.sigma_max() * 2 <= c.sigma_mid
}

/// `σ_n ≤ σ_{n,0} < 2σ_n`.
fn dagger_range(c: &Coefficients) -> bool {
    let s = c.sigma_max();
    s <= c.sigma_mid && c.sigma_mid < &s * 2
}

/// `−2(σ_{n,0} − σ_n)√ℓ_n ≤ rhs · √(2σ_n − σ_{n,0})`, assuming [`dagger_range`].
fn dagger_bound(c: &Coefficients, rhs: &RealP) -> bool {
    let s = c.sigma_max();
    let Ok(root_ell) = c.ell.sqrt() else {
        return false;
    };
    let Ok(root_gap) = (&s * 2 - &c.sigma_mid).sqrt() else {
        return false;
    };
    let lhs = (&c.sigma_mid - &s) * &root_ell * (-2);
    lhs <= rhs * &root_gap
}

pub fn check_star(family: &CoefficientFamily, n: usize) -> Result<bool> {
    Ok(star_holds(&family.coefficients(n, CHECK_PREC)?))
}

pub fn check_dagger(family: &CoefficientFamily, n: usize) -> Result<bool> {
    let c = family.coefficients(n, CHECK_PREC)?;
    Ok(dagger_range(&c) && dagger_bound(&c, &c.kappa))
}

pub fn condition_at(family: &CoefficientFamily, n: usize) -> Result<Condition> {
    let c = family.coefficients(n, CHECK_PREC)?;
    Ok(if star_holds(&c) {
        Condition::Star
    } else if dagger_range(&c) && dagger_bound(&c, &c.kappa) {
        Condition::Dagger
    } else {
        Condition::Neither
    })
}

/// Constraint on `x_0`: none when `n = 1` is a star index, the dagger bound
/// with `κ_1` replaced by `σ_{1,−1} x_0 + κ_1` when `n = 1` is in the dagger
/// range, and unsatisfiable otherwise.
pub fn check_x0(family: &CoefficientFamily, x0: &RealP) -> Result<bool> {
    let c = family.coefficients(1, CHECK_PREC)?;
    if star_holds(&c) {
        return Ok(true);
    }
    if !dagger_range(&c) {
        return Ok(false);
    }
    let rhs = &c.sigma_left * &x0.with_prec(CHECK_PREC) + &c.kappa;
    Ok(dagger_bound(&c, &rhs))
}

#[derive(Clone, Debug, Serialize)]
pub struct LiminfEvidence {
    /// Minimum over the window of `(ℓ_n/σ_{n,0} + (κ_n⁻)²/σ_{n,0}²)/n²`.
    pub window_min: RealP,
    pub argmin: usize,
    pub window: usize,
    /// Why the liminf vanishes, when it can be read off a closed form.
    pub symbolic: Option<String>,
}

fn liminf_term(c: &Coefficients, n: usize) -> RealP {
    let prec = c.ell.prec();
    let kneg = if c.kappa.is_negative() { -&c.kappa } else { RealP::zero(prec) };
    let n2 = RealP::from_int(n as i64, prec).square();
    (&c.ell / &c.sigma_mid + kneg.square() / c.sigma_mid.square()) / n2
}

pub fn check_liminf(family: &CoefficientFamily, window: usize) -> Result<LiminfEvidence> {
    if window < 2 {
        return Err(Error::InvalidParameter(format!("liminf window {window} must be at least 2")));
    }
    let window = family.domain_len().map_or(window, |len| window.min(len));
    let mut best: Option<(RealP, usize)> = None;
    for n in 1..=window {
        let v = liminf_term(&family.coefficients(n, CHECK_PREC)?, n);
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, n));
        }
    }
    let (window_min, argmin) = best.expect("window is nonempty");
    Ok(LiminfEvidence {
        window_min,
        argmin,
        window,
        symbolic: symbolic(family).liminf,
    })
}

struct Symbolic {
    /// Star or dagger provably holds at every `n`.
    all_indices: bool,
    liminf: Option<String>,
}

fn degree(f: &Formula) -> Option<i32> {
    f.leading(CHECK_PREC).map(|l| l.degree)
}

fn symbolic(family: &CoefficientFamily) -> Symbolic {
    match family.kind() {
        FamilyKind::FreudQuartic { k, .. } => Symbolic {
            // σ_n = σ_{n,0} = c: never star, dagger iff 0 ≤ K √c.
            all_indices: !k.to_real(CHECK_PREC).is_negative(),
            liminf: Some("ell_n = n + O(1), kappa_n constant, sigma_(n,0) = c > 0".into()),
        },
        FamilyKind::SqrtNExample => Symbolic {
            all_indices: false,
            liminf: Some("ell_n = 3n, kappa_n = 0, sigma_(n,0) = 1".into()),
        },
        FamilyKind::MiddleOnlyExample | FamilyKind::Tabulated(_) => Symbolic {
            all_indices: false,
            liminf: None,
        },
        FamilyKind::GeneralClosedForm(f) => {
            let constant = f.sigma_right.is_constant() && f.sigma_mid.is_constant() && f.sigma_left.is_constant();
            let all_indices = constant
                && match family.coefficients(1, CHECK_PREC) {
                    Ok(c) => star_holds(&c) || (dagger_range(&c) && f.kappa.is_nonnegative()),
                    Err(_) => false,
                };
            let ell_subquadratic = degree(&f.ell).is_none_or(|d| d < 2);
            let kappa_bounded_below = f.kappa.is_nonnegative() || degree(&f.kappa).is_none_or(|d| d <= 0);
            let liminf = (f.sigma_mid.is_constant() && ell_subquadratic && kappa_bounded_below).then(|| {
                format!(
                    "ell_n of degree {} < 2, kappa_n bounded below, sigma_(n,0) constant",
                    degree(&f.ell).unwrap_or(0)
                )
            });
            Symbolic { all_indices, liminf }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "window", rename_all = "snake_case")]
pub enum Verdict {
    UniqueCertified,
    UniqueUpToWindow(usize),
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexCheck {
    pub n: usize,
    pub condition: Condition,
    /// `2σ_n`.
    pub star_lhs: RealP,
    /// `σ_{n,0}`.
    pub star_rhs: RealP,
    pub dagger_ok: bool,
}

/// Maximal run of consecutive indices sharing one condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub from: usize,
    pub to: usize,
    pub condition: Condition,
}

#[derive(Clone, Debug, Serialize)]
pub struct UniquenessReport {
    #[serde(skip)]
    pub per_n: Vec<IndexCheck>,
    pub segments: Vec<Segment>,
    pub x0_ok: bool,
    pub liminf: LiminfEvidence,
    pub verdict: Verdict,
}

impl UniquenessReport {
    pub fn condition(&self, n: usize) -> Option<Condition> {
        self.per_n.get(n.checked_sub(1)?).map(|c| c.condition)
    }

    pub fn count(&self, condition: Condition) -> usize {
        self.per_n.iter().filter(|c| c.condition == condition).count()
    }

    /// CSV with columns `n,condition,star_lhs,star_rhs,dagger_ok`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "condition", "star_lhs", "star_rhs", "dagger_ok"])?;
        for c in &self.per_n {
            w.write_record([
                c.n.to_string(),
                c.condition.label().to_string(),
                c.star_lhs.to_decimal(),
                c.star_rhs.to_decimal(),
                c.dagger_ok.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn segments(per_n: &[IndexCheck]) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::new();
    for c in per_n {
        match out.last_mut() {
            Some(s) if s.condition == c.condition && s.to + 1 == c.n => s.to = c.n,
            _ => out.push(Segment {
                from: c.n,
                to: c.n,
                condition: c.condition,
            }),
        }
    }
    out
}

/// Assembles the per-index checks for `n ≤ window`, the `x_0` check and the
/// liminf evidence. A single uncovered index makes the verdict
/// inconclusive; full certification needs formulas valid for every `n`.
pub fn verdict(family: &CoefficientFamily, x0: &RealP, window: usize) -> Result<UniquenessReport> {
    let liminf = check_liminf(family, window)?;
    let window = liminf.window;
    let mut per_n = Vec::with_capacity(window);
    for n in 1..=window {
        let c = family.coefficients(n, CHECK_PREC)?;
        let star = star_holds(&c);
        let dagger_ok = dagger_range(&c) && dagger_bound(&c, &c.kappa);
        let condition = if star {
            Condition::Star
        } else if dagger_ok {
            Condition::Dagger
        } else {
            Condition::Neither
        };
        per_n.push(IndexCheck {
            n,
            condition,
            star_lhs: c.sigma_max() * 2,
            star_rhs: c.sigma_mid,
            dagger_ok,
        });
    }
    let x0_ok = check_x0(family, x0)?;
    let covered = per_n.iter().all(|c| c.condition != Condition::Neither);
    let verdict = if !covered || !x0_ok {
        Verdict::Inconclusive
    } else if symbolic(family).all_indices && liminf.symbolic.is_some() {
        Verdict::UniqueCertified
    } else {
        Verdict::UniqueUpToWindow(window)
    };
    Ok(UniquenessReport {
        segments: segments(&per_n),
        per_n,
        x0_ok,
        liminf,
        verdict,
    })
}

/// `√ℓ_n / √(2σ_n − σ_{n,0})`, defined when `2σ_n > σ_{n,0}`.
pub fn solution_bound(family: &CoefficientFamily, n: usize, prec: u32) -> Result<Option<RealP>> {
    let c = family.coefficients(n, prec)?;
    let gap = c.sigma_max() * 2 - &c.sigma_mid;
    if !gap.is_positive() {
        return Ok(None);
    }
    Ok(Some(c.ell.sqrt()? / gap.sqrt()?))
}

/// Checks `x_n ≤ √ℓ_n / √(2σ_n − σ_{n,0})` (4-ulp slack) at every dagger
/// index in the positive part of the trajectory. Indices past the report
/// window are classified on the fly.
pub fn solution_bound_check(traj: &Trajectory, family: &CoefficientFamily, report: &UniquenessReport) -> Result<bool> {
    let last = traj.termination.last_positive().min(traj.x.len().saturating_sub(1));
    for n in 1..=last {
        let condition = match report.condition(n) {
            Some(c) => c,
            None => condition_at(family, n)?,
        };
        if condition != Condition::Dagger {
            continue;
        }
        let x = &traj.x[n];
        let Some(bound) = solution_bound(family, n, x.prec())? else {
            continue;
        };
        let slack = bound.ulp() * 4;
        if *x > bound + slack {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    /// `2ω_n ≤ ω_{n+1} + ω_{n−1}` at every interior index.
    pub convex_on_window: bool,
    /// First (1-based) interior index where convexity fails.
    pub first_violation: Option<usize>,
    pub differences_nondecreasing: bool,
    pub final_difference_nonpositive: bool,
    pub nonincreasing: bool,
}

/// Convexity utility: a convex window whose last difference is `≤ 0` is
/// nonincreasing, because the differences are nondecreasing.
/// Indices are 1-based, so `ω = (ω_1, …, ω_L)`.
pub fn lemma_nonincreasing(omega: &[RealP]) -> Result<LemmaReport> {
    if omega.len() < 3 {
        return Err(Error::TooShort {
            len: omega.len(),
            min: 3,
        });
    }
    let first_violation = (1..omega.len() - 1)
        .find(|&i| &omega[i] * 2 > &omega[i + 1] + &omega[i - 1])
        .map(|i| i + 1);
    let diffs: Vec<RealP> = omega.windows(2).map(|w| &w[1] - &w[0]).collect();
    let differences_nondecreasing = diffs.windows(2).all(|d| d[0] <= d[1]);
    let final_difference_nonpositive = !diffs.last().expect("len ≥ 2").is_positive();
    let nonincreasing = diffs.iter().all(|d| !d.is_positive());
    Ok(LemmaReport {
        convex_on_window: first_violation.is_none(),
        first_violation,
        differences_nondecreasing,
        final_difference_nonpositive,
        nonincreasing,
    })
}
