//! Shooting on the initial value `t = x_1`.
//!
//! For `t` below the positive-solution value `x₁*` the forward trajectory
//! first turns nonpositive at an odd index; above it, at an even index. The
//! bisection in [`solve`] keeps a `TooSmall` witness at the lower end of the
//! bracket and a `TooLarge` witness at the upper end, and only reports a
//! bracket once both witnesses exist and its relative width meets the
//! requested tolerance.
//!
//! Forward iteration amplifies any perturbation of `x_1` by roughly a
//! constant factor per step, so the working precision has to grow with the
//! depth the classification needs. Each classification carries a running
//! rounding-error bound; a classification whose decisive terms are not
//! resolved at the working precision is marked unreliable and triggers a
//! precision escalation instead of moving the bracket.

use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::CoefficientFamily;
use crate::error::{Error, Result};
use crate::precision::{check_precision, RealP};
use crate::recurrence::{iterate_tracked, positive_root, Termination, TrackedTrajectory};

/// Required margin, in bits, between a term and its rounding-error bound.
pub const RELIABILITY_GUARD_BITS: f64 = 16.0;

/// Relative agreement, in bits, of the endpoint trajectories within the certified depth.
pub const AGREEMENT_BITS: i32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", content = "index", rename_all = "snake_case")]
pub enum Outcome {
    /// Positive through `x_N`.
    Survived(usize),
    /// First nonpositive term at odd index `m ≥ 3`: `t < x₁*`.
    TooSmall(usize),
    /// First nonpositive term at even index `m ≥ 2`: `t > x₁*`.
    TooLarge(usize),
}

impl Outcome {
    /// The parity rule: odd first-failure index means the initial value was
    /// too small, even means too large.
    pub fn from_failure_index(m: usize) -> Outcome {
        if m % 2 == 1 {
            Outcome::TooSmall(m)
        } else {
            Outcome::TooLarge(m)
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Survived(_) => "survived",
            Outcome::TooSmall(_) => "too_small",
            Outcome::TooLarge(_) => "too_large",
        }
    }

    pub fn index(&self) -> usize {
        match *self {
            Outcome::Survived(n) | Outcome::TooSmall(n) | Outcome::TooLarge(n) => n,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub t: RealP,
    pub outcome: Outcome,
    /// Whether every term up to the decisive index is resolved at this precision.
    pub reliable: bool,
    /// `log2` of the worst relative rounding-error bound up to the decisive index.
    pub error_log2: f64,
    pub precision_bits: u32,
    pub steps: usize,
}

/// Runs the trajectory from `(x_0, t)` for up to `steps` terms and applies
/// the parity rule to its first nonpositive index.
pub fn classify(family: &CoefficientFamily, x0: &RealP, t: &RealP, steps: usize, prec: u32) -> Result<Classification> {
    if !t.is_positive() {
        return Err(Error::InvalidParameter(format!("candidate x_1 = {t} must be positive")));
    }
    let tracked = iterate_tracked(family, x0, t, steps, prec)?;
    let termination = tracked.trajectory.termination;
    let outcome = match termination {
        Termination::Completed(n) => Outcome::Survived(n),
        Termination::NonpositiveAt(m) => Outcome::from_failure_index(m),
        Termination::SigmaRightZeroAt(n) => return Err(Error::NotApplicable { n }),
        Termination::DivisionByZeroAt(n) => return Err(Error::DivisionByZero { n }),
    };
    let error_log2 = decisive_error_log2(&tracked, termination);
    Ok(Classification {
        t: t.with_prec(prec),
        outcome,
        reliable: error_log2 <= -RELIABILITY_GUARD_BITS,
        error_log2,
        precision_bits: prec,
        steps,
    })
}

/// Worst relative error bound over the positive terms, and, for a failure at
/// `m`, of `x_m` relative to the scale of the step that produced it. If the
/// exact `x_m` is a tiny positive number instead, `x_{m+1}` blows up and
/// `x_{m+2} < 0`: the verdict has the same parity, so only the scale matters.
fn decisive_error_log2(tracked: &TrackedTrajectory, termination: Termination) -> f64 {
    let last = termination.last_positive();
    let mut worst = (1..=last)
        .map(|k| tracked.relative_error_log2(k))
        .fold(f64::NEG_INFINITY, f64::max);
    if let Termination::NonpositiveAt(m) = termination {
        let x = &tracked.trajectory.x;
        let scale = x[m].abs().max(&x[m - 1]);
        let e = &tracked.error_bound[m];
        if !e.is_zero() {
            worst = worst.max(e.log2_abs() - scale.log2_abs());
        }
    }
    worst
}

/// Certified interval for `x₁*`.
#[derive(Clone, Debug, Serialize)]
pub struct Bracket {
    pub lo: RealP,
    pub hi: RealP,
    /// First nonpositive index of the trajectory from `lo` (odd), if `lo` has been classified.
    pub lo_index: Option<usize>,
    /// First nonpositive index of the trajectory from `hi` (even).
    pub hi_index: Option<usize>,
    /// Steps survived by the trajectory from the midpoint.
    pub depth_n: usize,
    /// Last index through which the trajectories from `lo` and `hi` agree to
    /// [`AGREEMENT_BITS`]; the solution trajectory is pinned down up to here.
    pub certified_depth: usize,
    pub precision_bits: u32,
}

impl Bracket {
    pub fn width(&self) -> RealP {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> RealP {
        (&self.lo + &self.hi) / 2
    }

    pub fn contains(&self, t: &RealP) -> bool {
        &self.lo <= t && t <= &self.hi
    }

    /// Largest `n` through which both endpoint trajectories stay positive.
    pub fn positive_depth(&self) -> Option<usize> {
        Some(self.lo_index?.min(self.hi_index?) - 1)
    }
}

/// `[0, β₁]` with `β₁ = 1 + ` the positive root of
/// `σ_{1,0} t² + (σ_{1,−1} x_0 + κ_1) t − ℓ_1`, so that `x_2(β₁) < 0`.
pub fn initial_bracket(family: &CoefficientFamily, x0: &RealP, prec: u32) -> Result<Bracket> {
    check_precision(prec)?;
    let c = family.coefficients(1, prec)?;
    let linear = &c.sigma_left * &x0.with_prec(prec) + &c.kappa;
    let root = positive_root(&c.sigma_mid, &linear, &c.ell)?;
    Ok(Bracket {
        lo: RealP::zero(prec),
        hi: root + RealP::one(prec),
        lo_index: None,
        hi_index: None,
        depth_n: 0,
        certified_depth: 0,
        precision_bits: prec,
    })
}

/// Escalation schedule for [`solve`].
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct Policy {
    /// Initial survival depth `N₀`.
    pub initial_steps: usize,
    /// Initial working precision `P₀` in bits.
    pub initial_precision: u32,
    /// Precision cap; escalation past it is exhaustion.
    pub max_precision: u32,
    /// Total number of `N` or `P` doublings allowed.
    pub max_escalations: u32,
}

impl Default for Policy {
    fn default() -> Self {
        Policy {
            initial_steps: 32,
            initial_precision: 128,
            max_precision: 4096,
            max_escalations: 24,
        }
    }
}

/// One classification performed by [`solve`], with the bracket after it.
#[derive(Clone, Debug, Serialize)]
pub struct TraceEntry {
    pub t: RealP,
    pub outcome: Outcome,
    pub reliable: bool,
    pub precision_bits: u32,
    pub steps: usize,
    pub lo: RealP,
    pub hi: RealP,
}

#[derive(Clone, Debug, Serialize)]
pub struct Solution {
    pub x1_star: RealP,
    pub bracket: Bracket,
    pub steps_used: usize,
    pub precision_used: u32,
    pub classifications: usize,
    pub escalations: u32,
    /// Endpoints that failed revalidation after a precision escalation.
    pub inconsistencies: usize,
    pub trace: Vec<TraceEntry>,
}

impl Solution {
    /// Trajectory from `x1_star` through the certified depth, at the final precision.
    pub fn trajectory(&self, family: &CoefficientFamily, x0: &RealP) -> Result<crate::recurrence::Trajectory> {
        let depth = self.bracket.certified_depth.max(1);
        crate::recurrence::iterate(family, x0, &self.x1_star, depth, self.precision_used)
    }
}

struct Endpoint {
    t: RealP,
    index: Option<usize>,
}

struct Bisection<'a> {
    family: &'a CoefficientFamily,
    x0: &'a RealP,
    policy: &'a Policy,
    prec: u32,
    steps: usize,
    escalations: u32,
    classifications: usize,
    inconsistencies: usize,
    lows: Vec<Endpoint>,
    highs: Vec<Endpoint>,
    trace: Vec<TraceEntry>,
}

impl Bisection<'_> {
    fn exhausted(&self, reason: &str) -> Error {
        Error::EscalationExhausted {
            escalations: self.escalations,
            steps: self.steps,
            precision: self.prec,
            reason: reason.to_string(),
        }
    }

    fn classify(&mut self, t: &RealP) -> Result<Classification> {
        self.classifications += 1;
        classify(self.family, self.x0, t, self.steps, self.prec)
    }

    fn escalate_steps(&mut self) -> Result<()> {
        if self.escalations >= self.policy.max_escalations {
            return Err(self.exhausted("midpoint survived every affordable depth"));
        }
        self.escalations += 1;
        self.steps *= 2;
        Ok(())
    }

    fn escalate_precision(&mut self, reason: &str) -> Result<()> {
        if self.escalations >= self.policy.max_escalations || self.prec >= self.policy.max_precision {
            return Err(self.exhausted(reason));
        }
        self.escalations += 1;
        self.prec = (self.prec * 2).min(self.policy.max_precision);
        self.revalidate()
    }

    /// Re-classifies the bracket endpoints at the new precision, falling back
    /// to older (wider) endpoints when a recent one no longer holds.
    fn revalidate(&mut self) -> Result<()> {
        for lower in [true, false] {
            loop {
                let list = if lower { &self.lows } else { &self.highs };
                let top = list.last().expect("bracket floor is never removed");
                if top.index.is_none() {
                    break;
                }
                let t = top.t.with_prec(self.prec);
                let c = self.classify(&t)?;
                let ok = match c.outcome {
                    Outcome::Survived(_) if c.reliable => {
                        self.escalate_steps()?;
                        continue;
                    }
                    Outcome::TooSmall(m) if lower && c.reliable => Some(m),
                    Outcome::TooLarge(m) if !lower && c.reliable => Some(m),
                    _ => None,
                };
                let list = if lower { &mut self.lows } else { &mut self.highs };
                match ok {
                    Some(m) => {
                        let top = list.last_mut().expect("nonempty");
                        top.t = t;
                        top.index = Some(m);
                        break;
                    }
                    None => {
                        self.inconsistencies += 1;
                        if list.len() == 1 {
                            // The upper floor β₁ must classify TooLarge at any precision.
                            return Err(self.exhausted("initial bracket endpoint failed to classify"));
                        }
                        list.pop();
                    }
                }
            }
        }
        for e in self.lows.iter_mut().chain(self.highs.iter_mut()) {
            e.t = e.t.with_prec(self.prec);
        }
        Ok(())
    }
}

/// Bisection for `x₁*` to relative bracket width `tol`.
pub fn solve(family: &CoefficientFamily, x0: &RealP, tol: f64, policy: &Policy) -> Result<Solution> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    if policy.initial_steps < 2 {
        return Err(Error::InvalidParameter("initial_steps must be at least 2".into()));
    }
    check_precision(policy.max_precision)?;
    let prec = check_precision(policy.initial_precision.min(policy.max_precision))?;
    let init = initial_bracket(family, x0, prec)?;
    let mut b = Bisection {
        family,
        x0,
        policy,
        prec,
        steps: policy.initial_steps,
        escalations: 0,
        classifications: 0,
        inconsistencies: 0,
        lows: vec![Endpoint {
            t: init.lo,
            index: None,
        }],
        highs: vec![Endpoint {
            t: init.hi.clone(),
            index: None,
        }],
        trace: Vec::new(),
    };

    // β₁ is TooLarge by construction; classify it so the upper witness is real.
    let c = b.classify(&init.hi)?;
    match c.outcome {
        Outcome::TooLarge(m) if c.reliable => b.highs[0].index = Some(m),
        _ => return Err(b.exhausted("initial upper endpoint did not classify as too large")),
    }

    loop {
        let lo = &b.lows.last().expect("nonempty").t;
        let hi = &b.highs.last().expect("nonempty").t;
        let witnessed = b.lows.last().expect("nonempty").index.is_some();
        let width = hi - lo;
        let mid = (lo + hi) / 2;
        if witnessed && width <= &mid * &RealP::from_f64(tol, b.prec) {
            break;
        }
        if &mid <= lo || &mid >= hi {
            b.escalate_precision("bracket width at the resolution of the working precision")?;
            continue;
        }
        let c = b.classify(&mid)?;
        if !c.reliable {
            b.escalate_precision("classification not resolved at the working precision")?;
            continue;
        }
        match c.outcome {
            Outcome::TooSmall(m) => b.lows.push(Endpoint {
                t: mid.clone(),
                index: Some(m),
            }),
            Outcome::TooLarge(m) => b.highs.push(Endpoint {
                t: mid.clone(),
                index: Some(m),
            }),
            Outcome::Survived(_) => {
                b.escalate_steps()?;
                continue;
            }
        }
        b.trace.push(TraceEntry {
            t: mid,
            outcome: c.outcome,
            reliable: c.reliable,
            precision_bits: b.prec,
            steps: b.steps,
            lo: b.lows.last().expect("nonempty").t.clone(),
            hi: b.highs.last().expect("nonempty").t.clone(),
        });
    }

    let lo = b.lows.pop().expect("nonempty");
    let hi = b.highs.pop().expect("nonempty");
    let mid = (&lo.t + &hi.t) / 2;
    let depth = crate::recurrence::iterate(family, x0, &mid, b.steps, b.prec)?
        .termination
        .last_positive();
    let certified_depth = agreement_depth(family, x0, &lo.t, &hi.t, b.steps, b.prec)?;
    Ok(Solution {
        x1_star: mid,
        bracket: Bracket {
            lo: lo.t,
            hi: hi.t,
            lo_index: lo.index,
            hi_index: hi.index,
            depth_n: depth,
            certified_depth,
            precision_bits: b.prec,
        },
        steps_used: b.steps,
        precision_used: b.prec,
        classifications: b.classifications,
        escalations: b.escalations,
        inconsistencies: b.inconsistencies,
        trace: b.trace,
    })
}

/// Last `n` with `|x_k(lo) − x_k(hi)| ≤ 2^{−AGREEMENT_BITS} x_k(hi)` for all `1 ≤ k ≤ n`.
/// `x_k(t)` is monotone in `t` on the bracket, so the solution lies between.
fn agreement_depth(family: &CoefficientFamily, x0: &RealP, lo: &RealP, hi: &RealP, steps: usize, prec: u32) -> Result<usize> {
    if !lo.is_positive() {
        return Ok(0);
    }
    let a = crate::recurrence::iterate(family, x0, lo, steps, prec)?;
    let b = crate::recurrence::iterate(family, x0, hi, steps, prec)?;
    let last = a.termination.last_positive().min(b.termination.last_positive());
    let scale = RealP::pow2(-AGREEMENT_BITS, prec);
    Ok((1..=last)
        .take_while(|&k| (&a.x[k] - &b.x[k]).abs() <= &scale * &b.x[k])
        .last()
        .unwrap_or(0))
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanPoint {
    pub t: RealP,
    pub classification: std::result::Result<Classification, String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanResult {
    pub points: Vec<ScanPoint>,
    /// Largest grid value classified `TooSmall` (empirical `α_N`).
    pub alpha: Option<RealP>,
    /// Smallest grid value classified `TooLarge` (empirical `β_N`).
    pub beta: Option<RealP>,
}

impl ScanResult {
    /// CSV with columns `t,outcome,first_index`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "outcome", "first_index"])?;
        for p in &self.points {
            let (label, index) = match &p.classification {
                Ok(c) => match c.outcome {
                    Outcome::Survived(_) => ("survived", String::new()),
                    o => (o.label(), o.index().to_string()),
                },
                Err(_) => ("error", String::new()),
            };
            w.write_record([p.t.to_decimal(), label.to_string(), index])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Classifies every grid value. Per-point failures are recorded and the scan
/// continues. `threads = None` uses the global worker pool.
pub fn scan(
    family: &CoefficientFamily,
    x0: &RealP,
    grid: &[RealP],
    steps: usize,
    prec: u32,
    threads: Option<usize>,
) -> Result<ScanResult> {
    check_precision(prec)?;
    if let Some(bad) = grid.iter().find(|t| !t.is_positive()) {
        return Err(Error::InvalidParameter(format!("grid value {bad} is not positive")));
    }
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("grid must be sorted ascending".into()));
    }
    let work = || -> Vec<ScanPoint> {
        grid.par_iter()
            .map(|t| ScanPoint {
                t: t.with_prec(prec),
                classification: classify(family, x0, t, steps, prec).map_err(|e| e.to_string()),
            })
            .collect()
    };
    let points = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?
            .install(work),
        None => work(),
    };
    let outcome_t = |want: fn(&Outcome) -> bool| {
        points.iter().filter_map(move |p| match &p.classification {
            Ok(c) if want(&c.outcome) => Some(p.t.clone()),
            _ => None,
        })
    };
    let alpha = outcome_t(|o| matches!(o, Outcome::TooSmall(_))).next_back();
    let beta = outcome_t(|o| matches!(o, Outcome::TooLarge(_))).next();
    Ok(ScanResult { points, alpha, beta })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn freud(k: &str) -> CoefficientFamily {
        CoefficientFamily::freud("1", k, "0").unwrap()
    }

    fn r(s: &str, p: u32) -> RealP {
        RealP::parse(s, p).unwrap()
    }

    #[test]
    fn classify_examples() {
        let f = freud("0");
        let zero = RealP::zero(128);
        let c = classify(&f, &zero, &r("0.1", 128), 20, 128).unwrap();
        assert_eq!(c.outcome, Outcome::TooSmall(3));
        assert!(c.reliable);
        let c = classify(&f, &zero, &r("2.0", 128), 20, 128).unwrap();
        assert_eq!(c.outcome, Outcome::TooLarge(2));
        let c = classify(&f, &zero, &r("0.7", 128), 20, 128).unwrap();
        assert_eq!(c.outcome, Outcome::TooLarge(6));
    }

    #[test]
    fn exact_zero_uses_parity() {
        // x_2 = 1/1 − 1 = 0 exactly.
        let c = classify(&freud("0"), &RealP::zero(128), &RealP::one(128), 20, 128).unwrap();
        assert_eq!(c.outcome, Outcome::TooLarge(2));
        assert!(c.reliable);
    }

    #[test]
    fn classify_not_applicable() {
        let csv = "n,ell,sigma_p1,sigma_0,sigma_m1,kappa\n1,1,1,1,1,0\n2,2,0,1,1,0\n3,3,1,1,1,0\n";
        let t = CoefficientFamily::from_csv_reader(csv.as_bytes()).unwrap();
        let res = classify(&t, &RealP::zero(64), &r("0.5", 64), 3, 64);
        assert!(matches!(res, Err(Error::NotApplicable { n: 2 })));
    }

    #[test]
    fn noise_dominated_classification_is_unreliable() {
        // At 64 bits the trajectory from x₁* cannot be followed for 80 steps.
        let f = freud("0");
        let c = classify(&f, &RealP::zero(64), &r("0.67597824006728472899544768467", 64), 80, 64).unwrap();
        assert!(!c.reliable, "{c:?}");
    }

    #[test]
    fn initial_bracket_examples() {
        let p = 128;
        let zero = RealP::zero(p);
        let b = initial_bracket(&freud("0"), &zero, p).unwrap();
        assert!(b.lo.is_zero());
        assert_eq!(b.hi, 2);
        // ℓ_1 = 1, so β₁ = 1 + (√8 − 2)/2 = √2.
        let b = initial_bracket(&freud("2"), &zero, p).unwrap();
        assert!(b.hi.ulps_from(&RealP::from_int(2, p).sqrt().unwrap()) <= 2.0);
        let b = initial_bracket(&CoefficientFamily::sqrt_n_example(), &zero, p).unwrap();
        let expected = RealP::from_int(3, p).sqrt().unwrap() + 1;
        assert!(b.hi.ulps_from(&expected) <= 2.0);
    }

    #[test]
    fn solve_sqrt_n_recovers_one() {
        let s = CoefficientFamily::sqrt_n_example();
        let sol = solve(&s, &RealP::zero(128), 1e-10, &Policy::default()).unwrap();
        assert!((sol.x1_star.to_f64() - 1.0).abs() <= 1e-10);
        assert!(sol.bracket.contains(&RealP::one(128)));
    }

    #[test]
    fn solve_rejects_bad_tolerance() {
        let f = freud("0");
        assert!(solve(&f, &RealP::zero(128), 0.0, &Policy::default()).is_err());
        assert!(solve(&f, &RealP::zero(128), f64::NAN, &Policy::default()).is_err());
    }

    #[test]
    fn scan_rejects_unsorted_grid() {
        let f = freud("0");
        let grid = vec![r("0.5", 64), r("0.1", 64)];
        assert!(scan(&f, &RealP::zero(64), &grid, 10, 64, Some(1)).is_err());
        let grid = vec![r("0", 64), r("0.1", 64)];
        assert!(scan(&f, &RealP::zero(64), &grid, 10, 64, Some(1)).is_err());
    }

    #[test]
    fn outcome_parity() {
        assert_eq!(Outcome::from_failure_index(3), Outcome::TooSmall(3));
        assert_eq!(Outcome::from_failure_index(2), Outcome::TooLarge(2));
        assert_eq!(Outcome::from_failure_index(6).label(), "too_large");
    }
}
