//! Forward iteration of the difference equation, residual checks and the a
//! priori bound on positive solutions.

use std::io::{Read, Write};

use serde::Serialize;

use crate::coefficients::{CoefficientFamily, Coefficients};
use crate::error::{Error, Result};
use crate::precision::{check_precision, RealP};

/// Precision used for the running rounding-error bound.
const BOUND_PREC: u32 = 64;

/// Extra bits carried inside one forward step before rounding back to P.
const STEP_GUARD: u32 = 32;

/// Why forward iteration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Termination {
    /// `x_1..x_N` are all positive.
    Completed(usize),
    /// `x_m ≤ 0` is the first nonpositive term (`m ≥ 2`).
    NonpositiveAt(usize),
    /// `σ_{n,1} = 0`, so `x_{n+1}` is not determined by the recurrence.
    SigmaRightZeroAt(usize),
    /// `x_n = 0` where the equation divides by it.
    DivisionByZeroAt(usize),
}

impl Termination {
    /// Index of the last positive term.
    pub fn last_positive(&self) -> usize {
        match *self {
            Termination::Completed(n) => n,
            Termination::NonpositiveAt(m) => m - 1,
            Termination::SigmaRightZeroAt(n) => n,
            Termination::DivisionByZeroAt(n) => n.saturating_sub(1),
        }
    }
}

/// Values `x_0..x_m` computed at a fixed precision.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub x: Vec<RealP>,
    pub precision_bits: u32,
    pub termination: Termination,
    pub family_id: String,
}

impl Trajectory {
    /// Wraps externally supplied values `x_0..x_m`, rounded to `prec`.
    pub fn from_values(x: Vec<RealP>, prec: u32, family_id: impl Into<String>) -> Self {
        let x: Vec<RealP> = x.iter().map(|v| v.with_prec(prec)).collect();
        let first_bad = x.iter().enumerate().skip(1).find(|(_, v)| !v.is_positive()).map(|(i, _)| i);
        let termination = match first_bad {
            Some(m) => Termination::NonpositiveAt(m),
            None => Termination::Completed(x.len().saturating_sub(1)),
        };
        Trajectory {
            x,
            precision_bits: prec,
            termination,
            family_id: family_id.into(),
        }
    }

    /// Reads rows `n, x_n[, t_n]` starting at `n = 0`.
    pub fn from_csv_reader<R: Read>(reader: R, prec: u32, family_id: impl Into<String>) -> Result<Self> {
        check_precision(prec)?;
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let mut x = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let n: usize = rec
                .get(0)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::InvalidParameter(format!("row {}: bad index", i + 1)))?;
            if n != i {
                return Err(Error::InvalidParameter(format!(
                    "trajectory rows must be n = 0, 1, ...; row {} has n = {n}",
                    i + 1
                )));
            }
            let v = rec
                .get(1)
                .ok_or_else(|| Error::InvalidParameter(format!("row {}: missing x_n", i + 1)))?;
            x.push(RealP::parse(v, prec)?);
        }
        Ok(Self::from_values(x, prec, family_id))
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// CSV with columns `n,x_n,t_n` where `t_n = x_n/√ℓ_n` (`t_0` left empty).
    pub fn write_csv<W: Write>(&self, family: &CoefficientFamily, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "x_n", "t_n"])?;
        for (n, x) in self.x.iter().enumerate() {
            let t = if n == 0 {
                String::new()
            } else {
                let ell = family.ell(n, self.precision_bits)?;
                (x / ell.sqrt()?).to_decimal()
            };
            w.write_record([n.to_string(), x.to_decimal(), t])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Solves the equation at index `n` for `x_{n+1}`:
/// `x_{n+1} = (ℓ_n/x_n − σ_{n,0} x_n − σ_{n,−1} x_{n−1} − κ_n)/σ_{n,1}`.
pub fn forward_step(family: &CoefficientFamily, n: usize, x_prev: &RealP, x_cur: &RealP) -> Result<RealP> {
    let prec = x_prev.prec().min(x_cur.prec());
    let c = family.coefficients(n, prec + STEP_GUARD)?;
    step_with(&c, n, x_prev, x_cur, prec)
}

/// `c` is evaluated with guard bits; the result is rounded once to `prec`.
fn step_with(c: &Coefficients, n: usize, x_prev: &RealP, x_cur: &RealP, prec: u32) -> Result<RealP> {
    if c.sigma_right.is_zero() {
        return Err(Error::SigmaRightZero { n });
    }
    if x_cur.is_zero() {
        return Err(Error::DivisionByZero { n });
    }
    let wide = prec + STEP_GUARD;
    let (xp, xc) = (x_prev.with_prec(wide), x_cur.with_prec(wide));
    let rhs = &c.ell / &xc - &c.sigma_mid * &xc - &c.sigma_left * &xp - &c.kappa;
    Ok((rhs / &c.sigma_right).with_prec(prec))
}

/// A trajectory together with a first-order bound on the accumulated
/// rounding error of each term.
#[derive(Clone, Debug)]
pub struct TrackedTrajectory {
    pub trajectory: Trajectory,
    /// `error_bound[k]` bounds `|computed x_k − exact x_k|` to first order.
    pub error_bound: Vec<RealP>,
}

impl TrackedTrajectory {
    /// `log2(error_bound[k] / |x_k|)`; `+inf` when `x_k = 0` with a nonzero bound.
    pub fn relative_error_log2(&self, k: usize) -> f64 {
        let e = &self.error_bound[k];
        if e.is_zero() {
            return f64::NEG_INFINITY;
        }
        e.log2_abs() - self.trajectory.x[k].log2_abs()
    }
}

/// Runs the recurrence from `(x_0, x_1)` until `x_N` or the first
/// nonpositive term, at `prec` bits.
pub fn iterate(family: &CoefficientFamily, x0: &RealP, x1: &RealP, steps: usize, prec: u32) -> Result<Trajectory> {
    Ok(run(family, x0, x1, steps, prec, false)?.trajectory)
}

/// As [`iterate`], also propagating a rounding-error bound alongside.
pub fn iterate_tracked(
    family: &CoefficientFamily,
    x0: &RealP,
    x1: &RealP,
    steps: usize,
    prec: u32,
) -> Result<TrackedTrajectory> {
    run(family, x0, x1, steps, prec, true)
}

fn run(
    family: &CoefficientFamily,
    x0: &RealP,
    x1: &RealP,
    steps: usize,
    prec: u32,
    track: bool,
) -> Result<TrackedTrajectory> {
    check_precision(prec)?;
    if !x1.is_positive() {
        return Err(Error::InvalidParameter(format!("x_1 = {x1} must be positive")));
    }
    if steps < 1 {
        return Err(Error::InvalidParameter("at least one step (N >= 1) required".into()));
    }
    let unit = RealP::pow2(1 - prec as i32, BOUND_PREC);
    let mut x = Vec::with_capacity(steps + 1);
    x.push(x0.with_prec(prec));
    x.push(x1.with_prec(prec));
    let mut err: Vec<RealP> = Vec::new();
    if track {
        // x_0 and x_1 are exact inputs; only their rounding to `prec` counts.
        err.push(&unit * &x[0].with_prec(BOUND_PREC).abs());
        err.push(&unit * &x[1].with_prec(BOUND_PREC).abs());
    }
    let mut termination = Termination::Completed(steps);
    for n in 1..steps {
        let c = family.coefficients(n, prec + STEP_GUARD)?;
        let next = match step_with(&c, n, &x[n - 1], &x[n], prec) {
            Ok(v) => v,
            Err(Error::SigmaRightZero { .. }) => {
                termination = Termination::SigmaRightZeroAt(n);
                break;
            }
            Err(Error::DivisionByZero { .. }) => {
                termination = Termination::DivisionByZeroAt(n);
                break;
            }
            Err(e) => return Err(e),
        };
        if track {
            err.push(propagate_bound(&c, &x[n - 1], &x[n], &next, &err[n - 1], &err[n], &unit));
        }
        let positive = next.is_positive();
        x.push(next);
        if !positive {
            termination = Termination::NonpositiveAt(n + 1);
            break;
        }
    }
    Ok(TrackedTrajectory {
        trajectory: Trajectory {
            x,
            precision_bits: prec,
            termination,
            family_id: family.id(),
        },
        error_bound: err,
    })
}

/// First-order error of one forward step: inherited error through the
/// partial derivatives, plus the rounding of each operation and of the
/// coefficients themselves (charged at P even though the step carries
/// guard bits).
fn propagate_bound(
    c: &Coefficients,
    x_prev: &RealP,
    x_cur: &RealP,
    next: &RealP,
    e_prev: &RealP,
    e_cur: &RealP,
    unit: &RealP,
) -> RealP {
    let lo = |v: &RealP| v.with_prec(BOUND_PREC).abs();
    let (ell, s0, sm, sp, k) = (lo(&c.ell), lo(&c.sigma_mid), lo(&c.sigma_left), lo(&c.sigma_right), lo(&c.kappa));
    let (xp, xc) = (lo(x_prev), lo(x_cur));
    let d_cur = &ell / &xc.square() + &s0;
    let inherited = (&d_cur * e_cur + &sm * e_prev) / &sp;
    let terms = &ell / &xc + &s0 * &xc + &sm * &xp + k;
    let rounding = (&terms / &sp + lo(next)) * unit * 4;
    inherited + rounding
}

/// `max_n |ℓ_n − x_n(σ_{n,1}x_{n+1} + σ_{n,0}x_n + σ_{n,−1}x_{n−1}) − κ_n x_n| / ℓ_n`
/// over every `n` for which `x_{n+1}` is present.
pub fn residual(traj: &Trajectory, family: &CoefficientFamily) -> Result<RealP> {
    if traj.x.len() < 3 {
        return Err(Error::TooShort {
            len: traj.x.len(),
            min: 3,
        });
    }
    let prec = traj.precision_bits;
    // Stored terms are exact binary numbers; evaluate wide so only their rounding shows.
    let wide = prec + 2 * STEP_GUARD;
    let mut worst = RealP::zero(wide);
    for n in 1..traj.x.len() - 1 {
        let c = family.coefficients(n, wide)?;
        let (xm, x, xp) = (&traj.x[n - 1].with_prec(wide), &traj.x[n].with_prec(wide), &traj.x[n + 1].with_prec(wide));
        let inner = &c.sigma_right * xp + &c.sigma_mid * x + &c.sigma_left * xm;
        let r = (&c.ell - x * &inner - &c.kappa * x).abs() / &c.ell;
        worst = worst.max(&r);
    }
    Ok(worst.with_prec(prec))
}

/// Largest positive root `U_n` of `σ_{n,0} x² + κ_n x − ℓ_n`; every positive
/// solution has `0 < x_n ≤ U_n` for `n ≥ 2`.
pub fn apriori_upper_bound(family: &CoefficientFamily, n: usize, prec: u32) -> Result<RealP> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("a priori bound needs n >= 2, got {n}")));
    }
    let c = family.coefficients(n, prec)?;
    positive_root(&c.sigma_mid, &c.kappa, &c.ell)
}

/// Positive root of `a t² + b t − c` for `a, c > 0`, without cancellation.
pub(crate) fn positive_root(a: &RealP, b: &RealP, c: &RealP) -> Result<RealP> {
    let disc = (b.square() + &(a * c) * 4).sqrt()?;
    if disc.is_zero() {
        return Err(Error::InvalidParameter("quadratic has no positive root".into()));
    }
    if b.is_positive() {
        Ok((c * 2) / (b + &disc))
    } else {
        Ok((disc - b) / (a * 2))
    }
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
    fn forward_step_examples() {
        let f = freud("0");
        let p = 128;
        let x2 = forward_step(&f, 1, &r("0", p), &r("0.5", p)).unwrap();
        assert_eq!(x2, r("1.5", p));
        let x2 = forward_step(&f, 1, &r("0", p), &r("1", p)).unwrap();
        assert!(x2.is_zero());

        let s = CoefficientFamily::sqrt_n_example();
        let sqrt = |v: i64| RealP::from_int(v, p).sqrt().unwrap();
        let x3 = forward_step(&s, 2, &RealP::one(p), &sqrt(2)).unwrap();
        assert!(x3.ulps_from(&sqrt(3)) <= 2.0, "{x3:?}");
    }

    #[test]
    fn forward_step_errors() {
        let f = freud("0");
        let p = 64;
        assert!(matches!(
            forward_step(&f, 3, &r("1", p), &RealP::zero(p)),
            Err(Error::DivisionByZero { n: 3 })
        ));
        let csv = "n,ell,sigma_p1,sigma_0,sigma_m1,kappa\n1,1,0,1,0,0\n";
        let t = CoefficientFamily::from_csv_reader(csv.as_bytes()).unwrap();
        assert!(matches!(
            forward_step(&t, 1, &r("0", p), &r("1", p)),
            Err(Error::SigmaRightZero { n: 1 })
        ));
    }

    #[test]
    fn iterate_examples() {
        let f = freud("0");
        let p = 128;
        let t = iterate(&f, &r("0", p), &r("0.1", p), 10, p).unwrap();
        assert_eq!(t.termination, Termination::NonpositiveAt(3));
        assert_eq!(t.x.len(), 4);
        // x_2 = 9.9, x_3 = 2/9.9 − 9.9 − 0.1
        let expected = r("2", p) / r("9.9", p) - r("10", p);
        assert!(t.x[3].ulps_from(&expected) < 16.0);
        assert!((t.x[3].to_f64() + 9.797979797979798).abs() < 1e-12);

        let t = iterate(&f, &r("0", p), &r("2", p), 10, p).unwrap();
        assert_eq!(t.termination, Termination::NonpositiveAt(2));
    }

    #[test]
    fn middle_only_invariant() {
        let f = CoefficientFamily::middle_only_example();
        let p = 128;
        let t = iterate(&f, &r("0.4", p), &r("1", p), 20, p).unwrap();
        assert_eq!(t.termination, Termination::Completed(20));
        for n in 1..t.x.len() - 1 {
            let sum = &t.x[n - 1] * &t.x[n] + &t.x[n] * &t.x[n + 1];
            assert!(sum.ulps_from(&RealP::one(p)) <= 4.0, "n = {n}: {sum:?}");
        }
    }

    #[test]
    fn iterate_rejects_bad_inputs() {
        let f = freud("0");
        let p = 64;
        assert!(iterate(&f, &r("0", p), &r("0", p), 5, p).is_err());
        assert!(iterate(&f, &r("0", p), &r("-1", p), 5, p).is_err());
        assert!(iterate(&f, &r("0", p), &r("1", p), 0, p).is_err());
        assert!(matches!(
            iterate(&f, &r("0", p), &r("1", p), 5, 40),
            Err(Error::InvalidPrecision(40))
        ));
    }

    #[test]
    fn iterate_records_sigma_right_zero() {
        let csv = "n,ell,sigma_p1,sigma_0,sigma_m1,kappa\n1,1,1,1,1,0\n2,2,0,1,1,0\n3,3,1,1,1,0\n";
        let t = CoefficientFamily::from_csv_reader(csv.as_bytes()).unwrap();
        let traj = iterate(&t, &r("0", 64), &r("0.5", 64), 3, 64).unwrap();
        assert_eq!(traj.termination, Termination::SigmaRightZeroAt(2));
    }

    #[test]
    fn residual_of_exact_solution() {
        let s = CoefficientFamily::sqrt_n_example();
        let p = 128;
        let x: Vec<RealP> = (0..=100).map(|n| RealP::from_int(n, p).sqrt().unwrap()).collect();
        let traj = Trajectory::from_values(x, p, s.id());
        let res = residual(&traj, &s).unwrap();
        assert!(res <= RealP::pow2(-120, p), "{res:?}");
    }

    #[test]
    fn residual_detects_perturbation() {
        let f = freud("0");
        let p = 128;
        let mut traj = iterate(&f, &r("0", p), &r("0.6759782400672847", p), 12, p).unwrap();
        assert!(residual(&traj, &f).unwrap() <= RealP::pow2(-120, p));
        traj.x[5] = &traj.x[5] + &r("1e-3", p);
        assert!(residual(&traj, &f).unwrap() >= r("1e-4", p));
    }

    #[test]
    fn residual_too_short() {
        let f = freud("0");
        let traj = Trajectory::from_values(vec![RealP::zero(64), RealP::one(64)], 64, "x");
        assert!(matches!(residual(&traj, &f), Err(Error::TooShort { len: 2, min: 3 })));
    }

    #[test]
    fn apriori_bound_examples() {
        let p = 128;
        assert_eq!(apriori_upper_bound(&freud("0"), 4, p).unwrap(), 2);
        assert_eq!(apriori_upper_bound(&freud("0"), 9, p).unwrap(), 3);
        let u = apriori_upper_bound(&freud("2"), 2, p).unwrap();
        let expected = RealP::from_int(3, p).sqrt().unwrap() - 1;
        assert!(u.ulps_from(&expected) <= 2.0);
        assert!(apriori_upper_bound(&freud("0"), 1, p).is_err());
    }

    #[test]
    fn error_bound_grows_with_instability() {
        let f = freud("0");
        let p = 128;
        let t = iterate_tracked(&f, &r("0", p), &r("0.6759782400672847", p), 40, p).unwrap();
        let n = t.trajectory.x.len() - 1;
        assert!(t.relative_error_log2(5) < -110.0);
        assert!(t.relative_error_log2(n) > t.relative_error_log2(5));
    }

    #[test]
    fn csv_round_trip() {
        let s = CoefficientFamily::sqrt_n_example();
        let p = 128;
        let x: Vec<RealP> = (0..=5).map(|n| RealP::from_int(n, p).sqrt().unwrap()).collect();
        let traj = Trajectory::from_values(x, p, s.id());
        let mut buf = Vec::new();
        traj.write_csv(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("n,x_n,t_n\n0,"));
        let back = Trajectory::from_csv_reader(buf.as_slice(), p, s.id()).unwrap();
        assert_eq!(back.x, traj.x);
    }
}
