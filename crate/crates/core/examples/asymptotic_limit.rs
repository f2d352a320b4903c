//! Compares `x_n / √ℓ_n` along a certified solution with the root of the
//! limiting quadratic.

use dp1::asymptotics::{convergence_report, limit_params, predicted_limit_positive, scaled_trajectory, LimitMode};
use dp1::{solve, CoefficientFamily, Policy, RealP};

fn main() -> dp1::Result<()> {
    let x0 = RealP::zero(128);
    for k in ["0", "2", "-2"] {
        let family = CoefficientFamily::freud("1", k, "0")?;
        let params = limit_params(&family, &LimitMode::ClosedForm, 128)?;
        let sol = solve(&family, &x0, 1e-60, &Policy::default())?;
        let traj = sol.trajectory(&family, &x0)?;
        let scaled = scaled_trajectory(&traj, &family)?;
        let report = convergence_report(&traj, &family, &params, Some(sol.bracket.certified_depth))?;

        println!("K = {k}: predicted limit {}", predicted_limit_positive(&params).with_prec(53));
        for n in [1, 10, 40, report.tail_index] {
            if let Some(t) = scaled.get(n) {
                println!("  t_{n:<3} = {}", t.with_prec(53));
            }
        }
        println!("  gap at n = {}: {}", report.tail_index, report.abs_gap.with_prec(24));
    }
    Ok(())
}
