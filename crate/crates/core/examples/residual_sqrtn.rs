//! `x_n = √n` solves `3n = x_n(√(n/(n+1)) x_{n+1} + x_n + √(n/(n−1)) x_{n−1})`.
//! Checks the residual of the exact sequence, then recovers it by shooting.

use dp1::recurrence::residual;
use dp1::{solve, CoefficientFamily, Policy, RealP, Trajectory};

fn main() -> dp1::Result<()> {
    let family = CoefficientFamily::sqrt_n_example();
    for prec in [64, 128, 256] {
        let x = (0..=10_000).map(|n| RealP::from_int(n, prec).sqrt()).collect::<dp1::Result<Vec<_>>>()?;
        let traj = Trajectory::from_values(x, prec, family.id());
        println!("{prec:>3} bits: max relative residual {:.2e}", residual(&traj, &family)?.to_f64());
    }

    let sol = solve(&family, &RealP::zero(128), 1e-30, &Policy::default())?;
    println!("recovered x1 = {}", sol.x1_star);
    let traj = sol.trajectory(&family, &RealP::zero(128))?;
    let worst = (1..traj.len())
        .map(|n| (&traj.x[n] - &RealP::from_int(n as i64, 128).sqrt().unwrap()).abs().to_f64())
        .fold(0.0, f64::max);
    println!("max |x_n - sqrt(n)| over n <= {}: {worst:.1e}", traj.len() - 1);
    Ok(())
}
