//! Bisects for the positive solution of the quartic Freud recurrence and
//! compares it with the moment-ratio closed form.

use dp1::oracle::freud_x1_closed_form;
use dp1::{solve, CoefficientFamily, Policy, RealP};

fn main() -> dp1::Result<()> {
    let family = CoefficientFamily::freud("1", "0", "0")?;
    let x0 = RealP::zero(128);
    let sol = solve(&family, &x0, 1e-40, &Policy::default())?;
    let exact = freud_x1_closed_form(256)?;

    println!("x1*        = {}", sol.x1_star);
    println!("closed     = {exact}");
    println!("bracket    = [{}, {}]", sol.bracket.lo, sol.bracket.hi);
    println!("failures   = lo at {:?}, hi at {:?}", sol.bracket.lo_index, sol.bracket.hi_index);
    println!("N, P       = {}, {} bits", sol.steps_used, sol.precision_used);
    println!("certified  = x_1..x_{}", sol.bracket.certified_depth);

    let traj = sol.trajectory(&family, &x0)?;
    for n in [1, 5, 10, 20, 40] {
        if let Some(x) = traj.x.get(n) {
            println!("x_{n:<3} = {}", x.with_prec(64));
        }
    }
    Ok(())
}
