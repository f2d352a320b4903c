//! Shows how the solver trades survival depth against working precision,
//! and what happens when the precision cap is too low for the tolerance.

use dp1::{solve, CoefficientFamily, Error, Policy, RealP};

fn main() -> dp1::Result<()> {
    let family = CoefficientFamily::freud("1", "0", "0")?;
    let x0 = RealP::zero(64);

    for tol in [1e-10, 1e-30, 1e-60, 1e-100] {
        let sol = solve(&family, &x0, tol, &Policy::default())?;
        println!(
            "tol {tol:.0e}: N = {:>3}, P = {:>4} bits, {} escalations, {} classifications",
            sol.steps_used, sol.precision_used, sol.escalations, sol.classifications
        );
    }

    let capped = Policy {
        initial_precision: 64,
        max_precision: 64,
        ..Policy::default()
    };
    for tol in [1e-10, 1e-25] {
        match solve(&family, &x0, tol, &capped) {
            Ok(sol) => println!("64-bit cap, tol {tol:.0e}: certified [{}, {}]", sol.bracket.lo, sol.bracket.hi),
            Err(e @ Error::EscalationExhausted { .. }) => println!("64-bit cap, tol {tol:.0e}: {e}"),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
