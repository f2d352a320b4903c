//! Runs the uniqueness conditions over a window for a few families.

use dp1::uniqueness::{solution_bound, verdict, Condition};
use dp1::{CoefficientFamily, RealP};

fn main() -> dp1::Result<()> {
    let families = [
        CoefficientFamily::freud("1", "1", "0")?,
        CoefficientFamily::freud("1", "-1", "0")?,
        CoefficientFamily::constant_sigmas("0.25", "1")?,
        CoefficientFamily::constant_sigmas("0.75", "1")?,
        CoefficientFamily::sqrt_n_example(),
    ];
    let x0 = RealP::zero(128);
    for f in &families {
        let r = verdict(f, &x0, 5000)?;
        println!("{}", f.description());
        println!(
            "  star {} dagger {} neither {}  x0 ok {}  verdict {:?}",
            r.count(Condition::Star),
            r.count(Condition::Dagger),
            r.count(Condition::Neither),
            r.x0_ok,
            r.verdict
        );
        // The a priori bound is only proved where dagger holds.
        if r.condition(10) == Some(Condition::Dagger) {
            if let Some(b) = solution_bound(f, 10, 128)? {
                println!("  x_10 <= {}", b.with_prec(53));
            }
        }
    }
    Ok(())
}
