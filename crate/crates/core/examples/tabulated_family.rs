//! Loads coefficients from a CSV table and solves on it. The table here
//! reproduces the Freud family with a slowly varying middle coefficient.

use dp1::{solve, CoefficientFamily, Error, Policy, RealP};

fn main() -> dp1::Result<()> {
    let mut table = String::from("n,ell,sigma_p1,sigma_0,sigma_m1,kappa\n");
    for n in 1..=400 {
        table.push_str(&format!("{n},{n},1,{},1,0.5\n", 1.0 + 1.0 / (n as f64 + 1.0)));
    }
    let family = CoefficientFamily::from_csv_reader(table.as_bytes())?;
    println!("{}", family.description());

    let sol = solve(&family, &RealP::zero(128), 1e-25, &Policy::default())?;
    println!("x1* = {}  (certified through n = {})", sol.x1_star, sol.bracket.certified_depth);

    // Past the table the family is undefined.
    match family.coefficients(401, 128) {
        Err(e @ Error::DomainExceeded { .. }) => println!("n = 401: {e}"),
        other => println!("n = 401: unexpected {other:?}"),
    }
    Ok(())
}
