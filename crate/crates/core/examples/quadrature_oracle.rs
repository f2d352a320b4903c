//! Moment-ratio initial value by double-exponential quadrature, checked
//! against the gamma-function closed form where one exists.

use dp1::oracle::{freud_x1_closed_form_rho, x1_quadrature, x1_quadrature_rho};
use dp1::RealP;

fn main() -> dp1::Result<()> {
    let prec = 192;
    let r = |s: &str| RealP::parse(s, prec);

    for (c, k) in [("1", "0"), ("1", "1"), ("1", "-1"), ("4", "0"), ("2", "-2")] {
        let q = x1_quadrature(&r(c)?, &r(k)?, 1e-40, prec)?;
        println!(
            "c = {c:<2} K = {k:<3} x1 = {}  est. error {:.1e}  levels {}",
            q.value.with_prec(130),
            q.est_error.to_f64(),
            q.levels_used
        );
    }
    for rho in ["2", "-0.5"] {
        let q = x1_quadrature_rho(&r("1")?, &r("0")?, &r(rho)?, 1e-40, prec)?;
        let exact = freud_x1_closed_form_rho(&r("1")?, &r(rho)?, prec)?;
        println!("rho = {rho:<4} quadrature - closed form = {:.1e}", (&q.value - &exact).to_f64());
    }
    Ok(())
}
