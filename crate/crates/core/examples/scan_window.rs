//! Classifies a grid of starting values and shows the window `(α_N, β_N)`
//! that contains the positive solution.

use dp1::shooting::{scan, Outcome};
use dp1::{CoefficientFamily, RealP};

fn main() -> dp1::Result<()> {
    let family = CoefficientFamily::freud("1", "0", "0")?;
    let prec = 192;
    let grid: Vec<RealP> = (0..=40).map(|i| RealP::from_f64(0.60 + 0.004 * i as f64, prec)).collect();
    let res = scan(&family, &RealP::zero(prec), &grid, 30, prec, None)?;

    for p in &res.points {
        let verdict = match &p.classification {
            Ok(c) => match c.outcome {
                Outcome::Survived(n) => format!("survived {n} steps"),
                o => format!("{} at n = {}", o.label(), o.index()),
            },
            Err(e) => format!("error: {e}"),
        };
        println!("{:.4}  {verdict}", p.t.to_f64());
    }
    println!("alpha = {:?}", res.alpha.as_ref().map(|a| a.to_f64()));
    println!("beta  = {:?}", res.beta.as_ref().map(|b| b.to_f64()));
    res.write_csv(std::io::sink())
}
