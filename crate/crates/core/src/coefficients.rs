//! Coefficient sequences `ℓ_n, σ_{n,1}, σ_{n,0}, σ_{n,-1}, κ_n` of the equation
//!
//! ```text
//! ℓ_n = x_n (σ_{n,1} x_{n+1} + σ_{n,0} x_n + σ_{n,-1} x_{n-1}) + κ_n x_n,   n ≥ 1.
//! ```
//!
//! Families are evaluated lazily at whatever precision the caller asks for.
//! Every parameter and every table entry is kept as a decimal literal and
//! re-parsed at the requested precision, so raising the working precision is
//! never limited by how the inputs were stored.

use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precision::RealP;

/// Which neighbour a σ-coefficient multiplies: `Left` is `σ_{n,-1}` (the
/// coefficient of `x_{n-1}`), `Middle` is `σ_{n,0}`, `Right` is `σ_{n,1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Middle,
    Right,
}

impl Side {
    pub fn from_offset(j: i32) -> Option<Side> {
        match j {
            -1 => Some(Side::Left),
            0 => Some(Side::Middle),
            1 => Some(Side::Right),
            _ => None,
        }
    }

    pub fn offset(self) -> i32 {
        match self {
            Side::Left => -1,
            Side::Middle => 0,
            Side::Right => 1,
        }
    }
}

/// A validated decimal literal such as `"-0.25"` or `"1e-3"`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Decimal(String);

impl Decimal {
    pub fn new(s: impl Into<String>) -> Result<Self> {
        let s = s.into().trim().to_string();
        RealP::parse(&s, 64)?;
        Ok(Decimal(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn to_real(&self, prec: u32) -> RealP {
        RealP::parse(&self.0, prec).expect("validated at construction")
    }
}

impl TryFrom<String> for Decimal {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Decimal::new(s)
    }
}

impl From<Decimal> for String {
    fn from(d: Decimal) -> String {
        d.0
    }
}

impl From<i64> for Decimal {
    fn from(v: i64) -> Self {
        Decimal(v.to_string())
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// `coef · n^power + offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Formula {
    pub coef: Decimal,
    pub power: i32,
    pub offset: Decimal,
}

/// Leading behaviour of a [`Formula`] as `n → ∞`: `coef · n^degree`.
#[derive(Clone, Debug)]
pub(crate) struct Leading {
    pub coef: RealP,
    pub degree: i32,
}

impl Formula {
    pub fn constant(v: Decimal) -> Self {
        Formula {
            coef: Decimal::from(0),
            power: 0,
            offset: v,
        }
    }

    pub fn monomial(coef: Decimal, power: i32) -> Self {
        Formula {
            coef,
            power,
            offset: Decimal::from(0),
        }
    }

    pub fn eval(&self, n: usize, prec: u32) -> RealP {
        let n = RealP::from_int(n as i64, prec);
        &self.coef.to_real(prec) * &n.powi(self.power) + self.offset.to_real(prec)
    }

    pub fn is_constant(&self) -> bool {
        self.power == 0 || self.coef.to_real(64).is_zero()
    }

    /// `None` when the formula is identically zero.
    pub(crate) fn leading(&self, prec: u32) -> Option<Leading> {
        let a = self.coef.to_real(prec);
        let b = self.offset.to_real(prec);
        let lead = match self.power {
            p if p > 0 && !a.is_zero() => Leading { coef: a, degree: p },
            0 => Leading {
                coef: a + b,
                degree: 0,
            },
            _ if !b.is_zero() => Leading { coef: b, degree: 0 },
            p => Leading { coef: a, degree: p },
        };
        if lead.coef.is_zero() {
            None
        } else {
            Some(lead)
        }
    }

    /// Infimum of the formula over `n ≥ 1` and whether it is attained.
    fn infimum(&self, prec: u32) -> (RealP, bool) {
        let a = self.coef.to_real(prec);
        let b = self.offset.to_real(prec);
        let at_one = &a + &b;
        if self.power == 0 || a.is_zero() {
            return (at_one, true);
        }
        if self.power > 0 {
            if a.is_negative() {
                // Unbounded below.
                return (RealP::from_int(-1, prec) / RealP::zero(prec), false);
            }
            return (at_one, true);
        }
        // power < 0: n^power decreases from 1 towards 0.
        if a.is_positive() {
            (b, false)
        } else {
            (at_one, true)
        }
    }

    fn is_positive_for_all_n(&self) -> bool {
        let (inf, attained) = self.infimum(128);
        inf.is_positive() || (inf.is_zero() && !attained)
    }

    fn is_nonnegative_for_all_n(&self) -> bool {
        let (inf, _) = self.infimum(128);
        !inf.is_negative()
    }

    pub(crate) fn is_nonnegative(&self) -> bool {
        self.is_nonnegative_for_all_n()
    }
}

/// A closed-form family given by one [`Formula`] per coefficient sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub name: String,
    pub ell: Formula,
    pub sigma_right: Formula,
    pub sigma_mid: Formula,
    pub sigma_left: Formula,
    pub kappa: Formula,
}

/// One row of a tabulated family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: usize,
    pub ell: Decimal,
    pub sigma_p1: Decimal,
    pub sigma_0: Decimal,
    pub sigma_m1: Decimal,
    pub kappa: Decimal,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FamilyKind {
    /// `ℓ_n = n + ρ(1 − (−1)^n)/2`, every `σ_{n,j} = c`, `κ_n = K`.
    FreudQuartic { c: Decimal, k: Decimal, rho: Decimal },
    GeneralClosedForm(Box<ClosedForm>),
    /// `ℓ_n = 3n` with `x_n = √n` as an exact solution.
    SqrtNExample,
    /// `1 = x_n (x_{n+1} + x_{n-1})`: vanishing middle coefficient.
    MiddleOnlyExample,
    Tabulated(Vec<TableRow>),
}

/// All five coefficients at one index.
#[derive(Clone, Debug)]
pub struct Coefficients {
    pub ell: RealP,
    pub sigma_right: RealP,
    pub sigma_mid: RealP,
    pub sigma_left: RealP,
    pub kappa: RealP,
}

impl Coefficients {
    pub fn sigma_max(&self) -> RealP {
        self.sigma_left.max(&self.sigma_right)
    }
}

/// An immutable generator of the coefficient sequences.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientFamily {
    kind: FamilyKind,
    description: String,
}

impl CoefficientFamily {
    /// Freud quartic family with weight parameters `c > 0`, `K`, `ρ > −1`.
    pub fn freud(c: &str, k: &str, rho: &str) -> Result<Self> {
        let c = Decimal::new(c)?;
        let k = Decimal::new(k)?;
        let rho = Decimal::new(rho)?;
        if !c.to_real(128).is_positive() {
            return Err(Error::InvalidParameter(format!("c = {c} must be positive")));
        }
        if rho.to_real(128) <= -1 {
            return Err(Error::InvalidParameter(format!("rho = {rho} must exceed -1")));
        }
        let description = format!("n + rho(1-(-1)^n)/2 = {c} x_n(x_(n+1) + x_n + x_(n-1)) + {k} x_n");
        Ok(CoefficientFamily {
            kind: FamilyKind::FreudQuartic { c, k, rho },
            description,
        })
    }

    pub fn sqrt_n_example() -> Self {
        CoefficientFamily {
            kind: FamilyKind::SqrtNExample,
            description: "3n = x_n(sqrt(n/(n+1)) x_(n+1) + x_n + sqrt(n/(n-1)) x_(n-1)); x_n = sqrt(n)".into(),
        }
    }

    pub fn middle_only_example() -> Self {
        CoefficientFamily {
            kind: FamilyKind::MiddleOnlyExample,
            description: "1 = x_n(x_(n+1) + x_(n-1))".into(),
        }
    }

    /// Constant-coefficient family with `ℓ_n = n` and the given side/middle
    /// coefficients, `κ_n = 0`.
    pub fn constant_sigmas(side: &str, mid: &str) -> Result<Self> {
        let side = Decimal::new(side)?;
        Self::closed_form(ClosedForm {
            name: format!("sigma_pm={side},sigma_0={mid}"),
            ell: Formula::monomial(Decimal::from(1), 1),
            sigma_right: Formula::constant(side.clone()),
            sigma_mid: Formula::constant(Decimal::new(mid)?),
            sigma_left: Formula::constant(side),
            kappa: Formula::constant(Decimal::from(0)),
        })
    }

    pub fn closed_form(form: ClosedForm) -> Result<Self> {
        if !form.ell.is_positive_for_all_n() {
            return Err(Error::InvalidParameter(format!("{}: ell_n must be positive for all n", form.name)));
        }
        if !form.sigma_mid.is_positive_for_all_n() {
            return Err(Error::InvalidParameter(format!("{}: sigma_(n,0) must be positive for all n", form.name)));
        }
        if !form.sigma_right.is_nonnegative_for_all_n() || !form.sigma_left.is_nonnegative_for_all_n() {
            return Err(Error::InvalidParameter(format!(
                "{}: sigma_(n,+-1) must be nonnegative for all n",
                form.name
            )));
        }
        let description = format!("closed form {}", form.name);
        Ok(CoefficientFamily {
            kind: FamilyKind::GeneralClosedForm(Box::new(form)),
            description,
        })
    }

    pub fn tabulated(rows: Vec<TableRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidParameter("empty coefficient table".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.n != i + 1 {
                return Err(Error::InvalidParameter(format!(
                    "table rows must be n = 1, 2, ... consecutively; row {} has n = {}",
                    i + 1,
                    row.n
                )));
            }
            let check = |v: &Decimal, strict: bool, what: &str| {
                let r = v.to_real(128);
                let ok = if strict { r.is_positive() } else { !r.is_negative() };
                if ok {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("n = {}: {what} = {v} out of range", row.n)))
                }
            };
            check(&row.ell, true, "ell")?;
            check(&row.sigma_0, true, "sigma_0")?;
            check(&row.sigma_p1, false, "sigma_p1")?;
            check(&row.sigma_m1, false, "sigma_m1")?;
        }
        let description = format!("tabulated, n = 1..{}", rows.len());
        Ok(CoefficientFamily {
            kind: FamilyKind::Tabulated(rows),
            description,
        })
    }

    /// Reads a table with header `n,ell,sigma_p1,sigma_0,sigma_m1,kappa`.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let rows = rdr.deserialize().collect::<std::result::Result<Vec<TableRow>, _>>()?;
        Self::tabulated(rows)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(file)
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Short identifier used in manifests and trajectories.
    pub fn id(&self) -> String {
        match &self.kind {
            FamilyKind::FreudQuartic { c, k, rho } => format!("freud(c={c},K={k},rho={rho})"),
            FamilyKind::GeneralClosedForm(f) => format!("closed_form({})", f.name),
            FamilyKind::SqrtNExample => "sqrtn".into(),
            FamilyKind::MiddleOnlyExample => "middle_only".into(),
            FamilyKind::Tabulated(rows) => format!("tabulated(n<={})", rows.len()),
        }
    }

    /// Last valid index for tabulated families.
    pub fn domain_len(&self) -> Option<usize> {
        match &self.kind {
            FamilyKind::Tabulated(rows) => Some(rows.len()),
            _ => None,
        }
    }

    /// Whether the side coefficients are strictly positive for every `n`.
    ///
    /// For tabulated families this covers only the tabulated range.
    pub fn strict_side(&self) -> bool {
        match &self.kind {
            FamilyKind::FreudQuartic { .. } | FamilyKind::MiddleOnlyExample => true,
            FamilyKind::SqrtNExample => false,
            FamilyKind::GeneralClosedForm(f) => {
                f.sigma_left.is_positive_for_all_n() && f.sigma_right.is_positive_for_all_n()
            }
            FamilyKind::Tabulated(rows) => rows
                .iter()
                .all(|r| r.sigma_p1.to_real(64).is_positive() && r.sigma_m1.to_real(64).is_positive()),
        }
    }

    /// Whether `σ_{n,0} > 0` holds; only the middle-only example breaks it.
    pub fn middle_positive(&self) -> bool {
        !matches!(self.kind, FamilyKind::MiddleOnlyExample)
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::DomainExceeded {
                n,
                len: self.domain_len().unwrap_or(usize::MAX),
            });
        }
        if let Some(len) = self.domain_len() {
            if n > len {
                return Err(Error::DomainExceeded { n, len });
            }
        }
        Ok(())
    }

    pub fn coefficients(&self, n: usize, prec: u32) -> Result<Coefficients> {
        self.check_index(n)?;
        let int = |v: i64| RealP::from_int(v, prec);
        let c = match &self.kind {
            FamilyKind::FreudQuartic { c, k, rho } => {
                let c = c.to_real(prec);
                let ell = if n % 2 == 1 {
                    int(n as i64) + rho.to_real(prec)
                } else {
                    int(n as i64)
                };
                Coefficients {
                    ell,
                    sigma_right: c.clone(),
                    sigma_mid: c.clone(),
                    sigma_left: c,
                    kappa: k.to_real(prec),
                }
            }
            FamilyKind::GeneralClosedForm(f) => Coefficients {
                ell: f.ell.eval(n, prec),
                sigma_right: f.sigma_right.eval(n, prec),
                sigma_mid: f.sigma_mid.eval(n, prec),
                sigma_left: f.sigma_left.eval(n, prec),
                kappa: f.kappa.eval(n, prec),
            },
            FamilyKind::SqrtNExample => {
                let n_r = int(n as i64);
                let (right, left) = if n == 1 {
                    (int(2).sqrt()?, RealP::zero(prec))
                } else {
                    (
                        (&n_r / int(n as i64 + 1)).sqrt()?,
                        (&n_r / int(n as i64 - 1)).sqrt()?,
                    )
                };
                Coefficients {
                    ell: n_r * 3,
                    sigma_right: right,
                    sigma_mid: int(1),
                    sigma_left: left,
                    kappa: RealP::zero(prec),
                }
            }
            FamilyKind::MiddleOnlyExample => Coefficients {
                ell: int(1),
                sigma_right: int(1),
                sigma_mid: RealP::zero(prec),
                sigma_left: int(1),
                kappa: RealP::zero(prec),
            },
            FamilyKind::Tabulated(rows) => {
                let row = &rows[n - 1];
                Coefficients {
                    ell: row.ell.to_real(prec),
                    sigma_right: row.sigma_p1.to_real(prec),
                    sigma_mid: row.sigma_0.to_real(prec),
                    sigma_left: row.sigma_m1.to_real(prec),
                    kappa: row.kappa.to_real(prec),
                }
            }
        };
        Ok(c)
    }

    pub fn ell(&self, n: usize, prec: u32) -> Result<RealP> {
        Ok(self.coefficients(n, prec)?.ell)
    }

    pub fn sigma(&self, n: usize, side: Side, prec: u32) -> Result<RealP> {
        let c = self.coefficients(n, prec)?;
        Ok(match side {
            Side::Left => c.sigma_left,
            Side::Middle => c.sigma_mid,
            Side::Right => c.sigma_right,
        })
    }

    pub fn kappa(&self, n: usize, prec: u32) -> Result<RealP> {
        Ok(self.coefficients(n, prec)?.kappa)
    }

    /// `σ_n = max(σ_{n,-1}, σ_{n,1})`.
    pub fn sigma_max(&self, n: usize, prec: u32) -> Result<RealP> {
        Ok(self.coefficients(n, prec)?.sigma_max())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn freud(c: &str, k: &str, rho: &str) -> CoefficientFamily {
        CoefficientFamily::freud(c, k, rho).unwrap()
    }

    fn table() -> CoefficientFamily {
        let csv = "n,ell,sigma_p1,sigma_0,sigma_m1,kappa\n1,1,1,1,1,0.5\n2,2,1,1,1,-0.5\n";
        CoefficientFamily::from_csv_reader(csv.as_bytes()).unwrap()
    }

    #[test]
    fn ell_examples() {
        assert_eq!(freud("1", "0", "0").ell(7, 128).unwrap(), 7);
        assert_eq!(freud("1", "0", "2").ell(3, 128).unwrap(), 5);
        assert_eq!(freud("1", "0", "2").ell(4, 128).unwrap(), 4);
        assert_eq!(CoefficientFamily::sqrt_n_example().ell(4, 128).unwrap(), 12);
    }

    #[test]
    fn sigma_examples() {
        let p = 128;
        assert_eq!(freud("1", "0", "0").sigma(5, Side::Right, p).unwrap(), 1);
        let s = CoefficientFamily::sqrt_n_example();
        let sqrt2 = RealP::from_int(2, p).sqrt().unwrap();
        assert_eq!(s.sigma(1, Side::Right, p).unwrap(), sqrt2);
        assert!(s.sigma(1, Side::Left, p).unwrap().is_zero());
        assert_eq!(s.sigma(2, Side::Left, p).unwrap(), sqrt2);
        assert_eq!(s.sigma(1, Side::Middle, p).unwrap(), 1);
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(freud("1", "-1", "0").kappa(9, 128).unwrap(), -1);
        assert!(freud("4", "0", "0").kappa(1, 128).unwrap().is_zero());
        assert_eq!(table().kappa(2, 128).unwrap(), RealP::parse("-0.5", 128).unwrap());
    }

    #[test]
    fn sigma_max_examples() {
        let p = 128;
        assert_eq!(freud("1", "0", "0").sigma_max(3, p).unwrap(), 1);
        let s = CoefficientFamily::sqrt_n_example();
        let sqrt2 = RealP::from_int(2, p).sqrt().unwrap();
        assert_eq!(s.sigma_max(1, p).unwrap(), sqrt2);
        assert_eq!(s.sigma_max(2, p).unwrap(), sqrt2);
    }

    #[test]
    fn tabulated_domain() {
        let t = table();
        assert_eq!(t.domain_len(), Some(2));
        assert!(matches!(t.ell(3, 64), Err(Error::DomainExceeded { n: 3, len: 2 })));
        assert!(matches!(t.ell(0, 64), Err(Error::DomainExceeded { .. })));
        assert!(t.strict_side());
    }

    #[test]
    fn tabulated_rejects_bad_rows() {
        let gap = "n,ell,sigma_p1,sigma_0,sigma_m1,kappa\n1,1,1,1,1,0\n3,1,1,1,1,0\n";
        assert!(CoefficientFamily::from_csv_reader(gap.as_bytes()).is_err());
        let neg = "n,ell,sigma_p1,sigma_0,sigma_m1,kappa\n1,-1,1,1,1,0\n";
        assert!(CoefficientFamily::from_csv_reader(neg.as_bytes()).is_err());
        let text = "n,ell,sigma_p1,sigma_0,sigma_m1,kappa\n1,one,1,1,1,0\n";
        assert!(CoefficientFamily::from_csv_reader(text.as_bytes()).is_err());
    }

    #[test]
    fn freud_parameter_validation() {
        assert!(matches!(
            CoefficientFamily::freud("1", "0", "-1"),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            CoefficientFamily::freud("0", "0", "0"),
            Err(Error::InvalidParameter(_))
        ));
        assert!(CoefficientFamily::freud("1", "0", "-0.5").is_ok());
    }

    #[test]
    fn closed_form_validation() {
        assert!(CoefficientFamily::constant_sigmas("0.25", "1").is_ok());
        assert!(CoefficientFamily::constant_sigmas("-0.25", "1").is_err());
        assert!(CoefficientFamily::constant_sigmas("0.25", "0").is_err());
        // 1 - n is negative from n = 2 on.
        let bad = ClosedForm {
            name: "bad".into(),
            ell: Formula {
                coef: Decimal::from(-1),
                power: 1,
                offset: Decimal::from(1),
            },
            sigma_right: Formula::constant(Decimal::from(1)),
            sigma_mid: Formula::constant(Decimal::from(1)),
            sigma_left: Formula::constant(Decimal::from(1)),
            kappa: Formula::constant(Decimal::from(0)),
        };
        assert!(CoefficientFamily::closed_form(bad).is_err());
    }

    #[test]
    fn formula_leading_terms() {
        let f = Formula {
            coef: Decimal::from(2),
            power: -1,
            offset: Decimal::from(3),
        };
        let l = f.leading(64).unwrap();
        assert_eq!((l.degree, l.coef.to_f64()), (0, 3.0));
        let g = Formula::monomial(Decimal::from(-1), 1);
        let l = g.leading(64).unwrap();
        assert_eq!((l.degree, l.coef.to_f64()), (1, -1.0));
        assert!(Formula::constant(Decimal::from(0)).leading(64).is_none());
    }

    #[test]
    fn decimal_serde_round_trip() {
        let d = Decimal::new("1e-3").unwrap();
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(json, "\"1e-3\"");
        let back: Decimal = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
        assert!(serde_json::from_str::<Decimal>("\"x\"").is_err());
    }
}
