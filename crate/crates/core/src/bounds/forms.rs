use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::BoundError;
use crate::rational::{self, to_f64, Rational};

/// Shapes of the closed-form bounds. Every form carries one multiplicative constant
/// (see [`BoundForm::constant_name`]); structural parameters live in `params`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BoundForm {
    /// Sep(n)/n ≥ K·n^{−β}, from Λ(n) ≍ n^{−β}.
    PolyLower,
    /// Sep(n) ≥ A·n^γ/ln n under C₁n^{−α} ≤ Λ(n) ≤ C₂n^{−β}; γ = β(1−α)/α with
    /// partial self-isomorphisms, β²(1−α)/α² without.
    PolyGapLower,
    /// Sep(N)/N ≥ K₁·Λ(N)/(ln N)^{α/β} with Λ(N) ≥ C₁/(ln N)^α folded into K₁.
    LogLower,
    /// Sep(N)/N ≥ K·Λ(N)/exp^{(k−1)}(C·(log^{(k)} N)^{α/β}), Λ(N) ≥ C₁/(log^{(k)} N)^α folded in.
    IterLogLower,
    /// ε·Λ(n)/(4·log₂(p(m)/n) + 4) with Λ(n) = C₁n^{−β}, p(k) = ratio·k and
    /// m = n·(1−ε)^{−1/β}.
    ChainLower,
    /// Λ(n)/(8·(log₂(p^{1/4}(n)/n) + 1)) with Λ(n) = C₁n^{−β}.
    DecayLower,
    /// 4D·f(r/2)/r with r = f⁻¹(ln(N/2)) − 1, where e^{f} bounds ball growth.
    GrowthUpperGeneral,
    /// L₂/(ln N)^{1/α − 1} for growth e^{K n^α}.
    GrowthUpperIntermediate,
    /// L₂·ln N/N^{1/d} for growth K·n^d.
    GrowthUpperPolynomial,
    /// K/(ln n)^{a/(2−a)} for compression ρ(x) = k₁ + k₂x^a, or K/(ln n)^c for c < α/(2−α).
    CompressionUpper,
    /// Sep^v(n) ≥ c·n^{(1−η)·d₁²(d₁−1)/d₂³}.
    LocalPolyLowerA,
    /// Sep^v(n) ≥ c·n^{(1−η)·(d₁−1)(d₁² − (d₂−d₁))/(d₁²d₂)}, needs d₁² > d₂ − d₁.
    LocalPolyLowerB,
    /// Sep^x(n) ≥ c·n^{(d−1)/d} on supercritical percolation clusters.
    PercolationLower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Lower,
    Upper,
}

/// The quantity a form bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Target {
    /// Sep(n)/n.
    SepPerVertex,
    /// Sep(n) itself.
    Sep,
}

impl BoundForm {
    pub const ALL: [BoundForm; 13] = [
        BoundForm::PolyLower,
        BoundForm::PolyGapLower,
        BoundForm::LogLower,
        BoundForm::IterLogLower,
        BoundForm::ChainLower,
        BoundForm::DecayLower,
        BoundForm::GrowthUpperGeneral,
        BoundForm::GrowthUpperIntermediate,
        BoundForm::GrowthUpperPolynomial,
        BoundForm::CompressionUpper,
        BoundForm::LocalPolyLowerA,
        BoundForm::LocalPolyLowerB,
        BoundForm::PercolationLower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundForm::PolyLower => "poly-lower",
            BoundForm::PolyGapLower => "poly-gap-lower",
            BoundForm::LogLower => "log-lower",
            BoundForm::IterLogLower => "iter-log-lower",
            BoundForm::ChainLower => "chain-lower",
            BoundForm::DecayLower => "decay-lower",
            BoundForm::GrowthUpperGeneral => "growth-upper-general",
            BoundForm::GrowthUpperIntermediate => "growth-upper-intermediate",
            BoundForm::GrowthUpperPolynomial => "growth-upper-polynomial",
            BoundForm::CompressionUpper => "compression-upper",
            BoundForm::LocalPolyLowerA => "local-poly-lower-a",
            BoundForm::LocalPolyLowerB => "local-poly-lower-b",
            BoundForm::PercolationLower => "percolation-lower",
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            BoundForm::GrowthUpperGeneral
            | BoundForm::GrowthUpperIntermediate
            | BoundForm::GrowthUpperPolynomial
            | BoundForm::CompressionUpper => Direction::Upper,
            _ => Direction::Lower,
        }
    }

    pub fn target(self) -> Target {
        match self {
            BoundForm::PolyGapLower
            | BoundForm::LocalPolyLowerA
            | BoundForm::LocalPolyLowerB
            | BoundForm::PercolationLower => Target::Sep,
            _ => Target::SepPerVertex,
        }
    }

    pub fn constant_name(self) -> &'static str {
        match self {
            BoundForm::PolyGapLower => "A",
            BoundForm::LogLower => "K1",
            BoundForm::ChainLower | BoundForm::DecayLower => "C1",
            BoundForm::GrowthUpperIntermediate | BoundForm::GrowthUpperPolynomial => "L2",
            BoundForm::LocalPolyLowerA | BoundForm::LocalPolyLowerB | BoundForm::PercolationLower => "c",
            _ => "K",
        }
    }

    /// Parameters every instance must set. Growth and compression forms accept one of two
    /// parameter sets and are checked separately.
    fn required(self) -> &'static [&'static str] {
        match self {
            BoundForm::PolyLower | BoundForm::DecayLower => &["beta"],
            BoundForm::PolyGapLower => &["alpha", "beta", "symmetric"],
            BoundForm::LogLower => &["alpha", "beta"],
            BoundForm::IterLogLower => &["k", "alpha", "beta", "C"],
            BoundForm::ChainLower => &["eps", "beta", "ratio"],
            BoundForm::GrowthUpperGeneral => &["D"],
            BoundForm::GrowthUpperIntermediate => &["alpha"],
            BoundForm::GrowthUpperPolynomial | BoundForm::PercolationLower => &["d"],
            BoundForm::CompressionUpper => &[],
            BoundForm::LocalPolyLowerA | BoundForm::LocalPolyLowerB => &["d1", "d2", "eta"],
        }
    }
}

impl fmt::Display for BoundForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundForm {
    type Err = BoundError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = |t: &str| t.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        let want = key(s);
        BoundForm::ALL
            .into_iter()
            .find(|f| key(f.name()) == want)
            .ok_or_else(|| BoundError::InvalidParameter(format!("unknown bound form '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConstantStatus {
    Fitted,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constant {
    pub value: f64,
    pub status: ConstantStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundExpr {
    pub form: BoundForm,
    #[serde(serialize_with = "params_as_strings")]
    pub params: BTreeMap<String, Rational>,
    pub constants: BTreeMap<String, Constant>,
}

fn params_as_strings<S: Serializer>(p: &BTreeMap<String, Rational>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(p.iter().map(|(k, v)| (k, rational::format(v))))
}

enum Growth {
    /// f(x) = d·ln x + ln K.
    Polynomial { d: f64, k: f64 },
    /// f(x) = K₂·x^α + ln K₁.
    Stretched { alpha: f64, k1: f64, k2: f64 },
}

impl Growth {
    fn f(&self, x: f64) -> f64 {
        match *self {
            Growth::Polynomial { d, k } => d * x.ln() + k.ln(),
            Growth::Stretched { alpha, k1, k2 } => k2 * x.powf(alpha) + k1.ln(),
        }
    }

    fn inverse(&self, y: f64) -> Option<f64> {
        match *self {
            Growth::Polynomial { d, k } => Some(((y - k.ln()) / d).exp()),
            Growth::Stretched { alpha, k1, k2 } => {
                let t = (y - k1.ln()) / k2;
                (t > 0.0).then(|| t.powf(1.0 / alpha))
            }
        }
    }
}

impl BoundExpr {
    /// Builds and validates a bound; the form's constant starts at 1 and is free, except for
    /// the general growth bound whose formula is explicit (fixed at 1).
    pub fn new<'a>(
        form: BoundForm,
        params: impl IntoIterator<Item = (&'a str, Rational)>,
    ) -> Result<BoundExpr, BoundError> {
        let params: BTreeMap<String, Rational> = params.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        let status =
            if form == BoundForm::GrowthUpperGeneral { ConstantStatus::Fixed } else { ConstantStatus::Fitted };
        let mut constants = BTreeMap::new();
        constants.insert(form.constant_name().to_string(), Constant { value: 1.0, status });
        let b = BoundExpr { form, params, constants };
        b.validate()?;
        Ok(b)
    }

    /// Parses `name=value` pairs separated by commas. A key equal to the form's constant
    /// name fixes that constant; every other key is a parameter given as a rational.
    pub fn parse(form: BoundForm, spec: &str) -> Result<BoundExpr, BoundError> {
        let mut params = Vec::new();
        let mut fixed = None;
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| BoundError::InvalidParameter(format!("expected name=value, got '{item}'")))?;
            let (k, v) = (k.trim(), v.trim());
            if k == form.constant_name() {
                let c: f64 = match rational::parse(v) {
                    Ok(r) => to_f64(&r),
                    Err(_) => v.parse().map_err(|_| BoundError::InvalidParameter(format!("bad value '{v}'")))?,
                };
                fixed = Some(c);
            } else {
                let r = rational::parse(v).map_err(|e| BoundError::InvalidParameter(e.to_string()))?;
                params.push((k.to_string(), r));
            }
        }
        let mut b = BoundExpr::new(form, params.iter().map(|(k, v)| (k.as_str(), *v)))?;
        if let Some(c) = fixed {
            b = b.with_constant(c, ConstantStatus::Fixed)?;
        }
        Ok(b)
    }

    pub fn with_constant(mut self, value: f64, status: ConstantStatus) -> Result<BoundExpr, BoundError> {
        if !(value.is_finite() && value > 0.0) {
            return Err(BoundError::InvalidParameter(format!("constant must be positive, got {value}")));
        }
        self.constants.insert(self.form.constant_name().to_string(), Constant { value, status });
        Ok(self)
    }

    pub fn constant(&self) -> Constant {
        self.constants[self.form.constant_name()]
    }

    fn get(&self, name: &str) -> Result<Rational, BoundError> {
        self.params.get(name).copied().ok_or_else(|| BoundError::MissingParameter(name.to_string()))
    }

    fn real(&self, name: &str) -> Result<f64, BoundError> {
        self.get(name).map(|r| to_f64(&r))
    }

    fn validate(&self) -> Result<(), BoundError> {
        for name in self.form.required() {
            self.get(name)?;
        }
        let zero = Rational::from_integer(0);
        let one = Rational::from_integer(1);
        let bad = |msg: String| Err(BoundError::InvalidParameter(msg));
        let positive = |name: &str| -> Result<(), BoundError> {
            if self.get(name)? <= zero {
                return bad(format!("{name} must be positive"));
            }
            Ok(())
        };
        match self.form {
            BoundForm::PolyLower | BoundForm::DecayLower => positive("beta")?,
            BoundForm::PolyGapLower => {
                let (a, b) = (self.get("alpha")?, self.get("beta")?);
                if !(zero < b && b < a && a < one) {
                    return bad("needs 0 < beta < alpha < 1".into());
                }
                let s = self.get("symmetric")?;
                if s != zero && s != one {
                    return bad("symmetric must be 0 or 1".into());
                }
            }
            BoundForm::LogLower => {
                positive("alpha")?;
                positive("beta")?;
            }
            BoundForm::IterLogLower => {
                let k = self.get("k")?;
                if !k.is_integer() || k < Rational::from_integer(2) {
                    return bad("k must be an integer at least 2".into());
                }
                positive("alpha")?;
                positive("beta")?;
                positive("C")?;
            }
            BoundForm::ChainLower => {
                let e = self.get("eps")?;
                if !(zero < e && e < one) {
                    return bad("eps must lie in (0,1)".into());
                }
                positive("beta")?;
                if self.get("ratio")? < one {
                    return bad("ratio must be at least 1".into());
                }
            }
            BoundForm::GrowthUpperGeneral => {
                let d = self.get("D")?;
                if !d.is_integer() || d < one {
                    return bad("D must be a positive integer".into());
                }
                self.growth()?;
            }
            BoundForm::GrowthUpperIntermediate => {
                let a = self.get("alpha")?;
                if !(zero < a && a < one) {
                    return bad("alpha must lie in (0,1)".into());
                }
            }
            BoundForm::GrowthUpperPolynomial => positive("d")?,
            BoundForm::CompressionUpper => {
                self.compression_exponent()?;
            }
            BoundForm::LocalPolyLowerA | BoundForm::LocalPolyLowerB => {
                let (d1, d2, eta) = (self.get("d1")?, self.get("d2")?, self.get("eta")?);
                if !(one < d1 && d1 <= d2) {
                    return bad("needs 1 < d1 <= d2".into());
                }
                if !(zero <= eta && eta < one) || (eta == zero && d1 != d2) {
                    return bad("eta must lie in (0,1), or be 0 when d1 = d2".into());
                }
                if self.form == BoundForm::LocalPolyLowerB && d1 * d1 <= d2 - d1 {
                    return bad("needs d1^2 > d2 - d1".into());
                }
            }
            BoundForm::PercolationLower => {
                let d = self.get("d")?;
                if !d.is_integer() || d < Rational::from_integer(2) {
                    return bad("d must be an integer at least 2".into());
                }
            }
        }
        Ok(())
    }

    fn growth(&self) -> Result<Growth, BoundError> {
        let has = |k: &str| self.params.contains_key(k);
        if has("f_d") {
            let (d, k) = (self.real("f_d")?, self.real("f_K")?);
            if d <= 0.0 || k <= 0.0 {
                return Err(BoundError::InvalidParameter("f_d and f_K must be positive".into()));
            }
            Ok(Growth::Polynomial { d, k })
        } else if has("f_alpha") {
            let (alpha, k1, k2) = (self.real("f_alpha")?, self.real("f_K1")?, self.real("f_K2")?);
            if !(0.0 < alpha && alpha < 1.0) || k1 <= 0.0 || k2 <= 0.0 {
                return Err(BoundError::InvalidParameter("needs 0 < f_alpha < 1 and positive f_K1, f_K2".into()));
            }
            Ok(Growth::Stretched { alpha, k1, k2 })
        } else {
            Err(BoundError::MissingParameter("f_d (with f_K) or f_alpha (with f_K1, f_K2)".into()))
        }
    }

    /// Exponent of 1/ln n in the compression bound.
    fn compression_exponent(&self) -> Result<Rational, BoundError> {
        let zero = Rational::from_integer(0);
        let one = Rational::from_integer(1);
        let two = Rational::from_integer(2);
        if let Some(&a) = self.params.get("a") {
            if !(zero < a && a <= one) {
                return Err(BoundError::InvalidParameter("a must lie in (0,1]".into()));
            }
            return Ok(a / (two - a));
        }
        let alpha = self.get("alpha").map_err(|_| BoundError::MissingParameter("a, or alpha with c".into()))?;
        let c = self.get("c")?;
        if !(zero < alpha && alpha <= one) {
            return Err(BoundError::InvalidParameter("alpha must lie in (0,1]".into()));
        }
        if !(zero <= c && c < alpha / (two - alpha)) {
            return Err(BoundError::InvalidParameter("c must satisfy 0 <= c < alpha/(2-alpha)".into()));
        }
        Ok(c)
    }

    /// Exact exponent of n for the forms that are a pure power of n in their target.
    pub fn exponent(&self) -> Option<Rational> {
        let one = Rational::from_integer(1);
        match self.form {
            BoundForm::PolyLower | BoundForm::DecayLower | BoundForm::ChainLower => Some(-self.get("beta").ok()?),
            BoundForm::LocalPolyLowerA => {
                let (d1, d2, eta) = (self.get("d1").ok()?, self.get("d2").ok()?, self.get("eta").ok()?);
                Some((one - eta) * d1 * d1 * (d1 - one) / (d2 * d2 * d2))
            }
            BoundForm::LocalPolyLowerB => {
                let (d1, d2, eta) = (self.get("d1").ok()?, self.get("d2").ok()?, self.get("eta").ok()?);
                Some((one - eta) * (d1 - one) * (d1 * d1 - (d2 - d1)) / (d1 * d1 * d2))
            }
            BoundForm::PercolationLower => {
                let d = self.get("d").ok()?;
                Some((d - one) / d)
            }
            _ => None,
        }
    }

    /// Smallest argument where the formula is defined (iterated logarithms are checked at
    /// evaluation time).
    pub fn min_argument(&self) -> f64 {
        match self.form {
            BoundForm::PolyLower
            | BoundForm::DecayLower
            | BoundForm::ChainLower
            | BoundForm::LocalPolyLowerA
            | BoundForm::LocalPolyLowerB
            | BoundForm::PercolationLower => 1.0,
            BoundForm::LogLower => std::f64::consts::E,
            _ => 2.0,
        }
    }

    /// The formula with its constant set to 1.
    pub fn shape(&self, x: f64) -> Result<f64, BoundError> {
        if !(x.is_finite() && x >= self.min_argument()) {
            return Err(BoundError::DomainError(format!("{} needs n >= {:.4}, got {x}", self.form, self.min_argument())));
        }
        let v = match self.form {
            BoundForm::PolyLower => x.powf(-self.real("beta")?),
            BoundForm::PolyGapLower => {
                let (a, b) = (self.real("alpha")?, self.real("beta")?);
                let gamma = if self.get("symmetric")? == Rational::from_integer(1) {
                    b * (1.0 - a) / a
                } else {
                    b * b * (1.0 - a) / (a * a)
                };
                x.powf(gamma) / x.ln()
            }
            BoundForm::LogLower => {
                let (a, b) = (self.real("alpha")?, self.real("beta")?);
                x.ln().powf(-(a + a / b))
            }
            BoundForm::IterLogLower => {
                let k = *self.get("k")?.numer() as usize;
                let (a, b, c) = (self.real("alpha")?, self.real("beta")?, self.real("C")?);
                let mut l = x;
                for j in 1..=k {
                    l = l.ln();
                    if l < 1.0 {
                        return Err(BoundError::DomainError(format!("log^({j}) of {x} is below 1")));
                    }
                }
                let mut t = c * l.powf(a / b);
                for _ in 1..k {
                    t = t.exp();
                }
                1.0 / (l.powf(a) * t)
            }
            BoundForm::ChainLower => {
                let (e, b, ratio) = (self.real("eps")?, self.real("beta")?, self.real("ratio")?);
                let span = ratio * (1.0 - e).powf(-1.0 / b);
                e * x.powf(-b) / (4.0 * span.log2() + 4.0)
            }
            BoundForm::DecayLower => {
                let b = self.real("beta")?;
                x.powf(-b) / (8.0 * (2.0 / b + 1.0))
            }
            BoundForm::GrowthUpperGeneral => {
                let growth = self.growth()?;
                let dd = self.real("D")?;
                let r = growth
                    .inverse((x / 2.0).ln())
                    .map(|v| v - 1.0)
                    .filter(|&r| r > 0.0)
                    .ok_or_else(|| BoundError::DomainError(format!("f^-1(ln(N/2)) <= 1 at N = {x}")))?;
                let fr = growth.f(r / 2.0);
                if !(fr > 0.0) {
                    return Err(BoundError::DomainError(format!("f(r/2) <= 0 at N = {x}")));
                }
                4.0 * dd * fr / r
            }
            BoundForm::GrowthUpperIntermediate => x.ln().powf(-(1.0 / self.real("alpha")? - 1.0)),
            BoundForm::GrowthUpperPolynomial => x.ln() / x.powf(1.0 / self.real("d")?),
            BoundForm::CompressionUpper => x.ln().powf(-to_f64(&self.compression_exponent()?)),
            BoundForm::LocalPolyLowerA | BoundForm::LocalPolyLowerB | BoundForm::PercolationLower => {
                x.powf(to_f64(&self.exponent().expect("power forms have an exponent")))
            }
        };
        if v.is_nan() {
            return Err(BoundError::DomainError(format!("{} undefined at {x}", self.form)));
        }
        Ok(v)
    }

    /// The formula's value at a real argument, constant included.
    pub fn evaluate_at(&self, x: f64) -> Result<f64, BoundError> {
        Ok(self.constant().value * self.shape(x)?)
    }

    /// The value converted to a bound on Sep(x)/x.
    pub fn per_vertex(&self, x: f64) -> Result<f64, BoundError> {
        let v = self.evaluate_at(x)?;
        Ok(match self.form.target() {
            Target::Sep => v / x,
            Target::SepPerVertex => v,
        })
    }

    /// First grid point where a lower form, read as a bound on Sep(n)/n, increases.
    pub fn monotonicity_violation(&self, grid: &[f64]) -> Option<f64> {
        if self.form.direction() != Direction::Lower {
            return None;
        }
        let vals: Vec<(f64, f64)> = grid.iter().filter_map(|&x| self.per_vertex(x).ok().map(|v| (x, v))).collect();
        vals.windows(2).find(|w| w[1].1 > w[0].1 * (1.0 + 1e-12)).map(|w| w[1].0)
    }
}

pub fn evaluate_bound(b: &BoundExpr, n: u64) -> Result<f64, BoundError> {
    b.evaluate_at(n as f64)
}
