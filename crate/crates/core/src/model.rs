//! State spaces, parameter sets and vector fields.
//!
//! Two models are provided: the three-variable Turchin-Korotayev system
//! coupling population `N`, state resources `S` and internal conflict `W`,
//! and the two-variable Lotka-Volterra predator-prey system. The scalar
//! growth law `y' = y` is kept alongside them as an integrator test problem.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible effective carrying capacity `kmax - c*W`.
pub const CAPACITY_GUARD: f64 = 1e-9;

/// Population, state resources and internal-conflict intensity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State3 {
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "W")]
    pub w: f64,
}

impl State3 {
    pub const fn new(n: f64, s: f64, w: f64) -> Self {
        Self { n, s, w }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.n, self.s, self.w]
    }

    pub fn from_slice(y: &[f64]) -> Self {
        Self::new(y[0], y[1], y[2])
    }

    pub fn is_finite(&self) -> bool {
        self.n.is_finite() && self.s.is_finite() && self.w.is_finite()
    }

    pub fn max_abs(&self) -> f64 {
        self.n.abs().max(self.s.abs()).max(self.w.abs())
    }
}

/// Names of the nine Turchin-Korotayev parameters, in the order the
/// subset scanner enumerates them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TkParam {
    A,
    B,
    C,
    Kmax,
    R0,
    Alpha,
    Beta,
    Delta,
    Rho0,
}

impl TkParam {
    pub const ALL: [TkParam; 9] = [
        TkParam::A,
        TkParam::B,
        TkParam::C,
        TkParam::Kmax,
        TkParam::R0,
        TkParam::Alpha,
        TkParam::Beta,
        TkParam::Delta,
        TkParam::Rho0,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TkParam::A => "a",
            TkParam::B => "b",
            TkParam::C => "c",
            TkParam::Kmax => "kmax",
            TkParam::R0 => "r0",
            TkParam::Alpha => "alpha",
            TkParam::Beta => "beta",
            TkParam::Delta => "delta",
            TkParam::Rho0 => "rho0",
        }
    }
}

impl fmt::Display for TkParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TkParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TkParam::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown parameter name `{s}`")))
    }
}

/// Parameters of the Turchin-Korotayev system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TkParams {
    /// Intrinsic population growth rate.
    pub r0: f64,
    /// Per-capita taxation rate.
    pub rho0: f64,
    /// Severity of the war effect on carrying capacity.
    pub c: f64,
    /// Rate at which encounters turn violent.
    pub a: f64,
    /// Maximum carrying capacity.
    pub kmax: f64,
    /// Conflict forgiveness rate.
    pub b: f64,
    /// Per-capita state expenditure rate.
    pub beta: f64,
    /// Severity of the war effect on population.
    pub delta: f64,
    /// Effectiveness of state violence suppression.
    pub alpha: f64,
}

impl TkParams {
    /// Reference parameter values (pre-alteration baseline).
    pub const BASELINE: TkParams = TkParams {
        r0: 0.015,
        rho0: 1.0,
        c: 2.0,
        a: 0.01,
        kmax: 3.0,
        b: 0.05,
        beta: 0.25,
        delta: 0.1,
        alpha: 0.1,
    };

    pub fn get(&self, p: TkParam) -> f64 {
        match p {
            TkParam::A => self.a,
            TkParam::B => self.b,
            TkParam::C => self.c,
            TkParam::Kmax => self.kmax,
            TkParam::R0 => self.r0,
            TkParam::Alpha => self.alpha,
            TkParam::Beta => self.beta,
            TkParam::Delta => self.delta,
            TkParam::Rho0 => self.rho0,
        }
    }

    pub fn set(&mut self, p: TkParam, value: f64) {
        let slot = match p {
            TkParam::A => &mut self.a,
            TkParam::B => &mut self.b,
            TkParam::C => &mut self.c,
            TkParam::Kmax => &mut self.kmax,
            TkParam::R0 => &mut self.r0,
            TkParam::Alpha => &mut self.alpha,
            TkParam::Beta => &mut self.beta,
            TkParam::Delta => &mut self.delta,
            TkParam::Rho0 => &mut self.rho0,
        };
        *slot = value;
    }

    pub fn with(mut self, p: TkParam, value: f64) -> Self {
        self.set(p, value);
        self
    }

    /// All nine parameters must be finite and strictly positive.
    pub fn validate(&self) -> Result<()> {
        for p in TkParam::ALL {
            check_positive(p.name(), self.get(p))?;
        }
        Ok(())
    }

    /// Effective carrying capacity `kmax - c*W`.
    pub fn capacity(&self, w: f64) -> f64 {
        self.kmax - self.c * w
    }
}

impl Default for TkParams {
    fn default() -> Self {
        Self::BASELINE
    }
}

/// Parameters of the Lotka-Volterra predator-prey system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LvParams {
    /// Prey growth rate.
    pub alpha: f64,
    /// Predation efficiency.
    pub beta: f64,
    /// Predator conversion efficiency.
    pub gamma: f64,
    /// Predator death rate.
    pub delta: f64,
}

impl LvParams {
    pub const BASELINE: LvParams = LvParams {
        alpha: 5.0,
        beta: 0.1,
        gamma: 0.1,
        delta: 5.0,
    };

    pub fn validate(&self) -> Result<()> {
        check_positive("alpha", self.alpha)?;
        check_positive("beta", self.beta)?;
        check_positive("gamma", self.gamma)?;
        check_positive("delta", self.delta)
    }

    /// Interior fixed point `(delta/gamma, alpha/beta)`.
    pub fn interior_fixed_point(&self) -> [f64; 2] {
        [self.delta / self.gamma, self.alpha / self.beta]
    }

    /// First integral `V(R, C) = gamma*R - delta*ln R + beta*C - alpha*ln C`,
    /// constant along every orbit in the open positive quadrant.
    pub fn first_integral(&self, prey: f64, predator: f64) -> f64 {
        self.gamma * prey - self.delta * prey.ln() + self.beta * predator
            - self.alpha * predator.ln()
    }

    pub fn first_integral_gradient(&self, prey: f64, predator: f64) -> [f64; 2] {
        [
            self.gamma - self.delta / prey,
            self.beta - self.alpha / predator,
        ]
    }
}

impl Default for LvParams {
    fn default() -> Self {
        Self::BASELINE
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        });
    }
    if value <= 0.0 {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be strictly positive",
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    TurchinKorotayev,
    LotkaVolterra,
    /// Scalar growth law `y' = y`.
    Exponential,
}

impl ModelKind {
    pub fn dimension(self) -> usize {
        match self {
            ModelKind::TurchinKorotayev => 3,
            ModelKind::LotkaVolterra => 2,
            ModelKind::Exponential => 1,
        }
    }

    pub fn component_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::TurchinKorotayev => &["N", "S", "W"],
            ModelKind::LotkaVolterra => &["R", "C"],
            ModelKind::Exponential => &["y"],
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::TurchinKorotayev => "turchin-korotayev",
            ModelKind::LotkaVolterra => "lotka-volterra",
            ModelKind::Exponential => "exponential",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub dimension: usize,
}

impl ModelSpec {
    pub fn new(kind: ModelKind) -> Self {
        Self {
            kind,
            dimension: kind.dimension(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension != self.kind.dimension() {
            return Err(Error::InvalidInput(format!(
                "{} model has dimension {}, got {}",
                self.kind,
                self.kind.dimension(),
                self.dimension
            )));
        }
        Ok(())
    }
}

/// Parameters of one model, tagged by model kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ParamSet {
    TurchinKorotayev(TkParams),
    LotkaVolterra(LvParams),
    Exponential,
}

impl ParamSet {
    pub fn kind(&self) -> ModelKind {
        match self {
            ParamSet::TurchinKorotayev(_) => ModelKind::TurchinKorotayev,
            ParamSet::LotkaVolterra(_) => ModelKind::LotkaVolterra,
            ParamSet::Exponential => ModelKind::Exponential,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ParamSet::TurchinKorotayev(p) => p.validate(),
            ParamSet::LotkaVolterra(p) => p.validate(),
            ParamSet::Exponential => Ok(()),
        }
    }

    pub fn as_tk(&self) -> Option<&TkParams> {
        match self {
            ParamSet::TurchinKorotayev(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_lv(&self) -> Option<&LvParams> {
        match self {
            ParamSet::LotkaVolterra(p) => Some(p),
            _ => None,
        }
    }

    /// Evaluates the vector field at `y`, writing into `dy`.
    pub fn rhs(&self, y: &[f64], dy: &mut [f64]) -> Result<()> {
        match self {
            ParamSet::TurchinKorotayev(p) => {
                let d = tk_rhs(State3::from_slice(y), p)?;
                dy[..3].copy_from_slice(&d.to_array());
            }
            ParamSet::LotkaVolterra(p) => {
                let d = lv_rhs([y[0], y[1]], p)?;
                dy[..2].copy_from_slice(&d);
            }
            ParamSet::Exponential => dy[0] = exp_rhs(y[0]),
        }
        Ok(())
    }
}

impl From<TkParams> for ParamSet {
    fn from(p: TkParams) -> Self {
        ParamSet::TurchinKorotayev(p)
    }
}

impl From<LvParams> for ParamSet {
    fn from(p: LvParams) -> Self {
        ParamSet::LotkaVolterra(p)
    }
}

/// Turchin-Korotayev vector field:
///
/// ```text
/// dN/dt = r0 N (1 - N/K) - delta N W
/// dS/dt = rho0 N (1 - N/K) - beta N
/// dW/dt = a N^2 - b W - alpha S        with K = kmax - c W
/// ```
pub fn tk_rhs(state: State3, p: &TkParams) -> Result<State3> {
    if !state.is_finite() {
        return Err(Error::NonFiniteState {
            context: format!("in Turchin-Korotayev state {state:?}"),
        });
    }
    let State3 { n, s, w } = state;
    let capacity = p.capacity(w);
    if !(capacity >= CAPACITY_GUARD) {
        return Err(Error::SingularCarryingCapacity { capacity, w });
    }
    let logistic = n * (1.0 - n / capacity);
    Ok(State3 {
        n: p.r0 * logistic - p.delta * n * w,
        s: p.rho0 * logistic - p.beta * n,
        w: p.a * n * n - p.b * w - p.alpha * s,
    })
}

/// Lotka-Volterra vector field `(alpha R - beta R C, gamma C R - delta C)`.
pub fn lv_rhs(state: [f64; 2], p: &LvParams) -> Result<[f64; 2]> {
    let [prey, predator] = state;
    if !(prey.is_finite() && predator.is_finite()) {
        return Err(Error::NonFiniteState {
            context: format!("in Lotka-Volterra state {state:?}"),
        });
    }
    Ok([
        p.alpha * prey - p.beta * prey * predator,
        p.gamma * predator * prey - p.delta * predator,
    ])
}

pub fn exp_rhs(y: f64) -> f64 {
    y
}
