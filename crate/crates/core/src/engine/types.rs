use std::fmt;

use serde::{Deserialize, Serialize};

use crate::syntax::{CoreFormula, Dim, Nominal};

/// Which calculus to run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[default]
    #[serde(rename = "hpl")]
    Hpl,
    #[serde(rename = "hdpl")]
    Hdpl,
    #[serde(rename = "hdpl-dec")]
    HdplDec,
}

impl Mode {
    pub fn is_dependent(self) -> bool {
        !matches!(self, Mode::Hpl)
    }

    pub fn frame_kind(self) -> crate::semantics::FrameKind {
        if self.is_dependent() {
            crate::semantics::FrameKind::DProduct
        } else {
            crate::semantics::FrameKind::Product
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Hpl => "hpl",
            Mode::Hdpl => "hdpl",
            Mode::HdplDec => "hdpl-dec",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hpl" => Ok(Mode::Hpl),
            "hdpl" => Ok(Mode::Hdpl),
            "hdpl-dec" => Ok(Mode::HdplDec),
            other => Err(format!("unknown mode `{other}` (expected hpl, hdpl or hdpl-dec)")),
        }
    }
}

/// The prefix structure of a branch formula: `@i @a body` or `@s body`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Shape {
    Double { first: Nominal, second: Nominal, body: CoreFormula },
    Single { prefix: Nominal, body: CoreFormula },
}

impl Shape {
    pub fn double(first: Nominal, second: Nominal, body: CoreFormula) -> Self {
        debug_assert!(first.dim == Dim::One && second.dim == Dim::Two);
        Shape::Double { first, second, body }
    }

    pub fn single(prefix: Nominal, body: CoreFormula) -> Self {
        Shape::Single { prefix, body }
    }

    pub fn body(&self) -> &CoreFormula {
        match self {
            Shape::Double { body, .. } | Shape::Single { body, .. } => body,
        }
    }

    /// The same prefix with `body` replaced.
    pub fn with_body(&self, body: CoreFormula) -> Shape {
        match *self {
            Shape::Double { first, second, .. } => Shape::Double { first, second, body },
            Shape::Single { prefix, .. } => Shape::Single { prefix, body },
        }
    }

    /// Prefix nominals then body nominals, left to right.
    pub fn nominals_in_order(&self) -> Vec<Nominal> {
        let mut out = match self {
            Shape::Double { first, second, .. } => vec![*first, *second],
            Shape::Single { prefix, .. } => vec![*prefix],
        };
        self.body().visit_nominals(&mut |n| out.push(n));
        out
    }

    /// The formula this shape stands for.
    pub fn to_formula(&self) -> CoreFormula {
        match self {
            Shape::Double { first, second, body } => CoreFormula::at(*first, CoreFormula::at(*second, body.clone())),
            Shape::Single { prefix, body } => CoreFormula::at(*prefix, body.clone()),
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleId {
    Root,
    NegNeg,
    And,
    NegAnd,
    Dia1,
    Dia2,
    NegDia1,
    NegDia2,
    At1,
    At2,
    NegAt1,
    NegAt2,
    Red1,
    Red2,
    Neg1,
    Neg2,
    Id1,
    Id2,
    IdP1,
    IdP2,
    Dia2d,
    NegDia2d,
    Dec,
    /// `@i <1>j` and `@j k` give `@i <1>k`; only with `Dec`.
    Bridge,
    DerivedBox1,
    DerivedBox2,
    DerivedOr,
    DerivedImplies,
}

impl RuleId {
    /// Rules that consume their diamond premise and allocate a nominal.
    pub fn is_diamond(self) -> bool {
        matches!(self, RuleId::Dia1 | RuleId::Dia2 | RuleId::Dia2d)
    }

    pub fn is_fork(self) -> bool {
        matches!(self, RuleId::NegAnd | RuleId::DerivedOr | RuleId::DerivedImplies)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A formula on a branch with its provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchFormula {
    pub shape: Shape,
    /// Set on `@i @a <2>b` links made by `Dia2d` or `Dec`.
    pub accessibility: bool,
    pub rule: RuleId,
    pub step: usize,
}

/// A rule together with the branch indices of its premises. `fresh` names
/// the dimension of the nominal the rule allocates, if any.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RuleInstance {
    pub rule: RuleId,
    pub premises: Vec<usize>,
    pub fresh: Option<Dim>,
}

impl RuleInstance {
    pub fn new(rule: RuleId, premises: Vec<usize>) -> Self {
        let fresh = match rule {
            RuleId::Dia1 => Some(Dim::One),
            RuleId::Dia2 | RuleId::Dia2d => Some(Dim::Two),
            _ => None,
        };
        RuleInstance { rule, premises, fresh }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Open,
    /// Indices of the clashing pair; the second is the later formula.
    Closed(usize, usize),
}

/// Rule-application and nominal limits for one run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_rule_applications: usize,
    pub max_nominals_per_dim: usize,
}

impl Budget {
    pub fn new(max_rule_applications: usize, max_nominals_per_dim: usize) -> Self {
        assert!(max_rule_applications > 0 && max_nominals_per_dim > 0, "budget limits must be positive");
        Budget { max_rule_applications, max_nominals_per_dim }
    }

    pub fn applications(max_rule_applications: usize) -> Self {
        Budget { max_rule_applications, ..Budget::default() }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_rule_applications: 10_000, max_nominals_per_dim: 500 }
    }
}

/// One rule application as recorded in the trace. A fork yields one record
/// per child with the same step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: usize,
    pub branch: usize,
    pub rule: RuleId,
    pub premises: Vec<usize>,
    pub added: Vec<String>,
    pub accessibility: bool,
    pub fresh: Option<String>,
}
