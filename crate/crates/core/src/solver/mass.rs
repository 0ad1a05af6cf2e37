//! Boundary-condition layout and the scalar collocation mass blocks.

use serde::{Deserialize, Serialize};

use crate::beam::{BeamEnd, Discretization};
use crate::spline::BandedRows;

/// Kind of equation imposed for one field at one end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// Prescribed (here: fixed) motion.
    Dirichlet,
    /// Prescribed internal force or moment.
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndCondition {
    pub translation: Constraint,
    pub rotation: Constraint,
}

impl EndCondition {
    pub const CLAMPED: Self = Self { translation: Constraint::Dirichlet, rotation: Constraint::Dirichlet };
    /// Fixed position, moment-free.
    pub const HINGED: Self = Self { translation: Constraint::Dirichlet, rotation: Constraint::Neumann };
    pub const FREE: Self = Self { translation: Constraint::Neumann, rotation: Constraint::Neumann };
}

/// Named end supports used in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    Clamped,
    Hinged,
    Free,
}

impl Support {
    pub fn condition(self) -> EndCondition {
        match self {
            Self::Clamped => EndCondition::CLAMPED,
            Self::Hinged => EndCondition::HINGED,
            Self::Free => EndCondition::FREE,
        }
    }
}

impl std::str::FromStr for Support {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "clamped" => Ok(Self::Clamped),
            "hinged" => Ok(Self::Hinged),
            "free" => Ok(Self::Free),
            other => Err(format!("unknown support `{other}` (expected clamped, hinged or free)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryConditions {
    pub start: EndCondition,
    pub end: EndCondition,
}

impl BoundaryConditions {
    pub fn new(start: Support, end: Support) -> Self {
        Self { start: start.condition(), end: end.condition() }
    }

    pub fn at(&self, end: BeamEnd) -> EndCondition {
        match end {
            BeamEnd::Start => self.start,
            BeamEnd::End => self.end,
        }
    }

    /// True when both fields see the same constraint kind at each end.
    pub fn is_homogeneous(&self) -> bool {
        self.start.translation == self.start.rotation && self.end.translation == self.end.rotation
    }
}

/// Boundary combinations of the spectral study, by their translational
/// and rotational constraints at the two ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BcCombo {
    #[serde(rename = "DD")]
    DirichletDirichlet,
    #[serde(rename = "DN")]
    DirichletNeumann,
    #[serde(rename = "NN")]
    NeumannNeumann,
}

impl BcCombo {
    pub const ALL: [BcCombo; 3] = [Self::DirichletDirichlet, Self::DirichletNeumann, Self::NeumannNeumann];

    pub fn conditions(self) -> BoundaryConditions {
        match self {
            Self::DirichletDirichlet => BoundaryConditions::new(Support::Clamped, Support::Clamped),
            Self::DirichletNeumann => BoundaryConditions::new(Support::Clamped, Support::Free),
            Self::NeumannNeumann => BoundaryConditions::new(Support::Free, Support::Free),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::DirichletDirichlet => "DD",
            Self::DirichletNeumann => "DN",
            Self::NeumannNeumann => "NN",
        }
    }
}

impl std::str::FromStr for BcCombo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "DD" => Ok(Self::DirichletDirichlet),
            "DN" | "ND" => Ok(Self::DirichletNeumann),
            "NN" => Ok(Self::NeumannNeumann),
            other => Err(format!("unknown boundary combination `{other}` (expected DD, DN or NN)")),
        }
    }
}

/// `M_a` and `M_α`: D0 rows at interior and Dirichlet points, D1 rows at
/// Neumann ends. Neumann rows are divided by their diagonal entry so the
/// matrices carry unit diagonals at the ends.
#[derive(Debug, Clone, PartialEq)]
pub struct MassBlocks {
    pub m_a: BandedRows,
    pub m_alpha: BandedRows,
    /// `1 / D1[k, k]` per end, applied to Neumann right-hand sides.
    pub neumann_scale: [f64; 2],
}

impl MassBlocks {
    pub fn neumann_scale(&self, end: BeamEnd) -> f64 {
        match end {
            BeamEnd::Start => self.neumann_scale[0],
            BeamEnd::End => self.neumann_scale[1],
        }
    }

    pub fn dim(&self) -> usize {
        self.m_a.nrows()
    }
}

pub fn assemble_mass_blocks(disc: &Discretization, bcs: &BoundaryConditions) -> MassBlocks {
    let ops = &disc.ops;
    let n = disc.num_points();
    let mut m_a = ops.d0.clone();
    let mut m_alpha = ops.d0.clone();
    let mut neumann_scale = [0.0; 2];
    for (slot, end) in BeamEnd::BOTH.into_iter().enumerate() {
        let k = end.index(n);
        let scale = 1.0 / ops.d1.get(k, k);
        neumann_scale[slot] = scale;
        let (start, row) = ops.d1.row(k);
        let scaled: Vec<f64> = row.iter().map(|x| x * scale).collect();
        let cond = bcs.at(end);
        if cond.translation == Constraint::Neumann {
            m_a.replace_row(k, start, &scaled);
        }
        if cond.rotation == Constraint::Neumann {
            m_alpha.replace_row(k, start, &scaled);
        }
    }
    MassBlocks { m_a, m_alpha, neumann_scale }
}
