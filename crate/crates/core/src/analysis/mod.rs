//! Analyzers paired with the design types.
//!
//! | design            | analyzer                     |
//! |-------------------|------------------------------|
//! | `extreme_points`  | [`anova_screen`], [`manova`] |
//! | `sobol`, `LHS`    | [`fit_metamodel`]            |
//! | `OAT`             | [`oat_effects`]              |
//! | `sobol_indices`   | [`sobol_indices`]            |
//! | `fast`            | [`efast_indices`]            |

mod anova;
mod efast;
mod metamodel;
mod oat;
mod sobol;

pub use anova::{anova_one_way, anova_screen, manova, AnovaRow, ManovaResult, OneWayAnova, MAX_SCREEN_LEVELS};
pub use efast::{efast_indices, EfastIndexResult};
pub use metamodel::{
    fit_metamodel, predict_metamodel, response_curve, surface_grid, training_subset, GpConfig, GpModel, GpPrediction,
    SurfacePoint, MAX_TRAINING_POINTS,
};
pub use oat::{oat_effects, OatEffect};
pub use sobol::{sobol_indices, SobolAnalysis, SobolIndexResult};

use crate::config::DoeType;
use crate::statlib::StatError;

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("degenerate groups: {0}")]
    DegenerateGroups(String),
    #[error("factor {0} takes too many distinct levels for ANOVA screening; use a meta-model or index analyzer")]
    TooManyLevels(String),
    #[error("singular covariance: {0}")]
    SingularCovariance(String),
    #[error("results do not stem from an OAT design: {0}")]
    NotAnOatDesign(String),
    #[error("results do not stem from a Saltelli design: {0}")]
    NotASaltelliDesign(String),
    #[error("results do not stem from an eFAST design: {0}")]
    NotAnEfastDesign(String),
    #[error("metric {0} has zero variance")]
    ZeroVariance(String),
    #[error("factor {0} has no interval domain")]
    NonIntervalFactor(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Numeric(#[from] StatError),
}

/// Analyzer paired with each design type; `None` where analysis is not
/// implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Analyzer {
    Anova,
    MetaModel,
    Oat,
    SobolIndices,
    Efast,
}

impl Analyzer {
    pub const ALL: [Analyzer; 5] =
        [Analyzer::Anova, Analyzer::MetaModel, Analyzer::Oat, Analyzer::SobolIndices, Analyzer::Efast];

    pub fn for_design(doe: DoeType) -> Option<Analyzer> {
        match doe {
            DoeType::ExtremePoints => Some(Analyzer::Anova),
            DoeType::Sobol | DoeType::Lhs => Some(Analyzer::MetaModel),
            DoeType::Oat => Some(Analyzer::Oat),
            DoeType::SobolIndices => Some(Analyzer::SobolIndices),
            DoeType::Fast => Some(Analyzer::Efast),
            DoeType::DistributionAndDiscrete => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Analyzer::Anova => "anova",
            Analyzer::MetaModel => "metamodel",
            Analyzer::Oat => "oat",
            Analyzer::SobolIndices => "sobol",
            Analyzer::Efast => "efast",
        }
    }

    pub fn parse(s: &str) -> Option<Analyzer> {
        Analyzer::ALL.into_iter().find(|a| a.as_str() == s)
    }
}

impl std::fmt::Display for Analyzer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
