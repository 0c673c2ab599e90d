//! Skew Laurent arithmetic and sections of twisted sheaves on the skew projective space.

mod linalg;
mod poly;
mod proj;

pub use poly::{monomial_label, pow_q, Exp, SkewLaurentPoly, SkewSpec};
pub use proj::{
    build_proj, gamma, graded_piece_basis, is_torsion, module_sheaf, serre_unit, twist, Chart, GammaDegree, GammaTable, GradedModulePresentation, ModuleSheaf, ProjSpace,
    SerreDegree, SerreReport, TwistedSheaf,
};
