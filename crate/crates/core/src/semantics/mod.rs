//! Finite product and dependent-product models, satisfaction, the decreasing
//! condition, exhaustive small-model search and the model exchange formats.

mod bits;
mod enumerate;
mod eval;
mod exchange;
mod model;

pub use enumerate::{
    enumerate_models, find_countermodel_bruteforce, find_decreasing_countermodel, find_satisfying, Bounds, ModelSpace,
};
pub use eval::{eval, eval_strict, eval_surface, eval_with, is_valid_on, NominalPolicy, SemanticsError};
pub use exchange::{
    model_from_json, model_to_json, nominal_world_name, parse_model, parse_model_json, parse_model_text,
    render_model_json, render_model_text, ExchangeError, ModelFile, ModelJson, R2Json,
};
pub use model::{is_decreasing, FrameKind, Kripke, KripkeDProduct, KripkeProduct, Model, Relation, Valuation, WorldPair};
