pub mod apply;
pub mod ast;
pub mod normal;
pub mod parse;
pub mod pochhammer;

pub use apply::{apply_expr, apply_normal_form, geometry_class};
pub use ast::{Expr, Gen};
pub use normal::{nf_equal, normalize, ord_degree, CurvatureClass, NormalForm, OrdDegree};
pub use parse::parse;
