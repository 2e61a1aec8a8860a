//! Built-in operators: the doubling kernel on the circle, the kernel on
//! `[-2,-1] ∪ [0,1]` driven by a Smith-Volterra-Cantor construction, and
//! translation on the real line.

pub mod circle;
pub mod svc;
pub mod translation;

pub use circle::{ex1_closed_form, ex1_kernel, hat_field, CircleDoubling};
pub use svc::{classify, ex2_kernel, svc_build, t_eval, Ex2Kernel, Interval, SvcClassification, SvcTree, TValue};
pub use translation::{bump_field, bump_value, remark1_gap};
