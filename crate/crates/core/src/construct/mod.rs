//! Deterministic test-set constructions.

pub mod family;
pub mod magnify;
pub mod normal;
pub mod quantizer;
pub mod semigroup;
pub mod target;
pub mod translate;

pub use family::{
    family_test_sets, Family, FamilyConfig, FamilyMode, MemberCertificate, Screening,
};
pub use magnify::{
    magnify_test_set, GrowthFit, MagnifyCertificate, MagnifyConfig, MagnifyShell, MagnifyTestSet,
};
pub use normal::Normalization;
pub use quantizer::{greedy_quantizer, tiled_quantizer, Quantized, ShellBudget, ShellRecord};
pub use semigroup::{avoidance_set, semigroup, union_test_set, UnionTestSet};
pub use target::{FnTarget, SmoothTarget, Target};
pub use translate::{
    translate_test_set, translate_test_set_with, TranslateCertificate, TranslateShell,
    TranslateTestSet,
};
