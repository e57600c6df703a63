pub mod algebra;
pub mod error;
pub mod forms;
pub mod linalg;
pub mod module;
pub mod optim;
pub mod orthogonality;
pub mod report;
pub mod sampling;
pub mod suites;

pub use algebra::{AlgebraElement, AlgebraShape, State};
pub use error::{Error, Result};
pub use forms::{Factorization, FactorizationResult, FactorizeOptions, MultiForm};
pub use module::{AModuleMap, CLinearMap, ModuleMap, ModuleVector, ToleranceConfig};
pub use orthogonality::{OrthogonalityVerdict, Relation, SearchOptions, Witness};
pub use report::{MapFixture, ReplayCase, VerificationReport};
pub use suites::{run_suite, SuiteConfig};
