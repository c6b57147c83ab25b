//! Numerical geometry of slant Riemannian submersions from cosymplectic
//! manifolds.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod connection;
pub mod contact;
pub mod diff;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod manifold;
pub mod sampling;
pub mod scenario;
pub mod slant;
pub mod submersion;

pub use check::{Check, CheckSet};
pub use connection::{ChristoffelSample, LeviCivita, RiemannTensor};
pub use check::Report;
pub use contact::{AlmostContactStructure, StructureReport};
pub use diff::{DiffConfig, DiffScheme};
pub use error::{GeometryError, Result};
pub use manifold::{
    DomainBox, EndomorphismField, ManifoldModel, MetricField, OneFormField, Point, ScalarField,
    VectorField,
};
pub use submersion::{SubmersionMap, VerticalHorizontalSplit};
pub use scenario::{load_scenario, load_scenario_unchecked, Scenario, ScenarioError, ScenarioSpec};
pub use slant::{SlantReport, Verdict, XiPosition};
