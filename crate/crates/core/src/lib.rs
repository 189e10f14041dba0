//! Privacy-preserving multi-agent path finding on grid maps.
//!
//! Every real agent hides among `k - 1` mock agents (a *group*), the whole
//! group is planned for jointly, and, with a field of view of radius `r`,
//! sub-agents of different groups never come within sight of each other.
//! A post-processor then shortens the real agents' paths inside per-group
//! safe zones without giving anything away.

pub mod audit;
pub mod bench;
pub mod dispatch;
pub mod fixtures;
pub mod grid;
pub mod pipeline;
pub mod plan;
pub mod safezone;
pub mod search;

pub use dispatch::{AgentGroup, BroadcastGroup, CollisionRule, DispatchConfig, DispatchError};
pub use grid::{GridWorld, ScenarioEntry, Vertex};
pub use plan::JointPlan;
pub use search::{Failure, FailureReason, SolverKind, SolverProblem};
