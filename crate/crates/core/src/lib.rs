//! Secure sensor data collection through a reflecting surface carried by a UAV.
//!
//! Ground sensors transmit a common message, the surface redirects it toward
//! a legitimate receiver (Bob) and an eavesdropper (Eve) listens. The crate
//! models the channels, designs the reflection phases and transmit weights,
//! plans the UAV path and evaluates secrecy rates by Monte-Carlo simulation.

pub mod beamform;
pub mod bounds;
pub mod channel;
pub mod config;
pub mod error;
pub mod geometry;
pub mod sim;
pub mod trajectory;
pub mod validate;

pub use config::{ScenarioConfig, Scheme};
pub use error::{Error, Result};
pub use geometry::{FlightPlan, IrsGrid, SensorField, Vec3};
pub use sim::{monte_carlo, run_scenario, sweep, AggregateResult, Scenario, SweepParam, TrialResult};
