//! Planning and simulation of seamless handoff across heterogeneous radio
//! access networks (WLAN, UMTS, WiMAX).
//!
//! The crate is layered. [`environment`] computes received signal strength
//! along a route; [`topology`] turns that into coverage intervals and a
//! directed graph; [`planner`] picks the attachment sequence with the fewest
//! handovers. At run time [`handoff`] decides when to move, [`netres`]
//! tracks load and admission, [`execmodel`] prices each move, and [`sim`]
//! ties it together tick by tick.
//!
//! ```
//! use hetsim::environment::{AccessPoint, Point, Route, Technology};
//! use hetsim::scenario::ScenarioConfig;
//!
//! let route = Route::new(vec![Point::new(0.0, 0.0), Point::new(200.0, 0.0)], 10.0).unwrap();
//! let cell = AccessPoint::new("cell", Technology::Umts, Point::new(100.0, 50.0));
//! let out = hetsim::sim::run(&ScenarioConfig::new("demo", route, vec![cell], 1)).unwrap();
//! assert_eq!(out.metrics.coverage_fraction, 1.0);
//! assert_eq!(out.metrics.handoff_count(), 0);
//! ```

pub mod audit;
pub mod config;
pub mod environment;
pub mod execmodel;
pub mod handoff;
pub mod netres;
pub mod planner;
pub mod report;
pub mod scenario;
pub mod sim;
pub mod sweep;
pub mod topology;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/scenario-files.md")]
    mod scenario_files {}
    #[doc = include_str!("../../../book/src/radio.md")]
    mod radio {}
    #[doc = include_str!("../../../book/src/planning.md")]
    mod planning {}
    #[doc = include_str!("../../../book/src/handoff.md")]
    mod handoff {}
    #[doc = include_str!("../../../book/src/resources.md")]
    mod resources {}
    #[doc = include_str!("../../../book/src/execution.md")]
    mod execution {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
