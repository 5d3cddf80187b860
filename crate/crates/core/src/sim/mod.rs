//! Discrete-event core: simulated clock, event queue and seeded randomness.

mod engine;
mod rng;
mod time;

pub use engine::{EventHandle, Process, Scheduler, Until};
pub use rng::{trial_seed, SeededRng};
pub use time::SimTime;
