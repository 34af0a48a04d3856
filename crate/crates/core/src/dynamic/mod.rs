//! Time-varying edge weights with a controller that keeps a squared-weight
//! free energy non-increasing, and the frame-by-frame re-solving baseline.

mod energy;
mod sim;
mod system;

pub use energy::{alpha, control_law, controlled_energy_rate, energy, energy_rate, phi_matrix, ControlUpdate};
pub use sim::{frame_by_frame, simulate, write_sim_csv, SimRecord, SimStatus, SimTrace};
pub use system::{DynamicSystem, SystemSpec, DEFAULT_U0};
