//! Second-quantization linear-optics engine.
//!
//! * [`fock`]: sparse multimode Fock states.
//! * [`optics`]: beam splitters, phase shifters, coherent sources, circuits.
//! * [`twc`]: the three-path interferometer with coherent reference beams.
//! * [`detection`]: post-selected coincidences and amplitude decomposition.
//! * [`afshar`]: two-slit polarization imaging with an absorbing wire.
//! * [`cqed`]: virtual-state effective couplings and the two-atom cavity check.

pub mod afshar;
pub mod cqed;
pub mod detection;
pub mod error;
pub mod fock;
pub mod optics;
pub mod twc;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
