//! Three-axis single-contact arm model: pixel/workspace calibration and
//! contact trajectory synthesis for taps and swipes.

pub mod calibration;
pub mod profile;
pub mod trajectory;

pub use calibration::{fit_calibration, CalibrationMap, WorkspaceBounds};
pub use profile::DeviceProfile;
pub use trajectory::{ContactTrajectory, TouchPlanner, TrajectoryKind, Waypoint};

#[derive(Debug, thiserror::Error)]
pub enum ArmError {
    #[error("calibration needs at least 3 correspondences, got {0}")]
    TooFewPoints(usize),
    #[error("correspondence points are collinear; affine fit is rank-deficient")]
    CollinearPoints,
    #[error("z_hover ({hover} mm) must exceed z_contact ({contact} mm)")]
    BadZOrder { hover: f64, contact: f64 },
    #[error("calibration map is not invertible (|det| = {0:.3e})")]
    NonInvertible(f64),
    #[error(
        "pixel ({px:.1}, {py:.1}) maps to ({wx:.2}, {wy:.2}) mm, outside the workspace bounds"
    )]
    OutOfReach { px: f64, py: f64, wx: f64, wy: f64 },
    #[error("degenerate swipe: start and end coincide; plan a tap instead")]
    DegenerateSwipe,
    #[error("cannot read device profile: {0}")]
    ProfileIo(#[from] std::io::Error),
    #[error("device profile is malformed: {0}")]
    ProfileFormat(String),
}
