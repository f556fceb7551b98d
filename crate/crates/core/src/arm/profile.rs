//! Device profile file: screen dims, workspace bounds, contact heights, and
//! the calibration correspondences for one physical (or simulated) device.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::arm::calibration::{fit_calibration, CalibrationMap, WorkspaceBounds, WsPoint};
use crate::arm::trajectory::TouchPlanner;
use crate::arm::ArmError;
use crate::geom::{PxPoint, ScreenDims};

pub const PROFILE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correspondence {
    /// Pixel coordinates on the mirrored screen.
    pub pixel: [f64; 2],
    /// Matching workspace coordinates, mm.
    pub workspace: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceProfile {
    pub profile_version: u32,
    pub device_id: String,
    pub dims: ScreenDims,
    pub workspace: WorkspaceBounds,
    pub z_contact: f64,
    pub z_hover: f64,
    pub correspondences: Vec<Correspondence>,
}

impl DeviceProfile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ArmError> {
        let raw = fs::read_to_string(path)?;
        let profile: DeviceProfile =
            serde_json::from_str(&raw).map_err(|e| ArmError::ProfileFormat(e.to_string()))?;
        if profile.profile_version != PROFILE_VERSION {
            return Err(ArmError::ProfileFormat(format!(
                "unsupported profile_version {}",
                profile.profile_version
            )));
        }
        Ok(profile)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ArmError> {
        let raw = serde_json::to_string_pretty(self).expect("profile serializes");
        fs::write(path, raw)?;
        Ok(())
    }

    /// Fit the calibration recorded in the profile.
    pub fn calibrate(&self) -> Result<CalibrationMap, ArmError> {
        let pts: Vec<(PxPoint, WsPoint)> = self
            .correspondences
            .iter()
            .map(|c| {
                (
                    PxPoint::new(c.pixel[0], c.pixel[1]),
                    WsPoint::new(c.workspace[0], c.workspace[1]),
                )
            })
            .collect();
        fit_calibration(&pts, self.z_contact, self.z_hover)
    }

    pub fn planner(&self) -> Result<TouchPlanner, ArmError> {
        Ok(TouchPlanner::new(self.calibrate()?, self.workspace))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn save_load_calibrate() {
        let profile = DeviceProfile {
            profile_version: 1,
            device_id: "test".into(),
            dims: ScreenDims::new(100, 200),
            workspace: WorkspaceBounds {
                x_min: 0.0,
                x_max: 10.0,
                y_min: 0.0,
                y_max: 20.0,
            },
            z_contact: 1.0,
            z_hover: 9.0,
            correspondences: vec![
                Correspondence { pixel: [0.0, 0.0], workspace: [0.0, 0.0] },
                Correspondence { pixel: [100.0, 0.0], workspace: [10.0, 0.0] },
                Correspondence { pixel: [0.0, 200.0], workspace: [0.0, 20.0] },
            ],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("device.json");
        profile.save(&path).unwrap();
        let loaded = DeviceProfile::load(&path).unwrap();
        assert_eq!(loaded, profile);
        let map = loaded.calibrate().unwrap();
        assert!(map.residual < 1e-9);
        let w = map.apply(PxPoint::new(50.0, 100.0));
        assert!((w.x - 5.0).abs() < 1e-9 && (w.y - 10.0).abs() < 1e-9);
    }
}
