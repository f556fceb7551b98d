//! Contact trajectory synthesis: taps and swipes as hover/contact/hover
//! waypoint sequences, and the inverse mapping back to screen-space touch
//! traces.

use serde::{Deserialize, Serialize};

use crate::arm::calibration::{CalibrationMap, WorkspaceBounds, WsPoint};
use crate::arm::ArmError;
use crate::geom::PxPoint;
use crate::sim::gesture::{TouchSample, TouchTrace};

/// Milliseconds the contact phase of a tap holds on the glass.
pub const TAP_DWELL_MS: f64 = 80.0;
/// Swipe contact sampling: one intermediate sample per this many pixels,
/// with a floor of [`SWIPE_MIN_INNER_SAMPLES`].
pub const SWIPE_PX_PER_SAMPLE: f64 = 40.0;
pub const SWIPE_MIN_INNER_SAMPLES: usize = 8;
/// Nominal end-effector travel speed used only to time trace samples, mm/ms.
const TRAVEL_MM_PER_MS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryKind {
    Tap,
    Swipe,
}

/// One arm pose: workspace position, height, and how long to hold there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub dwell_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactTrajectory {
    pub kind: TrajectoryKind,
    pub waypoints: Vec<Waypoint>,
}

impl ContactTrajectory {
    /// Check the structural invariant: starts and ends hovering, with one
    /// contiguous contact phase in between, at least 4 waypoints total.
    pub fn check_structure(&self, map: &CalibrationMap) -> bool {
        if self.waypoints.len() < 4 {
            return false;
        }
        let at_hover = |w: &Waypoint| (w.z - map.z_hover).abs() < 1e-9;
        let at_contact = |w: &Waypoint| (w.z - map.z_contact).abs() < 1e-9;
        let first = self.waypoints.first().unwrap();
        let last = self.waypoints.last().unwrap();
        if !at_hover(first) || !at_hover(last) {
            return false;
        }
        // hover+ contact+ hover+ with nothing else
        let mut phase = 0; // 0 = leading hover, 1 = contact, 2 = trailing hover
        for w in &self.waypoints {
            if at_hover(w) {
                if phase == 1 {
                    phase = 2;
                }
            } else if at_contact(w) {
                match phase {
                    0 => phase = 1,
                    1 => {}
                    _ => return false, // second contact phase
                }
            } else {
                return false; // z must be exactly hover or contact
            }
        }
        phase == 2
    }
}

/// Plans trajectories against one calibrated device. Immutable and cheap to
/// share; planning is pure.
#[derive(Debug, Clone)]
pub struct TouchPlanner {
    map: CalibrationMap,
    bounds: WorkspaceBounds,
}

impl TouchPlanner {
    pub fn new(map: CalibrationMap, bounds: WorkspaceBounds) -> Self {
        Self { map, bounds }
    }

    pub fn map(&self) -> &CalibrationMap {
        &self.map
    }

    pub fn bounds(&self) -> &WorkspaceBounds {
        &self.bounds
    }

    /// Apply the calibration, rejecting targets outside the workspace.
    /// Out-of-reach is an error, never a clamp: a clamped touch would land
    /// on the wrong element.
    pub fn pixel_to_workspace(&self, p: PxPoint) -> Result<WsPoint, ArmError> {
        let w = self.map.apply(p);
        if !self.bounds.contains(w) {
            return Err(ArmError::OutOfReach {
                px: p.x,
                py: p.y,
                wx: w.x,
                wy: w.y,
            });
        }
        Ok(w)
    }

    /// Tap: hover above the target, descend, dwell, lift.
    pub fn plan_tap(&self, p: PxPoint) -> Result<ContactTrajectory, ArmError> {
        let w = self.pixel_to_workspace(p)?;
        let (zc, zh) = (self.map.z_contact, self.map.z_hover);
        Ok(ContactTrajectory {
            kind: TrajectoryKind::Tap,
            waypoints: vec![
                Waypoint { x: w.x, y: w.y, z: zh, dwell_ms: 0.0 },
                Waypoint { x: w.x, y: w.y, z: zc, dwell_ms: TAP_DWELL_MS },
                Waypoint { x: w.x, y: w.y, z: zc, dwell_ms: 0.0 },
                Waypoint { x: w.x, y: w.y, z: zh, dwell_ms: 0.0 },
            ],
        })
    }

    /// Swipe: hover at start, touch down, drag linearly to the end with at
    /// least [`SWIPE_MIN_INNER_SAMPLES`] intermediate contact samples, lift.
    pub fn plan_swipe(&self, start: PxPoint, end: PxPoint) -> Result<ContactTrajectory, ArmError> {
        let dist_px = start.dist(&end);
        if dist_px < 1e-9 {
            return Err(ArmError::DegenerateSwipe);
        }
        let ws_start = self.pixel_to_workspace(start)?;
        let ws_end = self.pixel_to_workspace(end)?;
        let (zc, zh) = (self.map.z_contact, self.map.z_hover);

        let inner = ((dist_px / SWIPE_PX_PER_SAMPLE).ceil() as usize).max(SWIPE_MIN_INNER_SAMPLES);
        let mut waypoints = Vec::with_capacity(inner + 4);
        waypoints.push(Waypoint { x: ws_start.x, y: ws_start.y, z: zh, dwell_ms: 0.0 });
        waypoints.push(Waypoint { x: ws_start.x, y: ws_start.y, z: zc, dwell_ms: 0.0 });
        for i in 1..=inner {
            let t = i as f64 / (inner + 1) as f64;
            waypoints.push(Waypoint {
                x: ws_start.x + (ws_end.x - ws_start.x) * t,
                y: ws_start.y + (ws_end.y - ws_start.y) * t,
                z: zc,
                dwell_ms: 0.0,
            });
        }
        waypoints.push(Waypoint { x: ws_end.x, y: ws_end.y, z: zc, dwell_ms: 0.0 });
        waypoints.push(Waypoint { x: ws_end.x, y: ws_end.y, z: zh, dwell_ms: 0.0 });
        Ok(ContactTrajectory {
            kind: TrajectoryKind::Swipe,
            waypoints,
        })
    }

    /// Inverse-map a trajectory into the touch trace it produces on the
    /// glass: contact-phase waypoints become contact samples, hover samples
    /// carry contact=false. Sample times follow the nominal travel speed and
    /// dwell, kept strictly increasing.
    pub fn trace_of(&self, traj: &ContactTrajectory) -> Result<TouchTrace, ArmError> {
        let mut samples = Vec::with_capacity(traj.waypoints.len());
        let mut t = 0.0f64;
        let mut prev: Option<&Waypoint> = None;
        for w in &traj.waypoints {
            if let Some(p) = prev {
                let d = ((w.x - p.x).powi(2) + (w.y - p.y).powi(2) + (w.z - p.z).powi(2)).sqrt();
                t += (d / TRAVEL_MM_PER_MS).max(1.0);
            }
            let contact = (w.z - self.map.z_contact).abs() < 1e-9;
            let pixel = self.map.invert(WsPoint::new(w.x, w.y))?;
            samples.push(TouchSample {
                point: pixel,
                contact,
                time_offset_ms: t,
            });
            t += w.dwell_ms;
            prev = Some(w);
        }
        Ok(TouchTrace::new(samples))
    }
}
