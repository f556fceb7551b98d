//! HTTP clients for remote grounding services (OCR and open-vocabulary icon
//! detection). The wire contract is a JSON POST carrying the content-
//! addressed image reference plus the query; the response is a list of
//! `{bbox, label, score}` detections.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::geom::BBox;
use crate::perception::{index_row_major, Grounder, IndexedBBox, PerceptionError};
use crate::sim::env::ScreenObservation;

/// Environment variables the client reads its configuration from.
pub const ENV_BASE_URL: &str = "TAPRIG_GROUNDING_URL";
pub const ENV_TOKEN: &str = "TAPRIG_GROUNDING_TOKEN";
pub const ENV_TIMEOUT_S: &str = "TAPRIG_GROUNDING_TIMEOUT_S";

pub const DEFAULT_TIMEOUT_S: f64 = 30.0;

#[derive(Debug, Serialize)]
struct GroundRequest<'a> {
    image_ref: &'a str,
    query: &'a str,
}

#[derive(Debug, Deserialize)]
struct Detection {
    bbox: [i32; 4],
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    #[allow(dead_code)]
    score: Option<f64>,
}

#[derive(Debug, Deserialize)]
struct GroundResponse {
    detections: Vec<Detection>,
}

/// Client for a remote grounding service. Safe to share across threads;
/// reqwest serializes in-flight requests internally per connection.
#[derive(Debug, Clone)]
pub struct RemoteGrounder {
    base_url: String,
    token: Option<String>,
    timeout: Duration,
    client: reqwest::blocking::Client,
}

impl RemoteGrounder {
    pub fn new(base_url: impl Into<String>, token: Option<String>, timeout_s: f64) -> Self {
        let timeout = Duration::from_secs_f64(timeout_s);
        Self {
            base_url: base_url.into(),
            token,
            timeout,
            client: reqwest::blocking::Client::builder()
                .timeout(timeout)
                .build()
                .expect("client construction cannot fail with these options"),
        }
    }

    /// Build a client from `TAPRIG_GROUNDING_URL` / `_TOKEN` / `_TIMEOUT_S`.
    pub fn from_env() -> Result<Self, PerceptionError> {
        let base_url = std::env::var(ENV_BASE_URL)
            .map_err(|_| PerceptionError::Unreachable(format!("{ENV_BASE_URL} is not set")))?;
        let token = std::env::var(ENV_TOKEN).ok();
        let timeout_s = std::env::var(ENV_TIMEOUT_S)
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_TIMEOUT_S);
        Ok(Self::new(base_url, token, timeout_s))
    }

    fn post(&self, path: &str, obs: &ScreenObservation, query: &str)
        -> Result<Vec<Detection>, PerceptionError>
    {
        let url = format!("{}/{}", self.base_url.trim_end_matches('/'), path);
        let mut req = self.client.post(&url).json(&GroundRequest {
            image_ref: obs.raster_ref.as_str(),
            query,
        });
        if let Some(token) = &self.token {
            req = req.bearer_auth(token);
        }
        let resp = req.send().map_err(|e| {
            if e.is_timeout() {
                PerceptionError::Timeout(self.timeout.as_secs_f64())
            } else {
                PerceptionError::Unreachable(e.to_string())
            }
        })?;
        let status = resp.status();
        if !status.is_success() {
            return Err(PerceptionError::BadStatus(status.as_u16()));
        }
        let parsed: GroundResponse = resp
            .json()
            .map_err(|e| PerceptionError::BadPayload(e.to_string()))?;
        Ok(parsed.detections)
    }
}

impl Grounder for RemoteGrounder {
    fn ground_text(
        &self,
        obs: &ScreenObservation,
        query: &str,
    ) -> Result<Vec<BBox>, PerceptionError> {
        if query.is_empty() {
            return Err(PerceptionError::EmptyQuery);
        }
        let detections = self.post("ground_text", obs, query)?;
        Ok(detections
            .into_iter()
            .map(|d| BBox::new(d.bbox[0], d.bbox[1], d.bbox[2], d.bbox[3]))
            .collect())
    }

    fn detect_icons(&self, obs: &ScreenObservation) -> Result<Vec<IndexedBBox>, PerceptionError> {
        let detections = self.post("detect_icons", obs, "")?;
        Ok(index_row_major(
            detections
                .into_iter()
                .map(|d| (BBox::new(d.bbox[0], d.bbox[1], d.bbox[2], d.bbox[3]), d.label))
                .collect(),
        ))
    }
}
