//! Policy clients: the scripted oracle, a seeded random baseline, and the
//! remote chat-completion service.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;

use crate::action::{ActionSpec, SwipeDistance};
use crate::agent::prompt::PromptBundle;
use crate::geom::Direction;

/// Environment variables configuring the remote policy service.
pub const ENV_POLICY_URL: &str = "TAPRIG_POLICY_URL";
pub const ENV_POLICY_MODEL: &str = "TAPRIG_POLICY_MODEL";
pub const ENV_POLICY_API_KEY: &str = "TAPRIG_POLICY_API_KEY";

#[derive(Debug, thiserror::Error)]
pub enum PolicyError {
    #[error("policy service unreachable: {0}")]
    Unreachable(String),
    #[error("policy service returned status {0}")]
    BadStatus(u16),
    #[error("policy service payload malformed: {0}")]
    BadPayload(String),
    #[error("policy misconfigured: {0}")]
    Config(String),
}

/// A decision source. Given identical (history, observation, seed) the
/// scripted and random implementations are deterministic.
pub trait PolicyClient {
    fn decide(&mut self, prompt: &PromptBundle) -> Result<String, PolicyError>;
}

fn wire_response(
    observation: &str,
    thought: &str,
    action: Option<&ActionSpec>,
    expected_changes: bool,
    done: bool,
    logprobs: (f64, f64),
) -> String {
    json!({
        "observation": observation,
        "thought": thought,
        "action": action.map(|a| serde_json::to_value(a).expect("action serializes")),
        "expected_outcome": if expected_changes { "screen_changes" } else { "screen_unchanged" },
        "status": if done { "done" } else { "continue" },
        "logprobs": {"thought": logprobs.0, "action": logprobs.1},
    })
    .to_string()
}

/// Replays a golden trajectory verbatim, declaring done on its final action.
/// Ignores the prompt contents beyond bookkeeping.
#[derive(Debug, Clone)]
pub struct ScriptedPolicy {
    actions: Vec<ActionSpec>,
    cursor: usize,
}

impl ScriptedPolicy {
    pub fn new(actions: Vec<ActionSpec>) -> Self {
        Self { actions, cursor: 0 }
    }
}

impl PolicyClient for ScriptedPolicy {
    fn decide(&mut self, prompt: &PromptBundle) -> Result<String, PolicyError> {
        if self.cursor >= self.actions.len() {
            // Past the end of the script: report completion.
            return Ok(wire_response(
                "script exhausted",
                "the trajectory is complete",
                None,
                false,
                true,
                (0.0, 0.0),
            ));
        }
        let action = self.actions[self.cursor].clone();
        self.cursor += 1;
        let done = self.cursor == self.actions.len();
        Ok(wire_response(
            &format!("screen at step {}", prompt.step_index + 1),
            &format!("golden step {}", self.cursor),
            Some(&action),
            true,
            done,
            (0.0, 0.0),
        ))
    }
}

/// Uniform-ish random baseline over the action space, fully determined by
/// its seed. Never emits text actions (they need a visible keyboard).
#[derive(Debug, Clone)]
pub struct RandomPolicy {
    rng: ChaCha8Rng,
    max_steps: u32,
    emitted: u32,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_steps: u32::MAX,
            emitted: 0,
        }
    }

    fn random_action(&mut self, w: u32, h: u32) -> ActionSpec {
        let dirs = [Direction::Up, Direction::Down, Direction::Left, Direction::Right];
        let dists = [SwipeDistance::Short, SwipeDistance::Medium, SwipeDistance::Long];
        for _ in 0..16 {
            let roll: f64 = self.rng.gen();
            if roll < 0.55 {
                return ActionSpec::Tap {
                    x: self.rng.gen_range(0..w as i32),
                    y: self.rng.gen_range(0..h as i32),
                };
            } else if roll < 0.80 {
                let direction = dirs[self.rng.gen_range(0..dirs.len())];
                let distance = dists[self.rng.gen_range(0..dists.len())];
                let x = self.rng.gen_range(0..w as i32);
                let y = self.rng.gen_range(0..h as i32);
                let candidate = ActionSpec::Swipe { x, y, direction, distance };
                // Keep only swipes whose endpoint stays on screen.
                if crate::action::resolve_swipe(
                    x,
                    y,
                    direction,
                    distance,
                    crate::geom::ScreenDims::new(w, h),
                )
                .is_ok()
                {
                    return candidate;
                }
            } else if roll < 0.92 {
                return ActionSpec::Back;
            } else {
                return ActionSpec::Exit;
            }
        }
        ActionSpec::Back
    }
}

impl PolicyClient for RandomPolicy {
    fn decide(&mut self, prompt: &PromptBundle) -> Result<String, PolicyError> {
        self.emitted += 1;
        let lp = (
            -(self.rng.gen::<f64>() * 3.0 + 0.01),
            -(self.rng.gen::<f64>() * 3.0 + 0.01),
        );
        let done = self.emitted >= self.max_steps || self.rng.gen::<f64>() < 0.04;
        if done {
            return Ok(wire_response(
                "random stop",
                "giving up",
                None,
                false,
                true,
                lp,
            ));
        }
        let action = self.random_action(prompt.screen_width, prompt.screen_height);
        Ok(wire_response(
            &format!("random look at step {}", prompt.step_index + 1),
            "acting at random",
            Some(&action),
            true,
            false,
            lp,
        ))
    }
}

#[derive(Debug, Deserialize)]
struct ChatChoiceMessage {
    content: String,
}

#[derive(Debug, Deserialize)]
struct ChatChoice {
    message: ChatChoiceMessage,
}

#[derive(Debug, Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

/// Chat-completion-style HTTP policy. Temperature is fixed to 0 for
/// reproducibility.
#[derive(Debug, Clone)]
pub struct RemotePolicy {
    base_url: String,
    model: String,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
}

impl RemotePolicy {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>, api_key: Option<String>) -> Self {
        Self {
            base_url: base_url.into(),
            model: model.into(),
            api_key,
            client: reqwest::blocking::Client::new(),
        }
    }

    /// Configuration from `TAPRIG_POLICY_URL` / `_MODEL` / `_API_KEY`.
    pub fn from_env() -> Result<Self, PolicyError> {
        let base_url = std::env::var(ENV_POLICY_URL)
            .map_err(|_| PolicyError::Config(format!("{ENV_POLICY_URL} is not set")))?;
        let model = std::env::var(ENV_POLICY_MODEL).unwrap_or_else(|_| "default".to_string());
        let api_key = std::env::var(ENV_POLICY_API_KEY).ok();
        Ok(Self::new(base_url, model, api_key))
    }
}

impl PolicyClient for RemotePolicy {
    fn decide(&mut self, prompt: &PromptBundle) -> Result<String, PolicyError> {
        let url = format!("{}/chat/completions", self.base_url.trim_end_matches('/'));
        let system = format!("{}\n{}", prompt.action_space_doc, prompt.response_contract_doc);
        let body = json!({
            "model": self.model,
            "temperature": 0,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": prompt.canonical_text()},
            ],
        });
        let mut req = self.client.post(&url).json(&body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req
            .send()
            .map_err(|e| PolicyError::Unreachable(e.to_string()))?;
        let status = resp.status();
        if !status.is_success() {
            return Err(PolicyError::BadStatus(status.as_u16()));
        }
        let parsed: ChatResponse = resp
            .json()
            .map_err(|e| PolicyError::BadPayload(e.to_string()))?;
        parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content)
            .ok_or_else(|| PolicyError::BadPayload("response has no choices".into()))
    }
}
