//! The policy response contract and its parser, the bounded repair loop,
//! and joint log-likelihood accounting.
//!
//! Responses are JSON:
//!
//! ```json
//! {
//!   "observation": "home screen with app icons",
//!   "thought": "open the notes app first",
//!   "action": {"type": "tap", "x": 176, "y": 1450},
//!   "expected_outcome": "screen_changes",
//!   "status": "continue",
//!   "logprobs": {"thought": -1.2, "action": -0.8}
//! }
//! ```
//!
//! `action` may be null only when `status` is "done". `expected_outcome`
//! and `logprobs` are optional.

use serde::{Deserialize, Serialize};

use crate::action::ActionSpec;
use crate::agent::history::{StepRecord, StepStatus};
use crate::agent::policy::PolicyClient;
use crate::agent::prompt::PromptBundle;
use crate::agent::{AgentError, PARSE_REPAIR_RETRIES};
use crate::geom::ScreenDims;

/// The policy's declared expectation for the step's effect on the screen,
/// checked by reflection against the observed delta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedOutcome {
    ScreenChanges,
    ScreenUnchanged,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("response is not valid JSON: {0}")]
    Json(String),
    #[error("unknown action type `{0}`; the action space is tap, swipe, text, back, exit")]
    UnknownAction(String),
    #[error("action params invalid: {0}")]
    BadParams(String),
    #[error("status `continue` requires an action")]
    MissingAction,
    #[error("logprobs must be finite and <= 0, got ({0}, {1})")]
    BadLogprobs(f64, f64),
    #[error("field `{0}` is missing or has the wrong type")]
    BadField(&'static str),
}

/// A parsed, validated policy decision (a step record minus its index).
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub observation: String,
    pub thought: String,
    pub action: Option<ActionSpec>,
    pub expected_outcome: Option<ExpectedOutcome>,
    pub status: StepStatus,
    pub component_logprobs: Option<(f64, f64)>,
}

impl Decision {
    pub fn into_record(self, index: u64) -> StepRecord {
        StepRecord {
            index,
            observation_summary: self.observation,
            thought: self.thought,
            env_action: self.action,
            expected_outcome: self.expected_outcome,
            status: self.status,
            component_logprobs: self.component_logprobs,
            suspected_wrong: false,
        }
    }
}

#[derive(Debug, Deserialize)]
struct WireLogprobs {
    thought: f64,
    action: f64,
}

#[derive(Debug, Deserialize)]
struct WireDecision {
    observation: String,
    thought: String,
    #[serde(default)]
    action: Option<serde_json::Value>,
    #[serde(default)]
    expected_outcome: Option<ExpectedOutcome>,
    status: String,
    #[serde(default)]
    logprobs: Option<WireLogprobs>,
}

const KNOWN_ACTIONS: [&str; 5] = ["tap", "swipe", "text", "back", "exit"];

/// Parse one raw policy response against the contract, validating action
/// parameters against the screen dimensions. A parsed unknown action type
/// never reaches the action engine.
pub fn parse_decision(raw: &str, dims: ScreenDims) -> Result<Decision, ParseError> {
    let wire: WireDecision =
        serde_json::from_str(raw).map_err(|e| ParseError::Json(e.to_string()))?;

    let status = match wire.status.as_str() {
        "continue" => StepStatus::Continue,
        "done" => StepStatus::Done,
        other => return Err(ParseError::BadParams(format!("unknown status `{other}`"))),
    };

    let action = match wire.action {
        None | Some(serde_json::Value::Null) => {
            if status == StepStatus::Continue {
                return Err(ParseError::MissingAction);
            }
            None
        }
        Some(value) => {
            let type_name = value
                .get("type")
                .and_then(|t| t.as_str())
                .ok_or(ParseError::BadField("action.type"))?
                .to_string();
            if !KNOWN_ACTIONS.contains(&type_name.as_str()) {
                return Err(ParseError::UnknownAction(type_name));
            }
            let action: ActionSpec = serde_json::from_value(value)
                .map_err(|e| ParseError::BadParams(e.to_string()))?;
            action
                .validate(dims)
                .map_err(|e| ParseError::BadParams(e.to_string()))?;
            Some(action)
        }
    };

    let component_logprobs = match wire.logprobs {
        None => None,
        Some(lp) => {
            if !lp.thought.is_finite()
                || !lp.action.is_finite()
                || lp.thought > 0.0
                || lp.action > 0.0
            {
                return Err(ParseError::BadLogprobs(lp.thought, lp.action));
            }
            Some((lp.thought, lp.action))
        }
    };

    Ok(Decision {
        observation: wire.observation,
        thought: wire.thought,
        action,
        expected_outcome: wire.expected_outcome,
        status,
        component_logprobs,
    })
}

/// Query the policy, re-prompting with the parse error appended up to
/// [`PARSE_REPAIR_RETRIES`] times before giving up.
pub fn decide_with_repair(
    policy: &mut dyn PolicyClient,
    bundle: &PromptBundle,
    dims: ScreenDims,
) -> Result<Decision, AgentError> {
    let mut attempt_bundle = bundle.clone();
    let mut last_error = String::new();
    for attempt in 0..=PARSE_REPAIR_RETRIES {
        let raw = policy.decide(&attempt_bundle)?;
        match parse_decision(&raw, dims) {
            Ok(decision) => return Ok(decision),
            Err(e) => {
                last_error = e.to_string();
                if attempt < PARSE_REPAIR_RETRIES {
                    attempt_bundle = bundle.with_repair(&last_error);
                }
            }
        }
    }
    Err(AgentError::ParseExhausted {
        retries: PARSE_REPAIR_RETRIES,
        last_error,
    })
}

/// Joint step log-likelihood: the action factorizes into thought and
/// environment components, so the joint is their exact sum.
pub fn joint_logprob(record: &StepRecord) -> Result<f64, AgentError> {
    let (lp_tht, lp_env) = record.component_logprobs.ok_or(AgentError::MissingLogprobs)?;
    Ok(lp_tht + lp_env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::history::StepStatus;

    const DIMS: ScreenDims = ScreenDims {
        width: 1080,
        height: 2400,
    };

    fn record_with_logprobs(lp: Option<(f64, f64)>) -> StepRecord {
        StepRecord {
            index: 0,
            observation_summary: String::new(),
            thought: String::new(),
            env_action: None,
            expected_outcome: None,
            status: StepStatus::Done,
            component_logprobs: lp,
            suspected_wrong: false,
        }
    }

    #[test]
    fn valid_tap_response_parses() {
        let raw = r#"{
            "observation": "home",
            "thought": "open notes",
            "action": {"type": "tap", "x": 100, "y": 200},
            "expected_outcome": "screen_changes",
            "status": "continue"
        }"#;
        let d = parse_decision(raw, DIMS).unwrap();
        assert_eq!(d.action, Some(ActionSpec::Tap { x: 100, y: 200 }));
        assert_eq!(d.status, StepStatus::Continue);
        assert_eq!(d.expected_outcome, Some(ExpectedOutcome::ScreenChanges));
    }

    #[test]
    fn done_without_action_is_terminal() {
        let raw = r#"{"observation": "o", "thought": "t", "action": null, "status": "done"}"#;
        let d = parse_decision(raw, DIMS).unwrap();
        assert_eq!(d.action, None);
        assert_eq!(d.status, StepStatus::Done);
    }

    #[test]
    fn continue_without_action_rejected() {
        let raw = r#"{"observation": "o", "thought": "t", "status": "continue"}"#;
        assert_eq!(parse_decision(raw, DIMS), Err(ParseError::MissingAction));
    }

    #[test]
    fn pinch_is_not_in_the_action_space() {
        let raw = r#"{
            "observation": "o", "thought": "t",
            "action": {"type": "pinch", "x": 1, "y": 2},
            "status": "continue"
        }"#;
        assert_eq!(
            parse_decision(raw, DIMS),
            Err(ParseError::UnknownAction("pinch".into()))
        );
    }

    #[test]
    fn out_of_bounds_tap_rejected() {
        let raw = r#"{
            "observation": "o", "thought": "t",
            "action": {"type": "tap", "x": 5000, "y": 2},
            "status": "continue"
        }"#;
        assert!(matches!(
            parse_decision(raw, DIMS),
            Err(ParseError::BadParams(_))
        ));
    }

    #[test]
    fn positive_logprobs_rejected() {
        let raw = r#"{
            "observation": "o", "thought": "t", "action": null, "status": "done",
            "logprobs": {"thought": 0.5, "action": -1.0}
        }"#;
        assert!(matches!(
            parse_decision(raw, DIMS),
            Err(ParseError::BadLogprobs(_, _))
        ));
    }

    #[test]
    fn joint_logprob_sums_components() {
        let r = record_with_logprobs(Some((-1.2, -0.8)));
        assert!((joint_logprob(&r).unwrap() - (-2.0)).abs() < 1e-15);
        let r = record_with_logprobs(Some((0.0, 0.0)));
        assert_eq!(joint_logprob(&r).unwrap(), 0.0);
        let r = record_with_logprobs(None);
        assert!(matches!(joint_logprob(&r), Err(AgentError::MissingLogprobs)));
    }

    #[test]
    fn repair_loop_appends_error_and_recovers() {
        use crate::agent::policy::PolicyClient;
        use crate::agent::prompt::PromptBundle;

        struct FlakyPolicy {
            calls: u32,
        }
        impl PolicyClient for FlakyPolicy {
            fn decide(&mut self, bundle: &PromptBundle) -> Result<String, crate::agent::PolicyError> {
                self.calls += 1;
                if self.calls == 1 {
                    Ok("not json".to_string())
                } else {
                    // The repair prompt must carry the previous parse error.
                    assert!(bundle.repair.is_some());
                    Ok(r#"{"observation":"o","thought":"t","action":null,"status":"done"}"#
                        .to_string())
                }
            }
        }

        let bundle = PromptBundle::for_test("do it");
        let mut policy = FlakyPolicy { calls: 0 };
        let d = decide_with_repair(&mut policy, &bundle, DIMS).unwrap();
        assert_eq!(d.status, StepStatus::Done);
        assert_eq!(policy.calls, 2);
    }

    #[test]
    fn repair_loop_gives_up_after_bounded_retries() {
        use crate::agent::policy::PolicyClient;
        use crate::agent::prompt::PromptBundle;

        struct BrokenPolicy {
            calls: u32,
        }
        impl PolicyClient for BrokenPolicy {
            fn decide(&mut self, _: &PromptBundle) -> Result<String, crate::agent::PolicyError> {
                self.calls += 1;
                Ok("garbage".to_string())
            }
        }

        let bundle = PromptBundle::for_test("do it");
        let mut policy = BrokenPolicy { calls: 0 };
        let err = decide_with_repair(&mut policy, &bundle, DIMS).unwrap_err();
        assert!(matches!(err, AgentError::ParseExhausted { retries: 2, .. }));
        assert_eq!(policy.calls, 3); // initial + 2 repairs
    }
}
