//! Models as concrete counter-system paths.

use std::collections::HashMap;

use serde::Serialize;

use super::encode::{SmtQuery, Symbols};
use super::SmtError;
use crate::counter::{apply, Configuration, Transition};
use crate::eltl::{Lasso, LassoError};
use crate::ta::ThresholdAutomaton;

/// Parameter values, every frame, and the transition taken between frames.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodedModel {
    pub params: Vec<i64>,
    pub frames: Vec<Configuration>,
    pub steps: Vec<Transition>,
    pub loop_start: Option<usize>,
}

impl DecodedModel {
    pub fn from_values(q: &SmtQuery, values: &HashMap<String, i64>) -> Result<Self, SmtError> {
        let ta = q.ta();
        let s = Symbols::new(ta);
        let get = |name: String| values.get(&name).copied().ok_or(SmtError::MissingValue(name));
        let params = (0..ta.params.len()).map(|i| get(s.param(i))).collect::<Result<Vec<_>, _>>()?;
        let mut frames = Vec::new();
        for f in 0..=q.last_frame() {
            let kappa = (0..ta.locations.len()).map(|l| get(s.kappa(f, l))).collect::<Result<_, _>>()?;
            let g = (0..ta.shared.len()).map(|v| get(s.shared(f, v))).collect::<Result<_, _>>()?;
            frames.push(Configuration { kappa, g, p: params.clone() });
        }
        let steps = q
            .steps()
            .iter()
            .enumerate()
            .map(|(i, &r)| get(s.factor(i + 1)).map(|k| Transition::new(r, k)))
            .collect::<Result<_, _>>()?;
        Ok(DecodedModel { params, frames, steps, loop_start: q.loop_start() })
    }

    /// Replays the steps from frame 0 and compares every frame.
    pub fn resimulate(&self, ta: &ThresholdAutomaton) -> Result<(), SmtError> {
        if !ta.admissible(&self.params) {
            return Err(SmtError::Mismatch { frame: 0, detail: "parameters not admissible".into() });
        }
        for (i, t) in self.steps.iter().enumerate() {
            let next = apply(ta, &self.frames[i], *t)
                .map_err(|e| SmtError::Mismatch { frame: i + 1, detail: e.to_string() })?;
            if next != self.frames[i + 1] {
                return Err(SmtError::Mismatch {
                    frame: i + 1,
                    detail: format!("expected {:?}, replay gives {:?}", self.frames[i + 1].kappa, next.kappa),
                });
            }
        }
        if let Some(ls) = self.loop_start {
            let last = self.frames.last().expect("at least one frame");
            if self.frames[ls] != *last {
                return Err(SmtError::Mismatch { frame: self.frames.len() - 1, detail: "loop not closed".into() });
            }
        }
        Ok(())
    }

    /// The model as a lasso whose positions coincide with frames
    /// `0..len`. A loop without steps becomes stuttering at its start.
    pub fn lasso(&self, ta: &ThresholdAutomaton) -> Result<Lasso, LassoError> {
        let ls = self.loop_start.unwrap_or(self.steps.len());
        let prefix = self.steps[..ls].to_vec();
        let cycle = self.steps[ls..].to_vec();
        Lasso::new(ta, &self.frames[0], prefix, cycle)
    }
}
