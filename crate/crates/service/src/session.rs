use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use qpmut_core::{wire, Result, Vertex};

use crate::ops::State;

/// sha256 of the normalized JSON rendering.
pub fn state_hash(state: &State) -> String {
    hex::encode(Sha256::digest(wire::to_normalized_string(&state.to_json()).as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<Vertex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arc: Option<String>,
}

#[derive(Debug, Clone)]
struct Entry {
    mv: Move,
    prior_hash: String,
    prior: State,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    initial: State,
    current: State,
    history: Vec<Entry>,
    truncation: usize,
}

impl Session {
    pub fn new(id: String, state: State, truncation: usize) -> Self {
        Session { id, initial: state.clone(), current: state, history: Vec::new(), truncation }
    }

    pub fn state(&self) -> &State {
        &self.current
    }

    pub fn hash(&self) -> String {
        state_hash(&self.current)
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn apply(&mut self, mv: Move) -> Result<()> {
        let next = self.current.mutate(mv.kind.as_deref(), mv.vertex, mv.arc.as_deref(), self.truncation)?;
        let prior = std::mem::replace(&mut self.current, next);
        self.history.push(Entry { mv, prior_hash: state_hash(&prior), prior });
        Ok(())
    }

    /// False when there is nothing to undo.
    pub fn undo(&mut self) -> bool {
        match self.history.pop() {
            Some(e) => {
                self.current = e.prior;
                true
            }
            None => false,
        }
    }

    /// Recomputes the current state from the initial one.
    pub fn replay(&self) -> Result<State> {
        self.history.iter().try_fold(self.initial.clone(), |s, e| {
            s.mutate(e.mv.kind.as_deref(), e.mv.vertex, e.mv.arc.as_deref(), self.truncation)
        })
    }

    pub fn view(&self) -> Value {
        json!({
            "id": self.id,
            "kind": self.current.kind(),
            "state": self.current.to_json(),
            "hash": self.hash(),
            "legal": self.current.legal_moves(),
            "depth": self.history.len(),
        })
    }

    pub fn history_json(&self) -> Value {
        let entries: Vec<Value> =
            self.history.iter().map(|e| json!({"op": "mutate", "params": e.mv, "prior_hash": e.prior_hash})).collect();
        json!({"id": self.id, "hash": self.hash(), "initial_hash": state_hash(&self.initial), "history": entries})
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            id: self.id.clone(),
            initial: self.initial.to_json(),
            moves: self.history.iter().map(|e| e.mv.clone()).collect(),
            truncation: self.truncation,
        }
    }

    pub fn restore(s: &Snapshot) -> Result<Session> {
        let mut session = Session::new(s.id.clone(), State::from_json(&s.initial)?, s.truncation);
        for mv in &s.moves {
            session.apply(mv.clone())?;
        }
        Ok(session)
    }
}

/// On-disk form: the initial state and the moves applied to it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Snapshot {
    pub id: String,
    pub initial: Value,
    pub moves: Vec<Move>,
    pub truncation: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a3() -> State {
        State::from_json(&json!({"vertices": [1, 2, 3], "arrows": [{"id": "a", "source": 1, "target": 2}, {"id": "b", "source": 2, "target": 3}]}))
            .unwrap()
    }

    #[test]
    fn undo_and_replay() {
        let mut s = Session::new("x".into(), a3(), 12);
        let h0 = s.hash();
        for v in [2, 1, 3] {
            s.apply(Move { kind: Some("fz".into()), vertex: Some(v), arc: None }).unwrap();
        }
        assert_eq!(state_hash(&s.replay().unwrap()), s.hash());
        let back = Session::restore(&s.snapshot()).unwrap();
        assert_eq!(back.hash(), s.hash());
        assert!(s.undo() && s.undo() && s.undo());
        assert!(!s.undo());
        assert_eq!(s.hash(), h0);
    }

    #[test]
    fn failed_moves_leave_no_trace() {
        let mut s = Session::new("x".into(), a3(), 12);
        assert!(s.apply(Move { kind: Some("fz".into()), vertex: Some(9), arc: None }).is_err());
        assert_eq!(s.history_json()["history"], json!([]));
    }
}
