use serde::Serialize;
use serde_json::Value;

use crate::config::ConfigEcho;

/// One comparison between a derived result and a published claim.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimDiff {
    pub item: String,
    pub claimed: String,
    pub derived: String,
    pub agrees: bool,
}

impl ClaimDiff {
    pub fn new(
        item: impl Into<String>,
        claimed: impl Into<String>,
        derived: impl Into<String>,
        agrees: bool,
    ) -> Self {
        ClaimDiff {
            item: item.into(),
            claimed: claimed.into(),
            derived: derived.into(),
            agrees,
        }
    }
}

/// The output of a command: a machine-readable result, human-readable lines
/// and the process exit code.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: ConfigEcho,
    pub result: Value,
    pub claims: Vec<ClaimDiff>,
    #[serde(skip)]
    pub text: Vec<String>,
    #[serde(skip)]
    pub exit_code: i32,
}

impl Report {
    pub fn new(command: &str, config: ConfigEcho) -> Self {
        Report {
            command: command.to_string(),
            config,
            result: Value::Null,
            claims: Vec::new(),
            text: Vec::new(),
            exit_code: 0,
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    pub fn claim(&mut self, d: ClaimDiff) {
        self.claims.push(d);
    }

    pub fn render_text(&self) -> String {
        let mut out = self.text.join("\n");
        if !self.claims.is_empty() {
            if !out.is_empty() {
                out.push_str("\n\n");
            }
            out.push_str("derived vs claimed:\n");
            for c in &self.claims {
                let mark = if c.agrees { "agrees" } else { "DIFFERS" };
                out.push_str(&format!(
                    "  [{mark}] {}\n      claimed: {}\n      derived: {}\n",
                    c.item, c.claimed, c.derived
                ));
            }
        }
        if !out.ends_with('\n') {
            out.push('\n');
        }
        out
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
