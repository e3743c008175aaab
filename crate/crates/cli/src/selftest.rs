use serde_json::json;

use crate::output::Outcome;

/// Named pass/fail checks of a `--self-test` run.
pub struct Checks {
    command: &'static str,
    results: Vec<(String, bool)>,
}

impl Checks {
    pub fn new(command: &'static str) -> Self {
        Checks {
            command,
            results: vec![],
        }
    }

    pub fn check(mut self, name: &str, ok: bool) -> Self {
        self.results.push((name.to_string(), ok));
        self
    }

    pub fn finish(self) -> Outcome {
        let failed: Vec<&str> = self.results.iter().filter(|r| !r.1).map(|r| r.0.as_str()).collect();
        let checks: Vec<_> = self
            .results
            .iter()
            .map(|(n, ok)| json!({"check": n, "ok": ok}))
            .collect();
        let reason = format!("self-test failed: {}", failed.join("; "));
        Outcome::new(json!({
            "command": self.command,
            "self_test": if failed.is_empty() { "ok" } else { "failed" },
            "checks": checks,
        }))
        .fail_if(!failed.is_empty(), &reason)
    }
}
