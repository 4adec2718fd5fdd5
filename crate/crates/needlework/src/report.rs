//! Machine-readable run reports for the command-line front end. One
//! report per invocation; identical inputs and seed produce identical
//! bytes except for the wall-clock field.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Display;
use std::time::Instant;

/// One named check with both compared quantities rendered as text,
/// so a report stays meaningful without re-running anything.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub status: String,
    pub lhs: String,
    pub rhs: String,
}

impl Assertion {
    /// Records a comparison outcome under a stable name.
    pub fn check(name: impl Into<String>, passed: bool, lhs: impl Display, rhs: impl Display) -> Assertion {
        Assertion {
            name: name.into(),
            status: if passed { "pass" } else { "fail" }.into(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

/// Report emitted by every subcommand: what ran, a digest of what it
/// read, what it produced, and which named checks passed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub inputs_digest: String,
    pub outputs: serde_json::Map<String, serde_json::Value>,
    pub assertions: Vec<Assertion>,
    pub seed: u64,
    pub wall_time_ms: u64,
    #[serde(skip, default)]
    digest_state: u64,
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a64(state: u64, bytes: &[u8]) -> u64 {
    let mut h = state;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

impl RunReport {
    pub fn new(command: impl Into<String>, seed: u64) -> RunReport {
        let mut report = RunReport {
            command: command.into(),
            inputs_digest: String::new(),
            outputs: serde_json::Map::new(),
            assertions: Vec::new(),
            seed,
            wall_time_ms: 0,
            digest_state: FNV_OFFSET,
        };
        report.refresh_digest();
        report
    }

    fn refresh_digest(&mut self) {
        self.inputs_digest = format!("fnv1a64:{:016x}", self.digest_state);
    }

    /// Folds one labeled input (a file's bytes, an inline parameter)
    /// into the content digest. Order of calls is part of the digest.
    pub fn record_input(&mut self, label: &str, bytes: &[u8]) {
        self.digest_state = fnv1a64(self.digest_state, label.as_bytes());
        self.digest_state = fnv1a64(self.digest_state, &(bytes.len() as u64).to_le_bytes());
        self.digest_state = fnv1a64(self.digest_state, bytes);
        self.refresh_digest();
    }

    /// Stores an exactly-computed numeric output (integer or rational
    /// rendered as text) under the "exact-rational" tag.
    pub fn output_exact(&mut self, key: &str, value: impl ToString) {
        self.outputs.insert(
            key.into(),
            serde_json::json!({ "value": value.to_string(), "exactness": "exact-rational" }),
        );
    }

    /// Stores a floating-point output under the "float" tag.
    pub fn output_float(&mut self, key: &str, value: f64) {
        self.outputs.insert(
            key.into(),
            serde_json::json!({ "value": value, "exactness": "float" }),
        );
    }

    /// Stores a non-numeric output (structures, witnesses) untagged.
    pub fn output_raw(&mut self, key: &str, value: serde_json::Value) {
        self.outputs.insert(key.into(), value);
    }

    /// Appends a named check and returns whether it passed.
    pub fn check(&mut self, name: impl Into<String>, passed: bool, lhs: impl Display, rhs: impl Display) -> bool {
        self.assertions.push(Assertion::check(name, passed, lhs, rhs));
        passed
    }

    pub fn extend_assertions(&mut self, assertions: impl IntoIterator<Item = Assertion>) {
        self.assertions.extend(assertions);
    }

    pub fn all_passed(&self) -> bool {
        self.assertions.iter().all(Assertion::passed)
    }

    /// 0 when every assertion passed, 1 otherwise. Malformed inputs
    /// never reach a report; the CLI exits 2 before building one.
    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn finish(&mut self, started: Instant) {
        self.wall_time_ms = started.elapsed().as_millis() as u64;
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Flat tabular rendering: meta rows, one row per output, one row
    /// per assertion.
    pub fn to_csv_string(&self) -> String {
        let mut lines = vec!["section,name,status,lhs,rhs".to_string()];
        lines.push(format!("meta,command,,{},", csv_escape(&self.command)));
        lines.push(format!("meta,inputs_digest,,{},", csv_escape(&self.inputs_digest)));
        lines.push(format!("meta,seed,,{},", self.seed));
        lines.push(format!("meta,wall_time_ms,,{},", self.wall_time_ms));
        for (key, value) in &self.outputs {
            let (shown, tag) = match value {
                serde_json::Value::Object(map) if map.contains_key("exactness") => (
                    map.get("value").map(render_json).unwrap_or_default(),
                    map.get("exactness").map(render_json).unwrap_or_default(),
                ),
                other => (render_json(other), String::new()),
            };
            lines.push(format!(
                "output,{},{},{},",
                csv_escape(key),
                csv_escape(&tag),
                csv_escape(&shown)
            ));
        }
        for a in &self.assertions {
            lines.push(format!(
                "assertion,{},{},{},{}",
                csv_escape(&a.name),
                a.status,
                csv_escape(&a.lhs),
                csv_escape(&a.rhs)
            ));
        }
        lines.join("\n") + "\n"
    }
}

fn render_json(value: &serde_json::Value) -> String {
    match value {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// One pseudorandom stream per (module, purpose) pair, derived from
/// the run seed by hashing seed bytes, module name, a separator, and
/// purpose name with FNV-1a. Adding a new consumer never perturbs an
/// existing one's stream.
pub fn derive_rng(seed: u64, module: &str, purpose: &str) -> ChaCha8Rng {
    let mut h = fnv1a64(FNV_OFFSET, &seed.to_le_bytes());
    h = fnv1a64(h, module.as_bytes());
    h = fnv1a64(h, &[0x1f]);
    h = fnv1a64(h, purpose.as_bytes());
    ChaCha8Rng::seed_from_u64(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn digest_tracks_inputs_and_order() {
        let mut a = RunReport::new("demo", 0);
        let mut b = RunReport::new("demo", 0);
        assert_eq!(a.inputs_digest, b.inputs_digest);
        a.record_input("x", b"123");
        b.record_input("x", b"124");
        assert_ne!(a.inputs_digest, b.inputs_digest);
        let mut c = RunReport::new("demo", 0);
        c.record_input("x", b"123");
        assert_eq!(a.inputs_digest, c.inputs_digest);
    }

    #[test]
    fn exit_codes_follow_assertions() {
        let mut r = RunReport::new("demo", 7);
        assert_eq!(r.exit_code(), 0);
        r.check("ok", true, 1, 1);
        assert_eq!(r.exit_code(), 0);
        r.check("bad", false, 2, 1);
        assert_eq!(r.exit_code(), 1);
        assert!(!r.all_passed());
    }

    #[test]
    fn json_rendering_is_deterministic_and_tagged() {
        let mut r = RunReport::new("demo", 1);
        r.output_exact("mass", "4/5");
        r.output_float("rate", 0.25);
        r.check("bound", true, "4/5", "3/5");
        let once = r.to_json_string();
        let twice = r.to_json_string();
        assert_eq!(once, twice);
        assert!(once.contains("\"exactness\": \"exact-rational\""));
        assert!(once.contains("\"exactness\": \"float\""));
    }

    #[test]
    fn csv_escapes_commas_and_quotes() {
        let mut r = RunReport::new("demo", 1);
        r.output_raw("list", serde_json::json!([1, 2]));
        r.check("a,b", true, "x\"y", "z");
        let csv = r.to_csv_string();
        assert!(csv.contains("\"[1,2]\""));
        assert!(csv.contains("\"a,b\""));
        assert!(csv.contains("\"x\"\"y\""));
    }

    #[test]
    fn derived_streams_are_stable_and_independent() {
        let mut one = derive_rng(42, "lcc", "trials");
        let mut two = derive_rng(42, "lcc", "trials");
        assert_eq!(one.next_u64(), two.next_u64());
        let mut other = derive_rng(42, "lcc", "codeword");
        let mut fresh = derive_rng(42, "lcc", "trials");
        let _ = fresh.next_u64();
        assert_ne!(other.next_u64(), fresh.next_u64());
    }
}
