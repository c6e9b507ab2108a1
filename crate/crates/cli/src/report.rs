use serde::{Deserialize, Serialize};

use pseudovol::pseudovolume::Estimate;
use pseudovol::verify::CheckLine;

/// Global flags as they were used for a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flags {
    pub samples: usize,
    pub seed: u64,
    pub tol: Option<f64>,
    pub exact: bool,
    pub oracle: bool,
    /// Command-specific options, as given on the command line.
    pub options: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
    pub std_error: f64,
}

impl NamedValue {
    pub fn new(name: impl Into<String>, e: Estimate) -> Self {
        NamedValue {
            name: name.into(),
            value: e.value,
            std_error: e.std_error,
        }
    }

    pub fn exact(name: impl Into<String>, value: f64) -> Self {
        Self::new(name, Estimate::exact(value))
    }
}

/// Per-face row of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceRow {
    pub face_id: usize,
    pub k: usize,
    pub vertex_ids: Vec<usize>,
    pub volume: f64,
    pub rho: f64,
    pub angle: Option<f64>,
    pub angle_std_error: Option<f64>,
    pub term: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<String>,
    pub values: Vec<NamedValue>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_face: Vec<FaceRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckLine>,
    pub wall_time: f64,
    pub seed: u64,
    pub flags: Flags,
}

impl RunReport {
    pub fn new(command: &str, inputs: Vec<String>, flags: Flags) -> Self {
        RunReport {
            command: command.to_string(),
            inputs,
            values: Vec::new(),
            per_face: Vec::new(),
            checks: Vec::new(),
            wall_time: 0.0,
            seed: flags.seed,
            flags,
        }
    }

    pub fn push(&mut self, v: NamedValue) {
        self.values.push(v);
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    #[cfg(test)]
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Plain-text rendering for the terminal.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{} {}\n", self.command, self.inputs.join(" ")));
        for v in &self.values {
            if v.std_error > 0.0 {
                out.push_str(&format!("  {:<28} {:.10} ± {:.3e}\n", v.name, v.value, v.std_error));
            } else {
                out.push_str(&format!("  {:<28} {:.10}\n", v.name, v.value));
            }
        }
        if !self.per_face.is_empty() {
            out.push_str(&format!(
                "  {:>5} {:>2} {:<18} {:>12} {:>10} {:>12} {:>10} {:>12}\n",
                "face", "k", "vertices", "volume", "rho", "angle", "± angle", "term"
            ));
            for f in &self.per_face {
                let opt = |x: Option<f64>, w: usize| x.map_or_else(|| format!("{:>w$}", "-"), |v| format!("{v:>w$.6}"));
                let ids = f.vertex_ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
                out.push_str(&format!(
                    "  {:>5} {:>2} {:<18} {:>12.6} {:>10.6} {} {} {}\n",
                    f.face_id,
                    f.k,
                    ids,
                    f.volume,
                    f.rho,
                    opt(f.angle, 12),
                    f.angle_std_error.map_or_else(|| format!("{:>10}", "-"), |v| format!("{v:>10.2e}")),
                    opt(f.term, 12)
                ));
            }
        }
        for c in &self.checks {
            out.push_str(&format!("{c}\n"));
        }
        out.push_str(&format!("  seed {}  samples {}  wall {:.3}s\n", self.seed, self.flags.samples, self.wall_time));
        out
    }
}
