//! Artifact rendering: summary tables, JSON-line reports, envelope files
//! with embedded provenance, and atomic writes.

use std::io::Write;
use std::path::Path;

use betagamma::lattice::LatticeField;
use betagamma::stats::TestReport;
use serde_json::{json, Value};

use crate::config::{ConfigError, ConfigResult};

/// Provenance block every artifact embeds.
#[derive(Clone, Debug)]
pub struct Provenance {
    pub command: String,
    pub seed: u64,
    pub config_hash: String,
    pub config: Value,
}

impl Provenance {
    pub fn envelope(&self, body: Value) -> Value {
        let mut v = json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "seed": self.seed,
            "config_hash": self.config_hash,
            "config": self.config,
        });
        if let (Value::Object(map), Value::Object(extra)) = (&mut v, body) {
            map.extend(extra);
        }
        v
    }
}

/// Fixed-width summary table for a report list.
pub fn render_table(reports: &[TestReport]) -> String {
    let name_width = reports
        .iter()
        .map(|r| r.name.len())
        .max()
        .unwrap_or(4)
        .max(4);
    let mut out = String::new();
    out.push_str(&format!(
        "{:<name_width$}  {:>13}  {:>13}  {:>9}  {}\n",
        "name", "statistic", "critical", "n", "result"
    ));
    for r in reports {
        let n = r
            .n
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("/");
        out.push_str(&format!(
            "{:<name_width$}  {:>13.6e}  {:>13.6e}  {:>9}  {}\n",
            r.name,
            r.statistic,
            r.critical,
            n,
            if r.pass { "pass" } else { "FAIL" }
        ));
    }
    out
}

/// One JSON line per report, each carrying the provenance fields.
pub fn render_json_lines(prov: &Provenance, reports: &[TestReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let line = json!({
            "command": prov.command,
            "version": env!("CARGO_PKG_VERSION"),
            "seed": prov.seed,
            "config_hash": prov.config_hash,
            "report": r,
        });
        out.push_str(&line.to_string());
        out.push('\n');
    }
    out
}

/// Write once, atomically: temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> ConfigResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp",
            path.file_name().unwrap_or_default().to_string_lossy()
        )),
        None => std::path::PathBuf::from(format!(
            ".{}.tmp",
            path.file_name().unwrap_or_default().to_string_lossy()
        )),
    };
    let mut f = std::fs::File::create(&tmp)
        .map_err(|e| ConfigError(format!("cannot create {}: {e}", tmp.display())))?;
    f.write_all(contents.as_bytes())
        .map_err(|e| ConfigError(format!("cannot write {}: {e}", tmp.display())))?;
    f.sync_all().ok();
    std::fs::rename(&tmp, path)
        .map_err(|e| ConfigError(format!("cannot move artifact into {}: {e}", path.display())))?;
    Ok(())
}

/// Field snapshot as plain nested number arrays.
pub fn field_snapshot(prov: &Provenance, field: &LatticeField) -> Value {
    prov.envelope(json!({
        "model": field.model(),
        "m": field.m(),
        "n": field.n(),
        "log_r1": field.log_r1_grid().to_rows(),
        "log_r2": field.log_r2_grid().to_rows(),
    }))
}

/// Replica site samples as CSV: '.' decimal, no locale, provenance in a
/// leading comment.
pub fn samples_csv(prov: &Provenance, site: (usize, usize), samples: &[(f64, f64)]) -> String {
    let mut out = format!(
        "# command={} version={} seed={} config_hash={}\n",
        prov.command,
        env!("CARGO_PKG_VERSION"),
        prov.seed,
        prov.config_hash
    );
    out.push_str("site_i,site_j,replica,R1,R2\n");
    for (k, (r1, r2)) in samples.iter().enumerate() {
        out.push_str(&format!("{},{},{},{},{}\n", site.0, site.1, k, r1, r2));
    }
    out
}
