use std::io::Write;
use std::path::Path;

use anyhow::Context;
use metaplex::report::VerificationReport;

/// What a command produces.
pub enum Output {
    Report(VerificationReport),
    Json(serde_json::Value),
}

impl Output {
    pub fn passed(&self) -> bool {
        match self {
            Output::Report(r) => r.all_pass(),
            Output::Json(_) => true,
        }
    }

    pub fn render(&self, csv: bool) -> anyhow::Result<Vec<u8>> {
        match (self, csv) {
            (Output::Report(r), false) => Ok(pretty(r)?),
            (Output::Report(r), true) => report_csv(r),
            (Output::Json(v), false) => Ok(pretty(v)?),
            (Output::Json(_), true) => Err(crate::Usage("--csv applies to check reports only".into()).into()),
        }
    }
}

fn pretty<T: serde::Serialize>(v: &T) -> anyhow::Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(v)?;
    out.push(b'\n');
    Ok(out)
}

/// One row per check; `inputs` is kept as compact JSON.
fn report_csv(r: &VerificationReport) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["name", "paper_ref", "residual", "tol", "pass", "inputs"])?;
    for c in &r.checks {
        w.write_record([
            c.name.clone(),
            c.paper_ref.clone(),
            format!("{:e}", c.residual),
            format!("{:e}", c.tol),
            c.pass.to_string(),
            serde_json::to_string(&c.inputs)?,
        ])?;
    }
    Ok(w.into_inner().context("flushing csv")?)
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial report.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
