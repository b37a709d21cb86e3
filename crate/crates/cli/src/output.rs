//! Output files. Every JSON document carries `format`, `config`, and
//! `results` members; every CSV starts with `# format:` and `# config:`
//! comment lines. Floats are written with 17 significant digits so files from
//! equal runs are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::CliError;

pub struct OutputWriter {
    dir: PathBuf,
    config: Value,
}

impl OutputWriter {
    pub fn new(dir: PathBuf, config: Value) -> Result<OutputWriter, CliError> {
        fs::create_dir_all(&dir)
            .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
        Ok(OutputWriter { dir, config })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn announce(&self, path: &Path) {
        println!("wrote {}", path.display());
    }

    pub fn write_json(&self, name: &str, format: &str, results: Value) -> Result<(), CliError> {
        let doc = serde_json::json!({
            "format": format,
            "config": self.config,
            "results": results,
        });
        let text = serde_json::to_string_pretty(&doc).expect("results serialize");
        let path = self.dir.join(name);
        fs::write(&path, text + "\n")?;
        self.announce(&path);
        Ok(())
    }

    pub fn write_csv(
        &self,
        name: &str,
        format: &str,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> Result<(), CliError> {
        let mut text = String::new();
        text.push_str(&format!("# format: {format}\n"));
        text.push_str(&format!(
            "# config: {}\n",
            serde_json::to_string(&self.config).expect("config serializes")
        ));
        text.push_str(&header.join(","));
        text.push('\n');
        for row in rows {
            debug_assert_eq!(row.len(), header.len());
            text.push_str(&row.join(","));
            text.push('\n');
        }
        let path = self.dir.join(name);
        fs::write(&path, text)?;
        self.announce(&path);
        Ok(())
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_the_csv_format() {
        for &x in &[0.1, 1.0 / 3.0, 6.02e23, -2.5e-308, 0.0] {
            assert_eq!(fmt(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_files_start_with_format_and_config_comments() {
        let tmp = std::env::temp_dir().join(format!("monopole-out-{}", std::process::id()));
        let w = OutputWriter::new(tmp.clone(), serde_json::json!({"k": 1})).unwrap();
        w.write_csv("t.csv", "test-v1", &["a", "b"], &[vec!["1".into(), "2".into()]]).unwrap();
        let text = fs::read_to_string(tmp.join("t.csv")).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# format: test-v1"));
        assert_eq!(lines.next(), Some("# config: {\"k\":1}"));
        assert_eq!(lines.next(), Some("a,b"));
        assert_eq!(lines.next(), Some("1,2"));
        fs::remove_dir_all(&tmp).unwrap();
    }
}
