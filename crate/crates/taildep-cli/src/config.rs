//! Config-file loading.
//!
//! Config files are TOML with a top-level `schema_version` and one table
//! per command:
//!
//! ```toml
//! schema_version = 1
//!
//! [memory]
//! input = "prices.csv"
//! column = "BTC"
//! ```
//!
//! Command-line flags override fields from the file.

use std::path::Path;

use serde::de::DeserializeOwned;

use crate::emit::SCHEMA_VERSION;
use crate::error::{config_err, CliResult};

/// Parse `path` and extract the `section` table into `T`. A missing file,
/// wrong schema version, missing section, or unknown field is a
/// configuration error.
pub fn load_section<T: DeserializeOwned>(path: &Path, section: &str) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| config_err(format!("{}: {e}", path.display())))?;

    match table.get("schema_version") {
        Some(toml::Value::Integer(v)) if *v == SCHEMA_VERSION as i64 => {}
        Some(other) => {
            return Err(config_err(format!(
                "{}: unsupported schema_version {other}; this build reads version {SCHEMA_VERSION}",
                path.display()
            )))
        }
        None => {
            return Err(config_err(format!(
                "{}: missing schema_version (expected {SCHEMA_VERSION})",
                path.display()
            )))
        }
    }

    let value = table.get(section).ok_or_else(|| {
        config_err(format!(
            "{}: missing [{section}] section",
            path.display()
        ))
    })?;
    value
        .clone()
        .try_into()
        .map_err(|e| config_err(format!("{}: [{section}]: {e}", path.display())))
}

/// Resolve an optional config file into a section struct, falling back to
/// `default` when no file was given.
pub fn load_or_default<T: DeserializeOwned>(
    path: Option<&Path>,
    section: &str,
    default: T,
) -> CliResult<T> {
    match path {
        Some(p) => load_section(p, section),
        None => Ok(default),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;
    use std::io::Write;

    #[derive(Debug, Deserialize, PartialEq)]
    #[serde(deny_unknown_fields)]
    struct Demo {
        input: String,
        #[serde(default)]
        column: Option<String>,
    }

    fn write_file(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_a_versioned_section() {
        let f = write_file("schema_version = 1\n[demo]\ninput = \"x.csv\"\n");
        let d: Demo = load_section(f.path(), "demo").unwrap();
        assert_eq!(d.input, "x.csv");
        assert_eq!(d.column, None);
    }

    #[test]
    fn rejects_wrong_or_missing_versions_and_sections() {
        let f = write_file("schema_version = 2\n[demo]\ninput = \"x\"\n");
        let err = load_section::<Demo>(f.path(), "demo").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.message().contains("schema_version 2"));

        let f = write_file("[demo]\ninput = \"x\"\n");
        assert!(load_section::<Demo>(f.path(), "demo")
            .unwrap_err()
            .message()
            .contains("missing schema_version"));

        let f = write_file("schema_version = 1\n[other]\ninput = \"x\"\n");
        assert!(load_section::<Demo>(f.path(), "demo")
            .unwrap_err()
            .message()
            .contains("[demo]"));

        let f = write_file("schema_version = 1\n[demo]\ninput = \"x\"\ntypo = 1\n");
        assert!(load_section::<Demo>(f.path(), "demo").is_err());
    }
}
