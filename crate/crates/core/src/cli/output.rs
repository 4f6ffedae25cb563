use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::RunConfig;
use crate::error::{Error, Result};

/// Output files staged in memory and written only once the whole command
/// has succeeded, each through a temporary file and a rename.
pub(crate) struct Outputs {
    dir: PathBuf,
    files: Vec<(PathBuf, String)>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Self {
        Outputs {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    pub fn text(&mut self, name: &str, body: String) {
        self.files.push((self.dir.join(name), body));
    }

    pub fn json<S: Serialize>(&mut self, name: &str, value: &S) -> Result<()> {
        let at = self.dir.join(name);
        self.json_at(at, value)
    }

    pub fn json_at<S: Serialize>(&mut self, path: PathBuf, value: &S) -> Result<()> {
        let mut body = serde_json::to_string_pretty(value)?;
        body.push('\n');
        self.files.push((path, body));
        Ok(())
    }

    pub fn commit(self) -> Result<()> {
        for (path, body) in self.files {
            write_atomic(&path, &body)?;
        }
        Ok(())
    }
}

pub(crate) fn write_atomic(path: &Path, body: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, body).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

/// CSV body preceded by a `#` comment line carrying the effective config.
pub(crate) fn csv_with_echo(config: &RunConfig, body: &str) -> String {
    format!("# run_config: {}\n{body}", config.to_json())
}
