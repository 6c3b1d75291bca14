//! All-or-nothing output files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::FormatError;

/// Tracks files written by one command. Each file is written to a temporary
/// sibling and renamed into place; if the set is dropped without
/// [`Outputs::commit`], every file it wrote is removed again.
#[derive(Debug, Default)]
pub struct Outputs {
    written: Vec<PathBuf>,
    committed: bool,
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".partial");
    path.with_file_name(name)
}

impl Outputs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn write<F>(&mut self, path: &Path, fill: F) -> Result<(), FormatError>
    where
        F: FnOnce(&mut dyn Write) -> Result<(), FormatError>,
    {
        let tmp = temp_path(path);
        let result = (|| {
            let mut w = BufWriter::new(File::create(&tmp)?);
            fill(&mut w)?;
            w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
            fs::rename(&tmp, path)?;
            Ok(())
        })();
        if result.is_err() {
            let _ = fs::remove_file(&tmp);
        } else {
            self.written.push(path.to_path_buf());
        }
        result
    }

    pub fn paths(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn commit(mut self) {
        self.committed = true;
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if !self.committed {
            for p in &self.written {
                let _ = fs::remove_file(p);
            }
        }
    }
}
