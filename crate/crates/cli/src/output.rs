//! Files written by the subcommands: pretty JSON summaries, and CSV tables
//! each with a `<name>.units.json` sidecar describing its columns.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Model units: unit mass, length `L`, time `T`.
pub const LENGTH: &str = "L";
pub const ENERGY: &str = "L^2 T^-2";
pub const ACTION: &str = "L^2 T^-1";
pub const ELL: &str = "L^4 T^-2";
pub const FREQUENCY: &str = "T^-1";
pub const CURVATURE: &str = "T^-2";
pub const TIME: &str = "T";
pub const DETERMINANT: &str = "L^-2 T^-2";
pub const NONE: &str = "1";

pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
    pub description: &'static str,
}

pub const fn col(name: &'static str, unit: &'static str, description: &'static str) -> Column {
    Column { name, unit, description }
}

pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root)
            .map_err(|e| CliError::Analysis(format!("cannot create {}: {e}", root.display())))?;
        Ok(OutDir { root: root.to_path_buf(), written: vec![] })
    }

    fn open(&mut self, name: &str) -> Result<BufWriter<File>, CliError> {
        let path = self.root.join(name);
        let f = File::create(&path).map_err(|e| CliError::Analysis(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(name.to_string());
        Ok(BufWriter::new(f))
    }

    pub fn json<S: Serialize>(&mut self, name: &str, value: &S) -> Result<(), CliError> {
        let mut w = self.open(name)?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Analysis(e.to_string()))?;
        writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::Analysis(e.to_string()))
    }

    /// Writes a CSV through `fill` and its units sidecar.
    pub fn csv(
        &mut self,
        name: &str,
        columns: &[Column],
        fill: impl FnOnce(&mut dyn Write) -> centralforce::Result<()>,
    ) -> Result<(), CliError> {
        {
            let mut w = self.open(name)?;
            fill(&mut w)?;
            w.flush().map_err(|e| CliError::Analysis(e.to_string()))?;
        }
        #[derive(Serialize)]
        struct Sidecar<'a> {
            file: &'a str,
            units: &'static str,
            columns: Vec<ColumnMeta<'a>>,
        }
        #[derive(Serialize)]
        struct ColumnMeta<'a> {
            name: &'a str,
            unit: &'a str,
            description: &'a str,
        }
        let sidecar = Sidecar {
            file: name,
            units: "model units: mass 1, length L, time T",
            columns: columns
                .iter()
                .map(|c| ColumnMeta { name: c.name, unit: c.unit, description: c.description })
                .collect(),
        };
        let stem = name.strip_suffix(".csv").unwrap_or(name);
        self.json(&format!("{stem}.units.json"), &sidecar)
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }
}
