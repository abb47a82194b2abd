//! Input loading, config hashing and output files.

use std::fs;
use std::path::{Path, PathBuf};

use richclub::export::Provenance;
use richclub::graph::{load_edge_list_with, Graph, LabelPolicy};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::{CommonArgs, Failure, FormatArg, LabelsArg};

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub struct Loaded {
    pub graph: Graph,
    pub input_digest: String,
}

pub fn load_graph(args: &CommonArgs) -> Result<Loaded, Failure> {
    let text = fs::read_to_string(&args.input)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", args.input.display())))?;
    let policy = match args.labels {
        LabelsArg::Integer => LabelPolicy::Integer,
        LabelsArg::Mixed => LabelPolicy::Mixed,
    };
    let graph = load_edge_list_with(&text, policy)
        .map_err(|e| Failure::input(format!("{}: {e}", args.input.display())))
        .and_then(|g| {
            if g.edge_count() == 0 {
                Err(Failure::input(format!("{}: no edges", args.input.display())))
            } else {
                Ok(g)
            }
        })?;
    Ok(Loaded { graph, input_digest: hex(&Sha256::digest(text.as_bytes())) })
}

/// First 16 hex digits of SHA-256 over the command, its settings and the
/// input bytes. Paths are left out so moving files keeps the hash.
pub fn config_hash<T: Serialize>(command: &str, settings: &T, input_digest: &str) -> String {
    #[derive(Serialize)]
    struct Keyed<'a, T> {
        command: &'a str,
        settings: &'a T,
        input_sha256: &'a str,
    }
    let json = serde_json::to_vec(&Keyed { command, settings, input_sha256: input_digest })
        .expect("settings serialise");
    hex(&Sha256::digest(&json))[..16].to_string()
}

pub struct Outputs {
    dir: PathBuf,
    csv: bool,
    json: bool,
    pub provenance: Provenance,
    written: Vec<PathBuf>,
}

impl Outputs {
    pub fn new(dir: &Path, formats: &[FormatArg], provenance: Provenance) -> Result<Self, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            csv: formats.contains(&FormatArg::Csv),
            json: formats.contains(&FormatArg::Json),
            provenance,
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, body: &str) -> Result<(), Failure> {
        let path = self.dir.join(name);
        fs::write(&path, body).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    pub fn csv(&mut self, name: &str, body: impl FnOnce(&Provenance) -> richclub::Result<String>) -> Result<(), Failure> {
        if !self.csv {
            return Ok(());
        }
        let text = body(&self.provenance)?;
        self.write(name, &text)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, body: &T) -> Result<(), Failure> {
        if !self.json {
            return Ok(());
        }
        let text = richclub::export::json_document(&self.provenance, body)?;
        self.write(name, &text)
    }

    /// Files in the input's own format, written whatever `--format` says.
    pub fn raw(&mut self, name: &str, body: &str) -> Result<(), Failure> {
        self.write(name, body)
    }

    pub fn finish(self) -> Vec<PathBuf> {
        self.written
    }
}
