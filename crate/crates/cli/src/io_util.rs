//! Small file helpers shared by the subcommands.

use std::io::BufReader;
use std::path::{Path, PathBuf};

use dinet_core::graphio::read_graph;
use dinet_core::stats::TraitScores;
use dinet_core::CoOccurrenceGraph;

use crate::errors::{AppError, AppResult};

pub fn write_text(path: &Path, content: &str) -> AppResult<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| AppError::Internal(format!("mkdir {}: {e}", parent.display())))?;
    }
    std::fs::write(path, content)
        .map_err(|e| AppError::Internal(format!("write {}: {e}", path.display())))
}

/// Write to the file when given, stdout otherwise.
pub fn write_text_or_stdout(path: Option<&Path>, content: &str) -> AppResult<()> {
    match path {
        Some(p) => write_text(p, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

pub fn load_graph(path: &Path) -> AppResult<CoOccurrenceGraph> {
    let file = std::fs::File::open(path)
        .map_err(|e| AppError::Data(format!("cannot open {}: {e}", path.display())))?;
    read_graph(BufReader::new(file), &path.display().to_string()).map_err(AppError::data)
}

/// All `*.graph` files in a directory, in filename order.
pub fn load_graph_dir(dir: &Path) -> AppResult<Vec<CoOccurrenceGraph>> {
    if !dir.is_dir() {
        return Err(AppError::Data(format!("{} is not a directory", dir.display())));
    }
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| AppError::Data(format!("read dir {}: {e}", dir.display())))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "graph"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(AppError::Data(format!(
            "no .graph files in {}",
            dir.display()
        )));
    }
    paths.iter().map(|p| load_graph(p)).collect()
}

pub fn load_scores(path: &Path) -> AppResult<TraitScores> {
    let file = std::fs::File::open(path)
        .map_err(|e| AppError::Data(format!("cannot open {}: {e}", path.display())))?;
    TraitScores::read_delimited(BufReader::new(file), &path.display().to_string())
        .map_err(AppError::data)
}
