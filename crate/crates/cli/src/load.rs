//! Reading input files, with failures mapped to exit codes.

use std::path::{Path, PathBuf};

use causal_unfold::io::{
    map_from_table, parse_map_doc, parse_realisation_doc, realisation_from_doc, structure_from_doc,
    StructureDoc,
};
use causal_unfold::realisations::Realisation;
use causal_unfold::structures::{validate_structure, EquivFamily, Structure, StructureMap};
use causal_unfold::{Caps, Error};

pub const EXIT_INVALID: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_CAP: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
    /// Output still worth printing, such as a failed report.
    pub stdout: Option<String>,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
            stdout: None,
        }
    }

    pub fn with_output(mut self, out: String) -> Self {
        self.stdout = Some(out);
        self
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_cap() {
            EXIT_CAP
        } else {
            match e {
                Error::Parse(_) | Error::UnknownEvent(_) | Error::DuplicateEvent(_) => EXIT_PARSE,
                _ => EXIT_INVALID,
            }
        };
        Failure::new(code, e.to_string())
    }
}

pub fn caps(
    events: Option<usize>,
    configs: Option<usize>,
    maps: Option<usize>,
) -> Result<Caps, Failure> {
    let mut caps = Caps::from_env()?;
    if let Some(n) = events {
        caps.events = n;
    }
    if let Some(n) = configs {
        caps.configs = n;
    }
    if let Some(n) = maps {
        caps.maps = n;
    }
    Ok(caps)
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn located(path: &Path) -> impl Fn(Failure) -> Failure + '_ {
    move |f| Failure {
        message: format!("{}: {}", path.display(), f.message),
        ..f
    }
}

/// The kind field of a JSON document.
pub fn kind_of(path: &Path) -> Result<String, Failure> {
    let value: serde_json::Value = serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    value
        .get("kind")
        .and_then(|k| k.as_str())
        .map(str::to_string)
        .ok_or_else(|| Failure::new(EXIT_PARSE, format!("{}: missing `kind`", path.display())))
}

/// Parse without validating.
pub fn raw_structure(path: &Path) -> Result<Structure, Failure> {
    let text = read(path)?;
    let doc: StructureDoc = serde_json::from_str(&text)
        .map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))
        .map_err(located(path))?;
    structure_from_doc(&doc)
        .map_err(Failure::from)
        .map_err(located(path))
}

/// Parse, check the event cap and validate.
pub fn structure(path: &Path, caps: &Caps) -> Result<Structure, Failure> {
    let s = raw_structure(path)?;
    if s.names().len() > caps.events {
        return Err(located(path)(
            Error::TooManyEvents {
                count: s.names().len(),
                max: caps.events,
            }
            .into(),
        ));
    }
    let violations = validate_structure(&s);
    if let Some(v) = violations.first() {
        return Err(Failure::new(
            EXIT_INVALID,
            format!("{}: {v}", path.display()),
        ));
    }
    Ok(s)
}

fn sibling(base: &Path, name: &str) -> PathBuf {
    base.parent().unwrap_or(Path::new(".")).join(name)
}

pub struct LoadedMap {
    pub source_path: PathBuf,
    pub target_path: PathBuf,
    pub source: Structure,
    pub target: Structure,
    pub map: StructureMap,
}

/// A map file with its source and target, resolved relative to the map file.
pub fn map(path: &Path, caps: &Caps) -> Result<LoadedMap, Failure> {
    let doc = parse_map_doc(&read(path)?)
        .map_err(Failure::from)
        .map_err(located(path))?;
    let source_path = sibling(path, &doc.source);
    let target_path = sibling(path, &doc.target);
    let source = structure(&source_path, caps)?;
    let target = structure(&target_path, caps)?;
    let map = map_from_table(&doc.table, source.names(), target.names())
        .map_err(Failure::from)
        .map_err(located(path))?;
    Ok(LoadedMap {
        source_path,
        target_path,
        source,
        target,
        map,
    })
}

pub struct LoadedRealisation {
    pub realisation: Realisation,
    pub events: Vec<String>,
    /// The family it lives over, when the file names one.
    pub over: Option<EquivFamily>,
}

/// A realisation file; labels are resolved against the structure it lives
/// over, or against its own label names when it names none.
pub fn realisation(path: &Path, caps: &Caps) -> Result<LoadedRealisation, Failure> {
    let doc = parse_realisation_doc(&read(path)?)
        .map_err(Failure::from)
        .map_err(located(path))?;
    let over = doc
        .over
        .as_ref()
        .map(|o| Ok::<_, Failure>(structure(&sibling(path, o), caps)?.to_family(caps)?))
        .transpose()?;
    let events: Vec<String> = match &over {
        Some(s) => s.names().to_vec(),
        None => {
            let mut labels: Vec<String> = doc.labels.values().cloned().collect();
            labels.sort();
            labels.dedup();
            labels
        }
    };
    let realisation = realisation_from_doc(&doc, &events)
        .map_err(Failure::from)
        .map_err(located(path))?;
    Ok(LoadedRealisation {
        realisation,
        events,
        over,
    })
}
