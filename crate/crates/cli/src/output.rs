use std::fmt::{self, Display};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use agreelearn::dataset::{binarize_survival, impute_mean, load_csv, normalize_zscore, CsvOptions, Dataset};
use anyhow::{Context, Result};
use serde::{Serialize, Serializer};

use crate::args::InputArgs;

/// An invalid combination of flags; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn display<T: Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn display_opt<T: Display, S: Serializer>(v: &Option<T>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.collect_str(v),
        None => s.serialize_none(),
    }
}

pub fn display_list<T: Display, S: Serializer>(v: &[T], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

pub fn load_input(args: &InputArgs) -> Result<Dataset> {
    let bytes = fs::read(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let header: Vec<String> = csv::ReaderBuilder::new()
        .from_reader(bytes.as_slice())
        .headers()
        .with_context(|| format!("reading the header of {}", args.input.display()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut options = CsvOptions::detect(&header);
    if let Some(label) = &args.label_column {
        options.label_column = Some(label.clone());
    }
    let mut d = load_csv(bytes.as_slice(), &options).with_context(|| format!("loading {}", args.input.display()))?;
    if let Some(threshold) = args.survival_labels {
        d = binarize_survival(&d, threshold)?;
    }
    if args.impute_mean {
        d = impute_mean(&d)?;
    }
    if args.zscore {
        d = normalize_zscore(&d)?;
    }
    Ok(d)
}

/// Collects artifacts for one run and writes the manifest last.
pub struct OutDir {
    root: PathBuf,
    outputs: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            outputs: Vec::new(),
        })
    }

    pub fn write_with<F>(&mut self, name: &str, f: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<()>,
    {
        let path = self.root.join(name);
        let mut w = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
        f(&mut w)?;
        w.flush()?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write_with(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            w.write_all(b"\n")?;
            Ok(())
        })
    }

    /// Writes `manifest.json`: tool version, command, arguments, parsed
    /// configuration, seed and the artifacts written.
    pub fn finish<C: Serialize>(mut self, command: &str, config: &C, seed: u64) -> Result<()> {
        let manifest = Manifest {
            format: "agreelearn-manifest/1",
            tool: "agreelearn",
            version: env!("CARGO_PKG_VERSION"),
            command,
            args: std::env::args().skip(1).collect(),
            seed,
            config,
            outputs: self.outputs.clone(),
        };
        self.write_json("manifest.json", &manifest)
    }
}

#[derive(Serialize)]
struct Manifest<'a, C> {
    format: &'static str,
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    args: Vec<String>,
    seed: u64,
    config: &'a C,
    outputs: Vec<String>,
}
