//! Meta-address registry (a stand-in for ENS records) and the append-only
//! announcement registry, persisted as two flat files in one directory:
//!
//! * `metas.json`: `{"<name>": [{"proto", "curve", "K", "V"}, ...]}`
//! * `announcements.jsonl`: one [`AnnouncementRecord`] per line, `idx` dense
//!   from 0.
//!
//! Records are kept in their serialized form so one registry can hold
//! announcements for every protocol and curve; [`Registry::decode`] turns a
//! range into typed announcements for one suite.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::curve::{from_hex, to_hex, CurveId, CurveSuite};
use crate::error::{Error, Result};
use crate::keys::{MetaAddress, ProtocolId};
use crate::protocols::{Announcement, AnnouncementRecord};

pub const METAS_FILE: &str = "metas.json";
pub const ANNOUNCEMENTS_FILE: &str = "announcements.jsonl";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetaRecord {
    pub proto: ProtocolId,
    pub curve: CurveId,
    #[serde(rename = "K")]
    pub spend: String,
    #[serde(rename = "V", default, skip_serializing_if = "Option::is_none")]
    pub view: Option<String>,
}

impl MetaRecord {
    pub fn from_meta<S: CurveSuite>(meta: &MetaAddress<S>) -> Self {
        let (k, v) = meta.encoded_parts();
        MetaRecord {
            proto: meta.protocol(),
            curve: S::ID,
            spend: to_hex(&k),
            view: v.map(|v| to_hex(&v)),
        }
    }

    pub fn to_meta<S: CurveSuite>(&self) -> Result<MetaAddress<S>> {
        if self.curve != S::ID {
            return Err(Error::CurveMismatch {
                expected: S::ID,
                found: self.curve,
            });
        }
        let view = self.view.as_deref().map(from_hex).transpose()?;
        MetaAddress::from_parts(self.proto, &from_hex(&self.spend)?, view.as_deref())
    }
}

/// Typed announcements decoded from a registry range.
#[derive(Clone, Debug, Default)]
pub struct Decoded<S: CurveSuite> {
    pub announcements: Vec<Announcement<S>>,
    /// Records on another curve, left out of `announcements`.
    pub skipped: u64,
}

/// Both registries. Appends go straight to disk; a registry opened with
/// [`Registry::in_memory`] never touches the filesystem.
#[derive(Debug)]
pub struct Registry {
    dir: Option<PathBuf>,
    metas: BTreeMap<String, Vec<MetaRecord>>,
    announcements: Vec<AnnouncementRecord>,
}

impl Registry {
    pub fn in_memory() -> Self {
        Registry {
            dir: None,
            metas: BTreeMap::new(),
            announcements: Vec::new(),
        }
    }

    /// Opens the registry in `dir`, creating the directory if needed.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;

        let metas_path = dir.join(METAS_FILE);
        let metas = match fs::read_to_string(&metas_path) {
            Ok(s) if s.trim().is_empty() => BTreeMap::new(),
            Ok(s) => serde_json::from_str(&s).map_err(|e| Error::CorruptRecord {
                path: metas_path.clone(),
                line: e.line(),
                message: e.to_string(),
            })?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(e.into()),
        };

        let ann_path = dir.join(ANNOUNCEMENTS_FILE);
        let announcements = match File::open(&ann_path) {
            Ok(f) => load_announcements(&ann_path, f)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(e.into()),
        };

        Ok(Registry {
            dir: Some(dir),
            metas,
            announcements,
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn register<S: CurveSuite>(&mut self, name: &str, meta: &MetaAddress<S>) -> Result<()> {
        self.register_record(name, MetaRecord::from_meta(meta))
    }

    pub fn register_record(&mut self, name: &str, record: MetaRecord) -> Result<()> {
        if name.is_empty() {
            return Err(Error::Config("empty registry name".into()));
        }
        self.metas.entry(name.to_string()).or_default().push(record);
        if let Some(dir) = &self.dir {
            write_atomically(&dir.join(METAS_FILE), &self.metas_json()?)?;
        }
        Ok(())
    }

    /// Every meta-address registered under `name`, oldest first.
    pub fn lookup(&self, name: &str) -> Result<&[MetaRecord]> {
        self.metas
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::NotFound(format!("no meta-address registered for {name:?}")))
    }

    /// Most recent meta-address under `name` for `protocol` on suite `S`.
    pub fn lookup_meta<S: CurveSuite>(&self, name: &str, protocol: ProtocolId) -> Result<MetaAddress<S>> {
        self.lookup(name)?
            .iter()
            .rev()
            .find(|r| r.proto == protocol && r.curve == S::ID)
            .ok_or_else(|| {
                Error::NotFound(format!("no {protocol} meta-address on {} for {name:?}", S::ID))
            })?
            .to_meta()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.metas.keys().map(String::as_str)
    }

    /// Appends `ann` under the next index, which is returned. The index
    /// stored in `ann` is ignored.
    pub fn append<S: CurveSuite>(&mut self, ann: &Announcement<S>) -> Result<u64> {
        let mut rec = ann.to_record();
        rec.idx = self.count();
        let line = serde_json::to_string(&rec)?;
        if let Some(dir) = &self.dir {
            let mut f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(dir.join(ANNOUNCEMENTS_FILE))?;
            f.write_all(line.as_bytes())?;
            f.write_all(b"\n")?;
            f.sync_data()?;
        }
        self.announcements.push(rec);
        Ok(self.count() - 1)
    }

    pub fn count(&self) -> u64 {
        self.announcements.len() as u64
    }

    /// Records `from..count()` in index order; empty when `from >= count()`.
    pub fn iterate(&self, from: u64) -> impl Iterator<Item = &AnnouncementRecord> {
        let start = (from.min(self.count())) as usize;
        self.announcements[start..].iter()
    }

    /// Decodes records `from..` belonging to suite `S`.
    pub fn decode<S: CurveSuite>(&self, from: u64) -> Result<Decoded<S>> {
        let mut out = Decoded {
            announcements: Vec::new(),
            skipped: 0,
        };
        for rec in self.iterate(from) {
            if rec.curve != S::ID {
                out.skipped += 1;
                continue;
            }
            let ann = Announcement::from_record(rec).map_err(|e| Error::CorruptRecord {
                path: self.announcements_path(),
                line: rec.idx as usize + 1,
                message: e.to_string(),
            })?;
            out.announcements.push(ann);
        }
        Ok(out)
    }

    /// Writes both files into `dir` from the in-memory state, in exactly the
    /// format [`Registry::open`] reads.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        write_atomically(&dir.join(METAS_FILE), &self.metas_json()?)?;
        let mut body = String::new();
        for rec in &self.announcements {
            body.push_str(&serde_json::to_string(rec)?);
            body.push('\n');
        }
        write_atomically(&dir.join(ANNOUNCEMENTS_FILE), &body)
    }

    fn metas_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.metas)?;
        s.push('\n');
        Ok(s)
    }

    fn announcements_path(&self) -> PathBuf {
        match &self.dir {
            Some(d) => d.join(ANNOUNCEMENTS_FILE),
            None => PathBuf::from("<memory>"),
        }
    }
}

fn load_announcements(path: &Path, f: File) -> Result<Vec<AnnouncementRecord>> {
    let mut out: Vec<AnnouncementRecord> = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        let corrupt = |message: String| Error::CorruptRecord {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        if line.trim().is_empty() {
            return Err(corrupt("empty line".into()));
        }
        let rec: AnnouncementRecord = serde_json::from_str(&line).map_err(|e| corrupt(e.to_string()))?;
        if rec.idx != out.len() as u64 {
            return Err(corrupt(format!("index {} out of sequence, expected {}", rec.idx, out.len())));
        }
        out.push(rec);
    }
    Ok(out)
}

fn write_atomically(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_data()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}
