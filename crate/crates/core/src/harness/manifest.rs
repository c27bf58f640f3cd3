use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::audio::BpLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sex {
    M,
    F,
}

/// One recording. `clip_path` is stored as written; relative paths resolve against the
/// manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub clip_path: PathBuf,
    pub systolic: f64,
    pub diastolic: f64,
    pub age: u32,
    pub sex: Sex,
}

impl ManifestRow {
    pub fn label(&self) -> BpLabel {
        BpLabel::new(self.systolic, self.diastolic).expect("validated when the manifest was built")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub rows: Vec<ManifestRow>,
    base_dir: PathBuf,
}

impl DatasetManifest {
    /// Rows must carry valid blood-pressure labels.
    pub fn new(rows: Vec<ManifestRow>, base_dir: impl Into<PathBuf>) -> Result<Self, HarnessError> {
        for (i, r) in rows.iter().enumerate() {
            BpLabel::new(r.systolic, r.diastolic).map_err(|e| HarnessError::Manifest {
                line: i + 2,
                reason: e.to_string(),
            })?;
        }
        Ok(Self {
            rows,
            base_dir: base_dir.into(),
        })
    }

    /// Reads a manifest CSV and checks that every clip exists.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(HarnessError::io(path))?;
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = reader.headers()?.clone();
        let expected = ["clip_path", "systolic", "diastolic", "age", "sex"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(HarnessError::Manifest {
                line: 1,
                reason: format!("header must be {}", expected.join(",")),
            });
        }
        let mut rows = Vec::new();
        for (i, rec) in reader.deserialize::<ManifestRow>().enumerate() {
            let row = rec.map_err(|e| HarnessError::Manifest {
                line: i + 2,
                reason: e.to_string(),
            })?;
            rows.push(row);
        }
        let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
        let manifest = Self::new(rows, base)?;
        for (i, _) in manifest.rows.iter().enumerate() {
            let clip = manifest.resolve(i);
            if !clip.is_file() {
                return Err(HarnessError::Manifest {
                    line: i + 2,
                    reason: format!("clip {} not found", clip.display()),
                });
            }
        }
        Ok(manifest)
    }

    pub fn resolve(&self, row: usize) -> PathBuf {
        self.base_dir.join(&self.rows[row].clip_path)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), HarnessError> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush().map_err(HarnessError::io(path))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_resolution() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("a.wav"), b"").unwrap();
        let m = DatasetManifest::new(
            vec![ManifestRow {
                clip_path: "a.wav".into(),
                systolic: 120.0,
                diastolic: 80.0,
                age: 30,
                sex: Sex::F,
            }],
            dir.path(),
        )
        .unwrap();
        let path = dir.path().join("manifest.csv");
        m.write(&path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("clip_path,systolic,diastolic,age,sex\n"));
        let back = DatasetManifest::load(&path).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.resolve(0), dir.path().join("a.wav"));
    }

    #[test]
    fn rejects_missing_clip_bad_label_and_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        fs::write(&path, "clip_path,systolic,diastolic,age,sex\nnope.wav,120,80,30,M\n").unwrap();
        assert!(matches!(DatasetManifest::load(&path), Err(HarnessError::Manifest { line: 2, .. })));

        fs::write(dir.path().join("x.wav"), b"").unwrap();
        fs::write(&path, "clip_path,systolic,diastolic,age,sex\nx.wav,80,120,30,M\n").unwrap();
        assert!(matches!(DatasetManifest::load(&path), Err(HarnessError::Manifest { line: 2, .. })));

        fs::write(&path, "path,sys,dia\nx.wav,120,80\n").unwrap();
        assert!(matches!(DatasetManifest::load(&path), Err(HarnessError::Manifest { line: 1, .. })));
    }
}
