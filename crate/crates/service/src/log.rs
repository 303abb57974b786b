//! Append-only JSONL verdict log. Every append is fsynced before the
//! submission is acknowledged, so a killed server loses nothing it confirmed.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use wisp_core::bench::{latest_by_annotator, VerdictRecord};

#[derive(Debug, thiserror::Error)]
pub enum LogError {
    #[error("verdict log {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("verdict log {path} line {line}: {source}")]
    Corrupt { path: String, line: usize, source: serde_json::Error },
}

pub struct VerdictLog {
    path: PathBuf,
    file: File,
    lines: usize,
}

impl VerdictLog {
    /// Opens (creating if needed) and replays the log. A torn final line
    /// left by a crash mid-write is cut off; any other bad line is an error.
    pub fn open(path: &Path) -> Result<(VerdictLog, Vec<VerdictRecord>), LogError> {
        let io = |source| LogError::Io { path: path.display().to_string(), source };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(io)?;
        }
        let mut file = OpenOptions::new().read(true).append(true).create(true).open(path).map_err(io)?;
        let mut records = Vec::new();
        let mut good_bytes = 0u64;
        let mut torn = false;
        {
            let mut reader = BufReader::new(&file);
            let mut buf = String::new();
            let mut n = 0;
            loop {
                buf.clear();
                let read = reader.read_line(&mut buf).map_err(io)?;
                if read == 0 {
                    break;
                }
                n += 1;
                let complete = buf.ends_with('\n');
                if buf.trim().is_empty() {
                    good_bytes += read as u64;
                    continue;
                }
                if !complete {
                    // never acknowledged, since the newline goes out in the same write
                    torn = true;
                    break;
                }
                let r = serde_json::from_str::<VerdictRecord>(buf.trim_end())
                    .map_err(|source| LogError::Corrupt { path: path.display().to_string(), line: n, source })?;
                records.push(r);
                good_bytes += read as u64;
            }
        }
        if torn {
            log::warn!("{}: dropping incomplete final record", path.display());
            file.set_len(good_bytes).map_err(io)?;
            file.sync_all().map_err(io)?;
        }
        file.seek(SeekFrom::End(0)).map_err(io)?;
        let lines = records.len();
        Ok((VerdictLog { path: path.to_path_buf(), file, lines }, records))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Records written since the last compaction, superseded ones included.
    pub fn lines(&self) -> usize {
        self.lines
    }

    pub fn append(&mut self, r: &VerdictRecord) -> Result<(), LogError> {
        let mut line = serde_json::to_string(r).expect("verdict records serialize");
        line.push('\n');
        self.file.write_all(line.as_bytes()).map_err(|e| self.err(e))?;
        self.file.sync_data().map_err(|e| self.err(e))?;
        self.lines += 1;
        Ok(())
    }

    /// Rewrites the log with only each annotator's latest record per pair.
    /// The new file is fsynced and renamed over the old one.
    pub fn compact(&mut self, records: &[VerdictRecord]) -> Result<(), LogError> {
        let kept = latest_by_annotator(records.iter().cloned());
        let tmp = self.path.with_extension("jsonl.tmp");
        {
            let mut out = File::create(&tmp).map_err(|e| self.err(e))?;
            let mut buf = Vec::new();
            for r in &kept {
                serde_json::to_writer(&mut buf, r).expect("verdict records serialize");
                buf.push(b'\n');
            }
            out.write_all(&buf).map_err(|e| self.err(e))?;
            out.sync_all().map_err(|e| self.err(e))?;
        }
        std::fs::rename(&tmp, &self.path).map_err(|e| self.err(e))?;
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            // make the rename itself durable; not every platform allows this
            if let Ok(d) = File::open(dir) {
                let _ = d.sync_all();
            }
        }
        self.file = OpenOptions::new().append(true).open(&self.path).map_err(|e| self.err(e))?;
        self.lines = kept.len();
        Ok(())
    }

    pub fn read_all(&self) -> Result<Vec<u8>, LogError> {
        std::fs::read(&self.path).map_err(|e| self.err(e))
    }

    fn err(&self, source: std::io::Error) -> LogError {
        LogError::Io { path: self.path.display().to_string(), source }
    }
}
