//! Static host for the annotation studio and its bundle export endpoint.
//!
//! `POST /export` takes `multipart/form-data` where every part is one bundle
//! file named by its path relative to the bundle root (`game.json`,
//! `maps/homepage.json`, ...). The files are staged, validated like
//! `astra validate` and, when clean, moved to `<export-dir>/<game_id>`.

use std::fs::{self, File};
use std::io::{Cursor, Read, Write};
use std::net::SocketAddr;
use std::path::{Component, Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use astra_core::config::{inspect_bundle, Finding, FindingSeverity};
use bytes::Bytes;
use serde::Serialize;
use tiny_http::{Header, Method, Request, Response, Server};

use crate::{CliError, StudioArgs};

/// Largest accepted export body.
pub const MAX_EXPORT_BYTES: usize = 64 << 20;

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("expected a multipart/form-data body")]
    NotMultipart,
    #[error("malformed multipart body: {0}")]
    Multipart(String),
    #[error("body exceeds {MAX_EXPORT_BYTES} bytes")]
    TooLarge,
    #[error("export contains no files")]
    Empty,
    #[error("part name {0:?} is not a relative path inside the bundle")]
    UnsafePath(String),
    #[error("file {0:?} appears twice")]
    DuplicatePart(String),
    #[error("game_id {0:?} cannot name a directory")]
    BadGameId(String),
    #[error("bundle has {} validation error(s)", .0.iter().filter(|f| f.severity == FindingSeverity::Error).count())]
    Invalid(Vec<Finding>),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl ExportError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        ExportError::Io { path: path.display().to_string(), source }
    }

    pub fn status(&self) -> u16 {
        match self {
            ExportError::TooLarge => 413,
            ExportError::Invalid(_) => 422,
            ExportError::Io { .. } => 500,
            _ => 400,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Exported {
    pub game_id: String,
    pub path: PathBuf,
    pub files: usize,
    /// Warnings only; errors block the export.
    pub findings: Vec<Finding>,
}

#[derive(Debug, Serialize)]
struct ExportReply<'a> {
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    game_id: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    findings: &'a [Finding],
}

/// `name` as a path below the bundle root, or `None` when it is absolute,
/// climbs with `..` or is otherwise not a plain relative path.
pub fn safe_relative(name: &str) -> Option<PathBuf> {
    if name.is_empty() || name.contains(['\\', '\0']) {
        return None;
    }
    let mut out = PathBuf::new();
    for c in Path::new(name).components() {
        match c {
            Component::Normal(s) => out.push(s),
            Component::CurDir => {}
            _ => return None,
        }
    }
    (!out.as_os_str().is_empty()).then_some(out)
}

/// Splits a multipart body into `(part name, bytes)` pairs. The form field
/// name is the file path; the upload file name is used when it is empty.
pub fn parse_multipart(content_type: &str, body: Vec<u8>) -> Result<Vec<(String, Vec<u8>)>, ExportError> {
    let boundary = multer::parse_boundary(content_type).map_err(|_| ExportError::NotMultipart)?;
    let stream = futures::stream::once(async move { Ok::<Bytes, std::io::Error>(Bytes::from(body)) });
    let mut multipart = multer::Multipart::new(stream, boundary);
    let bad = |e: multer::Error| ExportError::Multipart(e.to_string());
    futures::executor::block_on(async {
        let mut parts = Vec::new();
        while let Some(field) = multipart.next_field().await.map_err(bad)? {
            let name = [field.name(), field.file_name()]
                .into_iter()
                .flatten()
                .find(|n| !n.is_empty())
                .map(str::to_string)
                .ok_or_else(|| ExportError::Multipart("part without a name".into()))?;
            let data = field.bytes().await.map_err(bad)?;
            parts.push((name, data.to_vec()));
        }
        Ok(parts)
    })
}

static STAGING: AtomicU64 = AtomicU64::new(0);

/// Writes `parts` to a staging directory under `export_dir`, validates the
/// bundle and moves it to `<export_dir>/<game_id>`, replacing any earlier
/// export of the same game.
pub fn export_bundle(parts: &[(String, Vec<u8>)], export_dir: &Path) -> Result<Exported, ExportError> {
    if parts.is_empty() {
        return Err(ExportError::Empty);
    }
    let mut files = Vec::with_capacity(parts.len());
    for (name, data) in parts {
        let rel = safe_relative(name).ok_or_else(|| ExportError::UnsafePath(name.clone()))?;
        if files.iter().any(|(r, _)| *r == rel) {
            return Err(ExportError::DuplicatePart(name.clone()));
        }
        files.push((rel, data));
    }

    fs::create_dir_all(export_dir).map_err(|e| ExportError::io(export_dir, e))?;
    let n = STAGING.fetch_add(1, Ordering::Relaxed);
    let staging = export_dir.join(format!(".staging-{}-{n}", std::process::id()));
    let result = stage(&files, &staging, export_dir);
    if staging.exists() {
        let _ = fs::remove_dir_all(&staging);
    }
    result
}

fn stage(files: &[(PathBuf, &Vec<u8>)], staging: &Path, export_dir: &Path) -> Result<Exported, ExportError> {
    for (rel, data) in files {
        let path = staging.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| ExportError::io(parent, e))?;
        }
        fs::write(&path, data).map_err(|e| ExportError::io(&path, e))?;
    }
    let (config, report) = inspect_bundle(staging);
    let config = match config {
        Some(c) if report.is_ok() => c,
        _ => return Err(ExportError::Invalid(report.findings)),
    };
    let plain = safe_relative(&config.game_id).filter(|p| p.components().count() == 1 && !config.game_id.starts_with('.'));
    if plain.is_none() {
        return Err(ExportError::BadGameId(config.game_id));
    }
    let target = export_dir.join(&config.game_id);
    if target.exists() {
        fs::remove_dir_all(&target).map_err(|e| ExportError::io(&target, e))?;
    }
    fs::rename(staging, &target).map_err(|e| ExportError::io(&target, e))?;
    Ok(Exported { game_id: config.game_id, path: target, files: files.len(), findings: report.findings })
}

pub struct Studio {
    server: Server,
    root: PathBuf,
    export_dir: PathBuf,
}

fn header(name: &str, value: &str) -> Header {
    Header::from_bytes(name.as_bytes(), value.as_bytes()).expect("static header")
}

fn json_response<T: Serialize>(status: u16, body: &T) -> Response<Cursor<Vec<u8>>> {
    let data = serde_json::to_vec(body).expect("plain json");
    Response::from_data(data)
        .with_status_code(status)
        .with_header(header("Content-Type", "application/json"))
        .with_header(header("Access-Control-Allow-Origin", "*"))
}

impl Studio {
    pub fn bind(addr: &str, root: impl Into<PathBuf>, export_dir: impl Into<PathBuf>) -> Result<Studio, CliError> {
        let server = Server::http(addr).map_err(|e| CliError::Failed(format!("cannot listen on {addr}: {e}")))?;
        Ok(Studio { server, root: root.into(), export_dir: export_dir.into() })
    }

    pub fn local_addr(&self) -> Option<SocketAddr> {
        self.server.server_addr().to_ip()
    }

    /// Serves requests until `stop` is set.
    pub fn run(&self, stop: &AtomicBool) {
        while !stop.load(Ordering::SeqCst) {
            match self.server.recv_timeout(Duration::from_millis(200)) {
                Ok(Some(req)) => self.handle(req),
                Ok(None) => {}
                Err(e) => {
                    tracing::error!("studio server stopped: {e}");
                    break;
                }
            }
        }
    }

    fn handle(&self, mut req: Request) {
        let path = req.url().split(['?', '#']).next().unwrap_or("/").to_string();
        let method = req.method().clone();
        tracing::info!("{method} {path}");
        let sent = match (&method, path.as_str()) {
            (Method::Post, "/export") => {
                let response = self.export(&mut req);
                req.respond(response)
            }
            (Method::Get | Method::Head, _) => match self.static_file(&path) {
                Some(file) => match File::open(&file) {
                    Ok(f) => {
                        let mime = mime_guess::from_path(&file).first_or_octet_stream();
                        req.respond(Response::from_file(f).with_header(header("Content-Type", mime.as_ref())))
                    }
                    Err(_) => req.respond(Response::from_string("not found").with_status_code(404)),
                },
                None => req.respond(Response::from_string("not found").with_status_code(404)),
            },
            (Method::Post, _) => req.respond(Response::from_string("not found").with_status_code(404)),
            _ => req.respond(Response::from_string("method not allowed").with_status_code(405)),
        };
        if let Err(e) = sent {
            tracing::warn!("response to {path} failed: {e}");
        }
    }

    fn static_file(&self, url_path: &str) -> Option<PathBuf> {
        let rel = url_path.trim_start_matches('/');
        let mut path = if rel.is_empty() { self.root.clone() } else { self.root.join(safe_relative(rel)?) };
        if path.is_dir() {
            path.push("index.html");
        }
        path.is_file().then_some(path)
    }

    fn export(&self, req: &mut Request) -> Response<Cursor<Vec<u8>>> {
        let content_type = req
            .headers()
            .iter()
            .find(|h| h.field.equiv("Content-Type"))
            .map(|h| h.value.as_str().to_string())
            .unwrap_or_default();
        let mut body = Vec::new();
        let read = req.as_reader().take(MAX_EXPORT_BYTES as u64 + 1).read_to_end(&mut body);
        let result = match read {
            Err(e) => Err(ExportError::Multipart(e.to_string())),
            Ok(_) if body.len() > MAX_EXPORT_BYTES => Err(ExportError::TooLarge),
            Ok(_) => parse_multipart(&content_type, body).and_then(|parts| export_bundle(&parts, &self.export_dir)),
        };
        match result {
            Ok(done) => {
                tracing::info!("exported {} ({} files) to {}", done.game_id, done.files, done.path.display());
                let reply = ExportReply {
                    ok: true,
                    game_id: Some(&done.game_id),
                    path: Some(done.path.display().to_string()),
                    error: None,
                    findings: &done.findings,
                };
                json_response(200, &reply)
            }
            Err(e) => {
                let findings = match &e {
                    ExportError::Invalid(f) => f.as_slice(),
                    _ => &[],
                };
                let reply = ExportReply { ok: false, game_id: None, path: None, error: Some(e.to_string()), findings };
                json_response(e.status(), &reply)
            }
        }
    }
}

pub fn serve(args: StudioArgs) -> Result<(), CliError> {
    let studio = Studio::bind(&format!("{}:{}", args.host, args.port), &args.root, &args.export_dir)?;
    if !args.root.is_dir() {
        tracing::warn!("studio root {} does not exist; only /export will answer", args.root.display());
    }
    let addr = studio.local_addr().map_or_else(|| format!("{}:{}", args.host, args.port), |a| a.to_string());
    println!("studio on http://{addr}/ (root {}, exports to {})", args.root.display(), args.export_dir.display());
    let _ = std::io::stdout().flush();
    let stop = Arc::new(AtomicBool::new(false));
    crate::commands::stop_on_interrupt(Arc::clone(&stop));
    studio.run(&stop);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_paths() {
        assert_eq!(safe_relative("game.json"), Some(PathBuf::from("game.json")));
        assert_eq!(safe_relative("./maps/home.json"), Some(PathBuf::from("maps/home.json")));
        for bad in ["", "/etc/passwd", "../x", "maps/../../x", "a\\b", ".", "maps/.."] {
            assert_eq!(safe_relative(bad), None, "{bad:?}");
        }
    }

    #[test]
    fn multipart_round_trip() {
        let body = "--XYZ\r\nContent-Disposition: form-data; name=\"game.json\"\r\n\r\n{}\r\n\
                    --XYZ\r\nContent-Disposition: form-data; name=\"\"; filename=\"cues/a.txt\"\r\n\r\nhi\r\n--XYZ--\r\n";
        let parts = parse_multipart("multipart/form-data; boundary=XYZ", body.as_bytes().to_vec()).unwrap();
        assert_eq!(parts, vec![("game.json".into(), b"{}".to_vec()), ("cues/a.txt".into(), b"hi".to_vec())]);
        assert!(matches!(parse_multipart("application/json", vec![]), Err(ExportError::NotMultipart)));
        assert!(matches!(
            parse_multipart("multipart/form-data; boundary=XYZ", b"--XYZ\r\ngarbage".to_vec()),
            Err(ExportError::Multipart(_))
        ));
    }

    #[test]
    fn export_rejects_unsafe_and_duplicate_names() {
        let dir = tempfile::tempdir().unwrap();
        let part = |n: &str| (n.to_string(), b"{}".to_vec());
        assert!(matches!(export_bundle(&[part("../game.json")], dir.path()), Err(ExportError::UnsafePath(_))));
        assert!(matches!(export_bundle(&[part("a.json"), part("./a.json")], dir.path()), Err(ExportError::DuplicatePart(_))));
        assert!(matches!(export_bundle(&[], dir.path()), Err(ExportError::Empty)));
        assert!(!dir.path().join("..").join("game.json").exists());
    }

    #[test]
    fn invalid_bundle_leaves_nothing_behind() {
        let dir = tempfile::tempdir().unwrap();
        let err = export_bundle(&[("game.json".into(), b"{\"game_id\": 3}".to_vec())], dir.path()).unwrap_err();
        match &err {
            ExportError::Invalid(findings) => assert!(!findings.is_empty()),
            e => panic!("{e}"),
        }
        assert_eq!(err.status(), 422);
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
    }
}
