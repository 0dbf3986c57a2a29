//! Newline-delimited JSON protocol to a remote policy service.
//!
//! On connect the client sends `{"proto":1,"planes":N}` and expects the same
//! line back. Each request line is
//! `{"id":u64,"size":19,"set":"extended","planes":"<base64>","max_moves":u32}`
//! where `planes` holds little-endian float32 values, plane-major then
//! row-major. Each response line is
//! `{"id":u64,"moves":[{"c":row*size+col,"p":prob}],"error":"..."}` with
//! `error` optional.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::sync::Mutex;
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine as _;
use serde::{Deserialize, Serialize};

use crate::board::{Coord, Move, Position};
use crate::features::{extract, FeatureSet, FeatureTensor};

use super::{EvalError, Evaluator, EvaluatorRequest, EvaluatorResponse, PolicyResult};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hello {
    pub proto: u32,
    pub planes: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireRequest {
    pub id: u64,
    pub size: u32,
    pub set: FeatureSet,
    pub planes: String,
    pub max_moves: u32,
}

impl WireRequest {
    pub fn new(id: u64, tensor: &FeatureTensor, max_moves: u32) -> WireRequest {
        WireRequest {
            id,
            size: tensor.size() as u32,
            set: tensor.set(),
            planes: BASE64.encode(tensor.to_le_bytes()),
            max_moves,
        }
    }

    /// Decodes the planes; the perspective is not carried on the wire and is
    /// reported as the player given.
    pub fn tensor(&self, perspective: crate::board::Player) -> Option<FeatureTensor> {
        let bytes = BASE64.decode(&self.planes).ok()?;
        FeatureTensor::from_le_bytes(self.size as usize, self.set, perspective, &bytes)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireMove {
    pub c: u16,
    pub p: f32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireResponse {
    pub id: u64,
    #[serde(default)]
    pub moves: Vec<WireMove>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl WireResponse {
    /// Converts to a policy over moves legal in `pos`, renormalised.
    pub fn to_policy(&self, pos: &Position) -> Result<PolicyResult, EvalError> {
        if let Some(message) = &self.error {
            return Err(EvalError::Remote { id: self.id, message: message.clone() });
        }
        let n = pos.size();
        let entries = self
            .moves
            .iter()
            .filter(|m| (m.c as usize) < n * n && m.p.is_finite())
            .map(|m| (Move::Place(Coord::from_index(m.c as usize, n)), m.p))
            .collect();
        Ok(PolicyResult::new(entries, n).masked(pos))
    }
}

#[derive(Clone, Debug)]
pub struct ClientConfig {
    pub feature_set: FeatureSet,
    /// Rank level (0..=9) written into the opponent rank planes.
    pub opponent_rank: u8,
    pub batch_window: Duration,
    pub max_batch: usize,
    pub timeout: Duration,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig {
            feature_set: FeatureSet::Extended,
            opponent_rank: 0,
            batch_window: Duration::from_millis(2),
            max_batch: 128,
            timeout: Duration::from_secs(5),
        }
    }
}

struct Job {
    request: WireRequest,
    reply: Sender<Result<WireResponse, EvalError>>,
}

struct Connection {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

impl Connection {
    fn open(addr: &str, planes: usize, timeout: Duration) -> Result<Connection, EvalError> {
        let unavailable = |e: std::io::Error| EvalError::Unavailable(format!("{addr}: {e}"));
        let sock = addr
            .to_socket_addrs()
            .map_err(unavailable)?
            .next()
            .ok_or_else(|| EvalError::Unavailable(format!("{addr}: no address")))?;
        let stream = TcpStream::connect_timeout(&sock, timeout).map_err(unavailable)?;
        stream.set_read_timeout(Some(timeout)).map_err(unavailable)?;
        stream.set_nodelay(true).map_err(unavailable)?;
        let writer = stream.try_clone().map_err(unavailable)?;
        let mut conn = Connection { reader: BufReader::new(stream), writer };
        let hello = Hello { proto: PROTOCOL_VERSION, planes: planes as u32 };
        conn.send_line(&serde_json::to_string(&hello).expect("hello serialises"))?;
        let line = conn.read_line()?;
        let reply: Hello =
            serde_json::from_str(&line).map_err(|e| EvalError::Protocol(format!("bad handshake '{}': {e}", line.trim())))?;
        if reply != hello {
            return Err(EvalError::Protocol(format!(
                "server speaks proto {} with {} planes, expected proto {} with {planes}",
                reply.proto, reply.planes, PROTOCOL_VERSION
            )));
        }
        Ok(conn)
    }

    fn send_line(&mut self, line: &str) -> Result<(), EvalError> {
        self.writer
            .write_all(line.as_bytes())
            .and_then(|_| self.writer.write_all(b"\n"))
            .map_err(|e| EvalError::Unavailable(e.to_string()))
    }

    fn read_line(&mut self) -> Result<String, EvalError> {
        let mut line = String::new();
        match self.reader.read_line(&mut line) {
            Ok(0) => Err(EvalError::Unavailable("connection closed".into())),
            Ok(_) => Ok(line),
            Err(e) => Err(EvalError::Unavailable(e.to_string())),
        }
    }

    fn round_trip(&mut self, batch: &[Job]) -> Result<HashMap<u64, WireResponse>, EvalError> {
        let mut payload = String::new();
        for job in batch {
            payload.push_str(&serde_json::to_string(&job.request).expect("request serialises"));
            payload.push('\n');
        }
        self.writer.write_all(payload.as_bytes()).map_err(|e| EvalError::Unavailable(e.to_string()))?;
        let mut out = HashMap::with_capacity(batch.len());
        while out.len() < batch.len() {
            let line = self.read_line()?;
            if line.trim().is_empty() {
                continue;
            }
            let resp: WireResponse =
                serde_json::from_str(&line).map_err(|e| EvalError::Protocol(format!("bad response: {e}")))?;
            out.insert(resp.id, resp);
        }
        Ok(out)
    }
}

/// Blocking client that aggregates concurrent requests into wire batches.
pub struct TcpEvaluator {
    config: ClientConfig,
    jobs: Mutex<Option<Sender<Job>>>,
    next_id: AtomicU64,
    worker: Mutex<Option<JoinHandle<()>>>,
}

impl TcpEvaluator {
    /// Connects and performs the version handshake.
    pub fn connect(addr: &str, config: ClientConfig) -> Result<TcpEvaluator, EvalError> {
        let addr = addr.trim_start_matches("tcp://").to_string();
        let conn = Connection::open(&addr, config.feature_set.planes(), config.timeout)?;
        let (tx, rx) = mpsc::channel();
        let cfg = config.clone();
        let worker = thread::Builder::new()
            .name("policy-batcher".into())
            .spawn(move || batch_loop(rx, conn, addr, cfg))
            .map_err(|e| EvalError::Unavailable(e.to_string()))?;
        Ok(TcpEvaluator {
            config,
            jobs: Mutex::new(Some(tx)),
            next_id: AtomicU64::new(1),
            worker: Mutex::new(Some(worker)),
        })
    }

    pub fn config(&self) -> &ClientConfig {
        &self.config
    }

    fn submit(&self, pos: &Position, max_moves: u32) -> Result<Receiver<Result<WireResponse, EvalError>>, EvalError> {
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        let tensor = extract(pos, pos.to_move(), self.config.opponent_rank, self.config.feature_set);
        let (reply, rx) = mpsc::channel();
        let job = Job { request: WireRequest::new(id, &tensor, max_moves), reply };
        let guard = self.jobs.lock().expect("job queue poisoned");
        let tx = guard.as_ref().ok_or_else(|| EvalError::Unavailable("client shut down".into()))?;
        tx.send(job).map_err(|_| EvalError::Unavailable("batcher stopped".into()))?;
        Ok(rx)
    }

    fn wait(&self, rx: Receiver<Result<WireResponse, EvalError>>) -> Result<WireResponse, EvalError> {
        // the batcher enforces the socket timeout; allow for one batch window on top
        let limit = self.config.timeout + self.config.batch_window * 2 + Duration::from_millis(100);
        rx.recv_timeout(limit).map_err(|_| EvalError::Unavailable("timed out waiting for evaluator".into()))?
    }
}

impl Evaluator for TcpEvaluator {
    fn evaluate_batch(&self, requests: &[EvaluatorRequest<'_>]) -> Result<Vec<EvaluatorResponse>, EvalError> {
        let pending: Vec<_> = requests
            .iter()
            .map(|r| self.submit(r.position, r.max_moves))
            .collect::<Result<_, _>>()?;
        requests
            .iter()
            .zip(pending)
            .map(|(r, rx)| {
                let resp = self.wait(rx)?;
                Ok(EvaluatorResponse { id: r.id, policy: resp.to_policy(r.position)? })
            })
            .collect()
    }

    fn evaluate(&self, position: &Position, max_moves: usize) -> Result<PolicyResult, EvalError> {
        let rx = self.submit(position, max_moves as u32)?;
        self.wait(rx)?.to_policy(position)
    }
}

impl Drop for TcpEvaluator {
    fn drop(&mut self) {
        if let Ok(mut jobs) = self.jobs.lock() {
            jobs.take();
        }
        if let Some(handle) = self.worker.lock().ok().and_then(|mut w| w.take()) {
            let _ = handle.join();
        }
    }
}

fn batch_loop(rx: Receiver<Job>, conn: Connection, addr: String, cfg: ClientConfig) {
    let mut conn = Some(conn);
    while let Ok(first) = rx.recv() {
        let mut batch = vec![first];
        let deadline = Instant::now() + cfg.batch_window;
        while batch.len() < cfg.max_batch {
            let now = Instant::now();
            if now >= deadline {
                break;
            }
            match rx.recv_timeout(deadline - now) {
                Ok(job) => batch.push(job),
                Err(RecvTimeoutError::Timeout) | Err(RecvTimeoutError::Disconnected) => break,
            }
        }
        if conn.is_none() {
            conn = Connection::open(&addr, cfg.feature_set.planes(), cfg.timeout).ok();
        }
        let result = match conn.as_mut() {
            Some(c) => c.round_trip(&batch),
            None => Err(EvalError::Unavailable(format!("{addr}: reconnect failed"))),
        };
        match result {
            Ok(mut responses) => {
                for job in batch {
                    let r = responses
                        .remove(&job.request.id)
                        .ok_or_else(|| EvalError::Protocol(format!("no response for id {}", job.request.id)));
                    let _ = job.reply.send(r);
                }
            }
            Err(e) => {
                conn = None;
                for job in batch {
                    let _ = job.reply.send(Err(e.clone()));
                }
            }
        }
    }
}
