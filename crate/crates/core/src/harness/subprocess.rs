use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::Duration;

use super::adapter::{AdapterError, ModelAdapter};
use crate::language::{tokens_to_string, Token};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);
pub const DEFAULT_RESTARTS: usize = 3;

struct Worker {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
}

impl Worker {
    fn spawn(command: &str) -> Result<Worker, AdapterError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| AdapterError::Io(format!("cannot start {command:?}: {e}")))?;
        let stdin = child.stdin.take().expect("stdin is piped");
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, lines) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Worker { child, stdin, lines })
    }

    fn exit_status(&mut self) -> String {
        match self.child.try_wait() {
            Ok(Some(status)) => status.to_string(),
            _ => "output closed".into(),
        }
    }

    fn ask(&mut self, line: &str, timeout: Duration) -> Result<String, AdapterError> {
        if let Ok(extra) = self.lines.try_recv() {
            return Err(AdapterError::ProtocolViolation(format!("unexpected extra line {extra:?}")));
        }
        if writeln!(self.stdin, "{line}").and_then(|_| self.stdin.flush()).is_err() {
            return Err(AdapterError::ChildExited(self.exit_status()));
        }
        match self.lines.recv_timeout(timeout) {
            Ok(reply) => Ok(reply),
            Err(RecvTimeoutError::Timeout) => Err(AdapterError::Timeout(timeout)),
            Err(RecvTimeoutError::Disconnected) => {
                let _ = self.child.wait();
                Err(AdapterError::ChildExited(self.exit_status()))
            }
        }
    }

    fn kill(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// An external model process speaking a line protocol: one input line in,
/// one prediction line out, flushed per line.
///
/// With a pool of several processes, inputs are assigned round-robin by call
/// order. A process that exits, times out or breaks the protocol is replaced,
/// up to `max_restarts` times over the adapter's lifetime; an input whose
/// process exited is retried on the replacement.
pub struct SubprocessAdapter {
    command: String,
    timeout: Duration,
    max_restarts: usize,
    restarts: usize,
    workers: Vec<Option<Worker>>,
    calls: usize,
}

impl SubprocessAdapter {
    pub fn new(command: &str, timeout: Duration, pool: usize) -> Result<Self, AdapterError> {
        let workers = (0..pool.max(1)).map(|_| Worker::spawn(command).map(Some)).collect::<Result<_, _>>()?;
        Ok(SubprocessAdapter {
            command: command.to_string(),
            timeout,
            max_restarts: DEFAULT_RESTARTS,
            restarts: 0,
            workers,
            calls: 0,
        })
    }

    pub fn with_max_restarts(mut self, max_restarts: usize) -> Self {
        self.max_restarts = max_restarts;
        self
    }

    pub fn restarts(&self) -> usize {
        self.restarts
    }

    fn replace(&mut self, slot: usize) -> bool {
        if let Some(mut w) = self.workers[slot].take() {
            w.kill();
        }
        if self.restarts >= self.max_restarts {
            return false;
        }
        self.restarts += 1;
        match Worker::spawn(&self.command) {
            Ok(w) => {
                self.workers[slot] = Some(w);
                true
            }
            Err(_) => false,
        }
    }
}

impl ModelAdapter for SubprocessAdapter {
    fn id(&self) -> String {
        format!("cmd:{}", self.command)
    }

    fn predict(&mut self, src: &[Token]) -> Result<Vec<String>, AdapterError> {
        let slot = self.calls % self.workers.len();
        self.calls += 1;
        let line = tokens_to_string(src);
        loop {
            let Some(worker) = self.workers[slot].as_mut() else {
                return Err(AdapterError::ChildExited("restart limit reached".into()));
            };
            match worker.ask(&line, self.timeout) {
                Ok(reply) => return Ok(reply.split_whitespace().map(str::to_string).collect()),
                Err(e @ AdapterError::ChildExited(_)) => {
                    if !self.replace(slot) {
                        return Err(e);
                    }
                }
                Err(e) => {
                    self.replace(slot);
                    return Err(e);
                }
            }
        }
    }
}

impl Drop for SubprocessAdapter {
    fn drop(&mut self) {
        for w in self.workers.iter_mut().flatten() {
            w.kill();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::{tokenize, Lexicon};

    fn tokens(text: &str) -> Vec<Token> {
        tokenize(text, &Lexicon::base()).unwrap()
    }

    #[test]
    fn echoing_child() {
        let mut a = SubprocessAdapter::new("cat", Duration::from_secs(5), 2).unwrap();
        assert_eq!(a.predict(&tokens("copy A B")).unwrap(), ["copy", "A", "B"]);
        assert_eq!(a.predict(&tokens("reverse C")).unwrap(), ["reverse", "C"]);
    }

    #[test]
    fn hanging_child_times_out() {
        let mut a = SubprocessAdapter::new("sleep 30", Duration::from_millis(200), 1).unwrap();
        assert!(matches!(a.predict(&tokens("copy A")), Err(AdapterError::Timeout(_))));
    }

    #[test]
    fn exiting_child_is_restarted_up_to_the_cap() {
        // answers one line, then exits
        let mut a = SubprocessAdapter::new("head -n 1", Duration::from_secs(5), 1).unwrap().with_max_restarts(2);
        assert_eq!(a.predict(&tokens("copy A")).unwrap(), ["copy", "A"]);
        assert_eq!(a.predict(&tokens("copy B")).unwrap(), ["copy", "B"]);
        assert_eq!(a.predict(&tokens("copy C")).unwrap(), ["copy", "C"]);
        assert!(matches!(a.predict(&tokens("copy D")), Err(AdapterError::ChildExited(_))));
        assert_eq!(a.restarts(), 2);
    }

    #[test]
    fn extra_lines_break_the_protocol() {
        let mut a = SubprocessAdapter::new("while read l; do echo \"$l\"; echo extra; done", Duration::from_secs(5), 1)
            .unwrap();
        assert!(a.predict(&tokens("copy A")).is_ok());
        thread::sleep(Duration::from_millis(100));
        assert!(matches!(a.predict(&tokens("copy B")), Err(AdapterError::ProtocolViolation(_))));
    }
}
