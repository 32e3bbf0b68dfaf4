use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, RecvTimeoutError};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::Duration;

/// Time allowed for cooperative cancellation before the hard fallback runs.
pub const GRACE: Duration = Duration::from_secs(1);

/// Raises a cancellation flag once a deadline passes.
///
/// If the guarded work has not finished `GRACE` after the flag went up, the
/// `hard` callback runs on the watchdog thread.
pub struct Watchdog {
    done: Option<mpsc::Sender<()>>,
    thread: Option<JoinHandle<()>>,
}

impl Watchdog {
    pub fn start(flag: Arc<AtomicBool>, timeout: Option<Duration>, hard: impl FnOnce() + Send + 'static) -> Self {
        let Some(timeout) = timeout else {
            return Watchdog { done: None, thread: None };
        };
        let (tx, rx) = mpsc::channel::<()>();
        let thread = std::thread::spawn(move || {
            if rx.recv_timeout(timeout) != Err(RecvTimeoutError::Timeout) {
                return;
            }
            flag.store(true, Ordering::Relaxed);
            if rx.recv_timeout(GRACE) == Err(RecvTimeoutError::Timeout) {
                hard();
            }
        });
        Watchdog { done: Some(tx), thread: Some(thread) }
    }

    /// The guarded work finished. Returns whether the deadline had passed.
    pub fn stop(mut self, flag: &AtomicBool) -> bool {
        drop(self.done.take());
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
        flag.load(Ordering::Relaxed)
    }
}
