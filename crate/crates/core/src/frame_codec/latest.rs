//! Single-slot hand-off between a live frame producer and a processor.
//!
//! The producer never blocks: publishing overwrites any frame the consumer has
//! not taken yet, so a lagging consumer always sees the newest reading.

use std::sync::{Condvar, Mutex};
use std::time::Duration;

#[derive(Debug, Default)]
struct Slot<T> {
    value: Option<T>,
    dropped: u64,
    closed: bool,
}

#[derive(Debug)]
pub struct LatestFrame<T> {
    slot: Mutex<Slot<T>>,
    ready: Condvar,
}

impl<T> Default for LatestFrame<T> {
    fn default() -> Self {
        Self {
            slot: Mutex::new(Slot {
                value: None,
                dropped: 0,
                closed: false,
            }),
            ready: Condvar::new(),
        }
    }
}

impl<T> LatestFrame<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stores `value`, replacing (and counting) any unconsumed frame.
    pub fn publish(&self, value: T) {
        let mut slot = self.slot.lock().expect("slot poisoned");
        if slot.value.replace(value).is_some() {
            slot.dropped += 1;
        }
        self.ready.notify_one();
    }

    /// Marks the stream finished; waiting consumers wake up with `None` once
    /// the slot is empty.
    pub fn close(&self) {
        self.slot.lock().expect("slot poisoned").closed = true;
        self.ready.notify_all();
    }

    pub fn try_take(&self) -> Option<T> {
        self.slot.lock().expect("slot poisoned").value.take()
    }

    /// Blocks until a frame is available or the stream is closed.
    pub fn take(&self) -> Option<T> {
        let mut slot = self.slot.lock().expect("slot poisoned");
        loop {
            if let Some(v) = slot.value.take() {
                return Some(v);
            }
            if slot.closed {
                return None;
            }
            slot = self.ready.wait(slot).expect("slot poisoned");
        }
    }

    /// Like [`take`](Self::take) but gives up after `timeout`.
    pub fn take_timeout(&self, timeout: Duration) -> Option<T> {
        let slot = self.slot.lock().expect("slot poisoned");
        let (mut slot, _) = self
            .ready
            .wait_timeout_while(slot, timeout, |s| s.value.is_none() && !s.closed)
            .expect("slot poisoned");
        slot.value.take()
    }

    /// Frames overwritten before the consumer took them.
    pub fn dropped(&self) -> u64 {
        self.slot.lock().expect("slot poisoned").dropped
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;
    use std::thread;

    #[test]
    fn newest_wins() {
        let slot = LatestFrame::new();
        slot.publish(1);
        slot.publish(2);
        slot.publish(3);
        assert_eq!(slot.try_take(), Some(3));
        assert_eq!(slot.try_take(), None);
        assert_eq!(slot.dropped(), 2);
    }

    #[test]
    fn consumer_sees_increasing_sequence_and_final_frame() {
        let slot = Arc::new(LatestFrame::new());
        let producer = {
            let slot = Arc::clone(&slot);
            thread::spawn(move || {
                for i in 0..10_000u32 {
                    slot.publish(i);
                }
                slot.close();
            })
        };
        let mut seen = Vec::new();
        while let Some(v) = slot.take() {
            seen.push(v);
        }
        producer.join().unwrap();
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*seen.last().unwrap(), 9_999);
        assert_eq!(seen.len() as u64 + slot.dropped(), 10_000);
    }

    #[test]
    fn timeout_on_empty() {
        let slot: LatestFrame<u8> = LatestFrame::new();
        assert_eq!(slot.take_timeout(Duration::from_millis(5)), None);
    }
}
