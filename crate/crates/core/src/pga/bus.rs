use std::collections::VecDeque;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use super::worker::{MigrationMessage, Snapshot};

#[derive(Default)]
struct Mailbox {
    migrants: VecDeque<MigrationMessage>,
    snapshot: Option<Arc<Snapshot>>,
}

/// Full-mesh exchange between blocks: one bounded migrant queue and one
/// latest-snapshot slot per block. Sends never block; a full queue loses its
/// oldest message.
pub struct MigrationBus {
    boxes: Vec<Mutex<Mailbox>>,
    capacity: usize,
    sent: AtomicU64,
    dropped: AtomicU64,
}

impl MigrationBus {
    pub fn new(blocks: usize, capacity: usize) -> Self {
        assert!(capacity > 0, "queue capacity must be positive");
        MigrationBus {
            boxes: (0..blocks).map(|_| Mutex::default()).collect(),
            capacity,
            sent: AtomicU64::new(0),
            dropped: AtomicU64::new(0),
        }
    }

    pub fn publish(&self, snapshot: Snapshot) {
        let i = snapshot.block_index;
        self.boxes[i].lock().expect("mailbox poisoned").snapshot = Some(Arc::new(snapshot));
    }

    /// Latest published snapshots of every block other than `block`.
    pub fn snapshots_except(&self, block: usize) -> Vec<Arc<Snapshot>> {
        self.boxes
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != block)
            .filter_map(|(_, b)| b.lock().expect("mailbox poisoned").snapshot.clone())
            .collect()
    }

    pub fn send(&self, msg: MigrationMessage) {
        let mut mailbox = self.boxes[msg.dest_block].lock().expect("mailbox poisoned");
        if mailbox.migrants.len() == self.capacity {
            mailbox.migrants.pop_front();
            self.dropped.fetch_add(1, Ordering::Relaxed);
        }
        mailbox.migrants.push_back(msg);
        self.sent.fetch_add(1, Ordering::Relaxed);
    }

    pub fn drain(&self, block: usize) -> Vec<MigrationMessage> {
        self.boxes[block].lock().expect("mailbox poisoned").migrants.drain(..).collect()
    }

    pub fn sent(&self) -> u64 {
        self.sent.load(Ordering::Relaxed)
    }

    pub fn dropped(&self) -> u64 {
        self.dropped.load(Ordering::Relaxed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ga::Chromosome;
    use crate::BitString;

    fn msg(dest: usize, tag: u64) -> MigrationMessage {
        MigrationMessage {
            chromosome: Chromosome::new(BitString::zeros(4)),
            source_block: 1 - dest,
            dest_block: dest,
            source_generation: tag,
        }
    }

    #[test]
    fn overflow_drops_the_oldest() {
        let bus = MigrationBus::new(2, 3);
        for tag in 0..5 {
            bus.send(msg(0, tag));
        }
        let got: Vec<u64> = bus.drain(0).iter().map(|m| m.source_generation).collect();
        assert_eq!(got, vec![2, 3, 4]);
        assert_eq!((bus.sent(), bus.dropped()), (5, 2));
        assert!(bus.drain(0).is_empty());
        assert!(bus.drain(1).is_empty());
    }
}
