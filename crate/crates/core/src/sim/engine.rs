use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use super::SimTime;
use crate::error::SimError;

/// Handle returned by [`Scheduler::schedule`]; can be used to cancel the event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EventHandle(u64);

impl EventHandle {
    pub fn seq(self) -> u64 {
        self.0
    }
}

struct Entry<E> {
    fire_at: SimTime,
    seq: u64,
    event: E,
}

impl<E> PartialEq for Entry<E> {
    fn eq(&self, other: &Self) -> bool {
        self.fire_at == other.fire_at && self.seq == other.seq
    }
}

impl<E> Eq for Entry<E> {}

impl<E> PartialOrd for Entry<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<E> Ord for Entry<E> {
    // BinaryHeap is a max-heap; invert so the earliest (fire_at, seq) pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .fire_at
            .cmp(&self.fire_at)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Stop condition for [`Scheduler::run`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Until {
    /// Execute every event with `fire_at <= t`, then advance the clock to `t`.
    Time(SimTime),
    /// Execute until the queue is empty.
    Quiescence,
}

/// Something that reacts to events popped off the queue.
pub trait Process<E> {
    fn handle(&mut self, event: E, sched: &mut Scheduler<E>);
}

/// Single-threaded discrete-event queue. Events with equal `fire_at` run in
/// insertion order.
pub struct Scheduler<E> {
    now: SimTime,
    next_seq: u64,
    queue: BinaryHeap<Entry<E>>,
    cancelled: HashSet<u64>,
    finished: bool,
    executed: u64,
}

impl<E> Default for Scheduler<E> {
    fn default() -> Self {
        Self::new()
    }
}

impl<E> Scheduler<E> {
    pub fn new() -> Self {
        Scheduler {
            now: SimTime::ZERO,
            next_seq: 0,
            queue: BinaryHeap::new(),
            cancelled: HashSet::new(),
            finished: false,
            executed: 0,
        }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    /// Number of events executed so far.
    pub fn executed(&self) -> u64 {
        self.executed
    }

    /// Live events still queued, cancelled ones excluded.
    pub fn pending(&self) -> usize {
        self.queue.len() - self.cancelled.len()
    }

    /// Marks the run as aborted. The current event completes, nothing else runs,
    /// and further scheduling is rejected.
    pub fn finish(&mut self) {
        self.finished = true;
    }

    pub fn schedule(&mut self, delay_ms: f64, event: E) -> Result<EventHandle, SimError> {
        if !(delay_ms >= 0.0) || !delay_ms.is_finite() {
            return Err(SimError::NegativeDelay(delay_ms));
        }
        if self.finished {
            return Err(SimError::Finished);
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.queue.push(Entry {
            fire_at: self.now + delay_ms,
            seq,
            event,
        });
        Ok(EventHandle(seq))
    }

    /// Cancels a pending event. Returns false if it already ran or was cancelled.
    /// Linear in the queue length; hot paths should prefer generation tokens.
    pub fn cancel(&mut self, handle: EventHandle) -> bool {
        if handle.0 >= self.next_seq {
            return false;
        }
        let live = self.queue.iter().any(|e| e.seq == handle.0);
        live && self.cancelled.insert(handle.0)
    }

    fn pop_due(&mut self, limit: Option<SimTime>) -> Option<(SimTime, u64, E)> {
        loop {
            let head = self.queue.peek()?;
            if let Some(limit) = limit {
                if head.fire_at > limit {
                    return None;
                }
            }
            let entry = self.queue.pop().expect("peeked");
            if self.cancelled.remove(&entry.seq) {
                continue;
            }
            return Some((entry.fire_at, entry.seq, entry.event));
        }
    }

    /// Runs events until `until` is reached or the run is finished.
    pub fn run<P: Process<E>>(&mut self, process: &mut P, until: Until) -> SimTime {
        self.run_while(process, until, |_| true)
    }

    /// Like [`run`](Self::run), but also stops as soon as `keep_going` returns
    /// false after an event. The clock is then left at that event's time.
    pub fn run_while<P, F>(&mut self, process: &mut P, until: Until, mut keep_going: F) -> SimTime
    where
        P: Process<E>,
        F: FnMut(&P) -> bool,
    {
        let limit = match until {
            Until::Time(t) => Some(t),
            Until::Quiescence => None,
        };
        while !self.finished {
            let Some((fire_at, _seq, event)) = self.pop_due(limit) else {
                if let Some(t) = limit {
                    if t > self.now {
                        self.now = t;
                    }
                }
                break;
            };
            debug_assert!(fire_at >= self.now);
            self.now = fire_at;
            self.executed += 1;
            process.handle(event, self);
            if !keep_going(process) {
                break;
            }
        }
        self.now
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::SeededRng;

    #[derive(Default)]
    struct Log {
        seen: Vec<(f64, &'static str)>,
    }

    impl Process<&'static str> for Log {
        fn handle(&mut self, ev: &'static str, s: &mut Scheduler<&'static str>) {
            self.seen.push((s.now().as_ms(), ev));
        }
    }

    #[test]
    fn equal_time_is_fifo() {
        let mut s = Scheduler::new();
        s.schedule(0.0, "A").unwrap();
        s.schedule(0.0, "B").unwrap();
        let mut log = Log::default();
        s.run(&mut log, Until::Quiescence);
        assert_eq!(log.seen, vec![(0.0, "A"), (0.0, "B")]);
    }

    #[test]
    fn earlier_time_first() {
        let mut s = Scheduler::new();
        s.schedule(5.0, "A").unwrap();
        s.schedule(3.0, "B").unwrap();
        let mut log = Log::default();
        s.run(&mut log, Until::Quiescence);
        assert_eq!(log.seen, vec![(3.0, "B"), (5.0, "A")]);
    }

    #[test]
    fn negative_delay_rejected() {
        let mut s: Scheduler<()> = Scheduler::new();
        assert!(matches!(s.schedule(-1.0, ()), Err(SimError::NegativeDelay(_))));
        assert!(s.schedule(f64::NAN, ()).is_err());
    }

    #[test]
    fn empty_queue_runs_to_horizon() {
        let mut s: Scheduler<&'static str> = Scheduler::new();
        let mut log = Log::default();
        let end = s.run(&mut log, Until::Time(SimTime::from_ms(100.0)));
        assert_eq!(end.as_ms(), 100.0);
        assert!(log.seen.is_empty());
    }

    #[test]
    fn quiescence_returns_last_event_time() {
        let mut s = Scheduler::new();
        s.schedule(7.0, "x").unwrap();
        let mut log = Log::default();
        assert_eq!(s.run(&mut log, Until::Quiescence).as_ms(), 7.0);
    }

    struct Ticker {
        count: u32,
    }

    impl Process<()> for Ticker {
        fn handle(&mut self, _: (), s: &mut Scheduler<()>) {
            self.count += 1;
            s.schedule(1.0, ()).unwrap();
        }
    }

    #[test]
    fn periodic_event_inclusive_horizon() {
        let mut s = Scheduler::new();
        s.schedule(0.0, ()).unwrap();
        let mut t = Ticker { count: 0 };
        let end = s.run(&mut t, Until::Time(SimTime::from_ms(10.0)));
        assert_eq!(t.count, 11);
        assert_eq!(end.as_ms(), 10.0);
    }

    #[test]
    fn cancel_skips_event() {
        let mut s = Scheduler::new();
        let h = s.schedule(1.0, "gone").unwrap();
        s.schedule(2.0, "kept").unwrap();
        assert!(s.cancel(h));
        assert!(!s.cancel(h));
        assert_eq!(s.pending(), 1);
        let mut log = Log::default();
        s.run(&mut log, Until::Quiescence);
        assert_eq!(log.seen, vec![(2.0, "kept")]);
    }

    #[test]
    fn finish_stops_run_and_rejects_schedule() {
        struct Stopper;
        impl Process<u32> for Stopper {
            fn handle(&mut self, ev: u32, s: &mut Scheduler<u32>) {
                if ev == 1 {
                    s.finish();
                }
            }
        }
        let mut s = Scheduler::new();
        s.schedule(1.0, 1).unwrap();
        s.schedule(2.0, 2).unwrap();
        let end = s.run(&mut Stopper, Until::Quiescence);
        assert_eq!(end.as_ms(), 1.0);
        assert_eq!(s.executed(), 1);
        assert!(matches!(s.schedule(0.0, 3), Err(SimError::Finished)));
    }

    struct Trace {
        rng: SeededRng,
        order: Vec<(u64, u32)>,
        spawned: u32,
    }

    impl Process<u32> for Trace {
        fn handle(&mut self, id: u32, s: &mut Scheduler<u32>) {
            self.order.push((s.now().as_ms().to_bits(), id));
            if self.spawned < 1000 {
                self.spawned += 1;
                let d = (self.rng.next_f64() * 50.0).floor();
                s.schedule(d, self.spawned).unwrap();
            }
        }
    }

    fn random_trace(seed: u64) -> Vec<(u64, u32)> {
        let mut s = Scheduler::new();
        let mut t = Trace {
            rng: SeededRng::new(seed),
            order: Vec::new(),
            spawned: 0,
        };
        for i in 0..8 {
            s.schedule(0.0, 10_000 + i).unwrap();
        }
        s.run(&mut t, Until::Quiescence);
        t.order
    }

    #[test]
    fn random_program_is_deterministic() {
        let a = random_trace(99);
        let b = random_trace(99);
        assert_eq!(a.len(), 1008);
        assert_eq!(a, b);
        assert_ne!(a, random_trace(100));
    }
}
