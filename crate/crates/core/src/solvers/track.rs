//! Incumbent bookkeeping shared by the anytime solvers.

use std::sync::atomic::{AtomicBool, AtomicI64, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use crate::agents::AgentSet;
use crate::game::Value;

use super::{Improvement, IncumbentHook, TracePoint};

/// Best structure so far plus its improvement trace.
pub(crate) struct Tracker<'a> {
    start: Instant,
    best: Option<(Value, Vec<AgentSet>)>,
    trace: Vec<TracePoint>,
    hook: Option<IncumbentHook<'a>>,
}

impl<'a> Tracker<'a> {
    pub(crate) fn new(start: Instant, hook: Option<IncumbentHook<'a>>) -> Self {
        Tracker {
            start,
            best: None,
            trace: Vec::new(),
            hook,
        }
    }

    pub(crate) fn into_parts(self) -> (Option<(Value, Vec<AgentSet>)>, Vec<TracePoint>) {
        (self.best, self.trace)
    }
}

/// Something that holds the incumbent. Updates apply only on strict
/// improvement; the first offer is always taken.
pub(crate) trait IncumbentSink {
    fn best_value(&self) -> Option<Value>;

    fn offer(&mut self, value: Value, build: &mut dyn FnMut() -> Vec<AgentSet>) -> bool;

    /// Whether `value` would currently be accepted.
    #[inline]
    fn improves(&self, value: Value) -> bool {
        self.best_value().is_none_or(|b| b < value)
    }
}

impl IncumbentSink for Tracker<'_> {
    #[inline]
    fn best_value(&self) -> Option<Value> {
        self.best.as_ref().map(|b| b.0)
    }

    fn offer(&mut self, value: Value, build: &mut dyn FnMut() -> Vec<AgentSet>) -> bool {
        if !self.improves(value) {
            return false;
        }
        let blocks = build();
        let elapsed = self.start.elapsed();
        self.trace.push(TracePoint { elapsed, value });
        if let Some(hook) = self.hook.as_mut() {
            hook(&Improvement {
                elapsed,
                value,
                blocks: &blocks,
            });
        }
        self.best = Some((value, blocks));
        true
    }
}

/// A tracker shared between concurrent workers. The value is mirrored in an
/// atomic so bound checks do not take the lock.
pub(crate) struct SharedTracker<'a> {
    inner: Mutex<Tracker<'a>>,
    value: AtomicI64,
    set: AtomicBool,
}

impl<'a> SharedTracker<'a> {
    pub(crate) fn new(tracker: Tracker<'a>) -> Self {
        SharedTracker {
            inner: Mutex::new(tracker),
            value: AtomicI64::new(Value::MIN),
            set: AtomicBool::new(false),
        }
    }

    pub(crate) fn into_inner(self) -> Tracker<'a> {
        self.inner.into_inner().unwrap_or_else(|e| e.into_inner())
    }
}

impl IncumbentSink for &SharedTracker<'_> {
    #[inline]
    fn best_value(&self) -> Option<Value> {
        if self.set.load(Ordering::Acquire) {
            Some(self.value.load(Ordering::Acquire))
        } else {
            None
        }
    }

    fn offer(&mut self, value: Value, build: &mut dyn FnMut() -> Vec<AgentSet>) -> bool {
        // Cheap pre-check; the authoritative compare happens under the lock.
        if !self.improves(value) {
            return false;
        }
        let mut guard = self.inner.lock().unwrap_or_else(|e| e.into_inner());
        let accepted = guard.offer(value, build);
        if accepted {
            self.value.store(value, Ordering::Release);
            self.set.store(true, Ordering::Release);
        }
        accepted
    }
}
