use std::collections::VecDeque;
use std::time::{Duration, Instant};

/// Monotonic time source. Abstracted so pacing can be tested without sleeping.
pub trait Clock {
    /// Time elapsed since an arbitrary fixed origin.
    fn now(&self) -> Duration;
    fn sleep(&self, duration: Duration);
}

impl<C: Clock + ?Sized> Clock for &C {
    fn now(&self) -> Duration {
        (**self).now()
    }

    fn sleep(&self, duration: Duration) {
        (**self).sleep(duration)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SystemClock {
    origin: Instant,
}

impl SystemClock {
    pub fn new() -> Self {
        SystemClock { origin: Instant::now() }
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.origin.elapsed()
    }

    fn sleep(&self, duration: Duration) {
        std::thread::sleep(duration)
    }
}

/// Sliding-window request budget: at most `max_requests` in any `window`.
#[derive(Debug, Clone)]
pub struct RateLimit {
    max_requests: usize,
    window: Duration,
    recent: VecDeque<Duration>,
}

pub const RATE_WINDOW: Duration = Duration::from_secs(30);
pub const ANONYMOUS_BUDGET: usize = 5;
pub const KEYED_BUDGET: usize = 50;

impl RateLimit {
    pub fn new(max_requests: usize, window: Duration) -> Self {
        RateLimit { max_requests, window, recent: VecDeque::with_capacity(max_requests) }
    }

    /// Public NVD limits: 5 requests per 30 s, or 50 with an API key.
    pub fn nvd(has_api_key: bool) -> Self {
        let budget = if has_api_key { KEYED_BUDGET } else { ANONYMOUS_BUDGET };
        Self::new(budget, RATE_WINDOW)
    }

    /// No pacing at all (replay, tests).
    pub fn unlimited() -> Self {
        Self::new(0, Duration::ZERO)
    }

    /// Blocks until one more request fits in the window, then records it.
    pub fn acquire<C: Clock>(&mut self, clock: &C) {
        if self.max_requests == 0 {
            return;
        }
        let now = clock.now();
        self.evict(now);
        if self.recent.len() >= self.max_requests {
            let oldest = self.recent[0];
            let wait = (oldest + self.window).saturating_sub(now);
            if !wait.is_zero() {
                clock.sleep(wait);
            }
            self.evict(clock.now());
        }
        self.recent.push_back(clock.now());
    }

    fn evict(&mut self, now: Duration) {
        while self.recent.front().is_some_and(|&t| t + self.window <= now) {
            self.recent.pop_front();
        }
    }
}

/// Exponential backoff for throttled or failing requests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub initial_delay: Duration,
    pub factor: u32,
    /// Total attempts per request, including the first.
    pub max_attempts: u32,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { initial_delay: Duration::from_secs(6), factor: 2, max_attempts: 5 }
    }
}

impl RetryPolicy {
    /// Delay before the attempt that follows failure number `failures` (1-based).
    pub fn delay(&self, failures: u32) -> Duration {
        self.initial_delay * self.factor.saturating_pow(failures.saturating_sub(1))
    }
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use std::cell::RefCell;

    /// Virtual clock: `sleep` advances time instantly and is logged.
    #[derive(Default)]
    pub struct ManualClock {
        now: RefCell<Duration>,
        pub sleeps: RefCell<Vec<Duration>>,
    }

    impl ManualClock {
        pub fn advance(&self, d: Duration) {
            *self.now.borrow_mut() += d;
        }
    }

    impl Clock for ManualClock {
        fn now(&self) -> Duration {
            *self.now.borrow()
        }

        fn sleep(&self, duration: Duration) {
            self.sleeps.borrow_mut().push(duration);
            self.advance(duration);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::testing::ManualClock;
    use super::*;

    #[test]
    fn backoff_schedule() {
        let p = RetryPolicy::default();
        let delays: Vec<u64> = (1..5).map(|n| p.delay(n).as_secs()).collect();
        assert_eq!(delays, [6, 12, 24, 48]);
    }

    #[test]
    fn never_exceeds_budget_in_any_window() {
        let clock = ManualClock::default();
        let mut limit = RateLimit::nvd(false);
        let mut stamps = Vec::new();
        for i in 0..23 {
            if i % 3 == 0 {
                clock.advance(Duration::from_secs(2));
            }
            limit.acquire(&clock);
            stamps.push(clock.now());
        }
        for (i, &t) in stamps.iter().enumerate() {
            let in_window = stamps[i..].iter().filter(|&&s| s < t + RATE_WINDOW).count();
            assert!(in_window <= ANONYMOUS_BUDGET, "{in_window} requests within 30 s of {t:?}");
        }
        assert!(!clock.sleeps.borrow().is_empty());
    }

    #[test]
    fn first_burst_is_free() {
        let clock = ManualClock::default();
        let mut limit = RateLimit::nvd(true);
        for _ in 0..KEYED_BUDGET {
            limit.acquire(&clock);
        }
        assert!(clock.sleeps.borrow().is_empty());
        limit.acquire(&clock);
        assert_eq!(*clock.sleeps.borrow(), [RATE_WINDOW]);
    }

    #[test]
    fn unlimited_never_sleeps() {
        let clock = ManualClock::default();
        let mut limit = RateLimit::unlimited();
        for _ in 0..1000 {
            limit.acquire(&clock);
        }
        assert!(clock.sleeps.borrow().is_empty());
    }
}
