//! Size caps for the exhaustive routines.
//!
//! Every capped routine has a default. `KLADDER_MAX_N` replaces all defaults
//! process-wide, and [`with_max_n`] replaces them for the current thread.

use std::cell::Cell;

use crate::error::{Error, Result};

thread_local! {
    static OVERRIDE: Cell<Option<usize>> = const { Cell::new(None) };
}

fn env_cap() -> Option<usize> {
    static ENV: std::sync::OnceLock<Option<usize>> = std::sync::OnceLock::new();
    *ENV.get_or_init(|| std::env::var("KLADDER_MAX_N").ok().and_then(|s| s.trim().parse().ok()))
}

/// The cap in force for a routine whose default is `default`.
pub fn cap(default: usize) -> usize {
    OVERRIDE.with(|o| o.get()).or_else(env_cap).unwrap_or(default)
}

/// Fails with [`Error::SizeLimit`] when `actual` exceeds the cap.
pub fn check(what: &'static str, actual: usize, default: usize) -> Result<()> {
    let limit = cap(default);
    if actual > limit {
        Err(Error::SizeLimit { what, limit, actual })
    } else {
        Ok(())
    }
}

/// Runs `f` with every cap replaced by `n` on this thread.
pub fn with_max_n<T>(n: usize, f: impl FnOnce() -> T) -> T {
    let prev = OVERRIDE.with(|o| o.replace(Some(n)));
    struct Restore(Option<usize>);
    impl Drop for Restore {
        fn drop(&mut self) {
            OVERRIDE.with(|o| o.set(self.0));
        }
    }
    let _restore = Restore(prev);
    f()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_is_scoped() {
        assert!(check("t", 20, 10).is_err());
        with_max_n(30, || assert!(check("t", 20, 10).is_ok()));
        assert!(check("t", 20, 10).is_err());
    }
}
