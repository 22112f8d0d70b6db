//! Sharded, checkpointed passes over candidate forms.

use std::path::Path;

use planecount_core::stats::{decode_candidate, sample_candidate, split_range, strategy_range, Strategy};
use planecount_core::{FieldDesc, FieldElem};

use crate::checkpoint::Checkpoint;
use crate::manifest::Execution;
use crate::CliError;

/// Work done on each candidate form. Results are integer counters so that
/// shards merge by addition.
pub trait Job: Send {
    fn width(&self) -> usize;

    fn visit(&mut self, coeffs: &[FieldElem], counters: &mut [u64]) -> Result<(), CliError>;
}

/// Test hook: stop every shard after this many candidates, as if killed.
#[derive(Debug, Clone, Copy, Default)]
pub struct Control {
    pub stop_after: Option<u64>,
}

pub struct Pass<'a> {
    pub field: &'a FieldDesc,
    pub degree: u32,
    pub strategy: Strategy,
    pub budget: u64,
    pub digest: String,
    pub execution: &'a Execution,
    pub control: Control,
}

impl Pass<'_> {
    /// Runs one worker thread per shard and adds their counters in shard order.
    pub fn run<J, F>(&self, make_job: F) -> Result<Vec<u64>, CliError>
    where
        J: Job,
        F: Fn() -> J + Sync,
    {
        let len = strategy_range(u64::from(self.field.q()), self.degree, self.strategy, self.budget)
            .map_err(CliError::from_stats)?;
        let shards = self.execution.shards;
        let plan = split_range(len, shards);
        let dir = self.execution.checkpoint_path();
        let results: Vec<Result<Vec<u64>, CliError>> = std::thread::scope(|s| {
            let handles: Vec<_> = plan
                .iter()
                .enumerate()
                .map(|(i, range)| {
                    let job = &make_job;
                    let dir = dir.as_deref();
                    s.spawn(move || self.run_shard(i as u32, shards, range.clone(), dir, job()))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|_| Err(CliError::Internal("worker panicked".into()))))
                .collect()
        });
        let mut total: Option<Vec<u64>> = None;
        for r in results {
            let part = r?;
            match total.as_mut() {
                None => total = Some(part),
                Some(t) => t.iter_mut().zip(&part).for_each(|(a, b)| *a += b),
            }
        }
        Ok(total.unwrap_or_default())
    }

    fn run_shard<J: Job>(
        &self,
        shard: u32,
        of: u32,
        range: std::ops::Range<u64>,
        dir: Option<&Path>,
        mut job: J,
    ) -> Result<Vec<u64>, CliError> {
        let width = job.width();
        let mut state = Checkpoint {
            manifest_digest: self.digest.clone(),
            shard,
            of,
            range: range.clone(),
            next: range.start,
            counters: vec![0; width],
        };
        if let (Some(dir), true) = (dir, self.execution.resume) {
            if let Some(saved) = Checkpoint::load_matching(dir, &self.digest, shard, of, &range, width)? {
                state = saved;
            }
        }
        let mut coeffs = vec![FieldElem::ZERO; planecount_core::poly::monomial_count(self.degree)];
        let q = self.field.q();
        let every = self.execution.checkpoint_every;
        let mut visited = 0u64;
        while state.next < range.end {
            let chunk_end = range.end.min(state.next.saturating_add(every));
            for index in state.next..chunk_end {
                match self.strategy {
                    Strategy::Exhaustive => {
                        if index == 0 {
                            continue;
                        }
                        decode_candidate(q, index, &mut coeffs);
                    }
                    Strategy::Sample { seed, .. } => sample_candidate(q, seed, index, &mut coeffs),
                }
                job.visit(&coeffs, &mut state.counters)?;
            }
            visited += chunk_end - state.next;
            state.next = chunk_end;
            if let Some(dir) = dir {
                state.save(dir)?;
            }
            if self.control.stop_after.is_some_and(|n| visited >= n) && state.next < range.end {
                return Err(CliError::Interrupted);
            }
        }
        if let Some(dir) = dir {
            state.save(dir)?;
        }
        Ok(state.counters)
    }
}
