//! Multi-threaded versions of the exhaustive composite coding searches.
//!
//! The decoding choices are cut into a fixed number of consecutive rank
//! ranges regardless of the thread count, and per-range results are merged
//! in rank order.

use rayon::prelude::*;

use icl_core::composite::{
    best_symmetric_in, enumerate_decoding_choices, finish, insert_ranked, prefer, time_shared_with,
    weighted_columns_in, ChoiceOutcome, CompositeError, CompositeResult, SearchOptions,
    TimeSharedResult, WeightedResult, COLUMNS_PER_SEARCH,
};
use icl_core::instance::IndexCodingInstance;
use icl_core::rational::ExactRational;

const RANGES: u128 = 256;

fn ranges(total: u128) -> Vec<std::ops::Range<u128>> {
    let step = total.div_ceil(RANGES).max(1);
    (0..total.div_ceil(step))
        .map(|k| k * step..((k + 1) * step).min(total))
        .collect()
}

fn pool(threads: Option<usize>) -> rayon::ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    builder.build().expect("thread pool")
}

/// Per-choice maximum symmetric rate.
pub fn max_symmetric_rate(
    inst: &IndexCodingInstance,
    opts: &SearchOptions,
    threads: Option<usize>,
) -> Result<CompositeResult, CompositeError> {
    let choices = enumerate_decoding_choices(inst, opts.per_user_cap, opts.search_limit)?;
    let under = choices.is_under_approximation();
    let total = choices.total();
    let parts: Vec<Option<ChoiceOutcome>> = pool(threads).install(|| {
        ranges(total)
            .into_par_iter()
            .map(|r| best_symmetric_in(inst, opts, r))
            .collect::<Result<_, _>>()
    })?;
    let best = parts
        .into_iter()
        .flatten()
        .reduce(prefer)
        .expect("at least one decoding choice");
    Ok(finish(best, under, total))
}

/// Top weighted columns above `floor`, identical to the sequential search.
pub fn weighted_columns_above(
    inst: &IndexCodingInstance,
    weights: &[ExactRational],
    opts: &SearchOptions,
    floor: Option<&ExactRational>,
    limit: usize,
    pool: &rayon::ThreadPool,
) -> Result<Vec<WeightedResult>, CompositeError> {
    let total = enumerate_decoding_choices(inst, opts.per_user_cap, opts.search_limit)?.total();
    let parts: Vec<Vec<WeightedResult>> = pool.install(|| {
        ranges(total)
            .into_par_iter()
            .map(|r| weighted_columns_in(inst, weights, opts, floor, limit, r))
            .collect::<Result<_, _>>()
    })?;
    let mut kept = Vec::new();
    for candidate in parts.into_iter().flatten() {
        insert_ranked(&mut kept, candidate, limit);
    }
    Ok(kept)
}

/// Symmetric rate of the time-sharing hull with parallel pricing.
pub fn time_shared_symmetric_rate(
    inst: &IndexCodingInstance,
    opts: &SearchOptions,
    threads: Option<usize>,
) -> Result<TimeSharedResult, CompositeError> {
    let pool = pool(threads);
    time_shared_with(inst, opts, |w, floor| {
        weighted_columns_above(inst, w, opts, floor, COLUMNS_PER_SEARCH, &pool)
    })
}
