//! Filters teacher responses: schema check first, then keep only patches
//! whose CodeBLEU against the oracle exceeds the threshold.

use repairscore::filter::{filter_batch, FilterItem, FilterOutcome, DEFAULT_THRESHOLD};
use repairscore::metrics::MetricConfig;

pub fn run_example() -> FilterOutcome {
    let oracle = "if (p == NULL) return -EINVAL; p->refs++;";
    let responses = [
        "<reason>p may be NULL when the lookup fails</reason>\n<patch>if (p == NULL) return -EINVAL; p->refs++;</patch>",
        "Let me think.\n<reason>missing null check</reason><patch>if (!p) return -EINVAL; p->refs++;</patch>",
        "<reason>refcount overflow</reason><patch>p->refs += 2;</patch>",
        "<patch>p->refs++;</patch><reason>order is wrong here</reason>",
        "<reason>no patch given</reason>",
    ];
    let items: Vec<FilterItem> = responses
        .iter()
        .enumerate()
        .map(|(i, r)| FilterItem { id: format!("resp-{i}"), response: r.to_string(), oracle: oracle.into() })
        .collect();

    let outcome = filter_batch(&items, DEFAULT_THRESHOLD, &MetricConfig::default()).unwrap();
    for k in &outcome.kept {
        println!("kept     {} (codebleu {:.3})", k.id, k.score);
    }
    for r in &outcome.rejected {
        match (&r.kind, r.score) {
            (Some(kind), _) => println!("rejected {} ({kind})", r.id),
            (None, Some(score)) => println!("rejected {} (codebleu {score:.3})", r.id),
            _ => {}
        }
    }
    outcome
}

fn main() {
    run_example();
}
