//! Scores a candidate patch against the oracle fix and prints every
//! component of the report.

use repairscore::metrics::{score_pair, MetricConfig, ScoreReport};

const ORACLE: &str = r#"
int read_chunk(struct stream *s, char *out, size_t cap) {
    size_t n = s->avail;
    if (n > cap)
        n = cap;
    memcpy(out, s->buf, n);
    s->avail -= n;
    return (int) n;
}
"#;

const CANDIDATE: &str = r#"
int read_chunk(struct stream *st, char *dst, size_t limit) {
    size_t len = st->avail;
    if (len > limit)
        return -1;
    memcpy(dst, st->buf, len);
    st->avail -= len;
    return (int) len;
}
"#;

pub fn run_example() -> ScoreReport {
    let report = score_pair(CANDIDATE, ORACLE, &MetricConfig::default()).expect("oracle is not empty");
    println!("bleu           {:.4}", report.bleu);
    println!("weighted bleu  {:.4}", report.weighted_bleu);
    println!("ast match      {:.4}", report.sim_ast);
    println!("dataflow match {:.4}", report.sim_dfg);
    println!("reward         {:.4}", report.reward);
    println!("codebleu       {:.4}", report.codebleu);
    report
}

fn main() {
    run_example();
}
