//! Evaluates model predictions against a small dataset and prints the
//! per-stratum means.

use repairscore::dataset::build_sample;
use repairscore::eval::{evaluate, EvalReport, Prediction};
use repairscore::metrics::MetricConfig;

pub fn run_example() -> EvalReport {
    let samples = vec![
        build_sample(
            "overflow",
            "libfoo",
            Some("CWE-787".into()),
            "void put(char *b, int i, char c) {\n    b[i] = c;\n}\n",
            "void put(char *b, int i, char c) {\n    if (i < SIZE)\n        b[i] = c;\n}\n",
        )
        .unwrap(),
        build_sample(
            "uaf",
            "libbar",
            Some("CWE-416".into()),
            "void drop(struct obj *o) {\n    free(o->data);\n    use(o->data);\n}\n",
            "void drop(struct obj *o) {\n    use(o->data);\n    free(o->data);\n    o->data = NULL;\n}\n",
        )
        .unwrap(),
        build_sample(
            "untagged",
            "libbar",
            None,
            "int f(int x) {\n    return x / d;\n}\n",
            "int f(int x) {\n    if (d == 0)\n        return 0;\n    return x / d;\n}\n",
        )
        .unwrap(),
    ];
    let predictions = vec![
        Prediction { id: "overflow".into(), prediction: samples[0].fixed_fn.clone() },
        Prediction {
            id: "uaf".into(),
            prediction: "void drop(struct obj *o) {\n    use(o->data);\n    free(o->data);\n}\n".into(),
        },
        Prediction { id: "untagged".into(), prediction: samples[2].vulnerable_fn.clone() },
    ];
    let report = evaluate(&samples, &predictions, &MetricConfig::default()).unwrap();
    for row in &report.per_sample {
        println!(
            "{:<9} hunks {} codebleu {:.3} exact {}",
            row.id, row.hunks, row.report.codebleu, row.exact_match
        );
    }
    let a = &report.aggregates;
    println!("overall  n={} codebleu {:.3}", a.overall.count, a.overall.mean_codebleu);
    for (cwe, s) in &a.by_cwe {
        println!("{cwe:<8} n={} codebleu {:.3}", s.count, s.mean_codebleu);
    }
    report
}

fn main() {
    run_example();
}
