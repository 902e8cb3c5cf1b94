//! From raw vulnerable/fixed pairs to a deduplicated, marker-annotated
//! dataset with a repository-level split.

use repairscore::dataset::{build_sample, dedup, repo_split, RepairSample, SplitManifest};

pub fn run_example() -> (Vec<RepairSample>, SplitManifest) {
    let mut raw = Vec::new();
    for repo in 0..10 {
        for k in 0..3 {
            let vulnerable = format!("int get{k}(int *a, int i) {{\n    return a[i];\n}}\n");
            let fixed = format!(
                "int get{k}(int *a, int i) {{\n    if (i < 0 || i >= N{repo})\n        return 0;\n    return a[i];\n}}\n"
            );
            raw.push(build_sample(format!("r{repo}-{k}"), format!("repo-{repo}"), Some("CWE-125".into()), vulnerable, fixed).unwrap());
        }
    }
    // the same pair again, differing only in whitespace
    let mut copy = raw[0].clone();
    copy.id = "r0-0-copy".into();
    copy.vulnerable_fn = copy.vulnerable_fn.replace("    ", "\t");
    raw.push(copy);

    let samples = dedup(&raw);
    println!("{} raw samples, {} after dedup", raw.len(), samples.len());
    println!("marked function:\n{}", samples[0].marked_fn);

    let manifest = repo_split(&samples, [0.8, 0.1, 0.1], 0).unwrap();
    println!(
        "train {} / val {} / test {} samples, achieved {:?}",
        manifest.train.len(),
        manifest.val.len(),
        manifest.test.len(),
        manifest.achieved_ratios
    );
    (samples, manifest)
}

fn main() {
    run_example();
}
