//! Drives the line-delimited JSON reward service over an in-memory
//! transcript, the same protocol `repairscore serve` speaks on stdio.

use repairscore::metrics::MetricConfig;
use repairscore::service::serve;

pub fn run_example() -> String {
    let requests = [
        r#"{"id": 1, "candidate": "if (n > cap) n = cap;", "oracle": "if (len > max) len = max;"}"#,
        r#"{"id": 2, "candidate": "n = cap;", "oracle": "if (len > max) len = max;"}"#,
        r#"this line is not a request"#,
        r#"{"id": "last", "candidate": "free(p); p = NULL;", "oracle": "free(p); p = NULL;"}"#,
    ];
    let input = requests.join("\n");
    let mut output = Vec::new();
    let stats = serve(input.as_bytes(), &mut output, &MetricConfig::default()).unwrap();
    let transcript = String::from_utf8(output).unwrap();
    print!("{transcript}");
    println!("{} requests, {} errors", stats.requests, stats.errors);
    transcript
}

fn main() {
    run_example();
}
