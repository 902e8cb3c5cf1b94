//! Parses a function, prints its syntax tree and the normalized data-flow
//! edges between variable slots.

use repairscore::code_model::{extract_named_dfg, parse_text, NamedDataFlowGraph};

const SOURCE: &str = "int scale(int x, int k) {
    int y = x * k;
    if (y > LIMIT)
        y = LIMIT;
    return y;
}";

pub fn run_example() -> NamedDataFlowGraph {
    let outcome = parse_text(SOURCE);
    let tree = outcome.tree.expect("source parses");
    println!("coverage {:.2}", tree.coverage);
    println!("{}", tree.root.pretty());

    let dfg = extract_named_dfg(&tree);
    for (slot, name) in dfg.variables.iter().enumerate() {
        println!("slot {slot}: {name}");
    }
    for (src, dst) in &dfg.graph.edges {
        println!("{} -> {}", dfg.variables[*src], dfg.variables[*dst]);
    }
    dfg
}

fn main() {
    run_example();
}
