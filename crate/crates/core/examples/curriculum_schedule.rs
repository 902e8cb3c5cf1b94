//! Buckets repair samples by hunk count and prints the three cumulative
//! training stages.

use repairscore::curriculum::{assign_bucket, build_schedule, CurriculumSchedule};
use repairscore::dataset::build_sample;

fn edit_lines(lines: usize, edited: &[usize]) -> (String, String) {
    let vulnerable: String = (0..lines).map(|i| format!("v{i} = f(v{i});\n")).collect();
    let fixed: String = (0..lines)
        .map(|i| {
            if edited.contains(&i) {
                format!("v{i} = g(v{i});\n")
            } else {
                format!("v{i} = f(v{i});\n")
            }
        })
        .collect();
    (vulnerable, fixed)
}

pub fn run_example() -> CurriculumSchedule {
    let specs: [(&str, &[usize]); 5] = [
        ("one-line", &[3]),
        ("two-spots", &[1, 6]),
        ("three-spots", &[0, 4, 8]),
        ("scattered", &[0, 2, 4, 6, 8, 10, 12]),
        ("adjacent", &[5, 6, 7]),
    ];
    let samples: Vec<_> = specs
        .iter()
        .map(|(id, edited)| {
            let (v, f) = edit_lines(14, edited);
            build_sample(*id, "demo", None, v, f).unwrap()
        })
        .collect();
    for s in &samples {
        println!("{:<12} {} hunks -> {}", s.id, s.hunks, assign_bucket(s.hunks).unwrap());
    }
    let schedule = build_schedule(&samples).unwrap();
    for stage in &schedule.stages {
        println!("stage {:<6} {:?}", stage.name, stage.ids);
    }
    schedule
}

fn main() {
    run_example();
}
