//! Line-level LCS diff reduced to hunks in vulnerable-function coordinates.

use serde::{Deserialize, Serialize};

use super::DatasetError;

/// Half-open range of 0-based line numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LineRange {
    pub start: usize,
    pub end: usize,
}

impl LineRange {
    pub fn new(start: usize, end: usize) -> Self {
        LineRange { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Edit {
    Keep,
    /// Vulnerable line removed or replaced.
    Delete,
    /// Fixed line inserted before the current vulnerable line.
    Insert,
}

/// Edit script turning `old` into `new`, from a longest common
/// subsequence. Common prefix and suffix are matched up front.
fn edit_script(old: &[&str], new: &[&str]) -> Vec<Edit> {
    let prefix = old.iter().zip(new).take_while(|(a, b)| a == b).count();
    let suffix = old[prefix..]
        .iter()
        .rev()
        .zip(new[prefix..].iter().rev())
        .take_while(|(a, b)| a == b)
        .count();
    let a = &old[prefix..old.len() - suffix];
    let b = &new[prefix..new.len() - suffix];
    let (n, m) = (a.len(), b.len());

    // lcs[i][j] = LCS length of a[i..] and b[j..]
    let width = m + 1;
    let mut lcs = vec![0u32; (n + 1) * width];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            lcs[i * width + j] = if a[i] == b[j] {
                lcs[(i + 1) * width + j + 1] + 1
            } else {
                lcs[(i + 1) * width + j].max(lcs[i * width + j + 1])
            };
        }
    }

    let mut script = vec![Edit::Keep; prefix];
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        if i < n && j < m && a[i] == b[j] {
            script.push(Edit::Keep);
            i += 1;
            j += 1;
        } else if j == m || (i < n && lcs[(i + 1) * width + j] >= lcs[i * width + j + 1]) {
            script.push(Edit::Delete);
            i += 1;
        } else {
            script.push(Edit::Insert);
            j += 1;
        }
    }
    script.extend(std::iter::repeat(Edit::Keep).take(suffix));
    script
}

/// Hunks of `vulnerable` changed by `fixed`. Each maximal run of deleted
/// or replaced lines is a hunk; an insertion touching no deleted line is
/// anchored to the vulnerable line before it (the first line when it
/// precedes everything).
pub fn diff_hunks(vulnerable: &str, fixed: &str) -> Result<Vec<LineRange>, DatasetError> {
    if vulnerable.is_empty() || fixed.is_empty() {
        return Err(DatasetError::EmptyFunction);
    }
    let old: Vec<&str> = vulnerable.lines().collect();
    let new: Vec<&str> = fixed.lines().collect();
    if old.is_empty() {
        return Err(DatasetError::EmptyFunction);
    }
    let script = edit_script(&old, &new);

    let mut changed = vec![false; old.len()];
    let mut line = 0;
    let mut k = 0;
    while k < script.len() {
        match script[k] {
            Edit::Keep => {
                line += 1;
                k += 1;
            }
            Edit::Delete => {
                changed[line] = true;
                line += 1;
                k += 1;
            }
            Edit::Insert => {
                let run_start = k;
                while k < script.len() && script[k] == Edit::Insert {
                    k += 1;
                }
                let after_delete = run_start > 0 && script[run_start - 1] == Edit::Delete;
                let before_delete = script.get(k) == Some(&Edit::Delete);
                if !after_delete && !before_delete {
                    changed[line.saturating_sub(1)] = true;
                }
            }
        }
    }

    let mut hunks = Vec::new();
    let mut i = 0;
    while i < changed.len() {
        if changed[i] {
            let start = i;
            while i < changed.len() && changed[i] {
                i += 1;
            }
            hunks.push(LineRange::new(start, i));
        } else {
            i += 1;
        }
    }
    Ok(hunks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_texts_have_no_hunks() {
        assert_eq!(diff_hunks("a\nb\n", "a\nb\n").unwrap(), vec![]);
    }

    #[test]
    fn one_modified_line() {
        let h = diff_hunks("a\nb\nc\n", "a\nB\nc\n").unwrap();
        assert_eq!(h, vec![LineRange::new(1, 2)]);
    }

    #[test]
    fn separated_modifications_stay_distinct() {
        let v = "l0\nl1\nl2\nl3\nl4\nl5\nl6\n";
        let f = "l0\nX1\nl2\nl3\nl4\nX5\nl6\n";
        let h = diff_hunks(v, f).unwrap();
        assert_eq!(h, vec![LineRange::new(1, 2), LineRange::new(5, 6)]);
    }

    #[test]
    fn adjacent_changes_merge() {
        let h = diff_hunks("a\nb\nc\nd\n", "a\nB\nC\nd\n").unwrap();
        assert_eq!(h, vec![LineRange::new(1, 3)]);
    }

    #[test]
    fn pure_insertion_anchors_to_previous_line() {
        let h = diff_hunks("if (x)\n  use(p);\n}\n", "if (x)\n  if (!p) return;\n  use(p);\n}\n")
            .unwrap();
        assert_eq!(h, vec![LineRange::new(0, 1)]);
        // insertion before the first line anchors to line 0
        let h = diff_hunks("a\nb\n", "new\na\nb\n").unwrap();
        assert_eq!(h, vec![LineRange::new(0, 1)]);
        // insertion at the end anchors to the last line
        let h = diff_hunks("a\nb\n", "a\nb\nc\n").unwrap();
        assert_eq!(h, vec![LineRange::new(1, 2)]);
    }

    #[test]
    fn replacement_with_extra_lines_is_one_hunk() {
        let h = diff_hunks("a\nb\nc\n", "a\nB1\nB2\nB3\nc\n").unwrap();
        assert_eq!(h, vec![LineRange::new(1, 2)]);
    }

    #[test]
    fn deletion() {
        let h = diff_hunks("a\nb\nc\n", "a\nc\n").unwrap();
        assert_eq!(h, vec![LineRange::new(1, 2)]);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(diff_hunks("", "a").is_err());
        assert!(diff_hunks("a", "").is_err());
    }

    /// Unchanged lines of the vulnerable text form a common subsequence of
    /// maximal length; checked against a brute-force LCS length.
    fn lcs_len(a: &[&str], b: &[&str]) -> usize {
        if a.is_empty() || b.is_empty() {
            return 0;
        }
        if a[0] == b[0] {
            1 + lcs_len(&a[1..], &b[1..])
        } else {
            lcs_len(&a[1..], b).max(lcs_len(a, &b[1..]))
        }
    }

    proptest! {
        #[test]
        fn script_is_a_valid_lcs(
            old in prop::collection::vec("[abc]", 1..7),
            new in prop::collection::vec("[abc]", 1..7),
        ) {
            let old: Vec<&str> = old.iter().map(String::as_str).collect();
            let new: Vec<&str> = new.iter().map(String::as_str).collect();
            let script = edit_script(&old, &new);
            let keeps = script.iter().filter(|e| **e == Edit::Keep).count();
            let deletes = script.iter().filter(|e| **e == Edit::Delete).count();
            let inserts = script.iter().filter(|e| **e == Edit::Insert).count();
            prop_assert_eq!(keeps + deletes, old.len());
            prop_assert_eq!(keeps + inserts, new.len());
            prop_assert_eq!(keeps, lcs_len(&old, &new));
        }

        #[test]
        fn trailing_newline_is_irrelevant(
            old in prop::collection::vec("[abc]{1,3}", 1..8),
            new in prop::collection::vec("[abc]{1,3}", 1..8),
        ) {
            let v = old.join("\n");
            let f = new.join("\n");
            let base = diff_hunks(&v, &f).unwrap();
            prop_assert_eq!(&base, &diff_hunks(&format!("{v}\n"), &f).unwrap());
            prop_assert_eq!(&base, &diff_hunks(&v, &format!("{f}\n")).unwrap());
            prop_assert!(diff_hunks(&v, &v).unwrap().is_empty());
        }
    }
}
