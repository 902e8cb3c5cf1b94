//! Wrapping hunks of a function in `<vul_start>` / `<vul_end>` lines.

use super::{DatasetError, LineRange};
use crate::curriculum::{VUL_END, VUL_START};

/// Surrounds each hunk with marker lines. Hunks must be sorted, disjoint,
/// non-empty and inside the text. A final line without a newline gets its
/// end marker on a new line, so [`strip_markers`] can restore it exactly.
pub fn insert_markers(text: &str, hunks: &[LineRange]) -> Result<String, DatasetError> {
    if text.contains(VUL_START) || text.contains(VUL_END) {
        return Err(DatasetError::ContainsMarker);
    }
    let lines: Vec<&str> = text.split_inclusive('\n').collect();
    let mut prev_end = 0;
    for h in hunks {
        if h.is_empty() || h.end > lines.len() || h.start < prev_end {
            return Err(DatasetError::InvalidHunk {
                start: h.start,
                end: h.end,
                lines: lines.len(),
            });
        }
        prev_end = h.end;
    }

    let mut out = String::with_capacity(text.len() + hunks.len() * 24);
    let mut next = hunks.iter().peekable();
    let mut current: Option<&LineRange> = None;
    for (i, line) in lines.iter().enumerate() {
        if let Some(h) = next.next_if(|h| h.start == i) {
            out.push_str(VUL_START);
            out.push('\n');
            current = Some(h);
        }
        out.push_str(line);
        if current.is_some_and(|h| h.end == i + 1) {
            if line.ends_with('\n') {
                out.push_str(VUL_END);
                out.push('\n');
            } else {
                out.push('\n');
                out.push_str(VUL_END);
            }
            current = None;
        }
    }
    Ok(out)
}

/// Inverse of [`insert_markers`]: drops every marker line.
pub fn strip_markers(marked: &str) -> String {
    let start_line = format!("{VUL_START}\n");
    let end_line = format!("{VUL_END}\n");
    let mut out = String::with_capacity(marked.len());
    for piece in marked.split_inclusive('\n') {
        if piece == start_line || piece == end_line {
            continue;
        }
        if piece == VUL_END {
            // end marker after an unterminated last line
            if out.ends_with('\n') {
                out.pop();
            }
            continue;
        }
        out.push_str(piece);
    }
    out
}
