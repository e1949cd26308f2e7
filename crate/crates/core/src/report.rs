//! Markdown rendering of reports.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;

use crate::corners::FamilyTable;
use crate::spectral::PageReport;

/// A plain table. Cells are written as given, in the given column order.
pub fn table<S: AsRef<str>>(headers: &[S], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    let line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut s = String::from("|");
        for c in cells {
            s.push(' ');
            s.push_str(c);
            s.push_str(" |");
        }
        s.push('\n');
        s
    };
    out.push_str(&line(&mut headers.iter().map(AsRef::as_ref)));
    out.push_str(&line(&mut headers.iter().map(|_| "---")));
    for r in rows {
        out.push_str(&line(&mut r.iter().map(String::as_str)));
    }
    out
}

/// A bigraded grid: one column per first index, one row per second index,
/// both ascending. Missing cells inside the grid are 0.
pub fn bigraded<K: Ord + Copy + Display, V: Display>(
    row_name: &str,
    col_name: &str,
    entries: &BTreeMap<(K, K), V>,
) -> String {
    let cols: BTreeSet<K> = entries.keys().map(|(c, _)| *c).collect();
    let rows: BTreeSet<K> = entries.keys().map(|(_, r)| *r).collect();
    let mut headers = vec![format!("{row_name} \\ {col_name}")];
    headers.extend(cols.iter().map(ToString::to_string));
    let body: Vec<Vec<String>> = rows
        .iter()
        .rev()
        .map(|r| {
            let mut line = vec![r.to_string()];
            line.extend(cols.iter().map(|c| entries.get(&(*c, *r)).map_or("0".to_string(), ToString::to_string)));
            line
        })
        .collect();
    table(&headers, &body)
}

/// Number of value cells in a rendered grid.
pub fn cell_count(markdown: &str) -> usize {
    markdown.lines().filter(|l| l.starts_with('|')).skip(2).map(|l| l.matches('|').count().saturating_sub(2)).sum()
}

pub fn page(p: &PageReport) -> String {
    let entries: BTreeMap<(i64, i64), usize> = p.groups.iter().map(|g| ((g.k, g.h), g.dim)).collect();
    format!("E^{}\n\n{}", p.r, bigraded("h", "k", &entries))
}

pub fn family(t: &FamilyTable) -> String {
    bigraded("h", "k", &t.entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::{ChainComplex, FilteredComplex};
    use crate::corners::{family_cohomology, BaseSpace, FacePoset};
    use crate::linalg::SparseMatrix;

    #[test]
    fn empty_page_has_header_only() {
        let p = PageReport { r: 2, groups: vec![], differentials: vec![] };
        let md = page(&p);
        assert!(md.contains("| h \\ k |\n| --- |\n"));
        assert_eq!(cell_count(&md), 0);
    }

    #[test]
    fn two_step_e1_has_two_cells() {
        let c = ChainComplex::new(
            -1,
            BTreeMap::from([(0, 1), (1, 1)]),
            BTreeMap::from([(1, SparseMatrix::identity(1))]),
        )
        .unwrap();
        let f = FilteredComplex::new(c, BTreeMap::from([(0, vec![0]), (1, vec![1])])).unwrap();
        let e1 = crate::spectral::page(&f, 1).unwrap().report();
        let md = page(&e1);
        assert_eq!(cell_count(&md), 2);
        assert!(md.contains("| 0 | 1 | 1 |"));
    }

    #[test]
    fn circle_family_has_four_cells() {
        let t = family_cohomology(&BaseSpace::circle(), &FacePoset::interval(), None, &BTreeMap::new()).unwrap();
        let md = family(&t);
        assert_eq!(cell_count(&md), 4);
        assert_eq!(md, "| h \\ k | 0 | 1 |\n| --- | --- | --- |\n| 1 | 1 | 2 |\n| 0 | 1 | 2 |\n");
    }
}
