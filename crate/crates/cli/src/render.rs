//! Report wrappers and their markdown forms.

use serde::Serialize;

use corner_homology::acceptance::CriterionResult;
use corner_homology::corners::{CwJson, FamilyTable};
use corner_homology::hochschild::{E1Comparison, GradedAlgebra, HcReport, SbiReport, TruncatedDims};
use corner_homology::linalg::Rational;
use corner_homology::poisson::{DerhamTable, PoissonHomology, TermJson, TheoremReport};
use corner_homology::report::{bigraded, family, page, table};
use corner_homology::spectral::{ConvergenceReport, PageReport};
use corner_homology::symbols::{FormalSymbol, TraceSpaceReport};

pub trait Markdown {
    fn markdown(&self) -> String;
}

fn s<T: ToString>(x: T) -> String {
    x.to_string()
}

fn dims_table(name: &str, dims: &[usize], top: Option<(usize, usize)>) -> String {
    let mut rows: Vec<Vec<String>> = dims.iter().enumerate().map(|(n, d)| vec![s(n), s(d)]).collect();
    if let Some((n, d)) = top {
        rows.push(vec![s(n), format!("<= {d}")]);
    }
    table(&["n", name], &rows)
}

#[derive(Serialize)]
#[serde(transparent)]
pub struct Hh(pub TruncatedDims);

impl Markdown for Hh {
    fn markdown(&self) -> String {
        dims_table("dim HH_n", &self.0.dims, Some((self.0.top.n, self.0.top.upper_bound)))
    }
}

impl Markdown for HcReport {
    fn markdown(&self) -> String {
        let mut out = dims_table("dim HC_n", &self.dims, Some((self.top.n, self.top.upper_bound)));
        if self.unitalized {
            out.push_str("\nComputed through the unitalization.\n");
        }
        out
    }
}

impl Markdown for SbiReport {
    fn markdown(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| vec![s(r.n), s(r.hh), s(r.hc), s(r.rank_i), s(r.rank_s), s(r.rank_b)])
            .collect();
        format!(
            "{}\nexact: {}\n",
            table(&["n", "HH", "HC", "rank I", "rank S", "rank B"], &rows),
            self.exact
        )
    }
}

impl Markdown for GradedAlgebra {
    fn markdown(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .algebra
            .products()
            .into_iter()
            .map(|(i, j, k, c)| vec![s(i), s(j), s(k), s(c)])
            .collect();
        let degrees: Vec<String> = self.degrees.iter().map(ToString::to_string).collect();
        format!("degrees: {}\n\n{}", degrees.join(", "), table(&["i", "j", "k", "coefficient"], &rows))
    }
}

fn pages_md(pages: &[PageReport]) -> String {
    pages.iter().map(page).collect::<Vec<_>>().join("\n")
}

#[derive(Serialize)]
pub struct FiltrationSs {
    pub pages: Vec<PageReport>,
    pub e1_vs_gr: E1Comparison,
}

impl Markdown for FiltrationSs {
    fn markdown(&self) -> String {
        let rows: Vec<Vec<String>> =
            self.e1_vs_gr.entries.iter().map(|e| vec![s(e.k), s(e.h), s(e.e1), s(e.hh_gr)]).collect();
        format!(
            "{}\n{}\nE^1 = HH(Gr): {}\n",
            pages_md(&self.pages),
            table(&["k", "h", "E^1", "HH(Gr)"], &rows),
            self.e1_vs_gr.agree
        )
    }
}

#[derive(Serialize)]
pub struct Spectral {
    pub pages: Vec<PageReport>,
    pub convergence: ConvergenceReport,
}

impl Markdown for Spectral {
    fn markdown(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .convergence
            .degrees
            .iter()
            .map(|d| vec![s(d.n), s(d.homology_dim), s(d.e_infinity_dim)])
            .collect();
        format!(
            "{}\n{}\nstabilized at E^{}\n",
            pages_md(&self.pages),
            table(&["n", "dim H_n", "sum E^inf"], &rows),
            self.convergence.stabilized_at
        )
    }
}

#[derive(Serialize)]
#[serde(transparent)]
pub struct Cw(pub CwJson);

impl Markdown for Cw {
    fn markdown(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .0
            .degrees
            .iter()
            .map(|d| vec![s(d.n), s(d.dim), d.labels.as_ref().map_or(String::new(), |l| l.join(" "))])
            .collect();
        table(&["n", "cells", "labels"], &rows)
    }
}

#[derive(Serialize)]
pub struct Dims {
    pub dims: Vec<usize>,
}

impl Markdown for Dims {
    fn markdown(&self) -> String {
        dims_table("dim H^n", &self.dims, None)
    }
}

#[derive(Serialize)]
pub struct MinimalFaces {
    pub count: usize,
    pub faces: Vec<usize>,
}

impl Markdown for MinimalFaces {
    fn markdown(&self) -> String {
        let rows: Vec<Vec<String>> = self.faces.iter().map(|f| vec![s(f)]).collect();
        table(&["minimal face"], &rows)
    }
}

impl Markdown for FamilyTable {
    fn markdown(&self) -> String {
        let fibre = dims_table("dim H^n(L(fibre))", &self.fiber_dims, None);
        format!("{fibre}\n{}", family(self))
    }
}

#[derive(Serialize)]
#[serde(transparent)]
pub struct Terms(pub Vec<TermJson>);

impl Markdown for Terms {
    fn markdown(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .0
            .iter()
            .map(|t| {
                let exps: Vec<String> = t.exponents.iter().map(|(v, e)| format!("{v}^{e}")).collect();
                vec![s(&t.coeff), exps.join(" "), t.symbols.join(" ^ ")]
            })
            .collect();
        table(&["coefficient", "monomial", "symbols"], &rows)
    }
}

impl Markdown for PoissonHomology {
    fn markdown(&self) -> String {
        let rows = vec![vec![s(self.k), s(self.l), s(self.degree), s(self.window), s(self.dim), s(self.stable)]];
        table(&["k", "l", "form degree", "window", "dim", "stable"], &rows)
    }
}

impl Markdown for DerhamTable {
    fn markdown(&self) -> String {
        format!(
            "l = {}, window {}\n\nvertical\n\n{}\nE_2\n\n{}\nstable: {}\n",
            self.l,
            self.window,
            bigraded("j", "i", &self.vertical),
            bigraded("j", "i", &self.table),
            self.stable
        )
    }
}

impl Markdown for TheoremReport {
    fn markdown(&self) -> String {
        let rows = vec![vec![
            s(self.degree),
            s(self.l),
            s(self.delta),
            s(self.delta_vert),
            s(self.transported),
            s(self.derham),
            s(self.agree),
            s(self.stable),
        ]];
        table(&["degree", "l", "delta", "delta_vert", "transported", "de Rham", "agree", "stable"], &rows)
    }
}

#[derive(Serialize)]
pub struct Composed {
    pub symbol: FormalSymbol,
    pub discarded: usize,
}

impl Markdown for Composed {
    fn markdown(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .symbol
            .terms()
            .map(|(k, v)| {
                let y: Vec<String> = k.y.iter().map(ToString::to_string).collect();
                vec![s(k.sheet), s(k.order), s(k.u), y.join(","), format!("({}, {})", k.row, k.col), s(v)]
            })
            .collect();
        let (lo, hi) = self.symbol.window();
        format!(
            "window [{lo}, {hi}], {} expansions cut at the floor\n\n{}",
            self.discarded,
            table(&["sheet", "xi order", "u", "y", "entry", "coefficient"], &rows)
        )
    }
}

#[derive(Serialize)]
pub struct TraceValue {
    pub value: Rational,
}

impl Markdown for TraceValue {
    fn markdown(&self) -> String {
        table(&["tau"], &[vec![s(&self.value)]])
    }
}

impl Markdown for TraceSpaceReport {
    fn markdown(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .probes
            .iter()
            .map(|p| vec![s(p.len), s(p.target_dim), s(p.commutator_rank), s(p.trace_dim)])
            .collect();
        format!(
            "{}\ndimension {}, stable: {}\n",
            table(&["length", "monomials", "commutator rank", "traces"], &rows),
            self.dim,
            self.stable
        )
    }
}

#[derive(Serialize)]
pub struct Acceptance {
    pub all_passed: bool,
    pub criteria: Vec<CriterionResult>,
}

impl Markdown for Acceptance {
    fn markdown(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .criteria
            .iter()
            .map(|c| vec![s(c.id), s(&c.name), (if c.passed { "pass" } else { "fail" }).to_string(), c.detail.clone()])
            .collect();
        table(&["criterion", "name", "result", "detail"], &rows)
    }
}
