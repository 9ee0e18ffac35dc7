//! Analytic-versus-empirical checks for one family at one generation, and
//! per-generation summary rows.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::analytic::{self, EntropyEstimate};
use crate::error::{Error, Result};
use crate::generators::Generator;
use crate::graph::{subdivision, Family, Graph, HubRole};
use crate::matching::{
    count_maximum_matchings_memoized, count_perfect_matchings_bruteforce, has_perfect_matching,
    matching_number, DEFAULT_ENUMERATION_CAP,
};
use crate::pfaffian::{self, DEFAULT_CYCLE_CAP, DEFAULT_DENSE_LIMIT};
use crate::stats::{degree_stats, distance_stats};

/// Resource limits. Checks beyond a limit are reported as skipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Caps {
    /// Edge budget of the exhaustive matching counters.
    pub enum_edges: usize,
    /// Largest generation for determinant work.
    pub det_generation: u32,
    /// Cycle budget of nice-cycle enumeration.
    pub cycle_count: usize,
    /// Largest order for all-pairs BFS and dense elimination.
    pub dense_order: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            enum_edges: DEFAULT_ENUMERATION_CAP,
            det_generation: 8,
            cycle_count: DEFAULT_CYCLE_CAP,
            dense_order: DEFAULT_DENSE_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub verdict: Verdict,
    pub expected: String,
    pub observed: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticReport {
    pub family: Family,
    pub g: u32,
    pub n: String,
    pub e: String,
    pub matching_number: String,
    pub counts: BTreeMap<String, String>,
    pub entropy: Option<EntropyEstimate>,
    pub mu: Option<String>,
    pub pearson: Option<String>,
    pub knn: BTreeMap<String, String>,
    pub verdicts: BTreeMap<String, Verdict>,
    pub checks: Vec<CheckResult>,
}

impl AnalyticReport {
    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.verdict == Verdict::Fail)
    }

    pub fn skipped(&self) -> bool {
        self.checks.iter().any(|c| c.verdict == Verdict::Skipped)
    }
}

fn rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

struct Checks(Vec<CheckResult>);

impl Checks {
    fn compare<T: PartialEq + fmt::Display>(&mut self, name: &str, expected: T, observed: T) {
        self.0.push(CheckResult {
            name: name.into(),
            verdict: if expected == observed { Verdict::Pass } else { Verdict::Fail },
            expected: expected.to_string(),
            observed: observed.to_string(),
        });
    }

    fn skip(&mut self, name: &str, reason: impl fmt::Display) {
        self.0.push(CheckResult {
            name: name.into(),
            verdict: Verdict::Skipped,
            expected: String::new(),
            observed: reason.to_string(),
        });
    }

    /// Runs a fallible comparison; cap errors become skips, other errors fail.
    fn attempt<T: PartialEq + fmt::Display>(&mut self, name: &str, expected: T, observed: Result<T>) {
        match observed {
            Ok(o) => self.compare(name, expected, o),
            Err(e @ Error::CapExceeded { .. }) => self.skip(name, e),
            Err(e) => self.0.push(CheckResult {
                name: name.into(),
                verdict: Verdict::Fail,
                expected: expected.to_string(),
                observed: e.to_string(),
            }),
        }
    }
}

fn opt_rational(q: &Option<BigRational>) -> String {
    q.as_ref().map_or_else(|| "undefined".to_string(), rational)
}

fn check_enum_cap(g: &Graph, caps: &Caps) -> Result<()> {
    if g.edge_count() > caps.enum_edges {
        return Err(Error::CapExceeded {
            what: "exhaustive enumeration edge count",
            size: g.edge_count(),
            cap: caps.enum_edges,
        });
    }
    Ok(())
}

fn structure_checks(gen: &Generator, family: Family, g: u32, graph: &Graph, caps: &Caps, c: &mut Checks) -> Result<()> {
    let counts = analytic::counts(family, g)?;
    c.compare("vertex count", counts.n.clone(), BigInt::from(graph.n()));
    c.compare("edge count", counts.e.clone(), BigInt::from(graph.edge_count()));
    if family == Family::Sierpinski {
        c.compare("3-regular", true, (0..graph.n()).all(|v| graph.degree(v) == 3));
        c.compare("connected", true, graph.is_connected());
        return Ok(());
    }
    let mut classes: BTreeMap<u32, usize> = BTreeMap::new();
    let mut degree_law = true;
    for v in 0..graph.n() {
        let gi = graph.meta(v).gen_iteration;
        *classes.entry(gi).or_default() += 1;
        degree_law &= BigInt::from(graph.degree(v)) == counts.degree_of[&gi];
    }
    c.compare("degree doubling law", true, degree_law);
    let observed: BTreeMap<u32, BigInt> = classes.into_iter().map(|(k, v)| (k, v.into())).collect();
    c.compare("vertices per iteration", format!("{:?}", counts.lv), format!("{observed:?}"));
    let twin = match family {
        Family::Fractal => gen.nonfractal(g)?,
        _ => gen.fractal(g)?,
    };
    c.compare(
        "degree sequence shared with the other family",
        format!("{:?}", twin.degree_multiset()),
        format!("{:?}", graph.degree_multiset()),
    );
    let alt = match family {
        Family::Fractal => gen.fractal_edge_replacement(g)?,
        _ => gen.nonfractal_edge_replacement(g)?,
    };
    c.compare(
        "edge-replacement construction: degree multiset",
        format!("{:?}", alt.degree_multiset()),
        format!("{:?}", graph.degree_multiset()),
    );
    if graph.n() <= caps.dense_order {
        let (a, b) = (distance_stats(&alt)?, distance_stats(graph)?);
        c.compare("edge-replacement construction: distance multiset", a.multiset_digest, b.multiset_digest);
    } else {
        c.skip("edge-replacement construction: distance multiset", "order above dense cap");
    }
    Ok(())
}

fn structural_statistics(
    family: Family,
    g: u32,
    graph: &Graph,
    caps: &Caps,
    c: &mut Checks,
    report: &mut AnalyticReport,
) -> Result<()> {
    if family == Family::Sierpinski {
        return Ok(());
    }
    let mu_closed = analytic::avg_distance_closed(family, g)?;
    report.mu = Some(rational(&mu_closed));
    if graph.n() <= caps.dense_order {
        c.compare("average distance", rational(&mu_closed), rational(&distance_stats(graph)?.average));
    } else {
        c.skip("average distance", "order above dense cap");
    }
    let ds = degree_stats(graph)?;
    let pearson_closed = match family {
        Family::Fractal => analytic::pearson_closed_fractal(g).ok(),
        _ => analytic::pearson_closed_nonfractal(g).ok(),
    };
    report.pearson = Some(opt_rational(&pearson_closed));
    c.compare("pearson coefficient", opt_rational(&pearson_closed), opt_rational(&ds.pearson));
    let knn_closed = analytic::knn_closed(family, g)?;
    report.knn = knn_closed.iter().map(|(d, v)| (d.to_string(), rational(v))).collect();
    let observed: BTreeMap<String, String> = ds.knn.iter().map(|(d, v)| (d.to_string(), rational(v))).collect();
    c.compare("average neighbour degree", format!("{:?}", report.knn), format!("{observed:?}"));
    Ok(())
}

fn fractal_checks(g: u32, graph: &Graph, caps: &Caps, c: &mut Checks, report: &mut AnalyticReport) -> Result<()> {
    let sizes = analytic::fractal_matching_sizes(g);
    let closed_number = analytic::fractal_matching_number(g)?;
    c.compare("size recursion agrees with closed forms", true, sizes.is_ok());
    report.matching_number = closed_number.to_string();
    c.compare("matching number", closed_number.clone(), BigInt::from(matching_number(graph)));
    if g >= 2 {
        c.compare("no perfect matching", false, has_perfect_matching(graph));
    }
    let triple = analytic::fractal_matching_counts(g)?;
    report.counts.insert("theta".into(), triple.theta.to_string());
    report.counts.insert("varphi".into(), triple.varphi.to_string());
    report.counts.insert("phi".into(), triple.phi.to_string());

    let v1 = graph.hub(HubRole::V1).expect("hub v1");
    let v2 = graph.hub(HubRole::V2).expect("hub v2");
    let (minus1, _) = crate::graph::remove_vertices(graph, &[v1])?;
    let (minus12, _) = crate::graph::remove_vertices(graph, &[v1, v2])?;
    let count = |h: &Graph| -> Result<BigInt> {
        check_enum_cap(h, caps)?;
        Ok(count_maximum_matchings_memoized(h, caps.enum_edges)?.count)
    };
    c.attempt("theta by enumeration", triple.theta, count(graph));
    c.attempt("varphi by enumeration", triple.varphi, count(&minus1));
    c.attempt("phi by enumeration", triple.phi, count(&minus12));
    Ok(())
}

fn nonfractal_checks(gen: &Generator, g: u32, graph: &Graph, caps: &Caps, c: &mut Checks, report: &mut AnalyticReport) -> Result<()> {
    let psi = analytic::nonfractal_pm_count(g)?;
    report.matching_number = (graph.n() / 2).to_string();
    report.counts.insert("psi".into(), psi.to_string());
    report.entropy = Some(analytic::entropy_estimate(&psi, graph.n())?);
    c.compare("perfect matching exists", true, has_perfect_matching(graph));
    let og = gen.nonfractal_oriented(g)?;
    c.compare("orientation covers the base graph", true, og.base() == graph);
    if g <= caps.det_generation {
        c.attempt("psi by sqrt-determinant", psi.clone(), pfaffian::pm_count_via_determinant(&og));
    } else {
        c.skip("psi by sqrt-determinant", format!("generation above determinant cap {}", caps.det_generation));
    }
    c.attempt(
        "psi by enumeration",
        psi.clone(),
        check_enum_cap(graph, caps).and_then(|_| Ok(count_perfect_matchings_bruteforce(graph, caps.enum_edges)?.count)),
    );
    let verdict = pfaffian::verify_pfaffian(&og, caps.cycle_count);
    match verdict.pfaffian {
        Some(ok) => {
            report.counts.insert("nice_cycles".into(), verdict.cycles_checked.to_string());
            c.compare("every nice cycle oddly oriented", true, ok);
        }
        None => c.skip("every nice cycle oddly oriented", format!("more than {} cycles", caps.cycle_count)),
    }
    if g < caps.det_generation && graph.n() <= caps.dense_order {
        for check in pfaffian::verify_determinant_lemmas(gen, g, caps.dense_order)? {
            c.compare(&check.name, check.rhs, check.lhs);
        }
    } else {
        c.skip("determinant identities", "generation above determinant cap");
    }
    Ok(())
}

fn sierpinski_checks(gen: &Generator, g: u32, graph: &Graph, caps: &Caps, c: &mut Checks, report: &mut AnalyticReport) -> Result<()> {
    report.matching_number = (graph.n() / 2).to_string();
    c.compare("perfect matching exists", true, has_perfect_matching(graph));
    let brute = check_enum_cap(graph, caps)
        .and_then(|_| Ok(count_perfect_matchings_bruteforce(graph, caps.enum_edges)?.count));
    if g == 1 {
        // the closed form does not cover K4
        c.attempt("psi by enumeration", BigInt::from(3), brute);
        report.counts.insert("psi".into(), "3".into());
        report.entropy = Some(analytic::entropy_estimate(&BigInt::from(3), 4)?);
        return Ok(());
    }
    let psi = analytic::sierpinski_pm_count(g)?;
    report.counts.insert("psi".into(), psi.to_string());
    report.entropy = Some(analytic::entropy_estimate(&psi, graph.n())?);
    let pre = subdivision(&gen.sierpinski_ext(g - 1)?);
    c.attempt(
        "psi by line-graph count 2^(E-N+1)",
        psi.clone(),
        analytic::line_graph_pm_count(pre.n(), pre.edge_count()),
    );
    c.attempt("psi by enumeration", psi, brute);
    Ok(())
}

/// Runs every applicable check for `family` at generation `g`.
pub fn verify(gen: &Generator, family: Family, g: u32, caps: &Caps) -> Result<AnalyticReport> {
    let graph = gen.family(family, g)?;
    let counts = analytic::counts(family, g)?;
    let mut report = AnalyticReport {
        family,
        g,
        n: counts.n.to_string(),
        e: counts.e.to_string(),
        matching_number: String::new(),
        counts: BTreeMap::new(),
        entropy: None,
        mu: None,
        pearson: None,
        knn: BTreeMap::new(),
        verdicts: BTreeMap::new(),
        checks: Vec::new(),
    };
    let mut c = Checks(Vec::new());
    structure_checks(gen, family, g, &graph, caps, &mut c)?;
    structural_statistics(family, g, &graph, caps, &mut c, &mut report)?;
    match family {
        Family::Fractal => fractal_checks(g, &graph, caps, &mut c, &mut report)?,
        Family::Nonfractal => nonfractal_checks(gen, g, &graph, caps, &mut c, &mut report)?,
        Family::Sierpinski => sierpinski_checks(gen, g, &graph, caps, &mut c, &mut report)?,
    }
    report.verdicts = c.0.iter().map(|r| (r.name.clone(), r.verdict)).collect();
    report.checks = c.0;
    Ok(report)
}

/// One line of a multi-generation report. Empirical columns are `None`
/// where caps rule them out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub g: u32,
    pub n: String,
    pub e: String,
    pub matching_number: String,
    pub matching_number_solver: Option<usize>,
    /// `theta` for the fractal family, `psi` otherwise.
    pub count: String,
    pub count_empirical: Option<String>,
    pub entropy: Option<f64>,
    pub mu: Option<String>,
    pub mu_empirical: Option<String>,
    pub pearson: Option<String>,
    pub pearson_empirical: Option<String>,
}

pub fn report_row(gen: &Generator, family: Family, g: u32, caps: &Caps) -> Result<ReportRow> {
    let counts = analytic::counts(family, g)?;
    let n = usize::try_from(&counts.n).ok();
    let buildable = g <= gen.cap && n.is_some_and(|n| n <= 1 << 20);
    let graph = if buildable { Some(gen.family(family, g)?) } else { None };
    let small = graph.as_ref().filter(|h| h.n() <= caps.dense_order);
    let enumerable = graph.as_ref().filter(|h| h.edge_count() <= caps.enum_edges);

    let (matching_number, count, entropy) = match family {
        Family::Fractal => (
            analytic::fractal_matching_number(g)?.to_string(),
            analytic::fractal_matching_counts(g)?.theta.to_string(),
            None,
        ),
        Family::Nonfractal => {
            let psi = analytic::nonfractal_pm_count(g)?;
            let half = (&counts.n / 2u32).to_string();
            (half, psi.to_string(), Some(analytic::nonfractal_entropy(g)?.z))
        }
        Family::Sierpinski => {
            let half = (&counts.n / 2u32).to_string();
            if g == 1 {
                (half, "3".to_string(), Some(analytic::entropy_estimate(&BigInt::from(3), 4)?.z))
            } else {
                let psi = analytic::sierpinski_pm_count(g)?;
                (half, psi.to_string(), Some(analytic::sierpinski_entropy(g)?.z))
            }
        }
    };
    let count_empirical = match (family, enumerable) {
        (Family::Fractal, Some(h)) => Some(count_maximum_matchings_memoized(h, caps.enum_edges)?.count.to_string()),
        (_, Some(h)) => Some(count_perfect_matchings_bruteforce(h, caps.enum_edges)?.count.to_string()),
        (Family::Nonfractal, None) if g <= caps.det_generation => {
            Some(pfaffian::pm_count_via_determinant(&gen.nonfractal_oriented(g)?)?.to_string())
        }
        _ => None,
    };
    let (mu, pearson) = match family {
        Family::Sierpinski => (None, None),
        Family::Fractal => (
            Some(rational(&analytic::avg_distance_closed(family, g)?)),
            Some(opt_rational(&analytic::pearson_closed_fractal(g).ok())),
        ),
        Family::Nonfractal => (
            Some(rational(&analytic::avg_distance_closed(family, g)?)),
            Some(opt_rational(&analytic::pearson_closed_nonfractal(g).ok())),
        ),
    };
    Ok(ReportRow {
        g,
        n: counts.n.to_string(),
        e: counts.e.to_string(),
        matching_number,
        matching_number_solver: graph.as_ref().filter(|h| h.n() <= 1 << 16).map(crate::matching::matching_number),
        count,
        count_empirical,
        entropy,
        mu,
        mu_empirical: small.map(|h| distance_stats(h).map(|d| rational(&d.average))).transpose()?,
        pearson,
        pearson_empirical: graph.as_ref().map(|h| degree_stats(h).map(|d| opt_rational(&d.pearson))).transpose()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(family: Family, g: u32) -> AnalyticReport {
        verify(&Generator::default(), family, g, &Caps::default()).unwrap()
    }

    fn assert_all_pass(r: &AnalyticReport) {
        for c in &r.checks {
            assert_eq!(c.verdict, Verdict::Pass, "{} {}: {:?}", r.family, r.g, c);
        }
    }

    #[test]
    fn fractal_second_generation_passes() {
        let r = run(Family::Fractal, 2);
        assert_all_pass(&r);
        assert_eq!(r.counts["theta"], "136");
        assert_eq!(r.verdicts["theta by enumeration"], Verdict::Pass);
        assert_eq!(r.matching_number, "4");
    }

    #[test]
    fn nonfractal_third_generation_passes() {
        let r = run(Family::Nonfractal, 3);
        assert_all_pass(&r);
        assert_eq!(r.counts["psi"], "512");
        assert_eq!(r.verdicts["psi by sqrt-determinant"], Verdict::Pass);
        assert_eq!(r.verdicts["psi by enumeration"], Verdict::Pass);
    }

    #[test]
    fn sierpinski_reports() {
        let r = run(Family::Sierpinski, 2);
        assert_all_pass(&r);
        assert_eq!(r.counts["psi"], "8");
        let k4 = run(Family::Sierpinski, 1);
        assert_all_pass(&k4);
        assert_eq!(k4.counts["psi"], "3");
    }

    #[test]
    fn caps_turn_checks_into_skips() {
        let caps = Caps {
            enum_edges: 4,
            ..Caps::default()
        };
        let r = verify(&Generator::default(), Family::Fractal, 2, &caps).unwrap();
        assert!(r.skipped());
        assert!(!r.failed());
        assert_eq!(r.verdicts["theta by enumeration"], Verdict::Skipped);
    }

    #[test]
    fn report_rows() {
        let gen = Generator::default();
        let caps = Caps::default();
        let numbers: Vec<String> = (1..=4)
            .map(|g| report_row(&gen, Family::Fractal, g, &caps).unwrap().matching_number)
            .collect();
        assert_eq!(numbers, ["2", "4", "12", "44"]);
        let s: Vec<String> = (2..=5)
            .map(|g| report_row(&gen, Family::Sierpinski, g, &caps).unwrap().count)
            .collect();
        assert_eq!(s, ["8", "128", "524288", "36028797018963968"]);
        let row = report_row(&gen, Family::Nonfractal, 3, &caps).unwrap();
        assert_eq!(row.count_empirical.as_deref(), Some("512"));
        assert_eq!(row.mu, row.mu_empirical);
    }

    #[test]
    fn report_json_uses_decimal_strings() {
        let r = run(Family::Nonfractal, 2);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["counts"]["psi"], "8");
        assert_eq!(json["family"], "nonfractal");
        assert_eq!(json["verdicts"]["psi by enumeration"], "pass");
    }
}
