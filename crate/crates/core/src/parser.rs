//! Text format for networks and systems, plus JSON serialization of every
//! report type the crate produces.
//!
//! A document declares its dimension (`dim 2`) or names species
//! (`species X1 X2`), then lists one reaction per line:
//!
//! ```text
//! dim 2
//! [0,2] -> [1,1] : 1.0
//! [1,1] <-> [2,0] : 1.0, 2.0
//! ```
//!
//! With a `species` header, complexes can be written as combinations like
//! `X1 + 2 X2`; `0` denotes the zero complex. Numbers may be integers,
//! decimals, or exact ratios (`2/3`); ratios are preserved exactly for the
//! rational-arithmetic paths. A document in which every reaction carries a
//! rate denotes a mass-action system; one with no rates denotes a bare
//! network. JSON output uses a fixed key order and prints floats with 17
//! significant digits so that identical inputs give byte-identical output
//! and values round-trip exactly.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use thiserror::Error;

use crate::balancing::{BalanceReport, BirchSolution, DBRealization, PairResidual};
use crate::dynamics::{Trajectory, Verdict};
use crate::equivalence::{CbFeasibility, EquivalenceReport, SweepResult};
use crate::geometry::{MembershipStatus, PolytopeMembership, SingleTargetCase, SingleTargetVerdict};
use crate::model::{
    Edge, EmbeddedNetwork, FluxAssignment, MassActionSystem, StructureReport, Vertex, VertexId,
};

#[derive(Debug, Error, PartialEq)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

fn err<T>(line: usize, col: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, col, message: message.into() })
}

/// One reaction statement of a document.
#[derive(Debug, Clone)]
pub struct ReactionLine {
    pub source: Vec<BigRational>,
    pub target: Vec<BigRational>,
    pub rate: Option<f64>,
    pub line: usize,
}

/// Parsed form of a document before network construction.
#[derive(Debug, Clone)]
pub struct NetworkDocument {
    pub dimension: usize,
    pub species: Option<Vec<String>>,
    pub reactions: Vec<ReactionLine>,
}

/// What a document denotes: a system when every line carries a rate, a bare
/// network when none does.
#[derive(Debug, Clone, PartialEq)]
pub enum ParsedInput {
    System(MassActionSystem),
    Network(EmbeddedNetwork),
}

impl ParsedInput {
    pub fn network(&self) -> &EmbeddedNetwork {
        match self {
            ParsedInput::System(s) => s.network(),
            ParsedInput::Network(n) => n,
        }
    }

    /// The system itself, or the underlying network equipped with `rates`
    /// (which replace existing rates when both are present).
    pub fn into_system(self, rates: Option<Vec<f64>>) -> Result<MassActionSystem, ParseError> {
        let network = match (&self, &rates) {
            (ParsedInput::System(s), None) => return Ok(s.clone()),
            (ParsedInput::Network(_), None) => {
                return err(0, 0, "document has no rate constants; provide rates")
            }
            _ => self.network().clone(),
        };
        MassActionSystem::new(network, rates.unwrap())
            .map_err(|e| ParseError { line: 0, col: 0, message: e.to_string() })
    }
}

/// Parse a document in the text format.
pub fn parse_network(text: &str) -> Result<ParsedInput, ParseError> {
    let doc = parse_document(text)?;
    build(&doc)
}

/// Parse only to the document level.
pub fn parse_document(text: &str) -> Result<NetworkDocument, ParseError> {
    let mut dimension: Option<usize> = None;
    let mut species: Option<Vec<String>> = None;
    let mut reactions: Vec<ReactionLine> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let mut cur = Cursor::new(line, line_no);
        cur.skip_ws();
        if cur.peek_word("dim") {
            if dimension.is_some() {
                return err(line_no, cur.col(), "duplicate dimension declaration");
            }
            cur.take_word("dim");
            cur.skip_ws();
            let n = cur.integer()?;
            cur.expect_end()?;
            if n == 0 {
                return err(line_no, cur.col(), "dimension must be at least 1");
            }
            dimension = Some(n);
            continue;
        }
        if cur.peek_word("species") {
            if dimension.is_some() {
                return err(line_no, cur.col(), "duplicate dimension declaration");
            }
            cur.take_word("species");
            let mut names = Vec::new();
            loop {
                cur.skip_ws();
                if cur.at_end() {
                    break;
                }
                names.push(cur.ident()?);
            }
            if names.is_empty() {
                return err(line_no, cur.col(), "species header names no species");
            }
            dimension = Some(names.len());
            species = Some(names);
            continue;
        }

        let Some(dim) = dimension else {
            return err(line_no, cur.col(), "reaction before 'dim' or 'species' header");
        };
        let source = cur.complex(dim, species.as_deref())?;
        cur.skip_ws();
        let reversible = if cur.take_str("<->") {
            true
        } else if cur.take_str("->") {
            false
        } else {
            return err(line_no, cur.col(), "expected '->' or '<->'");
        };
        let target = cur.complex(dim, species.as_deref())?;
        cur.skip_ws();
        let (rate_fwd, rate_rev) = if cur.take_str(":") {
            cur.skip_ws();
            let col = cur.col();
            let fwd = cur.number()?.to_f64().ok_or(ParseError {
                line: line_no,
                col,
                message: "rate does not fit a float".into(),
            })?;
            cur.skip_ws();
            if reversible {
                if !cur.take_str(",") {
                    return err(line_no, cur.col(), "reversible reaction needs two rates");
                }
                cur.skip_ws();
                let col = cur.col();
                let rev = cur.number()?.to_f64().ok_or(ParseError {
                    line: line_no,
                    col,
                    message: "rate does not fit a float".into(),
                })?;
                (Some(fwd), Some(rev))
            } else {
                (Some(fwd), None)
            }
        } else {
            (None, None)
        };
        cur.expect_end()?;

        if let Some(r) = rate_fwd {
            if !(r > 0.0) {
                return err(line_no, 1, "rate must be strictly positive");
            }
        }
        if let Some(r) = rate_rev {
            if !(r > 0.0) {
                return err(line_no, 1, "rate must be strictly positive");
            }
        }
        reactions.push(ReactionLine {
            source: source.clone(),
            target: target.clone(),
            rate: rate_fwd,
            line: line_no,
        });
        if reversible {
            reactions.push(ReactionLine { source: target, target: source, rate: rate_rev, line: line_no });
        }
    }

    let Some(dimension) = dimension else {
        return err(1, 1, "document has no 'dim' or 'species' header");
    };
    if reactions.is_empty() {
        return err(1, 1, "document has no reactions");
    }
    Ok(NetworkDocument { dimension, species, reactions })
}

fn build(doc: &NetworkDocument) -> Result<ParsedInput, ParseError> {
    let with_rates = doc.reactions.iter().filter(|r| r.rate.is_some()).count();
    if with_rates != 0 && with_rates != doc.reactions.len() {
        let first = doc.reactions.iter().find(|r| r.rate.is_none()).unwrap();
        return err(first.line, 1, "either every reaction carries a rate or none does");
    }

    let mut index: BTreeMap<Vec<BigRational>, usize> = BTreeMap::new();
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut intern = |coords: &[BigRational]| -> usize {
        if let Some(&i) = index.get(coords) {
            return i;
        }
        let i = vertices.len();
        index.insert(coords.to_vec(), i);
        vertices.push(Vertex::from_exact(coords.to_vec()));
        i
    };

    let mut edges: Vec<Edge> = Vec::new();
    let mut rates: Vec<f64> = Vec::new();
    let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for r in &doc.reactions {
        let s = intern(&r.source);
        let t = intern(&r.target);
        if s == t {
            return err(r.line, 1, "reaction is a self-loop");
        }
        if seen.insert((s, t), r.line).is_some() {
            return err(r.line, 1, "duplicate reaction");
        }
        edges.push(Edge { source: VertexId(s), target: VertexId(t) });
        if let Some(rate) = r.rate {
            rates.push(rate);
        }
    }

    let network = EmbeddedNetwork::new(doc.dimension, vertices, edges)
        .map_err(|e| ParseError { line: 1, col: 1, message: e.to_string() })?;
    if rates.is_empty() {
        Ok(ParsedInput::Network(network))
    } else {
        let system = MassActionSystem::new(network, rates)
            .map_err(|e| ParseError { line: 1, col: 1, message: e.to_string() })?;
        Ok(ParsedInput::System(system))
    }
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    text: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Cursor { chars: text.chars().collect(), pos: 0, line, text }
    }

    fn col(&self) -> usize {
        self.pos + 1
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_word(&self, word: &str) -> bool {
        let rest: String = self.chars[self.pos..].iter().collect();
        rest.starts_with(word)
            && rest[word.len()..]
                .chars()
                .next()
                .map_or(true, |c| !c.is_alphanumeric() && c != '_')
    }

    fn take_word(&mut self, word: &str) {
        debug_assert!(self.peek_word(word));
        self.pos += word.chars().count();
    }

    fn take_str(&mut self, s: &str) -> bool {
        let rest: String = self.chars[self.pos..].iter().collect();
        if rest.starts_with(s) {
            self.pos += s.chars().count();
            true
        } else {
            false
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            err(self.line, self.col(), format!("unexpected trailing input in {:?}", self.text.trim()))
        }
    }

    fn integer(&mut self) -> Result<usize, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return err(self.line, self.col(), "expected an integer");
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| ParseError {
            line: self.line,
            col: start + 1,
            message: "integer out of range".into(),
        })
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        if !self.peek().is_some_and(|c| c.is_alphabetic() || c == '_') {
            return err(self.line, self.col(), "expected a name");
        }
        while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    /// Integer, decimal (with optional exponent), or ratio literal, as an
    /// exact rational.
    fn number(&mut self) -> Result<BigRational, ParseError> {
        self.skip_ws();
        let start_col = self.col();
        let negative = if self.take_str("-") {
            true
        } else {
            let _ = self.take_str("+");
            false
        };
        let int_start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if int_start == self.pos {
            return err(self.line, start_col, "expected a number");
        }
        let int_part: String = self.chars[int_start..self.pos].iter().collect();
        let mut value = BigRational::from_integer(int_part.parse::<BigInt>().unwrap());

        if self.take_str("/") {
            let den_start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            if den_start == self.pos {
                return err(self.line, self.col(), "expected a denominator");
            }
            let den: BigInt =
                self.chars[den_start..self.pos].iter().collect::<String>().parse().unwrap();
            if den.is_zero() {
                return err(self.line, den_start + 1, "denominator is zero");
            }
            value /= BigRational::from_integer(den);
        } else {
            if self.take_str(".") {
                let frac_start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                if frac_start == self.pos {
                    return err(self.line, self.col(), "expected digits after the decimal point");
                }
                let frac: String = self.chars[frac_start..self.pos].iter().collect();
                let scale = BigInt::from(10u32).pow(frac.len() as u32);
                value += BigRational::new(frac.parse::<BigInt>().unwrap(), scale);
            }
            if self.peek() == Some('e') || self.peek() == Some('E') {
                self.pos += 1;
                let neg_exp = if self.take_str("-") {
                    true
                } else {
                    let _ = self.take_str("+");
                    false
                };
                let exp_start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                if exp_start == self.pos {
                    return err(self.line, self.col(), "expected an exponent");
                }
                let exp: u32 = self.chars[exp_start..self.pos]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| ParseError {
                        line: self.line,
                        col: exp_start + 1,
                        message: "exponent out of range".into(),
                    })?;
                let pow = BigRational::from_integer(BigInt::from(10u32).pow(exp));
                if neg_exp {
                    value /= pow;
                } else {
                    value *= pow;
                }
            }
        }
        if negative {
            value = -value;
        }
        Ok(value)
    }

    /// A complex: `[a, b, ...]` in coordinate form, or a combination of
    /// species (requires a species header), or `0` for the zero complex.
    fn complex(
        &mut self,
        dim: usize,
        species: Option<&[String]>,
    ) -> Result<Vec<BigRational>, ParseError> {
        self.skip_ws();
        if self.take_str("[") {
            let mut coords = Vec::new();
            loop {
                coords.push(self.number()?);
                self.skip_ws();
                if self.take_str("]") {
                    break;
                }
                if !self.take_str(",") {
                    return err(self.line, self.col(), "expected ',' or ']'");
                }
            }
            if coords.len() != dim {
                return err(
                    self.line,
                    self.col(),
                    format!("complex has {} coordinates, expected {}", coords.len(), dim),
                );
            }
            return Ok(coords);
        }

        // Species combination. A bare `0` is the zero complex.
        let mut coords = vec![BigRational::zero(); dim];
        self.skip_ws();
        if self.peek() == Some('0')
            && !self.chars.get(self.pos + 1).is_some_and(|c| c.is_ascii_digit() || *c == '.')
        {
            self.pos += 1;
            return Ok(coords);
        }
        let Some(names) = species else {
            return err(
                self.line,
                self.col(),
                "species notation requires a 'species' header",
            );
        };
        loop {
            self.skip_ws();
            let coeff = if self.peek().is_some_and(|c| c.is_ascii_digit() || c == '-' || c == '+')
            {
                self.number()?
            } else {
                BigRational::one()
            };
            self.skip_ws();
            let col = self.col();
            let name = self.ident()?;
            let Some(i) = names.iter().position(|n| *n == name) else {
                return err(self.line, col, format!("unknown species '{name}'"));
            };
            coords[i] += coeff;
            self.skip_ws();
            if !self.take_str("+") {
                break;
            }
        }
        Ok(coords)
    }
}

// ---------------------------------------------------------------------------
// JSON output
// ---------------------------------------------------------------------------

/// Any serializable analysis artifact.
pub enum Report<'a> {
    Network(&'a EmbeddedNetwork),
    System(&'a MassActionSystem),
    Structure(&'a StructureReport),
    Membership(&'a PolytopeMembership),
    SingleTarget(&'a SingleTargetVerdict),
    Flux(&'a FluxAssignment),
    Birch(&'a BirchSolution),
    DbRealization(&'a DBRealization),
    Equivalence(&'a EquivalenceReport),
    CbFeasibility(&'a CbFeasibility),
    Trajectory(&'a Trajectory),
    Sweep(&'a SweepResult),
    DetailedBalance(&'a BalanceReport, &'a [PairResidual]),
    ComplexBalance(&'a BalanceReport, &'a [(VertexId, f64)]),
}

/// Serialize a report with deterministic key order; floats carry 17
/// significant digits, enough to round-trip every `f64` exactly.
pub fn emit_json(report: &Report) -> String {
    match report {
        Report::Network(n) => network_json(n, None),
        Report::System(s) => network_json(s.network(), Some(s.rates())),
        Report::Structure(r) => structure_json(r),
        Report::Membership(m) => membership_json(m),
        Report::SingleTarget(v) => format!(
            "{{\"case\":{},\"membership\":{},\"steadyStateFlux\":{}}}",
            jstr(match v.case {
                SingleTargetCase::GloballyStable => "GLOBALLY_STABLE",
                SingleTargetCase::NoPositiveSteadyState => "NO_POSITIVE_STEADY_STATE",
            }),
            membership_json(&v.membership),
            v.steady_state_flux.as_ref().map_or("null".into(), |f| jvec(&f.0)),
        ),
        Report::Flux(f) => jvec(&f.0),
        Report::Birch(b) => format!(
            "{{\"kappaPrime\":{},\"mu\":{},\"steadyState\":{},\"residual\":{}}}",
            jvec(&b.kappa_prime),
            jvec(&b.mu),
            jvec(&b.steady_state),
            jnum(b.residual),
        ),
        Report::DbRealization(r) => format!(
            "{{\"system\":{},\"steadyState\":{},\"equivalenceResidual\":{}}}",
            network_json(r.system.network(), Some(r.system.rates())),
            jvec(&r.steady_state),
            jnum(r.equivalence_residual),
        ),
        Report::Equivalence(r) => {
            let rows: Vec<String> = r
                .residuals
                .iter()
                .map(|(v, res)| format!("{{\"vertex\":{},\"residual\":{}}}", jvec(v), jnum(*res)))
                .collect();
            format!(
                "{{\"equivalent\":{},\"maxResidual\":{},\"residuals\":[{}]}}",
                r.equivalent,
                jnum(r.max_residual),
                rows.join(",")
            )
        }
        Report::CbFeasibility(c) => {
            let witness = c.flux_witness.as_ref().map_or("null".into(), |w| {
                let rows: Vec<String> = (0..w.rows()).map(|i| jvec(w.row(i))).collect();
                format!("[{}]", rows.join(","))
            });
            let sources: Vec<String> = c.sources.iter().map(|s| jvec(s)).collect();
            format!(
                "{{\"feasible\":{},\"sources\":[{}],\"fluxWitness\":{},\"steadyStateUsed\":{},\"steadyResidual\":{},\"realizedSystem\":{}}}",
                c.feasible,
                sources.join(","),
                witness,
                jvec(&c.steady_state_used),
                jnum(c.steady_residual),
                c.realized_system
                    .as_ref()
                    .map_or("null".into(), |s| network_json(s.network(), Some(s.rates()))),
            )
        }
        Report::Trajectory(t) => {
            let states: Vec<String> = t.states.iter().map(|s| jvec(s)).collect();
            format!(
                "{{\"times\":{},\"states\":[{}],\"verdict\":{},\"limit\":{},\"exitFace\":[{}],\"conservationDrift\":{}}}",
                jvec(&t.times),
                states.join(","),
                jstr(verdict_name(t.verdict)),
                t.limit.as_ref().map_or("null".into(), |l| jvec(l)),
                t.exit_face.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","),
                jnum(t.conservation_drift),
            )
        }
        Report::Sweep(s) => {
            let rows: Vec<String> = s
                .rows
                .iter()
                .map(|r| {
                    format!(
                        "{{\"parameter\":{},\"feasible\":{},\"witness\":{},\"error\":{}}}",
                        jnum(r.parameter),
                        r.feasible.map_or("null".into(), |f| f.to_string()),
                        jstr(&r.witness_summary),
                        r.error.as_deref().map_or("null".into(), jstr),
                    )
                })
                .collect();
            format!(
                "{{\"rows\":[{}],\"boundaries\":{}}}",
                rows.join(","),
                jvec(&s.boundaries)
            )
        }
        Report::DetailedBalance(rep, pairs) => {
            let rows: Vec<String> = pairs
                .iter()
                .map(|p| {
                    format!(
                        "{{\"forward\":[{},{}],\"residual\":{}}}",
                        p.forward.0 .0,
                        p.forward.1 .0,
                        jnum(p.residual)
                    )
                })
                .collect();
            format!(
                "{{\"balanced\":{},\"maxResidual\":{},\"pairs\":[{}]}}",
                rep.balanced,
                jnum(rep.max_residual),
                rows.join(",")
            )
        }
        Report::ComplexBalance(rep, verts) => {
            let rows: Vec<String> = verts
                .iter()
                .map(|(id, r)| format!("{{\"vertex\":{},\"residual\":{}}}", id.0, jnum(*r)))
                .collect();
            format!(
                "{{\"balanced\":{},\"maxResidual\":{},\"vertices\":[{}]}}",
                rep.balanced,
                jnum(rep.max_residual),
                rows.join(",")
            )
        }
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::ConvergedInterior => "CONVERGED_INTERIOR",
        Verdict::ApproachedBoundary => "APPROACHED_BOUNDARY",
        Verdict::Diverged => "DIVERGED",
        Verdict::Inconclusive => "INCONCLUSIVE",
    }
}

fn jnum(v: f64) -> String {
    debug_assert!(v.is_finite());
    format!("{:.16e}", v)
}

fn jvec(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|&x| jnum(x)).collect();
    format!("[{}]", items.join(","))
}

fn jstr(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn rational_str(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn network_json(net: &EmbeddedNetwork, rates: Option<&[f64]>) -> String {
    let vertices: Vec<String> = net.vertices().iter().map(|v| jvec(v.coords())).collect();
    let exact = if net.has_exact_coords() {
        let rows: Vec<String> = net
            .vertices()
            .iter()
            .map(|v| {
                let parts: Vec<String> =
                    v.exact().unwrap().iter().map(|r| jstr(&rational_str(r))).collect();
                format!("[{}]", parts.join(","))
            })
            .collect();
        format!(",\"exactVertices\":[{}]", rows.join(","))
    } else {
        String::new()
    };
    let edges: Vec<String> =
        net.edges().iter().map(|e| format!("[{},{}]", e.source.0, e.target.0)).collect();
    let rates_part = rates.map_or(String::new(), |r| format!(",\"rates\":{}", jvec(r)));
    format!(
        "{{\"dimension\":{},\"vertices\":[{}]{},\"edges\":[{}]{}}}",
        net.dimension(),
        vertices.join(","),
        exact,
        edges.join(","),
        rates_part,
    )
}

fn structure_json(r: &StructureReport) -> String {
    let ids: Vec<String> = r.source_ids.iter().map(|id| id.0.to_string()).collect();
    format!(
        "{{\"sourceIds\":[{}],\"numComponents\":{},\"stoichDim\":{},\"deficiency\":{},\"isReversible\":{},\"isWeaklyReversible\":{},\"isSingleTarget\":{},\"targetId\":{},\"isPowerLaw\":{}}}",
        ids.join(","),
        r.num_components,
        r.stoich_dim,
        r.deficiency,
        r.is_reversible,
        r.is_weakly_reversible,
        r.is_single_target,
        r.target_id.map_or("null".into(), |id| id.0.to_string()),
        r.is_power_law,
    )
}

fn membership_json(m: &PolytopeMembership) -> String {
    let status = match m.status {
        MembershipStatus::RelativeInterior => "RELATIVE_INTERIOR",
        MembershipStatus::Boundary => "BOUNDARY",
        MembershipStatus::Outside => "OUTSIDE",
    };
    let witness = m.barycentric_witness.as_ref().map_or("null".into(), |w| {
        let rows: Vec<String> =
            w.iter().map(|(id, a)| format!("[{},{}]", id.0, jnum(*a))).collect();
        format!("[{}]", rows.join(","))
    });
    format!(
        "{{\"status\":{},\"barycentricWitness\":{},\"separatingDirection\":{}}}",
        jstr(status),
        witness,
        m.separating_direction.as_ref().map_or("null".into(), |w| jvec(w)),
    )
}

// ---------------------------------------------------------------------------
// JSON input for networks and systems
// ---------------------------------------------------------------------------

/// Parse a network or system from the JSON produced by [`emit_json`].
pub fn parse_network_json(text: &str) -> Result<ParsedInput, ParseError> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| ParseError { line: e.line(), col: e.column(), message: e.to_string() })?;
    let bad = |msg: &str| ParseError { line: 0, col: 0, message: msg.to_string() };

    let dim = value["dimension"].as_u64().ok_or_else(|| bad("missing dimension"))? as usize;
    let verts_json = value["vertices"].as_array().ok_or_else(|| bad("missing vertices"))?;
    let exact_json = value["exactVertices"].as_array();
    let mut vertices = Vec::with_capacity(verts_json.len());
    for (i, row) in verts_json.iter().enumerate() {
        let coords: Vec<f64> = row
            .as_array()
            .ok_or_else(|| bad("vertex is not an array"))?
            .iter()
            .map(|v| v.as_f64().ok_or_else(|| bad("vertex coordinate is not a number")))
            .collect::<Result<_, _>>()?;
        match exact_json {
            Some(rows) => {
                let parts = rows
                    .get(i)
                    .and_then(|r| r.as_array())
                    .ok_or_else(|| bad("exactVertices shape mismatch"))?;
                let mut exact = Vec::with_capacity(parts.len());
                for p in parts {
                    let s = p.as_str().ok_or_else(|| bad("exact coordinate is not a string"))?;
                    exact.push(parse_ratio_str(s).ok_or_else(|| bad("bad exact coordinate"))?);
                }
                vertices.push(Vertex::from_exact(exact));
                let _ = coords;
            }
            None => vertices.push(Vertex::new(coords)),
        }
    }
    let edges_json = value["edges"].as_array().ok_or_else(|| bad("missing edges"))?;
    let mut edges = Vec::with_capacity(edges_json.len());
    for e in edges_json {
        let pair = e.as_array().ok_or_else(|| bad("edge is not a pair"))?;
        let s = pair[0].as_u64().ok_or_else(|| bad("edge endpoint"))? as usize;
        let t = pair[1].as_u64().ok_or_else(|| bad("edge endpoint"))? as usize;
        edges.push(Edge { source: VertexId(s), target: VertexId(t) });
    }
    let network = EmbeddedNetwork::new(dim, vertices, edges)
        .map_err(|e| bad(&e.to_string()))?;
    match value.get("rates").and_then(|r| r.as_array()) {
        Some(rates) => {
            let rates: Vec<f64> = rates
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| bad("rate is not a number")))
                .collect::<Result<_, _>>()?;
            let system =
                MassActionSystem::new(network, rates).map_err(|e| bad(&e.to_string()))?;
            Ok(ParsedInput::System(system))
        }
        None => Ok(ParsedInput::Network(network)),
    }
}

fn parse_ratio_str(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.parse().ok()?;
            let q: BigInt = q.parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numlin::Tolerances;

    #[test]
    fn single_line_system() {
        let input = "dim 2\n[0,2] -> [1,1] : 1.0\n";
        let ParsedInput::System(sys) = parse_network(input).unwrap() else {
            panic!("expected a system");
        };
        assert_eq!(sys.network().edges().len(), 1);
        assert_eq!(sys.rates(), &[1.0]);
        assert_eq!(sys.network().vertex(VertexId(0)).coords(), &[0.0, 2.0]);
    }

    #[test]
    fn species_sugar() {
        let input = "species X1 X2\nX1 + X2 -> 2 X1 : 0.5\n";
        let ParsedInput::System(sys) = parse_network(input).unwrap() else {
            panic!("expected a system");
        };
        let net = sys.network();
        assert_eq!(net.vertex(VertexId(0)).coords(), &[1.0, 1.0]);
        assert_eq!(net.vertex(VertexId(1)).coords(), &[2.0, 0.0]);
    }

    #[test]
    fn negative_exponents_flagged_power_law() {
        let input = "dim 3\n[-1,-2,0] -> [0,0,0] : 2.0\n";
        let parsed = parse_network(input).unwrap();
        assert!(parsed.network().is_power_law());
    }

    #[test]
    fn bare_network_without_rates() {
        let input = "dim 1\n[0] -> [1]\n[2] -> [1]\n";
        assert!(matches!(parse_network(input).unwrap(), ParsedInput::Network(_)));
    }

    #[test]
    fn mixed_rates_rejected() {
        let input = "dim 1\n[0] -> [1] : 1.0\n[2] -> [1]\n";
        let e = parse_network(input).unwrap_err();
        assert_eq!(e.line, 3);
    }

    #[test]
    fn reversible_sugar_two_edges() {
        let input = "dim 1\n[0] <-> [1] : 2.0, 3.0\n";
        let ParsedInput::System(sys) = parse_network(input).unwrap() else {
            panic!("expected a system");
        };
        assert_eq!(sys.network().edges().len(), 2);
        assert_eq!(sys.rates(), &[2.0, 3.0]);
        assert!(sys.network().is_reversible());
    }

    #[test]
    fn ratio_literals_exact() {
        let input = "dim 1\n[2/3] -> [1] : 1/4\n";
        let ParsedInput::System(sys) = parse_network(input).unwrap() else {
            panic!("expected a system");
        };
        let exact = sys.network().vertex(VertexId(0)).exact().unwrap();
        assert_eq!(rational_str(&exact[0]), "2/3");
        assert_eq!(sys.rate(0), 0.25);
    }

    #[test]
    fn self_loop_rejected_with_line() {
        let input = "dim 1\n[0] -> [1] : 1\n[1] -> [1] : 1\n";
        let e = parse_network(input).unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("self-loop"));
    }

    #[test]
    fn duplicate_reaction_rejected() {
        let input = "dim 1\n[0] -> [1] : 1\n[0] -> [1] : 2\n";
        let e = parse_network(input).unwrap_err();
        assert_eq!(e.line, 3);
    }

    #[test]
    fn nonpositive_rate_rejected() {
        let input = "dim 1\n[0] -> [1] : 0\n";
        assert!(parse_network(input).is_err());
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let input = "dim 2\n[0] -> [1,1] : 1\n";
        let e = parse_network(input).unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn syntax_error_position() {
        let input = "dim 1\n[0] => [1]\n";
        let e = parse_network(input).unwrap_err();
        assert_eq!(e.line, 2);
        assert_eq!(e.col, 5);
    }

    #[test]
    fn compact_species_coefficients() {
        let input = "species X1 X2\n2X1 -> X1 + X2 : 1\n";
        let ParsedInput::System(sys) = parse_network(input).unwrap() else {
            panic!("expected a system");
        };
        assert_eq!(sys.network().vertex(VertexId(0)).coords(), &[2.0, 0.0]);
    }

    #[test]
    fn ratio_coefficient_in_species_form() {
        let input = "species A B\n2/5 A + 2/5 B -> A : 1\n";
        let ParsedInput::System(sys) = parse_network(input).unwrap() else {
            panic!("expected a system");
        };
        assert_eq!(sys.network().vertex(VertexId(0)).coords(), &[0.4, 0.4]);
        assert!(sys.network().vertex(VertexId(0)).is_power_law());
    }

    #[test]
    fn zero_complex_in_species_form() {
        let input = "species A B\nA + B -> 0 : 1.5\n";
        let ParsedInput::System(sys) = parse_network(input).unwrap() else {
            panic!("expected a system");
        };
        assert_eq!(sys.network().vertex(VertexId(1)).coords(), &[0.0, 0.0]);
    }

    #[test]
    fn json_roundtrip_identity() {
        let input = "dim 2\n[0,2] <-> [1,1] : 0.1, 2/3\n[2,0] -> [1,1] : 1e-3\n";
        let ParsedInput::System(sys) = parse_network(input).unwrap() else {
            panic!("expected a system");
        };
        let json = emit_json(&Report::System(&sys));
        let ParsedInput::System(back) = parse_network_json(&json).unwrap() else {
            panic!("expected a system");
        };
        assert_eq!(sys, back);
        // And the re-emitted JSON is byte-identical.
        assert_eq!(json, emit_json(&Report::System(&back)));
    }

    #[test]
    fn structure_report_json_contains_deficiency() {
        let input = "dim 1\n[0] -> [1] : 1\n";
        let ParsedInput::System(sys) = parse_network(input).unwrap() else {
            panic!("expected a system");
        };
        let report = crate::model::classify_structure(sys.network(), &Tolerances::default());
        let json = emit_json(&Report::Structure(&report));
        assert!(json.contains("\"deficiency\":0"));
        assert!(json.contains("\"isSingleTarget\":true"));
    }

    #[test]
    fn flux_json_is_plain_array() {
        let f = FluxAssignment(vec![1.0, 2.0]);
        assert_eq!(
            emit_json(&Report::Flux(&f)),
            "[1.0000000000000000e0,2.0000000000000000e0]"
        );
    }

    #[test]
    fn float_formatting_roundtrips() {
        for v in [
            1.0,
            -0.1,
            2.0 / 3.0,
            1e-300,
            12345.678901234567,
            f64::MIN_POSITIVE,
        ] {
            let s = jnum(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "value {v:?} via {s}");
        }
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let input = "# a comment\ndim 1\n\n[0] -> [1] : 1 # trailing\n";
        assert!(parse_network(input).is_ok());
    }

    #[test]
    fn rates_equip_and_replace() {
        let bare = parse_network("dim 1\n[0] -> [1]\n").unwrap();
        assert!(bare.clone().into_system(None).is_err());
        let sys = bare.into_system(Some(vec![2.5])).unwrap();
        assert_eq!(sys.rates(), &[2.5]);

        let with_rates = parse_network("dim 1\n[0] -> [1] : 1\n").unwrap();
        let replaced = with_rates.into_system(Some(vec![7.0])).unwrap();
        assert_eq!(replaced.rates(), &[7.0]);
    }
}
