//! Plain-text network file.
//!
//! ```text
//! BASE_MVA 100
//! BUS <id> <slack|gen|load> <v_mag> <v_ang_deg> <p_load> <q_load> <p_gen> <q_gen> <q_min> <q_max> <shunt_b>
//! BRANCH <from> <to> <r> <x> <b_half> <tap> <limit_mva> <priority> <open|closed>
//! ```
//!
//! `#` starts a comment. Branch order assigns the switch labels: the first
//! `BRANCH` line is `S1`.

use std::fmt::Write as _;
use std::str::FromStr;

use hatsga_core::netmodel::{BranchRecord, BusKind, BusRecord, Network, NetworkError, SwitchId, SwitchState};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn field<T: FromStr>(line: usize, name: &str, tok: &str) -> Result<T, ParseError> {
    tok.parse()
        .map_err(|_| syntax(line, format!("invalid {name} `{tok}`")))
}

pub fn parse_network(text: &str) -> Result<Network, ParseError> {
    let mut base_mva = None;
    let mut buses = Vec::new();
    let mut branches = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        let Some((&keyword, rest)) = toks.split_first() else {
            continue;
        };
        match keyword {
            "BASE_MVA" => {
                if base_mva.is_some() {
                    return Err(syntax(line, "BASE_MVA given twice"));
                }
                let [tok] = rest else {
                    return Err(syntax(line, "BASE_MVA takes one value"));
                };
                let v: f64 = field(line, "base MVA", tok)?;
                if !(v > 0.0 && v.is_finite()) {
                    return Err(syntax(line, "base MVA must be positive"));
                }
                base_mva = Some(v);
            }
            "BUS" => buses.push(parse_bus(line, rest)?),
            "BRANCH" => branches.push(parse_branch(line, rest)?),
            other => return Err(syntax(line, format!("unknown record `{other}`"))),
        }
    }
    Ok(Network::new(buses, branches, base_mva.unwrap_or(100.0))?)
}

fn parse_bus(line: usize, t: &[&str]) -> Result<BusRecord, ParseError> {
    if t.len() != 11 {
        return Err(syntax(line, format!("BUS expects 11 fields, found {}", t.len())));
    }
    let kind = match t[1] {
        "slack" => BusKind::Slack,
        "gen" => BusKind::Generator,
        "load" => BusKind::Load,
        other => return Err(syntax(line, format!("unknown bus kind `{other}`"))),
    };
    let deg: f64 = field(line, "voltage angle", t[3])?;
    Ok(BusRecord {
        id: field(line, "bus id", t[0])?,
        kind,
        v_mag: field(line, "voltage magnitude", t[2])?,
        v_ang: deg.to_radians(),
        p_load: field(line, "p_load", t[4])?,
        q_load: field(line, "q_load", t[5])?,
        p_gen: field(line, "p_gen", t[6])?,
        q_gen: field(line, "q_gen", t[7])?,
        q_min: field(line, "q_min", t[8])?,
        q_max: field(line, "q_max", t[9])?,
        shunt_b: field(line, "shunt_b", t[10])?,
    })
}

fn parse_branch(line: usize, t: &[&str]) -> Result<BranchRecord, ParseError> {
    if t.len() != 9 {
        return Err(syntax(line, format!("BRANCH expects 9 fields, found {}", t.len())));
    }
    let default_state = match t[8] {
        "open" => SwitchState::Open,
        "closed" => SwitchState::Closed,
        other => return Err(syntax(line, format!("unknown switch state `{other}`"))),
    };
    Ok(BranchRecord {
        switch_id: SwitchId(0),
        from_bus: field(line, "from bus", t[0])?,
        to_bus: field(line, "to bus", t[1])?,
        r: field(line, "resistance", t[2])?,
        x: field(line, "reactance", t[3])?,
        b_half: field(line, "b_half", t[4])?,
        tap: field(line, "tap", t[5])?,
        limit: field(line, "limit", t[6])?,
        priority: field(line, "priority", t[7])?,
        default_state,
    })
}

/// Degrees value that converts back to exactly `rad`, when one exists
/// within a few ulps of the direct conversion.
fn degrees_exact(rad: f64) -> f64 {
    let deg = rad.to_degrees();
    let (mut up, mut down) = (deg, deg);
    for _ in 0..8 {
        if up.to_radians() == rad {
            return up;
        }
        if down.to_radians() == rad {
            return down;
        }
        up = up.next_up();
        down = down.next_down();
    }
    deg
}

/// Writes a network in the format read by [`parse_network`].
pub fn serialize_network(net: &Network) -> String {
    let mut out = String::new();
    writeln!(out, "BASE_MVA {}", net.base_mva()).unwrap();
    for b in net.buses() {
        let kind = match b.kind {
            BusKind::Slack => "slack",
            BusKind::Generator => "gen",
            BusKind::Load => "load",
        };
        writeln!(
            out,
            "BUS {} {} {} {} {} {} {} {} {} {} {}",
            b.id,
            kind,
            b.v_mag,
            degrees_exact(b.v_ang),
            b.p_load,
            b.q_load,
            b.p_gen,
            b.q_gen,
            b.q_min,
            b.q_max,
            b.shunt_b
        )
        .unwrap();
    }
    for br in net.branches() {
        let state = match br.default_state {
            SwitchState::Open => "open",
            SwitchState::Closed => "closed",
        };
        writeln!(
            out,
            "BRANCH {} {} {} {} {} {} {} {} {}",
            br.from_bus, br.to_bus, br.r, br.x, br.b_half, br.tap, br.limit, br.priority, state
        )
        .unwrap();
    }
    out
}
