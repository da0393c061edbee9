use std::io::{Read, Write};

use crate::congestion::Profile;
use crate::cost::ExtCost;
use crate::dynamics::{MoveTrace, Phase, SolverKind, Status, Step};
use crate::error::{Error, Result};
use crate::matroid::Strategy;
use crate::potentials::PotentialValue;
use crate::scalar::Scalar;
use crate::{PlayerId, ResourceId};

pub const TRACE_HEADER: [&str; 8] = ["step", "phase", "player", "from", "to", "cost_before", "cost_after", "potential"];

const NONE: &str = "NONE";
const DISCARDED: &str = "DISCARDED";
const START: &str = "start";

fn strategy_token(s: &Strategy, names: &[String]) -> String {
    s.iter().map(|r| names[r.0].as_str()).collect::<Vec<_>>().join("+")
}

fn opt<T>(v: Option<T>, f: impl FnOnce(T) -> String) -> String {
    v.map_or_else(|| NONE.to_owned(), f)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Trace(e.to_string())
}

/// Writes a trace as CSV. A dynamics trace starts with one `start` row
/// (step 0) per player giving the initial strategy.
pub fn write_trace<S: Scalar, W: Write>(trace: &MoveTrace<S>, names: &[String], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER).map_err(csv_err)?;
    if let Some(start) = &trace.start {
        for (p, s) in start.0.iter().enumerate() {
            let row = ["0", START, &(p + 1).to_string(), NONE, &strategy_token(s, names), NONE, NONE, NONE];
            w.write_record(row).map_err(csv_err)?;
        }
    }
    for (i, step) in trace.steps.iter().enumerate() {
        let to = match (&step.to, step.phase) {
            (None, Phase::Discard) => DISCARDED.to_owned(),
            (to, _) => opt(to.as_ref(), |s| strategy_token(s, names)),
        };
        w.write_record([
            (i + 1).to_string(),
            step.phase.to_string(),
            step.player.to_string(),
            opt(step.from.as_ref(), |s| strategy_token(s, names)),
            to,
            opt(step.cost_before.as_ref(), ExtCost::canonical),
            opt(step.cost_after.as_ref(), ExtCost::canonical),
            opt(step.potential.as_ref(), PotentialValue::canonical),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Trace(e.to_string()))
}

/// Reads a trace written by [`write_trace`]. The solver kind is inferred
/// from the phases; the status is taken to be converged.
pub fn read_trace<S: Scalar, R: Read>(input: R, names: &[String]) -> Result<MoveTrace<S>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers().map_err(csv_err)?.clone();
    if !header.iter().eq(TRACE_HEADER) {
        return Err(Error::Trace(format!("header must be {}", TRACE_HEADER.join(","))));
    }
    let resource = |tok: &str, line: usize| -> Result<ResourceId> {
        names
            .iter()
            .position(|n| n == tok)
            .map(ResourceId)
            .ok_or_else(|| Error::Trace(format!("line {line}: unknown resource {tok:?}")))
    };
    let strategy = |tok: &str, line: usize| -> Result<Option<Strategy>> {
        if tok == NONE || tok == DISCARDED {
            return Ok(None);
        }
        tok.split('+').map(|t| resource(t, line)).collect::<Result<Vec<_>>>().map(|v| Some(Strategy::new(v)))
    };
    let cost = |tok: &str, line: usize| -> Result<Option<ExtCost<S>>> {
        if tok == NONE {
            return Ok(None);
        }
        ExtCost::parse_canonical(tok)
            .map(Some)
            .ok_or_else(|| Error::Trace(format!("line {line}: bad cost {tok:?}")))
    };

    let mut start: Vec<Option<Strategy>> = Vec::new();
    let mut steps = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = i + 2;
        let field = |k: usize| rec.get(k).unwrap_or("");
        let player = match field(2).parse::<usize>() {
            Ok(p) if p >= 1 => PlayerId(p - 1),
            _ => return Err(Error::Trace(format!("line {line}: bad player {:?}", field(2)))),
        };
        if field(1) == START {
            if start.len() <= player.0 {
                start.resize(player.0 + 1, None);
            }
            start[player.0] = strategy(field(4), line)?;
            continue;
        }
        let phase: Phase = field(1).parse().map_err(|e| Error::Trace(format!("line {line}: {e}")))?;
        let potential = match field(7) {
            NONE => None,
            tok => Some(tok.parse::<PotentialValue<S>>().map_err(|e| Error::Trace(format!("line {line}: {e}")))?),
        };
        steps.push(Step {
            round: steps.len() + 1,
            phase,
            player,
            from: strategy(field(3), line)?,
            to: strategy(field(4), line)?,
            cost_before: cost(field(5), line)?,
            cost_after: cost(field(6), line)?,
            potential,
        });
    }

    let start = if start.is_empty() {
        None
    } else {
        let profile = start
            .into_iter()
            .enumerate()
            .map(|(p, s)| s.ok_or_else(|| Error::Trace(format!("no start row for player {}", p + 1))))
            .collect::<Result<Vec<_>>>()?;
        Some(Profile(profile))
    };
    let solver = if start.is_some() || steps.iter().all(|s| s.phase == Phase::Move) && !steps.is_empty() {
        SolverKind::Dynamics
    } else if steps.iter().any(|s| matches!(s.phase, Phase::Insert(_) | Phase::Discard)) {
        SolverKind::Insertion
    } else {
        SolverKind::Layered
    };
    Ok(MoveTrace { solver, start, steps, status: Status::Converged, restarts: 0 })
}
