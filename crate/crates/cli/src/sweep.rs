//! Sweep argument parsing.
//!
//! Value lists accept a single number, a comma list like `50,100,200`, or
//! an inclusive range `a..b` with an optional `:step` suffix; the step
//! defaults to 1. Range endpoints and steps may be fractional.

use swan_core::SweepVariable;

use crate::error::{CliError, CliResult};

// ---- sweep variable ----

/// Parses a sweep variable name: dx, m, l, or n.
pub fn parse_variable(text: &str) -> CliResult<SweepVariable> {
    match text {
        "dx" => Ok(SweepVariable::Dx),
        "m" => Ok(SweepVariable::M),
        "l" => Ok(SweepVariable::L),
        "n" => Ok(SweepVariable::N),
        other => Err(CliError::Usage(format!(
            "unknown sweep variable '{other}', expected dx, m, l, or n"
        ))),
    }
}

// ---- value lists ----

/// Parses a sweep value list.
pub fn parse_values(text: &str) -> CliResult<Vec<f64>> {
    let values = if let Some((start, rest)) = text.split_once("..") {
        let (end, step) = match rest.split_once(':') {
            Some((end, step)) => (end, parse_number(step)?),
            None => (rest, 1.0),
        };
        let start = parse_number(start)?;
        let end = parse_number(end)?;
        if step <= 0.0 {
            return Err(CliError::Usage(format!(
                "range step must be positive, got {step}"
            )));
        }
        if end < start {
            return Err(CliError::Usage(format!(
                "range end {end} is below its start {start}"
            )));
        }
        let count = ((end - start) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| start + step * i as f64).collect()
    } else {
        text.split(',')
            .map(parse_number)
            .collect::<CliResult<Vec<f64>>>()?
    };
    if values.is_empty() {
        return Err(CliError::Usage("no sweep values given".to_string()));
    }
    Ok(values)
}

fn parse_number(text: &str) -> CliResult<f64> {
    let value: f64 = text
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("'{text}' is not a number")))?;
    if !value.is_finite() {
        return Err(CliError::Usage(format!("'{text}' is not finite")));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_are_inclusive() {
        let values = parse_values("1..64").unwrap();
        assert_eq!(values.len(), 64, "expected 64 values, got {}", values.len());
        assert_eq!(values[0], 1.0);
        assert_eq!(values[63], 64.0);

        let stepped = parse_values("10..500:10").unwrap();
        assert_eq!(stepped.len(), 50, "expected 50 values, got {}", stepped.len());
        assert_eq!(stepped[49], 500.0);
    }

    #[test]
    fn comma_lists_and_single_values_parse() {
        assert_eq!(parse_values("50,100,200").unwrap(), vec![50.0, 100.0, 200.0]);
        assert_eq!(parse_values("9").unwrap(), vec![9.0]);
    }

    #[test]
    fn malformed_inputs_are_usage_errors() {
        for text in ["", "abc", "5..1", "1..9:0", "1..9:-1"] {
            let err = parse_values(text).unwrap_err();
            assert_eq!(
                err.exit_code(),
                2,
                "expected exit 2 for '{text}', got {}",
                err.exit_code()
            );
        }
    }
}
