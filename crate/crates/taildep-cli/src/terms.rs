//! Parser for linear-combination terms given on the command line.
//!
//! A term is `COEFF*FAMILY(ARGS)` or just `FAMILY(ARGS)` with an implied
//! coefficient of 1. Families and their argument orders:
//!
//! ```text
//! pareto(shape, scale)
//! cauchy(location, scale)
//! weibull(shape, scale)
//! frechet(location, shape, scale)
//! ```

use taildep::distributions::DistributionSpec;
use taildep::tail_bounds::LinearTerm;

use crate::error::{config_err, CliResult};

pub fn parse_term(input: &str) -> CliResult<LinearTerm> {
    let s = input.trim();
    let (coeff, rest) = match split_coefficient(s) {
        Some((c, rest)) => {
            let coeff: f64 = c.trim().parse().map_err(|_| {
                config_err(format!("term '{input}': cannot parse coefficient '{c}'"))
            })?;
            (coeff, rest)
        }
        None => (1.0, s),
    };
    let spec = parse_spec(rest)
        .map_err(|m| config_err(format!("term '{input}': {m}")))?;
    Ok(LinearTerm::natural(coeff, spec))
}

/// Split at the `*` separating coefficient from family, if present.
/// The family name sits directly before the `(`, so the split point is
/// the last `*` ahead of it.
fn split_coefficient(s: &str) -> Option<(&str, &str)> {
    let open = s.find('(').unwrap_or(s.len());
    let star = s[..open].rfind('*')?;
    Some((&s[..star], s[star + 1..].trim()))
}

fn parse_spec(s: &str) -> Result<DistributionSpec, String> {
    let open = s
        .find('(')
        .ok_or_else(|| "expected FAMILY(ARGS)".to_string())?;
    if !s.ends_with(')') {
        return Err("expected closing ')'".to_string());
    }
    let family = s[..open].trim().to_ascii_lowercase();
    let args: Vec<f64> = s[open + 1..s.len() - 1]
        .split(',')
        .map(|a| {
            a.trim()
                .parse::<f64>()
                .map_err(|_| format!("cannot parse argument '{}'", a.trim()))
        })
        .collect::<Result<_, _>>()?;
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(format!("{family} takes {n} arguments, got {}", args.len()))
        }
    };
    let spec = match family.as_str() {
        "pareto" => {
            arity(2)?;
            DistributionSpec::Pareto {
                shape: args[0],
                scale: args[1],
            }
        }
        "cauchy" => {
            arity(2)?;
            DistributionSpec::Cauchy {
                location: args[0],
                scale: args[1],
            }
        }
        "weibull" => {
            arity(2)?;
            DistributionSpec::Weibull {
                shape: args[0],
                scale: args[1],
            }
        }
        "frechet" => {
            arity(3)?;
            DistributionSpec::Frechet {
                location: args[0],
                shape: args[1],
                scale: args[2],
            }
        }
        other => return Err(format!("unknown family '{other}'")),
    };
    Ok(spec)
}
