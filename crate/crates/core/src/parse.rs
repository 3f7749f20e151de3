use crate::error::{Error, Result};

/// Splits `name(args)` into the lowercase name and the raw argument text.
pub(crate) fn split_call(s: &str) -> Result<(String, String)> {
    let s = s.trim();
    let open = s
        .find('(')
        .ok_or_else(|| Error::Config(format!("expected name(args), got `{s}`")))?;
    if !s.ends_with(')') {
        return Err(Error::Config(format!("missing closing parenthesis in `{s}`")));
    }
    let name = s[..open].trim().to_ascii_lowercase();
    let args = s[open + 1..s.len() - 1].trim().to_string();
    Ok((name, args))
}

pub(crate) fn parse_numbers(args: &str, ctx: &str) -> Result<Vec<f64>> {
    if args.trim().is_empty() {
        return Ok(Vec::new());
    }
    args.split(',')
        .map(|a| {
            a.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("`{}` is not a number in {ctx}", a.trim())))
        })
        .collect()
}

pub(crate) fn expect_arity(values: &[f64], n: usize, ctx: &str) -> Result<()> {
    if values.len() != n {
        return Err(Error::Config(format!(
            "{ctx} takes {n} argument(s), got {}",
            values.len()
        )));
    }
    Ok(())
}

/// Shortest round-trip formatting used in spec strings.
pub(crate) fn fmt_num(x: f64) -> String {
    format!("{x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_calls() {
        let (n, a) = split_call(" Gaussian(0, 1) ").unwrap();
        assert_eq!(n, "gaussian");
        assert_eq!(parse_numbers(&a, "x").unwrap(), vec![0.0, 1.0]);
        assert!(split_call("gaussian").is_err());
        assert!(split_call("gaussian(1").is_err());
        assert!(parse_numbers("1,a", "x").is_err());
    }
}
