//! Parameter and number parsing for the command line.

use num_complex::Complex64;

use hyperconnect::Parameters;

use crate::Failure;

/// Parses `"re"`, `"re+imi"`, `"re-imi"` or `"imi"`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex number".into());
    }
    let bad = || format!("cannot parse complex number {s:?} (expected re or re+imi)");
    let finite = |v: f64| if v.is_finite() { Ok(v) } else { Err(format!("non-finite value in {s:?}")) };
    if let Some(body) = t.strip_suffix('i') {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                split = Some(k);
                break;
            }
        }
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            x => x.parse::<f64>().map_err(|_| bad())?,
        };
        let re = re.parse::<f64>().map_err(|_| bad())?;
        return Ok(Complex64::new(finite(re)?, finite(im)?));
    }
    let re = t.parse::<f64>().map_err(|_| bad())?;
    Ok(Complex64::new(finite(re)?, 0.0))
}

/// Comma-separated list of complex numbers.
pub fn parse_list(s: &str) -> Result<Vec<Complex64>, String> {
    s.split(',').map(parse_complex).collect()
}

/// Parameters from `--params FILE` or from `--n/--alpha/--beta`.
pub fn resolve_params(
    file: Option<&std::path::Path>,
    n: Option<usize>,
    alpha: Option<&str>,
    beta: Option<&str>,
) -> Result<Option<Parameters>, Failure> {
    if let Some(path) = file {
        if alpha.is_some() || beta.is_some() {
            return Err(Failure::config("--params cannot be combined with --alpha/--beta"));
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
        let p = Parameters::from_json(&text)?;
        if let Some(n) = n {
            if n != p.n() {
                return Err(Failure::config(format!("--n {n} disagrees with n = {} in {}", p.n(), path.display())));
            }
        }
        return Ok(Some(p));
    }
    match (alpha, beta) {
        (None, None) => Ok(None),
        (Some(a), Some(b)) => {
            let alpha = parse_list(a).map_err(|m| Failure::config(format!("alpha: {m}")))?;
            let beta = parse_list(b).map_err(|m| Failure::config(format!("beta: {m}")))?;
            if let Some(n) = n {
                if alpha.len() != n + 1 {
                    return Err(Failure::config(format!("alpha: expected {} values, got {}", n + 1, alpha.len())));
                }
                if beta.len() != n {
                    return Err(Failure::config(format!("beta: expected {n} values, got {}", beta.len())));
                }
            }
            Ok(Some(Parameters::new(alpha, beta)?))
        }
        _ => Err(Failure::config("--alpha and --beta must be given together")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex("0.5+0.25i").unwrap(), Complex64::new(0.5, 0.25));
        assert_eq!(parse_complex("-1e-3-2i").unwrap(), Complex64::new(-1e-3, -2.0));
        assert_eq!(parse_complex("1.5e+2+1e-1i").unwrap(), Complex64::new(150.0, 0.1));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("inf").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list("0.3,0.7+0.1i").unwrap().len(), 2);
    }
}
