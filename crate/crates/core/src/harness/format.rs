//! Line-oriented chain files:
//!
//! ```text
//! # comment
//! states: a b c
//! a -> b : 0.5
//! ipm: a 0.25 b 0.75
//! meta: free text
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chain::{Distribution, Kernel, StateSpace};
use crate::error::{Error, Result};
use crate::scalar::Prob;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ChainSpecFile {
    pub states: Vec<String>,
    pub transitions: Vec<(String, String, f64)>,
    pub ipm: Option<Vec<(String, f64)>>,
    pub meta: Vec<String>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_prob(line: usize, text: &str) -> Result<f64> {
    text.trim()
        .parse::<f64>()
        .map_err(|e| parse_err(line, format!("bad probability {text:?}: {e}")))
}

impl ChainSpecFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut file = ChainSpecFile::default();
        let mut seen_states = false;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix("states:") {
                if seen_states {
                    return Err(parse_err(line, "duplicate states header"));
                }
                seen_states = true;
                file.states = rest.split_whitespace().map(String::from).collect();
                if file.states.is_empty() {
                    return Err(parse_err(line, "empty states header"));
                }
            } else if let Some(rest) = content.strip_prefix("ipm:") {
                let tokens: Vec<&str> = rest.split_whitespace().collect();
                if tokens.is_empty() || !tokens.len().is_multiple_of(2) {
                    return Err(parse_err(line, "ipm expects label/mass pairs"));
                }
                let pairs = tokens
                    .chunks(2)
                    .map(|c| Ok((c[0].to_string(), parse_prob(line, c[1])?)))
                    .collect::<Result<Vec<_>>>()?;
                file.ipm.get_or_insert_with(Vec::new).extend(pairs);
            } else if let Some(rest) = content.strip_prefix("meta:") {
                file.meta.push(rest.trim().to_string());
            } else if let Some((edge, p)) = content.split_once(':') {
                let Some((from, to)) = edge.split_once("->") else {
                    return Err(parse_err(line, format!("expected `a -> b : p`, got {content:?}")));
                };
                let (from, to) = (from.trim(), to.trim());
                if from.is_empty() || to.is_empty() || from.contains(' ') || to.contains(' ') {
                    return Err(parse_err(line, format!("bad transition {content:?}")));
                }
                if !seen_states {
                    return Err(parse_err(line, "transition before states header"));
                }
                file.transitions
                    .push((from.to_string(), to.to_string(), parse_prob(line, p)?));
            } else {
                return Err(parse_err(line, format!("unrecognized line {content:?}")));
            }
        }
        if !seen_states {
            return Err(parse_err(0, "missing states header"));
        }
        Ok(file)
    }

    /// Builds and validates the kernel and, if present, the measure.
    pub fn to_kernel<T: Prob>(&self, tolerance: T) -> Result<(Kernel<T>, Option<Distribution<T>>)> {
        let space = StateSpace::new(self.states.iter().cloned())?;
        let entries = self
            .transitions
            .iter()
            .map(|(a, b, p)| Ok((space.id(a)?, space.id(b)?, T::lit(*p))))
            .collect::<Result<Vec<_>>>()?;
        let kernel = Kernel::from_entries(space, entries, tolerance)?;
        let mu = match &self.ipm {
            None => None,
            Some(pairs) => {
                let mut mass = vec![T::zero(); kernel.len()];
                for (label, m) in pairs {
                    mass[kernel.space().id(label)?] += T::lit(*m);
                }
                let mu = Distribution::new(mass, tolerance)?;
                kernel.check_invariant(&mu)?;
                Some(mu)
            }
        };
        Ok((kernel, mu))
    }

    pub fn from_kernel<T: Prob>(kernel: &Kernel<T>, mu: Option<&Distribution<T>>, meta: &[String]) -> Self {
        let labels = kernel.space().labels();
        ChainSpecFile {
            states: labels.to_vec(),
            transitions: kernel
                .entries()
                .map(|(x, y, p)| (labels[x].clone(), labels[y].clone(), p.as_f64()))
                .collect(),
            ipm: mu.map(|m| {
                (0..m.len())
                    .filter(|&i| m.mass(i) > T::zero())
                    .map(|i| (labels[i].clone(), m.mass(i).as_f64()))
                    .collect()
            }),
            meta: meta.to_vec(),
        }
    }
}

impl fmt::Display for ChainSpecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.meta {
            writeln!(f, "meta: {m}")?;
        }
        writeln!(f, "states: {}", self.states.join(" "))?;
        for (a, b, p) in &self.transitions {
            writeln!(f, "{a} -> {b} : {p:.16e}")?;
        }
        if let Some(ipm) = &self.ipm {
            write!(f, "ipm:")?;
            for (a, m) in ipm {
                write!(f, " {a} {m:.16e}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{fixture, FIXTURE_NAMES};

    #[test]
    fn parses_documented_syntax() {
        let text = "# two coins\nstates: a b\na -> a : 0.5\na -> b : 0.5\nb -> a : 1 # back\nipm: a 0.6666666666666666 b 0.3333333333333333\n";
        let f = ChainSpecFile::parse(text).unwrap();
        assert_eq!(f.states, ["a", "b"]);
        assert_eq!(f.transitions.len(), 3);
        let (k, mu) = f.to_kernel(1e-9f64).unwrap();
        assert_eq!(k.prob(1, 0), 1.0);
        assert!(mu.is_some());
    }

    #[test]
    fn reports_line_of_error() {
        let err = ChainSpecFile::parse("states: a b\na -> b : x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = ChainSpecFile::parse("a -> b : 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = ChainSpecFile::parse("states: a\nnonsense\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = ChainSpecFile::parse("").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 0, .. }));
        let f = ChainSpecFile::parse("states: a b\na -> b : 0.5\n").unwrap();
        assert!(f.to_kernel(1e-9f64).is_err());
    }

    #[test]
    fn fixture_round_trip_is_bit_exact() {
        for name in FIXTURE_NAMES {
            let f = fixture::<f64>(name, 40).unwrap();
            let file = ChainSpecFile::from_kernel(&f.kernel, Some(&f.mu), &[name.to_string()]);
            let back = ChainSpecFile::parse(&file.to_string()).unwrap();
            assert_eq!(back, file);
            let (k, mu) = back.to_kernel(f.kernel.tolerance()).unwrap();
            assert_eq!(k, f.kernel);
            assert_eq!(mu.unwrap(), f.mu);
        }
    }
}
