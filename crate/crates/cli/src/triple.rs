//! Parsing of `--triple "v;u;t"`.

/// Three coordinate vectors separated by `;`, entries separated by commas
/// or whitespace; surrounding parentheses are ignored. Entries must lie in
/// `0..p`, and every vector must have length `dim` when given.
pub fn parse_triple(text: &str, p: Option<u64>, dim: Option<usize>) -> Result<[Vec<u64>; 3], String> {
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() != 3 {
        return Err(format!("expected three vectors separated by ';', got {}", parts.len()));
    }
    let mut out: [Vec<u64>; 3] = Default::default();
    for (slot, part) in out.iter_mut().zip(&parts) {
        let cleaned = part.trim().trim_start_matches('(').trim_end_matches(')');
        let entries: Vec<u64> = cleaned
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<u64>().map_err(|_| format!("bad entry {s:?}")))
            .collect::<Result<_, _>>()?;
        if entries.is_empty() {
            return Err("empty vector".into());
        }
        if let Some(p) = p {
            if let Some(bad) = entries.iter().find(|&&e| e >= p) {
                return Err(format!("entry {bad} is not below p = {p}"));
            }
        }
        if let Some(d) = dim {
            if entries.len() != d {
                return Err(format!("vector of length {}, expected {d}", entries.len()));
            }
        }
        *slot = entries;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_both_spellings() {
        let want = [vec![1, 0, 0, 0, 0], vec![0, 0, 0, 1, 0], vec![1, 1, 0, 0, 1]];
        assert_eq!(parse_triple("1,0,0,0,0;0,0,0,1,0;1,1,0,0,1", Some(2), Some(5)).unwrap(), want);
        assert_eq!(
            parse_triple("(1, 0, 0, 0, 0); (0, 0, 0, 1, 0); (1, 1, 0, 0, 1)", Some(2), None).unwrap(),
            want
        );
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_triple("1,0;0,1", None, None).is_err());
        assert!(parse_triple("1,x;0,1;1,1", None, None).is_err());
        assert!(parse_triple("1,2;0,1;1,1", Some(2), None).is_err());
        assert!(parse_triple("1,0;0,1;1,1", Some(2), Some(3)).is_err());
        assert!(parse_triple("1,0;;1,1", None, None).is_err());
    }
}
