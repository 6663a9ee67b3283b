use alloc::format;
use alloc::vec::Vec;

use crate::dist::{index_mod, Distribution};
use crate::recurrence::as_eventually_periodic;
use crate::{Error, Result, RuleId};

/// A cyclic distribution cut from an eventually periodic one between the
/// suffix `θ[i-n, i-1]` of the left part and its first copy right of the
/// middle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wrap {
    /// `Cyclic`, with `at(x) = θ(x)` for every `x` in `[start, start + m - 1]`.
    pub dist: Distribution,
    pub m: usize,
    /// Left end of the copy.
    pub occurrence: i64,
    /// `i`, the first cell of the middle.
    pub start: i64,
    /// `j`, the last cell of the middle.
    pub end: i64,
}

impl Wrap {
    /// `θ` on `[start, start + m - 1]`, in line order.
    pub fn line_word(&self) -> Vec<RuleId> {
        (0..self.m as i64)
            .map(|k| self.dist.at(self.start + k).expect("cyclic"))
            .collect()
    }
}

/// Cut `ψ_n` out of `θ`, looking for the copy within `search_cells` cells
/// right of the middle.
pub fn wrap_distribution(theta: &Distribution, n: usize, search_cells: usize) -> Result<Wrap> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let ep = as_eventually_periodic(theta)
        .ok_or_else(|| Error::Precondition("expected an eventually periodic distribution".into()))?;
    let Distribution::EventuallyPeriodic {
        middle, middle_start, ..
    } = &ep
    else {
        unreachable!()
    };
    let i = *middle_start;
    let j = i + middle.len() as i64 - 1;
    let u = ep.window(i - n as i64, i - 1)?;
    let mut found = None;
    for x in j + 1..=j + search_cells as i64 {
        if ep.window(x, x + n as i64 - 1)? == u {
            found = Some(x);
            break;
        }
    }
    let Some(x) = found else {
        return Err(Error::NotFound(format!(
            "the length-{n} suffix left of the middle does not reoccur within {search_cells} cells right of it"
        )));
    };
    let m = (x + n as i64 - i) as usize;
    let mut word = alloc::vec![0; m];
    for y in i..i + m as i64 {
        word[index_mod(y, m)] = ep.at(y)?;
    }
    Ok(Wrap {
        dist: Distribution::cyclic(word),
        m,
        occurrence: x,
        start: i,
        end: j,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    const F: RuleId = 0;
    const G: RuleId = 1;

    #[test]
    fn wraps() {
        let t = Distribution::eventually_periodic(vec![G], vec![F, G, F], vec![G, F], 0);
        let w = wrap_distribution(&t, 1, 10).unwrap();
        assert_eq!((w.occurrence, w.m), (3, 4));
        assert_eq!(w.line_word(), vec![F, G, F, G]);
        for y in 0..4 {
            assert_eq!(w.dist.at(y).unwrap(), t.at(y).unwrap());
        }
        let single = Distribution::eventually_periodic(vec![G], vec![F], vec![G], 0);
        let w = wrap_distribution(&single, 3, 10).unwrap();
        assert_eq!(w.m, 4);
        assert_eq!(w.line_word(), vec![F, G, G, G]);
        // the copy overlaps the wrapped word's tail
        assert_eq!(&w.line_word()[w.m - 3..], &[G, G, G]);
    }

    #[test]
    fn missing_copy() {
        let t = Distribution::eventually_periodic(vec![F], vec![G], vec![G], 0);
        assert!(matches!(wrap_distribution(&t, 1, 50), Err(Error::NotFound(_))));
    }
}
