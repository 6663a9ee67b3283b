use crate::Result;

/// Strategy for scanning an indexed candidate space.
///
/// `find_first` must return the hit (or error) with the smallest index among
/// all candidates that produce one, exactly as a sequential left-to-right scan
/// would. Parallel implementations are free to probe candidates out of order
/// but must assemble the same answer.
pub trait Executor: Sync {
    fn find_first<T, F>(&self, count: usize, probe: F) -> Result<Option<(usize, T)>>
    where
        T: Send,
        F: Fn(usize) -> Result<Option<T>> + Sync;
}

/// Plain in-order scan on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn find_first<T, F>(&self, count: usize, probe: F) -> Result<Option<(usize, T)>>
    where
        T: Send,
        F: Fn(usize) -> Result<Option<T>> + Sync,
    {
        for index in 0..count {
            if let Some(hit) = probe(index)? {
                return Ok(Some((index, hit)));
            }
        }
        Ok(None)
    }
}
