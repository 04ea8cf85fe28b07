//! Ordered parallel map with a caller-chosen worker count.
//!
//! Results always come back in input order, so any reduction done by the
//! caller afterwards is independent of the number of threads.

#[derive(Debug)]
pub struct Workers {
    threads: usize,
    #[cfg(feature = "parallel")]
    pool: Option<rayon::ThreadPool>,
}

impl Workers {
    pub fn new(threads: usize) -> Self {
        let threads = threads.max(1);
        #[cfg(feature = "parallel")]
        {
            let pool = if threads > 1 {
                match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                    Ok(pool) => Some(pool),
                    Err(err) => {
                        log::warn!("thread pool unavailable ({err}); running sequentially");
                        None
                    }
                }
            } else {
                None
            };
            Workers { threads, pool }
        }
        #[cfg(not(feature = "parallel"))]
        Workers { threads }
    }

    pub fn sequential() -> Self {
        Workers::new(1)
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn map_ordered<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if let Some(pool) = &self.pool {
            if items.len() > 1 {
                use rayon::prelude::*;
                return pool.install(|| items.par_iter().map(&f).collect());
            }
        }
        items.iter().map(f).collect()
    }
}

impl Default for Workers {
    fn default() -> Self {
        Workers::sequential()
    }
}

#[cfg(test)]
mod tests {
    use super::Workers;

    #[test]
    fn order_is_preserved() {
        let xs: Vec<u32> = (0..100).collect();
        let one = Workers::new(1).map_ordered(&xs, |x| x * 2);
        let many = Workers::new(4).map_ordered(&xs, |x| x * 2);
        assert_eq!(one, many);
        assert_eq!(many[99], 198);
    }
}
