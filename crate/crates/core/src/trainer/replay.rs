use std::collections::VecDeque;

use rand::Rng;

use super::Transition;

/// All agent transitions of one training episode.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Episode {
    pub id: u64,
    pub transitions: Vec<Transition>,
}

/// FIFO ring buffer of whole episodes.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    episodes: VecDeque<Episode>,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            capacity,
            episodes: VecDeque::with_capacity(capacity),
        }
    }

    pub fn push(&mut self, episode: Episode) {
        if self.episodes.len() == self.capacity {
            self.episodes.pop_front();
        }
        self.episodes.push_back(episode);
    }

    pub fn len(&self) -> usize {
        self.episodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.episodes.is_empty()
    }

    pub fn contains(&self, id: u64) -> bool {
        self.episodes.iter().any(|e| e.id == id)
    }

    pub fn ids(&self) -> Vec<u64> {
        self.episodes.iter().map(|e| e.id).collect()
    }

    /// Uniform sample with replacement.
    pub fn sample<'a>(&'a self, count: usize, rng: &mut impl Rng) -> Vec<&'a Episode> {
        if self.episodes.is_empty() {
            return Vec::new();
        }
        (0..count)
            .map(|_| &self.episodes[rng.random_range(0..self.episodes.len())])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn fifo_eviction() {
        let mut buf = ReplayBuffer::new(100);
        for id in 1..=101 {
            buf.push(Episode {
                id,
                transitions: Vec::new(),
            });
        }
        assert_eq!(buf.len(), 100);
        assert!(!buf.contains(1));
        assert!((2..=101).all(|id| buf.contains(id)));
        assert_eq!(buf.ids(), (2..=101).collect::<Vec<_>>());
    }

    #[test]
    fn sampling_is_seeded() {
        let mut buf = ReplayBuffer::new(10);
        for id in 0..10 {
            buf.push(Episode { id, transitions: Vec::new() });
        }
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            buf.sample(24, &mut rng).iter().map(|e| e.id).collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
        assert_eq!(draw(7).len(), 24);
        assert!(ReplayBuffer::new(3).sample(5, &mut ChaCha8Rng::seed_from_u64(0)).is_empty());
    }
}
