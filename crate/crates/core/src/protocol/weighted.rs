/// A client's weight in the weighted mean: its dataset size if it trained
/// this round, zero otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightedShare {
    pub samples: u64,
    pub trained: bool,
}

impl WeightedShare {
    pub fn new(samples: u64, trained: bool) -> Self {
        Self { samples, trained }
    }

    pub fn delta(&self) -> u64 {
        if self.trained {
            self.samples
        } else {
            0
        }
    }
}
