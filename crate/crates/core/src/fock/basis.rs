//! Truncated two-mode number basis.
//!
//! States are ordered with the charger index slow and the battery index fast.
//! The two-photon coupling only changes the battery number by two, so from a
//! vacuum start the odd battery levels are never populated; such models use an
//! even-only battery ladder, which halves the dimension without approximation.

/// Which battery levels are retained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatteryLevels {
    All,
    Even,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockBasis {
    cutoff_a: usize,
    cutoff_b: usize,
    levels: BatteryLevels,
    states: Vec<(usize, usize)>,
}

impl FockBasis {
    pub fn new(cutoff_a: usize, cutoff_b: usize, levels: BatteryLevels) -> Self {
        let step = match levels {
            BatteryLevels::All => 1,
            BatteryLevels::Even => 2,
        };
        let states = (0..cutoff_a)
            .flat_map(|na| (0..cutoff_b).step_by(step).map(move |nb| (na, nb)))
            .collect();
        Self {
            cutoff_a,
            cutoff_b,
            levels,
            states,
        }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn cutoff_a(&self) -> usize {
        self.cutoff_a
    }

    pub fn cutoff_b(&self) -> usize {
        self.cutoff_b
    }

    pub fn levels(&self) -> BatteryLevels {
        self.levels
    }

    /// Battery levels per charger level.
    pub fn battery_block(&self) -> usize {
        match self.levels {
            BatteryLevels::All => self.cutoff_b,
            BatteryLevels::Even => self.cutoff_b.div_ceil(2),
        }
    }

    /// Highest retained battery level.
    pub fn top_b(&self) -> usize {
        match self.levels {
            BatteryLevels::All => self.cutoff_b - 1,
            BatteryLevels::Even => (self.cutoff_b - 1) & !1,
        }
    }

    /// `(n_a, n_b)` of basis index `i`.
    pub fn state(&self, i: usize) -> (usize, usize) {
        self.states[i]
    }

    pub fn states(&self) -> &[(usize, usize)] {
        &self.states
    }

    pub fn index(&self, na: usize, nb: usize) -> Option<usize> {
        if na >= self.cutoff_a || nb >= self.cutoff_b {
            return None;
        }
        match self.levels {
            BatteryLevels::All => Some(na * self.cutoff_b + nb),
            BatteryLevels::Even if nb.is_multiple_of(2) => Some(na * self.battery_block() + nb / 2),
            BatteryLevels::Even => None,
        }
    }

    /// Image of basis state `i` under a product of ladder operators that
    /// shifts the charger by `da` and the battery by `db`, with its amplitude.
    /// `None` when the image leaves the truncated space or vanishes.
    pub fn shift(&self, i: usize, da: i32, db: i32) -> Option<(usize, f64)> {
        let (na, nb) = self.states[i];
        let amp = ladder_amplitude(na, da)? * ladder_amplitude(nb, db)?;
        let ma = (na as i64 + da as i64) as usize;
        let mb = (nb as i64 + db as i64) as usize;
        self.index(ma, mb).map(|j| (j, amp))
    }
}

/// Amplitude of `(a†)^k|n⟩` for `k > 0` or `a^{|k|}|n⟩` for `k < 0`.
fn ladder_amplitude(n: usize, k: i32) -> Option<f64> {
    if k < 0 && (n as i64) < -(k as i64) {
        return None;
    }
    let mut amp = 1.0;
    if k >= 0 {
        for m in n + 1..=n + k as usize {
            amp *= (m as f64).sqrt();
        }
    } else {
        for m in (n + 1 - (-k) as usize..=n).rev() {
            amp *= (m as f64).sqrt();
        }
    }
    Some(amp)
}
