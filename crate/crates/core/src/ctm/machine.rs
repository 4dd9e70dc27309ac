//! Exhaustive enumeration and simulation of small Turing machines (1D tape)
//! and turmites (2D plane).
//!
//! Machine ids are mixed-radix numbers with one digit per (state, read)
//! transition, least significant digit first; transition `i` belongs to
//! state `i / 2` reading symbol `i % 2`.
//!
//! 1D digits range over `4n + 2` values: `d < 4n` means write `d % 2`, move
//! `(d / 2) % 2` (0 = left, 1 = right) and continue in state `d / 4`; the two
//! remaining digits halt after writing `d - 4n` without moving.
//!
//! 2D digits range over `8(n + 1)` values: write `d % 2`, move `(d / 2) % 4`
//! (up, down, left, right) and go to state `d / 8`, where state `n` is halt.
//!
//! A cell counts as visited when the head executes a transition on it, so the
//! move attached to a 2D halting transition never extends the output.

use super::{MachineSpace, Pattern};

/// What happened to one enumerated machine on an all-zero tape.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    /// Halted within budget; `pattern` is the visited region's content.
    Halted { pattern: Pattern, steps: u32 },
    /// Halted, but the visited region exceeds the table's pattern coverage.
    Discarded { steps: u32 },
    /// Still running after `max_steps` transitions.
    NonHalting,
}

impl RunOutcome {
    pub fn pattern(&self) -> Option<Pattern> {
        match self {
            RunOutcome::Halted { pattern, .. } => Some(*pattern),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Transition {
    write: u8,
    /// 1D: 0 left, 1 right. 2D: 0 up, 1 down, 2 left, 3 right.
    movement: u8,
    /// `None` halts.
    next: Option<u8>,
}

/// Reusable simulator; one per worker thread.
pub(crate) struct Simulator {
    space: MachineSpace,
    radix: u64,
    table: Vec<Transition>,
    tape: Vec<u8>,
    /// Side length of the (square, for 2D) tape buffer.
    width: usize,
    dirty: Vec<usize>,
}

impl Simulator {
    pub(crate) fn new(space: MachineSpace) -> Self {
        let reach = space.max_steps as usize + 1;
        let width = 2 * reach + 1;
        let cells = if space.dims == 1 { width } else { width * width };
        Self {
            space,
            radix: space.radix(),
            table: Vec::with_capacity(2 * space.states as usize),
            tape: vec![0; cells],
            width,
            dirty: Vec::with_capacity(space.max_steps as usize + 1),
        }
    }

    fn decode(&mut self, id: u64) {
        let n = self.space.states as u64;
        self.table.clear();
        let mut rest = id;
        for _ in 0..2 * n {
            let d = rest % self.radix;
            rest /= self.radix;
            let t = if self.space.dims == 1 {
                if d < 4 * n {
                    Transition {
                        write: (d % 2) as u8,
                        movement: ((d / 2) % 2) as u8,
                        next: Some((d / 4) as u8),
                    }
                } else {
                    Transition {
                        write: (d - 4 * n) as u8,
                        movement: 0,
                        next: None,
                    }
                }
            } else {
                let next = d / 8;
                Transition {
                    write: (d % 2) as u8,
                    movement: ((d / 2) % 4) as u8,
                    next: (next < n).then_some(next as u8),
                }
            };
            self.table.push(t);
        }
    }

    fn clear(&mut self) {
        for &i in &self.dirty {
            self.tape[i] = 0;
        }
        self.dirty.clear();
    }

    #[inline]
    fn write(&mut self, idx: usize, symbol: u8) {
        if self.tape[idx] != symbol {
            if self.tape[idx] == 0 {
                self.dirty.push(idx);
            }
            self.tape[idx] = symbol;
        }
    }

    pub(crate) fn run(&mut self, id: u64) -> RunOutcome {
        self.decode(id);
        let outcome = if self.space.dims == 1 {
            self.run_1d()
        } else {
            self.run_2d()
        };
        self.clear();
        outcome
    }

    fn run_1d(&mut self) -> RunOutcome {
        let origin = self.width / 2;
        let (mut pos, mut lo, mut hi) = (origin, origin, origin);
        let mut state = 0u8;
        for step in 1..=self.space.max_steps {
            lo = lo.min(pos);
            hi = hi.max(pos);
            let read = self.tape[pos];
            let t = self.table[state as usize * 2 + read as usize];
            self.write(pos, t.write);
            match t.next {
                None => {
                    let span = hi - lo + 1;
                    if span > Pattern::MAX_LINE {
                        return RunOutcome::Discarded { steps: step };
                    }
                    let pattern = Pattern::line(&self.tape[lo..=hi])
                        .expect("span checked against coverage");
                    return RunOutcome::Halted {
                        pattern,
                        steps: step,
                    };
                }
                Some(next) => {
                    state = next;
                    if t.movement == 0 {
                        pos -= 1;
                    } else {
                        pos += 1;
                    }
                }
            }
        }
        RunOutcome::NonHalting
    }

    fn run_2d(&mut self) -> RunOutcome {
        let w = self.width;
        let origin = w / 2;
        let (mut row, mut col) = (origin, origin);
        let (mut top, mut bottom, mut left, mut right) = (origin, origin, origin, origin);
        let mut state = 0u8;
        for step in 1..=self.space.max_steps {
            top = top.min(row);
            bottom = bottom.max(row);
            left = left.min(col);
            right = right.max(col);
            let idx = row * w + col;
            let read = self.tape[idx];
            let t = self.table[state as usize * 2 + read as usize];
            self.write(idx, t.write);
            match t.next {
                None => {
                    let (h, wd) = (bottom - top + 1, right - left + 1);
                    if h > Pattern::BLOCK_SIDE || wd > Pattern::BLOCK_SIDE {
                        return RunOutcome::Discarded { steps: step };
                    }
                    let mut cells = [0u8; 16];
                    for r in 0..h {
                        for c in 0..wd {
                            cells[r * wd + c] = self.tape[(top + r) * w + left + c];
                        }
                    }
                    let pattern = Pattern::block_padded(h, wd, &cells[..h * wd])
                        .expect("bounding box checked against coverage");
                    return RunOutcome::Halted {
                        pattern,
                        steps: step,
                    };
                }
                Some(next) => {
                    state = next;
                    match t.movement {
                        0 => row -= 1,
                        1 => row += 1,
                        2 => col -= 1,
                        _ => col += 1,
                    }
                }
            }
        }
        RunOutcome::NonHalting
    }
}

/// Deterministic stream over every machine of a space, in id order.
pub struct Enumeration {
    sim: Simulator,
    next: u64,
    end: u64,
}

impl Enumeration {
    pub(crate) fn new(space: MachineSpace) -> Self {
        Self {
            sim: Simulator::new(space),
            next: 0,
            end: space.machine_count(),
        }
    }
}

impl Iterator for Enumeration {
    type Item = (u64, RunOutcome);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let id = self.next;
        self.next += 1;
        Some((id, self.sim.run(id)))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rest = (self.end - self.next) as usize;
        (rest, Some(rest))
    }
}

impl ExactSizeIterator for Enumeration {}

/// Runs a single machine by id.
pub fn run_machine(space: MachineSpace, id: u64) -> RunOutcome {
    Simulator::new(space).run(id)
}
