//! Jacobson–Matthews random walk on Latin squares.
//!
//! The square is held as its `n × n × n` incidence cube: `cube[r][c][s] = 1`
//! iff symbol `s` sits at `(r, c)`. A move perturbs a 2×2×2 sub-cube; this may
//! leave a single `-1` cell ("improper" square), in which case further moves
//! are forced from that cell until the cube is proper again.

use rand::Rng;

use super::{LatinSquare, Symbol};

pub(crate) const MAX_WALK_ORDER: usize = 256;

struct Cube {
    n: usize,
    cells: Vec<i8>,
}

impl Cube {
    fn from_square(square: &LatinSquare) -> Self {
        let n = square.order();
        let mut cells = vec![0i8; n * n * n];
        for r in 0..n {
            for c in 0..n {
                let s = usize::from(square.get(r, c));
                cells[(r * n + c) * n + s] = 1;
            }
        }
        Self { n, cells }
    }

    #[inline]
    fn idx(&self, r: usize, c: usize, s: usize) -> usize {
        (r * self.n + c) * self.n + s
    }

    #[inline]
    fn at(&self, r: usize, c: usize, s: usize) -> i8 {
        self.cells[self.idx(r, c, s)]
    }

    fn add(&mut self, r: usize, c: usize, s: usize, delta: i8) {
        let i = self.idx(r, c, s);
        self.cells[i] += delta;
    }

    /// Positions along a line holding `1`. A proper line has one, a line
    /// through the improper cell has two.
    fn ones(&self, line: impl Iterator<Item = (usize, i8)>) -> ([usize; 2], usize) {
        let mut found = [0usize; 2];
        let mut count = 0;
        for (pos, v) in line {
            if v == 1 {
                if count < 2 {
                    found[count] = pos;
                }
                count += 1;
            }
        }
        (found, count)
    }

    fn pick<R: Rng + ?Sized>(&self, found: ([usize; 2], usize), rng: &mut R) -> usize {
        match found.1 {
            1 => found.0[0],
            2 => found.0[rng.random_range(0..2)],
            k => unreachable!("incidence cube line with {k} ones"),
        }
    }

    /// One ±1 move anchored at `(r, c, s)`. Returns the cell that may have
    /// dropped to `-1`.
    fn perturb<R: Rng + ?Sized>(
        &mut self,
        (r, c, s): (usize, usize, usize),
        rng: &mut R,
    ) -> (usize, usize, usize) {
        let n = self.n;
        let r2 = self.pick(self.ones((0..n).map(|x| (x, self.at(x, c, s)))), rng);
        let c2 = self.pick(self.ones((0..n).map(|y| (y, self.at(r, y, s)))), rng);
        let s2 = self.pick(self.ones((0..n).map(|z| (z, self.at(r, c, z)))), rng);

        self.add(r, c, s, 1);
        self.add(r, c2, s2, 1);
        self.add(r2, c, s2, 1);
        self.add(r2, c2, s, 1);
        self.add(r, c, s2, -1);
        self.add(r, c2, s, -1);
        self.add(r2, c, s, -1);
        self.add(r2, c2, s2, -1);
        (r2, c2, s2)
    }

    fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let n = self.n;
        let mut anchor = loop {
            let cell = (
                rng.random_range(0..n),
                rng.random_range(0..n),
                rng.random_range(0..n),
            );
            if self.at(cell.0, cell.1, cell.2) == 0 {
                break cell;
            }
        };
        loop {
            let corner = self.perturb(anchor, rng);
            if self.at(corner.0, corner.1, corner.2) != -1 {
                break;
            }
            anchor = corner;
        }
    }

    fn to_square(&self) -> LatinSquare {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                let base = self.idx(r, c, 0);
                let s = self.cells[base..base + n]
                    .iter()
                    .position(|&v| v == 1)
                    .expect("proper cube has a symbol in every cell");
                entries.push(s as Symbol);
            }
        }
        LatinSquare::from_flat_unchecked(n, entries)
    }
}

/// Runs `steps` proper-to-proper Jacobson–Matthews moves from `start`.
pub(crate) fn jacobson_matthews<R: Rng + ?Sized>(
    start: &LatinSquare,
    steps: u64,
    rng: &mut R,
) -> LatinSquare {
    debug_assert!(start.order() <= MAX_WALK_ORDER);
    let mut cube = Cube::from_square(start);
    for _ in 0..steps {
        cube.step(rng);
    }
    cube.to_square()
}
