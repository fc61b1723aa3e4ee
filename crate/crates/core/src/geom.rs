use std::fmt;

use serde::{Deserialize, Serialize};

/// A patch position on the board. Row 0 is the top edge.
#[derive(
    Clone, Copy, Debug, Default, Eq, Hash, Ord, PartialEq, PartialOrd, Serialize, Deserialize,
)]
#[serde(from = "[u32; 2]", into = "[u32; 2]")]
pub struct Coord {
    pub row: u32,
    pub col: u32,
}

impl Coord {
    pub const fn new(row: u32, col: u32) -> Self {
        Self { row, col }
    }

    pub fn manhattan(self, other: Coord) -> u32 {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col)
    }

    pub fn is_adjacent(self, other: Coord) -> bool {
        self.manhattan(other) == 1
    }

    /// Grid neighbours in the order up, down, left, right.
    pub fn neighbours(self, width: u32, height: u32) -> impl Iterator<Item = Coord> {
        let Coord { row, col } = self;
        let up = (row > 0).then(|| Coord::new(row - 1, col));
        let down = (row + 1 < height).then(|| Coord::new(row + 1, col));
        let left = (col > 0).then(|| Coord::new(row, col - 1));
        let right = (col + 1 < width).then(|| Coord::new(row, col + 1));
        [up, down, left, right].into_iter().flatten()
    }

    pub fn side_neighbour(self, side: Side, width: u32, height: u32) -> Option<Coord> {
        let Coord { row, col } = self;
        match side {
            Side::Top => (row > 0).then(|| Coord::new(row - 1, col)),
            Side::Bottom => (row + 1 < height).then(|| Coord::new(row + 1, col)),
            Side::Left => (col > 0).then(|| Coord::new(row, col - 1)),
            Side::Right => (col + 1 < width).then(|| Coord::new(row, col + 1)),
        }
    }
}

impl From<[u32; 2]> for Coord {
    fn from([row, col]: [u32; 2]) -> Self {
        Coord { row, col }
    }
}

impl From<Coord> for [u32; 2] {
    fn from(c: Coord) -> Self {
        [c.row, c.col]
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

#[derive(Clone, Copy, Debug, Eq, Hash, PartialEq, Ord, PartialOrd)]
pub enum Side {
    Top,
    Bottom,
    Left,
    Right,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Top, Side::Bottom, Side::Left, Side::Right];

    pub fn is_vertical(self) -> bool {
        matches!(self, Side::Top | Side::Bottom)
    }
}

/// Axis-aligned rectangle in patch units.
#[derive(Clone, Copy, Debug, Eq, Hash, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub row: u32,
    pub col: u32,
    pub width: u32,
    pub height: u32,
}

impl Rect {
    pub const fn new(row: u32, col: u32, width: u32, height: u32) -> Self {
        Self {
            row,
            col,
            width,
            height,
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = Coord> + '_ {
        (self.row..self.row + self.height)
            .flat_map(move |r| (self.col..self.col + self.width).map(move |c| Coord::new(r, c)))
    }

    pub fn contains(&self, c: Coord) -> bool {
        c.row >= self.row
            && c.row < self.row + self.height
            && c.col >= self.col
            && c.col < self.col + self.width
    }

    pub fn area(&self) -> u32 {
        self.width * self.height
    }

    pub fn bottom_row(&self) -> u32 {
        self.row + self.height - 1
    }

    pub fn fits_in(&self, width: u32, height: u32) -> bool {
        self.width > 0
            && self.height > 0
            && self.col.checked_add(self.width).is_some_and(|e| e <= width)
            && self
                .row
                .checked_add(self.height)
                .is_some_and(|e| e <= height)
    }
}
