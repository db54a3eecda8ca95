//! The two-colour update rule on one-dimensional lattices.
//!
//! Sites hold a [`Color`]; every step each site tosses a coin that succeeds
//! with the probability attached to its current colour. A site that tosses
//! a success keeps its colour. A site that fails compares, over its closed
//! neighbourhood, the within-colour success proportions and switches only
//! if the other colour's proportion is strictly larger (an absent colour
//! has proportion zero, and ties retain).
//!
//! Two lattices are supported: a periodic [`Topology::Ring`] and a finite
//! [`Topology::Line`] segment whose out-of-range virtual neighbours keep a
//! fixed colour forever but still toss their own coins.
//!
//! [`local_rule`] is the rule as stated, evaluated per site; [`Configuration::step`]
//! applies it synchronously everywhere using word-parallel kernels. For
//! neighbourhoods of at most two sites the proportion comparison reduces to
//! "switch iff the own coin failed and some opposite-coloured neighbour
//! succeeded"; the kernels exploit that and are checked exhaustively
//! against [`local_rule`] in the test suite.

use crate::rng::bernoulli_mask;
use crate::{Error, Result};
use rand_chacha::rand_core::RngCore;
use serde::{Deserialize, Serialize};

/// Colour of one site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color {
    R,
    B,
}

impl Color {
    pub fn flip(self) -> Self {
        match self {
            Color::R => Color::B,
            Color::B => Color::R,
        }
    }

    /// Bit encoding used throughout: red = 1, blue = 0.
    pub fn bit(self) -> u64 {
        match self {
            Color::R => 1,
            Color::B => 0,
        }
    }

    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Color::R
        } else {
            Color::B
        }
    }
}

impl std::fmt::Display for Color {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Color::R => "R",
            Color::B => "B",
        })
    }
}

/// Which sites a site observes besides itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NeighborhoodMode {
    /// Closed neighbourhood `{i-1, i, i+1}`.
    TwoSided,
    /// Closed neighbourhood `{i, i+1}`.
    OneDirectional,
}

/// Lattice shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Topology {
    Ring,
    /// Finite segment; virtual sites beyond each end are permanently of the
    /// given colour and toss their own coins.
    Line { left: Color, right: Color },
}

impl Topology {
    /// Segment embedded in an all-blue environment.
    pub fn fixed_blue_line() -> Self {
        Topology::Line {
            left: Color::B,
            right: Color::B,
        }
    }

    /// Segment with blue to the left and red to the right, matching the
    /// step initial profile.
    pub fn step_profile_line() -> Self {
        Topology::Line {
            left: Color::B,
            right: Color::R,
        }
    }
}

/// Coin success probabilities per colour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub mode: NeighborhoodMode,
    pub p_red: f64,
    pub p_blue: f64,
}

impl ModelParams {
    pub fn new(mode: NeighborhoodMode, p_red: f64, p_blue: f64) -> Result<Self> {
        for (name, v) in [("p_red", p_red), ("p_blue", p_blue)] {
            if !(0.0..=1.0).contains(&v) || v.is_nan() {
                return Err(Error::ParamOutOfRange {
                    name,
                    value: v,
                    range: "[0, 1]",
                });
            }
        }
        Ok(Self { mode, p_red, p_blue })
    }

    /// Colour-blind coins: `p_red = p_blue = alpha`.
    pub fn critical(mode: NeighborhoodMode, alpha: f64) -> Result<Self> {
        Self::new(mode, alpha, alpha)
    }

    pub fn is_critical(&self) -> bool {
        self.p_red == self.p_blue
    }

    pub fn success_prob(&self, color: Color) -> f64 {
        match color {
            Color::R => self.p_red,
            Color::B => self.p_blue,
        }
    }
}

/// The update rule at a single site, exactly as stated.
///
/// `neighbours` lists `(colour, coin)` for the neighbourhood without the
/// site itself: one entry in one-directional mode, two in two-sided mode
/// (boundary sites of a line still see two, one of them virtual).
/// Proportions are within-colour (successes of a colour divided by the
/// number of sites of that colour in the closed neighbourhood); an absent
/// colour counts as proportion zero, and the site retains its colour on a
/// tie.
pub fn local_rule(own: Color, own_coin: bool, neighbours: &[(Color, bool)]) -> Color {
    if own_coin {
        return own;
    }
    let mut own_count = 1u32;
    let mut own_succ = 0u32;
    let mut other_count = 0u32;
    let mut other_succ = 0u32;
    for &(color, coin) in neighbours {
        if color == own {
            own_count += 1;
            own_succ += u32::from(coin);
        } else {
            other_count += 1;
            other_succ += u32::from(coin);
        }
    }
    if other_count == 0 {
        return own;
    }
    // other_succ/other_count > own_succ/own_count, compared exactly.
    if other_succ * own_count > own_succ * other_count {
        own.flip()
    } else {
        own
    }
}

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

fn lane_mask(n_in_word: usize) -> u64 {
    if n_in_word >= 64 {
        !0
    } else {
        (1u64 << n_in_word) - 1
    }
}

fn get_bit(words: &[u64], i: usize) -> u64 {
    (words[i / 64] >> (i % 64)) & 1
}

/// One coin outcome per site, plus the two virtual boundary coins on a line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoinDraw {
    site_words: Vec<u64>,
    n: usize,
    /// Coin of the virtual site left of position 0 (lines only).
    pub left_virtual: Option<bool>,
    /// Coin of the virtual site right of position n-1 (lines only).
    pub right_virtual: Option<bool>,
}

impl CoinDraw {
    pub fn site_count(&self) -> usize {
        self.n
    }

    pub fn site(&self, i: usize) -> bool {
        assert!(i < self.n);
        get_bit(&self.site_words, i) == 1
    }

    /// Builds a draw from packed bits; on a line, bit 0 is the left virtual
    /// coin, bits 1..=n the real sites and bit n+1 the right virtual coin.
    pub fn from_bits(bits: u64, n: usize, topology: Topology) -> Self {
        assert!(n <= 62, "packed draws fit 62 real sites");
        match topology {
            Topology::Ring => Self {
                site_words: vec![bits & lane_mask(n)],
                n,
                left_virtual: None,
                right_virtual: None,
            },
            Topology::Line { .. } => Self {
                site_words: vec![(bits >> 1) & lane_mask(n)],
                n,
                left_virtual: Some(bits & 1 == 1),
                right_virtual: Some((bits >> (n + 1)) & 1 == 1),
            },
        }
    }

    /// Independent coins for every (real and virtual) site, succeeding with
    /// the probability of the site's current colour.
    ///
    /// Draw order is fixed: left virtual coin (lines), then site words from
    /// low to high (one Bernoulli mask per word when the parameters are
    /// critical, else a red mask followed by a blue mask), then the right
    /// virtual coin. Word masks use the exact bit-sliced Bernoulli sampler,
    /// so the whole draw costs a handful of RNG words per step.
    pub fn sample<R: RngCore>(config: &Configuration, params: &ModelParams, rng: &mut R) -> Self {
        let mut draw = Self::empty_like(config);
        draw.resample(config, params, rng);
        draw
    }

    fn empty_like(config: &Configuration) -> Self {
        let virt = matches!(config.topology, Topology::Line { .. });
        Self {
            site_words: vec![0; config.words.len()],
            n: config.n,
            left_virtual: virt.then_some(false),
            right_virtual: virt.then_some(false),
        }
    }

    /// In-place [`CoinDraw::sample`] for hot loops.
    pub fn resample<R: RngCore>(
        &mut self,
        config: &Configuration,
        params: &ModelParams,
        rng: &mut R,
    ) {
        debug_assert_eq!(self.n, config.n);
        if let Topology::Line { left, .. } = config.topology {
            self.left_virtual =
                Some(bernoulli_mask(rng, params.success_prob(left), 1) == 1);
        }
        let critical = params.is_critical();
        for (k, word) in self.site_words.iter_mut().enumerate() {
            let lanes = lanes_in_word(config.n, k);
            *word = if critical {
                bernoulli_mask(rng, params.p_red, lanes)
            } else {
                let red = bernoulli_mask(rng, params.p_red, lanes);
                let blue = bernoulli_mask(rng, params.p_blue, lanes);
                (config.words[k] & red) | (!config.words[k] & blue & lane_mask(lanes as usize))
            };
        }
        if let Topology::Line { right, .. } = config.topology {
            self.right_virtual =
                Some(bernoulli_mask(rng, params.success_prob(right), 1) == 1);
        }
    }
}

fn lanes_in_word(n: usize, word: usize) -> u32 {
    let remaining = n - word * 64;
    remaining.min(64) as u32
}

/// Colour assignment on a finite site set, bit-packed (red = 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    words: Vec<u64>,
    n: usize,
    topology: Topology,
}

impl Configuration {
    pub fn from_colors(colors: &[Color], topology: Topology) -> Self {
        assert!(!colors.is_empty());
        let mut words = vec![0u64; words_for(colors.len())];
        for (i, c) in colors.iter().enumerate() {
            words[i / 64] |= c.bit() << (i % 64);
        }
        Self {
            words,
            n: colors.len(),
            topology,
        }
    }

    pub fn uniform(color: Color, n: usize, topology: Topology) -> Self {
        assert!(n >= 1);
        let mut words = vec![0u64; words_for(n)];
        if color == Color::R {
            for (k, w) in words.iter_mut().enumerate() {
                *w = lane_mask(lanes_in_word(n, k) as usize);
            }
        }
        Self { words, n, topology }
    }

    /// Unpacks a state index (bit i = site i, red = 1); used by the exact
    /// engine for ring sizes that fit one word.
    pub fn from_bits(bits: u64, n: usize, topology: Topology) -> Self {
        assert!(n <= 62);
        debug_assert_eq!(bits & !lane_mask(n), 0);
        Self {
            words: vec![bits & lane_mask(n)],
            n,
            topology,
        }
    }

    /// IID(p) colours, one Bernoulli mask per word.
    pub fn random_iid<R: RngCore>(n: usize, p_red: f64, topology: Topology, rng: &mut R) -> Self {
        let mut words = vec![0u64; words_for(n)];
        for (k, w) in words.iter_mut().enumerate() {
            *w = bernoulli_mask(rng, p_red, lanes_in_word(n, k));
        }
        Self { words, n, topology }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn color(&self, i: usize) -> Color {
        assert!(i < self.n);
        Color::from_bit(get_bit(&self.words, i) == 1)
    }

    pub fn bits(&self) -> u64 {
        assert!(self.n <= 64);
        self.words[0]
    }

    pub fn count_red(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn monochrome(&self) -> Option<Color> {
        match self.count_red() {
            0 => Some(Color::B),
            k if k == self.n => Some(Color::R),
            _ => None,
        }
    }

    pub fn leftmost_red(&self) -> Option<usize> {
        for (k, w) in self.words.iter().enumerate() {
            if *w != 0 {
                return Some(k * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn rightmost_red(&self) -> Option<usize> {
        for (k, w) in self.words.iter().enumerate().rev() {
            if *w != 0 {
                return Some(k * 64 + 63 - w.leading_zeros() as usize);
            }
        }
        None
    }

    /// True when the red sites form one contiguous run (or are absent).
    pub fn red_is_contiguous(&self) -> bool {
        match (self.leftmost_red(), self.rightmost_red()) {
            (Some(a), Some(b)) => self.count_red() == b - a + 1,
            _ => true,
        }
    }

    pub fn rotated(&self, shift: usize) -> Self {
        assert!(matches!(self.topology, Topology::Ring));
        let mut colors = Vec::with_capacity(self.n);
        for i in 0..self.n {
            colors.push(self.color((i + self.n - shift % self.n) % self.n));
        }
        Self::from_colors(&colors, self.topology)
    }

    pub fn flipped_colors(&self) -> Self {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        let last = words.len() - 1;
        words[last] &= lane_mask(lanes_in_word(self.n, last) as usize);
        let topology = match self.topology {
            Topology::Ring => Topology::Ring,
            Topology::Line { left, right } => Topology::Line {
                left: left.flip(),
                right: right.flip(),
            },
        };
        Self {
            words,
            n: self.n,
            topology,
        }
    }

    /// One synchronous application of the rule at every site; the input is
    /// unchanged. Errors if the coin draw does not match the lattice.
    pub fn step(&self, params: &ModelParams, coins: &CoinDraw) -> Result<Self> {
        let mut out = self.clone();
        self.step_into(params, coins, &mut out)?;
        Ok(out)
    }

    /// In-place [`Configuration::step`]; `out` must have the same size.
    pub fn step_into(
        &self,
        params: &ModelParams,
        coins: &CoinDraw,
        out: &mut Self,
    ) -> Result<()> {
        let virt_needed = matches!(self.topology, Topology::Line { .. });
        if coins.n != self.n
            || coins.site_words.len() != self.words.len()
            || (virt_needed && (coins.left_virtual.is_none() || coins.right_virtual.is_none()))
        {
            return Err(Error::CoinCountMismatch {
                expected: self.n + if virt_needed { 2 } else { 0 },
                got: coins.n
                    + usize::from(coins.left_virtual.is_some())
                    + usize::from(coins.right_virtual.is_some()),
            });
        }
        debug_assert_eq!(out.n, self.n);
        out.topology = self.topology;

        let nw = self.words.len();
        let top_lane = (self.n - 1) % 64;
        // Colour and coin of the left neighbour of site 0 / right neighbour
        // of site n-1, from the wrap or the virtual boundary.
        let (first_left_col, first_left_coin, last_right_col, last_right_coin) =
            match self.topology {
                Topology::Ring => (
                    get_bit(&self.words, self.n - 1),
                    get_bit(&coins.site_words, self.n - 1),
                    get_bit(&self.words, 0),
                    get_bit(&coins.site_words, 0),
                ),
                Topology::Line { left, right } => (
                    left.bit(),
                    u64::from(coins.left_virtual.unwrap()),
                    right.bit(),
                    u64::from(coins.right_virtual.unwrap()),
                ),
            };

        for k in 0..nw {
            let s = self.words[k];
            let c = coins.site_words[k];
            let (lc, lk) = if k == 0 {
                (first_left_col, first_left_coin)
            } else {
                (self.words[k - 1] >> 63, coins.site_words[k - 1] >> 63)
            };
            let l = (s << 1) | lc;
            let cl = (c << 1) | lk;
            let (mut r, mut cr) = (s >> 1, c >> 1);
            if k + 1 < nw {
                r |= self.words[k + 1] << 63;
                cr |= coins.site_words[k + 1] << 63;
            } else {
                r |= last_right_col << top_lane;
                cr |= last_right_coin << top_lane;
            }
            // A failed site switches iff some opposite-coloured neighbour
            // succeeded; equivalent to the proportion rule for these
            // neighbourhoods (checked exhaustively in tests).
            let trigger = match params.mode {
                NeighborhoodMode::TwoSided => ((s ^ l) & cl) | ((s ^ r) & cr),
                NeighborhoodMode::OneDirectional => (s ^ r) & cr,
            };
            out.words[k] = s ^ (!c & trigger);
        }
        let last = nw - 1;
        out.words[last] &= lane_mask(lanes_in_word(self.n, last) as usize);
        Ok(())
    }

    /// Draws coins then steps.
    pub fn sample_step<R: RngCore>(&self, params: &ModelParams, rng: &mut R) -> Self {
        let coins = CoinDraw::sample(self, params, rng);
        self.step(params, &coins).expect("sampled draw always fits")
    }
}

impl std::fmt::Display for Configuration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.n {
            write!(f, "{}", self.color(i))?;
        }
        Ok(())
    }
}

/// Slow per-site stepper built directly on [`local_rule`]; the oracle the
/// word kernels are tested against.
pub fn step_reference(
    config: &Configuration,
    params: &ModelParams,
    coins: &CoinDraw,
) -> Configuration {
    let n = config.len();
    let at = |i: i64| -> (Color, bool) {
        match config.topology {
            Topology::Ring => {
                let j = i.rem_euclid(n as i64) as usize;
                (config.color(j), coins.site(j))
            }
            Topology::Line { left, right } => {
                if i < 0 {
                    (left, coins.left_virtual.unwrap())
                } else if i >= n as i64 {
                    (right, coins.right_virtual.unwrap())
                } else {
                    (config.color(i as usize), coins.site(i as usize))
                }
            }
        }
    };
    let mut colors = Vec::with_capacity(n);
    for i in 0..n as i64 {
        let (own, own_coin) = at(i);
        let neighbours = match params.mode {
            NeighborhoodMode::TwoSided => vec![at(i - 1), at(i + 1)],
            NeighborhoodMode::OneDirectional => vec![at(i + 1)],
        };
        colors.push(local_rule(own, own_coin, &neighbours));
    }
    Configuration::from_colors(&colors, config.topology)
}

/// Word kernel for rings of at most 62 sites: bit `i` of `state`/`coins`
/// belongs to site `i`, red = 1. Same dynamics as [`Configuration::step`].
pub fn step_ring_word(state: u64, coins: u64, n: usize, mode: NeighborhoodMode) -> u64 {
    debug_assert!((3..=62).contains(&n));
    let mask = lane_mask(n);
    debug_assert_eq!(state & !mask, 0);
    let rot_r = |x: u64| ((x << 1) | (x >> (n - 1))) & mask; // bit i <- site i-1
    let rot_l = |x: u64| ((x >> 1) | (x << (n - 1))) & mask; // bit i <- site i+1
    let (l, cl) = (rot_r(state), rot_r(coins & mask));
    let (r, cr) = (rot_l(state), rot_l(coins & mask));
    let trigger = match mode {
        NeighborhoodMode::TwoSided => ((state ^ l) & cl) | ((state ^ r) & cr),
        NeighborhoodMode::OneDirectional => (state ^ r) & cr,
    };
    (state ^ (!coins & trigger)) & mask
}

/// Word kernel for line segments of at most 62 sites. `state` packs the
/// real sites (bit i = site i); `coins` packs n+2 coins with bit 0 the
/// left virtual coin, bits 1..=n the real sites and bit n+1 the right
/// virtual coin.
pub fn step_line_word(
    state: u64,
    coins: u64,
    n: usize,
    left: Color,
    right: Color,
    mode: NeighborhoodMode,
) -> u64 {
    debug_assert!((1..=62).contains(&n));
    let mask = lane_mask(n);
    debug_assert_eq!(state & !mask, 0);
    let padded = (state << 1) | left.bit() | (right.bit() << (n + 1));
    let (l, s, r) = (padded & mask, (padded >> 1) & mask, (padded >> 2) & mask);
    let (cl, cs, cr) = (coins & mask, (coins >> 1) & mask, (coins >> 2) & mask);
    let trigger = match mode {
        NeighborhoodMode::TwoSided => ((s ^ l) & cl) | ((s ^ r) & cr),
        NeighborhoodMode::OneDirectional => (s ^ r) & cr,
    };
    (s ^ (!cs & trigger)) & mask
}
