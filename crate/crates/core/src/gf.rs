//! Arithmetic over the finite field F_{2^m}, 1 <= m <= 8, via log/antilog tables.
//!
//! An element is an integer in `[0, q)` whose bit `i` is the coefficient of
//! `α^i` in its polynomial representation. This fixes the canonical
//! symbol-to-bit mapping everywhere else in the crate: bit 0 is the first bit
//! handed to the modulator.

use crate::error::{Error, Result};

/// A field element. Always `< q` for the table it is used with.
pub type Symbol = u8;

/// Conventional minimal-weight defining polynomials, indexed by m = 1..=8.
const DEFAULT_POLYS: [u32; 8] = [
    0b11,          // x + 1
    0b111,         // x^2 + x + 1
    0b1011,        // x^3 + x + 1
    0b10011,       // x^4 + x + 1
    0b100101,      // x^5 + x^2 + 1
    0b1000011,     // x^6 + x + 1
    0b10001001,    // x^7 + x^3 + 1
    0b100011101,   // x^8 + x^4 + x^3 + x^2 + 1
];

/// Precomputed arithmetic for F_{2^m}.
///
/// Immutable after construction; share it freely across workers.
#[derive(Debug, Clone)]
pub struct FieldTable {
    m: u32,
    q: usize,
    primitive_poly: u32,
    /// log[x] = e such that α^e = x, for x != 0. log[0] is a sentinel.
    log: Vec<u16>,
    /// antilog[e] = α^e for e in [0, 2(q-1)), doubled so products skip a mod.
    antilog: Vec<Symbol>,
}

impl FieldTable {
    /// Builds the tables by repeated multiplication by α, rejecting any
    /// polynomial whose α does not generate the full multiplicative group.
    pub fn new(m: u32, primitive_poly: u32) -> Result<Self> {
        if !(1..=8).contains(&m) {
            return Err(Error::Field(format!("extension degree m = {m} outside [1, 8]")));
        }
        let q = 1usize << m;
        if primitive_poly >> m != 1 {
            return Err(Error::Field(format!(
                "polynomial {primitive_poly:#b} does not have degree {m}"
            )));
        }

        let mut log = vec![0u16; q];
        let mut antilog = vec![0u8; 2 * (q - 1)];
        let mut seen = vec![false; q];
        let mut x: u32 = 1;
        for e in 0..q - 1 {
            if x == 0 || seen[x as usize] {
                return Err(Error::Field(format!(
                    "polynomial {primitive_poly:#b} is not primitive over F_2"
                )));
            }
            seen[x as usize] = true;
            antilog[e] = x as Symbol;
            antilog[e + (q - 1)] = x as Symbol;
            log[x as usize] = e as u16;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= primitive_poly;
            }
        }
        if x != 1 {
            return Err(Error::Field(format!(
                "polynomial {primitive_poly:#b} is not primitive over F_2"
            )));
        }

        Ok(FieldTable {
            m,
            q,
            primitive_poly,
            log,
            antilog,
        })
    }

    /// Builds the field with the conventional defining polynomial for m.
    pub fn with_default_poly(m: u32) -> Result<Self> {
        let poly = *DEFAULT_POLYS
            .get(m.wrapping_sub(1) as usize)
            .ok_or_else(|| Error::Field(format!("extension degree m = {m} outside [1, 8]")))?;
        Self::new(m, poly)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Field size q = 2^m.
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn primitive_poly(&self) -> u32 {
        self.primitive_poly
    }

    #[inline]
    pub fn add(&self, x: Symbol, y: Symbol) -> Symbol {
        x ^ y
    }

    #[inline]
    pub fn mul(&self, x: Symbol, y: Symbol) -> Symbol {
        if x == 0 || y == 0 {
            0
        } else {
            self.antilog[self.log[x as usize] as usize + self.log[y as usize] as usize]
        }
    }

    /// Multiplicative inverse. `inv(0)` is an error.
    pub fn inv(&self, x: Symbol) -> Result<Symbol> {
        if x == 0 {
            return Err(Error::Field("inverse of 0 requested".into()));
        }
        let e = self.log[x as usize] as usize;
        Ok(self.antilog[(self.q - 1 - e) % (self.q - 1)])
    }

    /// Additive inverse; the identity map in characteristic 2.
    #[inline]
    pub fn neg(&self, x: Symbol) -> Symbol {
        x
    }
}
