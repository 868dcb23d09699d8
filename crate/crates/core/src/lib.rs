//! Guessing-based maximum-likelihood decoding of binary linear block codes.
//!
//! Two decoders share one soft-weight ordering of test error patterns:
//! guessing noise decoding ([`decoders::decode_gnd`]) walks full-length noise
//! patterns until one explains the syndrome, while guessing codeword decoding
//! ([`decoders::decode_gcd`]) walks only the information-set part and
//! re-encodes each guess into a codeword. Both return a most likely codeword;
//! the codeword guesser never needs more guesses than the noise guesser.

pub mod channel;
pub mod codes;
pub mod decoders;
pub mod gf2;
pub mod sim;
pub mod tep;
