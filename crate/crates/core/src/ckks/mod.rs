//! Approximate homomorphic encryption over the RNS ring substrate.

mod context;
mod encoder;
mod evaluator;
mod keys;
pub mod keystore;
mod params;
pub mod serialize;
mod types;

pub use context::CkksContext;
pub use evaluator::{rotation_key_switches, rotation_steps, Evaluator, OpCounts, SCALE_TOLERANCE};
pub use keystore::{load_keys, save_keys, StoredKeys};
pub use keys::{
    galois_element, keygen, power_of_two_steps, GaloisKeys, KeyGenerator, KeySet, KeySwitchKey, PublicKey,
    RelinKey, SecretKey,
};
pub use params::{max_secure_modulus_bits, CkksParams, SecurityPreset};
pub use serialize::Serializable;
pub use types::{Ciphertext, Plaintext};
