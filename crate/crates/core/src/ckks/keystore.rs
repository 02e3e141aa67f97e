//! Key material on disk: one file per key plus the parameters as JSON.

use std::path::Path;
use std::sync::Arc;

use super::context::CkksContext;
use super::keys::{GaloisKeys, KeySet, PublicKey, RelinKey, SecretKey};
use super::params::CkksParams;
use super::serialize::Serializable;
use crate::error::Result;

pub const PARAMS_FILE: &str = "params.json";
pub const SECRET_FILE: &str = "secret.key";
pub const PUBLIC_FILE: &str = "public.key";
pub const RELIN_FILE: &str = "relin.key";
pub const GALOIS_FILE: &str = "galois.key";

/// Keys read back from a directory. The secret key is optional so that an
/// evaluation-only directory can be used.
pub struct StoredKeys {
    pub ctx: Arc<CkksContext>,
    pub secret: Option<SecretKey>,
    pub public: PublicKey,
    pub relin: RelinKey,
    pub galois: GaloisKeys,
}

pub fn save_keys(dir: impl AsRef<Path>, params: &CkksParams, keys: &KeySet) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(PARAMS_FILE), params.to_json()?)?;
    keys.secret.save(dir.join(SECRET_FILE))?;
    keys.public.save(dir.join(PUBLIC_FILE))?;
    keys.relin.save(dir.join(RELIN_FILE))?;
    keys.galois.save(dir.join(GALOIS_FILE))?;
    Ok(())
}

pub fn load_keys(dir: impl AsRef<Path>) -> Result<StoredKeys> {
    let dir = dir.as_ref();
    let params = CkksParams::load(dir.join(PARAMS_FILE))?;
    let secret_path = dir.join(SECRET_FILE);
    let secret = if secret_path.exists() { Some(SecretKey::load(secret_path)?) } else { None };
    Ok(StoredKeys {
        ctx: CkksContext::new(params)?,
        secret,
        public: PublicKey::load(dir.join(PUBLIC_FILE))?,
        relin: RelinKey::load(dir.join(RELIN_FILE))?,
        galois: GaloisKeys::load(dir.join(GALOIS_FILE))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ckks::keygen;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn directory_round_trip() {
        let params = CkksParams::insecure_test(16, 1);
        let ctx = CkksContext::new(params.clone()).unwrap();
        let keys = keygen(ctx, &mut ChaCha20Rng::seed_from_u64(1));
        let dir = tempfile::tempdir().unwrap();
        save_keys(dir.path(), &params, &keys).unwrap();
        let back = load_keys(dir.path()).unwrap();
        assert_eq!(back.ctx.params(), &params);
        assert_eq!(back.secret.as_ref(), Some(&keys.secret));
        assert_eq!(back.public, keys.public);
        assert_eq!(back.relin, keys.relin);
        assert_eq!(back.galois, keys.galois);
        std::fs::remove_file(dir.path().join(SECRET_FILE)).unwrap();
        assert!(load_keys(dir.path()).unwrap().secret.is_none());
    }
}
