//! Accounts, salted password hashes and bearer tokens.

use std::collections::HashMap;
use std::sync::RwLock;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    #[default]
    User,
    Curator,
    Admin,
}

impl Role {
    /// Curators and admins may see records parked for curation.
    pub fn can_curate(self) -> bool {
        self >= Role::Curator
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserAccount {
    pub user_id: String,
    pub email: String,
    pub salt: String,
    pub credential_hash: String,
    pub created_at: i64,
    #[serde(default)]
    pub role: Role,
}

fn random_hex(bytes: usize) -> String {
    let mut buf = vec![0u8; bytes];
    rand::rng().fill_bytes(&mut buf);
    hex::encode(buf)
}

pub fn new_salt() -> String {
    random_hex(16)
}

/// Hex sha256 of `salt:password`.
pub fn hash_password(salt: &str, password: &str) -> String {
    let mut h = Sha256::new();
    h.update(salt.as_bytes());
    h.update(b":");
    h.update(password.as_bytes());
    hex::encode(h.finalize())
}

pub fn verify_password(account: &UserAccount, password: &str) -> bool {
    hash_password(&account.salt, password) == account.credential_hash
}

/// Loose shape check: one `@`, non-empty local part, dotted domain.
pub fn is_plausible_email(email: &str) -> bool {
    match email.split_once('@') {
        Some((local, domain)) => {
            !local.is_empty()
                && !domain.contains('@')
                && domain.contains('.')
                && !domain.starts_with('.')
                && !domain.ends_with('.')
                && !email.chars().any(char::is_whitespace)
        }
        None => false,
    }
}

pub const MIN_PASSWORD_LEN: usize = 8;

/// Issued bearer tokens, held in memory.
#[derive(Debug, Default)]
pub struct TokenRegistry {
    tokens: RwLock<HashMap<String, String>>,
}

impl TokenRegistry {
    /// New token for `user_id`.
    pub fn issue(&self, user_id: &str) -> String {
        let token = random_hex(32);
        self.tokens
            .write()
            .expect("token lock")
            .insert(token.clone(), user_id.to_string());
        token
    }

    pub fn resolve(&self, token: &str) -> Option<String> {
        self.tokens.read().expect("token lock").get(token).cloned()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hashing_is_salted() {
        let a = hash_password("s1", "secret-pw");
        assert_eq!(a, hash_password("s1", "secret-pw"));
        assert_ne!(a, hash_password("s2", "secret-pw"));
        assert_eq!(a.len(), 64);
        let acct = UserAccount {
            user_id: "u1".into(),
            email: "a@b.org".into(),
            salt: "s1".into(),
            credential_hash: a,
            created_at: 0,
            role: Role::User,
        };
        assert!(verify_password(&acct, "secret-pw"));
        assert!(!verify_password(&acct, "wrong"));
    }

    #[test]
    fn emails_and_tokens() {
        assert!(is_plausible_email("ann@lab.edu"));
        for bad in ["ann", "@lab.edu", "ann@lab", "a b@lab.edu", "a@b@c.d"] {
            assert!(!is_plausible_email(bad), "{bad}");
        }
        let reg = TokenRegistry::default();
        let t = reg.issue("u7");
        assert_eq!(reg.resolve(&t).as_deref(), Some("u7"));
        assert_eq!(reg.resolve("nope"), None);
        assert_ne!(reg.issue("u7"), t);
    }
}
