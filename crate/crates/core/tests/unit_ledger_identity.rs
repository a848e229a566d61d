use satshare::ledger::*;

#[test]
fn sign_verify_forge() {
    let mut r = IdentityRegistry::new(7);
    r.issue("alice");
    r.issue("bob");
    let tag = r.sign("alice", b"hello").unwrap();
    assert!(r.verify("alice", b"hello", &tag));
    assert!(!r.verify("bob", b"hello", &tag));
    assert!(!r.verify("alice", b"hellp", &tag));
    assert!(!r.verify("carol", b"hello", &tag));
    assert!(r.sign("carol", b"x").is_none());
}

#[test]
fn leading_zeros() {
    let mut d = Digest::ZERO;
    assert_eq!(d.leading_zero_bits(), 256);
    d.0[1] = 0b0001_0000;
    assert_eq!(d.leading_zero_bits(), 11);
}
