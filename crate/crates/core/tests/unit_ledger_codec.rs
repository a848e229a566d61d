use satshare::ledger::codec::*;

#[test]
fn layout_is_big_endian_and_length_prefixed() {
    let mut e = Encoder::new();
    e.u64(1).str("ab").u32(0x0102_0304);
    assert_eq!(
        e.finish(),
        vec![0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 2, b'a', b'b', 1, 2, 3, 4]
    );
}

#[test]
fn truncated_input_is_reported() {
    let mut d = Decoder::new(&[0, 0, 0, 5, b'x']);
    assert_eq!(d.bytes(), Err(DecodeError::Truncated(4)));
}
