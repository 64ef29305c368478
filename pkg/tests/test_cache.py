import pytest

from krpoly import charformula
from krpoly.cache import CACHE_ENV, CacheCorruption, DiskCharacterStore, cache_roundtrip, default_cache_dir, encode
from krpoly.charformula import character
from krpoly.groupring import GroupRingElem
from krpoly.rootsys import Weight


def test_roundtrip_trivial_is_byte_identical(F4):
    one = GroupRingElem.one(4)
    assert encode("F4", F4.zero(), cache_roundtrip("F4", F4.zero(), one)) == encode("F4", F4.zero(), one)


def test_roundtrip_omega1(F4):
    chi = character(F4, F4.fundamental(1)).value
    assert cache_roundtrip("F4", F4.fundamental(1), chi) == chi


def test_store_hit_miss_and_tamper(F4, tmp_path):
    store = DiskCharacterStore(tmp_path)
    lam = Weight((0, 0, 0, 1))
    charformula.clear_memo()
    first = character(F4, lam, store).value
    assert store.misses == 1 and store.path(F4, lam).exists()
    charformula.clear_memo()
    assert character(F4, lam, store).value == first
    assert store.hits == 1
    p = store.path(F4, lam)
    text = p.read_text()
    p.write_text(text.replace("\n1 ", "\n2 ", 1) if "\n1 " in text else text[:-2] + "9\n")
    with pytest.raises(CacheCorruption):
        store.get(F4, lam)
    lax = DiskCharacterStore(tmp_path, strict=False)
    assert lax.get(F4, lam) is None and not p.exists()


def test_wrong_key_rejected(F4):
    chi = character(F4, F4.fundamental(4)).value
    text = encode("F4", F4.fundamental(4), chi)
    from krpoly.cache import decode
    with pytest.raises(CacheCorruption):
        decode(text, "F4", F4.fundamental(3))
    with pytest.raises(CacheCorruption):
        decode("garbage\n", "F4")


def test_env_override(monkeypatch, tmp_path):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    assert default_cache_dir() == tmp_path


def test_default_store_swap(F4, tmp_path):
    store = DiskCharacterStore(tmp_path)
    prev = charformula.use_store(store)
    try:
        charformula.clear_memo()
        character(F4, Weight((0, 0, 1, 0)))
    finally:
        charformula.use_store(prev)
    assert any(tmp_path.rglob("*.chr"))
