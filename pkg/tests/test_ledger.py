from fractions import Fraction as F

import pytest

from arakelov.errors import LedgerError
from arakelov.ledger import DEFAULT_LEDGER, ConstantLedger, resolve_ledger


def test_defaults():
    L = DEFAULT_LEDGER
    assert L["bruin_a"] == F(11, 125) and L["bruin_b"] == F(77, 10) and L["bruin_c"] == 16000
    for k in ("bruin_a", "bruin_b", "bruin_c"):
        assert L.provenance(k) == "paper-pinned"
    assert set(L.placeholders()) == {
        "c_MU", "a0_integral", "ae_integral", "c_mumford", "c_bezout_err3", "c_bezout_err1", "gamma", "gamma1",
    }
    assert all(L[k] == 1 for k in L.placeholders())


def test_roundtrip():
    L = DEFAULT_LEDGER.with_values(c_MU=F(3, 2))
    assert ConstantLedger.parse(L.dumps()) == L


def test_parse_inline_and_preceding():
    text = "# provenance: placeholder\nc_MU = 3/2\ngamma = 0.5  #provenance: placeholder\n"
    L = ConstantLedger.parse(text)
    assert L["c_MU"] == F(3, 2) and L["gamma"] == F(1, 2)
    assert L["gamma1"] == 1


@pytest.mark.parametrize(
    "text",
    [
        "c_MU = 2\n",  # no provenance
        "# provenance: placeholder\nc_MU = -1\n",  # not positive
        "# provenance: guess\nc_MU = 2\n",  # bad tag
        "# provenance: placeholder\nnope = 2\n",  # unknown key
        "# provenance: placeholder\nc_MU = abc\n",
        "# provenance: placeholder\nc_MU 2\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(LedgerError):
        ConstantLedger.parse(text)


def test_resolve(tmp_path, monkeypatch):
    monkeypatch.delenv("ARAKELOV_LEDGER", raising=False)
    assert resolve_ledger(None) == (DEFAULT_LEDGER, None)
    f = tmp_path / "l.txt"
    f.write_text("c_MU = 5  #provenance: placeholder\n")
    monkeypatch.setenv("ARAKELOV_LEDGER", str(f))
    L, path = resolve_ledger(None)
    assert L["c_MU"] == 5 and path == str(f)
    with pytest.raises(LedgerError):
        resolve_ledger(tmp_path / "missing")


def test_dominates():
    big = DEFAULT_LEDGER.with_values(ae_integral=2)
    assert big.dominates(DEFAULT_LEDGER)
    assert not DEFAULT_LEDGER.dominates(big)
