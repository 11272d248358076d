from fractions import Fraction

import pytest

from kdist.certificate import Certificate, CertificateError, verify
from kdist.pipeline import (
    adeg_certificate, gamma_build, gamma_certificate, omega_certificate, phi_certificate, psi_certificate,
    theta_certificate, upper_certificate,
)
from kdist.verdicts import FAILED
from kdist.witness import DenseWitness, OrbitWitness


def _roundtrip(cert):
    text = cert.dumps()
    back = Certificate.loads(text)
    assert back.dumps() == text
    res = verify(back)
    assert res.ok, res.mismatches
    return back


@pytest.mark.parametrize("build", [
    lambda: adeg_certificate("OR:4", Fraction(1, 3))[1],
    lambda: adeg_certificate("OR:2 o THR:2:2 <=2", Fraction(1, 3))[1],
    lambda: omega_certificate(2, 4, 16),
    lambda: psi_certificate(2, 4, 16),
    lambda: phi_certificate(3),
    lambda: theta_certificate(4, 2),
    lambda: gamma_certificate(gamma_build(16, 2, n=2, M=2, N=3, T=3)),
    lambda: upper_certificate(2, 3, 2, emit_poly=True)[1],
])
def test_certificates_roundtrip_and_reverify(build):
    cert = build()
    assert cert.ok
    _roundtrip(cert)


def test_certificates_are_deterministic():
    a = gamma_certificate(gamma_build(16, 2, N=4)).dumps()
    b = gamma_certificate(gamma_build(16, 2, N=4)).dumps()
    assert a == b
    assert adeg_certificate("OR:6", Fraction(1, 3))[1].dumps() == adeg_certificate("OR:6", Fraction(1, 3))[1].dumps()


def test_tampered_witness_is_caught():
    cert = phi_certificate(3)
    text = cert.dumps().replace("witness psi level 3 1/2 0 0 -1/2", "witness psi level 3 1/2 0 1/4 -1/4")
    assert text != cert.dumps()
    res = verify(Certificate.loads(text))
    assert not res.ok
    assert any(c.verdict == FAILED for c in res.fresh.claims)


def test_inflated_phd_claim_names_the_monomial():
    _, cert = adeg_certificate("OR:4", Fraction(1, 3))
    text = cert.dumps().replace("assert phd_at_least 2", "assert phd_at_least 4")
    res = verify(Certificate.loads(text))
    bad = [c for c in res.fresh.claims if c.verdict == FAILED]
    assert bad and "violating monomial" in bad[0].detail


def test_stored_verdicts_are_not_trusted():
    cert = phi_certificate(2)
    lines = cert.dumps().splitlines()
    lines = [ln.replace("claim CERTIFIED", "claim FAILED", 1) if ln.startswith("claim") else ln for ln in lines]
    res = verify(Certificate.loads("\n".join(lines) + "\n"))
    assert res.fresh.ok and not res.ok and res.mismatches


@pytest.mark.parametrize("text", [
    "",
    "not a certificate\n",
    "kdist-certificate 1\ntool x\n",
    "kdist-certificate 1\nkind adeg\nparam eps\n",
    "kdist-certificate 1\nkind adeg\nwitness psi level 2 1 2\n",
    "kdist-certificate 1\nkind adeg\nwitness psi dense 2 1 2 3\n",
    "kdist-certificate 1\nkind adeg\nbogus line\n",
    "kdist-certificate 1\nkind adeg\nclaim only\tthree\tfields\n",
])
def test_malformed_certificates_raise(text):
    with pytest.raises(CertificateError):
        Certificate.loads(text)


def test_unknown_kind_raises_on_verify():
    with pytest.raises(CertificateError):
        verify(Certificate.loads("kdist-certificate 1\nkind mystery\n"))


def test_witness_records_roundtrip():
    dense = DenseWitness(2, (Fraction(1, 4), Fraction(-1, 4), Fraction(-1, 4), Fraction(1, 4)))
    orbit = OrbitWitness((2, 2), {(0, 0): Fraction(1, 2), (0, 2): Fraction(-1, 2)})
    cert = Certificate("witness", "", [], {"a": dense, "b": orbit})
    back = Certificate.loads(cert.dumps())
    assert back.witnesses["a"].dense_values() == dense.dense_values()
    assert back.witnesses["b"].masses == orbit.masses
    assert back.witnesses["b"].dense_values() == orbit.dense_values()
