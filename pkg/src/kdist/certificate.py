"""Line-oriented certificates: exact payload, parameters with provenance, and claim verdicts.

Verification rebuilds every object from the payload and recomputes every
verdict; stored verdicts are only compared, never trusted.

    kdist-certificate 1
    tool kdist <version>
    kind <kind>
    spec <function spec>
    param <name> <value> <PAPER|CONFIG|MEASURED>
    witness <name> level <n> <v_0> ... <v_n>
    witness <name> dense <n> <v_0> ... <v_{2^n - 1}>
    witness <name> orbit <shape> <orbit>=<mass> ...
    assert <claim> <args...>
    info <free text>
    claim <verdict>\t<expected>\t<name>\t<measured>\t<bound>\t<detail>
"""
from __future__ import annotations

import ast
from dataclasses import dataclass, field
from fractions import Fraction

from kdist import __version__
from kdist.boolfn import parse_spec
from kdist.exact import fmt, frac
from kdist.verdicts import ClaimResult, Report
from kdist.witness import DenseWitness, LevelWitness, OrbitWitness, Witness

MAGIC = "kdist-certificate 1"


class CertificateError(ValueError):
    pass


@dataclass
class Certificate:
    kind: str
    spec: str = ""
    params: list = field(default_factory=list)  # (name, value, provenance)
    witnesses: dict = field(default_factory=dict)  # name -> Witness
    asserts: list = field(default_factory=list)  # tuples of tokens
    info: list = field(default_factory=list)
    claims: list = field(default_factory=list)  # ClaimResult
    tool: str = f"kdist {__version__}"

    def param(self, name: str, default=None):
        for k, v, _ in self.params:
            if k == name:
                return v
        return default

    def param_int(self, name: str, default=None):
        v = self.param(name)
        return default if v is None else int(frac(v))

    @property
    def report(self) -> Report:
        return Report(self.spec or self.kind, list(self.claims))

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.claims)

    # -------------------------------------------------------------- text form

    def dumps(self) -> str:
        out = [MAGIC, f"tool {self.tool}", f"kind {self.kind}"]
        if self.spec:
            out.append(f"spec {self.spec}")
        for name, value, prov in self.params:
            out.append(f"param {name} {_val(value)} {prov}")
        for name, w in self.witnesses.items():
            out.append(_dump_witness(name, w))
        for a in self.asserts:
            out.append("assert " + " ".join(str(t) for t in a))
        for line in self.info:
            out.append(f"info {line}")
        for c in self.claims:
            fields = [c.verdict, c.expected, c.name, c.measured, c.bound, c.detail]
            out.append("claim " + "\t".join(_clean(f) for f in fields))
        return "\n".join(out) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Certificate":
        lines = text.splitlines()
        if not lines or lines[0].strip() != MAGIC:
            raise CertificateError("not a kdist certificate (bad header)")
        cert = cls(kind="")
        for no, raw in enumerate(lines[1:], start=2):
            if not raw.strip():
                continue
            head, _, rest = raw.partition(" ")
            try:
                if head == "tool":
                    cert.tool = rest
                elif head == "kind":
                    cert.kind = rest.strip()
                elif head == "spec":
                    cert.spec = rest.strip()
                elif head == "param":
                    name, value, prov = rest.split()
                    cert.params.append((name, _parse_val(value), prov))
                elif head == "witness":
                    name, w = _load_witness(rest)
                    cert.witnesses[name] = w
                elif head == "assert":
                    cert.asserts.append(tuple(rest.split()))
                elif head == "info":
                    cert.info.append(rest)
                elif head == "claim":
                    parts = rest.split("\t")
                    if len(parts) != 6:
                        raise ValueError("claim needs 6 tab-separated fields")
                    verdict, expected, name, measured, bound, detail = parts
                    cert.claims.append(ClaimResult(name, verdict, measured, bound, detail, expected))
                else:
                    raise ValueError(f"unknown record {head!r}")
            except (ValueError, SyntaxError, ZeroDivisionError) as e:
                raise CertificateError(f"line {no}: {e}") from e
        if not cert.kind:
            raise CertificateError("certificate has no kind")
        return cert

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> "Certificate":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


def _clean(s: str) -> str:
    return str(s).replace("\t", " ").replace("\n", " ")


def _val(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, (int, Fraction)):
        return fmt(v)
    return str(v)


def _parse_val(s: str):
    if s == "none":
        return None
    try:
        return frac(s)
    except (ValueError, ZeroDivisionError):
        return s


def _orbit_text(o) -> str:
    return repr(o).replace(" ", "")


def _dump_witness(name: str, w: Witness) -> str:
    if isinstance(w, LevelWitness):
        return f"witness {name} level {w.n} " + " ".join(fmt(v) for v in w.levels)
    if isinstance(w, OrbitWitness):
        body = " ".join(f"{_orbit_text(o)}={fmt(v)}" for o, v in sorted(w.masses.items(), key=lambda t: repr(t[0])))
        return f"witness {name} orbit {','.join(map(str, w.shape))} {body}".rstrip()
    vals = w.dense_values()
    return f"witness {name} dense {w.n} " + " ".join(fmt(v) for v in vals)


def _load_witness(rest: str):
    toks = rest.split()
    if len(toks) < 3:
        raise ValueError("truncated witness record")
    name, kind = toks[0], toks[1]
    if kind == "level":
        n = int(toks[2])
        vals = tuple(frac(t) for t in toks[3:])
        if len(vals) != n + 1:
            raise ValueError(f"level witness needs {n + 1} values, got {len(vals)}")
        return name, LevelWitness(n, vals)
    if kind == "dense":
        n = int(toks[2])
        vals = tuple(frac(t) for t in toks[3:])
        if len(vals) != 1 << n:
            raise ValueError(f"dense witness needs {1 << n} values, got {len(vals)}")
        return name, DenseWitness(n, vals)
    if kind == "orbit":
        shape = tuple(int(s) for s in toks[2].split(","))
        masses = {}
        for t in toks[3:]:
            o, _, v = t.rpartition("=")
            masses[ast.literal_eval(o)] = frac(v)
        return name, OrbitWitness(shape, masses)
    raise ValueError(f"unknown witness kind {kind!r}")


# ------------------------------------------------------------------ verification

def recompute(cert: Certificate) -> Report:
    """Rebuild the certified object from the payload and evaluate every claim afresh."""
    from kdist import pipeline  # imported late: pipeline builds certificates too

    handler = pipeline.EVALUATORS.get(cert.kind)
    if handler is None:
        raise CertificateError(f"unknown certificate kind {cert.kind!r}")
    return handler(cert)


@dataclass
class VerifyResult:
    fresh: Report
    mismatches: list  # (name, stored verdict, fresh verdict)

    @property
    def ok(self) -> bool:
        return not self.mismatches and self.fresh.ok


def verify(cert: Certificate) -> VerifyResult:
    fresh = recompute(cert)
    stored = {c.name: c for c in cert.claims}
    mism = []
    for c in fresh.claims:
        s = stored.pop(c.name, None)
        if s is None:
            mism.append((c.name, "(missing)", c.verdict))
        elif s.verdict != c.verdict or s.measured != c.measured:
            mism.append((c.name, f"{s.verdict} {s.measured}", f"{c.verdict} {c.measured}"))
    for name, s in stored.items():
        mism.append((name, s.verdict, "(not recomputed)"))
    return VerifyResult(fresh, mism)


def witness_certificate(kind: str, f, psi: Witness, asserts: list, params=(), info=()) -> Certificate:
    """Certificate for a single witness against a function, claims evaluated by verify_witness."""
    cert = Certificate(kind, f.spec if f is not None else "", list(params), {"psi": psi}, [tuple(map(str, a)) for a in asserts],
                       list(info))
    cert.claims = recompute(cert).claims
    return cert


def spec_function(cert: Certificate):
    return parse_spec(cert.spec) if cert.spec else None
