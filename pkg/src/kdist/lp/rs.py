"""Mass-correction LP: cancel a witness's high-weight part without losing pure high degree."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice

from kdist import orbits as orb
from kdist.exact import CapError
from kdist.lp.simplex import LPInstance, LPSolution, solve
from kdist.witness import OrbitWitness, PatchedWitness, Witness, orbit_masses, witness_shape

RS_CLASS_CAP = 4000


@dataclass
class RSResult:
    nu: PatchedWitness
    norm: Fraction  # ||nu||_1
    low_norm: Fraction  # l1 of nu on weight <= N
    high_mass: Fraction  # mass of the target above N (nu copies it)
    lp: LPInstance = field(repr=False)
    solution: LPSolution = field(repr=False)


def rs_lp(target: Witness, N: int, D: int, shape: tuple | None = None) -> RSResult:
    """min ||nu||_1 with nu = target above weight N and <nu, chi_S> = 0 for |S| <= D.

    Variables are the signed masses of nu on orbits of weight <= N; the rows
    ask them to cancel the target's high-weight moments.
    """
    shape = witness_shape(target) if shape is None else tuple(shape)
    if shape is None:
        raise ValueError("mass correction needs a block-symmetric target")
    if D < 0:
        raise ValueError("degree must be non-negative")
    low_orbits = list(islice(orb.orbits(shape, N), RS_CLASS_CAP + 1))
    if len(low_orbits) > RS_CLASS_CAP:
        raise CapError(f"correction LP capped at {RS_CLASS_CAP} orbits")
    base_low = orbit_masses(target, shape, N)
    lp = LPInstance(note=f"mass correction above weight {N}, degree {D}")
    u = [lp.add_var(f"u{i}") for i in range(len(low_orbits))]
    v = [lp.add_var(f"v{i}") for i in range(len(low_orbits))]
    for d in range(min(D, orb.arity(shape)) + 1):
        for sig in orb.signatures(shape, d):
            high = target.moment(sig) - base_low.moment(sig)
            row = {}
            for i, o in enumerate(low_orbits):
                k = Fraction(orb.char_sum(shape, o, sig), orb.size(shape, o))
                if k:
                    row[u[i]] = k
                    row[v[i]] = -k
            lp.add_row(row, "==", -high)
    lp.set_objective({x: 1 for x in u + v}, "min")
    sol = solve(lp)
    if sol.status != "optimal":
        raise RuntimeError(f"correction LP ended with status {sol.status}")
    low = OrbitWitness(shape, {o: sol.x[a] - sol.x[b] for o, a, b in zip(low_orbits, u, v)})
    nu = PatchedWitness(target, N, low)
    high = target.mass_above(N)
    return RSResult(nu, low.l1() + high, low.l1(), high, lp, sol)
