"""
connection_oracle.py: Symbolic vierbein, anholonomity, spin connection and
Christoffel symbols for the diagonal built-in metrics.

    uv run python scripts/connection_oracle.py schwarzschild 0 2 1.5708 0

Independent of freefall.geometry: everything is differentiated exactly with
sympy and only evaluated at the end. The spin connection comes from the
covariant derivative of the frame, not from the anholonomity. Index layout
matches geometry.py.
"""

import sys
from typing import Dict, List, Sequence

import sympy as sp

t, theta, phi = sp.symbols("t theta phi", real=True)
r, rs = sp.symbols("r rs", positive=True)
COORDS = (t, r, theta, phi)
ETA = sp.diag(1, -1, -1, -1)

METRICS: Dict[str, sp.Matrix] = {
    "spherical-minkowski": sp.diag(1, -1, -(r**2), -(r**2) * sp.sin(theta) ** 2),
    "schwarzschild": sp.diag(1 - rs / r, -1 / (1 - rs / r), -(r**2), -(r**2) * sp.sin(theta) ** 2),
}


def vierbein(g: sp.Matrix) -> sp.Matrix:
    return sp.diag(*[sp.sqrt(ETA[i, i] * g[i, i]) for i in range(4)])


def anholonomity(e: sp.Matrix) -> List:
    einv = e.inv().T
    return [
        [
            [
                sp.Rational(1, 2)
                * sum(
                    einv[a, lam] * (sp.diff(e[a, nu], COORDS[mu]) - sp.diff(e[a, mu], COORDS[nu]))
                    for a in range(4)
                )
                for lam in range(4)
            ]
            for nu in range(4)
        ]
        for mu in range(4)
    ]


def spin_connection(e: sp.Matrix, gamma: List) -> List:
    """omega_mu^a_b = e^a_nu (d_mu e_b^nu + Gamma^nu_{mu lam} e_b^lam), second index raised with eta."""
    einv = e.inv().T
    mixed = [
        [
            [
                sum(
                    e[a, nu]
                    * (sp.diff(einv[b, nu], COORDS[mu]) + sum(gamma[nu][mu][lam] * einv[b, lam] for lam in range(4)))
                    for nu in range(4)
                )
                for b in range(4)
            ]
            for a in range(4)
        ]
        for mu in range(4)
    ]
    return [[[mixed[mu][a][b] * ETA[b, b] for b in range(4)] for a in range(4)] for mu in range(4)]


def christoffel(g: sp.Matrix) -> List:
    ginv = g.inv()
    return [
        [
            [
                sp.Rational(1, 2)
                * sum(
                    ginv[lam, s]
                    * (sp.diff(g[s, mu], COORDS[nu]) + sp.diff(g[s, nu], COORDS[mu]) - sp.diff(g[mu, nu], COORDS[s]))
                    for s in range(4)
                )
                for nu in range(4)
            ]
            for mu in range(4)
        ]
        for lam in range(4)
    ]


def _numeric(tensor, subs) -> List:
    if isinstance(tensor, list):
        return [_numeric(part, subs) for part in tensor]
    return float(sp.N(sp.sympify(tensor).subs(subs)))


def oracle(name: str, point: Sequence[float], rs_value: float = 1.0) -> Dict[str, object]:
    """Nested-list tensors of metric `name` evaluated at `point`."""
    g = METRICS[name]
    e = vierbein(g)
    omega = anholonomity(e)
    gamma = christoffel(g)
    subs = dict(zip(COORDS, point))
    subs[rs] = rs_value
    return {
        "vierbein": _numeric([[e[a, m] for m in range(4)] for a in range(4)], subs),
        "anholonomity": _numeric(omega, subs),
        "spin_connection": _numeric(spin_connection(e, gamma), subs),
        "christoffel": _numeric(gamma, subs),
    }


def main(argv: Sequence[str]) -> int:
    if len(argv) != 5 or argv[0] not in METRICS:
        print(f"usage: connection_oracle.py {{{'|'.join(METRICS)}}} t r theta phi", file=sys.stderr)
        return 2
    values = oracle(argv[0], [float(v) for v in argv[1:]])
    for tensor, nested in values.items():
        print(f"# tensor {tensor}")
        stack = [((), nested)]
        while stack:
            idx, item = stack.pop(0)
            if isinstance(item, list):
                stack.extend((idx + (i,), sub) for i, sub in enumerate(item))
            elif item != 0.0:
                print(",".join(str(i) for i in idx) + f",{item!r}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
